//! Streaming counts of vectors, lines and planes of bounded norm, for bounds
//! too large to materialize the enumeration.

use serde::{Deserialize, Serialize};

use super::grassmann::GrassmannPoint;
use super::window::Window;
use crate::arith::moebius_divisors;
use crate::enumerate::Ellipsoid;
use crate::error::{Error, Result};
use crate::hnf::minor_gcd_rank2;
use crate::lattice::QuadraticLattice;
use crate::parallel::map_indices;

/// Window evaluation specialised to single integer vectors.
enum Fast {
    All,
    Empty,
    /// oriented cap: unit center, cos of half-angle
    Cap(Vec<f64>, f64),
    /// unoriented cap: unit center, cos^2
    Line(Vec<f64>, f64),
    Entry(usize, usize, f64, f64),
    Generic(Window),
}

impl Fast {
    fn new(w: &Window) -> Fast {
        let unit = |c: &[f64]| {
            let n = c.iter().map(|x| x * x).sum::<f64>().sqrt();
            c.iter().map(|x| x / n).collect::<Vec<_>>()
        };
        match w {
            Window::All => Fast::All,
            Window::Empty => Fast::Empty,
            Window::Cap { center, half_angle } => Fast::Cap(unit(center), half_angle.cos()),
            Window::ProjectorCap { center, half_angle } => Fast::Line(unit(center), half_angle.cos().powi(2)),
            Window::ProjectorBox { i, j, lo, hi } => Fast::Entry(*i, *j, *lo, *hi),
            _ => Fast::Generic(w.clone()),
        }
    }

    fn check(&self, d: usize) -> Result<()> {
        let bad = match self {
            Fast::Cap(c, _) | Fast::Line(c, _) => c.len() != d,
            Fast::Entry(i, j, ..) => *i >= d || *j >= d,
            _ => false,
        };
        if bad {
            return Err(Error::InvalidArgument(format!("window does not fit dimension {d}")));
        }
        Ok(())
    }

    fn dot(c: &[f64], v: &[i64]) -> f64 {
        c.iter().zip(v).map(|(a, &b)| a * b as f64).sum()
    }

    /// Value on the vector v (direction-sensitive).
    fn vector(&self, v: &[i64], e2: f64) -> bool {
        match self {
            Fast::All => true,
            Fast::Empty => false,
            Fast::Cap(c, cos) => {
                let t = Self::dot(c, v);
                if *cos >= 0.0 {
                    t >= 0.0 && t * t >= cos * cos * e2
                } else {
                    t >= 0.0 || t * t <= cos * cos * e2
                }
            }
            Fast::Generic(w) => w.contains_vectors(&[v.iter().map(|&x| x as f64).collect()]),
            _ => self.line(v, e2),
        }
    }

    /// Value on the line spanned by v.
    fn line(&self, v: &[i64], e2: f64) -> bool {
        match self {
            Fast::All => true,
            Fast::Empty => false,
            Fast::Cap(c, cos) => {
                let t = Self::dot(c, v);
                t * t >= cos * cos * e2
            }
            Fast::Line(c, cos2) => {
                let t = Self::dot(c, v);
                t * t >= cos2 * e2
            }
            Fast::Entry(i, j, lo, hi) => {
                let p = (v[*i] * v[*j]) as f64 / e2;
                *lo <= p && p < *hi
            }
            Fast::Generic(w) => GrassmannPoint::from_vectors(&[v.iter().map(|&x| x as f64).collect()])
                .map(|g| w.contains_projector(&g))
                .unwrap_or(false),
        }
    }
}

/// Rank-one counts on a grid of norm bounds. Index [k][w] refers to
/// n_grid[k] and window w.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Rank1Counts {
    pub n_grid: Vec<i64>,
    /// nonzero vectors v with pr(v) in the window
    pub mu: Vec<Vec<u64>>,
    /// lines (pairs ±v) in the window
    pub nu: Vec<Vec<u64>>,
    /// primitive lines in the window
    pub nu_prime: Vec<Vec<u64>>,
    pub total_mu: Vec<u64>,
    pub total_nu: Vec<u64>,
    pub total_nu_prime: Vec<u64>,
}

fn positive_definite_ellipsoid(l: &QuadraticLattice) -> Result<Ellipsoid> {
    if !l.is_positive_definite() {
        return Err(Error::NotPositiveDefinite);
    }
    Ellipsoid::new(l.gram())
}

fn gcd(mut a: i64, mut b: i64) -> i64 {
    a = a.abs();
    b = b.abs();
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// Per-vector streaming count of μ_n, ν_n and ν′_n on windows, for every n
/// in an ascending grid, in one pass at the largest bound.
pub fn rank1_window_counts(l: &QuadraticLattice, n_grid: &[i64], windows: &[Window]) -> Result<Rank1Counts> {
    if n_grid.windows(2).any(|p| p[0] >= p[1]) || n_grid.first().is_some_and(|&n| n < 0) {
        return Err(Error::InvalidArgument("norm grid must be nonnegative and increasing".into()));
    }
    let e = positive_definite_ellipsoid(l)?;
    let d = l.rank();
    let fast: Vec<Fast> = windows.iter().map(Fast::new).collect();
    for f in &fast {
        f.check(d)?;
    }
    let n_max = n_grid.last().copied().unwrap_or(0);
    let k = n_grid.len();
    let nw = windows.len();
    let g = l.gram();
    // per grid bucket: [mu.., nu.., nu'.., total_mu, total_nu, total_nu']
    let width = 3 * nw + 3;
    let (t_lo, t_hi) = e.top_range(n_max);
    let tops: Vec<i64> = (t_lo..=t_hi).collect();
    let parts = map_indices(tops.len(), |ti| {
        let mut acc = vec![0u64; k * width];
        let mut v = vec![0i64; d];
        e.for_each_line_at_top(n_max, tops[ti], |x, lo, hi| {
            v.copy_from_slice(x);
            let mut q0 = 0i128;
            let mut lin = 0i128;
            let mut tail_e2 = 0i64;
            let mut tail_gcd = 0i64;
            let mut tail_positive = None;
            for i in (1..d).rev() {
                if x[i] != 0 {
                    tail_positive = Some(x[i] > 0);
                }
            }
            for i in 1..d {
                tail_e2 += x[i] * x[i];
                tail_gcd = gcd(tail_gcd, x[i]);
                lin += g[0][i] as i128 * x[i] as i128;
                for j in 1..d {
                    q0 += x[i] as i128 * g[i][j] as i128 * x[j] as i128;
                }
            }
            let a = g[0][0] as i128;
            for t in lo..=hi {
                if t == 0 && tail_positive.is_none() {
                    continue;
                }
                v[0] = t;
                let q = a * (t as i128) * (t as i128) + 2 * lin * t as i128 + q0;
                let bucket = n_grid.partition_point(|&n| (n as i128) < q);
                let row = &mut acc[bucket * width..(bucket + 1) * width];
                let e2 = (tail_e2 + t * t) as f64;
                let rep = if t != 0 { t > 0 } else { tail_positive == Some(true) };
                let prim = gcd(tail_gcd, t) == 1;
                row[3 * nw] += 1;
                if rep {
                    row[3 * nw + 1] += 1;
                    if prim {
                        row[3 * nw + 2] += 1;
                    }
                }
                for (w, f) in fast.iter().enumerate() {
                    if f.vector(&v, e2) {
                        row[w] += 1;
                    }
                    if rep && f.line(&v, e2) {
                        row[nw + w] += 1;
                        if prim {
                            row[2 * nw + w] += 1;
                        }
                    }
                }
            }
        });
        acc
    });
    let mut acc = vec![0u64; k * width];
    for p in parts {
        for (a, b) in acc.iter_mut().zip(p) {
            *a += b;
        }
    }
    // cumulative over the grid
    for b in 1..k {
        for c in 0..width {
            acc[b * width + c] += acc[(b - 1) * width + c];
        }
    }
    let col = |c: usize| (0..k).map(|b| acc[b * width + c]).collect::<Vec<_>>();
    let table = |off: usize| (0..k).map(|b| (0..nw).map(|w| acc[b * width + off + w]).collect()).collect();
    Ok(Rank1Counts {
        n_grid: n_grid.to_vec(),
        mu: table(0),
        nu: table(nw),
        nu_prime: table(2 * nw),
        total_mu: col(3 * nw),
        total_nu: col(3 * nw + 1),
        total_nu_prime: col(3 * nw + 2),
    })
}

/// (ν_n, ν′_n) for r = 1: lines and primitive lines with B(v, v) <= n,
/// counting primitive vectors on each enumeration line by inclusion-exclusion.
pub fn rank1_totals(l: &QuadraticLattice, n: i64) -> Result<(u64, u64)> {
    let e = positive_definite_ellipsoid(l)?;
    let (t_lo, t_hi) = e.top_range(n);
    let tops: Vec<i64> = (t_lo..=t_hi).collect();
    let multiples = |m: i64, lo: i64, hi: i64| hi.div_euclid(m) - (lo - 1).div_euclid(m);
    let parts = map_indices(tops.len(), |ti| {
        let (mut all, mut prim) = (0u64, 0u64);
        let mut cache: std::collections::HashMap<i64, Vec<(u64, i64)>> = Default::default();
        e.for_each_line_at_top(n, tops[ti], |x, lo, hi| {
            let g = x[1..].iter().fold(0, |a, &b| gcd(a, b));
            let len = (hi - lo + 1) as u64;
            if g == 0 {
                all += len - u64::from(lo <= 0 && 0 <= hi);
                prim += u64::from(lo <= 1 && 1 <= hi) + u64::from(lo <= -1 && -1 <= hi);
            } else {
                all += len;
                let mu = cache.entry(g).or_insert_with(|| moebius_divisors(g as u64));
                let p: i64 = mu.iter().map(|&(e, s)| s * multiples(e as i64, lo, hi)).sum();
                prim += p as u64;
            }
        });
        (all, prim)
    });
    let (all, prim) = parts.iter().fold((0, 0), |(a, b), (x, y)| (a + x, b + y));
    Ok((all / 2, prim / 2))
}

/// Signed permutation matrices A with A^T B A = B, as (permutation, signs)
/// acting by (Av)_i = s_i v_{p(i)}.
pub fn signed_permutation_automorphisms(gram: &[Vec<i64>]) -> Vec<(Vec<usize>, Vec<i64>)> {
    let d = gram.len();
    let mut out = Vec::new();
    if d > 7 {
        return vec![((0..d).collect(), vec![1; d])];
    }
    let mut perm: Vec<usize> = (0..d).collect();
    permutations(&mut perm, 0, &mut |p| {
        if (0..d).any(|i| gram[p[i]][p[i]] != gram[i][i]) {
            return;
        }
        for mask in 0..(1u32 << d) {
            let s: Vec<i64> = (0..d).map(|i| if mask >> i & 1 == 1 { -1 } else { 1 }).collect();
            // (Av)_i = s_i v_{p(i)}, so B(Au, Av) = sum s_i s_j B_ij u_{p(i)} v_{p(j)}
            if (0..d).all(|i| (0..d).all(|j| s[i] * s[j] * gram[i][j] == gram[p[i]][p[j]])) {
                out.push((p.to_vec(), s));
            }
        }
    });
    out
}

fn permutations<F: FnMut(&[usize])>(p: &mut Vec<usize>, k: usize, f: &mut F) {
    if k == p.len() {
        f(p);
        return;
    }
    for i in k..p.len() {
        p.swap(k, i);
        permutations(p, k + 1, f);
        p.swap(k, i);
    }
}

fn apply(p: &[usize], s: &[i64], v: &[i64]) -> Vec<i64> {
    (0..v.len()).map(|i| s[i] * v[p[i]]).collect()
}

/// Number of ordered bases (v1, v2) of a rank-2 lattice whose Gram matrix
/// [[a, b], [b, c]] is Gauss-reduced (2|b| <= a <= c).
pub fn reduced_basis_count(a: i64, b: i64, c: i64) -> u64 {
    let edge = 2 * b.abs() == a;
    match (a == c, edge) {
        (true, true) => 24,
        (true, false) | (false, true) => 8,
        (false, false) => 4,
    }
}

/// (ν_n, ν′_n) for r = 2: rank-2 sublattices and primitive ones with
/// discriminant <= n. Each sublattice is found through its reduced bases,
/// first vectors taken up to signed-permutation symmetries of B.
pub fn rank2_totals(l: &QuadraticLattice, n: i64) -> Result<(u64, u64)> {
    let e = positive_definite_ellipsoid(l)?;
    let d = l.rank();
    if d < 2 {
        return Err(Error::InvalidArgument("rank 2 in dimension < 2".into()));
    }
    if n < 1 {
        return Ok((0, 0));
    }
    let g = l.gram();
    // 3a^2/4 <= ac - b^2 <= n
    let a_max = ((4 * n) as f64 / 3.0).sqrt().floor() as i64 + 1;
    let group = signed_permutation_automorphisms(g);
    let mut reps: Vec<(Vec<i64>, u64)> = Vec::new();
    e.for_each_vector(a_max, |v| {
        if v.iter().all(|&x| x == 0) {
            return;
        }
        let mut images: Vec<Vec<i64>> = group.iter().map(|(p, s)| apply(p, s, v)).collect();
        images.sort();
        images.dedup();
        if images.last().map(Vec::as_slice) == Some(v) {
            reps.push((v.to_vec(), images.len() as u64));
        }
    });
    // ellipsoids with coordinate j moved to the innermost position
    let swapped: Vec<Ellipsoid> = (0..d)
        .map(|j| {
            let perm = |i: usize| if i == 0 { j } else if i == j { 0 } else { i };
            let gj: Vec<Vec<i64>> = (0..d).map(|i| (0..d).map(|k| g[perm(i)][perm(k)]).collect()).collect();
            Ellipsoid::new(&gj)
        })
        .collect::<Result<_>>()?;
    let parts = map_indices(reps.len(), |ri| {
        let (v1, orbit) = &reps[ri];
        let a = l.norm(v1) as i64;
        let w: Vec<i64> = (0..d).map(|i| (0..d).map(|k| g[i][k] * v1[k]).sum()).collect();
        let j = (0..d).max_by_key(|&i| (w[i].abs(), std::cmp::Reverse(i))).unwrap_or(0);
        let wj = w[j] as i128;
        let c_max = (n + a * a / 4) / a;
        if c_max < a {
            return (0u64, 0u64);
        }
        let perm = |i: usize| if i == 0 { j } else if i == j { 0 } else { i };
        let mut v2 = vec![0i64; d];
        let (mut all, mut prim) = (0u64, 0u64);
        swapped[j].for_each_line(c_max, |y, lo, hi| {
            for i in 0..d {
                v2[perm(i)] = y[i];
            }
            v2[j] = 0;
            let s: i128 = (0..d).filter(|&i| i != j).map(|i| w[i] as i128 * v2[i] as i128).sum();
            // -a <= 2 (wj x + s) <= a
            let (b1, b2) = (-(a as i128) - 2 * s, a as i128 - 2 * s);
            let (x_lo, x_hi) = if wj > 0 {
                (crate::arith::ceil_div(b1, 2 * wj), crate::arith::floor_div(b2, 2 * wj))
            } else {
                (crate::arith::ceil_div(b2, 2 * wj), crate::arith::floor_div(b1, 2 * wj))
            };
            let x_lo = x_lo.max(lo as i128) as i64;
            let x_hi = x_hi.min(hi as i128) as i64;
            for x in x_lo..=x_hi {
                v2[j] = x;
                let c = l.norm(&v2);
                let b = wj * x as i128 + s;
                let disc = a as i128 * c - b * b;
                if c < a as i128 || disc <= 0 || disc > n as i128 {
                    continue;
                }
                let wt = 24 / reduced_basis_count(a, b as i64, c as i64);
                all += wt;
                if minor_gcd_rank2(v1, &v2) == 1 {
                    prim += wt;
                }
            }
        });
        (all * orbit, prim * orbit)
    });
    let (all, prim) = parts.iter().fold((0, 0), |(a, b), (x, y)| (a + x, b + y));
    if all % 24 != 0 || prim % 24 != 0 {
        return Err(Error::Validation(format!("basis weights do not sum to whole sublattices ({all}/24, {prim}/24)")));
    }
    Ok((all / 24, prim / 24))
}
