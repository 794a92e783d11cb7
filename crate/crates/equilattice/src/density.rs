//! Local densities by counting solutions of I(λ) = M modulo prime powers,
//! and relative Siegel–Weil volumes assembled from them.

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Pow, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::arith::{is_prime, prime_factors_big, primes_up_to, to_f64};
use crate::enumerate::enumerate_representations;
use crate::error::{Error, Result};
use crate::hnf::SublatticeHNF;
use crate::lattice::{GramMatrix, QuadraticLattice};
use crate::parallel::map_indices;

/// Largest residue set scanned directly, and largest explicit list of
/// singular solutions kept while lifting.
pub const SCAN_LIMIT: u64 = 10_000_000;

struct Problem<'a> {
    b: &'a [Vec<i64>],
    m: Vec<Vec<i64>>,
    d: usize,
    r: usize,
    a: i64,
}

impl Problem<'_> {
    fn new<'a>(l: &'a QuadraticLattice, r: usize, m: &GramMatrix, a: u64) -> Result<Problem<'a>> {
        if !is_prime(a) {
            return Err(Error::InvalidArgument(format!("{a} is not prime")));
        }
        if m.r() != r {
            return Err(Error::DimensionMismatch { expected: r, got: m.r() });
        }
        if r == 0 || r > l.rank() {
            return Err(Error::InvalidArgument(format!("r = {r} in rank {}", l.rank())));
        }
        Ok(Problem { b: l.gram(), m: m.entries.clone(), d: l.rank(), r, a: a as i64 })
    }

    fn dim(&self) -> usize {
        self.d * self.r
    }

    fn equations(&self) -> usize {
        self.r * (self.r + 1) / 2
    }

    /// Bx_j for each tuple member.
    fn bx(&self, x: &[i64]) -> Vec<Vec<i128>> {
        (0..self.r)
            .map(|j| (0..self.d).map(|t| (0..self.d).map(|u| self.b[t][u] as i128 * x[j * self.d + u] as i128).sum()).collect())
            .collect()
    }

    /// Whether I(x) ≡ M entrywise modulo q.
    fn solves(&self, x: &[i64], q: i128) -> bool {
        let bx = self.bx(x);
        for i in 0..self.r {
            for j in i..self.r {
                let v: i128 = (0..self.d).map(|t| x[i * self.d + t] as i128 * bx[j][t]).sum();
                if (v - self.m[i][j] as i128).rem_euclid(q) != 0 {
                    return false;
                }
            }
        }
        true
    }

    /// For r = 1: whether x, a solution mod a^s, lies in a class whose lifts
    /// are uniform from now on, i.e. s >= 2v + 1 where v is the a-adic
    /// valuation of the gradient 2Bx.
    fn lifts_uniformly(&self, x: &[i64], s: u32) -> bool {
        if self.r != 1 {
            return false;
        }
        let a = self.a as i128;
        let v = self.bx(x)
            .remove(0)
            .into_iter()
            .map(|g| {
                let mut g = 2 * g;
                let mut v = 0u32;
                if g == 0 {
                    return u32::MAX;
                }
                while g % a == 0 {
                    g /= a;
                    v += 1;
                }
                v
            })
            .min()
            .unwrap_or(u32::MAX);
        v < s && s > 2 * v
    }

    /// Whether y ↦ y^T B x + x^T B y maps onto symmetric r x r matrices over F_a.
    fn nonsingular(&self, x: &[i64]) -> bool {
        let a = self.a as i128;
        let bx = self.bx(x);
        let (d, r) = (self.d, self.r);
        let mut rows: Vec<Vec<i128>> = Vec::new();
        for i in 0..r {
            for j in i..r {
                let mut row = vec![0i128; d * r];
                for t in 0..d {
                    row[i * d + t] += bx[j][t];
                    row[j * d + t] += bx[i][t];
                }
                rows.push(row.into_iter().map(|v| v.rem_euclid(a)).collect());
            }
        }
        rank_mod(&mut rows, a) == self.equations()
    }
}

fn inv_mod(x: i128, a: i128) -> i128 {
    // a is prime: x^(a-2)
    let (mut base, mut e, mut acc) = (x.rem_euclid(a), a - 2, 1i128);
    while e > 0 {
        if e & 1 == 1 {
            acc = acc * base % a;
        }
        base = base * base % a;
        e >>= 1;
    }
    acc
}

fn rank_mod(rows: &mut [Vec<i128>], a: i128) -> usize {
    let cols = rows.first().map_or(0, Vec::len);
    let mut rank = 0;
    for c in 0..cols {
        let Some(p) = (rank..rows.len()).find(|&i| rows[i][c] != 0) else { continue };
        rows.swap(rank, p);
        let inv = inv_mod(rows[rank][c], a);
        for i in 0..rows.len() {
            if i != rank && rows[i][c] != 0 {
                let f = rows[i][c] * inv % a;
                for k in c..cols {
                    rows[i][k] = (rows[i][k] - f * rows[rank][k]).rem_euclid(a);
                }
            }
        }
        rank += 1;
    }
    rank
}

/// Decode index `idx` into `n` digits base `q`.
fn digits(mut idx: u64, q: u64, n: usize, out: &mut [i64]) {
    for o in out.iter_mut().take(n) {
        *o = (idx % q) as i64;
        idx /= q;
    }
}

fn checked_pow(a: u64, e: usize) -> Option<u64> {
    let mut v = 1u64;
    for _ in 0..e {
        v = v.checked_mul(a)?;
    }
    Some(v)
}

/// Count of λ in (L / a^s L)^r with I(λ) ≡ M (mod a^s) by scanning every
/// residue tuple. Only for a^{s d r} <= SCAN_LIMIT.
pub fn count_solutions_full_scan(l: &QuadraticLattice, r: usize, m: &GramMatrix, a: u64, s: u32) -> Result<u64> {
    let p = Problem::new(l, r, m, a)?;
    let q = checked_pow(a, s as usize).ok_or(Error::Overflow("modulus"))?;
    let total = checked_pow(q, p.dim()).filter(|&t| t <= SCAN_LIMIT).ok_or_else(|| {
        Error::Unsupported(format!("full scan of ({a}^{s})^{} residues", p.dim()))
    })?;
    const BLOCK: u64 = 1 << 14;
    let blocks = total.div_ceil(BLOCK) as usize;
    let parts = map_indices(blocks, |bi| {
        let mut x = vec![0i64; p.dim()];
        let mut c = 0u64;
        for idx in bi as u64 * BLOCK..((bi as u64 + 1) * BLOCK).min(total) {
            digits(idx, q, p.dim(), &mut x);
            c += u64::from(p.solves(&x, q as i128));
        }
        c
    });
    Ok(parts.iter().sum())
}

/// Solutions modulo a^s. Those whose lifts are uniform (nonsingular ones,
/// and for r = 1 those past the strong Hensel threshold) are only counted,
/// their number growing by a^{dr - r(r+1)/2} per level; the rest are listed
/// and lifted explicitly.
struct Level {
    s: u32,
    nonsingular: BigUint,
    singular: Vec<Vec<i64>>,
}

impl Level {
    fn count(&self) -> BigUint {
        &self.nonsingular + BigUint::from(self.singular.len())
    }
}

/// Congruence diagonalization of B over F_a (a odd).
fn diagonal_mod(b: &[Vec<i64>], a: i128) -> Vec<i128> {
    let n = b.len();
    let mut m: Vec<Vec<i128>> = b.iter().map(|row| row.iter().map(|&v| (v as i128).rem_euclid(a)).collect()).collect();
    let mut diag = Vec::with_capacity(n);
    for k in 0..n {
        if m[k][k] == 0 {
            if let Some(j) = (k + 1..n).find(|&j| m[j][j] != 0) {
                m.swap(k, j);
                for row in m.iter_mut() {
                    row.swap(k, j);
                }
            } else if let Some(j) = (k + 1..n).find(|&j| m[k][j] != 0) {
                // e_k += e_j makes the pivot 2 m[k][j] != 0
                for t in 0..n {
                    m[k][t] = (m[k][t] + m[j][t]) % a;
                }
                for t in 0..n {
                    m[t][k] = (m[t][k] + m[t][j]) % a;
                }
            }
        }
        let piv = m[k][k];
        diag.push(piv);
        if piv == 0 {
            continue;
        }
        let inv = inv_mod(piv, a);
        for i in k + 1..n {
            let f = m[i][k] * inv % a;
            if f == 0 {
                continue;
            }
            for t in k..n {
                m[i][t] = (m[i][t] - f * m[k][t]).rem_euclid(a);
            }
            for t in k..n {
                m[t][i] = (m[t][i] - f * m[t][k]).rem_euclid(a);
            }
        }
    }
    diag
}

/// Basis of the kernel of B over F_a.
fn kernel_mod(b: &[Vec<i64>], a: i128) -> Vec<Vec<i128>> {
    let n = b.len();
    let mut rows: Vec<Vec<i128>> = b.iter().map(|row| row.iter().map(|&v| (v as i128).rem_euclid(a)).collect()).collect();
    let mut pivots = Vec::new();
    let mut rank = 0;
    for c in 0..n {
        let Some(p) = (rank..n).find(|&i| rows[i][c] != 0) else { continue };
        rows.swap(rank, p);
        let inv = inv_mod(rows[rank][c], a);
        for k in 0..n {
            rows[rank][k] = rows[rank][k] * inv % a;
        }
        for i in 0..n {
            if i != rank && rows[i][c] != 0 {
                let f = rows[i][c];
                for k in 0..n {
                    rows[i][k] = (rows[i][k] - f * rows[rank][k]).rem_euclid(a);
                }
            }
        }
        pivots.push(c);
        rank += 1;
    }
    (0..n)
        .filter(|c| !pivots.contains(c))
        .map(|free| {
            let mut v = vec![0i128; n];
            v[free] = 1;
            for (i, &pc) in pivots.iter().enumerate() {
                v[pc] = (-rows[i][free]).rem_euclid(a);
            }
            v
        })
        .collect()
}

/// Level 1 for r = 1 and odd a without scanning: the number of solutions
/// of a diagonal form is a convolution of per-coordinate value counts, and
/// the singular solutions are the kernel vectors of B that solve.
fn first_level_rank1_odd(p: &Problem) -> Result<Level> {
    let a = p.a as i128;
    let mut dist = vec![0u128; a as usize];
    dist[0] = 1;
    for c in diagonal_mod(p.b, a) {
        let mut per = vec![0u128; a as usize];
        for t in 0..a {
            per[(c * t % a * t % a) as usize] += 1;
        }
        let mut next = vec![0u128; a as usize];
        for (u, &x) in dist.iter().enumerate() {
            if x == 0 {
                continue;
            }
            for (v, &y) in per.iter().enumerate() {
                next[(u + v) % a as usize] += x * y;
            }
        }
        dist = next;
    }
    let total = dist[(p.m[0][0] as i128).rem_euclid(a) as usize];
    let ker = kernel_mod(p.b, a);
    let size = checked_pow(a as u64, ker.len()).filter(|&t| t <= SCAN_LIMIT).ok_or_else(|| {
        Error::Unsupported(format!("kernel of dimension {} modulo {a}", ker.len()))
    })?;
    let mut coef = vec![0i64; ker.len()];
    let mut singular = Vec::new();
    for idx in 0..size {
        digits(idx, a as u64, ker.len(), &mut coef);
        let x: Vec<i64> = (0..p.d)
            .map(|t| ker.iter().zip(&coef).map(|(v, &c)| v[t] * c as i128).sum::<i128>().rem_euclid(a) as i64)
            .collect();
        if p.solves(&x, a) {
            singular.push(x);
        }
    }
    let nonsingular = BigUint::from(total) - BigUint::from(singular.len());
    Ok(Level { s: 1, nonsingular, singular })
}

fn first_level(p: &Problem) -> Result<Level> {
    if p.r == 1 && p.a != 2 {
        return first_level_rank1_odd(p);
    }
    let a = p.a as u64;
    let total = checked_pow(a, p.dim()).filter(|&t| t <= 100 * SCAN_LIMIT).ok_or_else(|| {
        Error::Unsupported(format!("{a}^{} residues at level 1", p.dim()))
    })?;
    const BLOCK: u64 = 1 << 14;
    let blocks = total.div_ceil(BLOCK) as usize;
    let parts = map_indices(blocks, |bi| {
        let mut x = vec![0i64; p.dim()];
        let mut ns = 0u64;
        let mut sing = Vec::new();
        for idx in bi as u64 * BLOCK..((bi as u64 + 1) * BLOCK).min(total) {
            digits(idx, a, p.dim(), &mut x);
            if p.solves(&x, p.a as i128) {
                if p.nonsingular(&x) {
                    ns += 1;
                } else {
                    sing.push(x.clone());
                }
            }
        }
        (ns, sing)
    });
    let mut level = Level { s: 1, nonsingular: BigUint::zero(), singular: Vec::new() };
    for (ns, sing) in parts {
        level.nonsingular += ns;
        level.singular.extend(sing);
    }
    Ok(level)
}

fn lift(p: &Problem, level: &Level) -> Result<Level> {
    let a = p.a as u64;
    let qs = checked_pow(a, level.s as usize).ok_or(Error::Overflow("modulus"))? as i64;
    let q_next = (qs as i128) * p.a as i128;
    let per_point = checked_pow(a, p.dim()).ok_or(Error::Overflow("lift count"))?;
    let parts = map_indices(level.singular.len(), |i| {
        let x = &level.singular[i];
        let mut y = vec![0i64; p.dim()];
        let mut out = Vec::new();
        for idx in 0..per_point {
            digits(idx, a, p.dim(), &mut y);
            let z: Vec<i64> = x.iter().zip(&y).map(|(u, v)| u + qs * v).collect();
            if p.solves(&z, q_next) {
                out.push(z);
            }
        }
        out
    });
    let factor = BigUint::from(a).pow((p.dim() - p.equations()) as u32);
    let mut next = Level { s: level.s + 1, nonsingular: &level.nonsingular * factor, singular: Vec::new() };
    for v in parts {
        for z in v {
            if p.lifts_uniformly(&z, next.s) {
                next.nonsingular += 1u32;
            } else {
                next.singular.push(z);
            }
        }
        if next.singular.len() as u64 > SCAN_LIMIT {
            return Err(Error::Unsupported(format!("more than {SCAN_LIMIT} singular solutions at level {}", next.s)));
        }
    }
    Ok(next)
}

/// Exact number of λ in (L / a^s L)^r with I(λ) ≡ M (mod a^s), by
/// level-by-level lifting.
pub fn count_solutions_mod(l: &QuadraticLattice, r: usize, m: &GramMatrix, a: u64, s: u32) -> Result<BigUint> {
    if s == 0 {
        return Err(Error::InvalidArgument("s must be at least 1".into()));
    }
    let p = Problem::new(l, r, m, a)?;
    let mut level = first_level(&p)?;
    while level.s < s {
        level = lift(&p, &level)?;
    }
    Ok(level.count())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LevelCount {
    pub s: u32,
    pub raw: BigUint,
    /// raw · a^{-s(rd - r(r+1)/2)}
    pub normalized: BigRational,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LocalDensityResult {
    pub prime: u64,
    pub levels: Vec<LevelCount>,
    pub stabilized: Option<BigRational>,
    /// First level, at or above the stabilization floor, whose normalized
    /// count equals the next one.
    pub s0: Option<u32>,
    /// Why lifting stopped early, if it did.
    pub note: Option<String>,
}

impl LocalDensityResult {
    pub fn value(&self) -> Result<&BigRational> {
        self.stabilized.as_ref().ok_or_else(|| Error::Unresolved(format!("local density at {} did not stabilize", self.prime)))
    }
}

/// Agreement of two consecutive levels is accepted as stabilization only
/// from level ord_a(4 det L det M) + 1 on; below it, equal levels can be
/// a plateau (Z^5, M = [4], a = 2 gives 3/4 at s = 2, 3 and 45/64 from s = 5).
pub fn stabilization_floor(l: &QuadraticLattice, m: &GramMatrix, a: u64) -> u32 {
    let mut x = BigInt::from(4) * l.det() * m.det();
    if x.is_zero() {
        return u32::MAX;
    }
    let a = BigInt::from(a);
    let mut v = 0;
    while (&x % &a).is_zero() {
        x /= &a;
        v += 1;
    }
    v + 1
}

pub fn local_density(l: &QuadraticLattice, r: usize, m: &GramMatrix, a: u64, s_max: u32) -> Result<LocalDensityResult> {
    if s_max < 2 {
        return Err(Error::InvalidArgument("s_max must be at least 2".into()));
    }
    let p = Problem::new(l, r, m, a)?;
    let e = p.dim() - p.equations();
    let normalize = |raw: &BigUint, s: u32| {
        BigRational::new(BigInt::from(raw.clone()), BigInt::from(a).pow(s * e as u32))
    };
    let s_min = stabilization_floor(l, m, a);
    let stable = |w: &[LevelCount]| w[0].s >= s_min && w[0].normalized == w[1].normalized;
    let mut level = first_level(&p)?;
    let mut levels = vec![LevelCount { s: 1, raw: level.count(), normalized: normalize(&level.count(), 1) }];
    let mut note = None;
    while level.s < s_max {
        if levels.len() >= 2 && stable(&levels[levels.len() - 2..]) {
            break;
        }
        match lift(&p, &level) {
            Ok(next) => level = next,
            Err(Error::Unsupported(msg)) => {
                note = Some(msg);
                break;
            }
            Err(err) => return Err(err),
        }
        let c = level.count();
        levels.push(LevelCount { s: level.s, normalized: normalize(&c, level.s), raw: c });
    }
    let s0 = levels.windows(2).find(|w| stable(w)).map(|w| w[0].s);
    let stabilized = s0.map(|s| levels[s as usize - 1].normalized.clone());
    Ok(LocalDensityResult { prime: a, levels, stabilized, s0, note })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RelativeVolume {
    pub det_m: BigInt,
    /// (d - r - 1) / 2
    pub exponent: f64,
    pub prime_cutoff: u64,
    pub densities: Vec<LocalDensityResult>,
    pub product: BigRational,
    /// det(M)^exponent · ∏ β_a
    pub value: f64,
}

/// Primes up to `cutoff` together with those dividing 2 det(M) det(L).
pub fn density_primes(l: &QuadraticLattice, m: &GramMatrix, cutoff: u64) -> Vec<u64> {
    let mut ps = primes_up_to(cutoff);
    ps.push(2);
    ps.extend(prime_factors_big(&m.det()));
    ps.extend(prime_factors_big(&l.det()));
    ps.sort_unstable();
    ps.dedup();
    ps
}

pub fn siegel_weil_relative(l: &QuadraticLattice, m: &GramMatrix, cutoff: u64, s_max: u32) -> Result<RelativeVolume> {
    let (d, r) = (l.rank(), m.r());
    if r + 1 > d {
        return Err(Error::InvalidArgument(format!("need r < d, got r = {r}, d = {d}")));
    }
    let det_m = m.det();
    if det_m <= BigInt::zero() {
        return Err(Error::InvalidArgument("det(M) must be positive".into()));
    }
    let mut densities = Vec::new();
    let mut product = BigRational::one();
    for a in density_primes(l, m, cutoff) {
        let res = local_density(l, r, m, a, s_max.max(stabilization_floor(l, m, a) + 1))?;
        product *= res.value()?.clone();
        densities.push(res);
    }
    let exponent = (d - r - 1) as f64 / 2.0;
    let det = det_m.to_f64().ok_or(Error::Overflow("det(M)"))?;
    let value = det.powf(exponent) * to_f64(&product);
    Ok(RelativeVolume { det_m, exponent, prime_cutoff: cutoff, densities, product, value })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GrowthPoint {
    pub det: f64,
    pub relative_volume: f64,
    pub residual: f64,
    /// Some(true) when a primitive representation was found, None when
    /// the search was not attempted.
    pub primitive: Option<bool>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GrowthReport {
    pub expected: f64,
    pub slope: f64,
    pub intercept: f64,
    pub points: Vec<GrowthPoint>,
}

/// Whether L primitively represents M, by search when L is positive
/// definite and M has small diagonal.
pub fn primitively_represents(l: &QuadraticLattice, m: &GramMatrix) -> Result<Option<bool>> {
    if !l.is_positive_definite() || m.entries.iter().enumerate().any(|(i, row)| row[i] > 400) {
        return Ok(None);
    }
    for t in enumerate_representations(l, m)? {
        if SublatticeHNF::from_tuple(l, &t)?.primitive {
            return Ok(Some(true));
        }
    }
    Ok(Some(false))
}

/// Least-squares slope of log relative volume against log det(M).
pub fn growth_exponent_check(l: &QuadraticLattice, ms: &[GramMatrix], cutoff: u64, s_max: u32) -> Result<GrowthReport> {
    if ms.len() < 4 {
        return Err(Error::InvalidArgument(format!("{} matrices; at least 4 are needed", ms.len())));
    }
    let r = ms[0].r();
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    let mut prim = Vec::new();
    for m in ms {
        let v = siegel_weil_relative(l, m, cutoff, s_max)?;
        if v.value <= 0.0 {
            return Err(Error::InvalidArgument(format!("M with det {} is not represented", v.det_m)));
        }
        xs.push(v.det_m.to_f64().ok_or(Error::Overflow("det(M)"))?);
        ys.push(v.value);
        prim.push(primitively_represents(l, m)?);
    }
    let lx: Vec<f64> = xs.iter().map(|x| x.ln()).collect();
    let ly: Vec<f64> = ys.iter().map(|y| y.ln()).collect();
    let n = lx.len() as f64;
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let sxx: f64 = lx.iter().map(|x| (x - mx) * (x - mx)).sum();
    if sxx < 1e-12 {
        return Err(Error::InvalidArgument("det(M) is constant along the sequence".into()));
    }
    let sxy: f64 = lx.iter().zip(&ly).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let points = (0..xs.len())
        .map(|i| GrowthPoint { det: xs[i], relative_volume: ys[i], residual: ly[i] - intercept - slope * lx[i], primitive: prim[i] })
        .collect();
    Ok(GrowthReport { expected: (l.rank() - r - 1) as f64 / 2.0, slope, intercept, points })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn g1(m: i64) -> GramMatrix {
        GramMatrix::scalar(m)
    }

    #[test]
    fn count_examples() {
        let z1 = QuadraticLattice::standard(1);
        assert_eq!(count_solutions_mod(&z1, 1, &g1(0), 2, 1).unwrap(), BigUint::from(1u32));
        let z2 = QuadraticLattice::standard(2);
        assert_eq!(count_solutions_mod(&z2, 1, &g1(1), 3, 1).unwrap(), BigUint::from(4u32));
        let h = QuadraticLattice::hyperbolic_plane();
        let scan = count_solutions_full_scan(&h, 1, &g1(2), 3, 2).unwrap();
        assert_eq!(count_solutions_mod(&h, 1, &g1(2), 3, 2).unwrap(), BigUint::from(scan));
        assert!(count_solutions_mod(&z2, 1, &g1(1), 4, 1).is_err());
    }

    #[test]
    fn density_examples() {
        let z2 = QuadraticLattice::standard(2);
        let res = local_density(&z2, 1, &g1(1), 3, 4).unwrap();
        assert_eq!(res.stabilized, Some(BigRational::new(4.into(), 3.into())));
        assert_eq!(res.s0, Some(1));
        // 3 is not a sum of two squares mod 9 with the right valuation
        let res = local_density(&z2, 1, &g1(3), 3, 4).unwrap();
        assert_eq!(res.stabilized, Some(BigRational::zero()));
    }

    #[test]
    fn plateau_below_the_floor_is_skipped() {
        let z5 = QuadraticLattice::standard(5);
        let res = local_density(&z5, 1, &g1(4), 2, 10).unwrap();
        assert_eq!(res.levels[1].normalized, res.levels[2].normalized);
        assert_eq!(res.stabilized, Some(BigRational::new(45.into(), 64.into())));
        assert_eq!(res.s0, Some(5));
    }

    #[test]
    fn rank_two_counts_match_scan() {
        let z3 = QuadraticLattice::standard(3);
        let m = GramMatrix::new(vec![vec![1, 0], vec![0, 2]]).unwrap();
        for a in [2, 3] {
            let scan = count_solutions_full_scan(&z3, 2, &m, a, 1).unwrap();
            assert_eq!(count_solutions_mod(&z3, 2, &m, a, 1).unwrap(), BigUint::from(scan));
        }
        let scan = count_solutions_full_scan(&z3, 2, &m, 2, 2).unwrap();
        assert_eq!(count_solutions_mod(&z3, 2, &m, 2, 2).unwrap(), BigUint::from(scan));
    }

    #[test]
    fn rank_one_odd_level_matches_scan() {
        let lats = [
            QuadraticLattice::standard(3),
            QuadraticLattice::a2().direct_sum(&QuadraticLattice::standard(1)),
            QuadraticLattice::new("H+<3>", vec![vec![0, 1, 0], vec![1, 0, 0], vec![0, 0, 3]]).unwrap(),
            QuadraticLattice::diagonal("<5,5,1>", &[5, 5, 1]).unwrap(),
        ];
        for l in &lats {
            for a in [3u64, 5, 7] {
                for m in 0..a as i64 + 2 {
                    for s in 1..=2 {
                        let scan = count_solutions_full_scan(l, 1, &g1(m), a, s);
                        let Ok(scan) = scan else { continue };
                        assert_eq!(count_solutions_mod(l, 1, &g1(m), a, s).unwrap(), BigUint::from(scan), "{} m={m} a={a} s={s}", l.name());
                    }
                }
            }
        }
    }

    #[test]
    fn relative_volume_rejects_full_rank() {
        let z2 = QuadraticLattice::standard(2);
        assert!(siegel_weil_relative(&z2, &GramMatrix::identity(2), 5, 4).is_err());
    }
}
