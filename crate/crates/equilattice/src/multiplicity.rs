//! Sublattice-index multiplicities b_k, the constant α and the relation
//! between all sublattices and primitive ones.

use crate::enumerate::enumerate_sublattices_disc_leq;
use crate::equidist::grassmann::project_sublattice;
use crate::equidist::window::Window;
use crate::error::{Error, Result};
use crate::lattice::QuadraticLattice;
use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

/// Number of column-HNF r x r matrices of determinant k, counted from their
/// diagonals: pivot i admits d_i^i choices for the entries beside it.
pub fn count_hnf_of_index(r: usize, k: u64) -> u128 {
    fn go(i: usize, r: usize, rest: u64) -> u128 {
        if i == r {
            return u128::from(rest == 1);
        }
        let mut total = 0u128;
        for d in crate::arith::divisors(rest) {
            total += (d as u128).pow(i as u32) * go(i + 1, r, rest / d);
        }
        total
    }
    if r == 0 {
        return u128::from(k == 1);
    }
    go(0, r, k)
}

/// Coefficients 1..=k_max of prod_{i<r} ζ(s - i) by repeated Dirichlet
/// convolution with n ↦ n^i.
pub fn dirichlet_coefficients(r: usize, k_max: u64) -> Vec<u128> {
    let k = k_max as usize;
    let mut c = vec![0u128; k + 1];
    for x in c.iter_mut().skip(1) {
        *x = 1;
    }
    for i in 1..r {
        let mut next = vec![0u128; k + 1];
        for d in 1..=k {
            if c[d] == 0 {
                continue;
            }
            let mut m = 1;
            while d * m <= k {
                next[d * m] += c[d] * (m as u128).pow(i as u32);
                m += 1;
            }
        }
        c = next;
    }
    c
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct IndexCount {
    pub r: usize,
    pub k: u64,
    pub hnf_count: u128,
    pub convolution: u128,
}

/// b_k computed both ways; an error if they disagree.
pub fn count_sublattices_of_index(r: usize, k: u64) -> Result<IndexCount> {
    if r == 0 || k == 0 {
        return Err(Error::InvalidArgument(format!("need r >= 1 and k >= 1, got r = {r}, k = {k}")));
    }
    let hnf_count = count_hnf_of_index(r, k);
    let convolution = dirichlet_coefficients(r, k)[k as usize];
    if hnf_count != convolution {
        return Err(Error::Validation(format!("b_{k} for r = {r}: HNF count {hnf_count} != convolution {convolution}")));
    }
    Ok(IndexCount { r, k, hnf_count, convolution })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MultiplicitySeries {
    pub r: usize,
    pub k_max: u64,
    /// b_1, ..., b_{k_max}
    pub coefficients: Vec<u128>,
}

impl MultiplicitySeries {
    pub fn new(r: usize, k_max: u64) -> Result<Self> {
        if r == 0 {
            return Err(Error::InvalidArgument("r must be positive".into()));
        }
        let coefficients = dirichlet_coefficients(r, k_max).into_iter().skip(1).collect();
        Ok(MultiplicitySeries { r, k_max, coefficients })
    }

    pub fn b(&self, k: u64) -> u128 {
        self.coefficients[(k - 1) as usize]
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AlphaEstimate {
    pub r: usize,
    pub d: usize,
    pub k_max: u64,
    pub partial: BigRational,
    pub tail: BigRational,
}

impl AlphaEstimate {
    pub fn lower(&self) -> f64 {
        crate::arith::to_f64(&self.partial)
    }

    pub fn upper(&self) -> f64 {
        crate::arith::to_f64(&(self.partial.clone() + self.tail.clone()))
    }

    pub fn midpoint(&self) -> f64 {
        0.5 * (self.lower() + self.upper())
    }
}

/// α = Σ_k b_k / k^d truncated at k_max, with the tail bounded through
/// b_k <= k^r by k_max^{r-d+1} / (d - r - 1).
pub fn alpha_constant(r: usize, d: usize, k_max: u64) -> Result<AlphaEstimate> {
    if r == 0 || d < r + 2 {
        return Err(Error::InvalidArgument(format!("alpha needs d >= r + 2, got r = {r}, d = {d}")));
    }
    if k_max == 0 {
        return Err(Error::InvalidArgument("k_max must be positive".into()));
    }
    let series = MultiplicitySeries::new(r, k_max)?;
    // Sum over the common denominator lcm(1..K)^d; each term then costs a
    // few scalar divisions instead of a big gcd.
    let mut lcm = BigUint::one();
    for p in crate::arith::primes_up_to(k_max) {
        let mut q = p;
        while q <= k_max / p {
            q *= p;
        }
        lcm *= q;
    }
    let den = lcm.pow(d as u32);
    let mut num = BigUint::zero();
    for k in 1..=k_max {
        let mut t = den.clone();
        for _ in 0..d {
            t /= k;
        }
        num += t * BigUint::from(series.b(k));
    }
    let partial = BigRational::new(BigInt::from(num), BigInt::from(den));
    let e = (d - r - 1) as u32;
    let tail = BigRational::new(BigInt::one(), BigInt::from(k_max).pow(e) * BigInt::from(e));
    Ok(AlphaEstimate { r, d, k_max, partial, tail })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WindowRelation {
    pub window_id: usize,
    pub nu: u64,
    pub rhs: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MultiplicityReport {
    pub lattice: String,
    pub r: usize,
    pub n: i64,
    pub nu: u64,
    /// (k, b_k, ν′_{⌊n/k²⌋})
    pub terms: Vec<(u64, u128, u64)>,
    pub rhs: u64,
    pub windows: Vec<WindowRelation>,
    pub holds: bool,
}

/// ν_n = Σ_{k ≤ √n} b_k ν′_{⌊n/k²⌋}, checked exactly in total and per window.
pub fn verify_multiplicity_relation(l: &QuadraticLattice, r: usize, n: i64, windows: &[Window]) -> Result<MultiplicityReport> {
    Ok(verify_multiplicity_relation_range(l, r, &[n], windows)?.remove(0))
}

/// The relation for several n from a single enumeration at max(ns).
pub fn verify_multiplicity_relation_range(
    l: &QuadraticLattice,
    r: usize,
    ns: &[i64],
    windows: &[Window],
) -> Result<Vec<MultiplicityReport>> {
    let n_max = ns.iter().copied().max().unwrap_or(0);
    let subs = enumerate_sublattices_disc_leq(l, r, n_max)?;
    let discs: Vec<i64> = subs.iter().map(|s| s.disc.to_i64().ok_or(Error::Overflow("discriminant"))).collect::<Result<_>>()?;
    let membership: Vec<Vec<bool>> = subs
        .iter()
        .map(|s| {
            let p = project_sublattice(s)?;
            Ok(windows.iter().map(|w| w.contains_projector(&p)).collect())
        })
        .collect::<Result<_>>()?;
    let k_top = (n_max.max(1) as f64).sqrt() as u64 + 1;
    let series = MultiplicitySeries::new(r, k_top)?;
    // Cumulative counts by discriminant: slot 0 is the total, slot 1 + w is window w.
    let width = 1 + windows.len();
    let top = n_max.max(0) as usize;
    let mut all = vec![vec![0u64; width]; top + 1];
    let mut prim = vec![vec![0u64; width]; top + 1];
    for (i, s) in subs.iter().enumerate() {
        let m = discs[i] as usize;
        let bump = |t: &mut Vec<Vec<u64>>| {
            t[m][0] += 1;
            for w in 0..windows.len() {
                if membership[i][w] {
                    t[m][1 + w] += 1;
                }
            }
        };
        bump(&mut all);
        if s.primitive {
            bump(&mut prim);
        }
    }
    for m in 1..=top {
        for j in 0..width {
            all[m][j] += all[m - 1][j];
            prim[m][j] += prim[m - 1][j];
        }
    }
    let count = |m: i64, primitive: bool, w: Option<usize>| -> u64 {
        if m < 1 {
            return 0;
        }
        let t = if primitive { &prim } else { &all };
        t[m as usize][w.map_or(0, |w| 1 + w)]
    };
    let mut out = Vec::new();
    for &n in ns {
        let ks: Vec<u64> = (1..).take_while(|&k: &u64| (k * k) as i64 <= n).collect();
        let mut terms = Vec::new();
        let mut rhs = 0u64;
        for &k in &ks {
            let np = count(n / (k * k) as i64, true, None);
            let b = series.b(k);
            rhs += b as u64 * np;
            terms.push((k, b, np));
        }
        let nu = count(n, false, None);
        let mut wrel = Vec::new();
        for w in 0..windows.len() {
            let wr: u64 = ks.iter().map(|&k| series.b(k) as u64 * count(n / (k * k) as i64, true, Some(w))).sum();
            wrel.push(WindowRelation { window_id: w, nu: count(n, false, Some(w)), rhs: wr });
        }
        let holds = nu == rhs && wrel.iter().all(|w| w.nu == w.rhs);
        out.push(MultiplicityReport { lattice: l.name().to_string(), r, n, nu, terms, rhs, windows: wrel, holds });
    }
    Ok(out)
}
