//! Enumeration of vectors, tuples and sublattices of bounded norm or discriminant.
//!
//! Vectors are found by Fincke–Pohst recursion. The LDL decomposition is
//! computed exactly over Q; outer levels prune with slightly widened float
//! bounds, and the innermost coordinate range is solved exactly in integers,
//! so every reported vector satisfies the bound exactly and none is missed.

use crate::arith::{det_i128, isqrt};
use crate::equidist::window::TupleWindow;
use crate::error::{Error, Result};
use crate::hnf::{hnf, SublatticeHNF};
use crate::lattice::{GramMatrix, QuadraticLattice, VectorTuple};
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive};
use std::collections::BTreeSet;

/// The ellipsoid {x : x^T G x <= bound} prepared for Fincke–Pohst search.
#[derive(Debug, Clone)]
pub struct Ellipsoid {
    gram: Vec<Vec<i64>>,
    diag: Vec<f64>,
    mu: Vec<Vec<f64>>,
}

impl Ellipsoid {
    pub fn new(gram: &[Vec<i64>]) -> Result<Self> {
        let d = gram.len();
        let mut a: Vec<Vec<BigRational>> =
            gram.iter().map(|r| r.iter().map(|&x| BigRational::from_integer(x.into())).collect()).collect();
        let mut diag = vec![0.0; d];
        let mut mu = vec![vec![0.0; d]; d];
        for i in 0..d {
            let p = a[i][i].clone();
            if !p.is_positive() {
                return Err(Error::NotPositiveDefinite);
            }
            diag[i] = p.to_f64().unwrap_or(f64::NAN);
            for j in i + 1..d {
                mu[i][j] = (a[i][j].clone() / p.clone()).to_f64().unwrap_or(f64::NAN);
            }
            for j in i + 1..d {
                for k in i + 1..d {
                    let t = a[j][i].clone() * a[i][k].clone() / p.clone();
                    a[j][k] -= t;
                }
            }
        }
        Ok(Ellipsoid { gram: gram.to_vec(), diag, mu })
    }

    pub fn dim(&self) -> usize {
        self.gram.len()
    }

    /// Calls `f(x, lo, hi)` for every line x + t e_0 (x_0 = 0) whose
    /// intersection with the ellipsoid contains the integers lo..=hi.
    /// Lines are visited with x_{d-1} most significant, ascending.
    pub fn for_each_line<F: FnMut(&[i64], i64, i64)>(&self, bound: i64, mut f: F) {
        if bound < 0 {
            return;
        }
        let d = self.dim();
        let mut x = vec![0i64; d];
        self.level(d - 1, &mut x, 0.0, bound, &mut f);
    }

    /// Range of the last coordinate over the ellipsoid (possibly loose by
    /// one at each end); pairs with `for_each_line_at_top` to split work.
    pub fn top_range(&self, bound: i64) -> (i64, i64) {
        if bound < 0 {
            return (1, 0);
        }
        let d = self.dim();
        if d == 1 {
            return (0, 0);
        }
        let rad = (bound as f64 / self.diag[d - 1]).sqrt();
        let eps = 1e-9 * (1.0 + rad);
        ((-rad - eps).ceil() as i64, (rad + eps).floor() as i64)
    }

    /// `for_each_line` restricted to lines with x_{d-1} = top.
    pub fn for_each_line_at_top<F: FnMut(&[i64], i64, i64)>(&self, bound: i64, top: i64, mut f: F) {
        if bound < 0 {
            return;
        }
        let d = self.dim();
        let mut x = vec![0i64; d];
        if d == 1 {
            if top == 0 {
                self.level(0, &mut x, 0.0, bound, &mut f);
            }
            return;
        }
        x[d - 1] = top;
        let y = top as f64;
        self.level(d - 2, &mut x, self.diag[d - 1] * y * y, bound, &mut f);
    }

    fn level<F: FnMut(&[i64], i64, i64)>(&self, lvl: usize, x: &mut [i64], partial: f64, bound: i64, f: &mut F) {
        if lvl == 0 {
            if let Some((lo, hi)) = self.exact_line(x, bound) {
                f(x, lo, hi);
            }
            return;
        }
        let b = bound as f64;
        let t = b - partial;
        if t < -1e-9 * (1.0 + b) {
            return;
        }
        let c: f64 = (lvl + 1..x.len()).map(|j| self.mu[lvl][j] * x[j] as f64).sum();
        let rad = (t.max(0.0) / self.diag[lvl]).sqrt();
        let eps = 1e-9 * (1.0 + rad + c.abs());
        let lo = (-c - rad - eps).ceil() as i64;
        let hi = (-c + rad + eps).floor() as i64;
        for xi in lo..=hi {
            x[lvl] = xi;
            let y = xi as f64 + c;
            self.level(lvl - 1, x, partial + self.diag[lvl] * y * y, bound, f);
        }
        x[lvl] = 0;
    }

    /// Integer range of x_0 with Q(x) <= bound, other coordinates fixed.
    fn exact_line(&self, x: &[i64], bound: i64) -> Option<(i64, i64)> {
        let g = &self.gram;
        let d = x.len();
        let mut q0 = 0i128;
        let mut l = 0i128;
        for i in 1..d {
            if x[i] == 0 {
                continue;
            }
            let mut s = 0i128;
            for j in 1..d {
                s += g[i][j] as i128 * x[j] as i128;
            }
            q0 += x[i] as i128 * s;
            l += g[0][i] as i128 * x[i] as i128;
        }
        let a = g[0][0] as i128;
        let disc = l * l - a * (q0 - bound as i128);
        if disc < 0 {
            return None;
        }
        let s = isqrt(disc as u128) as i128;
        let lo = crate::arith::ceil_div(-l - s, a);
        let hi = crate::arith::floor_div(-l + s, a);
        (lo <= hi).then_some((lo as i64, hi as i64))
    }

    /// Every integer vector with Q(x) <= bound, zero included.
    pub fn for_each_vector<F: FnMut(&[i64])>(&self, bound: i64, mut f: F) {
        let mut buf = vec![0i64; self.dim()];
        self.for_each_line(bound, |x, lo, hi| {
            buf.copy_from_slice(x);
            for t in lo..=hi {
                buf[0] = t;
                f(&buf);
            }
        });
    }
}

fn lattice_ellipsoid(l: &QuadraticLattice) -> Result<Ellipsoid> {
    if !l.is_positive_definite() {
        return Err(Error::NotPositiveDefinite);
    }
    Ellipsoid::new(l.gram())
}

/// All nonzero v with B(v, v) <= n, in lexicographic order.
pub fn enumerate_vectors_norm_leq(l: &QuadraticLattice, n: i64) -> Result<Vec<Vec<i64>>> {
    if n < 0 {
        return Err(Error::InvalidArgument(format!("negative norm bound {n}")));
    }
    let e = lattice_ellipsoid(l)?;
    let mut out = Vec::new();
    e.for_each_vector(n, |v| {
        if v.iter().any(|&x| x != 0) {
            out.push(v.to_vec());
        }
    });
    out.sort();
    Ok(out)
}

/// Plain box scan over |x_i| <= sqrt(n (G^{-1})_{ii}); the test oracle for
/// the Fincke–Pohst search.
pub fn box_scan_norm_leq(l: &QuadraticLattice, n: i64) -> Result<Vec<Vec<i64>>> {
    if !l.is_positive_definite() {
        return Err(Error::NotPositiveDefinite);
    }
    let d = l.rank();
    let g = nalgebra::DMatrix::from_fn(d, d, |i, j| l.gram()[i][j] as f64);
    let inv = g.try_inverse().ok_or(Error::Singular)?;
    let radii: Vec<i64> = (0..d).map(|i| ((n as f64 * inv[(i, i)]).sqrt() + 1e-9).floor() as i64).collect();
    let mut out = Vec::new();
    let mut x: Vec<i64> = radii.iter().map(|r| -r).collect();
    loop {
        if x.iter().any(|&c| c != 0) && l.norm(&x) <= n as i128 {
            out.push(x.clone());
        }
        let mut k = 0;
        loop {
            if k == d {
                out.sort();
                return Ok(out);
            }
            if x[k] < radii[k] {
                x[k] += 1;
                break;
            }
            x[k] = -radii[k];
            k += 1;
        }
    }
}

/// sqrt of the minimum of x^T M x over nonzero integer x.
pub fn mu1(m: &GramMatrix) -> Result<f64> {
    if !m.is_positive_definite() {
        return Err(Error::NotPositiveDefinite);
    }
    Ok((min_norm(&m.entries)? as f64).sqrt())
}

/// Minimal nonzero value of the positive definite form; the smallest
/// diagonal entry is represented, so it bounds the search radius.
pub fn min_norm(gram: &[Vec<i64>]) -> Result<i64> {
    let e = Ellipsoid::new(gram)?;
    let bound = (0..gram.len()).map(|i| gram[i][i]).min().unwrap_or(0);
    let mut best = bound;
    e.for_each_vector(bound, |v| {
        if v.iter().any(|&x| x != 0) {
            let mut q = 0i128;
            for i in 0..v.len() {
                for j in 0..v.len() {
                    q += v[i] as i128 * gram[i][j] as i128 * v[j] as i128;
                }
            }
            best = best.min(q as i64);
        }
    });
    Ok(best)
}

fn check_r(l: &QuadraticLattice, r: usize) -> Result<()> {
    if r == 0 || r > l.rank() {
        return Err(Error::InvalidArgument(format!("r = {r} outside 1..={}", l.rank())));
    }
    Ok(())
}

fn gram_det(l: &QuadraticLattice, vs: &[&[i64]]) -> Option<i128> {
    let m: Vec<Vec<i128>> = vs.iter().map(|u| vs.iter().map(|v| l.inner(u, v)).collect()).collect();
    det_i128(&m)
}

/// Elements of Q_n. For r >= 2 the set is infinite (every basis of a
/// sublattice has the same discriminant), so tuples are additionally
/// restricted to vectors with B(v_i, v_i) <= n.
pub fn enumerate_tuples_disc_leq(l: &QuadraticLattice, r: usize, n: i64) -> Result<Vec<VectorTuple>> {
    check_r(l, r)?;
    if n < 1 {
        return Ok(Vec::new());
    }
    let vs = enumerate_vectors_norm_leq(l, n)?;
    let mut out = Vec::new();
    let mut stack: Vec<&[i64]> = Vec::with_capacity(r);
    tuple_search(l, &vs, r, n as i128, &mut stack, &mut out);
    out.sort();
    Ok(out)
}

fn tuple_search<'a>(
    l: &QuadraticLattice,
    vs: &'a [Vec<i64>],
    r: usize,
    n: i128,
    stack: &mut Vec<&'a [i64]>,
    out: &mut Vec<VectorTuple>,
) {
    if stack.len() == r {
        if gram_det(l, stack).is_some_and(|h| h > 0 && h <= n) {
            out.push(VectorTuple::new(stack.iter().map(|v| v.to_vec()).collect()));
        }
        return;
    }
    for v in vs {
        stack.push(v);
        if gram_det(l, stack).is_some_and(|h| h > 0) {
            tuple_search(l, vs, r, n, stack, out);
        }
        stack.pop();
    }
}

/// gamma_r^r as a fraction: the bound prod |b_i|^2 <= gamma_r^r disc for a
/// Minkowski-reduced basis, whose norms are the successive minima for r <= 4.
fn hermite_power(r: usize) -> Result<(i128, i128)> {
    match r {
        1 => Ok((1, 1)),
        2 => Ok((4, 3)),
        3 => Ok((2, 1)),
        4 => Ok((4, 1)),
        _ => Err(Error::Unsupported(format!("sublattice enumeration for r = {r} > 4"))),
    }
}

struct Candidate {
    v: Vec<i64>,
    bv: Vec<i64>,
    norm: i128,
}

/// Calls `visit` with a basis of every sublattice of rank r and discriminant
/// <= n, at least once per sublattice. Each reported basis has nondecreasing
/// norms, is size-reduced and has first nonzero coordinates positive.
pub fn for_each_reduced_basis<F: FnMut(&[&[i64]], i128)>(l: &QuadraticLattice, r: usize, n: i64, mut visit: F) -> Result<()> {
    check_r(l, r)?;
    if n < 1 {
        return Ok(());
    }
    let (gn, gd) = hermite_power(r)?;
    let m = min_norm(l.gram())? as i128;
    let cap = gn * n as i128 / (gd * m.pow(r as u32 - 1));
    let cap = i64::try_from(cap).map_err(|_| Error::Overflow("sublattice search radius"))?;
    let mut cands: Vec<Candidate> = enumerate_vectors_norm_leq(l, cap)?
        .into_iter()
        .filter(|v| first_nonzero_positive(v))
        .map(|v| {
            let bv = (0..v.len()).map(|i| (0..v.len()).map(|j| l.gram()[i][j] * v[j]).sum()).collect();
            let norm = l.norm(&v);
            Candidate { v, bv, norm }
        })
        .collect();
    cands.sort_by(|a, b| a.norm.cmp(&b.norm).then_with(|| a.v.cmp(&b.v)));
    let mut chosen: Vec<usize> = Vec::with_capacity(r);
    reduced_search(l, &cands, r, n as i128, (gn, gd), &mut chosen, &mut visit);
    Ok(())
}

fn reduced_search<F: FnMut(&[&[i64]], i128)>(
    l: &QuadraticLattice,
    cands: &[Candidate],
    r: usize,
    n: i128,
    gamma: (i128, i128),
    chosen: &mut Vec<usize>,
    visit: &mut F,
) {
    let j = chosen.len();
    let start = chosen.last().map_or(0, |&i| i + 1);
    let prod: i128 = chosen.iter().map(|&i| cands[i].norm).product();
    for idx in start..cands.len() {
        let c = &cands[idx];
        // The remaining r - j vectors have norm >= c.norm.
        let mut bound = prod;
        for _ in j..r {
            bound = bound.saturating_mul(c.norm);
        }
        if bound.saturating_mul(gamma.1) > gamma.0 * n {
            break;
        }
        let reduced = chosen.iter().all(|&i| {
            let ip: i128 = cands[i].bv.iter().zip(&c.v).map(|(&a, &b)| a as i128 * b as i128).sum();
            2 * ip.abs() <= cands[i].norm
        });
        if !reduced {
            continue;
        }
        chosen.push(idx);
        let vs: Vec<&[i64]> = chosen.iter().map(|&i| cands[i].v.as_slice()).collect();
        match gram_det(l, &vs) {
            Some(h) if h > 0 => {
                if j + 1 == r {
                    if h <= n {
                        visit(&vs, h);
                    }
                } else {
                    reduced_search(l, cands, r, n, gamma, chosen, visit);
                }
            }
            _ => {}
        }
        chosen.pop();
    }
}

/// One HNF representative per sublattice of rank r with discriminant <= n,
/// ordered by (discriminant, basis).
pub fn enumerate_sublattices_disc_leq(l: &QuadraticLattice, r: usize, n: i64) -> Result<Vec<SublatticeHNF>> {
    let mut seen: BTreeSet<Vec<Vec<i64>>> = BTreeSet::new();
    let mut err = None;
    for_each_reduced_basis(l, r, n, |vs, _| {
        let cols: Vec<Vec<i64>> = vs.iter().map(|v| v.to_vec()).collect();
        match hnf(&cols) {
            Ok(h) => {
                seen.insert(h);
            }
            Err(e) => err = Some(e),
        }
    })?;
    if let Some(e) = err {
        return Err(e);
    }
    let mut out = seen.into_iter().map(|b| SublatticeHNF::from_basis(l, &b)).collect::<Result<Vec<_>>>()?;
    out.sort_by(|a, b| a.disc.cmp(&b.disc).then_with(|| a.basis.cmp(&b.basis)));
    Ok(out)
}

/// One representative (the primitive sublattice W ∩ Z^d) per rational
/// r-plane W with disc(W ∩ Z^d) <= n.
pub fn enumerate_primitive_planes(l: &QuadraticLattice, r: usize, n: i64) -> Result<Vec<SublatticeHNF>> {
    Ok(enumerate_sublattices_disc_leq(l, r, n)?.into_iter().filter(|s| s.primitive).collect())
}

/// All tuples λ with I(λ) = M.
pub fn enumerate_representations(l: &QuadraticLattice, m: &GramMatrix) -> Result<Vec<VectorTuple>> {
    if !m.is_positive_semidefinite() {
        return Err(Error::NotPositiveSemidefinite);
    }
    let r = m.r();
    let top = (0..r).map(|i| m.entries[i][i]).max().unwrap_or(0);
    let e = lattice_ellipsoid(l)?;
    let mut by_norm: Vec<Vec<Vec<i64>>> = vec![Vec::new(); top as usize + 1];
    e.for_each_vector(top, |v| {
        let q = l.norm(v) as usize;
        by_norm[q].push(v.to_vec());
    });
    for b in by_norm.iter_mut() {
        b.sort();
    }
    let mut out = Vec::new();
    let mut stack: Vec<&[i64]> = Vec::with_capacity(r);
    rep_search(l, m, &by_norm, &mut stack, &mut out);
    out.sort();
    Ok(out)
}

fn rep_search<'a>(
    l: &QuadraticLattice,
    m: &GramMatrix,
    by_norm: &'a [Vec<Vec<i64>>],
    stack: &mut Vec<&'a [i64]>,
    out: &mut Vec<VectorTuple>,
) {
    let j = stack.len();
    if j == m.r() {
        out.push(VectorTuple::new(stack.iter().map(|v| v.to_vec()).collect()));
        return;
    }
    for v in &by_norm[m.entries[j][j] as usize] {
        if (0..j).all(|i| l.inner(stack[i], v) == m.entries[i][j] as i128) {
            stack.push(v);
            rep_search(l, m, by_norm, stack, out);
            stack.pop();
        }
    }
}

/// Default majorant for an indefinite form: diag(sum_j |B_ij|) + I, which is
/// positive definite and dominates |B(v, v)|.
pub fn default_majorant(l: &QuadraticLattice) -> Vec<Vec<i64>> {
    let d = l.rank();
    (0..d)
        .map(|i| {
            (0..d)
                .map(|j| if i == j { l.gram()[i].iter().map(|x| x.abs()).sum::<i64>() + 1 } else { 0 })
                .collect()
        })
        .collect()
}

/// Tuples in Q_n whose projection to the unit-discriminant surface lies in
/// the window. The window's majorant bound makes the search finite.
pub fn enumerate_tuples_in_window(l: &QuadraticLattice, r: usize, n: i64, w: &TupleWindow) -> Result<Vec<VectorTuple>> {
    check_r(l, r)?;
    if !w.radius.is_finite() {
        return Err(Error::InvalidArgument("unbounded window".into()));
    }
    if n < 1 || w.radius <= 0.0 || w.region.is_empty() {
        return Ok(Vec::new());
    }
    if l.signature().0 < r {
        return Err(Error::InvalidArgument(format!("positive index {} < r = {r}", l.signature().0)));
    }
    let maj = w.majorant.clone().unwrap_or_else(|| default_majorant(l));
    let me = Ellipsoid::new(&maj)?;
    // M(pr(v)_i) <= R^2  <=>  M(v_i) <= R^2 h^{1/r} <= R^2 n^{1/r}
    let cap = (w.radius * w.radius * (n as f64).powf(1.0 / r as f64) * (1.0 + 1e-12)).floor() as i64;
    let mut vs = Vec::new();
    me.for_each_vector(cap, |v| {
        if v.iter().any(|&x| x != 0) {
            vs.push(v.to_vec());
        }
    });
    vs.sort();
    let mnorm = |v: &[f64]| -> f64 {
        let mut s = 0.0;
        for i in 0..v.len() {
            for j in 0..v.len() {
                s += v[i] * maj[i][j] as f64 * v[j];
            }
        }
        s
    };
    let mut out = Vec::new();
    let mut stack: Vec<&[i64]> = Vec::new();
    let mut accept = |t: &[&[i64]]| -> bool {
        let Some(h) = gram_det(l, t) else { return false };
        if h <= 0 || h > n as i128 {
            return false;
        }
        let tuple = VectorTuple::new(t.iter().map(|v| v.to_vec()).collect());
        if !crate::lattice::gram_of_tuple(l, &tuple).map(|g| g.is_positive_definite()).unwrap_or(false) {
            return false;
        }
        let s = (h as f64).powf(-0.5 / r as f64);
        let p: Vec<Vec<f64>> = t.iter().map(|v| v.iter().map(|&x| x as f64 * s).collect()).collect();
        p.iter().all(|u| mnorm(u) <= w.radius * w.radius * (1.0 + 1e-12)) && w.region.contains_vectors(&p)
    };
    window_search(&vs, r, &mut stack, &mut accept, &mut out);
    out.sort();
    Ok(out)
}

fn window_search<'a, F: FnMut(&[&[i64]]) -> bool>(
    vs: &'a [Vec<i64>],
    r: usize,
    stack: &mut Vec<&'a [i64]>,
    accept: &mut F,
    out: &mut Vec<VectorTuple>,
) {
    if stack.len() == r {
        if accept(stack) {
            out.push(VectorTuple::new(stack.iter().map(|v| v.to_vec()).collect()));
        }
        return;
    }
    for v in vs {
        stack.push(v);
        window_search(vs, r, stack, accept, out);
        stack.pop();
    }
}

pub(crate) fn first_nonzero_positive(v: &[i64]) -> bool {
    v.iter().find(|&&x| x != 0).is_some_and(|&x| x > 0)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn vector_counts() {
        let z2 = QuadraticLattice::standard(2);
        assert_eq!(enumerate_vectors_norm_leq(&z2, 1).unwrap().len(), 4);
        assert_eq!(enumerate_vectors_norm_leq(&z2, 2).unwrap().len(), 8);
        assert_eq!(enumerate_vectors_norm_leq(&QuadraticLattice::a2(), 2).unwrap().len(), 6);
        assert_eq!(enumerate_vectors_norm_leq(&z2, 0).unwrap().len(), 0);
        assert!(enumerate_vectors_norm_leq(&z2, -1).is_err());
    }

    #[test]
    fn minimum_examples() {
        assert_eq!(mu1(&GramMatrix::identity(3)).unwrap(), 1.0);
        assert_eq!(mu1(&GramMatrix::new(vec![vec![2, 1], vec![1, 2]]).unwrap()).unwrap(), 2f64.sqrt());
        assert_eq!(mu1(&GramMatrix::new(vec![vec![5, 0], vec![0, 7]]).unwrap()).unwrap(), 5f64.sqrt());
        assert!(mu1(&GramMatrix::new(vec![vec![1, 2], vec![2, 1]]).unwrap()).is_err());
    }

    #[test]
    fn tuple_examples() {
        let z2 = QuadraticLattice::standard(2);
        let t1 = enumerate_tuples_disc_leq(&z2, 1, 2).unwrap();
        let v: Vec<VectorTuple> = enumerate_vectors_norm_leq(&z2, 2).unwrap().into_iter().map(VectorTuple::single).collect();
        assert_eq!(t1, v);
        assert_eq!(enumerate_tuples_disc_leq(&z2, 2, 1).unwrap().len(), 8);
        assert!(enumerate_tuples_disc_leq(&z2, 3, 1).is_err());
        let l = QuadraticLattice::diagonal("d", &[3, 3]).unwrap();
        assert!(enumerate_tuples_disc_leq(&l, 1, 2).unwrap().is_empty());
    }

    #[test]
    fn sublattice_examples() {
        let z2 = QuadraticLattice::standard(2);
        assert_eq!(enumerate_sublattices_disc_leq(&z2, 2, 1).unwrap().len(), 1);
        assert_eq!(enumerate_sublattices_disc_leq(&z2, 2, 4).unwrap().len(), 4);
        assert_eq!(enumerate_sublattices_disc_leq(&z2, 1, 1).unwrap().len(), 2);
        assert_eq!(enumerate_primitive_planes(&z2, 1, 4).unwrap().len(), 4);
        assert_eq!(enumerate_primitive_planes(&z2, 2, 1).unwrap().len(), 1);
        assert!(enumerate_primitive_planes(&z2, 1, 0).unwrap().is_empty());
    }

    #[test]
    fn representation_examples() {
        let z2 = QuadraticLattice::standard(2);
        assert_eq!(enumerate_representations(&z2, &GramMatrix::scalar(1)).unwrap().len(), 4);
        assert_eq!(enumerate_representations(&z2, &GramMatrix::identity(2)).unwrap().len(), 8);
        assert_eq!(enumerate_representations(&QuadraticLattice::a2(), &GramMatrix::scalar(2)).unwrap().len(), 6);
    }
}
