//! Curvature of the canonical connection on homogeneous Hodge bundles and
//! Chern forms by Chern–Weil.

use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use super::exterior::{subsets, mask_indices, AlternatingForm, Space};
use super::lie::LieConfiguration;
use crate::{Error, Result};

/// A square matrix of 2-forms on g/k (m-coordinates).
#[derive(Debug, Clone)]
pub struct CurvatureForm {
    pub size: usize,
    /// Row-major entries Θ_ij.
    pub entries: Vec<AlternatingForm<Complex64>>,
}

impl CurvatureForm {
    pub fn new(size: usize, entries: Vec<AlternatingForm<Complex64>>) -> Result<Self> {
        if entries.len() != size * size || size == 0 {
            return Err(Error::DimensionMismatch { expected: size * size, got: entries.len() });
        }
        let d = entries[0].dim();
        if entries.iter().any(|e| e.degree() != 2 || e.dim() != d || e.space != entries[0].space) {
            return Err(Error::InvalidArgument("curvature entries must be 2-forms on one space".into()));
        }
        Ok(CurvatureForm { size, entries })
    }

    pub fn entry(&self, i: usize, j: usize) -> &AlternatingForm<Complex64> {
        &self.entries[i * self.size + j]
    }

    pub fn dim(&self) -> usize {
        self.entries[0].dim()
    }

    /// Θ(u, v) as a matrix, for base-coordinate vectors u, v.
    pub fn evaluate(&self, u: &[f64], v: &[f64]) -> Result<DMatrix<Complex64>> {
        let c = |x: &[f64]| x.iter().map(|&t| Complex64::new(t, 0.0)).collect::<Vec<_>>();
        let (u, v) = (c(u), c(v));
        let mut out = DMatrix::zeros(self.size, self.size);
        for i in 0..self.size {
            for j in 0..self.size {
                out[(i, j)] = self.entry(i, j).evaluate(&[u.clone(), v.clone()])?;
            }
        }
        Ok(out)
    }
}

/// Killing-orthogonal projection of g onto the span of `block`.
pub fn killing_projector(cfg: &LieConfiguration, block: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    let g = block.transpose() * &cfg.killing * block;
    let inv = g.try_inverse().ok_or_else(|| Error::Degenerate("Killing form degenerate on block".into()))?;
    Ok(block * inv * block.transpose() * &cfg.killing)
}

/// Curvature of the canonical connection with values in the block:
/// Θ(u, v) = [π(u), π(v)] − π([u, v]).
pub fn canonical_curvature(cfg: &LieConfiguration, proj: &DMatrix<f64>, u: &DVector<f64>, v: &DVector<f64>) -> DVector<f64> {
    let pu = proj * u;
    let pv = proj * v;
    cfg.bracket(&pu, &pv) - proj * cfg.bracket(u, v)
}

/// The curvature of the homogeneous bundle V^{p,q} over G/K, as a matrix of
/// 2-forms on g/k in the basis of the configured Hodge block.
pub fn curvature_form(cfg: &LieConfiguration) -> Result<CurvatureForm> {
    let hb = cfg.hodge.as_ref().ok_or_else(|| Error::InvalidArgument("configuration has no Hodge block".into()))?;
    let proj = killing_projector(cfg, &hb.algebra)?;
    let dm = cfg.m.ncols();
    let size = hb.vectors.ncols();
    let mut entries = vec![AlternatingForm::<Complex64>::zero(Space::GModK, dm, 2)?; size * size];
    for a in 0..dm {
        for b in a + 1..dm {
            let theta = canonical_curvature(cfg, &proj, &cfg.m.column(a).into_owned(), &cfg.m.column(b).into_owned());
            let mat = cfg.block_matrix(hb, &theta)?;
            for i in 0..size {
                for j in 0..size {
                    entries[i * size + j].set(&[a, b], mat[(i, j)]);
                }
            }
        }
    }
    CurvatureForm::new(size, entries)
}

/// All permutations of 0..n with their signs.
fn permutations(n: usize) -> Vec<(Vec<usize>, bool)> {
    if n == 0 {
        return vec![(vec![], true)];
    }
    let mut out = Vec::new();
    for (p, even) in permutations(n - 1) {
        // insert n-1 at position k: moves past n-1-k elements
        for k in 0..n {
            let mut q = p.clone();
            q.insert(k, n - 1);
            out.push((q, even == (n - 1 - k).is_multiple_of(2)));
        }
    }
    out
}

/// Degree-2ℓ part of det(I + (i/2π)Θ), with complex coefficients.
pub fn chern_form_complex(curv: &CurvatureForm, level: usize) -> Result<AlternatingForm<Complex64>> {
    if level > curv.size {
        return Err(Error::InvalidArgument(format!("level {level} exceeds block size {}", curv.size)));
    }
    let dim = curv.dim();
    let space = curv.entries[0].space;
    if level == 0 {
        return AlternatingForm::from_fn(space, dim, 0, |_| Complex64::new(1.0, 0.0));
    }
    if 2 * level > dim {
        return Err(Error::InvalidArgument(format!("degree {} exceeds dimension {dim}", 2 * level)));
    }
    let c = Complex64::new(0.0, 1.0 / (2.0 * PI));
    let mut out = AlternatingForm::zero(space, dim, 2 * level)?;
    let perms = permutations(level);
    for mask in subsets(curv.size, level) {
        let rows = mask_indices(mask);
        for (p, even) in &perms {
            let mut term = AlternatingForm::from_fn(space, dim, 0, |_| Complex64::new(1.0, 0.0))?;
            for (k, &r) in rows.iter().enumerate() {
                term = term.wedge(&curv.entry(r, rows[p[k]]).scale(c))?;
            }
            out = if *even { out.add(&term)? } else { out.sub(&term)? };
        }
    }
    Ok(out)
}

/// The real Chern form c_ℓ; fails if the result has an imaginary part.
pub fn chern_form(curv: &CurvatureForm, level: usize) -> Result<AlternatingForm<f64>> {
    chern_form_complex(curv, level)?.real_part(1e-10)
}
