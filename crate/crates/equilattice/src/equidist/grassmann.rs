//! Projections of tuples and sublattices to the unit-discriminant surface
//! and to the Grassmannian of positive planes.

use nalgebra::{DMatrix, SymmetricEigen};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hnf::{saturation, SublatticeHNF};
use crate::lattice::{gram_of_tuple, GramMatrix, QuadraticLattice, VectorTuple};

/// r real vectors whose Gram determinant is 1.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UnitDiscriminantPoint {
    pub vectors: Vec<Vec<f64>>,
}

impl UnitDiscriminantPoint {
    pub fn r(&self) -> usize {
        self.vectors.len()
    }
}

/// Orthogonal projector onto an r-plane of R^d (Euclidean), row-major.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GrassmannPoint {
    pub d: usize,
    pub r: usize,
    pub projector: Vec<f64>,
}

impl GrassmannPoint {
    /// Projector onto the span of `vectors`; they must be independent.
    pub fn from_vectors(vectors: &[Vec<f64>]) -> Result<Self> {
        let r = vectors.len();
        let d = vectors.first().map_or(0, Vec::len);
        if r == 0 || d == 0 {
            return Err(Error::InvalidArgument("empty frame".into()));
        }
        if vectors.iter().any(|v| v.len() != d) {
            return Err(Error::InvalidArgument("ragged frame".into()));
        }
        let v = DMatrix::from_fn(d, r, |i, j| vectors[j][i]);
        let gram = v.transpose() * &v;
        let scale = gram.diagonal().max();
        let inv = gram.clone().try_inverse().filter(|_| gram.determinant().abs() > 1e-14 * scale.powi(r as i32)).ok_or_else(|| Error::Degenerate("dependent vectors".into()))?;
        let p = &v * inv * v.transpose();
        let mut projector = vec![0.0; d * d];
        for i in 0..d {
            for j in 0..d {
                // symmetrize to remove rounding asymmetry
                projector[i * d + j] = 0.5 * (p[(i, j)] + p[(j, i)]);
            }
        }
        Ok(GrassmannPoint { d, r, projector })
    }

    pub fn entry(&self, i: usize, j: usize) -> f64 {
        self.projector[i * self.d + j]
    }

    /// c^T P c
    pub fn quadratic(&self, c: &[f64]) -> f64 {
        let mut s = 0.0;
        for i in 0..self.d {
            let mut row = 0.0;
            for j in 0..self.d {
                row += self.projector[i * self.d + j] * c[j];
            }
            s += c[i] * row;
        }
        s
    }

    /// Max deviation from symmetry, idempotence and trace r.
    pub fn defect(&self) -> f64 {
        let d = self.d;
        let p = DMatrix::from_row_slice(d, d, &self.projector);
        let sym = (&p - p.transpose()).abs().max();
        let idem = (&p * &p - &p).abs().max();
        let tr = (p.trace() - self.r as f64).abs();
        sym.max(idem).max(tr)
    }
}

fn tuple_f64(t: &VectorTuple) -> Vec<Vec<f64>> {
    t.vectors.iter().map(|v| v.iter().map(|&x| x as f64).collect()).collect()
}

/// pr(t) = h(t)^{-1/(2r)} t.
pub fn project_to_unit_discriminant(l: &QuadraticLattice, t: &VectorTuple) -> Result<UnitDiscriminantPoint> {
    let g = gram_of_tuple(l, t)?;
    if !g.is_positive_definite() {
        return Err(Error::Degenerate("tuple does not span a positive plane".into()));
    }
    let h = crate::arith::to_f64(&num_rational::BigRational::from_integer(g.det()));
    let s = h.powf(-0.5 / t.r() as f64);
    Ok(UnitDiscriminantPoint { vectors: tuple_f64(t).into_iter().map(|v| v.into_iter().map(|x| x * s).collect()).collect() })
}

/// t * M^{-1/2}, an orthonormal frame of the spanned plane, where M is the
/// Gram matrix of t.
pub fn project_to_sqrtm_frame(l: &QuadraticLattice, t: &VectorTuple, m: &GramMatrix) -> Result<UnitDiscriminantPoint> {
    let g = gram_of_tuple(l, t)?;
    if g != *m {
        return Err(Error::InvalidArgument("Gram mismatch".into()));
    }
    if !m.is_positive_definite() {
        return Err(Error::NotPositiveDefinite);
    }
    let r = m.r();
    let mm = DMatrix::from_fn(r, r, |i, j| m.entries[i][j] as f64);
    let eig = SymmetricEigen::new(mm);
    let inv_sqrt = &eig.eigenvectors
        * DMatrix::from_diagonal(&eig.eigenvalues.map(|x| 1.0 / x.sqrt()))
        * eig.eigenvectors.transpose();
    let x = tuple_f64(t);
    let d = l.rank();
    let vectors = (0..r)
        .map(|j| (0..d).map(|i| (0..r).map(|k| x[k][i] * inv_sqrt[(k, j)]).sum()).collect())
        .collect();
    Ok(UnitDiscriminantPoint { vectors })
}

/// Projector of the real span of a tuple.
pub fn project_to_grassmannian(l: &QuadraticLattice, t: &VectorTuple) -> Result<GrassmannPoint> {
    if !gram_of_tuple(l, t)?.is_positive_definite() {
        return Err(Error::Degenerate("tuple does not span a positive plane".into()));
    }
    GrassmannPoint::from_vectors(&tuple_f64(t))
}

/// Projector of the real span of a sublattice; positivity is assumed from
/// its construction. Computed from the HNF basis of the saturation, so a
/// sublattice and its saturation get bitwise equal projectors and fall on
/// the same side of every window boundary.
pub fn project_sublattice(s: &SublatticeHNF) -> Result<GrassmannPoint> {
    let basis = if s.primitive { s.basis.clone() } else { saturation(&s.basis)?.0 };
    GrassmannPoint::from_vectors(&tuple_f64(&VectorTuple::new(basis)))
}
