//! Small dense linear-algebra helpers for subspaces of a Lie algebra.

use nalgebra::{DMatrix, DVector};

use crate::{Error, Result};

/// Relative tolerance for rank decisions.
pub(crate) const RANK_TOL: f64 = 1e-9;

fn svd_full(a: &DMatrix<f64>) -> (Vec<f64>, DMatrix<f64>) {
    let n = a.ncols();
    let padded = if a.nrows() < n {
        let mut p = DMatrix::zeros(n, n);
        p.view_mut((0, 0), (a.nrows(), n)).copy_from(a);
        p
    } else {
        a.clone()
    };
    let svd = padded.svd(false, true);
    let vt = svd.v_t.expect("requested");
    (svd.singular_values.iter().copied().collect(), vt)
}

/// Basis of the null space of `a`, as columns.
pub(crate) fn nullspace(a: &DMatrix<f64>) -> DMatrix<f64> {
    let n = a.ncols();
    if a.nrows() == 0 || n == 0 {
        return DMatrix::identity(n, n);
    }
    let (s, vt) = svd_full(a);
    let top = s.iter().fold(1.0f64, |m, &x| m.max(x));
    let rows: Vec<usize> = (0..vt.nrows()).filter(|&i| s[i] <= RANK_TOL * top).collect();
    let mut out = DMatrix::zeros(n, rows.len());
    for (c, &i) in rows.iter().enumerate() {
        out.set_column(c, &vt.row(i).transpose());
    }
    canonical_basis(&out)
}

pub(crate) fn rank(a: &DMatrix<f64>) -> usize {
    if a.ncols() == 0 || a.nrows() == 0 {
        return 0;
    }
    let s = a.clone().svd(false, false).singular_values;
    let top = s.iter().fold(0.0f64, |m, &x| m.max(x));
    s.iter().filter(|&&x| x > RANK_TOL * top.max(1.0)).count()
}

/// A deterministic basis of the column span: reduced row echelon form of the
/// transpose. Coordinate subspaces come out as coordinate vectors.
pub(crate) fn canonical_basis(cols: &DMatrix<f64>) -> DMatrix<f64> {
    let mut m = cols.transpose();
    let (rows, n) = m.shape();
    let scale = m.iter().fold(1.0f64, |a, &x| a.max(x.abs()));
    let mut r = 0;
    for c in 0..n {
        if r == rows {
            break;
        }
        let p = (r..rows).max_by(|&i, &j| m[(i, c)].abs().partial_cmp(&m[(j, c)].abs()).unwrap()).unwrap();
        if m[(p, c)].abs() <= RANK_TOL * scale {
            continue;
        }
        m.swap_rows(p, r);
        let piv = m[(r, c)];
        for k in 0..n {
            m[(r, k)] /= piv;
        }
        for i in 0..rows {
            if i != r {
                let f = m[(i, c)];
                if f != 0.0 {
                    for k in 0..n {
                        let t = m[(r, k)];
                        m[(i, k)] -= f * t;
                    }
                }
            }
        }
        r += 1;
    }
    for x in m.iter_mut() {
        if x.abs() < 1e-14 * scale {
            *x = 0.0;
        }
    }
    m.rows(0, r).transpose()
}

/// Least-squares coordinates of `x` in the columns of `basis` and the
/// residual norm.
pub(crate) fn coords(basis: &DMatrix<f64>, x: &DVector<f64>) -> (DVector<f64>, f64) {
    if basis.ncols() == 0 {
        return (DVector::zeros(0), x.norm());
    }
    let c = basis.clone().svd(true, true).solve(x, 1e-14).expect("svd computed with u and v");
    let r = (basis * &c - x).norm();
    (c, r)
}

/// Columns of `a` followed by columns of `b`.
pub(crate) fn hcat(a: &DMatrix<f64>, b: &DMatrix<f64>) -> DMatrix<f64> {
    let n = a.nrows().max(b.nrows());
    let mut out = DMatrix::zeros(n, a.ncols() + b.ncols());
    out.view_mut((0, 0), (a.nrows(), a.ncols())).copy_from(a);
    out.view_mut((0, a.ncols()), (b.nrows(), b.ncols())).copy_from(b);
    out
}

/// Basis of U ∩ W.
pub(crate) fn intersection(u: &DMatrix<f64>, w: &DMatrix<f64>) -> DMatrix<f64> {
    let n = u.nrows();
    if u.ncols() == 0 || w.ncols() == 0 {
        return DMatrix::zeros(n, 0);
    }
    let ns = nullspace(&hcat(u, &(-w)));
    let top = ns.rows(0, u.ncols()).into_owned();
    let v = u * top;
    if v.ncols() == 0 {
        return v;
    }
    canonical_basis(&v)
}

/// Basis of {x : Sᵀ κ x = 0}.
pub(crate) fn orthogonal_complement(kappa: &DMatrix<f64>, s: &DMatrix<f64>) -> DMatrix<f64> {
    if s.ncols() == 0 {
        return DMatrix::identity(kappa.nrows(), kappa.nrows());
    }
    nullspace(&(s.transpose() * kappa))
}

/// Coordinates relative to a direct sum decomposition g = Q ⊕ C.
#[derive(Debug, Clone)]
pub(crate) struct Split {
    pub sub: DMatrix<f64>,
    pub comp: DMatrix<f64>,
    inv: DMatrix<f64>,
}

impl Split {
    pub fn new(sub: &DMatrix<f64>, comp: &DMatrix<f64>) -> Result<Self> {
        let full = hcat(sub, comp);
        if full.nrows() != full.ncols() {
            return Err(Error::Degenerate(format!(
                "subspaces of dimensions {} and {} do not sum to {}",
                sub.ncols(),
                comp.ncols(),
                full.nrows()
            )));
        }
        let inv = full
            .clone()
            .try_inverse()
            .filter(|_| rank(&full) == full.ncols())
            .ok_or_else(|| Error::Degenerate("subspaces are not complementary".into()))?;
        Ok(Split { sub: sub.clone(), comp: comp.clone(), inv })
    }

    /// Coordinates of the complement component.
    pub fn comp_coords(&self, x: &DMatrix<f64>) -> DMatrix<f64> {
        let q = self.sub.ncols();
        (&self.inv * x).rows(q, self.comp.ncols()).into_owned()
    }

    /// The map induced on g/Q by `a`, in complement coordinates; `a` must
    /// preserve Q.
    pub fn induced(&self, a: &DMatrix<f64>) -> Result<DMatrix<f64>> {
        let image = a * &self.sub;
        let leak = self.comp_coords(&image).amax();
        if leak > 1e-8 * a.amax().max(1.0) {
            return Err(Error::Validation(format!("element does not normalize the subspace (leak {leak:e})")));
        }
        Ok(self.comp_coords(&(a * &self.comp)))
    }
}
