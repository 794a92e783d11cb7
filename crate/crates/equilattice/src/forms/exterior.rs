//! Dense exterior algebra over a finite basis: forms and multivectors stored
//! by sorted index subsets (bitmasks).

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::fmt::Debug;
use std::ops::{Add, Mul, Neg, Sub};

use crate::{Error, Result};

/// Largest supported dimension of the underlying space.
pub const MAX_DIM: usize = 12;

/// Which quotient of g a form or multivector lives on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Space {
    GModL,
    GModK,
    GModH,
    /// Coordinates of a designated subspace (after restriction).
    Subspace,
}

pub trait Scalar:
    Copy
    + Debug
    + Send
    + Sync
    + PartialEq
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Neg<Output = Self>
    + 'static
{
    fn zero() -> Self;
    fn one() -> Self;
    fn from_f64(x: f64) -> Self;
    fn abs2(self) -> f64;
    fn conj(self) -> Self;
    fn div(self, other: Self) -> Self;
}

impl Scalar for f64 {
    fn zero() -> Self {
        0.0
    }
    fn one() -> Self {
        1.0
    }
    fn from_f64(x: f64) -> Self {
        x
    }
    fn abs2(self) -> f64 {
        self * self
    }
    fn conj(self) -> Self {
        self
    }
    fn div(self, other: Self) -> Self {
        self / other
    }
}

impl Scalar for Complex64 {
    fn zero() -> Self {
        Complex64::new(0.0, 0.0)
    }
    fn one() -> Self {
        Complex64::new(1.0, 0.0)
    }
    fn from_f64(x: f64) -> Self {
        Complex64::new(x, 0.0)
    }
    fn abs2(self) -> f64 {
        self.norm_sqr()
    }
    fn conj(self) -> Self {
        Complex64::conj(&self)
    }
    fn div(self, other: Self) -> Self {
        self / other
    }
}

/// Bitmasks of all `k`-subsets of `0..n` in lexicographic order of their
/// sorted index lists.
pub fn subsets(n: usize, k: usize) -> Vec<u32> {
    let mut out = Vec::new();
    let mut idx: Vec<usize> = (0..k).collect();
    if k > n {
        return out;
    }
    loop {
        out.push(idx.iter().fold(0u32, |m, &i| m | (1 << i)));
        let mut i = k;
        loop {
            if i == 0 {
                return out;
            }
            i -= 1;
            if idx[i] < n - k + i {
                break;
            }
            if i == 0 {
                return out;
            }
        }
        if idx[i] >= n - k + i {
            return out;
        }
        idx[i] += 1;
        for j in i + 1..k {
            idx[j] = idx[j - 1] + 1;
        }
    }
}

pub fn mask_indices(mask: u32) -> Vec<usize> {
    (0..32).filter(|&i| mask & (1 << i) != 0).collect()
}

/// Sign of the permutation sorting the concatenation (a, b) of two disjoint
/// sorted index sets.
fn merge_sign(a: u32, b: u32) -> i32 {
    let mut inversions = 0;
    for i in mask_indices(a) {
        inversions += (b & ((1u32 << i) - 1)).count_ones();
    }
    if inversions % 2 == 0 {
        1
    } else {
        -1
    }
}

/// Determinant by Gaussian elimination with partial pivoting.
pub fn det<S: Scalar>(mut m: Vec<Vec<S>>) -> S {
    let n = m.len();
    let mut d = S::one();
    for c in 0..n {
        let p = (c..n)
            .max_by(|&i, &j| m[i][c].abs2().partial_cmp(&m[j][c].abs2()).unwrap())
            .unwrap();
        if m[p][c].abs2() == 0.0 {
            return S::zero();
        }
        if p != c {
            m.swap(p, c);
            d = -d;
        }
        d = d * m[c][c];
        for r in c + 1..n {
            let f = m[r][c].div(m[c][c]);
            for k in c..n {
                let t = m[c][k];
                m[r][k] = m[r][k] - f * t;
            }
        }
    }
    d
}

#[derive(Debug, Clone)]
struct Layout {
    dim: usize,
    degree: usize,
    masks: Vec<u32>,
    index: Vec<u32>,
}

impl Layout {
    fn new(dim: usize, degree: usize) -> Result<Self> {
        if dim > MAX_DIM {
            return Err(Error::Unsupported(format!("exterior algebra of dimension {dim} > {MAX_DIM}")));
        }
        if degree > dim {
            return Err(Error::InvalidArgument(format!("degree {degree} exceeds dimension {dim}")));
        }
        let masks = subsets(dim, degree);
        let mut index = vec![u32::MAX; 1 << dim];
        for (i, &m) in masks.iter().enumerate() {
            index[m as usize] = i as u32;
        }
        Ok(Layout { dim, degree, masks, index })
    }

    fn pos(&self, mask: u32) -> usize {
        self.index[mask as usize] as usize
    }
}

/// An alternating multilinear form, stored by its values on sorted basis
/// subsets.
#[derive(Debug, Clone)]
pub struct AlternatingForm<S: Scalar> {
    pub space: Space,
    layout: Layout,
    coeffs: Vec<S>,
}

/// A multivector of fixed degree, stored by sorted basis subsets.
#[derive(Debug, Clone)]
pub struct MultiVector<S: Scalar> {
    pub space: Space,
    layout: Layout,
    coeffs: Vec<S>,
}

macro_rules! common_impl {
    ($t:ident) => {
        impl<S: Scalar> $t<S> {
            pub fn zero(space: Space, dim: usize, degree: usize) -> Result<Self> {
                let layout = Layout::new(dim, degree)?;
                let coeffs = vec![S::zero(); layout.masks.len()];
                Ok($t { space, layout, coeffs })
            }

            /// Builds from a function of the sorted index subset.
            pub fn from_fn(
                space: Space,
                dim: usize,
                degree: usize,
                mut f: impl FnMut(&[usize]) -> S,
            ) -> Result<Self> {
                let mut out = Self::zero(space, dim, degree)?;
                for (c, &m) in out.coeffs.iter_mut().zip(&out.layout.masks) {
                    *c = f(&mask_indices(m));
                }
                Ok(out)
            }

            pub fn dim(&self) -> usize {
                self.layout.dim
            }

            pub fn degree(&self) -> usize {
                self.layout.degree
            }

            /// Coefficients in lexicographic subset order.
            pub fn coefficients(&self) -> &[S] {
                &self.coeffs
            }

            /// Sorted index subsets matching `coefficients`.
            pub fn subsets(&self) -> Vec<Vec<usize>> {
                self.layout.masks.iter().map(|&m| mask_indices(m)).collect()
            }

            /// Coefficient at an arbitrary index list, with the sign of the
            /// sorting permutation; zero on repeated indices.
            pub fn get(&self, idx: &[usize]) -> S {
                let mut v = idx.to_vec();
                let mut sign = false;
                for i in 0..v.len() {
                    for j in 0..v.len() - 1 - i {
                        if v[j] > v[j + 1] {
                            v.swap(j, j + 1);
                            sign = !sign;
                        } else if v[j] == v[j + 1] {
                            return S::zero();
                        }
                    }
                }
                if v.windows(2).any(|w| w[0] == w[1]) || v.len() != self.degree() {
                    return S::zero();
                }
                let mask = v.iter().fold(0u32, |m, &i| m | (1 << i));
                let c = self.coeffs[self.layout.pos(mask)];
                if sign {
                    -c
                } else {
                    c
                }
            }

            pub fn set(&mut self, sorted: &[usize], value: S) {
                let mask = sorted.iter().fold(0u32, |m, &i| m | (1 << i));
                let p = self.layout.pos(mask);
                self.coeffs[p] = value;
            }

            pub fn scale(&self, s: S) -> Self {
                let mut out = self.clone();
                out.coeffs.iter_mut().for_each(|c| *c = *c * s);
                out
            }

            fn check_same(&self, other: &Self) -> Result<()> {
                if self.space != other.space {
                    return Err(Error::InvalidArgument(format!(
                        "space mismatch: {:?} vs {:?}",
                        self.space, other.space
                    )));
                }
                if self.dim() != other.dim() || self.degree() != other.degree() {
                    return Err(Error::DimensionMismatch { expected: self.coeffs.len(), got: other.coeffs.len() });
                }
                Ok(())
            }

            pub fn add(&self, other: &Self) -> Result<Self> {
                self.check_same(other)?;
                let mut out = self.clone();
                out.coeffs.iter_mut().zip(&other.coeffs).for_each(|(a, &b)| *a = *a + b);
                Ok(out)
            }

            pub fn sub(&self, other: &Self) -> Result<Self> {
                self.add(&other.scale(-S::one()))
            }

            /// Euclidean norm of the coefficient vector.
            pub fn norm(&self) -> f64 {
                self.coeffs.iter().map(|c| c.abs2()).sum::<f64>().sqrt()
            }

            pub fn conj(&self) -> Self {
                let mut out = self.clone();
                out.coeffs.iter_mut().for_each(|c| *c = c.conj());
                out
            }

            /// Exterior product.
            pub fn wedge(&self, other: &Self) -> Result<Self> {
                if self.space != other.space || self.dim() != other.dim() {
                    return Err(Error::InvalidArgument("wedge of elements on different spaces".into()));
                }
                let mut out = Self::zero(self.space, self.dim(), self.degree() + other.degree())?;
                for (&a, &ca) in self.layout.masks.iter().zip(&self.coeffs) {
                    for (&b, &cb) in other.layout.masks.iter().zip(&other.coeffs) {
                        if a & b != 0 {
                            continue;
                        }
                        let p = out.layout.pos(a | b);
                        let t = ca * cb;
                        out.coeffs[p] = if merge_sign(a, b) > 0 { out.coeffs[p] + t } else { out.coeffs[p] - t };
                    }
                }
                Ok(out)
            }
        }
    };
}

common_impl!(AlternatingForm);
common_impl!(MultiVector);

impl<S: Scalar> MultiVector<S> {
    /// The decomposable multivector v_1 ∧ … ∧ v_k of coordinate vectors.
    pub fn decomposable(space: Space, dim: usize, vectors: &[Vec<S>]) -> Result<Self> {
        for v in vectors {
            if v.len() != dim {
                return Err(Error::DimensionMismatch { expected: dim, got: v.len() });
            }
        }
        Self::from_fn(space, dim, vectors.len(), |idx| {
            det(idx.iter().map(|&r| vectors.iter().map(|v| v[r]).collect()).collect())
        })
    }
}

impl<S: Scalar> AlternatingForm<S> {
    /// The dual basis covector e_i^*.
    pub fn covector(space: Space, dim: usize, i: usize) -> Result<Self> {
        Self::from_fn(space, dim, 1, |idx| if idx[0] == i { S::one() } else { S::zero() })
    }

    /// Value on coordinate vectors: Σ_I α_I det(V[I, :]).
    pub fn evaluate(&self, vectors: &[Vec<S>]) -> Result<S> {
        if vectors.len() != self.degree() {
            return Err(Error::DimensionMismatch { expected: self.degree(), got: vectors.len() });
        }
        let mv = MultiVector::decomposable(self.space, self.dim(), vectors)?;
        Ok(self.pair(&mv))
    }

    /// Pairing with a multivector of the same degree.
    pub fn pair(&self, u: &MultiVector<S>) -> S {
        self.coeffs.iter().zip(&u.coeffs).fold(S::zero(), |s, (&a, &b)| s + a * b)
    }

    /// Interior product: (ι_u α)(Y) = α(u ∧ Y).
    pub fn contract(&self, u: &MultiVector<S>) -> Result<Self> {
        if self.space != u.space {
            return Err(Error::InvalidArgument(format!(
                "contraction across spaces: form on {:?}, multivector on {:?}",
                self.space, u.space
            )));
        }
        if self.dim() != u.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), got: u.dim() });
        }
        if u.degree() > self.degree() {
            return Err(Error::InvalidArgument(format!(
                "multivector degree {} exceeds form degree {}",
                u.degree(),
                self.degree()
            )));
        }
        let mut out = Self::zero(self.space, self.dim(), self.degree() - u.degree())?;
        for (k, &i) in out.layout.masks.clone().iter().enumerate() {
            let mut acc = S::zero();
            for (&j, &cu) in u.layout.masks.iter().zip(&u.coeffs) {
                if j & i != 0 {
                    continue;
                }
                let a = self.coeffs[self.layout.pos(i | j)] * cu;
                acc = if merge_sign(j, i) > 0 { acc + a } else { acc - a };
            }
            out.coeffs[k] = acc;
        }
        Ok(out)
    }

    /// Pull-back along a linear map given in coordinates:
    /// (A^*α)(X_1, …) = α(A X_1, …).
    pub fn pullback(&self, a: &DMatrix<f64>) -> Result<Self> {
        let n = self.dim();
        if a.nrows() != n {
            return Err(Error::DimensionMismatch { expected: n, got: a.nrows() });
        }
        let cols: Vec<Vec<S>> =
            (0..a.ncols()).map(|j| (0..n).map(|i| S::from_f64(a[(i, j)])).collect()).collect();
        self.restrict_to(&cols, self.space)
    }

    /// Restriction to the span of the given coordinate vectors, as a form in
    /// the coordinates of that list.
    pub fn restrict(&self, basis: &[Vec<S>]) -> Result<Self> {
        self.restrict_to(basis, Space::Subspace)
    }

    fn restrict_to(&self, basis: &[Vec<S>], space: Space) -> Result<Self> {
        if let Some(v) = basis.iter().find(|v| v.len() != self.dim()) {
            return Err(Error::DimensionMismatch { expected: self.dim(), got: v.len() });
        }
        let k = self.degree();
        Self::from_fn(space, basis.len(), k, |idx| {
            let vs: Vec<Vec<S>> = idx.iter().map(|&i| basis[i].clone()).collect();
            let mv = MultiVector::decomposable(self.space, self.dim(), &vs).expect("checked dimensions");
            self.pair(&mv)
        })
    }
}

impl AlternatingForm<Complex64> {
    /// The real part, rejected if the imaginary part exceeds `tol` relative
    /// to the norm.
    pub fn real_part(&self, tol: f64) -> Result<AlternatingForm<f64>> {
        let im = self.coeffs.iter().map(|c| c.im * c.im).sum::<f64>().sqrt();
        if im > tol * self.norm().max(1e-300) && im > 1e-300 {
            return Err(Error::Validation(format!("form is not real: imaginary norm {im:e}")));
        }
        Ok(AlternatingForm { space: self.space, layout: self.layout.clone(), coeffs: self.coeffs.iter().map(|c| c.re).collect() })
    }
}

impl AlternatingForm<f64> {
    pub fn complexify(&self) -> AlternatingForm<Complex64> {
        AlternatingForm {
            space: self.space,
            layout: self.layout.clone(),
            coeffs: self.coeffs.iter().map(|&c| Complex64::new(c, 0.0)).collect(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Proportionality {
    pub scalar: f64,
    /// ‖f1|_W − s·f2|_W‖ / ‖f1|_W‖ (absolute when f1|_W = 0).
    pub residual: f64,
}

/// Least-squares scalar s with f1|_W ≈ s·f2|_W. `subspace` lists basis
/// vectors of W; `None` means the whole space.
pub fn proportionality_test(
    f1: &AlternatingForm<f64>,
    f2: &AlternatingForm<f64>,
    subspace: Option<&[Vec<f64>]>,
) -> Result<Proportionality> {
    if f1.degree() != f2.degree() {
        return Err(Error::InvalidArgument(format!("degrees differ: {} vs {}", f1.degree(), f2.degree())));
    }
    let (g1, g2) = match subspace {
        Some(w) => (f1.restrict(w)?, f2.restrict(w)?),
        None => (f1.clone(), f2.clone()),
    };
    if g1.dim() != g2.dim() {
        return Err(Error::DimensionMismatch { expected: g1.dim(), got: g2.dim() });
    }
    let dot = |a: &[f64], b: &[f64]| a.iter().zip(b).map(|(x, y)| x * y).sum::<f64>();
    let n2 = dot(&g2.coeffs, &g2.coeffs);
    if n2.sqrt() <= 1e-14 * f2.norm().max(f1.norm()).max(1e-300) || n2 == 0.0 {
        return Err(Error::Degenerate("second form restricts to zero".into()));
    }
    let s = dot(&g1.coeffs, &g2.coeffs) / n2;
    let r: f64 = g1.coeffs.iter().zip(&g2.coeffs).map(|(a, b)| (a - s * b).powi(2)).sum::<f64>().sqrt();
    let n1 = g1.norm();
    Ok(Proportionality { scalar: s, residual: if n1 > 0.0 { r / n1 } else { r } })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn e(n: usize, i: usize) -> AlternatingForm<f64> {
        AlternatingForm::covector(Space::GModL, n, i).unwrap()
    }

    fn basis_mv(n: usize, idx: &[usize]) -> MultiVector<f64> {
        let vs: Vec<Vec<f64>> = idx.iter().map(|&i| (0..n).map(|j| (i == j) as u8 as f64).collect()).collect();
        MultiVector::decomposable(Space::GModL, n, &vs).unwrap()
    }

    #[test]
    fn subset_enumeration_is_lexicographic() {
        let s: Vec<Vec<usize>> = subsets(4, 2).into_iter().map(mask_indices).collect();
        assert_eq!(s, vec![vec![0, 1], vec![0, 2], vec![0, 3], vec![1, 2], vec![1, 3], vec![2, 3]]);
        assert_eq!(subsets(5, 0), vec![0]);
        assert_eq!(subsets(5, 5).len(), 1);
        assert_eq!(subsets(12, 6).len(), 924);
    }

    #[test]
    fn contraction_examples() {
        let w = e(3, 0).wedge(&e(3, 1)).unwrap();
        let c = w.contract(&basis_mv(3, &[0])).unwrap();
        assert_eq!(c.coefficients(), e(3, 1).coefficients());
        let w3 = w.wedge(&e(3, 2)).unwrap();
        let c = w3.contract(&basis_mv(3, &[0, 1])).unwrap();
        assert_eq!(c.coefficients(), e(3, 2).coefficients());
        // support in the kernel
        let c = e(3, 1).wedge(&e(3, 2)).unwrap().contract(&basis_mv(3, &[0])).unwrap();
        assert!(c.norm() == 0.0);
        let mut other = basis_mv(3, &[0]);
        other.space = Space::GModK;
        assert!(w.contract(&other).is_err());
    }

    #[test]
    fn wedge_is_graded_commutative() {
        let a = e(4, 2);
        let b = e(4, 0);
        let ab = a.wedge(&b).unwrap();
        let ba = b.wedge(&a).unwrap();
        assert_eq!(ab.coefficients(), ba.scale(-1.0).coefficients());
        assert_eq!(ab.get(&[2, 0]), 1.0);
        assert_eq!(ab.get(&[0, 2]), -1.0);
    }

    #[test]
    fn evaluation_is_a_determinant() {
        let w = e(3, 0).wedge(&e(3, 1)).unwrap();
        let v = w.evaluate(&[vec![1.0, 2.0, 5.0], vec![3.0, 4.0, 7.0]]).unwrap();
        assert!((v - (1.0 * 4.0 - 2.0 * 3.0)).abs() < 1e-14);
    }

    #[test]
    fn pullback_by_identity_and_composition() {
        let w = e(3, 0).wedge(&e(3, 2)).unwrap().add(&e(3, 1).wedge(&e(3, 2)).unwrap().scale(2.0)).unwrap();
        let id = DMatrix::<f64>::identity(3, 3);
        assert_eq!(w.pullback(&id).unwrap().coefficients(), w.coefficients());
        let a = DMatrix::from_row_slice(3, 3, &[1.0, 2.0, 0.0, 0.5, -1.0, 3.0, 0.0, 1.0, 1.0]);
        let b = DMatrix::from_row_slice(3, 3, &[0.0, 1.0, 0.0, -1.0, 0.0, 2.0, 1.0, 1.0, 1.0]);
        let lhs = w.pullback(&(&a * &b)).unwrap();
        let rhs = w.pullback(&a).unwrap().pullback(&b).unwrap();
        assert!(lhs.sub(&rhs).unwrap().norm() < 1e-12);
    }

    #[test]
    fn proportionality_examples() {
        let f2 = e(3, 0).wedge(&e(3, 1)).unwrap().add(&e(3, 2).wedge(&e(3, 1)).unwrap()).unwrap();
        let f1 = f2.scale(3.0);
        let p = proportionality_test(&f1, &f2, None).unwrap();
        assert!((p.scalar - 3.0).abs() < 1e-14 && p.residual < 1e-14);
        let z = AlternatingForm::<f64>::zero(Space::GModL, 3, 2).unwrap();
        assert!(proportionality_test(&f1, &z, None).is_err());
        // restriction to span(e0, e2) only sees the e0∧e2 coefficient
        let w = [vec![1.0, 0.0, 0.0], vec![0.0, 0.0, 1.0]];
        assert!(proportionality_test(&f1, &f2, Some(&w)).is_err());
    }

    #[test]
    fn complex_determinant() {
        let i = Complex64::new(0.0, 1.0);
        let one = Complex64::new(1.0, 0.0);
        let d = det(vec![vec![one, i], vec![i, one]]);
        assert!((d - Complex64::new(2.0, 0.0)).norm() < 1e-15);
    }
}
