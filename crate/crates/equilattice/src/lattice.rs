//! Integral quadratic lattices, vector tuples and their Gram matrices.

use crate::arith::det_exact;
use crate::error::{Error, Result};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

/// An integral symmetric bilinear form on Z^d.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "LatticeSpec", into = "LatticeSpec")]
pub struct QuadraticLattice {
    name: String,
    gram: Vec<Vec<i64>>,
    signature: (usize, usize),
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct LatticeSpec {
    gram: Vec<Vec<i64>>,
    #[serde(default)]
    name: String,
}

impl TryFrom<LatticeSpec> for QuadraticLattice {
    type Error = Error;
    fn try_from(s: LatticeSpec) -> Result<Self> {
        QuadraticLattice::new(s.name, s.gram)
    }
}

impl From<QuadraticLattice> for LatticeSpec {
    fn from(l: QuadraticLattice) -> Self {
        LatticeSpec { gram: l.gram, name: l.name }
    }
}

impl QuadraticLattice {
    pub fn new(name: impl Into<String>, gram: Vec<Vec<i64>>) -> Result<Self> {
        let d = gram.len();
        if d == 0 {
            return Err(Error::InvalidArgument("empty Gram matrix".into()));
        }
        for row in &gram {
            if row.len() != d {
                return Err(Error::DimensionMismatch { expected: d, got: row.len() });
            }
        }
        for i in 0..d {
            for j in 0..i {
                if gram[i][j] != gram[j][i] {
                    return Err(Error::NotSymmetric);
                }
            }
        }
        if det_exact(&gram).is_zero() {
            return Err(Error::Singular);
        }
        let signature = inertia(&gram);
        Ok(QuadraticLattice { name: name.into(), gram, signature })
    }

    /// Z^d with the dot product.
    pub fn standard(d: usize) -> Self {
        let gram = (0..d).map(|i| (0..d).map(|j| i64::from(i == j)).collect()).collect();
        Self::new(format!("Z{d}"), gram).expect("identity is nondegenerate")
    }

    pub fn a2() -> Self {
        Self::new("A2", vec![vec![2, 1], vec![1, 2]]).expect("A2 is nondegenerate")
    }

    pub fn hyperbolic_plane() -> Self {
        Self::new("U", vec![vec![0, 1], vec![1, 0]]).expect("U is nondegenerate")
    }

    pub fn diagonal(name: impl Into<String>, diag: &[i64]) -> Result<Self> {
        let d = diag.len();
        let gram = (0..d).map(|i| (0..d).map(|j| if i == j { diag[i] } else { 0 }).collect()).collect();
        Self::new(name, gram)
    }

    pub fn direct_sum(&self, other: &QuadraticLattice) -> Self {
        let (a, b) = (self.rank(), other.rank());
        let mut gram = vec![vec![0; a + b]; a + b];
        for i in 0..a {
            gram[i][..a].copy_from_slice(&self.gram[i]);
        }
        for i in 0..b {
            gram[a + i][a..].copy_from_slice(&other.gram[i]);
        }
        Self::new(format!("{}+{}", self.name, other.name), gram).expect("sum of nondegenerate forms")
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn rank(&self) -> usize {
        self.gram.len()
    }

    pub fn gram(&self) -> &[Vec<i64>] {
        &self.gram
    }

    /// (positive, negative) inertia over the reals.
    pub fn signature(&self) -> (usize, usize) {
        self.signature
    }

    pub fn is_positive_definite(&self) -> bool {
        self.signature.1 == 0
    }

    pub fn det(&self) -> BigInt {
        det_exact(&self.gram)
    }

    pub fn inner(&self, u: &[i64], v: &[i64]) -> i128 {
        let mut s = 0i128;
        for (i, row) in self.gram.iter().enumerate() {
            if u[i] == 0 {
                continue;
            }
            let mut t = 0i128;
            for (j, &b) in row.iter().enumerate() {
                t += b as i128 * v[j] as i128;
            }
            s += u[i] as i128 * t;
        }
        s
    }

    pub fn norm(&self, v: &[i64]) -> i128 {
        self.inner(v, v)
    }

    pub fn inner_f64(&self, u: &[f64], v: &[f64]) -> f64 {
        let mut s = 0.0;
        for (i, row) in self.gram.iter().enumerate() {
            for (j, &b) in row.iter().enumerate() {
                s += u[i] * b as f64 * v[j];
            }
        }
        s
    }
}

/// Sylvester inertia by exact congruence diagonalization over Q.
fn inertia(gram: &[Vec<i64>]) -> (usize, usize) {
    let n = gram.len();
    let mut a: Vec<Vec<BigRational>> =
        gram.iter().map(|r| r.iter().map(|&x| BigRational::from_integer(x.into())).collect()).collect();
    let (mut pos, mut neg) = (0, 0);
    let mut active: Vec<usize> = (0..n).collect();
    while !active.is_empty() {
        let pivot = active.iter().copied().find(|&i| !a[i][i].is_zero());
        let p = match pivot {
            Some(p) => p,
            None => {
                let pair = active
                    .iter()
                    .flat_map(|&i| active.iter().map(move |&j| (i, j)))
                    .find(|&(i, j)| i != j && !a[i][j].is_zero());
                let Some((i, j)) = pair else { break };
                // e_i <- e_i + e_j makes the diagonal entry 2 a_ij.
                for k in 0..n {
                    let t = a[j][k].clone();
                    a[i][k] += t;
                }
                for k in 0..n {
                    let t = a[k][j].clone();
                    a[k][i] += t;
                }
                i
            }
        };
        let piv = a[p][p].clone();
        if piv.is_positive() {
            pos += 1;
        } else {
            neg += 1;
        }
        active.retain(|&i| i != p);
        for &i in &active {
            if a[i][p].is_zero() {
                continue;
            }
            let f = a[i][p].clone() / piv.clone();
            for k in 0..n {
                let t = f.clone() * a[p][k].clone();
                a[i][k] -= t;
            }
            for k in 0..n {
                let t = f.clone() * a[k][p].clone();
                a[k][i] -= t;
            }
        }
    }
    (pos, neg)
}

/// An r-tuple of lattice vectors.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct VectorTuple {
    pub vectors: Vec<Vec<i64>>,
}

impl VectorTuple {
    pub fn new(vectors: Vec<Vec<i64>>) -> Self {
        VectorTuple { vectors }
    }

    pub fn single(v: Vec<i64>) -> Self {
        VectorTuple { vectors: vec![v] }
    }

    pub fn r(&self) -> usize {
        self.vectors.len()
    }

    fn check(&self, l: &QuadraticLattice) -> Result<()> {
        if self.vectors.is_empty() {
            return Err(Error::InvalidArgument("empty tuple".into()));
        }
        for v in &self.vectors {
            if v.len() != l.rank() {
                return Err(Error::DimensionMismatch { expected: l.rank(), got: v.len() });
            }
        }
        Ok(())
    }

    /// Whether the vectors span a subspace on which the form is positive definite.
    pub fn in_omega(&self, l: &QuadraticLattice) -> Result<bool> {
        Ok(gram_of_tuple(l, self)?.is_positive_definite())
    }
}

/// A symmetric integer matrix, typically an intersection matrix I(λ).
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct GramMatrix {
    pub entries: Vec<Vec<i64>>,
}

impl GramMatrix {
    pub fn new(entries: Vec<Vec<i64>>) -> Result<Self> {
        let r = entries.len();
        for row in &entries {
            if row.len() != r {
                return Err(Error::DimensionMismatch { expected: r, got: row.len() });
            }
        }
        for i in 0..r {
            for j in 0..i {
                if entries[i][j] != entries[j][i] {
                    return Err(Error::NotSymmetric);
                }
            }
        }
        Ok(GramMatrix { entries })
    }

    pub fn scalar(m: i64) -> Self {
        GramMatrix { entries: vec![vec![m]] }
    }

    pub fn identity(r: usize) -> Self {
        GramMatrix { entries: (0..r).map(|i| (0..r).map(|j| i64::from(i == j)).collect()).collect() }
    }

    pub fn scaled(&self, c: i64) -> Self {
        GramMatrix { entries: self.entries.iter().map(|row| row.iter().map(|&x| x * c).collect()).collect() }
    }

    pub fn r(&self) -> usize {
        self.entries.len()
    }

    pub fn det(&self) -> BigInt {
        det_exact(&self.entries)
    }

    fn minor(&self, idx: &[usize]) -> BigInt {
        let m: Vec<Vec<i64>> = idx.iter().map(|&i| idx.iter().map(|&j| self.entries[i][j]).collect()).collect();
        det_exact(&m)
    }

    /// Leading principal minors all positive.
    pub fn is_positive_definite(&self) -> bool {
        (1..=self.r()).all(|k| self.minor(&(0..k).collect::<Vec<_>>()).is_positive())
    }

    /// All principal minors non-negative.
    pub fn is_positive_semidefinite(&self) -> bool {
        let r = self.r();
        (1u32..(1 << r)).all(|mask| {
            let idx: Vec<usize> = (0..r).filter(|&i| mask & (1 << i) != 0).collect();
            !self.minor(&idx).is_negative()
        })
    }

    pub fn to_f64(&self) -> Vec<Vec<f64>> {
        self.entries.iter().map(|r| r.iter().map(|&x| x as f64).collect()).collect()
    }
}

/// The intersection matrix (B(v_i, v_j))_{i,j}.
pub fn gram_of_tuple(l: &QuadraticLattice, t: &VectorTuple) -> Result<GramMatrix> {
    t.check(l)?;
    let r = t.r();
    let mut entries = vec![vec![0i64; r]; r];
    for i in 0..r {
        for j in i..r {
            let x = l.inner(&t.vectors[i], &t.vectors[j]);
            let x = i64::try_from(x).map_err(|_| Error::Overflow("gram_of_tuple"))?;
            entries[i][j] = x;
            entries[j][i] = x;
        }
    }
    Ok(GramMatrix { entries })
}

/// h(v) = det of the intersection matrix.
pub fn discriminant(l: &QuadraticLattice, t: &VectorTuple) -> Result<BigInt> {
    Ok(gram_of_tuple(l, t)?.det())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gram_examples() {
        let z2 = QuadraticLattice::standard(2);
        let t = VectorTuple::new(vec![vec![1, 0], vec![0, 1]]);
        assert_eq!(gram_of_tuple(&z2, &t).unwrap(), GramMatrix::identity(2));
        let t = VectorTuple::new(vec![vec![1, 1], vec![1, -1]]);
        assert_eq!(gram_of_tuple(&z2, &t).unwrap().entries, vec![vec![2, 0], vec![0, 2]]);
        let u = QuadraticLattice::hyperbolic_plane();
        assert_eq!(gram_of_tuple(&u, &VectorTuple::single(vec![1, 1])).unwrap().entries, vec![vec![2]]);
    }

    #[test]
    fn discriminant_examples() {
        let z2 = QuadraticLattice::standard(2);
        let d = |v: Vec<Vec<i64>>| discriminant(&z2, &VectorTuple::new(v)).unwrap();
        assert_eq!(d(vec![vec![1, 1], vec![1, -1]]), BigInt::from(4));
        assert_eq!(d(vec![vec![2, 0], vec![0, 1]]), BigInt::from(4));
        assert_eq!(d(vec![vec![1, 0], vec![2, 0]]), BigInt::from(0));
    }

    #[test]
    fn dimension_mismatch() {
        let z2 = QuadraticLattice::standard(2);
        let t = VectorTuple::single(vec![1, 0, 0]);
        assert!(matches!(gram_of_tuple(&z2, &t), Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn signatures() {
        assert_eq!(QuadraticLattice::standard(3).signature(), (3, 0));
        assert_eq!(QuadraticLattice::hyperbolic_plane().signature(), (1, 1));
        let l = QuadraticLattice::diagonal("d", &[1, -1, -1]).unwrap();
        assert_eq!(l.signature(), (1, 2));
        let u2 = QuadraticLattice::hyperbolic_plane().direct_sum(&QuadraticLattice::hyperbolic_plane());
        assert_eq!(u2.signature(), (2, 2));
        assert!(QuadraticLattice::new("bad", vec![vec![1, 1], vec![1, 1]]).is_err());
        assert!(QuadraticLattice::new("bad", vec![vec![1, 2], vec![1, 1]]).is_err());
    }

    #[test]
    fn json_round_trip() {
        let l: QuadraticLattice = serde_json::from_str(r#"{"gram": [[2,1],[1,2]], "name": "A2"}"#).unwrap();
        assert_eq!(l, QuadraticLattice::a2());
        let s = serde_json::to_string(&l).unwrap();
        assert_eq!(serde_json::from_str::<QuadraticLattice>(&s).unwrap(), l);
        assert!(serde_json::from_str::<QuadraticLattice>(r#"{"gram": [[1,1],[1,1]]}"#).is_err());
    }

    #[test]
    fn semidefiniteness() {
        assert!(GramMatrix::new(vec![vec![1, 1], vec![1, 1]]).unwrap().is_positive_semidefinite());
        assert!(!GramMatrix::new(vec![vec![1, 1], vec![1, 1]]).unwrap().is_positive_definite());
        assert!(!GramMatrix::new(vec![vec![0, 1], vec![1, 0]]).unwrap().is_positive_semidefinite());
    }
}
