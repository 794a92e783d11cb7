//! Column Hermite normal form and saturation of sublattices.

use crate::error::{Error, Result};
use crate::lattice::{discriminant, QuadraticLattice, VectorTuple};
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{CheckedMul, CheckedSub, Signed, ToPrimitive};
use serde::{Deserialize, Serialize};

trait Ring: Clone + PartialOrd + Integer + Signed + CheckedSub + CheckedMul {}
impl<T: Clone + PartialOrd + Integer + Signed + CheckedSub + CheckedMul> Ring for T {}

/// `dst -= q * src`, entrywise.
fn axpy<T: Ring>(dst: &mut [T], q: &T, src: &[T]) -> Option<()> {
    for (x, s) in dst.iter_mut().zip(src) {
        *x = x.checked_sub(&q.checked_mul(s)?)?;
    }
    Some(())
}

/// Outer `None`: overflow. Inner `None`: columns are dependent.
fn column_hnf<T: Ring>(mut c: Vec<Vec<T>>) -> Option<Option<Vec<Vec<T>>>> {
    let r = c.len();
    let d = c.first().map_or(0, Vec::len);
    let mut j = 0;
    for i in 0..d {
        if j == r {
            break;
        }
        loop {
            let mut best: Option<usize> = None;
            for k in j..r {
                if !c[k][i].is_zero() && best.is_none_or(|b| c[k][i].abs() < c[b][i].abs()) {
                    best = Some(k);
                }
            }
            let Some(b) = best else { break };
            c.swap(j, b);
            let mut clean = true;
            for k in j + 1..r {
                if c[k][i].is_zero() {
                    continue;
                }
                let q = c[k][i].div_floor(&c[j][i]);
                let (head, tail) = c.split_at_mut(k);
                axpy(&mut tail[0], &q, &head[j])?;
                if !c[k][i].is_zero() {
                    clean = false;
                }
            }
            if clean {
                break;
            }
        }
        if c[j][i].is_zero() {
            continue;
        }
        if c[j][i].is_negative() {
            for x in c[j].iter_mut() {
                *x = -x.clone();
            }
        }
        for k in 0..j {
            let q = c[k][i].div_floor(&c[j][i]);
            if q.is_zero() {
                continue;
            }
            let (head, tail) = c.split_at_mut(j);
            axpy(&mut head[k], &q, &tail[0])?;
        }
        j += 1;
    }
    Some(if j < r { None } else { Some(c) })
}

fn widen(cols: &[Vec<i64>]) -> Vec<Vec<i128>> {
    cols.iter().map(|v| v.iter().map(|&x| x as i128).collect()).collect()
}

fn to_big(cols: &[Vec<i64>]) -> Vec<Vec<BigInt>> {
    cols.iter().map(|v| v.iter().map(|&x| BigInt::from(x)).collect()).collect()
}

fn narrow_i128(cols: Vec<Vec<i128>>) -> Result<Vec<Vec<i64>>> {
    cols.into_iter()
        .map(|v| v.into_iter().map(|x| i64::try_from(x).map_err(|_| Error::Overflow("hnf"))).collect())
        .collect()
}

fn narrow_big(cols: Vec<Vec<BigInt>>) -> Result<Vec<Vec<i64>>> {
    cols.into_iter()
        .map(|v| v.into_iter().map(|x| x.to_i64().ok_or(Error::Overflow("hnf"))).collect())
        .collect()
}

/// Canonical basis of the lattice spanned by `cols` (each a vector in Z^d).
///
/// Pivot rows strictly increase from column to column, pivots are positive,
/// and entries of earlier columns in a later pivot row lie in [0, pivot).
pub fn hnf(cols: &[Vec<i64>]) -> Result<Vec<Vec<i64>>> {
    check_shape(cols)?;
    let out = match column_hnf(widen(cols)) {
        Some(res) => narrow_i128(res.ok_or_else(dependent)?)?,
        None => narrow_big(column_hnf(to_big(cols)).expect("no overflow").ok_or_else(dependent)?)?,
    };
    Ok(out)
}

fn dependent() -> Error {
    Error::Degenerate("basis vectors are linearly dependent".into())
}

fn check_shape(cols: &[Vec<i64>]) -> Result<()> {
    let Some(first) = cols.first() else {
        return Err(Error::InvalidArgument("empty basis".into()));
    };
    for c in cols {
        if c.len() != first.len() {
            return Err(Error::DimensionMismatch { expected: first.len(), got: c.len() });
        }
    }
    Ok(())
}

/// Row reduction of the d x r matrix with the inverse transform tracked;
/// the first r columns of the inverse span the saturation.
fn saturate<T: Ring>(cols: Vec<Vec<T>>) -> Option<Option<(Vec<Vec<T>>, T)>> {
    let r = cols.len();
    let d = cols[0].len();
    let mut a: Vec<Vec<T>> = (0..d).map(|i| (0..r).map(|c| cols[c][i].clone()).collect()).collect();
    // w[k] is column k of the inverse transform.
    let mut w: Vec<Vec<T>> = (0..d).map(|k| (0..d).map(|i| if i == k { T::one() } else { T::zero() }).collect()).collect();
    let mut index = T::one();
    for c in 0..r {
        loop {
            let mut best: Option<usize> = None;
            for p in c..d {
                if !a[p][c].is_zero() && best.is_none_or(|b| a[p][c].abs() < a[b][c].abs()) {
                    best = Some(p);
                }
            }
            let Some(b) = best else { return Some(None) };
            a.swap(c, b);
            w.swap(c, b);
            let mut clean = true;
            for q in c + 1..d {
                if a[q][c].is_zero() {
                    continue;
                }
                let f = a[q][c].div_floor(&a[c][c]);
                let (head, tail) = a.split_at_mut(q);
                axpy(&mut tail[0], &f, &head[c])?;
                // row_q -= f row_c  <=>  w_c += f w_q
                let neg = -f;
                let (head, tail) = w.split_at_mut(q);
                axpy(&mut head[c], &neg, &tail[0])?;
                if !a[q][c].is_zero() {
                    clean = false;
                }
            }
            if clean {
                break;
            }
        }
        index = index.checked_mul(&a[c][c].abs())?;
    }
    w.truncate(r);
    Some(Some((w, index)))
}

/// Basis of (span_Q cols) ∩ Z^d in HNF, and the index of the input lattice in it.
pub fn saturation(cols: &[Vec<i64>]) -> Result<(Vec<Vec<i64>>, u64)> {
    check_shape(cols)?;
    let (basis, index) = match saturate(widen(cols)) {
        Some(res) => {
            let (b, i) = res.ok_or_else(dependent)?;
            (narrow_i128(b)?, u64::try_from(i).map_err(|_| Error::Overflow("saturation"))?)
        }
        None => {
            let (b, i) = saturate(to_big(cols)).expect("no overflow").ok_or_else(dependent)?;
            (narrow_big(b)?, i.to_u64().ok_or(Error::Overflow("saturation"))?)
        }
    };
    Ok((hnf(&basis)?, index))
}

/// A rank-r sublattice in canonical coordinates.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SublatticeHNF {
    pub d: usize,
    pub r: usize,
    /// r columns, each a vector in Z^d.
    pub basis: Vec<Vec<i64>>,
    pub disc: BigInt,
    pub primitive: bool,
    pub index: u64,
}

impl SublatticeHNF {
    pub fn from_basis(l: &QuadraticLattice, cols: &[Vec<i64>]) -> Result<Self> {
        check_shape(cols)?;
        if cols[0].len() != l.rank() {
            return Err(Error::DimensionMismatch { expected: l.rank(), got: cols[0].len() });
        }
        let basis = hnf(cols)?;
        let (_, index) = saturation(&basis)?;
        let disc = discriminant(l, &VectorTuple::new(basis.clone()))?;
        Ok(SublatticeHNF { d: l.rank(), r: basis.len(), basis, disc, primitive: index == 1, index })
    }

    pub fn from_tuple(l: &QuadraticLattice, t: &VectorTuple) -> Result<Self> {
        Self::from_basis(l, &t.vectors)
    }

    pub fn tuple(&self) -> VectorTuple {
        VectorTuple::new(self.basis.clone())
    }

    pub fn disc_u64(&self) -> Option<u64> {
        self.disc.to_u64()
    }
}

/// The saturation of `s` and the index of `s` in it.
pub fn primitive_closure(l: &QuadraticLattice, s: &SublatticeHNF) -> Result<(SublatticeHNF, u64)> {
    let (basis, index) = saturation(&s.basis)?;
    let sat = SublatticeHNF::from_basis(l, &basis)?;
    debug_assert!(sat.primitive);
    Ok((sat, index))
}

/// gcd of all r x r minors of the basis matrix, for r <= 2 without
/// building the saturation.
pub fn minor_gcd_rank2(u: &[i64], v: &[i64]) -> i64 {
    let mut g = 0i64;
    for i in 0..u.len() {
        for j in i + 1..u.len() {
            g = num_integer::gcd(g, u[i] * v[j] - u[j] * v[i]);
            if g == 1 {
                return 1;
            }
        }
    }
    g
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cols(v: &[&[i64]]) -> Vec<Vec<i64>> {
        v.iter().map(|c| c.to_vec()).collect()
    }

    #[test]
    fn hnf_shapes() {
        assert_eq!(hnf(&cols(&[&[1, 1], &[1, -1]])).unwrap(), cols(&[&[1, 1], &[0, 2]]));
        assert_eq!(hnf(&cols(&[&[0, 3], &[0, 5]])).unwrap_err(), dependent());
        assert_eq!(hnf(&cols(&[&[0, -2, 4]])).unwrap(), cols(&[&[0, 2, -4]]));
    }

    #[test]
    fn closure_examples() {
        let z2 = QuadraticLattice::standard(2);
        let s = SublatticeHNF::from_basis(&z2, &cols(&[&[2, 0]])).unwrap();
        let (sat, idx) = primitive_closure(&z2, &s).unwrap();
        assert_eq!((sat.basis.clone(), idx), (cols(&[&[1, 0]]), 2));
        let s = SublatticeHNF::from_basis(&z2, &cols(&[&[1, 1], &[1, -1]])).unwrap();
        let (sat, idx) = primitive_closure(&z2, &s).unwrap();
        assert_eq!((sat.basis.clone(), idx), (cols(&[&[1, 0], &[0, 1]]), 2));
        assert_eq!(s.disc, BigInt::from(4) * sat.disc.clone());
        let p = SublatticeHNF::from_basis(&z2, &cols(&[&[1, 2]])).unwrap();
        assert!(p.primitive);
        assert_eq!(primitive_closure(&z2, &p).unwrap(), (p.clone(), 1));
    }

    #[test]
    fn rank2_minor_gcd() {
        assert_eq!(minor_gcd_rank2(&[1, 1, 0], &[1, -1, 0]), 2);
        assert_eq!(minor_gcd_rank2(&[1, 0, 0], &[0, 1, 0]), 1);
    }
}
