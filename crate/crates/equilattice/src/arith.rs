//! Small exact-arithmetic helpers shared by the lattice and density code.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{CheckedDiv, CheckedMul, CheckedSub, One, Signed, ToPrimitive, Zero};

/// Fraction-free Gaussian elimination. Returns `None` if an intermediate
/// product does not fit in `T`.
fn bareiss<T>(mut m: Vec<Vec<T>>) -> Option<T>
where
    T: Clone + Zero + One + PartialEq + CheckedMul + CheckedSub + CheckedDiv + std::ops::Neg<Output = T>,
{
    let n = m.len();
    if n == 0 {
        return Some(T::one());
    }
    let mut sign_flip = false;
    let mut prev = T::one();
    for k in 0..n {
        if m[k][k].is_zero() {
            let swap = (k + 1..n).find(|&i| !m[i][k].is_zero());
            match swap {
                Some(i) => {
                    m.swap(k, i);
                    sign_flip = !sign_flip;
                }
                None => return Some(T::zero()),
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let a = m[i][j].checked_mul(&m[k][k])?;
                let b = m[i][k].checked_mul(&m[k][j])?;
                m[i][j] = a.checked_sub(&b)?.checked_div(&prev)?;
            }
        }
        prev = m[k][k].clone();
    }
    let det = m[n - 1][n - 1].clone();
    Some(if sign_flip { -det } else { det })
}

/// Exact determinant; 128-bit fast path, arbitrary precision on overflow.
pub fn det_exact(m: &[Vec<i64>]) -> BigInt {
    let small: Vec<Vec<i128>> = m.iter().map(|r| r.iter().map(|&x| x as i128).collect()).collect();
    if let Some(d) = bareiss(small) {
        return BigInt::from(d);
    }
    let big: Vec<Vec<BigInt>> = m.iter().map(|r| r.iter().map(|&x| BigInt::from(x)).collect()).collect();
    bareiss(big).expect("arbitrary precision cannot overflow")
}

pub fn det_i128(m: &[Vec<i128>]) -> Option<i128> {
    bareiss(m.to_vec())
}

pub fn det_rational(m: &[Vec<BigRational>]) -> BigRational {
    let n = m.len();
    let mut a = m.to_vec();
    let mut det = BigRational::one();
    for k in 0..n {
        let Some(p) = (k..n).find(|&i| !a[i][k].is_zero()) else {
            return BigRational::zero();
        };
        if p != k {
            a.swap(p, k);
            det = -det;
        }
        let piv = a[k][k].clone();
        det *= piv.clone();
        for i in k + 1..n {
            if a[i][k].is_zero() {
                continue;
            }
            let f = a[i][k].clone() / piv.clone();
            for j in k..n {
                let t = f.clone() * a[k][j].clone();
                a[i][j] -= t;
            }
        }
    }
    det
}

/// Floor of the square root.
pub fn isqrt(n: u128) -> u128 {
    if n < 2 {
        return n;
    }
    let mut x = (n as f64).sqrt() as u128;
    while x.checked_mul(x).is_none_or(|s| s > n) {
        x -= 1;
    }
    while (x + 1).checked_mul(x + 1).is_some_and(|s| s <= n) {
        x += 1;
    }
    x
}

pub fn floor_div(a: i128, b: i128) -> i128 {
    let q = a / b;
    if (a % b != 0) && ((a < 0) != (b < 0)) {
        q - 1
    } else {
        q
    }
}

pub fn ceil_div(a: i128, b: i128) -> i128 {
    -floor_div(-a, b)
}

pub fn gcd_i64(a: i64, b: i64) -> i64 {
    num_integer::gcd(a, b)
}

pub fn to_f64(x: &BigRational) -> f64 {
    x.to_f64().unwrap_or(f64::NAN)
}

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut p = 2;
    while p * p <= n {
        if n.is_multiple_of(p) {
            return false;
        }
        p += 1;
    }
    true
}

pub fn primes_up_to(n: u64) -> Vec<u64> {
    (2..=n).filter(|&p| is_prime(p)).collect()
}

pub fn prime_factors(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut p = 2;
    while p * p <= n {
        if n.is_multiple_of(p) {
            out.push(p);
            while n.is_multiple_of(p) {
                n /= p;
            }
        }
        p += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

pub fn prime_factors_big(n: &BigInt) -> Vec<u64> {
    let n = n.abs();
    match n.to_u64() {
        Some(v) if v > 0 => prime_factors(v),
        _ => Vec::new(),
    }
}

pub fn is_squarefree(n: u64) -> bool {
    let mut p = 2;
    let mut m = n;
    while p * p <= m {
        if m.is_multiple_of(p * p) {
            return false;
        }
        if m.is_multiple_of(p) {
            m /= p;
        }
        p += 1;
    }
    true
}

pub fn divisors(n: u64) -> Vec<u64> {
    let mut small = Vec::new();
    let mut large = Vec::new();
    let mut d = 1;
    while d * d <= n {
        if n.is_multiple_of(d) {
            small.push(d);
            if d * d != n {
                large.push(n / d);
            }
        }
        d += 1;
    }
    large.reverse();
    small.extend(large);
    small
}

pub fn sigma1(n: u64) -> u64 {
    divisors(n).iter().sum()
}

/// Squarefree divisors of `n` paired with their Moebius value.
pub fn moebius_divisors(n: u64) -> Vec<(u64, i64)> {
    let mut out = vec![(1u64, 1i64)];
    for p in prime_factors(n) {
        let ext: Vec<_> = out.iter().map(|&(d, m)| (d * p, -m)).collect();
        out.extend(ext);
    }
    out
}
