//! Haar-random orthogonal matrices.

use nalgebra::DMatrix;
use rand::Rng;
use rand_distr::StandardNormal;

/// Haar-distributed element of O(n): QR of a Gaussian matrix with the
/// signs of diag(R) moved into Q.
pub fn haar_orthogonal<R: Rng + ?Sized>(n: usize, rng: &mut R) -> DMatrix<f64> {
    gaussian_frame(n, n, rng)
}

/// Haar-distributed element of SO(n).
pub fn haar_special_orthogonal<R: Rng + ?Sized>(n: usize, rng: &mut R) -> DMatrix<f64> {
    let mut q = haar_orthogonal(n, rng);
    if q.determinant() < 0.0 {
        q.column_mut(0).neg_mut();
    }
    q
}

/// First k columns of a Haar element of O(n).
pub fn gaussian_frame<R: Rng + ?Sized>(n: usize, k: usize, rng: &mut R) -> DMatrix<f64> {
    let g = DMatrix::from_fn(n, k, |_, _| rng.sample::<f64, _>(StandardNormal));
    let qr = g.qr();
    let mut q = qr.q();
    let r = qr.r();
    for j in 0..k {
        if r[(j, j)] < 0.0 {
            q.column_mut(j).neg_mut();
        }
    }
    q
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn orthogonal_and_oriented() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for n in 1..6 {
            let q = haar_special_orthogonal(n, &mut rng);
            let e = (&q.transpose() * &q - DMatrix::identity(n, n)).abs().max();
            assert!(e < 1e-12);
            assert!((q.determinant() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn first_entry_is_symmetric() {
        // E[q_00] = 0 and E[q_00^2] = 1/n under Haar measure.
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let (n, m) = (3, 20000);
        let (mut s, mut s2) = (0.0, 0.0);
        for _ in 0..m {
            let q = haar_orthogonal(n, &mut rng);
            s += q[(0, 0)];
            s2 += q[(0, 0)] * q[(0, 0)];
        }
        assert!((s / m as f64).abs() < 0.02);
        assert!((s2 / m as f64 - 1.0 / 3.0).abs() < 0.01);
    }
}
