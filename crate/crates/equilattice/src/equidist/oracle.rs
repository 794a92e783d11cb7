//! Monte-Carlo oracles for the limit measures.

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::grassmann::GrassmannPoint;
use super::window::{TupleWindow, Window};
use crate::enumerate::default_majorant;
use crate::error::{Error, Result};
use crate::lattice::QuadraticLattice;
use crate::parallel::map_indices;
use crate::quadrature::haar::gaussian_frame;

const CHUNK: u64 = 1 << 15;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OracleEstimate {
    pub estimate: f64,
    pub stderr: f64,
    pub samples: u64,
}

/// Sampling is split into fixed-size chunks, chunk i drawing from stream i
/// of the seeded generator, so estimates do not depend on the thread count.
fn sample_mean<F>(samples: u64, seed: u64, f: F) -> Result<(f64, f64)>
where
    F: Fn(&mut ChaCha8Rng) -> f64 + Sync,
{
    if samples == 0 {
        return Err(Error::InvalidArgument("zero samples".into()));
    }
    let chunks = samples.div_ceil(CHUNK) as usize;
    let parts = map_indices(chunks, |c| {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(c as u64);
        let len = CHUNK.min(samples - c as u64 * CHUNK);
        let (mut s, mut s2) = (0.0, 0.0);
        for _ in 0..len {
            let v = f(&mut rng);
            s += v;
            s2 += v * v;
        }
        (s, s2)
    });
    let (s, s2) = parts.iter().fold((0.0, 0.0), |(a, b), (x, y)| (a + x, b + y));
    let m = samples as f64;
    let mean = s / m;
    let var = (s2 / m - mean * mean).max(0.0);
    Ok((mean, (var / m).sqrt()))
}

fn quad(m: &[Vec<f64>], x: &[f64]) -> f64 {
    let mut s = 0.0;
    for i in 0..x.len() {
        let mut row = 0.0;
        for j in 0..x.len() {
            row += m[i][j] * x[j];
        }
        s += x[i] * row;
    }
    s
}

fn gram_det(gram: &[Vec<f64>], t: &[Vec<f64>]) -> (bool, f64) {
    let r = t.len();
    let g = DMatrix::from_fn(r, r, |i, j| {
        let mut s = 0.0;
        for (a, row) in gram.iter().enumerate() {
            for (b, x) in row.iter().enumerate() {
                s += t[i][a] * x * t[j][b];
            }
        }
        s
    });
    match g.clone().cholesky() {
        Some(_) => (true, g.determinant()),
        None => (false, 0.0),
    }
}

/// Half-widths of the bounding box of the ellipsoid {x : M(x) <= rho^2}.
fn box_half_widths(m: &[Vec<f64>], rho: f64) -> Result<Vec<f64>> {
    let d = m.len();
    let inv = DMatrix::from_fn(d, d, |i, j| m[i][j]).try_inverse().ok_or(Error::Singular)?;
    Ok((0..d).map(|i| rho * inv[(i, i)].max(0.0).sqrt()).collect())
}

fn to_f64(m: &[Vec<i64>]) -> Vec<Vec<f64>> {
    m.iter().map(|r| r.iter().map(|&x| x as f64).collect()).collect()
}

/// Lebesgue measure (Z^d of covolume 1) of {v : B(v, v) <= 1, pr(v) in
/// window} for positive definite L and r = 1.
pub fn oracle_limit_measure(l: &QuadraticLattice, r: usize, window: &Window, samples: u64, seed: u64) -> Result<OracleEstimate> {
    if r != 1 {
        return Err(Error::Unsupported("for r >= 2 the full-space measure is infinite; use a tuple window".into()));
    }
    if !l.is_positive_definite() {
        return Err(Error::NotPositiveDefinite);
    }
    let b = to_f64(l.gram());
    let half = box_half_widths(&b, 1.0)?;
    let vol: f64 = half.iter().map(|h| 2.0 * h).product();
    let empty = window.is_empty();
    let (mean, se) = sample_mean(samples, seed, |rng| {
        let x: Vec<f64> = half.iter().map(|h| rng.random_range(-*h..*h)).collect();
        let q = quad(&b, &x);
        if empty || q > 1.0 || q <= 0.0 {
            return 0.0;
        }
        let s = q.sqrt().recip();
        let p = [x.iter().map(|v| v * s).collect::<Vec<_>>()];
        window.value_vectors(&p).unwrap_or(0.0)
    })?;
    Ok(OracleEstimate { estimate: vol * mean, stderr: vol * se, samples })
}

/// Lebesgue measure of {v in Omega : h(v) <= 1, M(pr(v)_i) <= R^2, pr(v) in
/// region} for any signature.
pub fn oracle_limit_measure_windowed(l: &QuadraticLattice, r: usize, w: &TupleWindow, samples: u64, seed: u64) -> Result<OracleEstimate> {
    if r == 0 || r > l.rank() {
        return Err(Error::InvalidArgument(format!("r = {r}")));
    }
    if !(w.radius.is_finite() && w.radius > 0.0) {
        return Err(Error::InvalidArgument("window radius must be positive and finite".into()));
    }
    let b = to_f64(l.gram());
    let m = to_f64(&w.majorant.clone().unwrap_or_else(|| default_majorant(l)));
    // h <= 1 and M(pr_i) <= R^2 force M(v_i) <= R^2.
    let half = box_half_widths(&m, w.radius)?;
    let d = l.rank();
    let vol: f64 = half.iter().map(|h| 2.0 * h).product::<f64>().powi(r as i32);
    let r2 = w.radius * w.radius;
    let (mean, se) = sample_mean(samples, seed, |rng| {
        let t: Vec<Vec<f64>> = (0..r).map(|_| half.iter().map(|h| rng.random_range(-*h..*h)).collect()).collect();
        let (pd, h) = gram_det(&b, &t);
        if !pd || h > 1.0 {
            return 0.0;
        }
        let s = h.powf(-0.5 / r as f64);
        let p: Vec<Vec<f64>> = t.iter().map(|v| v.iter().map(|x| x * s).collect()).collect();
        if p.iter().any(|u| quad(&m, u) > r2) {
            return 0.0;
        }
        w.region.value_vectors(&p).unwrap_or(0.0)
    })?;
    debug_assert_eq!(half.len(), d);
    Ok(OracleEstimate { estimate: vol * mean, stderr: vol * se, samples })
}

/// Mass of the window under the O(d)-invariant probability measure on the
/// Grassmannian of r-planes in R^d.
pub fn grassmann_haar_oracle(d: usize, r: usize, window: &Window, samples: u64, seed: u64) -> Result<OracleEstimate> {
    if r == 0 || r > d {
        return Err(Error::InvalidArgument(format!("Gr({r}, {d})")));
    }
    let (mean, se) = sample_mean(samples, seed, |rng| {
        let q = gaussian_frame(d, r, rng);
        let cols: Vec<Vec<f64>> = (0..r).map(|j| q.column(j).iter().copied().collect()).collect();
        GrassmannPoint::from_vectors(&cols).and_then(|g| window.value_projector(&g)).unwrap_or(0.0)
    })?;
    Ok(OracleEstimate { estimate: mean, stderr: se, samples })
}

/// Mass of the window under the O(B)-invariant probability measure on
/// r-planes, for positive definite L: spans of B^{-1/2} X with X Gaussian.
pub fn invariant_plane_oracle(l: &QuadraticLattice, r: usize, window: &Window, samples: u64, seed: u64) -> Result<OracleEstimate> {
    let d = l.rank();
    if r == 0 || r > d {
        return Err(Error::InvalidArgument(format!("Gr({r}, {d})")));
    }
    if !l.is_positive_definite() {
        return Err(Error::NotPositiveDefinite);
    }
    let b = DMatrix::from_fn(d, d, |i, j| l.gram()[i][j] as f64);
    let eig = nalgebra::SymmetricEigen::new(b);
    let inv_sqrt = &eig.eigenvectors * DMatrix::from_diagonal(&eig.eigenvalues.map(|x| 1.0 / x.sqrt())) * eig.eigenvectors.transpose();
    let (mean, se) = sample_mean(samples, seed, |rng| {
        let q = &inv_sqrt * gaussian_frame(d, r, rng);
        let cols: Vec<Vec<f64>> = (0..r).map(|j| q.column(j).iter().copied().collect()).collect();
        GrassmannPoint::from_vectors(&cols).and_then(|g| window.value_projector(&g)).unwrap_or(0.0)
    })?;
    Ok(OracleEstimate { estimate: mean, stderr: se, samples })
}

/// Volume of the Euclidean unit ball in R^d.
pub fn unit_ball_volume(d: usize) -> f64 {
    match d {
        0 => 1.0,
        1 => 2.0,
        _ => 2.0 * std::f64::consts::PI / d as f64 * unit_ball_volume(d - 2),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn full_window_is_ball_volume() {
        for d in [2, 3, 4] {
            let e = oracle_limit_measure(&QuadraticLattice::standard(d), 1, &Window::All, 200_000, 1).unwrap();
            let v = unit_ball_volume(d);
            assert!((e.estimate - v).abs() < 4.0 * e.stderr, "d={d}: {e:?} vs {v}");
        }
        assert!((unit_ball_volume(4) - std::f64::consts::PI.powi(2) / 2.0).abs() < 1e-15);
    }

    #[test]
    fn empty_and_complement() {
        let l = QuadraticLattice::standard(3);
        assert_eq!(oracle_limit_measure(&l, 1, &Window::Empty, 1000, 3).unwrap().estimate, 0.0);
        let w = Window::cap(vec![1.0, 2.0, 0.0], 0.9);
        let a = oracle_limit_measure(&l, 1, &w, 100_000, 3).unwrap();
        let b = oracle_limit_measure(&l, 1, &Window::Not { inner: Box::new(w) }, 100_000, 3).unwrap();
        let all = oracle_limit_measure(&l, 1, &Window::All, 100_000, 3).unwrap();
        // same seed: the samples coincide, so the sum is exact
        assert!((a.estimate + b.estimate - all.estimate).abs() < 1e-12);
        assert!(oracle_limit_measure(&l, 1, &Window::All, 0, 3).is_err());
    }

    #[test]
    fn deterministic() {
        let l = QuadraticLattice::standard(4);
        let w = Window::cap(vec![1.0, 0.0, 0.0, 0.0], 0.5);
        let a = oracle_limit_measure(&l, 1, &w, 70_000, 9).unwrap();
        let b = oracle_limit_measure(&l, 1, &w, 70_000, 9).unwrap();
        assert_eq!(a.estimate.to_bits(), b.estimate.to_bits());
    }

    #[test]
    fn grassmann_oracle() {
        let all = grassmann_haar_oracle(4, 2, &Window::All, 1000, 0).unwrap();
        assert_eq!(all.estimate, 1.0);
        let half = Window::ProjectorBox { i: 0, j: 1, lo: 0.0, hi: 1.0 };
        let e = grassmann_haar_oracle(2, 1, &half, 100_000, 0).unwrap();
        assert!((e.estimate - 0.5).abs() < 4.0 * e.stderr);
        // projective cap of half-angle t in Gr(1, 3) has mass 1 - cos t
        let t = 0.6f64;
        let e = grassmann_haar_oracle(3, 1, &Window::ProjectorCap { center: vec![0.0, 0.0, 1.0], half_angle: t }, 200_000, 5).unwrap();
        assert!((e.estimate - (1.0 - t.cos())).abs() < 4.0 * e.stderr);
    }

    #[test]
    fn invariant_oracle_reduces_to_haar() {
        let w = Window::ProjectorCap { center: vec![1.0, 0.0, 0.0], half_angle: 0.7 };
        let a = invariant_plane_oracle(&QuadraticLattice::standard(3), 2, &w, 50_000, 4).unwrap();
        let b = grassmann_haar_oracle(3, 2, &w, 50_000, 4).unwrap();
        assert!((a.estimate - b.estimate).abs() < 5.0 * (a.stderr + b.stderr));
    }

    #[test]
    fn windowed_oracle_on_indefinite() {
        let l = QuadraticLattice::hyperbolic_plane();
        let w = TupleWindow { majorant: None, radius: 2.0, region: Window::All };
        let e = oracle_limit_measure_windowed(&l, 1, &w, 100_000, 2).unwrap();
        assert!(e.estimate > 0.0 && e.estimate.is_finite());
    }
}
