//! The pull-push form π_*p^*ω_{G/H} as an average over the fiber K/L,
//! and the vanishing / non-vanishing criteria.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::exterior::{AlternatingForm, MultiVector, Space};
use super::lie::LieConfiguration;
use super::linalg::{coords, hcat, rank};
use crate::parallel::map_indices;
use crate::quadrature::circle::CircleRule;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "method", rename_all = "snake_case")]
pub enum FiberQuadrature {
    Trapezoid { nodes: usize },
    GaussLegendre { nodes: usize },
    /// Uniform (Haar) samples on the fiber torus.
    MonteCarlo { samples: usize, seed: u64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct PullPushOptions {
    pub quadrature: FiberQuadrature,
    /// ω_{G/H} is taken as this multiple of the Killing volume form.
    pub omega_scale: f64,
    /// Random elements of K used for the invariance check.
    pub invariance_samples: usize,
    pub seed: u64,
}

impl Default for PullPushOptions {
    fn default() -> Self {
        PullPushOptions {
            quadrature: FiberQuadrature::Trapezoid { nodes: 64 },
            omega_scale: 1.0,
            invariance_samples: 50,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone)]
pub struct PullPushResult {
    /// Form on g/k in the coordinates of the oriented basis `config.m`.
    pub form: AlternatingForm<f64>,
    pub nodes: usize,
    pub fiber_volume: f64,
    /// Coefficient-norm difference to the half-size rule (exact rules) or
    /// the standard error (Monte Carlo).
    pub quadrature_error: f64,
    /// Largest coefficient change under Ad_k for random k ∈ K.
    pub k_invariance_defect: f64,
    /// k/l ⊥ h/l under the Killing form.
    pub lambda_one: bool,
}

/// p^*ω_{G/H} as a form on g/l (coordinates of the basis (a, m)).
pub fn pullback_volume_form(cfg: &LieConfiguration, scale: f64) -> Result<AlternatingForm<f64>> {
    let q = cfg.g_h.comp_coords(&cfg.g_l.comp);
    let p = cfg.n.ncols();
    let c = cfg.omega_gh_basis * scale;
    AlternatingForm::from_fn(Space::GModL, q.ncols(), p, |idx| {
        let sub = DMatrix::from_fn(p, p, |i, j| q[(i, idx[j])]);
        sub.determinant() * c
    })
}

/// u = T_1 ∧ … ∧ T_s on g/l, so that ω_{K/L}(u) = 1.
pub fn fiber_multivector(cfg: &LieConfiguration) -> Result<MultiVector<f64>> {
    let d = cfg.dim_quotient(Space::GModL);
    let s = cfg.a.ncols();
    MultiVector::from_fn(Space::GModL, d, s, |idx| if idx.iter().copied().eq(0..s) { 1.0 } else { 0.0 })
}

/// Pull-back of a form on g/l, g/k or g/h along the map induced by an
/// adjoint matrix on g, which must preserve the quotiented subspace.
pub fn adjoint_pullback<S: super::exterior::Scalar>(
    cfg: &LieConfiguration,
    alpha: &AlternatingForm<S>,
    ad: &DMatrix<f64>,
) -> Result<AlternatingForm<S>> {
    if ad.shape() != (cfg.dim, cfg.dim) {
        return Err(Error::DimensionMismatch { expected: cfg.dim, got: ad.nrows() });
    }
    let induced = cfg.split(alpha.space)?.induced(ad)?;
    alpha.pullback(&induced)
}

fn check_compact(cfg: &LieConfiguration) -> Result<()> {
    if cfg.k.ncols() == 0 {
        return Ok(());
    }
    let g = cfg.k.transpose() * &cfg.killing * &cfg.k;
    let eig = g.symmetric_eigen().eigenvalues;
    if eig.iter().any(|&e| e >= 0.0) {
        return Err(Error::Validation("K is not compact: Killing form not negative definite on k".into()));
    }
    Ok(())
}

fn nodes(cfg: &LieConfiguration, q: &FiberQuadrature, coarse: bool) -> Vec<(Vec<f64>, f64)> {
    let rule = match *q {
        FiberQuadrature::Trapezoid { nodes } => CircleRule::Trapezoid { nodes: if coarse { (nodes / 2).max(1) } else { nodes } },
        FiberQuadrature::GaussLegendre { nodes } => {
            CircleRule::GaussLegendre { nodes: if coarse { (nodes / 2).max(1) } else { nodes } }
        }
        FiberQuadrature::MonteCarlo { samples, seed } => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let w = 1.0 / samples as f64;
            return (0..samples)
                .map(|_| (cfg.periods.iter().map(|&p| rng.random::<f64>() * p).collect(), w))
                .collect();
        }
    };
    rule.torus(&cfg.periods)
}

/// Per-node coefficient vectors of Ad_k^*(ι_u p^*ω_{G/H}) on g/l.
fn integrand(cfg: &LieConfiguration, beta: &AlternatingForm<f64>, pts: &[(Vec<f64>, f64)]) -> Result<Vec<Vec<f64>>> {
    map_indices(pts.len(), |i| {
        let ad = cfg.torus_element(&cfg.a, &pts[i].0);
        adjoint_pullback(cfg, beta, &ad).map(|f| f.coefficients().to_vec())
    })
    .into_iter()
    .collect()
}

fn weighted_sum(values: &[Vec<f64>], pts: &[(Vec<f64>, f64)], len: usize) -> Vec<f64> {
    let mut acc = vec![0.0; len];
    for (v, (_, w)) in values.iter().zip(pts) {
        for (a, x) in acc.iter_mut().zip(v) {
            *a += w * x;
        }
    }
    acc
}

/// Restricts a form on g/l to the m-coordinates, giving a form on g/k.
fn to_g_mod_k(cfg: &LieConfiguration, on_gl: &AlternatingForm<f64>) -> Result<AlternatingForm<f64>> {
    let s = cfg.a.ncols();
    AlternatingForm::from_fn(Space::GModK, cfg.m.ncols(), on_gl.degree(), |idx| {
        let shifted: Vec<usize> = idx.iter().map(|i| i + s).collect();
        on_gl.get(&shifted)
    })
}

/// π_*p^*ω_{G/H} = ∫_{K/L} Ad_k^*(ι_u p^*ω_{G/H}) dω_{K/L}(k), on g/k.
pub fn pull_push(cfg: &LieConfiguration, opts: &PullPushOptions) -> Result<PullPushResult> {
    check_compact(cfg)?;
    let alpha = pullback_volume_form(cfg, opts.omega_scale)?;
    let beta = alpha.contract(&fiber_multivector(cfg)?)?;
    let vol = cfg.fiber_volume();
    let len = beta.coefficients().len();
    let pts = nodes(cfg, &opts.quadrature, false);
    if pts.is_empty() {
        return Err(Error::InvalidArgument("quadrature with no nodes".into()));
    }
    let vals = integrand(cfg, &beta, &pts)?;
    let mean = weighted_sum(&vals, &pts, len);
    let quadrature_error = match opts.quadrature {
        FiberQuadrature::MonteCarlo { samples, .. } => {
            let var: f64 = vals
                .iter()
                .map(|v| v.iter().zip(&mean).map(|(x, m)| (x - m).powi(2)).sum::<f64>())
                .sum::<f64>()
                / (samples.max(2) - 1) as f64;
            vol * (var / samples as f64).sqrt()
        }
        _ => {
            let coarse = nodes(cfg, &opts.quadrature, true);
            let cm = weighted_sum(&integrand(cfg, &beta, &coarse)?, &coarse, len);
            vol * mean.iter().zip(&cm).map(|(a, b)| (a - b).powi(2)).sum::<f64>().sqrt()
        }
    };
    let mut on_gl = beta.scale(0.0);
    for (i, sub) in beta.subsets().iter().enumerate() {
        on_gl.set(sub, vol * mean[i]);
    }
    let form = to_g_mod_k(cfg, &on_gl)?;

    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut defect: f64 = 0.0;
    for _ in 0..opts.invariance_samples {
        let ad = random_k(cfg, &mut rng);
        let moved = adjoint_pullback(cfg, &form, &ad)?;
        let d = moved.sub(&form)?.coefficients().iter().fold(0.0f64, |m, x| m.max(x.abs()));
        defect = defect.max(d);
    }
    let lambda_one = (cfg.a.transpose() * &cfg.killing * &cfg.b).amax() <= 1e-9 * cfg.killing.amax();
    Ok(PullPushResult {
        form,
        nodes: pts.len(),
        fiber_volume: vol,
        quadrature_error,
        k_invariance_defect: defect,
        lambda_one,
    })
}

/// Ad of a random element of K: a point of the K-net torus, of the fiber
/// torus, and exp of a random element of l.
pub fn random_k(cfg: &LieConfiguration, rng: &mut ChaCha8Rng) -> DMatrix<f64> {
    let (g, p) = &cfg.k_net;
    let t1: Vec<f64> = p.iter().map(|&x| rng.random::<f64>() * x).collect();
    let t2: Vec<f64> = cfg.periods.iter().map(|&x| rng.random::<f64>() * x).collect();
    let mut y = DVector::zeros(cfg.dim);
    for c in cfg.l.column_iter() {
        y += c * (rng.random::<f64>() * 2.0 - 1.0) * std::f64::consts::PI;
    }
    cfg.torus_element(g, &t1) * cfg.torus_element(&cfg.a, &t2) * cfg.exp_ad(&y)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VanishingWitness {
    /// Angles on the K-net torus.
    pub angles: Vec<f64>,
    /// Determinant of Ad_k on h/l.
    pub determinant: f64,
}

/// Searches a net of the K-net torus for k with Ad_k(h) = h reversing the
/// orientation of h/l.
pub fn vanishing_criterion_check(cfg: &LieConfiguration, nodes_per_circle: usize) -> Option<VanishingWitness> {
    if cfg.b.ncols() == 0 {
        return None;
    }
    let (g, p) = &cfg.k_net;
    let lb = hcat(&cfg.l, &cfg.b);
    let dl = cfg.l.ncols();
    for (angles, _) in (CircleRule::Trapezoid { nodes: nodes_per_circle }).torus(p) {
        let ad = cfg.torus_element(g, &angles);
        let image = &ad * &cfg.b;
        let mut m = DMatrix::zeros(cfg.b.ncols(), cfg.b.ncols());
        let mut inside = true;
        for (j, col) in image.column_iter().enumerate() {
            let (c, r) = coords(&lb, &col.into_owned());
            if r > 1e-8 {
                inside = false;
                break;
            }
            for i in 0..cfg.b.ncols() {
                m[(i, j)] = c[dl + i];
            }
        }
        if !inside || cfg.g_h.comp_coords(&(&ad * &cfg.h)).amax() > 1e-8 {
            continue;
        }
        let d = m.determinant();
        if d < -1e-8 {
            return Some(VanishingWitness { angles, determinant: d });
        }
    }
    None
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComplexNonvanishingReport {
    /// Pull-push on w_1 ∧ Jw_1 ∧ … for a J-stable complement of h/l in g/k.
    pub value: f64,
    /// Value on a multivector containing a complex line of h/l (≥ 0).
    pub value_meeting_h_l: Option<f64>,
    /// Complexified form on (v_1, v̄_1, …) with v = w − iJw, and on the
    /// conjugate multivector.
    pub complex_value: [f64; 2],
    pub conjugate_value: [f64; 2],
    pub positive: bool,
}

/// Checks the invariant complex structure and evaluates the pull-push form
/// on a complex complement of h/l.
pub fn complex_nonvanishing_check(cfg: &LieConfiguration, pp: &PullPushResult) -> Result<ComplexNonvanishingReport> {
    let j = cfg.j.as_ref().ok_or_else(|| Error::Validation("configuration has no complex structure".into()))?;
    let dm = cfg.m.ncols();
    let bk = cfg.g_k.comp_coords(&cfg.b);
    let jb = j * &bk;
    for c in jb.column_iter() {
        if coords(&bk, &c.into_owned()).1 > 1e-8 {
            return Err(Error::Validation("h/l is not J-stable".into()));
        }
    }
    let mut chosen: Vec<DVector<f64>> = bk.column_iter().map(|c| c.into_owned()).collect();
    let mut complement: Vec<DVector<f64>> = Vec::new();
    for i in 0..dm {
        let mut w = DVector::zeros(dm);
        w[i] = 1.0;
        let jw = j * &w;
        let mut trial = chosen.clone();
        trial.push(w.clone());
        trial.push(jw.clone());
        if rank(&DMatrix::from_columns(&trial)) == trial.len() {
            chosen = trial;
            complement.push(w);
            complement.push(jw);
        }
    }
    if complement.len() != pp.form.degree() {
        return Err(Error::Validation(format!(
            "complex complement of dimension {} for a form of degree {}",
            complement.len(),
            pp.form.degree()
        )));
    }
    let as_vec = |v: &DVector<f64>| v.iter().copied().collect::<Vec<f64>>();
    let value = pp.form.evaluate(&complement.iter().map(as_vec).collect::<Vec<_>>())?;
    let value_meeting_h_l = if bk.ncols() >= 2 && complement.len() >= 2 {
        let mut vs: Vec<Vec<f64>> = complement.iter().map(as_vec).collect();
        vs[0] = as_vec(&bk.column(0).into_owned());
        vs[1] = as_vec(&jb.column(0).into_owned());
        Some(pp.form.evaluate(&vs)?)
    } else {
        None
    };
    let fc = pp.form.complexify();
    let i = Complex64::new(0.0, 1.0);
    let mut holo = Vec::new();
    let mut conj = Vec::new();
    for pair in complement.chunks(2) {
        let v: Vec<Complex64> = pair[0].iter().zip(pair[1].iter()).map(|(&a, &b)| a - i * b).collect();
        let vb: Vec<Complex64> = v.iter().map(|z| z.conj()).collect();
        holo.push(v.clone());
        holo.push(vb.clone());
        conj.push(vb);
        conj.push(v);
    }
    let cv = fc.evaluate(&holo)?;
    let ccv = fc.evaluate(&conj)?;
    let tol = 1e-9 * pp.form.norm().max(1e-300);
    Ok(ComplexNonvanishingReport {
        value,
        value_meeting_h_l,
        complex_value: [cv.re, cv.im],
        conjugate_value: [ccv.re, ccv.im],
        positive: value > tol,
    })
}
