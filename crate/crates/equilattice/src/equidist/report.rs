//! Finite-n convergence tables against the oracles.

use serde::{Deserialize, Serialize};

use super::counting::rank1_window_counts;
use super::grassmann::project_sublattice;
use super::oracle::{invariant_plane_oracle, oracle_limit_measure, OracleEstimate};
use super::window::Window;
use crate::enumerate::enumerate_sublattices_disc_leq;
use crate::error::{Error, Result};
use crate::lattice::QuadraticLattice;
use crate::multiplicity::{alpha_constant, AlphaEstimate};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NamedWindow {
    pub id: String,
    #[serde(flatten)]
    pub window: Window,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ReportOptions {
    pub samples: u64,
    pub seed: u64,
    /// Truncation of the α series.
    pub alpha_k_max: u64,
    /// Boundary shell half-width (radians or projector units).
    pub shell_eps: f64,
}

impl Default for ReportOptions {
    fn default() -> Self {
        ReportOptions { samples: 1 << 20, seed: 0, alpha_k_max: 10_000, shell_eps: 0.01 }
    }
}

/// One table row. For r = 1 window rows the oracle is the limit of
/// `mu_scaled`; for r >= 2 it is the invariant mass of the window, to be
/// compared with nu_prime / nu_prime(total). Total rows carry 1/α.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceRow {
    pub window_id: String,
    pub n: i64,
    pub mu_scaled: Option<f64>,
    pub nu: u64,
    pub nu_prime: u64,
    pub ratio: Option<f64>,
    pub oracle: Option<f64>,
    pub stderr: Option<f64>,
    pub rel_dev: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ShellMass {
    pub window_id: String,
    pub eps: f64,
    pub mass: f64,
    pub stderr: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceReport {
    pub lattice: String,
    pub d: usize,
    pub r: usize,
    pub rows: Vec<ConvergenceRow>,
    pub alpha: Option<AlphaEstimate>,
    pub shells: Vec<ShellMass>,
    pub options: ReportOptions,
}

fn ratio(a: u64, b: u64) -> Option<f64> {
    (b > 0).then(|| a as f64 / b as f64)
}

pub fn convergence_report(
    l: &QuadraticLattice,
    r: usize,
    windows: &[NamedWindow],
    n_grid: &[i64],
    opts: &ReportOptions,
) -> Result<ConvergenceReport> {
    if !l.is_positive_definite() {
        return Err(Error::NotPositiveDefinite);
    }
    let d = l.rank();
    if r == 0 || r > d {
        return Err(Error::InvalidArgument(format!("r = {r} in dimension {d}")));
    }
    let mut grid = n_grid.to_vec();
    grid.sort_unstable();
    grid.dedup();
    let alpha = if d >= r + 2 { Some(alpha_constant(r, d, opts.alpha_k_max)?) } else { None };
    let oracles: Vec<OracleEstimate> = windows
        .iter()
        .enumerate()
        .map(|(i, w)| {
            let seed = opts.seed.wrapping_add(i as u64);
            if r == 1 {
                oracle_limit_measure(l, 1, &w.window, opts.samples, seed)
            } else {
                invariant_plane_oracle(l, r, &w.window, opts.samples, seed)
            }
        })
        .collect::<Result<_>>()?;
    let mut shells = Vec::new();
    for (i, w) in windows.iter().enumerate() {
        if let Some(s) = w.window.shell(opts.shell_eps) {
            let seed = opts.seed.wrapping_add(1000 + i as u64);
            let e = if r == 1 {
                oracle_limit_measure(l, 1, &s, opts.samples, seed)?
            } else {
                invariant_plane_oracle(l, r, &s, opts.samples, seed)?
            };
            shells.push(ShellMass { window_id: w.id.clone(), eps: opts.shell_eps, mass: e.estimate, stderr: e.stderr });
        }
    }
    let nw = windows.len();
    // counts[k] = (mu per window, nu per window, nu' per window, totals)
    type Counts = (Vec<Option<u64>>, Vec<u64>, Vec<u64>, Option<u64>, u64, u64);
    let counts: Vec<Counts> = if r == 1 {
        let ws: Vec<Window> = windows.iter().map(|w| w.window.clone()).collect();
        let c = rank1_window_counts(l, &grid, &ws)?;
        (0..grid.len())
            .map(|k| {
                (
                    c.mu[k].iter().map(|&x| Some(x)).collect(),
                    c.nu[k].clone(),
                    c.nu_prime[k].clone(),
                    Some(c.total_mu[k]),
                    c.total_nu[k],
                    c.total_nu_prime[k],
                )
            })
            .collect()
    } else {
        let top = grid.last().copied().unwrap_or(0);
        let subs = enumerate_sublattices_disc_leq(l, r, top)?;
        let tagged: Vec<(i64, bool, Vec<bool>)> = subs
            .iter()
            .map(|s| {
                let p = project_sublattice(s)?;
                let disc = num_traits::ToPrimitive::to_i64(&s.disc).ok_or(Error::Overflow("discriminant"))?;
                Ok((disc, s.primitive, windows.iter().map(|w| w.window.contains_projector(&p)).collect()))
            })
            .collect::<Result<_>>()?;
        grid.iter()
            .map(|&n| {
                let mut nu = vec![0u64; nw];
                let mut nup = vec![0u64; nw];
                let (mut tn, mut tp) = (0, 0);
                for (disc, prim, inside) in &tagged {
                    if *disc > n {
                        continue;
                    }
                    tn += 1;
                    tp += u64::from(*prim);
                    for w in 0..nw {
                        if inside[w] {
                            nu[w] += 1;
                            nup[w] += u64::from(*prim);
                        }
                    }
                }
                (vec![None; nw], nu, nup, None, tn, tp)
            })
            .collect()
    };
    let mut rows = Vec::new();
    for (k, &n) in grid.iter().enumerate() {
        let (mu, nu, nup, tmu, tn, tp) = &counts[k];
        let scale = (n as f64).powf(-(d as f64) / 2.0);
        for (w, nwin) in windows.iter().enumerate() {
            let o = oracles[w];
            let mu_scaled = mu[w].map(|m| m as f64 * scale);
            let observed = if r == 1 { mu_scaled } else { ratio(nup[w], *tp) };
            rows.push(ConvergenceRow {
                window_id: nwin.id.clone(),
                n,
                mu_scaled,
                nu: nu[w],
                nu_prime: nup[w],
                ratio: ratio(nup[w], nu[w]),
                oracle: Some(o.estimate),
                stderr: Some(o.stderr),
                rel_dev: observed.filter(|_| o.estimate != 0.0).map(|x| x / o.estimate - 1.0),
            });
        }
        let inv_alpha = alpha.as_ref().map(|a| (1.0 / a.upper(), 1.0 / a.lower()));
        let total_ratio = ratio(*tp, *tn);
        rows.push(ConvergenceRow {
            window_id: "total".into(),
            n,
            mu_scaled: tmu.map(|m| m as f64 * scale),
            nu: *tn,
            nu_prime: *tp,
            ratio: total_ratio,
            oracle: inv_alpha.map(|(lo, hi)| 0.5 * (lo + hi)),
            stderr: inv_alpha.map(|(lo, hi)| 0.5 * (hi - lo)),
            rel_dev: total_ratio.zip(inv_alpha).map(|(x, (lo, hi))| x / (0.5 * (lo + hi)) - 1.0),
        });
    }
    Ok(ConvergenceReport { lattice: l.name().to_string(), d, r, rows, alpha, shells, options: *opts })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_report_is_consistent() {
        let l = QuadraticLattice::standard(4);
        let ws = vec![
            NamedWindow { id: "north".into(), window: Window::cap(vec![0.0, 0.0, 0.0, 1.0], 1.2) },
            NamedWindow { id: "south".into(), window: Window::cap(vec![0.0, 0.0, 0.0, -1.0], 1.2) },
        ];
        let opts = ReportOptions { samples: 20_000, ..Default::default() };
        let rep = convergence_report(&l, 1, &ws, &[50, 200], &opts).unwrap();
        assert_eq!(rep.rows.len(), 6);
        let row = |id: &str, n: i64| rep.rows.iter().find(|r| r.window_id == id && r.n == n).unwrap().clone();
        assert_eq!(row("north", 200).mu_scaled, row("south", 200).mu_scaled);
        assert!(row("north", 50).nu <= row("north", 200).nu);
        for r in &rep.rows {
            assert!(r.nu_prime <= r.nu);
        }
        assert!(rep.shells.iter().all(|s| s.mass < 0.1));
        let again = convergence_report(&l, 1, &ws, &[50, 200], &opts).unwrap();
        assert_eq!(rep, again);
    }
}
