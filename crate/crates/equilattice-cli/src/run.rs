//! Executes one experiment and writes its tables and `report.json`.

use std::path::Path;
use std::time::Instant;

use anyhow::{bail, Context, Result};
use equilattice::arith::to_f64;
use equilattice::cm::{
    cm_equidistribution_report, elliptic_fixed_points, kronecker_hurwitz_sixths, trace_class_counts,
};
use equilattice::density::{count_solutions_full_scan, growth_exponent_check, local_density, stabilization_floor};
use equilattice::equidist::{convergence_report, rank1_totals, rank2_totals, ReportOptions};
use equilattice::forms::exterior::Space;
use equilattice::forms::{
    chern_form, complex_nonvanishing_check, curvature_form, proportionality_test, pull_push, vanishing_criterion_check,
    AlternatingForm, FiberQuadrature, LieConfiguration, PullPushOptions,
};
use equilattice::multiplicity::{alpha_constant, count_hnf_of_index, verify_multiplicity_relation_range, MultiplicitySeries};
use equilattice::{Error, GramMatrix};
use serde::Serialize;
use serde_json::{json, Value};

use crate::config::{
    CmParams, DensityParams, Experiment, ExperimentConfig, MultiplicityParams, PullPushCheck, PullPushParams,
    SublatticeParams,
};
use crate::output::{write_json, write_table, Table};
use crate::row;

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Assertion {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

impl Assertion {
    fn new(name: &str, passed: bool, detail: impl Into<String>) -> Self {
        Assertion { name: name.into(), passed, detail: detail.into() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TableSummary {
    pub name: String,
    pub file: String,
    pub rows: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunReport {
    pub version: &'static str,
    pub kind: &'static str,
    pub seed: Option<u64>,
    pub config: Value,
    pub tables: Vec<TableSummary>,
    pub summary: Value,
    pub assertions: Vec<Assertion>,
    /// The only field that changes between identical runs.
    pub wall_clock_seconds: f64,
}

impl RunReport {
    pub fn passed(&self) -> bool {
        self.assertions.iter().all(|a| a.passed)
    }
}

#[derive(Default)]
struct Outcome {
    tables: Vec<Table>,
    summary: serde_json::Map<String, Value>,
    assertions: Vec<Assertion>,
}

/// Config echo: the parsed file with the effective seed and without the
/// output directory, so that outputs do not depend on where they go.
pub fn config_echo(cfg: &ExperimentConfig) -> Value {
    let mut v = cfg.raw.clone();
    if let Value::Object(o) = &mut v {
        o.remove("out");
        match cfg.seed {
            Some(s) => o.insert("seed".into(), json!(s)),
            None => o.remove("seed"),
        };
    }
    v
}

/// Runs the experiment and writes every table, its sidecar and
/// `report.json` into `out_dir`.
pub fn run(cfg: &ExperimentConfig, out_dir: &Path) -> Result<RunReport> {
    cfg.validate()?;
    let start = Instant::now();
    let outcome = match &cfg.experiment {
        Experiment::Sublattices(p) => sublattices(p, cfg.seed)?,
        Experiment::Multiplicity(p) => multiplicity(p)?,
        Experiment::Density(p) => density(p)?,
        Experiment::Pullpush(p) => pullpush(p, cfg.seed)?,
        Experiment::Cm(p) => cm(p)?,
    };
    let wall = start.elapsed().as_secs_f64();
    std::fs::create_dir_all(out_dir).with_context(|| format!("creating {}", out_dir.display()))?;
    let echo = config_echo(cfg);
    let meta = json!({
        "kind": cfg.experiment.kind(),
        "seed": cfg.seed,
        "version": VERSION,
        "parameters": echo,
    });
    for t in &outcome.tables {
        write_table(out_dir, t, &meta)?;
    }
    let report = RunReport {
        version: VERSION,
        kind: cfg.experiment.kind(),
        seed: cfg.seed,
        config: echo,
        tables: outcome
            .tables
            .iter()
            .map(|t| TableSummary { name: t.name.clone(), file: t.file_name(), rows: t.rows.len() })
            .collect(),
        summary: Value::Object(outcome.summary),
        assertions: outcome.assertions,
        wall_clock_seconds: wall,
    };
    write_json(&out_dir.join("report.json"), &serde_json::to_value(&report)?)?;
    Ok(report)
}

fn sublattices(p: &SublatticeParams, seed: Option<u64>) -> Result<Outcome> {
    let l = p.lattice.resolve("lattice")?;
    let mut out = Outcome::default();
    out.summary.insert("lattice".into(), json!(l.name()));
    if !p.windows.is_empty() {
        let opts = ReportOptions {
            samples: p.samples,
            seed: seed.context("seed")?,
            alpha_k_max: p.alpha_k_max,
            shell_eps: p.shell_eps,
        };
        let rep = convergence_report(&l, p.r, &p.windows, &p.n_grid, &opts)?;
        let mut t = Table::new(
            "convergence",
            &["window_id", "n", "mu_scaled", "nu", "nu_prime", "ratio", "oracle", "stderr", "rel_dev"],
        );
        for r in &rep.rows {
            t.push(row![r.window_id, r.n, r.mu_scaled, r.nu, r.nu_prime, r.ratio, r.oracle, r.stderr, r.rel_dev]);
        }
        out.tables.push(t);
        let mut s = Table::new("shells", &["window_id", "eps", "mass", "stderr"]);
        for sh in &rep.shells {
            s.push(row![sh.window_id, sh.eps, sh.mass, sh.stderr]);
        }
        out.tables.push(s);
        if let Some(tol) = p.window_tolerance {
            let n_top = rep.rows.iter().map(|r| r.n).max().unwrap_or(0);
            let worst = rep
                .rows
                .iter()
                .filter(|r| r.n == n_top && r.window_id != "total")
                .filter_map(|r| r.rel_dev)
                .fold(0.0f64, |m, x| m.max(x.abs()));
            out.assertions.push(Assertion::new(
                "window_masses",
                worst <= tol,
                format!("max |rel_dev| {worst:.4} at n = {n_top}, tolerance {tol}"),
            ));
        }
    }
    if !p.totals.is_empty() {
        let alpha = alpha_constant(p.r, l.rank(), p.alpha_k_max)?;
        let (lo, hi) = (1.0 / alpha.upper(), 1.0 / alpha.lower());
        let mid = 0.5 * (lo + hi);
        let mut t = Table::new("totals", &["n", "nu", "nu_prime", "ratio", "inv_alpha_lo", "inv_alpha_hi", "rel_dev"]);
        let mut worst = 0.0f64;
        for &n in &p.totals {
            let (nu, nup) = if p.r == 1 { rank1_totals(&l, n)? } else { rank2_totals(&l, n)? };
            let ratio = (nu > 0).then(|| nup as f64 / nu as f64);
            let dev = ratio.map(|x| x / mid - 1.0);
            worst = worst.max(dev.map_or(f64::INFINITY, f64::abs));
            t.push(row![n, nu, nup, ratio, lo, hi, dev]);
        }
        out.tables.push(t);
        out.summary.insert("alpha".into(), json!({"lower": alpha.lower(), "upper": alpha.upper()}));
        if let Some(tol) = p.total_tolerance {
            out.assertions.push(Assertion::new(
                "primitive_ratio",
                worst <= tol,
                format!("max |ν'/ν · α − 1| {worst:.4}, tolerance {tol}"),
            ));
        }
    }
    Ok(out)
}

fn multiplicity(p: &MultiplicityParams) -> Result<Outcome> {
    let mut out = Outcome::default();
    let series = MultiplicitySeries::new(p.r, p.k_max)?;
    let mut t = Table::new("bk", &["k", "b_k", "hnf_count"]);
    let mut mismatches = Vec::new();
    for k in 1..=p.k_max {
        let hnf = count_hnf_of_index(p.r, k);
        if hnf != series.b(k) {
            mismatches.push(k);
        }
        t.push(row![k, series.b(k), hnf]);
    }
    out.tables.push(t);
    out.assertions.push(Assertion::new(
        "hnf_equals_convolution",
        mismatches.is_empty(),
        format!("r = {}, k <= {}, mismatches at {:?}", p.r, p.k_max, mismatches),
    ));
    if let Some(d) = p.d {
        let a = alpha_constant(p.r, d, p.k_max)?;
        out.summary.insert("alpha".into(), json!({"d": d, "lower": a.lower(), "upper": a.upper(), "midpoint": a.midpoint()}));
    }
    if let Some(rel) = &p.relation {
        let l = rel.lattice.resolve("relation.lattice")?;
        let ns: Vec<i64> = (1..=rel.n_max).collect();
        let ws: Vec<_> = rel.windows.iter().map(|w| w.window.clone()).collect();
        let reps = verify_multiplicity_relation_range(&l, p.r, &ns, &ws)?;
        let mut t = Table::new("relation", &["n", "window_id", "nu", "rhs", "holds"]);
        let mut failed = 0;
        for rep in &reps {
            t.push(row![rep.n, "total", rep.nu, rep.rhs, rep.nu == rep.rhs]);
            for w in &rep.windows {
                t.push(row![rep.n, rel.windows[w.window_id].id, w.nu, w.rhs, w.nu == w.rhs]);
            }
            failed += usize::from(!rep.holds);
        }
        out.tables.push(t);
        out.assertions.push(Assertion::new(
            "multiplicity_relation",
            failed == 0,
            format!("r = {} on {}, n <= {}: {failed} failures", p.r, l.name(), rel.n_max),
        ));
    }
    Ok(out)
}

fn gram(m: &[Vec<i64>], field: &str) -> Result<GramMatrix> {
    GramMatrix::new(m.to_vec()).with_context(|| format!("field `{field}`"))
}

fn density(p: &DensityParams) -> Result<Outcome> {
    let l = p.lattice.resolve("lattice")?;
    let mut out = Outcome::default();
    let mut levels = Table::new(
        "density_levels",
        &["target", "a", "s", "raw", "normalized", "normalized_f64", "full_scan", "agrees"],
    );
    let mut dens = Table::new("densities", &["target", "m", "a", "floor", "s0", "stabilized", "stabilized_f64", "note"]);
    let (mut scanned, mut scan_failures) = (0, 0);
    let (mut coprime, mut coprime_failures) = (0, 0);
    for (i, tg) in p.targets.iter().enumerate() {
        let m = gram(&tg.m, &format!("targets[{i}].m"))?;
        let res = local_density(&l, m.r(), &m, tg.a, p.s_max)?;
        for lv in &res.levels {
            let scan = if p.scan_check {
                match count_solutions_full_scan(&l, m.r(), &m, tg.a, lv.s) {
                    Ok(c) => Some(c),
                    Err(Error::Unsupported(_)) => None,
                    Err(e) => return Err(e.into()),
                }
            } else {
                None
            };
            let agrees = scan.map(|c| u64::try_from(&lv.raw).ok() == Some(c));
            scanned += usize::from(agrees.is_some());
            scan_failures += usize::from(agrees == Some(false));
            levels.push(row![i, tg.a, lv.s, lv.raw.to_string(), lv.normalized.to_string(), to_f64(&lv.normalized), scan, agrees]);
        }
        let floor = stabilization_floor(&l, &m, tg.a);
        if floor == 1 && res.levels.len() >= 2 {
            coprime += 1;
            coprime_failures += usize::from(res.levels[0].normalized != res.levels[1].normalized);
        }
        dens.push(row![
            i,
            serde_json::to_string(&tg.m)?,
            tg.a,
            floor,
            res.s0,
            res.stabilized.as_ref().map(|x| x.to_string()),
            res.stabilized.as_ref().map(to_f64),
            res.note.clone()
        ]);
    }
    if !p.targets.is_empty() {
        out.tables.push(levels);
        out.tables.push(dens);
        if p.scan_check {
            out.assertions.push(Assertion::new(
                "hensel_matches_full_scan",
                scan_failures == 0,
                format!("{scanned} levels scanned, {scan_failures} mismatches"),
            ));
        }
        if coprime > 0 {
            out.assertions.push(Assertion::new(
                "stable_from_level_1",
                coprime_failures == 0,
                format!("{coprime} targets with a coprime to 2 det L det M, {coprime_failures} differ at s = 1, 2"),
            ));
        }
    }
    if let Some(g) = &p.growth {
        let m0 = gram(&g.m0, "growth.m0")?;
        let squarefree = |n: i64| (2..).take_while(|q| q * q <= n).all(|q| n % (q * q) != 0);
        let ns: Vec<i64> = (1..=g.n_max).filter(|&n| !g.squarefree || squarefree(n)).collect();
        let ms: Vec<GramMatrix> = ns.iter().map(|&n| m0.scaled(n)).collect();
        let rep = growth_exponent_check(&l, &ms, g.prime_cutoff, g.s_max)?;
        let mut t = Table::new("growth", &["n", "det", "relative_volume", "residual", "primitive"]);
        for (n, pt) in ns.iter().zip(&rep.points) {
            t.push(row![*n, pt.det, pt.relative_volume, pt.residual, pt.primitive]);
        }
        out.tables.push(t);
        out.summary.insert(
            "growth".into(),
            json!({"slope": rep.slope, "expected": rep.expected, "intercept": rep.intercept}),
        );
        if let Some(tol) = g.tolerance {
            let dev = (rep.slope - rep.expected).abs();
            out.assertions.push(Assertion::new(
                "growth_slope",
                dev <= tol,
                format!("slope {:.4}, expected {}, tolerance {tol}", rep.slope, rep.expected),
            ));
        }
    }
    Ok(out)
}

fn pullpush(p: &PullPushParams, seed: Option<u64>) -> Result<Outcome> {
    let cfg = LieConfiguration::from_spec(p.preset.resolve("preset")?)?;
    let mut quadrature = p.quadrature;
    if let (FiberQuadrature::MonteCarlo { seed: s, .. }, Some(run_seed)) = (&mut quadrature, seed) {
        *s = run_seed;
    }
    let opts = PullPushOptions {
        quadrature,
        omega_scale: p.omega_scale,
        invariance_samples: p.invariance_samples,
        seed: seed.unwrap_or(0),
    };
    let pp = pull_push(&cfg, &opts)?;
    let mut out = Outcome::default();
    let mut t = Table::new("pullpush_form", &["indices", "labels", "coefficient"]);
    let labels: Vec<String> = (0..cfg.m.ncols()).map(|i| format!("m{i}")).collect();
    for (idx, c) in pp.form.subsets().iter().zip(pp.form.coefficients()) {
        let ids: Vec<String> = idx.iter().map(|i| i.to_string()).collect();
        let ls: Vec<&str> = idx.iter().map(|&i| labels[i].as_str()).collect();
        t.push(row![ids.join(" "), ls.join("^"), *c]);
    }
    out.tables.push(t);
    let norm = pp.form.norm();
    out.summary.insert("preset".into(), json!(cfg.spec.name));
    out.summary.insert(
        "pull_push".into(),
        json!({
            "degree": pp.form.degree(),
            "norm": norm,
            "nodes": pp.nodes,
            "fiber_volume": pp.fiber_volume,
            "quadrature_error": pp.quadrature_error,
            "k_invariance_defect": pp.k_invariance_defect,
            "lambda_one": pp.lambda_one,
        }),
    );
    let invariance_floor = 3.0 * pp.quadrature_error + 1e-12 * norm.max(1.0);
    for check in &p.checks {
        let a = match check {
            PullPushCheck::Vanishing => {
                let w = vanishing_criterion_check(&cfg, 16);
                let detail = match &w {
                    Some(w) => format!("norm {norm:.3e}, witness angles {:?}, det {:.6}", w.angles, w.determinant),
                    None => format!("norm {norm:.3e}, no witness"),
                };
                out.summary.insert("witness".into(), serde_json::to_value(&w)?);
                Assertion::new("vanishing", w.is_some() && norm < p.vanishing_tolerance, detail)
            }
            PullPushCheck::ComplexNonvanishing => {
                let r = complex_nonvanishing_check(&cfg, &pp)?;
                let detail = format!("value {:.6e}", r.value);
                out.summary.insert("complex_nonvanishing".into(), serde_json::to_value(&r)?);
                Assertion::new("complex_nonvanishing", r.positive, detail)
            }
            PullPushCheck::ChernProportionality => {
                let c1 = chern_form(&curvature_form(&cfg)?, 1)?;
                let pr = proportionality_test(&pp.form, &c1, None)?;
                out.summary.insert("chern_proportionality".into(), json!({"scalar": pr.scalar, "residual": pr.residual}));
                Assertion::new(
                    "chern_proportionality",
                    pr.scalar > 0.0 && pr.residual < p.residual_tolerance,
                    format!("scalar {:.6}, residual {:.3e}", pr.scalar, pr.residual),
                )
            }
            PullPushCheck::HlRestriction => {
                let w = cfg.h_over_l_in_g_over_k();
                if w.len() != pp.form.degree() {
                    bail!("h/l has dimension {}, the pull-push form degree {}", w.len(), pp.form.degree());
                }
                let restricted = pp.form.restrict(&w)?;
                let area = AlternatingForm::<f64>::from_fn(Space::Subspace, w.len(), w.len(), |_| 1.0)?;
                let pr = proportionality_test(&restricted, &area, None)?;
                let invariant = pp.k_invariance_defect <= invariance_floor;
                out.summary.insert("hl_restriction".into(), json!({"scalar": pr.scalar, "residual": pr.residual}));
                Assertion::new(
                    "hl_restriction",
                    pr.scalar > 0.0 && pr.residual < p.residual_tolerance && invariant,
                    format!(
                        "scalar {:.6}, residual {:.3e}, K-invariance defect {:.3e} (bound {:.3e})",
                        pr.scalar, pr.residual, pp.k_invariance_defect, invariance_floor
                    ),
                )
            }
        };
        out.assertions.push(a);
    }
    Ok(out)
}

fn cm(p: &CmParams) -> Result<Outcome> {
    let ns = p.ns();
    let regions = p.regions.resolve()?;
    let mut out = Outcome::default();
    if p.points {
        let mut t = Table::new("cm_points", &["N", "t", "D", "x", "y", "weight"]);
        for &n in &ns {
            for r in elliptic_fixed_points(n)? {
                t.push(row![n, r.t, r.d, r.point.x, r.point.y, r.weight]);
            }
        }
        out.tables.push(t);
    }
    if p.oracle_check {
        let mut t = Table::new(
            "cm_traces",
            &["N", "t", "D", "classes", "class_weight_sixths", "forms", "form_weight_sixths", "agrees"],
        );
        let (mut bad_traces, mut bad_totals) = (0, 0);
        for &n in &ns {
            let mut total = 0i64;
            for c in trace_class_counts(n)? {
                bad_traces += usize::from(!c.agrees());
                total += c.class_weight_sixths as i64;
                t.push(row![n, c.t, c.d, c.classes, c.class_weight_sixths, c.forms, c.form_weight_sixths, c.agrees()]);
            }
            bad_totals += usize::from(total != kronecker_hurwitz_sixths(n));
        }
        out.tables.push(t);
        out.assertions.push(Assertion::new(
            "classes_match_reduced_forms",
            bad_traces == 0,
            format!("{} values of N, {bad_traces} traces differ", ns.len()),
        ));
        out.assertions.push(Assertion::new(
            "kronecker_hurwitz_total",
            bad_totals == 0,
            format!("{bad_totals} values of N differ from 2σ(N) − Σ min(d, N/d)"),
        ));
    }
    let rep = cm_equidistribution_report(&ns, &regions)?;
    let mut t = Table::new("cm_regions", &["N", "region_id", "count", "area", "ratio"]);
    for r in &rep.rows {
        t.push(row![r.n, r.region_id, r.count, r.area, r.ratio]);
    }
    out.tables.push(t);
    let mut t = Table::new("cm_aggregate", &["region_id", "count", "area", "ratio"]);
    for r in &rep.aggregate {
        t.push(row![r.region_id, r.count, r.area, r.ratio]);
    }
    out.tables.push(t);
    out.summary.insert(
        "cm".into(),
        json!({
            "n_values": ns.len(),
            "b_estimate": rep.b_estimate,
            "max_pairwise_deviation": rep.max_pairwise_deviation,
        }),
    );
    if let Some(tol) = p.tolerance {
        out.assertions.push(Assertion::new(
            "region_ratios_agree",
            rep.max_pairwise_deviation <= tol,
            format!("max pairwise deviation {:.4}, tolerance {tol}", rep.max_pairwise_deviation),
        ));
    }
    Ok(out)
}
