//! Acceptance criteria, one line each. Runs without the libtest harness so
//! the lines are printed on every `cargo test`; exits non-zero on a failure.

use std::path::Path;
use std::time::{Duration, Instant};

use equilattice::cm::{cm_equidistribution_report, default_regions, trace_class_counts};
use equilattice::density::{
    count_solutions_full_scan, count_solutions_mod, growth_exponent_check, local_density, stabilization_floor,
};
use equilattice::equidist::{convergence_report, rank1_totals, rank2_totals, NamedWindow, ReportOptions, Window};
use equilattice::forms::exterior::Space;
use equilattice::forms::{
    chern_form, curvature_form, preset, proportionality_test, pull_push, vanishing_criterion_check, AlternatingForm,
    LieConfiguration, PullPushOptions,
};
use equilattice::multiplicity::{alpha_constant, count_hnf_of_index, verify_multiplicity_relation_range, MultiplicitySeries};
use equilattice::{Error, GramMatrix, QuadraticLattice};
use equilattice_cli::{run, ExperimentConfig};

struct Outcome {
    passed: bool,
    detail: String,
}

fn outcome(passed: bool, detail: impl Into<String>) -> Outcome {
    Outcome { passed, detail: detail.into() }
}

type Check = fn() -> Result<Outcome, String>;

fn e(err: impl std::fmt::Display) -> String {
    err.to_string()
}

fn lattice(name: &str) -> QuadraticLattice {
    match name {
        "A2+Z2" => QuadraticLattice::new("A2+Z2", QuadraticLattice::a2().direct_sum(&QuadraticLattice::standard(2)).gram().to_vec())
            .unwrap(),
        "D4" => QuadraticLattice::new(
            "D4",
            vec![vec![2, -1, 0, 0], vec![-1, 2, -1, -1], vec![0, -1, 2, 0], vec![0, -1, 0, 2]],
        )
        .unwrap(),
        z => QuadraticLattice::standard(z[1..].parse().unwrap()),
    }
}

fn zeta_multiplicity() -> Result<Outcome, String> {
    let mut bad = Vec::new();
    for r in 1..=4 {
        let series = MultiplicitySeries::new(r, 500).map_err(e)?;
        for k in 1..=500 {
            if count_hnf_of_index(r, k) != series.b(k) {
                bad.push((r, k));
            }
        }
    }
    Ok(outcome(bad.is_empty(), format!("r = 1..4, k <= 500, {} mismatches", bad.len())))
}

fn relation_windows() -> Vec<Window> {
    vec![
        Window::ProjectorCap { center: vec![1.0, 0.0, 0.0], half_angle: 0.8 },
        Window::ProjectorBox { i: 0, j: 1, lo: 0.0, hi: 0.25 },
        Window::ProjectorBox { i: 1, j: 1, lo: 0.3, hi: 0.9 },
    ]
}

fn nu_relation() -> Result<Outcome, String> {
    let ns: Vec<i64> = (1..=200).collect();
    let mut checked = 0;
    let mut failures = Vec::new();
    for name in ["Z3", "Z4", "A2+Z2"] {
        let l = lattice(name);
        let ws: Vec<Window> = relation_windows()
            .into_iter()
            .map(|w| match w {
                Window::ProjectorCap { center, half_angle } => {
                    let mut c = center;
                    c.resize(l.rank(), 0.0);
                    Window::ProjectorCap { center: c, half_angle }
                }
                w => w,
            })
            .collect();
        for r in 1..=2 {
            for rep in verify_multiplicity_relation_range(&l, r, &ns, &ws).map_err(e)? {
                checked += 1 + rep.windows.len();
                if !rep.holds {
                    failures.push(format!("{name} r={r} n={}", rep.n));
                }
            }
        }
    }
    Ok(outcome(failures.is_empty(), format!("{checked} identities (totals and 3 windows), failures {failures:?}")))
}

fn six_caps() -> Vec<NamedWindow> {
    let centers = [[1.0, 0.0, 0.0, 0.0], [1.0, 1.0, 0.0, 0.0], [1.0, 1.0, 1.0, 1.0]];
    let mut out = Vec::new();
    for (i, c) in centers.iter().enumerate() {
        for (sign, tag) in [(1.0, "+"), (-1.0, "-")] {
            out.push(NamedWindow {
                id: format!("cap{i}{tag}"),
                window: Window::cap(c.iter().map(|x| sign * x).collect(), 0.5),
            });
        }
    }
    out
}

fn vague_convergence() -> Result<Outcome, String> {
    let l = QuadraticLattice::standard(4);
    let opts = ReportOptions { samples: 1 << 20, seed: 2024, alpha_k_max: 2000, shell_eps: 0.01 };
    let rep = convergence_report(&l, 1, &six_caps(), &[10_000], &opts).map_err(e)?;
    let rows: Vec<_> = rep.rows.iter().filter(|r| r.window_id.starts_with("cap")).collect();
    let worst = rows.iter().map(|r| r.rel_dev.unwrap().abs()).fold(0.0, f64::max);
    let mut pair = 0.0f64;
    for i in 0..3 {
        let m = |tag: &str| rows.iter().find(|r| r.window_id == format!("cap{i}{tag}")).unwrap().mu_scaled.unwrap();
        pair = pair.max((m("+") / m("-") - 1.0).abs());
    }
    Ok(outcome(
        worst <= 0.05 && pair <= 0.02,
        format!("Z^4, n = 1e4: max window deviation {:.2}% (5%), symmetric pairs {:.2}% (2%)", 100.0 * worst, 100.0 * pair),
    ))
}

fn primitive_ratio() -> Result<Outcome, String> {
    let l = QuadraticLattice::standard(4);
    let mut parts = Vec::new();
    let mut ok = true;
    for r in 1..=2 {
        let (nu, nup) = if r == 1 { rank1_totals(&l, 10_000) } else { rank2_totals(&l, 10_000) }.map_err(e)?;
        let a = alpha_constant(r, 4, 2000).map_err(e)?;
        let inv_mid = 0.5 * (1.0 / a.upper() + 1.0 / a.lower());
        let dev = (nup as f64 / nu as f64) / inv_mid - 1.0;
        ok &= dev.abs() <= 0.03;
        parts.push(format!("r={r}: ν'/ν = {:.5}, 1/α = {:.5}, {:+.2}%", nup as f64 / nu as f64, inv_mid, 100.0 * dev));
    }
    Ok(outcome(ok, format!("Z^4, n = 1e4, tolerance 3%; {}", parts.join("; "))))
}

fn local_density_stabilization() -> Result<Outcome, String> {
    let m1 = |m: i64| GramMatrix::scalar(m);
    let m2 = |a: i64, b: i64, c: i64| GramMatrix::new(vec![vec![a, b], vec![b, c]]).unwrap();
    let triples: Vec<(&str, GramMatrix, u64)> = vec![
        ("Z3", m1(1), 3),
        ("Z3", m1(2), 5),
        ("Z3", m1(6), 7),
        ("Z4", m1(1), 3),
        ("Z4", m1(5), 3),
        ("Z4", m1(3), 5),
        ("A2+Z2", m1(2), 5),
        ("A2+Z2", m1(1), 7),
        ("D4", m1(2), 3),
        ("Z5", m1(2), 3),
        ("Z3", m2(1, 0, 1), 3),
        ("Z4", m2(2, 1, 2), 5),
        ("Z4", m2(1, 0, 2), 3),
    ];
    let mut equal = 0;
    let mut scans = 0;
    let mut problems = Vec::new();
    for (name, m, a) in &triples {
        let l = lattice(name);
        // floor 1 means a does not divide 4 det L det M
        if stabilization_floor(&l, m, *a) != 1 {
            return Err(format!("{name}, a = {a} divides 2 det L det M"));
        }
        let res = local_density(&l, m.r(), m, *a, 4).map_err(e)?;
        if res.levels.len() >= 2 && res.levels[0].normalized == res.levels[1].normalized {
            equal += 1;
        } else {
            problems.push(format!("{name} M={:?} a={a}: levels differ", m.entries));
        }
        for s in 1..=3 {
            match count_solutions_full_scan(&l, m.r(), m, *a, s) {
                Ok(c) => {
                    scans += 1;
                    let h = count_solutions_mod(&l, m.r(), m, *a, s).map_err(e)?;
                    if u64::try_from(&h).ok() != Some(c) {
                        problems.push(format!("{name} M={:?} a={a} s={s}: Hensel {h}, scan {c}", m.entries));
                    }
                }
                Err(Error::Unsupported(_)) => {}
                Err(err) => return Err(err.to_string()),
            }
        }
    }
    Ok(outcome(
        problems.is_empty() && equal >= 10,
        format!("{equal}/{} triples equal at s = 1, 2; {scans} feasible scans agree; {problems:?}", triples.len()),
    ))
}

fn volume_growth() -> Result<Outcome, String> {
    let l = QuadraticLattice::standard(5);
    let ns: Vec<i64> = (1..=20).filter(|n| (2..=4).all(|q| n % (q * q) != 0)).collect();
    let ms: Vec<GramMatrix> = ns.iter().map(|&n| GramMatrix::scalar(n)).collect();
    let g = growth_exponent_check(&l, &ms, 50, 8).map_err(e)?;
    Ok(outcome(
        (g.slope - 1.5).abs() <= 0.1,
        format!("Z^5, r = 1, {} squarefree n <= 20: slope {:.4}, expected {} ± 0.1", ns.len(), g.slope, g.expected),
    ))
}

fn lie(name: &str) -> Result<LieConfiguration, String> {
    LieConfiguration::from_spec(preset(name).map_err(e)?).map_err(e)
}

fn pull_push_vanishing() -> Result<Outcome, String> {
    let c = lie("so21-geodesic")?;
    let pp = pull_push(&c, &PullPushOptions { invariance_samples: 0, ..Default::default() }).map_err(e)?;
    let w = vanishing_criterion_check(&c, 16);
    let norm = pp.form.norm();
    Ok(outcome(
        norm < 1e-8 && w.is_some(),
        format!(
            "‖pull-push‖ = {norm:.2e} (< 1e-8), witness {:?}",
            w.map(|w| format!("angle {:.6}, det {:.3}", w.angles[0], w.determinant))
        ),
    ))
}

fn weight2_proportionality() -> Result<Outcome, String> {
    let c = lie("so22-weight2")?;
    let pp = pull_push(&c, &PullPushOptions::default()).map_err(e)?;
    let c1 = chern_form(&curvature_form(&c).map_err(e)?, 1).map_err(e)?;
    let p = proportionality_test(&pp.form, &c1, None).map_err(e)?;
    Ok(outcome(
        p.scalar > 0.0 && p.residual < 1e-6,
        format!("scalar {:.6} (> 0), relative residual {:.2e} (< 1e-6)", p.scalar, p.residual),
    ))
}

fn diagonal_restriction() -> Result<Outcome, String> {
    let c = lie("sl2xsl2-diagonal")?;
    let pp = pull_push(&c, &PullPushOptions::default()).map_err(e)?;
    let w = c.h_over_l_in_g_over_k();
    let restricted = pp.form.restrict(&w).map_err(e)?;
    let area = AlternatingForm::<f64>::from_fn(Space::Subspace, 2, 2, |_| 1.0).map_err(e)?;
    let p = proportionality_test(&restricted, &area, None).map_err(e)?;
    let bound = 3.0 * pp.quadrature_error + 1e-12 * pp.form.norm().max(1.0);
    Ok(outcome(
        p.scalar > 0.0 && p.residual < 1e-6 && pp.k_invariance_defect <= bound,
        format!(
            "scalar {:.6}, residual {:.2e}, K-invariance defect {:.2e} (quadrature bound {:.2e})",
            p.scalar, p.residual, pp.k_invariance_defect, bound
        ),
    ))
}

fn cm_oracle() -> Result<Outcome, String> {
    let mut traces = 0;
    let mut bad = Vec::new();
    for n in 1..=50 {
        for t in trace_class_counts(n).map_err(e)? {
            traces += 1;
            if !t.agrees() {
                bad.push((n, t.t));
            }
        }
    }
    Ok(outcome(bad.is_empty(), format!("N <= 50, {traces} (N, t) pairs, mismatches {bad:?}")))
}

fn cm_equidistribution() -> Result<Outcome, String> {
    let ns: Vec<i64> = (2000..=4000).collect();
    let rep = cm_equidistribution_report(&ns, &default_regions()).map_err(e)?;
    let ratios: Vec<String> = rep.aggregate.iter().map(|r| format!("{} {:.2}", r.region_id, r.ratio)).collect();
    Ok(outcome(
        rep.max_pairwise_deviation <= 0.05,
        format!(
            "N in [2000, 4000], count/area {}; max pairwise deviation {:.2}% (5%)",
            ratios.join(", "),
            100.0 * rep.max_pairwise_deviation
        ),
    ))
}

fn csv_files(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut v: Vec<(String, Vec<u8>)> = std::fs::read_dir(dir)
        .unwrap()
        .map(|f| f.unwrap().path())
        .filter(|p| p.file_name().unwrap().to_string_lossy() != "report.json")
        .map(|p| (p.file_name().unwrap().to_string_lossy().into_owned(), std::fs::read(&p).unwrap()))
        .collect();
    v.sort();
    v
}

fn determinism() -> Result<Outcome, String> {
    let configs = [
        r#"{"kind": "sublattices", "lattice": "Z4", "r": 1, "seed": 11, "samples": 100000, "n_grid": [200, 800],
            "windows": [{"id": "c", "kind": "cap", "center": [1, 2, 0, 0], "half_angle": 0.7},
                        {"id": "b", "kind": "bump", "center": [0, 0, 1, 1], "width": 0.5}]}"#,
        r#"{"kind": "sublattices", "lattice": "A2+Z2", "r": 2, "seed": 5, "samples": 50000, "n_grid": [30],
            "windows": [{"id": "p", "kind": "projector_cap", "center": [1, 0, 0, 0], "half_angle": 0.9}]}"#,
        r#"{"kind": "pullpush", "preset": "sl2xsl2-diagonal", "seed": 9,
            "quadrature": {"method": "monte_carlo", "samples": 500, "seed": 0}}"#,
    ];
    let mut files = 0;
    let mut differ = Vec::new();
    let pool = rayon::ThreadPoolBuilder::new().num_threads(3).build().map_err(e)?;
    for text in configs {
        let cfg = ExperimentConfig::from_json(text).map_err(e)?;
        let a = tempfile::tempdir().map_err(e)?;
        let b = tempfile::tempdir().map_err(e)?;
        run(&cfg, a.path()).map_err(e)?;
        pool.install(|| run(&cfg, b.path())).map_err(e)?;
        let (fa, fb) = (csv_files(a.path()), csv_files(b.path()));
        files += fa.len();
        if fa != fb {
            differ.push(cfg.experiment.kind());
        }
    }
    Ok(outcome(
        differ.is_empty() && files > 0,
        format!("{} seeded configs re-run (second run on 3 threads): {files} CSV and sidecar files, differing: {differ:?}", configs.len()),
    ))
}

fn main() {
    let criteria: [(u32, &str, Duration, Check); 12] = [
        (1, "zeta multiplicity identity", Duration::from_secs(10), zeta_multiplicity),
        (2, "ν / ν′ relation", Duration::from_secs(60), nu_relation),
        (3, "vague convergence of window masses", Duration::from_secs(120), vague_convergence),
        (4, "primitive-to-all ratio", Duration::from_secs(120), primitive_ratio),
        (5, "local density stabilization", Duration::from_secs(60), local_density_stabilization),
        (6, "volume growth law", Duration::from_secs(120), volume_growth),
        (7, "pull-push vanishing", Duration::from_secs(1), pull_push_vanishing),
        (8, "weight-2 proportionality", Duration::from_secs(10), weight2_proportionality),
        (9, "diagonal restriction", Duration::from_secs(10), diagonal_restriction),
        (10, "CM fixed-point oracle", Duration::from_secs(30), cm_oracle),
        (11, "CM equidistribution", Duration::from_secs(300), cm_equidistribution),
        (12, "determinism", Duration::from_secs(120), determinism),
    ];
    let filter: Vec<u32> = std::env::args().skip(1).filter_map(|a| a.parse().ok()).collect();
    let mut failed = 0;
    for (id, name, budget, check) in criteria {
        if !filter.is_empty() && !filter.contains(&id) {
            continue;
        }
        let t = Instant::now();
        let res = check();
        let el = t.elapsed();
        let (passed, detail) = match res {
            Ok(o) => (o.passed && el <= budget, o.detail),
            Err(err) => (false, format!("error: {err}")),
        };
        failed += usize::from(!passed);
        println!(
            "criterion {id:>2} {} {name}: {detail} [{:.2} s, budget {} s]",
            if passed { "PASS" } else { "FAIL" },
            el.as_secs_f64(),
            budget.as_secs()
        );
    }
    if failed > 0 {
        println!("{failed} acceptance criteria failed");
        std::process::exit(1);
    }
}
