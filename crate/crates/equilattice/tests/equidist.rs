use equilattice::enumerate::enumerate_vectors_norm_leq;
use equilattice::equidist::counting::{rank1_totals, rank1_window_counts, rank2_totals};
use equilattice::equidist::grassmann::*;
use equilattice::equidist::measure::*;
use equilattice::equidist::oracle::*;
use equilattice::equidist::window::Window;
use equilattice::lattice::gram_of_tuple;
use equilattice::{QuadraticLattice, SublatticeHNF, VectorTuple};
use proptest::prelude::*;

fn a2_z1() -> QuadraticLattice {
    QuadraticLattice::a2().direct_sum(&QuadraticLattice::standard(1))
}

fn gcd(a: i64, b: i64) -> i64 {
    if b == 0 { a.abs() } else { gcd(b, a % b) }
}

#[test]
fn totals_match_frozen_sublattice_counts() {
    let z3 = QuadraticLattice::standard(3);
    assert_eq!(rank1_totals(&z3, 50).unwrap(), (751, 625));
    assert_eq!(rank1_totals(&a2_z1(), 40).unwrap(), (306, 253));
    assert_eq!(rank2_totals(&z3, 20).unwrap(), (289, 157));
    assert_eq!(rank2_totals(&a2_z1(), 20).unwrap(), (97, 55));
    assert_eq!(rank2_totals(&QuadraticLattice::standard(4), 12).unwrap(), (1052, 842));
}

#[test]
fn window_counts_match_direct_scan() {
    let z3 = QuadraticLattice::standard(3);
    let c = [0.6f64, -0.0, 0.8];
    let theta = 0.7f64;
    let grid = [10i64, 30, 60];
    let got = rank1_window_counts(&z3, &grid, &[Window::cap(c.to_vec(), theta)]).unwrap();
    let vs = enumerate_vectors_norm_leq(&z3, 60).unwrap();
    for (k, &n) in grid.iter().enumerate() {
        let (mut mu, mut nu, mut nu_prime) = (0u64, 0u64, 0u64);
        for v in vs.iter().filter(|v| z3.norm(v) <= n as i128) {
            let len = ((v[0] * v[0] + v[1] * v[1] + v[2] * v[2]) as f64).sqrt();
            let cos = (v[0] as f64 * c[0] + v[1] as f64 * c[1] + v[2] as f64 * c[2]) / len;
            if cos >= theta.cos() {
                mu += 1;
            }
            // each line once, from the representative with positive cosine
            if cos.abs() >= theta.cos() && cos > 0.0 {
                nu += 1;
                if gcd(gcd(v[0], v[1]), v[2]) == 1 {
                    nu_prime += 1;
                }
            }
        }
        assert_eq!((got.mu[k][0], got.nu[k][0], got.nu_prime[k][0]), (mu, nu, nu_prime), "n={n}");
        assert_eq!(got.total_mu[k], 2 * got.total_nu[k]);
    }
}

#[test]
fn projective_cap_has_haar_mass_one_minus_cosine() {
    for theta in [0.3f64, 0.9, 1.3] {
        let w = Window::ProjectorCap { center: vec![0.0, 1.0, 2.0], half_angle: theta };
        let est = grassmann_haar_oracle(3, 1, &w, 200_000, 5).unwrap();
        let want = 1.0 - theta.cos();
        assert!((est.estimate - want).abs() < 4.0 * est.stderr + 1e-3, "θ={theta}: {est:?} vs {want}");
    }
    let half = Window::ProjectorBox { i: 0, j: 1, lo: 0.0, hi: 1.0 };
    let est = grassmann_haar_oracle(2, 1, &half, 100_000, 9).unwrap();
    assert!((est.estimate - 0.5).abs() < 4.0 * est.stderr);
}

#[test]
fn lines_of_z3_equidistribute() {
    let theta = 0.8f64;
    let w = Window::ProjectorCap { center: vec![1.0, 2.0, 2.0], half_angle: theta };
    let z3 = QuadraticLattice::standard(3);
    let got = rank1_window_counts(&z3, &[900], &[w]).unwrap();
    let ratio = got.nu_prime[0][0] as f64 / got.total_nu_prime[0] as f64;
    assert!((ratio - (1.0 - theta.cos())).abs() < 0.01, "{ratio}");
}

#[test]
fn oracle_is_additive_over_complements() {
    let l = a2_z1();
    let w = Window::cap(vec![1.0, 0.0, 1.0], 0.8);
    let not_w = Window::Not { inner: Box::new(w.clone()) };
    let a = oracle_limit_measure(&l, 1, &w, 50_000, 11).unwrap();
    let b = oracle_limit_measure(&l, 1, &not_w, 50_000, 11).unwrap();
    let all = oracle_limit_measure(&l, 1, &Window::All, 50_000, 11).unwrap();
    assert!((a.estimate + b.estimate - all.estimate).abs() < 1e-9 * all.estimate);
    // volume of {x : B(x, x) <= 1} is ball volume / sqrt(det B)
    let want = unit_ball_volume(3) / 3f64.sqrt();
    assert!((all.estimate - want).abs() < 4.0 * all.stderr + 1e-9, "{all:?} vs {want}");
}

#[test]
fn integrate_counts_projected_sublattices() {
    let z3 = QuadraticLattice::standard(3);
    let w = Window::ProjectorCap { center: vec![0.0, 0.0, 1.0], half_angle: 0.5 };
    let mut mu = EmpiricalMeasure::new(TargetSpace::Grassmannian);
    let mut inside = 0;
    for v in enumerate_vectors_norm_leq(&z3, 12).unwrap().into_iter().filter(|v| v.iter().find(|&&x| x != 0).unwrap() > &0) {
        let s = SublatticeHNF::from_basis(&z3, std::slice::from_ref(&v)).unwrap();
        let g = project_sublattice(&s).unwrap();
        if w.contains_projector(&g) {
            inside += 1;
        }
        mu.push(MeasurePoint::Grassmannian(g), 0.5).unwrap();
    }
    assert_eq!(integrate(&mu, &w).unwrap(), 0.5 * inside as f64);
    assert!(inside > 0);
}

fn pair() -> impl Strategy<Value = Vec<Vec<i64>>> {
    (prop::collection::vec(-5i64..=5, 3), prop::collection::vec(-5i64..=5, 3)).prop_filter_map("dependent", |(u, v)| {
        let cross = [u[1] * v[2] - u[2] * v[1], u[2] * v[0] - u[0] * v[2], u[0] * v[1] - u[1] * v[0]];
        cross.iter().any(|&c| c != 0).then_some(vec![u, v])
    })
}

fn max_diff(a: &GrassmannPoint, b: &GrassmannPoint) -> f64 {
    a.projector.iter().zip(&b.projector).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

proptest! {
    #[test]
    fn projection_has_unit_discriminant(t in pair()) {
        let l = a2_z1();
        let p = project_to_unit_discriminant(&l, &VectorTuple::new(t)).unwrap();
        let g: Vec<Vec<f64>> = p.vectors.iter().map(|u| p.vectors.iter().map(|v| l.inner_f64(u, v)).collect()).collect();
        prop_assert!((g[0][0] * g[1][1] - g[0][1] * g[1][0] - 1.0).abs() < 1e-9);
    }

    #[test]
    fn projection_ignores_scaling(t in pair(), c in 1i64..=6) {
        let l = a2_z1();
        let scaled: Vec<Vec<i64>> = t.iter().map(|v| v.iter().map(|x| c * x).collect()).collect();
        let p = project_to_unit_discriminant(&l, &VectorTuple::new(t.clone())).unwrap();
        let q = project_to_unit_discriminant(&l, &VectorTuple::new(scaled.clone())).unwrap();
        for (u, v) in p.vectors.iter().flatten().zip(q.vectors.iter().flatten()) {
            prop_assert!((u - v).abs() < 1e-9);
        }
        let a = project_to_grassmannian(&l, &VectorTuple::new(t)).unwrap();
        let b = project_to_grassmannian(&l, &VectorTuple::new(scaled)).unwrap();
        prop_assert!(max_diff(&a, &b) < 1e-9);
    }

    #[test]
    fn projector_depends_only_on_the_span(t in pair(), k in -4i64..=4) {
        let z3 = QuadraticLattice::standard(3);
        let moved = vec![t[0].clone(), t[1].iter().zip(&t[0]).map(|(y, x)| y + k * x).collect()];
        let a = project_to_grassmannian(&z3, &VectorTuple::new(t.clone())).unwrap();
        let b = project_to_grassmannian(&z3, &VectorTuple::new(moved)).unwrap();
        prop_assert!(max_diff(&a, &b) < 1e-9);
        prop_assert!(a.defect() < 1e-9);
        let trace: f64 = (0..3).map(|i| a.entry(i, i)).sum();
        prop_assert!((trace - 2.0).abs() < 1e-9);
        prop_assert!(gram_of_tuple(&z3, &VectorTuple::new(t)).unwrap().is_positive_definite());
    }

    #[test]
    fn counts_are_monotone(n in 1i64..60) {
        let z3 = QuadraticLattice::standard(3);
        let (nu, nu_prime) = rank1_totals(&z3, n).unwrap();
        let (nu2, nu_prime2) = rank1_totals(&z3, n + 1).unwrap();
        prop_assert!(nu_prime <= nu && nu <= nu2 && nu_prime <= nu_prime2);
    }
}
