use equilattice::density::*;
use equilattice::{GramMatrix, QuadraticLattice};
use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, ToPrimitive};
use proptest::prelude::*;

/// Residues x in (Z/q)^d with B(x, x) ≡ m (mod q), counted directly.
fn residue_oracle(l: &QuadraticLattice, m: i64, q: u64) -> u64 {
    let d = l.rank();
    let g = l.gram();
    let mut x = vec![0i64; d];
    let mut count = 0;
    loop {
        let mut v = 0i64;
        for i in 0..d {
            for j in 0..d {
                v += g[i][j] * x[i] * x[j];
            }
        }
        if (v - m).rem_euclid(q as i64) == 0 {
            count += 1;
        }
        let mut i = 0;
        while i < d {
            x[i] += 1;
            if (x[i] as u64) < q {
                break;
            }
            x[i] = 0;
            i += 1;
        }
        if i == d {
            return count;
        }
    }
}

fn lattices() -> Vec<QuadraticLattice> {
    vec![
        QuadraticLattice::standard(3),
        QuadraticLattice::a2().direct_sum(&QuadraticLattice::standard(1)),
        QuadraticLattice::diagonal("<1,3,5>", &[1, 3, 5]).unwrap(),
        QuadraticLattice::hyperbolic_plane().direct_sum(&QuadraticLattice::standard(1)),
    ]
}

#[test]
fn lifted_counts_match_residue_oracle() {
    for l in lattices() {
        for (a, s) in [(2u64, 1u32), (2, 2), (2, 3), (3, 1), (3, 2), (5, 1), (5, 2), (7, 1)] {
            let q = a.pow(s);
            for m in 0..8 {
                let want = residue_oracle(&l, m, q);
                let got = count_solutions_mod(&l, 1, &GramMatrix::scalar(m), a, s).unwrap();
                assert_eq!(got, BigUint::from(want), "{} m={m} a={a} s={s}", l.name());
            }
        }
    }
}

#[test]
fn odd_prime_densities_of_four_squares() {
    // x_1^2 + ... + x_4^2 = m has p^3 - p solutions mod p when p ∤ 2m
    let z4 = QuadraticLattice::standard(4);
    for p in [3u64, 5, 7, 11, 13] {
        for m in [1i64, 2, 6] {
            if (m as u64).is_multiple_of(p) {
                continue;
            }
            let res = local_density(&z4, 1, &GramMatrix::scalar(m), p, 6).unwrap();
            let p2 = BigInt::from(p * p);
            let want = BigRational::one() - BigRational::new(BigInt::one(), p2);
            assert_eq!(res.value().unwrap(), &want, "p={p} m={m}");
        }
    }
}

fn jacobi_r4(m: u64) -> f64 {
    let sigma: u64 = (1..=m).filter(|d| m.is_multiple_of(*d) && d % 4 != 0).sum();
    8.0 * sigma as f64
}

#[test]
fn siegel_weil_recovers_jacobi_four_squares() {
    // one class in the genus, so r_4(m) = π^2 m ∏ β_p; the product is cut
    // at 50, where the remaining factors ∏ (1 - 1/p^2) are within 0.5%
    let z4 = QuadraticLattice::standard(4);
    for m in 1..=12u64 {
        let v = siegel_weil_relative(&z4, &GramMatrix::scalar(m as i64), 50, 8).unwrap();
        let predicted = std::f64::consts::PI.powi(2) * v.value;
        let rel = predicted / jacobi_r4(m) - 1.0;
        assert!(rel.abs() < 0.006, "m={m}: {predicted} vs {}", jacobi_r4(m));
    }
}

#[test]
fn densities_have_prime_power_denominators() {
    let l = QuadraticLattice::diagonal("<1,3,5>", &[1, 3, 5]).unwrap();
    for p in [2u64, 3, 5, 7] {
        for m in 1..10 {
            let res = local_density(&l, 1, &GramMatrix::scalar(m), p, 8).unwrap();
            let mut den = res.value().unwrap().denom().clone();
            while (&den % p).to_u64() == Some(0) {
                den /= p;
            }
            assert_eq!(den, BigInt::one(), "p={p} m={m}");
            assert!(res.s0.unwrap() >= stabilization_floor(&l, &GramMatrix::scalar(m), p));
        }
    }
}

#[test]
fn plane_counts_match_scan() {
    let z3 = QuadraticLattice::standard(3);
    let m = GramMatrix::new(vec![vec![2, 1], vec![1, 2]]).unwrap();
    for (a, s) in [(2u64, 1u32), (2, 2), (3, 1), (5, 1)] {
        let scan = count_solutions_full_scan(&z3, 2, &m, a, s).unwrap();
        assert_eq!(count_solutions_mod(&z3, 2, &m, a, s).unwrap(), BigUint::from(scan), "a={a} s={s}");
    }
}

proptest! {
    #[test]
    fn counts_are_multiplicative_in_the_modulus(m in 0i64..40, li in 0usize..4) {
        // CRT: solutions mod 15 pair up solutions mod 3 and mod 5
        let l = &lattices()[li];
        let n3 = residue_oracle(l, m, 3);
        let n5 = residue_oracle(l, m, 5);
        prop_assert_eq!(residue_oracle(l, m, 15), n3 * n5);
        prop_assert_eq!(count_solutions_mod(l, 1, &GramMatrix::scalar(m), 3, 1).unwrap(), BigUint::from(n3));
    }

    #[test]
    fn level_one_count_is_invariant_under_unit_scaling(m in 1i64..30, u in 1i64..7) {
        // x -> ux permutes residues mod 7, so B = m and B = u^2 m have equal counts
        prop_assume!(u % 7 != 0);
        let l = QuadraticLattice::diagonal("<1,3,5>", &[1, 3, 5]).unwrap();
        let a = count_solutions_mod(&l, 1, &GramMatrix::scalar(m), 7, 1).unwrap();
        let b = count_solutions_mod(&l, 1, &GramMatrix::scalar(u * u * m), 7, 1).unwrap();
        prop_assert_eq!(a, b);
    }
}
