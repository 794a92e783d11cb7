use std::collections::BTreeSet;

use equilattice::enumerate::*;
use equilattice::hnf::{hnf, primitive_closure, saturation};
use equilattice::lattice::{discriminant, gram_of_tuple};
use equilattice::{GramMatrix, QuadraticLattice, SublatticeHNF, VectorTuple};
use num_bigint::BigInt;
use proptest::prelude::*;

fn a2_z1() -> QuadraticLattice {
    QuadraticLattice::a2().direct_sum(&QuadraticLattice::standard(1))
}

fn d4() -> QuadraticLattice {
    QuadraticLattice::new("D4", vec![vec![2, -1, 0, 0], vec![-1, 2, -1, -1], vec![0, -1, 2, 0], vec![0, -1, 0, 2]]).unwrap()
}

fn norm(g: &[Vec<i64>], v: &[i64]) -> i64 {
    (0..v.len()).map(|i| (0..v.len()).map(|j| g[i][j] * v[i] * v[j]).sum::<i64>()).sum()
}

/// Nonzero vectors of the box [-radius, radius]^d with norm <= n.
fn box_oracle(l: &QuadraticLattice, n: i64, radius: i64) -> BTreeSet<Vec<i64>> {
    let d = l.rank();
    let side = (2 * radius + 1) as usize;
    let mut out = BTreeSet::new();
    for mut code in 0..side.pow(d as u32) {
        let mut v = vec![0i64; d];
        for x in v.iter_mut() {
            *x = (code % side) as i64 - radius;
            code /= side;
        }
        if v.iter().any(|&x| x != 0) && norm(l.gram(), &v) <= n {
            out.insert(v);
        }
    }
    out
}

#[test]
fn vectors_match_box_oracle() {
    // radius >= sqrt(n / smallest eigenvalue)
    let cases = [
        (QuadraticLattice::standard(1), 30, 6),
        (QuadraticLattice::standard(3), 40, 7),
        (QuadraticLattice::a2(), 50, 9),
        (a2_z1(), 30, 7),
        (QuadraticLattice::diagonal("<1,2,5>", &[1, 2, 5]).unwrap(), 40, 7),
        (d4(), 6, 5),
    ];
    for (l, n, radius) in cases {
        let got: BTreeSet<Vec<i64>> = enumerate_vectors_norm_leq(&l, n).unwrap().into_iter().collect();
        assert_eq!(got, box_oracle(&l, n, radius), "{}", l.name());
        let scan: BTreeSet<Vec<i64>> = box_scan_norm_leq(&l, n).unwrap().into_iter().collect();
        assert_eq!(got, scan, "{}", l.name());
    }
}

#[test]
fn frozen_vector_counts() {
    // 24 roots, 24 vectors of norm 4, 96 of norm 6
    assert_eq!(enumerate_vectors_norm_leq(&d4(), 6).unwrap().len(), 144);
    assert_eq!(enumerate_vectors_norm_leq(&QuadraticLattice::standard(4), 50).unwrap().len(), 12576);
    assert_eq!(enumerate_vectors_norm_leq(&a2_z1(), 30).unwrap().len(), 424);
}

// (lattice, r, n, sublattices, primitive) from a separate row-Hermite
// implementation over all pairs of short vectors
#[test]
fn frozen_sublattice_counts() {
    let z3 = QuadraticLattice::standard(3);
    let cases = [
        (z3.clone(), 2, 20, 289, 157),
        (a2_z1(), 2, 20, 97, 55),
        (QuadraticLattice::standard(4), 2, 12, 1052, 842),
        (z3, 1, 50, 751, 625),
        (a2_z1(), 1, 40, 306, 253),
    ];
    for (l, r, n, total, prim) in cases {
        let subs = enumerate_sublattices_disc_leq(&l, r, n).unwrap();
        assert_eq!(subs.len(), total, "{} r={r} n={n}", l.name());
        assert_eq!(subs.iter().filter(|s| s.primitive).count(), prim, "{} r={r} n={n}", l.name());
        assert_eq!(enumerate_primitive_planes(&l, r, n).unwrap().len(), prim);
        let distinct: BTreeSet<_> = subs.iter().map(|s| s.basis.clone()).collect();
        assert_eq!(distinct.len(), subs.len());
    }
}

#[test]
fn tuples_span_exactly_the_enumerated_sublattices() {
    let l = a2_z1();
    let n = 8;
    let subs: BTreeSet<Vec<Vec<i64>>> = enumerate_sublattices_disc_leq(&l, 2, n).unwrap().into_iter().map(|s| s.basis).collect();
    let mut spanned = BTreeSet::new();
    for t in enumerate_tuples_disc_leq(&l, 2, n).unwrap() {
        let disc = discriminant(&l, &t).unwrap();
        assert!(disc > BigInt::from(0) && disc <= BigInt::from(n));
        spanned.insert(SublatticeHNF::from_tuple(&l, &t).unwrap().basis);
    }
    assert_eq!(spanned, subs);
}

#[test]
fn representations_match_pair_oracle() {
    let z3 = QuadraticLattice::standard(3);
    for m in [vec![vec![2, 1], vec![1, 2]], vec![vec![1, 0], vec![0, 2]], vec![vec![3, 1], vec![1, 3]], vec![vec![2, 0], vec![0, 2]]] {
        let vs = box_oracle(&z3, m[0][0].max(m[1][1]), 2);
        let mut want = BTreeSet::new();
        for u in &vs {
            for v in &vs {
                let t = VectorTuple::new(vec![u.clone(), v.clone()]);
                if gram_of_tuple(&z3, &t).unwrap().entries == m {
                    want.insert(t.vectors);
                }
            }
        }
        let got: BTreeSet<_> = enumerate_representations(&z3, &GramMatrix::new(m.clone()).unwrap()).unwrap().into_iter().map(|t| t.vectors).collect();
        assert_eq!(got, want, "{m:?}");
    }
}

fn full_rank_pair() -> impl Strategy<Value = Vec<Vec<i64>>> {
    (prop::collection::vec(-6i64..=6, 3), prop::collection::vec(-6i64..=6, 3)).prop_filter_map("dependent", |(u, v)| {
        let cross = [u[1] * v[2] - u[2] * v[1], u[2] * v[0] - u[0] * v[2], u[0] * v[1] - u[1] * v[0]];
        cross.iter().any(|&c| c != 0).then_some(vec![u, v])
    })
}

fn unimodular() -> impl Strategy<Value = [[i64; 2]; 2]> {
    prop::collection::vec((0usize..3, -3i64..=3), 1..6).prop_map(|ops| {
        let mut u = [[1, 0], [0, 1]];
        for (kind, c) in ops {
            u = match kind {
                0 => [[u[0][0] + c * u[1][0], u[0][1] + c * u[1][1]], u[1]],
                1 => [u[0], [u[1][0] + c * u[0][0], u[1][1] + c * u[0][1]]],
                _ => [u[1], [-u[0][0], -u[0][1]]],
            };
        }
        u
    })
}

fn transform(cols: &[Vec<i64>], u: &[[i64; 2]; 2]) -> Vec<Vec<i64>> {
    (0..2).map(|j| (0..3).map(|i| cols[0][i] * u[0][j] + cols[1][i] * u[1][j]).collect()).collect()
}

proptest! {
    #[test]
    fn hnf_is_a_basis_invariant(cols in full_rank_pair(), u in unimodular()) {
        prop_assert_eq!(hnf(&cols).unwrap(), hnf(&transform(&cols, &u)).unwrap());
    }

    #[test]
    fn discriminant_is_index_squared_times_saturation(cols in full_rank_pair(), u in unimodular()) {
        let l = a2_z1();
        let s = SublatticeHNF::from_basis(&l, &cols).unwrap();
        let (sat, index) = primitive_closure(&l, &s).unwrap();
        prop_assert_eq!(index, s.index);
        prop_assert_eq!(s.primitive, index == 1);
        prop_assert_eq!(s.disc.clone(), BigInt::from(index * index) * sat.disc);
        prop_assert_eq!(saturation(&cols).unwrap().0, sat.basis);
        let moved = VectorTuple::new(transform(&cols, &u));
        prop_assert_eq!(discriminant(&l, &moved).unwrap(), s.disc);
    }

    #[test]
    fn short_vectors_respect_the_minimum(n in 1i64..25) {
        let l = QuadraticLattice::diagonal("<2,3,7>", &[2, 3, 7]).unwrap();
        let vs = enumerate_vectors_norm_leq(&l, n).unwrap();
        prop_assert!(vs.iter().all(|v| (2..=n as i128).contains(&l.norm(v))));
        prop_assert_eq!(vs.len() % 2, 0);
    }
}
