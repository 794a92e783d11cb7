//! Named configurations.

use std::f64::consts::PI;

use super::lie::{HodgeBlockSpec, LieSpec, OrientationSpec, SubspaceSpec, TorusSpec};
use crate::{Error, Result};

pub const PRESETS: &[(&str, &str)] = &[
    ("so21-geodesic", "SO(2,1) ⊃ SO(2), H = boosts along a geodesic of the hyperbolic plane, L trivial; the pull-push form vanishes"),
    ("so22-weight2", "SO(2,2) weight-2 period domain, H fixing a positive vector, K/L = SO(2) on the positive plane; Hodge block V^{2,0}"),
    ("sl2xsl2-diagonal", "SL(2,R) × SL(2,R) with diagonal H, K = SO(2)², L = diagonal SO(2)"),
    ("su11-disc", "SU(1,1) ≅ SL(2,R) over the disc, H = K = U(1); Hodge block V^{1,0}"),
    ("so3-sphere", "compact SO(3) over the 2-sphere, H = K = SO(2)"),
];

/// Basis of so(B) for B = diag(1^p, (−1)^q): for i < j (1-based labels),
/// R_ij = E_ji − E_ij when both signs agree, B_ij = E_ij + E_ji otherwise.
fn so_pq(p: usize, q: usize) -> (Vec<String>, Vec<Vec<Vec<f64>>>) {
    let n = p + q;
    let mut labels = Vec::new();
    let mut mats = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            let mut m = vec![vec![0.0; n]; n];
            if (i < p) == (j < p) {
                m[j][i] = 1.0;
                m[i][j] = -1.0;
                labels.push(format!("R{}{}", i + 1, j + 1));
            } else {
                m[i][j] = 1.0;
                m[j][i] = 1.0;
                labels.push(format!("B{}{}", i + 1, j + 1));
            }
            mats.push(m);
        }
    }
    (labels, mats)
}

/// sl(2,R) basis: T = rotation generator, X1 = diag(1,−1), X2 = [[0,1],[1,0]].
fn sl2() -> [[[f64; 2]; 2]; 3] {
    [[[0.0, -1.0], [1.0, 0.0]], [[1.0, 0.0], [0.0, -1.0]], [[0.0, 1.0], [1.0, 0.0]]]
}

fn unit(dim: usize, i: usize) -> Vec<f64> {
    let mut v = vec![0.0; dim];
    v[i] = 1.0;
    v
}

fn base(name: &str, labels: Vec<String>, matrices: Vec<Vec<Vec<f64>>>, h: SubspaceSpec, k: SubspaceSpec, l: SubspaceSpec) -> LieSpec {
    LieSpec {
        name: name.into(),
        labels,
        matrices: Some(matrices),
        structure_constants: None,
        h,
        k,
        l,
        fiber: None,
        k_net: None,
        complex_structure: None,
        hodge_block: None,
        orientation: OrientationSpec::default(),
    }
}

pub fn preset(name: &str) -> Result<LieSpec> {
    use SubspaceSpec::{Indices, Span};
    match name {
        "so21-geodesic" => {
            // R12, B13, B23
            let (labels, mats) = so_pq(2, 1);
            let mut s = base(name, labels, mats, Indices(vec![1]), Indices(vec![0]), Indices(vec![]));
            s.fiber = Some(TorusSpec { generators: vec![unit(3, 0)], periods: vec![2.0 * PI] });
            Ok(s)
        }
        "so22-weight2" => {
            // R12, B13, B14, B23, B24, R34
            let (labels, mats) = so_pq(2, 2);
            let mut s = base(name, labels, mats, Indices(vec![3, 4, 5]), Indices(vec![0, 5]), Indices(vec![5]));
            s.fiber = Some(TorusSpec { generators: vec![unit(6, 0)], periods: vec![2.0 * PI] });
            s.k_net = Some(TorusSpec { generators: vec![unit(6, 0), unit(6, 5)], periods: vec![2.0 * PI, 2.0 * PI] });
            // Z = R34 acts by +i on e3 − i e4
            s.complex_structure = Some(unit(6, 5));
            s.hodge_block = Some(HodgeBlockSpec {
                algebra: Indices(vec![5]),
                vectors: vec![vec![[0.0, 0.0], [0.0, 0.0], [1.0, 0.0], [0.0, -1.0]]],
            });
            Ok(s)
        }
        "sl2xsl2-diagonal" => {
            let mut mats = Vec::new();
            let mut labels = Vec::new();
            for f in 0..2 {
                for (x, lab) in sl2().iter().zip(["T", "X1", "X2"]) {
                    let mut m = vec![vec![0.0; 4]; 4];
                    for i in 0..2 {
                        for j in 0..2 {
                            m[2 * f + i][2 * f + j] = x[i][j];
                        }
                    }
                    mats.push(m);
                    labels.push(format!("{lab}_{}", f + 1));
                }
            }
            let diag = |i: usize| {
                let mut v = vec![0.0; 6];
                v[i] = 1.0;
                v[i + 3] = 1.0;
                v
            };
            let mut s = base(
                name,
                labels,
                mats,
                Span(vec![diag(0), diag(1), diag(2)]),
                Indices(vec![0, 3]),
                Span(vec![diag(0)]),
            );
            // exp(θ(T, −T)) ↦ R_{2θ} in K/L
            s.fiber = Some(TorusSpec { generators: vec![vec![1.0, 0.0, 0.0, -1.0, 0.0, 0.0]], periods: vec![PI] });
            s.k_net = Some(TorusSpec { generators: vec![unit(6, 0), unit(6, 3)], periods: vec![2.0 * PI, 2.0 * PI] });
            s.complex_structure = Some(vec![0.5, 0.0, 0.0, 0.5, 0.0, 0.0]);
            Ok(s)
        }
        "su11-disc" => {
            let mats: Vec<Vec<Vec<f64>>> = sl2().iter().map(|m| m.iter().map(|r| r.to_vec()).collect()).collect();
            let mut s = base(
                name,
                vec!["T".into(), "X1".into(), "X2".into()],
                mats,
                Indices(vec![0]),
                Indices(vec![0]),
                Indices(vec![0]),
            );
            s.k_net = Some(TorusSpec { generators: vec![unit(3, 0)], periods: vec![2.0 * PI] });
            s.complex_structure = Some(vec![0.5, 0.0, 0.0]);
            s.hodge_block =
                Some(HodgeBlockSpec { algebra: Indices(vec![0]), vectors: vec![vec![[1.0, 0.0], [0.0, -1.0]]] });
            Ok(s)
        }
        "so3-sphere" => {
            let (labels, mats) = so_pq(3, 0);
            let mut s = base(name, labels, mats, Indices(vec![0]), Indices(vec![0]), Indices(vec![0]));
            s.k_net = Some(TorusSpec { generators: vec![unit(3, 0)], periods: vec![2.0 * PI] });
            Ok(s)
        }
        _ => Err(Error::InvalidArgument(format!("unknown preset {name:?}"))),
    }
}
