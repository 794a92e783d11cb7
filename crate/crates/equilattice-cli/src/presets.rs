//! Named lattices and Lie configurations usable from config files.

use equilattice::forms::{self, LieSpec};
use equilattice::QuadraticLattice;
use serde::Serialize;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PresetInfo {
    pub category: &'static str,
    pub name: String,
    pub description: String,
}

const LATTICES: &[(&str, &str)] = &[
    ("Z1", "Z^1 with the standard form"),
    ("Z2", "Z^2 with the standard form"),
    ("Z3", "Z^3 with the standard form"),
    ("Z4", "Z^4 with the standard form"),
    ("Z5", "Z^5 with the standard form; d = 5 for the volume growth law"),
    ("Z6", "Z^6 with the standard form"),
    ("A2", "hexagonal lattice, Gram [[2,1],[1,2]]"),
    ("A2+Z2", "A2 ⊕ Z^2, rank 4, determinant 3"),
    ("D4", "D4 root lattice (Cartan matrix), determinant 4"),
    ("H", "hyperbolic plane, Gram [[0,1],[1,0]]; indefinite"),
];

pub fn lattice(name: &str) -> Option<QuadraticLattice> {
    let l = match name {
        "Z1" | "Z2" | "Z3" | "Z4" | "Z5" | "Z6" => QuadraticLattice::standard(name[1..].parse().ok()?),
        "A2" => QuadraticLattice::a2(),
        "A2+Z2" => {
            let s = QuadraticLattice::a2().direct_sum(&QuadraticLattice::standard(2));
            QuadraticLattice::new("A2+Z2", s.gram().to_vec()).ok()?
        }
        "D4" => QuadraticLattice::new(
            "D4",
            vec![vec![2, -1, 0, 0], vec![-1, 2, -1, -1], vec![0, -1, 2, 0], vec![0, -1, 0, 2]],
        )
        .ok()?,
        "H" => QuadraticLattice::hyperbolic_plane(),
        _ => return None,
    };
    Some(l)
}

pub fn lie(name: &str) -> Option<LieSpec> {
    forms::preset(name).ok()
}

pub fn list_presets() -> Vec<PresetInfo> {
    let lat = LATTICES.iter().map(|(n, d)| PresetInfo { category: "lattice", name: n.to_string(), description: d.to_string() });
    let lie = forms::PRESETS
        .iter()
        .map(|(n, d)| PresetInfo { category: "lie", name: n.to_string(), description: d.to_string() });
    lat.chain(lie).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_listed_preset_resolves() {
        for p in list_presets() {
            match p.category {
                "lattice" => assert!(lattice(&p.name).is_some(), "{}", p.name),
                _ => assert!(lie(&p.name).is_some(), "{}", p.name),
            }
        }
        assert!(lattice("Z9").is_none());
        assert_eq!(lattice("A2+Z2").unwrap().det(), 3.into());
        assert_eq!(lattice("D4").unwrap().det(), 4.into());
    }
}
