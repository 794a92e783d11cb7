use serde::{Deserialize, Serialize};

use super::grassmann::{GrassmannPoint, UnitDiscriminantPoint};
use super::window::Window;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TargetSpace {
    UnitDiscriminant,
    Grassmannian,
    HalfPlane,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "space", rename_all = "snake_case")]
pub enum MeasurePoint {
    UnitDiscriminant(UnitDiscriminantPoint),
    Grassmannian(GrassmannPoint),
    HalfPlane { x: f64, y: f64 },
}

impl MeasurePoint {
    pub fn space(&self) -> TargetSpace {
        match self {
            MeasurePoint::UnitDiscriminant(_) => TargetSpace::UnitDiscriminant,
            MeasurePoint::Grassmannian(_) => TargetSpace::Grassmannian,
            MeasurePoint::HalfPlane { .. } => TargetSpace::HalfPlane,
        }
    }
}

/// A finite sum of weighted point masses on one target space.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EmpiricalMeasure {
    pub target: TargetSpace,
    pub atoms: Vec<(MeasurePoint, f64)>,
}

impl EmpiricalMeasure {
    pub fn new(target: TargetSpace) -> Self {
        EmpiricalMeasure { target, atoms: Vec::new() }
    }

    pub fn push(&mut self, p: MeasurePoint, weight: f64) -> Result<()> {
        if p.space() != self.target {
            return Err(Error::InvalidArgument(format!("{:?} atom in a {:?} measure", p.space(), self.target)));
        }
        if !(weight > 0.0 && weight.is_finite()) {
            return Err(Error::InvalidArgument(format!("atom weight {weight}")));
        }
        self.atoms.push((p, weight));
        Ok(())
    }

    pub fn total_mass(&self) -> f64 {
        self.atoms.iter().map(|(_, w)| w).sum()
    }
}

/// Σ w_i f(x_i).
pub fn integrate(mu: &EmpiricalMeasure, f: &Window) -> Result<f64> {
    let mut s = 0.0;
    for (p, w) in &mu.atoms {
        let v = match p {
            MeasurePoint::UnitDiscriminant(u) => f.value_vectors(&u.vectors)?,
            MeasurePoint::Grassmannian(g) => f.value_projector(g)?,
            MeasurePoint::HalfPlane { x, y } => f.value_half_plane(*x, *y)?,
        };
        s += w * v;
    }
    Ok(s)
}
