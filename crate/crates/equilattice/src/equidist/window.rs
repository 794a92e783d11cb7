//! Test functions on the unit-discriminant surface, the Grassmannian and
//! the upper half-plane.

use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};

use super::grassmann::GrassmannPoint;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Window {
    All,
    Empty,
    /// Spherical cap of the given half-angle (radians) around `center`.
    /// Oriented on single vectors; on planes it acts like `ProjectorCap`.
    Cap { center: Vec<f64>, half_angle: f64 },
    /// Planes P with |P c|^2 >= cos^2(half_angle) |c|^2.
    ProjectorCap { center: Vec<f64>, half_angle: f64 },
    /// lo <= P[i][j] < hi
    ProjectorBox { i: usize, j: usize, lo: f64, hi: f64 },
    /// exp(-(1 - |P c|^2 / |c|^2) / width^2), a continuous test function.
    Bump { center: Vec<f64>, width: f64 },
    /// x_lo <= x < x_hi, y_lo <= y < y_hi in the upper half-plane.
    HalfPlaneBox { x_lo: f64, x_hi: f64, y_lo: f64, y_hi: f64 },
    Not { inner: Box<Window> },
    And { parts: Vec<Window> },
}

fn unit(c: &[f64]) -> Vec<f64> {
    let n = c.iter().map(|x| x * x).sum::<f64>().sqrt();
    c.iter().map(|x| x / n).collect()
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

impl Window {
    pub fn cap(center: Vec<f64>, half_angle: f64) -> Self {
        Window::Cap { center, half_angle }
    }

    pub fn is_empty(&self) -> bool {
        matches!(self, Window::Empty)
    }

    pub fn is_indicator(&self) -> bool {
        match self {
            Window::Bump { .. } => false,
            Window::Not { inner } => inner.is_indicator(),
            Window::And { parts } => parts.iter().all(Window::is_indicator),
            _ => true,
        }
    }

    fn check_dim(center: &[f64], d: usize) -> Result<()> {
        if center.len() != d {
            return Err(Error::DimensionMismatch { expected: d, got: center.len() });
        }
        Ok(())
    }

    /// Value at a point of the unit-discriminant surface given by r real
    /// vectors (only the spanned plane and, for r = 1, the direction matter).
    pub fn value_vectors(&self, p: &[Vec<f64>]) -> Result<f64> {
        let d = p.first().map_or(0, Vec::len);
        match self {
            Window::Cap { center, half_angle } if p.len() == 1 => {
                Self::check_dim(center, d)?;
                let c = unit(center);
                let u = &p[0];
                let nu = dot(u, u).sqrt();
                Ok(f64::from(u8::from(dot(&c, u) >= half_angle.cos() * nu)))
            }
            Window::HalfPlaneBox { .. } => Err(Error::InvalidArgument("half-plane window on a lattice target".into())),
            Window::All => Ok(1.0),
            Window::Empty => Ok(0.0),
            Window::Not { inner } => Ok(1.0 - inner.value_vectors(p)?),
            Window::And { parts } => parts.iter().try_fold(1.0, |acc, w| Ok(acc * w.value_vectors(p)?)),
            _ => self.value_projector(&GrassmannPoint::from_vectors(p)?),
        }
    }

    pub fn contains_vectors(&self, p: &[Vec<f64>]) -> bool {
        self.value_vectors(p).map(|v| v >= 0.5).unwrap_or(false)
    }

    /// Value at a plane, given by its orthogonal projector.
    pub fn value_projector(&self, g: &GrassmannPoint) -> Result<f64> {
        match self {
            Window::All => Ok(1.0),
            Window::Empty => Ok(0.0),
            Window::Cap { center, half_angle } | Window::ProjectorCap { center, half_angle } => {
                Self::check_dim(center, g.d)?;
                let c = unit(center);
                let cos = half_angle.cos();
                Ok(f64::from(u8::from(g.quadratic(&c) >= cos * cos)))
            }
            Window::ProjectorBox { i, j, lo, hi } => {
                if *i >= g.d || *j >= g.d {
                    return Err(Error::InvalidArgument(format!("box entry ({i}, {j}) outside dimension {}", g.d)));
                }
                let x = g.entry(*i, *j);
                Ok(f64::from(u8::from(*lo <= x && x < *hi)))
            }
            Window::Bump { center, width } => {
                Self::check_dim(center, g.d)?;
                let c = unit(center);
                Ok((-(1.0 - g.quadratic(&c)) / (width * width)).exp())
            }
            Window::HalfPlaneBox { .. } => Err(Error::InvalidArgument("half-plane window on a lattice target".into())),
            Window::Not { inner } => Ok(1.0 - inner.value_projector(g)?),
            Window::And { parts } => parts.iter().try_fold(1.0, |acc, w| Ok(acc * w.value_projector(g)?)),
        }
    }

    pub fn contains_projector(&self, g: &GrassmannPoint) -> bool {
        self.value_projector(g).map(|v| v >= 0.5).unwrap_or(false)
    }

    /// Value at a point of the upper half-plane.
    pub fn value_half_plane(&self, x: f64, y: f64) -> Result<f64> {
        match self {
            Window::All => Ok(1.0),
            Window::Empty => Ok(0.0),
            Window::HalfPlaneBox { x_lo, x_hi, y_lo, y_hi } => {
                Ok(f64::from(u8::from(*x_lo <= x && x < *x_hi && *y_lo <= y && y < *y_hi)))
            }
            Window::Not { inner } => Ok(1.0 - inner.value_half_plane(x, y)?),
            Window::And { parts } => parts.iter().try_fold(1.0, |acc, w| Ok(acc * w.value_half_plane(x, y)?)),
            _ => Err(Error::InvalidArgument("lattice window on the half-plane".into())),
        }
    }

    /// The set of points within `eps` of the window's boundary, when the
    /// window is an indicator with a parametrized boundary.
    pub fn shell(&self, eps: f64) -> Option<Window> {
        let band = |outer: Window, inner: Window| Window::And { parts: vec![outer, Window::Not { inner: Box::new(inner) }] };
        match self {
            Window::Cap { center, half_angle } => Some(band(
                Window::cap(center.clone(), half_angle + eps),
                Window::cap(center.clone(), (half_angle - eps).max(0.0)),
            )),
            Window::ProjectorCap { center, half_angle } => Some(band(
                Window::ProjectorCap { center: center.clone(), half_angle: half_angle + eps },
                Window::ProjectorCap { center: center.clone(), half_angle: (half_angle - eps).max(0.0) },
            )),
            Window::ProjectorBox { i, j, lo, hi } => Some(band(
                Window::ProjectorBox { i: *i, j: *j, lo: lo - eps, hi: hi + eps },
                Window::ProjectorBox { i: *i, j: *j, lo: lo + eps, hi: hi - eps },
            )),
            Window::HalfPlaneBox { x_lo, x_hi, y_lo, y_hi } => Some(band(
                Window::HalfPlaneBox { x_lo: x_lo - eps, x_hi: x_hi + eps, y_lo: y_lo - eps, y_hi: y_hi + eps },
                Window::HalfPlaneBox { x_lo: x_lo + eps, x_hi: x_hi - eps, y_lo: y_lo + eps, y_hi: y_hi - eps },
            )),
            Window::Not { inner } => inner.shell(eps),
            Window::All | Window::Empty => Some(Window::Empty),
            _ => None,
        }
    }
}

/// A window on tuples of an arbitrary-signature lattice: the projected
/// vectors must satisfy M(pr(v)_i, pr(v)_i) <= radius^2 for a positive
/// definite majorant M, and pr(v) must lie in `region`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TupleWindow {
    /// Defaults to `enumerate::default_majorant`.
    pub majorant: Option<Vec<Vec<i64>>>,
    pub radius: f64,
    pub region: Window,
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cap_on_vectors() {
        let w = Window::cap(vec![1.0, 0.0], 0.5);
        assert_eq!(w.value_vectors(&[vec![2.0, 0.1]]).unwrap(), 1.0);
        assert_eq!(w.value_vectors(&[vec![-2.0, 0.1]]).unwrap(), 0.0);
        let g = GrassmannPoint::from_vectors(&[vec![-2.0, 0.1]]).unwrap();
        assert_eq!(w.value_projector(&g).unwrap(), 1.0);
    }

    #[test]
    fn shells_are_thin() {
        let w = Window::cap(vec![0.0, 0.0, 1.0], 0.7);
        let s = w.shell(0.01).unwrap();
        let inside = [vec![0.0, (0.7f64).sin(), (0.7f64).cos()]];
        assert_eq!(s.value_vectors(&inside).unwrap(), 1.0);
        assert_eq!(s.value_vectors(&[vec![0.0, 0.0, 1.0]]).unwrap(), 0.0);
        assert!(Window::Bump { center: vec![1.0], width: 0.3 }.shell(0.1).is_none());
    }

    #[test]
    fn json_form() {
        let w: Window = serde_json::from_str(r#"{"kind": "cap", "center": [1, 0, 0, 0], "half_angle": 0.5}"#).unwrap();
        assert_eq!(w, Window::cap(vec![1.0, 0.0, 0.0, 0.0], 0.5));
    }
}
