//! Quadrature on circles and tori.

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "rule", rename_all = "snake_case")]
pub enum CircleRule {
    /// Equally spaced nodes: exact for trigonometric polynomials of degree < n.
    Trapezoid { nodes: usize },
    GaussLegendre { nodes: usize },
}

impl Default for CircleRule {
    fn default() -> Self {
        CircleRule::Trapezoid { nodes: 64 }
    }
}

/// Gauss–Legendre nodes and weights on [-1, 1].
pub fn gauss_legendre(n: usize) -> Vec<(f64, f64)> {
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 1.0;
        for _ in 0..100 {
            // three-term recurrence for P_n and its derivative
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            let pn = if n == 0 { 1.0 } else if n == 1 { x } else { p1 };
            let pm = if n == 1 { 1.0 } else { p0 };
            dp = n as f64 * (x * pn - pm) / (x * x - 1.0);
            let dx = pn / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        out.push((x, 2.0 / ((1.0 - x * x) * dp * dp)));
    }
    out
}

impl CircleRule {
    /// Nodes and weights on [0, period), weights summing to 1.
    pub fn nodes(&self, period: f64) -> Vec<(f64, f64)> {
        match *self {
            CircleRule::Trapezoid { nodes } => {
                (0..nodes).map(|i| (period * i as f64 / nodes as f64, 1.0 / nodes as f64)).collect()
            }
            CircleRule::GaussLegendre { nodes } => gauss_legendre(nodes)
                .into_iter()
                .map(|(x, w)| (0.5 * period * (x + 1.0), 0.5 * w))
                .collect(),
        }
    }

    /// Product rule on a torus with the given periods.
    pub fn torus(&self, periods: &[f64]) -> Vec<(Vec<f64>, f64)> {
        let mut grid = vec![(Vec::new(), 1.0)];
        for &p in periods {
            let one = self.nodes(p);
            grid = grid
                .into_iter()
                .flat_map(|(x, w)| {
                    one.iter().map(move |&(t, v)| {
                        let mut y = x.clone();
                        y.push(t);
                        (y, w * v)
                    })
                })
                .collect();
        }
        grid
    }
}
