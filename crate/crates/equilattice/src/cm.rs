//! Elliptic fixed points of Hecke correspondences on the modular curve
//! SL(2,Z)\H and their equidistribution.

use std::collections::BTreeSet;
use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::parallel::map_indices;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct HeckeMatrix {
    pub a: i64,
    pub b: i64,
    pub c: i64,
    pub d: i64,
}

impl HeckeMatrix {
    pub fn new(a: i64, b: i64, c: i64, d: i64) -> Self {
        HeckeMatrix { a, b, c, d }
    }

    pub fn det(&self) -> i64 {
        self.a * self.d - self.b * self.c
    }

    pub fn trace(&self) -> i64 {
        self.a + self.d
    }

    /// t² − 4N.
    pub fn discriminant(&self) -> i64 {
        self.trace() * self.trace() - 4 * self.det()
    }

    pub fn is_elliptic(&self) -> bool {
        self.det() > 0 && self.discriminant() < 0
    }

    pub fn act(&self, z: UHPoint) -> UHPoint {
        let (a, b, c, d) = (self.a as f64, self.b as f64, self.c as f64, self.d as f64);
        // (az + b)/(cz + d) with z = x + iy
        let (nx, ny) = (a * z.x + b, a * z.y);
        let (dx, dy) = (c * z.x + d, c * z.y);
        let den = dx * dx + dy * dy;
        UHPoint { x: (nx * dx + ny * dy) / den, y: (ny * dx - nx * dy) / den }
    }

    pub fn mul(&self, o: &HeckeMatrix) -> HeckeMatrix {
        HeckeMatrix {
            a: self.a * o.a + self.b * o.c,
            b: self.a * o.b + self.b * o.d,
            c: self.c * o.a + self.d * o.c,
            d: self.c * o.b + self.d * o.d,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct UHPoint {
    pub x: f64,
    pub y: f64,
}

impl UHPoint {
    pub fn new(x: f64, y: f64) -> Result<Self> {
        if !(y > 0.0) || !x.is_finite() || !y.is_finite() {
            return Err(Error::InvalidArgument(format!("point ({x}, {y}) is not in the upper half-plane")));
        }
        Ok(UHPoint { x, y })
    }
}

/// All [[a, b], [0, d]] with ad = N, 0 ≤ b < d.
pub fn hecke_coset_reps(n: i64) -> Result<Vec<HeckeMatrix>> {
    if n <= 0 {
        return Err(Error::InvalidArgument(format!("N = {n} must be positive")));
    }
    let mut out = Vec::new();
    for a in 1..=n {
        if n % a == 0 {
            let d = n / a;
            for b in 0..d {
                out.push(HeckeMatrix::new(a, b, 0, d));
            }
        }
    }
    Ok(out)
}

/// The unique fixed point of an elliptic matrix in the upper half-plane.
pub fn fixed_point(g: &HeckeMatrix) -> Result<UHPoint> {
    if !g.is_elliptic() {
        let kind = if g.det() <= 0 {
            "non-positive determinant"
        } else if g.discriminant() == 0 {
            "parabolic or scalar"
        } else {
            "hyperbolic"
        };
        return Err(Error::InvalidArgument(format!("matrix is not elliptic ({kind}); no regular fixed point")));
    }
    // elliptic forces c ≠ 0; −g acts identically
    let g = if g.c < 0 { HeckeMatrix::new(-g.a, -g.b, -g.c, -g.d) } else { *g };
    let root = ((-g.discriminant()) as f64).sqrt();
    Ok(UHPoint { x: (g.a - g.d) as f64 / (2.0 * g.c as f64), y: root / (2.0 * g.c as f64) })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Move {
    /// z ↦ z + n
    T(i64),
    /// z ↦ −1/z
    S,
}

const BOUNDARY_EPS: f64 = 1e-12;

/// Reduction into {−1/2 ≤ Re z < 1/2, |z| ≥ 1}, right arc excluded.
pub fn reduce_to_fundamental_domain(z: UHPoint) -> (UHPoint, Vec<Move>) {
    let mut z = z;
    let mut word = Vec::new();
    loop {
        let n = -(z.x + 0.5).floor() as i64;
        if n != 0 {
            z.x += n as f64;
            word.push(Move::T(n));
        }
        if z.x >= 0.5 - BOUNDARY_EPS {
            z.x -= 1.0;
            word.push(Move::T(-1));
        }
        let r2 = z.x * z.x + z.y * z.y;
        if r2 < 1.0 - BOUNDARY_EPS {
            z = UHPoint { x: -z.x / r2, y: z.y / r2 };
            word.push(Move::S);
            continue;
        }
        if r2 <= 1.0 + BOUNDARY_EPS && z.x > BOUNDARY_EPS {
            z = UHPoint { x: -z.x / r2, y: z.y / r2 };
            word.push(Move::S);
        }
        return (z, word);
    }
}

/// Membership in the fundamental domain with the boundary convention above.
pub fn in_fundamental_domain(z: UHPoint) -> bool {
    let r2 = z.x * z.x + z.y * z.y;
    z.x >= -0.5 - BOUNDARY_EPS
        && z.x < 0.5 - BOUNDARY_EPS
        && r2 >= 1.0 - BOUNDARY_EPS
        && !(r2 <= 1.0 + BOUNDARY_EPS && z.x > BOUNDARY_EPS)
}

/// Positive definite form A x² + B xy + C y².
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct BinaryForm {
    pub a: i64,
    pub b: i64,
    pub c: i64,
}

impl BinaryForm {
    pub fn discriminant(&self) -> i64 {
        self.b * self.b - 4 * self.a * self.c
    }

    pub fn is_reduced(&self) -> bool {
        self.a > 0 && self.b.abs() <= self.a && self.a <= self.c && (self.b >= 0 || (self.b.abs() != self.a && self.a != self.c))
    }

    /// The root (−B + i√|D|)/(2A) in the upper half-plane.
    pub fn root(&self) -> UHPoint {
        let r = ((-self.discriminant()) as f64).sqrt();
        UHPoint { x: -self.b as f64 / (2.0 * self.a as f64), y: r / (2.0 * self.a as f64) }
    }

    /// Gauss reduction of a positive definite form.
    pub fn reduce(mut self) -> BinaryForm {
        loop {
            // translate: B into (−A, A]
            if self.b.abs() > self.a || self.b == -self.a {
                let two_a = 2 * self.a;
                let k = (self.a - self.b).div_euclid(two_a);
                // x ↦ x + k y
                let nb = self.b + two_a * k;
                let nc = self.a * k * k + self.b * k + self.c;
                self.b = nb;
                self.c = nc;
            }
            if self.a > self.c {
                self = BinaryForm { a: self.c, b: -self.b, c: self.a };
                continue;
            }
            if self.a == self.c && self.b < 0 {
                self.b = -self.b;
            }
            return self;
        }
    }

    /// Orbifold weight of a reduced form: 1/2 at i, 1/3 at ρ, else 1; in sixths.
    pub fn weight_sixths(&self) -> u32 {
        if self.b == 0 && self.a == self.c {
            3
        } else if self.a == self.b && self.b == self.c {
            2
        } else {
            6
        }
    }
}

/// Reduced forms of discriminant D < 0, ordered by (A, B, C).
pub fn reduced_forms(d: i64) -> Vec<BinaryForm> {
    let mut out = Vec::new();
    if d >= 0 || d.rem_euclid(4) > 1 {
        return out;
    }
    let mut a = 1;
    while 3 * a * a <= -d {
        for b in -a + 1..=a {
            let num = b * b - d;
            if num % (4 * a) != 0 {
                continue;
            }
            let f = BinaryForm { a, b, c: num / (4 * a) };
            if f.is_reduced() {
                out.push(f);
            }
        }
        a += 1;
    }
    out
}

/// Hurwitz class number H(n) in sixths: Σ over reduced forms of
/// discriminant −n with weights 1/2 at i and 1/3 at ρ.
pub fn hurwitz_sixths(n: i64) -> u64 {
    reduced_forms(-n).iter().map(|f| f.weight_sixths() as u64).sum()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FixedPointRecord {
    pub n: i64,
    pub t: i64,
    pub d: i64,
    pub point: UHPoint,
    pub matrix: HeckeMatrix,
    pub form: BinaryForm,
    pub weight: f64,
    pub weight_sixths: u32,
}

fn record(n: i64, t: i64, f: BinaryForm) -> FixedPointRecord {
    // γ = [[a, b], [c, d]] with (c, d − a, −b) = f and a + d = t
    let matrix = HeckeMatrix::new((t - f.b) / 2, -f.c, f.a, (t + f.b) / 2);
    let w = f.weight_sixths();
    FixedPointRecord { n, t, d: t * t - 4 * n, point: f.root(), matrix, form: f, weight: w as f64 / 6.0, weight_sixths: w }
}

/// One record per Γ-class of (z, γ), γ integral elliptic of determinant N:
/// matrices with c > 0 whose fixed point lies in the closed fundamental
/// domain, deduplicated through the reduced form (c, d − a, −b).
pub fn elliptic_fixed_points(n: i64) -> Result<Vec<FixedPointRecord>> {
    if n <= 0 {
        return Err(Error::InvalidArgument(format!("N = {n} must be positive")));
    }
    let mut seen = BTreeSet::new();
    let mut t = 0;
    while t * t < 4 * n {
        t += 1;
    }
    for t in -(t - 1)..t {
        // fixed point in the closure: |a − d| ≤ c and Im z ≥ √3/2
        let disc = 4 * n - t * t;
        let mut c = 1;
        while 3 * c * c <= disc {
            for diff in -c..=c {
                if (t + diff) % 2 != 0 {
                    continue;
                }
                let (a, d) = ((t - diff) / 2, (t + diff) / 2);
                let num = a * d - n;
                if num % c != 0 {
                    continue;
                }
                let g = HeckeMatrix::new(a, num / c, c, d);
                debug_assert!(g.det() == n && g.is_elliptic());
                let f = BinaryForm { a: g.c, b: g.d - g.a, c: -g.b };
                if f.c < f.a {
                    continue;
                }
                seen.insert((t, f.reduce()));
            }
            c += 1;
        }
    }
    Ok(seen.into_iter().map(|(t, f)| record(n, t, f)).collect())
}

/// Fixed-point classes of one trace next to the reduced forms of the
/// same discriminant.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceCount {
    pub n: i64,
    pub t: i64,
    pub d: i64,
    pub classes: usize,
    pub class_weight_sixths: u64,
    pub forms: usize,
    pub form_weight_sixths: u64,
}

impl TraceCount {
    pub fn agrees(&self) -> bool {
        self.classes == self.forms && self.class_weight_sixths == self.form_weight_sixths
    }
}

/// Per-trace comparison of `elliptic_fixed_points(n)` with `reduced_forms`.
pub fn trace_class_counts(n: i64) -> Result<Vec<TraceCount>> {
    let recs = elliptic_fixed_points(n)?;
    let mut t_max = 0;
    while (t_max + 1) * (t_max + 1) < 4 * n {
        t_max += 1;
    }
    Ok((-t_max..=t_max)
        .map(|t| {
            let d = t * t - 4 * n;
            let mine: Vec<&FixedPointRecord> = recs.iter().filter(|r| r.t == t).collect();
            let forms = reduced_forms(d);
            TraceCount {
                n,
                t,
                d,
                classes: mine.len(),
                class_weight_sixths: mine.iter().map(|r| r.weight_sixths as u64).sum(),
                forms: forms.len(),
                form_weight_sixths: forms.iter().map(|f| f.weight_sixths() as u64).sum(),
            }
        })
        .collect())
}

/// Σ_t H(4N − t²) over t² < 4N, from the Kronecker–Hurwitz relation
/// Σ_{t ∈ Z} H(4N − t²) = 2σ(N) − Σ_{d | N} min(d, N/d) with H(0) = −1/12;
/// returned in sixths.
pub fn kronecker_hurwitz_sixths(n: i64) -> i64 {
    let mut sigma = 0;
    let mut mins = 0;
    for d in 1..=n {
        if n % d == 0 {
            sigma += d;
            mins += d.min(n / d);
        }
    }
    let r = (n as f64).sqrt().round() as i64;
    let square = r * r == n;
    6 * (2 * sigma - mins) + if square { 1 } else { 0 }
}

/// Box [x0, x1] × [y0, y1] intersected with the fundamental domain;
/// `y1 = None` means unbounded.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Region {
    pub x0: f64,
    pub x1: f64,
    pub y0: f64,
    #[serde(default)]
    pub y1: Option<f64>,
}

impl Region {
    pub fn whole() -> Self {
        Region { x0: -0.5, x1: 0.5, y0: 0.0, y1: None }
    }

    pub fn contains(&self, z: UHPoint) -> bool {
        z.x >= self.x0 && z.x < self.x1 && z.y >= self.y0 && self.y1.is_none_or(|y1| z.y < y1) && in_fundamental_domain(z)
    }

    /// Hyperbolic area ∫∫ dx dy / y² in closed form.
    pub fn area(&self) -> f64 {
        let x0 = self.x0.max(-0.5);
        let x1 = self.x1.min(0.5);
        if x1 <= x0 {
            return 0.0;
        }
        let inv_y1 = self.y1.map_or(0.0, |y| 1.0 / y);
        let mut cuts = vec![x0, x1];
        for y in [Some(self.y0), self.y1].into_iter().flatten() {
            if y < 1.0 {
                let s = (1.0 - y * y).sqrt();
                cuts.extend([-s, s]);
            }
        }
        cuts.retain(|&c| c >= x0 && c <= x1);
        cuts.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let mut total = 0.0;
        for w in cuts.windows(2) {
            let (a, b) = (w[0], w[1]);
            if b <= a {
                continue;
            }
            let mid = 0.5 * (a + b);
            let arc = (1.0 - mid * mid).sqrt();
            let lower = arc.max(self.y0);
            if lower * inv_y1 >= 1.0 {
                continue;
            }
            total += if arc >= self.y0 {
                (b.asin() - a.asin()) - (b - a) * inv_y1
            } else {
                (b - a) * (1.0 / self.y0 - inv_y1)
            };
        }
        total
    }
}

/// Four full-width bands of equal area π/12, cut at y = 4/π, 6/π, 12/π.
/// Full-width bands count points on the mirror lines Re z = 0, −1/2 and on
/// the unit arc without favouring either side.
pub fn default_regions() -> Vec<(String, Region)> {
    let cuts = [0.0, 4.0 / PI, 6.0 / PI, 12.0 / PI];
    (0..4)
        .map(|i| {
            let y1 = cuts.get(i + 1).copied();
            (format!("R{}", i + 1), Region { x0: -0.5, x1: 0.5, y0: cuts[i], y1 })
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegionRow {
    pub n: i64,
    pub region_id: String,
    pub count: f64,
    pub area: f64,
    pub ratio: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CmReport {
    pub rows: Vec<RegionRow>,
    /// Counts and ratios summed over all N.
    pub aggregate: Vec<RegionRow>,
    /// Total weighted count over total area (π/3), summed over N.
    pub b_estimate: f64,
    /// max |r_i / r_j − 1| over region pairs of the aggregate ratios.
    pub max_pairwise_deviation: f64,
}

pub fn cm_equidistribution_report(ns: &[i64], regions: &[(String, Region)]) -> Result<CmReport> {
    let per_n: Vec<Result<(i64, Vec<f64>, f64)>> = map_indices(ns.len(), |i| {
        let recs = elliptic_fixed_points(ns[i])?;
        let mut counts = vec![0.0; regions.len()];
        let mut total = 0.0;
        for r in &recs {
            total += r.weight;
            for (k, (_, reg)) in regions.iter().enumerate() {
                if reg.contains(r.point) {
                    counts[k] += r.weight;
                }
            }
        }
        Ok((ns[i], counts, total))
    });
    let areas: Vec<f64> = regions.iter().map(|(_, r)| r.area()).collect();
    let ratio = |c: f64, a: f64| if a > 0.0 { c / a } else { 0.0 };
    let mut rows = Vec::new();
    let mut agg = vec![0.0; regions.len()];
    let mut grand = 0.0;
    for res in per_n {
        let (n, counts, total) = res?;
        grand += total;
        for (k, (id, _)) in regions.iter().enumerate() {
            agg[k] += counts[k];
            rows.push(RegionRow { n, region_id: id.clone(), count: counts[k], area: areas[k], ratio: ratio(counts[k], areas[k]) });
        }
    }
    let aggregate: Vec<RegionRow> = regions
        .iter()
        .enumerate()
        .map(|(k, (id, _))| RegionRow { n: 0, region_id: id.clone(), count: agg[k], area: areas[k], ratio: ratio(agg[k], areas[k]) })
        .collect();
    let mut dev: f64 = 0.0;
    for i in 0..aggregate.len() {
        for j in 0..aggregate.len() {
            if i != j && aggregate[j].ratio > 0.0 && aggregate[i].area > 0.0 {
                dev = dev.max((aggregate[i].ratio / aggregate[j].ratio - 1.0).abs());
            }
        }
    }
    Ok(CmReport { rows, aggregate, b_estimate: grand / (PI / 3.0), max_pairwise_deviation: dev })
}
