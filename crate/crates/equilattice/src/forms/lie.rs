//! Validated Lie algebra configurations (g, h, k, l) with Killing form,
//! orthogonal complements and orientations.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::exterior::Space;
use super::linalg::{canonical_basis, coords, hcat, intersection, orthogonal_complement, rank, Split};
use crate::{Error, Result};

/// Structural identities (Jacobi, closure) are checked to this relative
/// accuracy.
pub const STRUCTURE_TOL: f64 = 1e-10;

/// A subspace given by basis indices or by spanning coefficient vectors.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum SubspaceSpec {
    Indices(Vec<usize>),
    Span(Vec<Vec<f64>>),
}

/// Commuting generators of a torus with their periods.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TorusSpec {
    pub generators: Vec<Vec<f64>>,
    pub periods: Vec<f64>,
}

/// A block k^{p,q} of k acting on a Hodge subspace V^{p,q} of the matrix
/// representation, given by complex basis vectors as (re, im) pairs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HodgeBlockSpec {
    pub algebra: SubspaceSpec,
    pub vectors: Vec<Vec<[f64; 2]>>,
}

/// Orientation signs: +1 keeps the canonical basis order, -1 flips it.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct OrientationSpec {
    pub k_over_l: i8,
    pub g_over_k: i8,
    pub h_over_l: i8,
}

impl Default for OrientationSpec {
    fn default() -> Self {
        OrientationSpec { k_over_l: 1, g_over_k: 1, h_over_l: 1 }
    }
}

/// Raw description of a configuration, as loaded from JSON.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LieSpec {
    pub name: String,
    #[serde(default)]
    pub labels: Vec<String>,
    /// Basis of a matrix Lie algebra; the bracket is the commutator.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub matrices: Option<Vec<Vec<Vec<f64>>>>,
    /// c[i][j][k] with [e_i, e_j] = Σ_k c[i][j][k] e_k.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub structure_constants: Option<Vec<Vec<Vec<f64>>>>,
    pub h: SubspaceSpec,
    pub k: SubspaceSpec,
    pub l: SubspaceSpec,
    /// Torus generators of K/L (Killing-orthogonal to l) with periods.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fiber: Option<TorusSpec>,
    /// Torus in K searched by the vanishing criterion; defaults to the fiber.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub k_net: Option<TorusSpec>,
    /// Z ∈ k with J = −ad_Z on g/k.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub complex_structure: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub hodge_block: Option<HodgeBlockSpec>,
    #[serde(default)]
    pub orientation: OrientationSpec,
}

#[derive(Debug, Clone)]
pub struct HodgeBlock {
    /// Basis of k^{p,q}.
    pub algebra: DMatrix<f64>,
    /// Basis of V^{p,q} in the matrix representation.
    pub vectors: DMatrix<Complex64>,
}

/// A validated configuration. Bases are columns of coefficient vectors.
#[derive(Debug, Clone)]
pub struct LieConfiguration {
    pub spec: LieSpec,
    pub dim: usize,
    pub labels: Vec<String>,
    /// ad matrices of the basis elements: column j of `ad[i]` is [e_i, e_j].
    pub ad: Vec<DMatrix<f64>>,
    pub killing: DMatrix<f64>,
    pub h: DMatrix<f64>,
    pub k: DMatrix<f64>,
    pub l: DMatrix<f64>,
    /// Oriented basis of k/l realized in k ∩ l^⊥ (the fiber generators).
    pub a: DMatrix<f64>,
    pub periods: Vec<f64>,
    /// Oriented basis of g/k realized as k^⊥.
    pub m: DMatrix<f64>,
    /// Oriented basis of h/l realized as h ∩ l^⊥.
    pub b: DMatrix<f64>,
    /// Oriented basis of g/h realized as h^⊥ (orientation induced).
    pub n: DMatrix<f64>,
    pub k_net: (DMatrix<f64>, Vec<f64>),
    pub z: Option<DVector<f64>>,
    /// J on g/k in m-coordinates.
    pub j: Option<DMatrix<f64>>,
    pub matrices: Option<Vec<DMatrix<f64>>>,
    pub hodge: Option<HodgeBlock>,
    /// sqrt|det κ| on the oriented basis of n: ω_{G/H}(n_1, …, n_p).
    pub omega_gh_basis: f64,
    pub(crate) g_l: Split,
    pub(crate) g_k: Split,
    pub(crate) g_h: Split,
}

fn subspace(dim: usize, s: &SubspaceSpec, what: &str) -> Result<DMatrix<f64>> {
    let cols: Vec<DVector<f64>> = match s {
        SubspaceSpec::Indices(ix) => {
            let mut out = Vec::new();
            for &i in ix {
                if i >= dim {
                    return Err(Error::InvalidArgument(format!("{what}: index {i} out of range for dimension {dim}")));
                }
                let mut v = DVector::zeros(dim);
                v[i] = 1.0;
                out.push(v);
            }
            out
        }
        SubspaceSpec::Span(vs) => {
            let mut out = Vec::new();
            for v in vs {
                if v.len() != dim {
                    return Err(Error::InvalidArgument(format!(
                        "{what}: spanning vector has length {}, expected {dim}",
                        v.len()
                    )));
                }
                out.push(DVector::from_vec(v.clone()));
            }
            out
        }
    };
    if cols.is_empty() {
        return Ok(DMatrix::zeros(dim, 0));
    }
    Ok(canonical_basis(&DMatrix::from_columns(&cols)))
}

fn constants_from_matrices(ms: &[DMatrix<f64>]) -> Result<Vec<Vec<Vec<f64>>>> {
    let n = ms.len();
    let s = ms[0].nrows();
    let flat = DMatrix::from_columns(
        &ms.iter().map(|m| DVector::from_iterator(s * s, m.iter().copied())).collect::<Vec<_>>(),
    );
    if rank(&flat) != n {
        return Err(Error::Degenerate("basis matrices are linearly dependent".into()));
    }
    let scale = ms.iter().map(|m| m.amax()).fold(1.0f64, f64::max);
    let mut c = vec![vec![vec![0.0; n]; n]; n];
    for i in 0..n {
        for j in 0..n {
            let br = &ms[i] * &ms[j] - &ms[j] * &ms[i];
            let (x, r) = coords(&flat, &DVector::from_iterator(s * s, br.iter().copied()));
            if r > 1e-9 * scale * scale {
                return Err(Error::Validation(format!("span of the matrices is not closed under commutators ({i},{j})")));
            }
            for k in 0..n {
                c[i][j][k] = if x[k].abs() < 1e-14 * scale * scale { 0.0 } else { x[k] };
            }
        }
    }
    Ok(c)
}

/// Basis (w_1, J w_1, w_2, J w_2, …) of a J-stable subspace, picked greedily
/// from `basis`.
fn complex_adapted(basis: &DMatrix<f64>, j: &dyn Fn(&DVector<f64>) -> DVector<f64>) -> Result<DMatrix<f64>> {
    if basis.ncols() == 0 {
        return Ok(basis.clone());
    }
    let mut chosen: Vec<DVector<f64>> = Vec::new();
    for c in basis.column_iter() {
        if chosen.len() == basis.ncols() {
            break;
        }
        let w = c.into_owned();
        let mut trial = chosen.clone();
        trial.push(w.clone());
        trial.push(j(&w));
        if rank(&DMatrix::from_columns(&trial)) == trial.len() {
            chosen = trial;
        }
    }
    if chosen.len() != basis.ncols() {
        return Err(Error::Validation("subspace is not J-stable".into()));
    }
    for w in &chosen {
        if coords(basis, &j(w)).1 > 1e-8 {
            return Err(Error::Validation("subspace is not J-stable".into()));
        }
    }
    Ok(DMatrix::from_columns(&chosen))
}

fn orient(mut m: DMatrix<f64>, sign: i8) -> DMatrix<f64> {
    if sign < 0 && m.ncols() > 0 {
        m.column_mut(0).neg_mut();
    }
    m
}

impl LieConfiguration {
    pub fn from_spec(spec: LieSpec) -> Result<Self> {
        let matrices: Option<Vec<DMatrix<f64>>> = match &spec.matrices {
            None => None,
            Some(ms) => {
                if ms.is_empty() {
                    return Err(Error::InvalidArgument("empty matrix basis".into()));
                }
                let s = ms[0].len();
                let mut out = Vec::new();
                for m in ms {
                    if m.len() != s || m.iter().any(|r| r.len() != s) {
                        return Err(Error::InvalidArgument("basis matrices must be square of equal size".into()));
                    }
                    out.push(DMatrix::from_fn(s, s, |i, j| m[i][j]));
                }
                Some(out)
            }
        };
        let c = match (&spec.structure_constants, &matrices) {
            (Some(c), None) => c.clone(),
            (None, Some(ms)) => constants_from_matrices(ms)?,
            (Some(_), Some(_)) => {
                return Err(Error::InvalidArgument("give either matrices or structure_constants, not both".into()))
            }
            (None, None) => return Err(Error::InvalidArgument("missing structure_constants or matrices".into())),
        };
        let dim = c.len();
        if dim == 0 || c.iter().any(|r| r.len() != dim || r.iter().any(|x| x.len() != dim)) {
            return Err(Error::InvalidArgument("structure constants must be a dim × dim × dim array".into()));
        }
        if dim > 12 {
            return Err(Error::Unsupported(format!("dim g = {dim} > 12")));
        }
        let scale = c.iter().flatten().flatten().fold(1.0f64, |m, x| m.max(x.abs()));
        for i in 0..dim {
            for j in 0..dim {
                for k in 0..dim {
                    if (c[i][j][k] + c[j][i][k]).abs() > STRUCTURE_TOL * scale {
                        return Err(Error::Validation(format!("bracket not antisymmetric at ({i},{j})")));
                    }
                }
            }
        }
        let ad: Vec<DMatrix<f64>> = (0..dim).map(|i| DMatrix::from_fn(dim, dim, |k, j| c[i][j][k])).collect();
        // Jacobi ⇔ ad is a homomorphism: [ad_i, ad_j] = ad_{[e_i, e_j]}
        for i in 0..dim {
            for j in 0..dim {
                let lhs = &ad[i] * &ad[j] - &ad[j] * &ad[i];
                let mut rhs = DMatrix::zeros(dim, dim);
                for k in 0..dim {
                    rhs += &ad[k] * c[i][j][k];
                }
                let err = (lhs - rhs).amax();
                if err > STRUCTURE_TOL * scale * scale {
                    return Err(Error::Validation(format!("Jacobi identity fails on ({i},{j},·): {err:e}")));
                }
            }
        }
        let killing = DMatrix::from_fn(dim, dim, |i, j| (&ad[i] * &ad[j]).trace());
        let labels = if spec.labels.is_empty() {
            (0..dim).map(|i| format!("e{i}")).collect()
        } else if spec.labels.len() == dim {
            spec.labels.clone()
        } else {
            return Err(Error::InvalidArgument(format!("{} labels for dimension {dim}", spec.labels.len())));
        };

        let mut cfg = LieConfiguration {
            dim,
            labels,
            ad,
            killing: killing.clone(),
            h: subspace(dim, &spec.h, "h")?,
            k: subspace(dim, &spec.k, "k")?,
            l: subspace(dim, &spec.l, "l")?,
            a: DMatrix::zeros(dim, 0),
            periods: Vec::new(),
            m: DMatrix::zeros(dim, 0),
            b: DMatrix::zeros(dim, 0),
            n: DMatrix::zeros(dim, 0),
            k_net: (DMatrix::zeros(dim, 0), Vec::new()),
            z: None,
            j: None,
            matrices,
            hodge: None,
            omega_gh_basis: 1.0,
            g_l: Split::new(&DMatrix::zeros(dim, 0), &DMatrix::identity(dim, dim))?,
            g_k: Split::new(&DMatrix::zeros(dim, 0), &DMatrix::identity(dim, dim))?,
            g_h: Split::new(&DMatrix::zeros(dim, 0), &DMatrix::identity(dim, dim))?,
            spec: spec.clone(),
        };

        cfg.check_nondegenerate(&DMatrix::identity(dim, dim), "g")?;
        for (name, s) in [("h", &cfg.h), ("k", &cfg.k), ("l", &cfg.l)] {
            cfg.check_subalgebra(s, name)?;
            cfg.check_nondegenerate(s, name)?;
        }
        let hk = intersection(&cfg.h, &cfg.k);
        let contained = |s: &DMatrix<f64>, t: &DMatrix<f64>| s.column_iter().all(|v| coords(t, &v.into_owned()).1 < 1e-9);
        if hk.ncols() != cfg.l.ncols() || !contained(&cfg.l, &cfg.h) || !contained(&cfg.l, &cfg.k) {
            return Err(Error::Validation(format!(
                "l is not h ∩ k (dim l = {}, dim h∩k = {})",
                cfg.l.ncols(),
                hk.ncols()
            )));
        }

        let l_perp = orthogonal_complement(&killing, &cfg.l);
        let fiber_dim = cfg.k.ncols() - cfg.l.ncols();
        match &spec.fiber {
            Some(t) => {
                let (a, periods) = cfg.torus(t, "fiber")?;
                if a.ncols() != fiber_dim {
                    return Err(Error::Validation(format!("fiber has {} generators, dim k/l = {fiber_dim}", a.ncols())));
                }
                for v in a.column_iter() {
                    let v = v.into_owned();
                    if coords(&cfg.k, &v).1 > 1e-9 {
                        return Err(Error::Validation("fiber generator not in k".into()));
                    }
                    if (cfg.l.transpose() * &killing * &v).amax() > 1e-9 * scale * scale {
                        return Err(Error::Validation("fiber generator not Killing-orthogonal to l".into()));
                    }
                }
                cfg.a = orient(a, spec.orientation.k_over_l);
                cfg.periods = periods;
            }
            None if fiber_dim == 0 => {}
            None => return Err(Error::Unsupported("K/L of positive dimension needs torus fiber generators".into())),
        }
        cfg.k_net = match &spec.k_net {
            Some(t) => {
                let (g, p) = cfg.torus(t, "k_net")?;
                for v in g.column_iter() {
                    if coords(&cfg.k, &v.into_owned()).1 > 1e-9 {
                        return Err(Error::Validation("k_net generator not in k".into()));
                    }
                }
                (g, p)
            }
            None => (cfg.a.clone(), cfg.periods.clone()),
        };

        let m = orthogonal_complement(&killing, &cfg.k);
        let b = intersection(&cfg.h, &l_perp);
        let n = orthogonal_complement(&killing, &cfg.h);

        if let Some(zv) = &spec.complex_structure {
            if zv.len() != dim {
                return Err(Error::InvalidArgument("complex_structure must have length dim g".into()));
            }
            let z = DVector::from_vec(zv.clone());
            if coords(&cfg.k, &z).1 > 1e-9 {
                return Err(Error::Validation("complex structure generator Z not in k".into()));
            }
            cfg.z = Some(z);
        }
        let jfun = cfg.z.clone().map(|z| {
            let adz = cfg.ad_of(&z);
            move |x: &DVector<f64>| -(&adz * x)
        });
        cfg.m = match &jfun {
            Some(j) => orient(complex_adapted(&m, j)?, spec.orientation.g_over_k),
            None => orient(m, spec.orientation.g_over_k),
        };
        let b_stable = jfun.as_ref().map(|j| complex_adapted(&b, j));
        cfg.b = match b_stable {
            Some(Ok(bb)) => orient(bb, spec.orientation.h_over_l),
            _ => orient(b, spec.orientation.h_over_l),
        };

        let am = hcat(&cfg.a, &cfg.m);
        cfg.g_l = Split::new(&cfg.l, &am)?;
        cfg.g_k = Split::new(&cfg.k, &cfg.m)?;
        if let Some(j) = &jfun {
            let jm = cfg.g_k.comp_coords(&DMatrix::from_columns(
                &cfg.m.column_iter().map(|c| j(&c.into_owned())).collect::<Vec<_>>(),
            ));
            if (&jm * &jm + DMatrix::identity(jm.nrows(), jm.nrows())).amax() > 1e-9 {
                return Err(Error::Validation("J² ≠ −1 on g/k".into()));
            }
            for i in 0..cfg.k.ncols() {
                let adk = cfg.g_k.induced(&cfg.ad_of(&cfg.k.column(i).into_owned()))?;
                if (&adk * &jm - &jm * &adk).amax() > 1e-9 * scale {
                    return Err(Error::Validation("J does not commute with Ad(K)".into()));
                }
            }
            cfg.j = Some(jm);
        }

        // or(k/l) ∧ or(g/k) = or(h/l) ∧ or(g/h) on g/l fixes the orientation of n
        let mut n = n;
        let bn = cfg.g_l.comp_coords(&hcat(&cfg.b, &n));
        if bn.nrows() != bn.ncols() {
            return Err(Error::Degenerate("h/l and g/h do not span g/l".into()));
        }
        let d = bn.determinant();
        if d.abs() < 1e-12 {
            return Err(Error::Degenerate("h/l and g/h do not span g/l".into()));
        }
        if d < 0.0 {
            n = orient(n, -1);
        }
        cfg.g_h = Split::new(&cfg.h, &n)?;
        cfg.omega_gh_basis = (n.transpose() * &killing * &n).determinant().abs().sqrt();
        cfg.n = n;

        if let Some(hb) = &spec.hodge_block {
            cfg.hodge = Some(cfg.hodge_block(hb)?);
        }
        Ok(cfg)
    }

    fn torus(&self, t: &TorusSpec, what: &str) -> Result<(DMatrix<f64>, Vec<f64>)> {
        if t.generators.len() != t.periods.len() {
            return Err(Error::InvalidArgument(format!("{what}: one period per generator")));
        }
        if t.periods.iter().any(|&p| !(p > 0.0 && p.is_finite())) {
            return Err(Error::InvalidArgument(format!("{what}: periods must be positive")));
        }
        let cols: Vec<DVector<f64>> = t
            .generators
            .iter()
            .map(|v| {
                if v.len() != self.dim {
                    Err(Error::InvalidArgument(format!("{what}: generator length {} ≠ {}", v.len(), self.dim)))
                } else {
                    Ok(DVector::from_vec(v.clone()))
                }
            })
            .collect::<Result<_>>()?;
        let g = if cols.is_empty() { DMatrix::zeros(self.dim, 0) } else { DMatrix::from_columns(&cols) };
        if rank(&g) != g.ncols() {
            return Err(Error::Degenerate(format!("{what}: generators are dependent")));
        }
        for i in 0..cols.len() {
            for j in 0..i {
                if self.bracket(&cols[i], &cols[j]).amax() > 1e-9 {
                    return Err(Error::Unsupported(format!("{what}: generators do not commute (not a torus)")));
                }
            }
        }
        Ok((g, t.periods.clone()))
    }

    fn hodge_block(&self, spec: &HodgeBlockSpec) -> Result<HodgeBlock> {
        let ms = self
            .matrices
            .as_ref()
            .ok_or_else(|| Error::InvalidArgument("hodge_block needs a matrix realization".into()))?;
        let algebra = subspace(self.dim, &spec.algebra, "hodge_block.algebra")?;
        for v in algebra.column_iter() {
            if coords(&self.k, &v.into_owned()).1 > 1e-9 {
                return Err(Error::Validation("block algebra not contained in k".into()));
            }
        }
        for i in 0..self.k.ncols() {
            for j in 0..algebra.ncols() {
                let br = self.bracket(&self.k.column(i).into_owned(), &algebra.column(j).into_owned());
                if coords(&algebra, &br).1 > 1e-9 {
                    return Err(Error::Validation("block algebra is not an ideal of k".into()));
                }
            }
        }
        let s = ms[0].nrows();
        if spec.vectors.is_empty() || spec.vectors.iter().any(|v| v.len() != s) {
            return Err(Error::InvalidArgument(format!("hodge_block vectors must be nonempty of length {s}")));
        }
        let vectors = DMatrix::from_fn(s, spec.vectors.len(), |i, j| {
            Complex64::new(spec.vectors[j][i][0], spec.vectors[j][i][1])
        });
        let out = HodgeBlock { algebra, vectors };
        for i in 0..self.k.ncols() {
            self.block_matrix(&out, &self.k.column(i).into_owned())?;
        }
        Ok(out)
    }

    /// Matrix of ρ(x) on the Hodge subspace, in its basis.
    pub(crate) fn block_matrix(&self, hb: &HodgeBlock, x: &DVector<f64>) -> Result<DMatrix<Complex64>> {
        let rho = self.representation(x)?.map(|v| Complex64::new(v, 0.0));
        let image = &rho * &hb.vectors;
        let sol = hb
            .vectors
            .clone()
            .svd(true, true)
            .solve(&image, 1e-14)
            .map_err(|e| Error::Validation(e.to_string()))?;
        let r = (&hb.vectors * &sol - &image).iter().map(|z| z.norm()).fold(0.0, f64::max);
        if r > 1e-9 * rho.iter().map(|z| z.norm()).fold(1.0, f64::max) {
            return Err(Error::Validation("Hodge subspace is not invariant under k".into()));
        }
        Ok(sol)
    }

    /// ρ(x) = Σ x_i E_i in the matrix realization.
    pub fn representation(&self, x: &DVector<f64>) -> Result<DMatrix<f64>> {
        let ms = self.matrices.as_ref().ok_or_else(|| Error::InvalidArgument("no matrix realization".into()))?;
        let mut out = DMatrix::zeros(ms[0].nrows(), ms[0].ncols());
        for (i, m) in ms.iter().enumerate() {
            out += m * x[i];
        }
        Ok(out)
    }

    fn check_subalgebra(&self, s: &DMatrix<f64>, name: &str) -> Result<()> {
        for i in 0..s.ncols() {
            for j in 0..i {
                let br = self.bracket(&s.column(i).into_owned(), &s.column(j).into_owned());
                if coords(s, &br).1 > STRUCTURE_TOL * br.amax().max(1.0) * 10.0 {
                    return Err(Error::Validation(format!("{name} is not closed under the bracket")));
                }
            }
        }
        Ok(())
    }

    fn check_nondegenerate(&self, s: &DMatrix<f64>, name: &str) -> Result<()> {
        if s.ncols() == 0 {
            return Ok(());
        }
        let g = s.transpose() * &self.killing * s;
        let eig = g.clone().symmetric_eigen().eigenvalues;
        let top = self.killing.amax().max(1e-300);
        if eig.iter().any(|e| e.abs() <= 1e-10 * top) {
            return Err(Error::Degenerate(format!("Killing form is degenerate on {name}")));
        }
        Ok(())
    }

    pub fn bracket(&self, x: &DVector<f64>, y: &DVector<f64>) -> DVector<f64> {
        self.ad_of(x) * y
    }

    pub fn ad_of(&self, x: &DVector<f64>) -> DMatrix<f64> {
        let mut out = DMatrix::zeros(self.dim, self.dim);
        for (i, a) in self.ad.iter().enumerate() {
            if x[i] != 0.0 {
                out += a * x[i];
            }
        }
        out
    }

    /// Ad of the group element exp(x).
    pub fn exp_ad(&self, x: &DVector<f64>) -> DMatrix<f64> {
        self.ad_of(x).exp()
    }

    /// Ad of exp(Σ θ_i T_i) for torus generators `t` (columns).
    pub fn torus_element(&self, t: &DMatrix<f64>, angles: &[f64]) -> DMatrix<f64> {
        let mut x = DVector::zeros(self.dim);
        for (i, &th) in angles.iter().enumerate() {
            x += t.column(i) * th;
        }
        self.exp_ad(&x)
    }

    /// ω_{K/L}-volume of K/L, with ω_{K/L} = 1 on the fiber generators.
    pub fn fiber_volume(&self) -> f64 {
        self.periods.iter().product()
    }

    /// Images of the h/l basis `b` in g/k, in coordinates of `m`.
    pub fn h_over_l_in_g_over_k(&self) -> Vec<Vec<f64>> {
        let c = self.g_k.comp_coords(&self.b);
        c.column_iter().map(|v| v.iter().copied().collect()).collect()
    }

    /// Realization of the quotient by l, k or h: (subspace, oriented complement).
    pub(crate) fn split(&self, space: Space) -> Result<&Split> {
        match space {
            Space::GModL => Ok(&self.g_l),
            Space::GModK => Ok(&self.g_k),
            Space::GModH => Ok(&self.g_h),
            Space::Subspace => Err(Error::InvalidArgument("forms on a subspace have no quotient structure".into())),
        }
    }

    pub fn dim_quotient(&self, space: Space) -> usize {
        match space {
            Space::GModL => self.dim - self.l.ncols(),
            Space::GModK => self.m.ncols(),
            Space::GModH => self.n.ncols(),
            Space::Subspace => 0,
        }
    }

    /// Replace the realization of g/l by other representatives: `fiber` must
    /// agree with the fiber generators modulo l, `base` must be a complement
    /// of k; the oriented classes are preserved.
    pub fn with_realization(&self, fiber: &DMatrix<f64>, base: &DMatrix<f64>) -> Result<Self> {
        if fiber.shape() != self.a.shape() || base.shape() != self.m.shape() {
            return Err(Error::DimensionMismatch { expected: self.a.ncols() + self.m.ncols(), got: fiber.ncols() + base.ncols() });
        }
        if self.g_l.comp_coords(&(fiber - &self.a)).amax() > 1e-9 {
            return Err(Error::Validation("fiber representatives differ from k/l generators modulo l".into()));
        }
        let base_k = self.g_k.comp_coords(base);
        let d = base_k.determinant();
        if d.abs() < 1e-12 {
            return Err(Error::Degenerate("base vectors are not a complement of k".into()));
        }
        let mut out = self.clone();
        // keep the orientation class of m through the change of basis
        let mut base = base.clone();
        if d < 0.0 {
            base.column_mut(0).neg_mut();
        }
        out.a = fiber.clone();
        out.m = base;
        out.g_l = Split::new(&out.l, &hcat(&out.a, &out.m))?;
        out.g_k = Split::new(&out.k, &out.m)?;
        if let Some(j) = &self.j {
            // J in the new coordinates: P^{-1} J P with P the change of basis
            let p = self.g_k.comp_coords(&out.m);
            let pinv = p.clone().try_inverse().ok_or(Error::Singular)?;
            out.j = Some(pinv * j * p);
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn so3() -> LieSpec {
        // [e0,e1]=e2, [e1,e2]=e0, [e2,e0]=e1
        let mut c = vec![vec![vec![0.0; 3]; 3]; 3];
        for (i, j, k) in [(0, 1, 2), (1, 2, 0), (2, 0, 1)] {
            c[i][j][k] = 1.0;
            c[j][i][k] = -1.0;
        }
        LieSpec {
            name: "so3".into(),
            labels: vec![],
            matrices: None,
            structure_constants: Some(c),
            h: SubspaceSpec::Indices(vec![2]),
            k: SubspaceSpec::Indices(vec![2]),
            l: SubspaceSpec::Indices(vec![2]),
            fiber: None,
            k_net: None,
            complex_structure: None,
            hodge_block: None,
            orientation: OrientationSpec::default(),
        }
    }

    #[test]
    fn so3_killing_is_minus_two() {
        let cfg = LieConfiguration::from_spec(so3()).unwrap();
        assert!((cfg.killing.clone() + DMatrix::identity(3, 3) * 2.0).amax() < 1e-14);
        assert_eq!(cfg.m.ncols(), 2);
        assert_eq!(cfg.n.ncols(), 2);
    }

    #[test]
    fn abelian_algebra_is_rejected() {
        let mut s = so3();
        s.structure_constants = Some(vec![vec![vec![0.0; 3]; 3]; 3]);
        assert!(matches!(LieConfiguration::from_spec(s), Err(Error::Degenerate(_))));
    }

    #[test]
    fn jacobi_failure_is_rejected() {
        let mut s = so3();
        let mut c = s.structure_constants.clone().unwrap();
        c[0][1][2] = 2.0;
        c[1][0][2] = -2.0;
        c[0][1][0] = 1.0;
        c[1][0][0] = -1.0;
        s.structure_constants = Some(c);
        assert!(LieConfiguration::from_spec(s).is_err());
    }

    #[test]
    fn wrong_l_is_rejected() {
        let mut s = so3();
        s.h = SubspaceSpec::Indices(vec![0]);
        assert!(matches!(LieConfiguration::from_spec(s), Err(Error::Validation(_))));
    }
}
