//! Browser bindings. Each export returns a JSON string; the plain
//! functions underneath are what the native tests exercise.

use equilattice::cm::elliptic_fixed_points;
use equilattice::equidist::counting::rank1_window_counts;
use equilattice::equidist::oracle::grassmann_haar_oracle;
use equilattice::equidist::window::Window;
use equilattice::multiplicity::{alpha_constant, dirichlet_coefficients};
use equilattice::QuadraticLattice;
use serde_json::{json, Value};
use wasm_bindgen::prelude::*;

const MAX_LEVEL: i64 = 2000;
const MAX_INDEX: u64 = 5000;
const MAX_NORM: i64 = 3000;

/// Fixed points of the elliptic Hecke matrices of determinant n, reduced to
/// the fundamental domain.
pub fn cm_points_json(n: i64) -> Result<Value, String> {
    if !(1..=MAX_LEVEL).contains(&n) {
        return Err(format!("N must be in 1..={MAX_LEVEL}"));
    }
    let recs = elliptic_fixed_points(n).map_err(|e| e.to_string())?;
    let pts: Vec<Value> = recs
        .iter()
        .map(|r| json!({"t": r.t, "D": r.d, "x": r.point.x, "y": r.point.y, "weight": r.weight}))
        .collect();
    Ok(json!({"N": n, "total_weight": recs.iter().map(|r| r.weight).sum::<f64>(), "points": pts}))
}

/// b_1..b_K for rank r, and bounds on Σ b_k k^{-d} when d >= r + 2.
pub fn index_counts_json(r: usize, k_max: u64, d: usize) -> Result<Value, String> {
    if !(1..=8).contains(&r) || !(1..=MAX_INDEX).contains(&k_max) {
        return Err(format!("need 1 <= r <= 8 and 1 <= K <= {MAX_INDEX}"));
    }
    let b: Vec<String> = dirichlet_coefficients(r, k_max)[1..].iter().map(u128::to_string).collect();
    let alpha = match alpha_constant(r, d, k_max) {
        Ok(a) => json!({"lower": a.lower(), "upper": a.upper()}),
        Err(_) => Value::Null,
    };
    Ok(json!({"r": r, "K": k_max, "d": d, "b": b, "alpha": alpha}))
}

/// Share of the lines of Z^d with norm <= n inside a projective cap, next
/// to the cap's invariant measure.
pub fn cap_share_json(d: usize, n: i64, center: &[f64], half_angle: f64) -> Result<Value, String> {
    if !(2..=4).contains(&d) || !(1..=MAX_NORM).contains(&n) {
        return Err(format!("need 2 <= d <= 4 and 1 <= n <= {MAX_NORM}"));
    }
    if center.len() != d || center.iter().all(|&c| c == 0.0) {
        return Err(format!("center must be a nonzero vector of length {d}"));
    }
    if !(half_angle > 0.0 && half_angle <= std::f64::consts::FRAC_PI_2) {
        return Err("half-angle must be in (0, π/2]".into());
    }
    let w = Window::ProjectorCap { center: center.to_vec(), half_angle };
    let c = rank1_window_counts(&QuadraticLattice::standard(d), &[n], std::slice::from_ref(&w)).map_err(|e| e.to_string())?;
    let haar = grassmann_haar_oracle(d, 1, &w, 40_000, 1).map_err(|e| e.to_string())?;
    let share = |a: u64, b: u64| if b == 0 { 0.0 } else { a as f64 / b as f64 };
    Ok(json!({
        "lines": c.total_nu[0],
        "primitive_lines": c.total_nu_prime[0],
        "in_cap": c.nu[0][0],
        "primitive_in_cap": c.nu_prime[0][0],
        "share": share(c.nu_prime[0][0], c.total_nu_prime[0]),
        "haar": haar.estimate,
        "haar_stderr": haar.stderr,
    }))
}

fn to_js(r: Result<Value, String>) -> Result<String, JsError> {
    r.map(|v| v.to_string()).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
pub fn cm_points(n: i32) -> Result<String, JsError> {
    to_js(cm_points_json(n as i64))
}

#[wasm_bindgen]
pub fn index_counts(r: u32, k_max: u32, d: u32) -> Result<String, JsError> {
    to_js(index_counts_json(r as usize, k_max as u64, d as usize))
}

#[wasm_bindgen]
pub fn cap_share(d: u32, n: u32, center: Vec<f64>, half_angle: f64) -> Result<String, JsError> {
    to_js(cap_share_json(d as usize, n as i64, &center, half_angle))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn level_one() {
        let v = cm_points_json(1).unwrap();
        assert_eq!(v["points"].as_array().unwrap().len(), 3);
        assert!((v["total_weight"].as_f64().unwrap() - 7.0 / 6.0).abs() < 1e-12);
        assert!(cm_points_json(0).is_err());
    }

    #[test]
    fn rank_two_counts_are_divisor_sums() {
        let v = index_counts_json(2, 6, 4).unwrap();
        assert_eq!(v["b"], json!(["1", "3", "4", "7", "6", "12"]));
        assert!(v["alpha"]["lower"].as_f64().unwrap() > 1.0);
        assert!(index_counts_json(2, 6, 3).unwrap()["alpha"].is_null());
    }

    #[test]
    fn cap_share_is_near_haar() {
        let v = cap_share_json(3, 400, &[0.0, 0.0, 1.0], 1.0).unwrap();
        let (share, haar) = (v["share"].as_f64().unwrap(), v["haar"].as_f64().unwrap());
        assert!((share - haar).abs() < 0.02, "{v}");
        assert!(cap_share_json(3, 10, &[1.0, 0.0], 0.5).is_err());
    }
}
