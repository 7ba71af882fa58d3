//! Closed-form eigenvalue bounds for triangles, transplantation checks, and
//! an auditor comparing them with computed tones.

mod audit;
mod chain;
mod transplant;

use std::f64::consts::{FRAC_PI_3, PI};

use serde::{Deserialize, Serialize};

pub use audit::{
    audit, fundamental_tone, random_triangles, stress_set, BoundEntry, BoundKind, BoundReport,
    BoundTarget, Mu1Result, SymmetryAudit, ToneMethod, SLACK_FACTOR,
};
pub use chain::{bisect_stretch_chain, BisectChain, ChainStep};
pub use transplant::{corcomp_check, lemcomp_check, DiscreteMode, Implied, TransplantCondition, TransplantVerdict};

use crate::error::{Error, Result};
use crate::geometry::Triangle;
use crate::special_fn::{j01, j11};

/// `π²/D²`, valid for every convex domain.
pub fn pw_diameter_lower(t: &Triangle) -> f64 {
    PI * PI / t.diameter().powi(2)
}

/// `j₁,₁²/D²`.
pub fn thm_diameter_lower(t: &Triangle) -> f64 {
    j11().powi(2) / t.diameter().powi(2)
}

/// `4j₁,₁²/L²`.
pub fn perimeter_lower(t: &Triangle) -> f64 {
    4.0 * j11().powi(2) / t.perimeter().powi(2)
}

/// `4π²/L²`, the perimeter form of the convex-domain bound.
pub fn convex_perimeter_lower(t: &Triangle) -> f64 {
    4.0 * PI * PI / t.perimeter().powi(2)
}

/// `4j₀,₁²/D²`.
pub fn cheng_upper(t: &Triangle) -> f64 {
    4.0 * j01().powi(2) / t.diameter().powi(2)
}

/// `16π²/(3S²)` with `S² = l₁² + l₂² + l₃²`.
pub fn sum_of_squares_upper(t: &Triangle) -> f64 {
    let s2: f64 = (0..3).map(|i| t.side_opposite(i).powi(2)).sum();
    16.0 * PI * PI / (3.0 * s2)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Sandwich {
    pub lower: f64,
    pub upper: f64,
}

impl Sandwich {
    pub fn contains(&self, mu: f64) -> bool {
        self.lower < mu && mu <= self.upper
    }

    pub fn relative_gap(&self) -> f64 {
        (self.upper - self.lower) / self.lower
    }
}

/// Sector-transplantation bounds for `T(α)` with `α ≤ π/3`, `D = l`:
/// `j₁,₁²/(D²(1 + tan(α/2) + tan²(α/2))) < μ₁ ≤ j₁,₁²/(D² cos²(α/2))`.
pub fn boundsiso_sandwich(alpha: f64, leg: f64) -> Result<Sandwich> {
    if !(alpha > 0.0 && alpha <= FRAC_PI_3 + 1e-12) {
        return Err(Error::Domain(format!(
            "aperture {alpha} is not subequilateral (needs 0 < α ≤ π/3)"
        )));
    }
    positive_leg(leg)?;
    let j = j11().powi(2) / (leg * leg);
    let t = (0.5 * alpha).tan();
    Ok(Sandwich {
        lower: j / (1.0 + t + t * t),
        upper: j / (0.5 * alpha).cos().powi(2),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Prop1d {
    pub lower: f64,
    pub improved_lower: f64,
    pub upper: f64,
}

/// Bounds for superequilateral `T(α)`, `D = 2l sin(α/2)`:
/// `4j₀,₁² sin²(α/2)/D² ≤ μ₁ < 4j₀,₁²/D²`, and the sharper lower bound
/// `2j₀,₁²(π − α) tan(α/2)/D²`.
pub fn prop1d_bounds(alpha: f64, leg: f64) -> Result<Prop1d> {
    if !(alpha > FRAC_PI_3 && alpha < PI) {
        return Err(Error::Domain(format!(
            "aperture {alpha} is not superequilateral (needs π/3 < α < π)"
        )));
    }
    positive_leg(leg)?;
    Ok(prop1d_formula(alpha, leg))
}

/// The same expressions without the range check; curves start at `π/3`.
pub(crate) fn prop1d_formula(alpha: f64, leg: f64) -> Prop1d {
    let d2 = (2.0 * leg * (0.5 * alpha).sin()).powi(2);
    let j = j01().powi(2);
    Prop1d {
        lower: 4.0 * j * (0.5 * alpha).sin().powi(2) / d2,
        improved_lower: 2.0 * j * (PI - alpha) * (0.5 * alpha).tan() / d2,
        upper: 4.0 * j / d2,
    }
}

/// `π²/sin²(β/2)` for unit legs. A lower bound for `μ_a(β)` only when the
/// antisymmetric mode satisfies `∫v_x² ≥ 3∫v_y²`.
pub fn antisym_interval_lower(beta: f64) -> Result<f64> {
    if !(beta > 0.0 && beta <= FRAC_PI_3 + 1e-12) {
        return Err(Error::Domain(format!(
            "aperture {beta} is not subequilateral (needs 0 < β ≤ π/3)"
        )));
    }
    Ok(PI * PI / (0.5 * beta).sin().powi(2))
}

/// Lower bound `16π²/(3S²)` for `μ_s(β)` when `π/3 < β ≤ π/2`, where it
/// separates `μ_s` from `μ₁`.
pub fn symmetric_lower(beta: f64, leg: f64) -> Result<f64> {
    if !(beta > FRAC_PI_3 && beta <= 0.5 * PI + 1e-12) {
        return Err(Error::Domain(format!("aperture {beta} outside (π/3, π/2]")));
    }
    positive_leg(leg)?;
    Ok(16.0 * PI * PI / (leg * leg * (12.0 * (0.5 * beta).sin().powi(2) + 6.0)))
}

fn positive_leg(leg: f64) -> Result<()> {
    if leg > 0.0 && leg.is_finite() {
        Ok(())
    } else {
        Err(Error::Domain(format!("leg length {leg} must be positive")))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::IsoscelesSpec;

    fn unit_equilateral() -> Triangle {
        IsoscelesSpec::unit(FRAC_PI_3).unwrap().triangle()
    }

    #[test]
    fn diameter_bounds() {
        let e = unit_equilateral();
        assert!((pw_diameter_lower(&e) - PI * PI).abs() < 1e-12);
        assert!((thm_diameter_lower(&e) - 14.6820).abs() < 1e-4);
        assert!(pw_diameter_lower(&e) < thm_diameter_lower(&e));
        let big = e.scaled(2.0).unwrap();
        assert!((pw_diameter_lower(&big) - PI * PI / 4.0).abs() < 1e-12);
        assert!((cheng_upper(&e) - 23.1327).abs() < 1e-4);
        assert!(thm_diameter_lower(&e) < 16.0 * PI * PI / 9.0);
    }

    #[test]
    fn perimeter_bounds() {
        let e = unit_equilateral().scaled(1.0 / 3.0).unwrap();
        assert!((e.perimeter() - 1.0).abs() < 1e-12);
        assert!((perimeter_lower(&e) - 58.727).abs() < 1e-3);
        assert!((convex_perimeter_lower(&e) - 39.478).abs() < 1e-3);
    }

    #[test]
    fn sandwich_limits() {
        let s = boundsiso_sandwich(1e-8, 1.0).unwrap();
        assert!((s.lower - j11().powi(2)).abs() < 1e-6 && (s.upper - j11().powi(2)).abs() < 1e-6);
        let s = boundsiso_sandwich(FRAC_PI_3, 1.0).unwrap();
        assert!((s.upper - 19.576).abs() < 1e-3);
        assert!(s.upper >= 16.0 * PI * PI / 9.0);
        let cut = 16.0 * PI * PI / (9.0 * j11().powi(2)) - 1.0;
        assert!((cut - 0.195).abs() < 1e-3);
        for i in 1..40 {
            let a = FRAC_PI_3 * i as f64 / 40.0;
            let below = boundsiso_sandwich(a, 1.0).unwrap().upper < 16.0 * PI * PI / 9.0;
            assert_eq!(below, (0.5 * a).tan().powi(2) < cut);
        }
        let s = boundsiso_sandwich(0.3403, 1.0).unwrap();
        assert!(s.contains(14.9689));
        assert!(boundsiso_sandwich(1.1, 1.0).is_err());
        assert!(boundsiso_sandwich(0.5, 0.0).is_err());
    }

    #[test]
    fn prop1d() {
        let b = prop1d_bounds(PI - 1e-6, 1.0).unwrap();
        assert!((b.lower / b.upper - 1.0).abs() < 1e-9);
        let b = prop1d_bounds(2.0296, 1.0).unwrap();
        let d2 = (2.0 * (1.0148f64).sin()).powi(2);
        assert!(b.lower * d2 <= 21.2783 && 21.2783 < b.upper * d2);
        let b = prop1d_bounds(1.2, 1.0).unwrap();
        let j = j01().powi(2);
        let (plain, improved) = (4.0 * j * 0.6f64.sin().powi(2), 2.0 * j * (PI - 1.2) * 0.6f64.tan());
        let d2 = (2.0 * 0.6f64.sin()).powi(2);
        assert!((b.lower * d2 - plain).abs() < 1e-12 && (b.improved_lower * d2 - improved).abs() < 1e-12);
        assert!(improved > plain);
        assert!(prop1d_bounds(1.0, 1.0).is_err());
    }

    #[test]
    fn sum_of_squares() {
        let e = unit_equilateral();
        assert!((sum_of_squares_upper(&e) - 16.0 * PI * PI / 9.0).abs() < 1e-12);
        for &beta in &[1.2043, 2.0, 2.8] {
            let t = IsoscelesSpec::unit(beta).unwrap().triangle();
            let want = 16.0 * PI * PI / (12.0 * (0.5 * beta).sin().powi(2) + 6.0);
            assert!((sum_of_squares_upper(&t) - want).abs() < 1e-12);
        }
        // μ₁D² = 18.2556 at β = 1.2043 (the μ₁ curve of the superequilateral figure).
        let t = IsoscelesSpec::unit(1.2043).unwrap().triangle();
        assert!(sum_of_squares_upper(&t) >= 18.2556 / t.diameter().powi(2));
    }

    #[test]
    fn antisymmetric_interval() {
        assert!((antisym_interval_lower(FRAC_PI_3).unwrap() - 4.0 * PI * PI).abs() < 1e-10);
        assert!(antisym_interval_lower(1e-6).unwrap() > 1e12);
        assert!(32.2201 > 16.0 * PI * PI / 9.0);
        assert!(antisym_interval_lower(1.5).is_err());
        assert!((symmetric_lower(FRAC_PI_3 + 1e-9, 1.0).unwrap() - 16.0 * PI * PI / 9.0).abs() < 1e-6);
    }
}
