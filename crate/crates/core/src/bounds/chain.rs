use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::audit::{ToneMethod, SLACK_FACTOR};
use super::{boundsiso_sandwich, Sandwich};
use crate::error::{Error, Result};
use crate::fem::{extrapolate_tone, ToneDomain, ToneTarget, FEM_FLOOR};
use crate::geometry::{bisect_stretch_step, IsoscelesSpec, ANGLE_TOL};
use crate::special_fn::j11;
use std::f64::consts::FRAC_PI_3;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChainStep {
    pub step: usize,
    pub aperture: f64,
    /// `μ₁D²`; the sandwich midpoint below the FEM floor.
    pub mu1_d2: f64,
    pub error_estimate: f64,
    pub method: ToneMethod,
    pub sandwich: Sandwich,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BisectChain {
    pub steps: Vec<ChainStep>,
    pub strictly_decreasing: bool,
    /// Every value stays above `j₁,₁²` within slack.
    pub above_limit: bool,
    pub warnings: Vec<String>,
}

/// `μ₁D²` along `α₀, α₁, …, α_steps` with `sin(α_{k+1}/2) = sin(α_k/2)/√2`.
pub fn bisect_stretch_chain(alpha0: f64, steps: usize, levels: &[usize]) -> Result<BisectChain> {
    if !(alpha0 > 0.0 && alpha0 <= FRAC_PI_3 + ANGLE_TOL) {
        return Err(Error::Domain(format!("chain start {alpha0} must lie in (0, π/3]")));
    }
    let mut apertures = vec![alpha0.min(FRAC_PI_3)];
    for _ in 0..steps {
        apertures.push(bisect_stretch_step(*apertures.last().expect("non-empty"))?);
    }
    let mut warnings = Vec::new();
    if let Some(k) = apertures.iter().position(|&a| a < FEM_FLOOR) {
        warnings.push(format!(
            "aperture {:.3e} at step {k} is below the FEM floor {FEM_FLOOR}; remaining steps use the closed-form sandwich",
            apertures[k]
        ));
    }
    let steps: Vec<ChainStep> = apertures
        .par_iter()
        .enumerate()
        .map(|(step, &aperture)| {
            // Unit leg, so D = 1.
            let sandwich = boundsiso_sandwich(aperture, 1.0)?;
            let (mu1_d2, error_estimate, method) = if aperture >= FEM_FLOOR {
                let spec = IsoscelesSpec::unit(aperture)?;
                let tone = extrapolate_tone(&ToneDomain::Isosceles(spec), levels, ToneTarget::Fundamental)?;
                (tone.value, tone.error_estimate, ToneMethod::Fem)
            } else {
                (
                    0.5 * (sandwich.lower + sandwich.upper),
                    0.5 * (sandwich.upper - sandwich.lower),
                    ToneMethod::Sandwich,
                )
            };
            Ok(ChainStep {
                step,
                aperture,
                mu1_d2,
                error_estimate,
                method,
                sandwich,
            })
        })
        .collect::<Result<_>>()?;

    let mut strictly_decreasing = true;
    for w in steps.windows(2) {
        let slack = SLACK_FACTOR * (w[0].error_estimate + w[1].error_estimate);
        if !(w[1].mu1_d2 < w[0].mu1_d2 + slack) {
            strictly_decreasing = false;
            warnings.push(format!(
                "step {} does not decrease: {:.6} after {:.6}",
                w[1].step, w[1].mu1_d2, w[0].mu1_d2
            ));
        }
    }
    let limit = j11().powi(2);
    let above_limit = steps
        .iter()
        .all(|s| s.mu1_d2 > limit - SLACK_FACTOR * s.error_estimate);
    Ok(BisectChain {
        steps,
        strictly_decreasing,
        above_limit,
        warnings,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn long_chain_closes_the_sandwich() {
        let c = bisect_stretch_chain(FRAC_PI_3, 20, &[8, 16, 32]).unwrap();
        assert_eq!(c.steps.len(), 21);
        let last = c.steps.last().unwrap();
        assert_eq!(last.method, ToneMethod::Sandwich);
        assert!(last.sandwich.relative_gap() < 1e-3);
        assert!(!c.warnings.is_empty());
        assert!((c.steps[1].aperture.cos() - 0.75).abs() < 1e-12);
    }

    #[test]
    fn rejects_superequilateral_start() {
        assert!(bisect_stretch_chain(1.2, 3, &[8, 16, 32]).is_err());
    }
}
