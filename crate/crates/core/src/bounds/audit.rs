use std::f64::consts::{FRAC_PI_3, PI};
use std::fmt::Write as _;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{
    antisym_interval_lower, boundsiso_sandwich, cheng_upper, convex_perimeter_lower, perimeter_lower,
    prop1d_bounds, pw_diameter_lower, sum_of_squares_upper, symmetric_lower, thm_diameter_lower,
};
use crate::error::Result;
use crate::fem::{
    extrapolate_tone, symmetry_reduced_space, ExtrapolatedTone, ModeClass, SymmetryTag, ToneDomain,
    ToneTarget, FEM_FLOOR,
};
use crate::geometry::{IsoscelesSpec, RigidMotion, Triangle, ANGLE_TOL};

/// A bound holds numerically when violated by at most this many error estimates.
pub const SLACK_FACTOR: f64 = 3.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundKind {
    Lower,
    Upper,
}

/// Eigenvalue a bound refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundTarget {
    Mu1,
    MuA,
    MuS,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundEntry {
    pub name: String,
    pub kind: BoundKind,
    pub target: BoundTarget,
    pub value: f64,
    pub applicable: bool,
    /// Valid only under a case hypothesis, recorded in `note`.
    pub conditional: bool,
    pub satisfied: bool,
    /// Signed distance to the computed eigenvalue, positive when the bound holds.
    pub margin: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ToneMethod {
    Fem,
    /// Midpoint of the closed-form sandwich, for apertures below the FEM floor.
    Sandwich,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Mu1Result {
    pub tone: ExtrapolatedTone,
    pub method: ToneMethod,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SymmetryAudit {
    pub aperture: f64,
    pub mu_s: ExtrapolatedTone,
    pub mu_a: ExtrapolatedTone,
    /// Class of the smaller of `μ_s`, `μ_a`.
    pub fundamental: SymmetryTag,
    /// `None` at the equilateral, where the two coincide.
    pub expected: SymmetryTag,
    pub consistent: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundReport {
    pub triangle: Triangle,
    pub diameter: f64,
    pub perimeter: f64,
    pub mu1_computed: ExtrapolatedTone,
    pub method: ToneMethod,
    pub entries: Vec<BoundEntry>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub symmetry: Option<SymmetryAudit>,
    pub warnings: Vec<String>,
    pub failures: Vec<String>,
    pub chain_ok: bool,
}

/// `μ₁` of `t`: extrapolated FEM, or the sandwich midpoint (half-gap error)
/// for isosceles triangles thinner than [`FEM_FLOOR`].
pub fn fundamental_tone(t: &Triangle, levels: &[usize]) -> Result<Mu1Result> {
    if let Some((spec, _)) = t.as_isosceles() {
        if spec.aperture < FEM_FLOOR - ANGLE_TOL {
            return Ok(Mu1Result {
                tone: sandwich_tone(&spec)?,
                method: ToneMethod::Sandwich,
            });
        }
    }
    Ok(Mu1Result {
        tone: extrapolate_tone(&ToneDomain::Triangle(*t), levels, ToneTarget::Fundamental)?,
        method: ToneMethod::Fem,
    })
}

fn sandwich_tone(spec: &IsoscelesSpec) -> Result<ExtrapolatedTone> {
    let s = boundsiso_sandwich(spec.aperture, spec.leg)?;
    Ok(ExtrapolatedTone {
        value: 0.5 * (s.lower + s.upper),
        error_estimate: 0.5 * (s.upper - s.lower),
        levels_used: Vec::new(),
        observed_order: None,
        level_values: Vec::new(),
        warnings: vec![format!(
            "aperture {:.4} below the FEM floor {FEM_FLOOR}; closed-form sandwich used",
            spec.aperture
        )],
    })
}

struct Checker {
    mu: f64,
    slack: f64,
    entries: Vec<BoundEntry>,
    warnings: Vec<String>,
    failures: Vec<String>,
}

impl Checker {
    fn new(tone: &ExtrapolatedTone) -> Self {
        Checker {
            mu: tone.value,
            slack: SLACK_FACTOR * tone.error_estimate,
            entries: Vec::new(),
            warnings: Vec::new(),
            failures: Vec::new(),
        }
    }

    fn push(&mut self, name: &str, kind: BoundKind, target: BoundTarget, value: f64, mu: f64, slack: f64) {
        self.push_entry(name, kind, target, value, mu, slack, true, false, None);
    }

    #[allow(clippy::too_many_arguments)]
    fn push_entry(
        &mut self,
        name: &str,
        kind: BoundKind,
        target: BoundTarget,
        value: f64,
        mu: f64,
        slack: f64,
        applicable: bool,
        conditional: bool,
        note: Option<String>,
    ) {
        let margin = match kind {
            BoundKind::Lower => mu - value,
            BoundKind::Upper => value - mu,
        };
        let satisfied = !applicable || margin > -slack;
        if applicable {
            if !satisfied {
                self.failures
                    .push(format!("{name}: {kind:?} bound {value:.6} violated by {:.3e}", -margin));
            } else if margin <= 0.0 {
                self.warnings
                    .push(format!("{name}: {kind:?} bound {value:.6} violated by {:.3e}, within slack", -margin));
            }
        }
        self.entries.push(BoundEntry {
            name: name.to_string(),
            kind,
            target,
            value,
            applicable,
            conditional,
            satisfied,
            margin,
            note,
        });
    }

    fn mu1(&mut self, name: &str, kind: BoundKind, value: f64) {
        let (mu, slack) = (self.mu, self.slack);
        self.push(name, kind, BoundTarget::Mu1, value, mu, slack);
    }
}

/// Evaluate every bound on `t` against an extrapolated `μ₁`, and for
/// isosceles inputs also against `μ_s` and `μ_a`.
pub fn audit(t: &Triangle, levels: &[usize]) -> Result<BoundReport> {
    let mu1 = fundamental_tone(t, levels)?;
    let mut c = Checker::new(&mu1.tone);
    c.warnings.extend(mu1.tone.warnings.iter().cloned());

    c.mu1("payne_weinberger_diameter", BoundKind::Lower, pw_diameter_lower(t));
    c.mu1("diameter_j11", BoundKind::Lower, thm_diameter_lower(t));
    c.mu1("perimeter_j11", BoundKind::Lower, perimeter_lower(t));
    c.mu1("convex_perimeter", BoundKind::Lower, convex_perimeter_lower(t));
    c.mu1("cheng_diameter", BoundKind::Upper, cheng_upper(t));
    c.mu1("sum_of_squares", BoundKind::Upper, sum_of_squares_upper(t));

    let ordered = pw_diameter_lower(t) < thm_diameter_lower(t) && thm_diameter_lower(t) < cheng_upper(t);
    if !ordered {
        c.failures.push("closed-form constants out of order".into());
    }

    let mut symmetry = None;
    if let Some((spec, _)) = t.as_isosceles() {
        let a = spec.aperture;
        if a <= FRAC_PI_3 + 1e-12 {
            let s = boundsiso_sandwich(a, spec.leg)?;
            c.mu1("sector_sandwich_lower", BoundKind::Lower, s.lower);
            c.mu1("sector_sandwich_upper", BoundKind::Upper, s.upper);
        } else {
            let p = prop1d_bounds(a, spec.leg)?;
            c.mu1("superequilateral_lower", BoundKind::Lower, p.lower);
            c.mu1("superequilateral_improved_lower", BoundKind::Lower, p.improved_lower);
            c.mu1("superequilateral_upper", BoundKind::Upper, p.upper);
        }
        if a >= FEM_FLOOR - ANGLE_TOL {
            symmetry = Some(symmetry_audit(&spec, levels, &mut c)?);
        }
    }

    let mut failures = std::mem::take(&mut c.failures);
    if let Some(s) = &symmetry {
        if !s.consistent {
            failures.push(format!(
                "fundamental mode is {:?}, expected {:?} at aperture {:.4}",
                s.fundamental, s.expected, s.aperture
            ));
        }
    }
    let chain_ok = failures.is_empty() && c.entries.iter().all(|e| e.satisfied);
    for f in &failures {
        log::error!("{f}");
    }
    Ok(BoundReport {
        triangle: *t,
        diameter: t.diameter(),
        perimeter: t.perimeter(),
        mu1_computed: mu1.tone,
        method: mu1.method,
        entries: c.entries,
        symmetry,
        warnings: c.warnings,
        failures,
        chain_ok,
    })
}

fn symmetry_audit(spec: &IsoscelesSpec, levels: &[usize], c: &mut Checker) -> Result<SymmetryAudit> {
    let domain = ToneDomain::Isosceles(*spec);
    let (mu_s, mu_a) = rayon::join(
        || extrapolate_tone(&domain, levels, ToneTarget::Symmetric),
        || extrapolate_tone(&domain, levels, ToneTarget::Antisymmetric),
    );
    let (mu_s, mu_a) = (mu_s?, mu_a?);
    let a = spec.aperture;
    let l2 = spec.leg * spec.leg;
    let equilateral = 16.0 * PI * PI / (9.0 * l2);
    let slack_a = SLACK_FACTOR * mu_a.error_estimate;
    let slack_s = SLACK_FACTOR * mu_s.error_estimate;

    if a < FRAC_PI_3 - ANGLE_TOL {
        // Case hypothesis ∫v_x² ≥ 3∫v_y² on the discrete antisymmetric mode.
        let finest = *levels.last().expect("levels are non-empty");
        let space = symmetry_reduced_space(spec, finest, ModeClass::Antisymmetric)?;
        let v = space.eigenpairs(1)?.remove(0).coefficients;
        let [gx, gy] = space.gradient_integrals(&v);
        let holds = gx >= 3.0 * gy;
        let note = format!("requires ∫v_x² ≥ 3∫v_y²; discrete mode gives ratio {:.4}", gy / gx);
        c.push_entry(
            "antisymmetric_interval",
            BoundKind::Lower,
            BoundTarget::MuA,
            antisym_interval_lower(a)? / l2,
            mu_a.value,
            slack_a,
            holds,
            true,
            Some(note),
        );
        c.push("antisymmetric_above_equilateral", BoundKind::Lower, BoundTarget::MuA, equilateral, mu_a.value, slack_a);
    }
    if a > FRAC_PI_3 + ANGLE_TOL && a <= 0.5 * PI + 1e-12 {
        c.push(
            "symmetric_sum_of_squares",
            BoundKind::Lower,
            BoundTarget::MuS,
            symmetric_lower(a, spec.leg)?,
            mu_s.value,
            slack_s,
        );
    }

    let slack = slack_a + slack_s;
    let (fundamental, expected, consistent) = if (a - FRAC_PI_3).abs() <= ANGLE_TOL {
        (SymmetryTag::None, SymmetryTag::None, (mu_s.value - mu_a.value).abs() <= slack.max(1e-9 * mu_s.value))
    } else {
        let fundamental = if mu_s.value < mu_a.value {
            SymmetryTag::Symmetric
        } else {
            SymmetryTag::Antisymmetric
        };
        let (expected, consistent) = if a < FRAC_PI_3 {
            (SymmetryTag::Symmetric, mu_s.value < mu_a.value + slack)
        } else {
            (SymmetryTag::Antisymmetric, mu_a.value < mu_s.value + slack)
        };
        (fundamental, expected, consistent)
    };
    Ok(SymmetryAudit {
        aperture: a,
        mu_s,
        mu_a,
        fundamental,
        expected,
        consistent,
    })
}

/// Seeded triangles with apex angle in `[0.1, 3.0]`, leg ratio in `[0.5, 1]`,
/// random scale in `[0.5, 2]` and a random rigid motion.
pub fn random_triangles(count: usize, seed: u64) -> Vec<Triangle> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let apex: f64 = rng.gen_range(0.1..=3.0);
        let ratio: f64 = rng.gen_range(0.5..=1.0);
        let scale: f64 = rng.gen_range(0.5..=2.0);
        let motion = RigidMotion {
            rotation: rng.gen_range(-PI..PI),
            translation: [rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0)],
            reflect: rng.gen_bool(0.5),
        };
        let pts = [[0.0, 0.0], [scale, 0.0], [scale * ratio * apex.cos(), scale * ratio * apex.sin()]];
        if let Ok(t) = Triangle::new(pts.map(|p| motion.apply(p))) {
            out.push(t);
        }
    }
    out
}

/// Named edge cases: near-degenerate acute and obtuse isosceles, the right
/// isosceles, the equilateral, and one aperture below the FEM floor.
pub fn stress_set() -> Vec<(String, Triangle)> {
    let iso = |a: f64| IsoscelesSpec::unit(a).expect("valid aperture").triangle();
    vec![
        ("equilateral".into(), iso(FRAC_PI_3)),
        ("right_isosceles".into(), iso(0.5 * PI)),
        ("acute_0.05".into(), iso(0.05)),
        ("acute_0.04".into(), iso(0.04)),
        ("obtuse_3.1".into(), iso(3.1)),
    ]
}

impl BoundReport {
    pub fn to_table(&self) -> String {
        let d2 = self.diameter * self.diameter;
        let mut s = String::new();
        let v = self.triangle.vertices();
        let _ = writeln!(
            s,
            "triangle ({:.6}, {:.6}) ({:.6}, {:.6}) ({:.6}, {:.6})",
            v[0][0], v[0][1], v[1][0], v[1][1], v[2][0], v[2][1]
        );
        let _ = writeln!(s, "diameter {:.6}  perimeter {:.6}", self.diameter, self.perimeter);
        let _ = writeln!(
            s,
            "mu1 {:.8} (mu1 D^2 {:.6}, error {:.2e}, {:?})",
            self.mu1_computed.value,
            self.mu1_computed.value * d2,
            self.mu1_computed.error_estimate,
            self.method
        );
        let _ = writeln!(s, "{:<34} {:<6} {:<4} {:>14} {:>13}  status", "bound", "kind", "of", "value", "margin");
        for e in &self.entries {
            let status = match (e.applicable, e.satisfied) {
                (false, _) => "n/a",
                (true, true) => "ok",
                (true, false) => "FAIL",
            };
            let _ = writeln!(
                s,
                "{:<34} {:<6} {:<4} {:>14.8} {:>13.4e}  {status}",
                e.name,
                format!("{:?}", e.kind).to_lowercase(),
                match e.target {
                    BoundTarget::Mu1 => "mu1",
                    BoundTarget::MuA => "mu_a",
                    BoundTarget::MuS => "mu_s",
                },
                e.value,
                e.margin
            );
        }
        if let Some(sym) = &self.symmetry {
            let _ = writeln!(
                s,
                "mu_s {:.8}  mu_a {:.8}  fundamental {:?} (expected {:?})",
                sym.mu_s.value, sym.mu_a.value, sym.fundamental, sym.expected
            );
        }
        for w in &self.warnings {
            let _ = writeln!(s, "warning: {w}");
        }
        for f in &self.failures {
            let _ = writeln!(s, "failure: {f}");
        }
        let _ = writeln!(s, "chain {}", if self.chain_ok { "ok" } else { "BROKEN" });
        s
    }
}
