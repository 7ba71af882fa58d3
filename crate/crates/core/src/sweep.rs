//! Aperture sweeps over isosceles triangles and their CSV form.

use std::collections::BTreeMap;
use std::f64::consts::{FRAC_PI_3, PI};
use std::io::{Read, Write};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bounds::{boundsiso_sandwich, prop1d_formula};
use crate::error::{Error, Result};
use crate::fem::{extrapolate_tone, ToneDomain, ToneTarget, FEM_FLOOR};
use crate::geometry::{IsoscelesSpec, ANGLE_TOL};

/// Reference apertures on `(0, π/3]`; `1.0472` stands for `π/3`.
pub const SUBEQUILATERAL_SAMPLES: [f64; 22] = [
    1.0472, 1.0001, 0.9529, 0.9058, 0.8587, 0.8116, 0.7645, 0.7173, 0.6702, 0.6231, 0.5760, 0.5288,
    0.4817, 0.4346, 0.3875, 0.3403, 0.2932, 0.2461, 0.1990, 0.1518, 0.1047, 0.05,
];

/// Reference apertures on `[π/3, π)`.
pub const SUPEREQUILATERAL_SAMPLES: [f64; 21] = [
    1.0472, 1.0996, 1.1519, 1.2043, 1.2566, 1.3090, 1.3614, 1.4137, 1.4661, 1.5184, 1.5708, 1.7237,
    1.8766, 2.0296, 2.1825, 2.3354, 2.4883, 2.6412, 2.7942, 2.9471, 3.1000,
];

const FIXED_COLUMNS: [&str; 5] = ["aperture", "mu1D2", "muaD2", "musD2", "error_estimate"];

/// One row of a sweep. Eigenvalues and bounds are scaled by `D²`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRecord {
    pub aperture: f64,
    pub mu1_d2: f64,
    pub mua_d2: Option<f64>,
    pub mus_d2: Option<f64>,
    /// Of `mu1_d2`.
    pub error_estimate: f64,
    pub bounds: BTreeMap<String, f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Figure {
    /// `μ₁`, `μ_a` and the sector sandwich on `(0, π/3]`.
    Subequilateral,
    /// `μ₁`, `μ_s` and the superequilateral bounds on `[π/3, π)`.
    Superequilateral,
}

impl std::str::FromStr for Figure {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "2" | "sub" | "subequilateral" => Ok(Figure::Subequilateral),
            "3" | "super" | "superequilateral" => Ok(Figure::Superequilateral),
            _ => Err(Error::InvalidArgument(format!("unknown figure {s:?}"))),
        }
    }
}

impl Figure {
    /// Reference samples plus `resolution` evenly spaced extra apertures,
    /// sorted and deduplicated.
    pub fn apertures(self, resolution: usize) -> Vec<f64> {
        let snap = |a: f64| if (a - FRAC_PI_3).abs() < 1e-4 { FRAC_PI_3 } else { a };
        let (samples, lo, hi): (&[f64], f64, f64) = match self {
            Figure::Subequilateral => (&SUBEQUILATERAL_SAMPLES, 0.0, FRAC_PI_3),
            Figure::Superequilateral => (&SUPEREQUILATERAL_SAMPLES, FRAC_PI_3, PI),
        };
        let mut out: Vec<f64> = samples.iter().map(|&a| snap(a)).collect();
        // Open at 0 and at π.
        out.extend((1..=resolution).map(|i| lo + (hi - lo) * i as f64 / (resolution + 1) as f64));
        out.sort_by(f64::total_cmp);
        out.dedup_by(|a, b| (*a - *b).abs() < 1e-12);
        out
    }
}

fn figure_row(figure: Figure, aperture: f64, levels: &[usize]) -> Result<SweepRecord> {
    let spec = IsoscelesSpec::unit(aperture)?;
    let domain = ToneDomain::Isosceles(spec);
    let d2 = spec.diameter().powi(2);
    let mut bounds = BTreeMap::new();
    match figure {
        Figure::Subequilateral => {
            let s = boundsiso_sandwich(aperture, 1.0)?;
            bounds.insert("sector_lower".to_string(), s.lower * d2);
            bounds.insert("sector_upper".to_string(), s.upper * d2);
            if aperture < FEM_FLOOR - ANGLE_TOL {
                return Ok(SweepRecord {
                    aperture,
                    mu1_d2: 0.5 * (s.lower + s.upper) * d2,
                    mua_d2: None,
                    mus_d2: None,
                    error_estimate: 0.5 * (s.upper - s.lower) * d2,
                    bounds,
                });
            }
            let (mu1, mua) = rayon::join(
                || extrapolate_tone(&domain, levels, ToneTarget::Fundamental),
                || extrapolate_tone(&domain, levels, ToneTarget::Antisymmetric),
            );
            let (mu1, mua) = (mu1?, mua?);
            Ok(SweepRecord {
                aperture,
                mu1_d2: mu1.value * d2,
                mua_d2: Some(mua.value * d2),
                mus_d2: None,
                error_estimate: mu1.error_estimate * d2,
                bounds,
            })
        }
        Figure::Superequilateral => {
            let p = prop1d_formula(aperture, 1.0);
            bounds.insert("super_lower".to_string(), p.lower * d2);
            bounds.insert("super_improved_lower".to_string(), p.improved_lower * d2);
            bounds.insert("cheng_upper".to_string(), p.upper * d2);
            let (mu1, mus) = rayon::join(
                || extrapolate_tone(&domain, levels, ToneTarget::Fundamental),
                || extrapolate_tone(&domain, levels, ToneTarget::Symmetric),
            );
            let (mu1, mus) = (mu1?, mus?);
            Ok(SweepRecord {
                aperture,
                mu1_d2: mu1.value * d2,
                mua_d2: None,
                mus_d2: Some(mus.value * d2),
                error_estimate: mu1.error_estimate * d2,
                bounds,
            })
        }
    }
}

/// Dataset for one figure, rows in increasing aperture. Apertures are
/// solved concurrently.
pub fn figure_dataset(figure: Figure, resolution: usize, levels: &[usize]) -> Result<Vec<SweepRecord>> {
    figure
        .apertures(resolution)
        .par_iter()
        .map(|&a| figure_row(figure, a, levels))
        .collect()
}

fn cell(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

/// One header row, then one row per record. Bound columns follow the fixed
/// columns in name order and must be the same for every record.
pub fn write_csv<W: Write>(records: &[SweepRecord], w: W) -> Result<()> {
    let names: Vec<&String> = records.first().map(|r| r.bounds.keys().collect()).unwrap_or_default();
    let mut out = csv::Writer::from_writer(w);
    let header: Vec<&str> = FIXED_COLUMNS.iter().copied().chain(names.iter().map(|s| s.as_str())).collect();
    out.write_record(&header)?;
    let mut last = f64::NEG_INFINITY;
    for r in records {
        if !r.bounds.keys().eq(names.iter().copied()) {
            return Err(Error::InvalidArgument(format!(
                "bound columns differ at aperture {}",
                r.aperture
            )));
        }
        if r.aperture < last {
            return Err(Error::InvalidArgument("rows must be ordered by aperture".into()));
        }
        last = r.aperture;
        let mut row = vec![
            r.aperture.to_string(),
            r.mu1_d2.to_string(),
            cell(r.mua_d2),
            cell(r.mus_d2),
            r.error_estimate.to_string(),
        ];
        row.extend(r.bounds.values().map(|v| v.to_string()));
        if row.iter().any(|c| matches!(c.as_str(), "NaN" | "inf" | "-inf")) {
            return Err(Error::InvalidArgument(format!(
                "non-finite value at aperture {}",
                r.aperture
            )));
        }
        out.write_record(&row)?;
    }
    out.flush()?;
    Ok(())
}

pub fn read_csv<R: Read>(r: R) -> Result<Vec<SweepRecord>> {
    let mut rdr = csv::Reader::from_reader(r);
    let header = rdr.headers()?.clone();
    if header.len() < FIXED_COLUMNS.len() || header.iter().zip(FIXED_COLUMNS).any(|(a, b)| a != b) {
        return Err(Error::InvalidArgument(format!("unexpected sweep header {header:?}")));
    }
    let names: Vec<String> = header.iter().skip(FIXED_COLUMNS.len()).map(String::from).collect();
    let parse = |s: &str| -> Result<f64> {
        s.parse::<f64>()
            .map_err(|e| Error::InvalidArgument(format!("bad number {s:?}: {e}")))
    };
    let optional = |s: &str| -> Result<Option<f64>> {
        if s.is_empty() {
            Ok(None)
        } else {
            parse(s).map(Some)
        }
    };
    rdr.records()
        .map(|row| {
            let row = row?;
            Ok(SweepRecord {
                aperture: parse(&row[0])?,
                mu1_d2: parse(&row[1])?,
                mua_d2: optional(&row[2])?,
                mus_d2: optional(&row[3])?,
                error_estimate: parse(&row[4])?,
                bounds: names
                    .iter()
                    .zip(row.iter().skip(FIXED_COLUMNS.len()))
                    .map(|(n, v)| Ok((n.clone(), parse(v)?)))
                    .collect::<Result<_>>()?,
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn samples_are_kept_exactly() {
        let a = Figure::Subequilateral.apertures(10);
        assert_eq!(a.len(), 32);
        assert_eq!(*a.last().unwrap(), FRAC_PI_3);
        for s in &SUBEQUILATERAL_SAMPLES[1..] {
            assert!(a.contains(s));
        }
        let b = Figure::Superequilateral.apertures(0);
        assert_eq!(b[0], FRAC_PI_3);
        assert!(b.contains(&3.1) && b.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn below_floor_row_uses_sandwich() {
        let r = figure_row(Figure::Subequilateral, 0.03, &[8, 16, 32]).unwrap();
        let s = boundsiso_sandwich(0.03, 1.0).unwrap();
        assert_eq!(r.bounds["sector_lower"], s.lower);
        assert_eq!(r.bounds["sector_upper"], s.upper);
        assert!(r.mua_d2.is_none());
    }

    #[test]
    fn csv_rejects_mismatched_columns() {
        let mut a = SweepRecord {
            aperture: 1.0,
            mu1_d2: 2.0,
            mua_d2: None,
            mus_d2: Some(3.0),
            error_estimate: 0.0,
            bounds: BTreeMap::from([("x".to_string(), 1.0)]),
        };
        let mut b = a.clone();
        b.aperture = 2.0;
        b.bounds.insert("y".into(), 0.0);
        assert!(write_csv(&[a.clone(), b], Vec::new()).is_err());
        a.mu1_d2 = f64::NAN;
        assert!(write_csv(&[a], Vec::new()).is_err());
        assert!(read_csv("a,b\n1,2\n".as_bytes()).is_err());
    }
}
