//! Piecewise-linear Neumann eigensolver on triangles.

mod assembly;
mod eigen;
mod mesh;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

pub use assembly::{assemble, Matrices, Sparse};
pub use mesh::{build_half_mesh, build_isosceles_mesh, build_mesh, solver_mesh, Mesh, MAX_LEVEL};

use crate::error::{Error, Result};
use crate::geometry::{IsoscelesSpec, Point, Triangle};
use assembly::{assemble_on, mat_vec, quadratic_form};
use eigen::{lowest, Pencil};

/// Smallest aperture handed to the eigensolver; thinner isosceles triangles
/// fall back to the closed-form sandwich.
pub const FEM_FLOOR: f64 = 0.05;
pub const DEFAULT_LEVELS: [usize; 3] = [32, 64, 128];
pub const MAX_MODES: usize = 20;
/// Admissible range of the observed convergence order.
pub const ORDER_RANGE: (f64, f64) = (1.5, 2.5);

/// Reflection class of an eigenfunction of an isosceles triangle.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SymmetryTag {
    Symmetric,
    Antisymmetric,
    None,
    NotApplicable,
}

/// Which half-triangle problem to solve.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModeClass {
    Symmetric,
    Antisymmetric,
}

impl std::str::FromStr for ModeClass {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "symmetric" | "s" => Ok(ModeClass::Symmetric),
            "antisymmetric" | "a" => Ok(ModeClass::Antisymmetric),
            _ => Err(Error::InvalidArgument(format!("unknown symmetry class {s:?}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EigenSolution {
    pub eigenvalue: f64,
    #[serde(skip)]
    pub coefficients: Vec<f64>,
    pub mesh_level: usize,
    pub symmetry: SymmetryTag,
    pub residual: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SymmetryClassification {
    pub fraction_antisymmetric: f64,
    pub tag: SymmetryTag,
}

/// Mesh with its matrices. For axis-Dirichlet spaces the eigenproblem is posed
/// on the free vertices only; Rayleigh quotients always use the full matrices.
#[derive(Debug, Clone)]
pub struct FemSpace {
    pub mesh: Mesh,
    pub matrices: Matrices,
    reduced: Option<(Matrices, Vec<Option<usize>>)>,
}

impl FemSpace {
    pub fn neumann(mesh: Mesh) -> Self {
        let matrices = assemble(&mesh);
        FemSpace {
            mesh,
            matrices,
            reduced: None,
        }
    }

    /// Essential zero condition on the mesh's axis vertices.
    pub fn dirichlet_on_axis(mesh: Mesh) -> Self {
        let matrices = assemble(&mesh);
        let mut map = vec![None; mesh.vertex_count()];
        let mut fixed = vec![false; mesh.vertex_count()];
        for &a in &mesh.axis_vertices {
            fixed[a] = true;
        }
        let mut next = 0;
        for (v, slot) in map.iter_mut().enumerate() {
            if !fixed[v] {
                *slot = Some(next);
                next += 1;
            }
        }
        let reduced = assemble_on(&mesh, &map, next);
        FemSpace {
            mesh,
            matrices,
            reduced: Some((reduced, map)),
        }
    }

    fn scale_shift(&self) -> f64 {
        let (mut lo, mut hi) = ([f64::MAX; 2], [f64::MIN; 2]);
        for p in &self.mesh.vertices {
            for k in 0..2 {
                lo[k] = lo[k].min(p[k]);
                hi[k] = hi[k].max(p[k]);
            }
        }
        1.0 / ((hi[0] - lo[0]).powi(2) + (hi[1] - lo[1]).powi(2))
    }

    /// The `k` smallest eigenpairs: nonzero ones for Neumann spaces, all of
    /// them for axis-Dirichlet spaces.
    pub fn eigenpairs(&self, k: usize) -> Result<Vec<EigenSolution>> {
        let (mats, map) = match &self.reduced {
            Some((m, map)) => (m, Some(map)),
            None => (&self.matrices, None),
        };
        let pencil = Pencil {
            stiffness: &mats.stiffness,
            mass: &mats.mass,
            deflate_constants: map.is_none(),
            shift: self.scale_shift(),
        };
        let pairs = lowest(&pencil, k)?;
        let mut sols: Vec<EigenSolution> = pairs
            .into_iter()
            .map(|p| EigenSolution {
                eigenvalue: p.value,
                coefficients: match map {
                    Some(map) => map.iter().map(|s| s.map_or(0.0, |r| p.vector[r])).collect(),
                    None => p.vector,
                },
                mesh_level: self.mesh.refinement_level,
                symmetry: SymmetryTag::NotApplicable,
                residual: p.residual,
            })
            .collect();
        if self.mesh.mirror.is_some() {
            self.symmetry_adapt(&mut sols)?;
        }
        Ok(sols)
    }

    pub fn mass_inner(&self, u: &[f64], v: &[f64]) -> f64 {
        quadratic_form(&self.matrices.mass, u, v)
    }

    pub fn energy_inner(&self, u: &[f64], v: &[f64]) -> f64 {
        quadratic_form(&self.matrices.stiffness, u, v)
    }

    /// `∫u` of the piecewise-linear interpolant.
    pub fn integral(&self, u: &[f64]) -> f64 {
        let mut mu = vec![0.0; u.len()];
        mat_vec(&self.matrices.mass, u, &mut mu);
        mu.iter().sum()
    }

    /// `(∫u_x², ∫u_y²)` from element-wise constant gradients.
    pub fn gradient_integrals(&self, u: &[f64]) -> [f64; 2] {
        let mut out = [0.0; 2];
        for e in 0..self.mesh.elements.len() {
            let g = self.mesh.element_gradient(e, u);
            let a = self.mesh.element_area(e);
            out[0] += a * g[0] * g[0];
            out[1] += a * g[1] * g[1];
        }
        out
    }

    /// Rayleigh quotient after removing the mass-weighted mean.
    pub fn rayleigh_quotient(&self, u: &[f64]) -> Result<f64> {
        if u.len() != self.mesh.vertex_count() {
            return Err(Error::InvalidArgument(format!(
                "{} nodal values for a mesh with {} vertices",
                u.len(),
                self.mesh.vertex_count()
            )));
        }
        let mean = self.integral(u) / self.mesh.area();
        let v: Vec<f64> = u.iter().map(|x| x - mean).collect();
        let norm = self.mass_inner(&v, &v);
        let scale = self.mass_inner(u, u);
        if !(norm > 1e-24 * scale) || u.iter().all(|&x| x == u[0]) {
            return Err(Error::InvalidArgument(
                "constant input has no Rayleigh quotient".into(),
            ));
        }
        Ok(self.energy_inner(&v, &v) / norm)
    }

    /// Rayleigh quotient of the interpolant of `f` at the mesh vertices.
    pub fn rayleigh_quotient_of_fn<F: Fn(Point) -> f64>(&self, f: F) -> Result<f64> {
        self.rayleigh_quotient(&self.mesh.interpolate(f))
    }

    fn mirrored(&self, u: &[f64]) -> Result<Vec<f64>> {
        let mirror = self.mesh.mirror.as_ref().ok_or_else(|| {
            Error::NotReflectionCompatible("mesh carries no reflection permutation".into())
        })?;
        Ok(mirror.iter().map(|&j| u[j]).collect())
    }

    /// Mass-norm share of the antisymmetric part `(u − uʳ)/2`.
    pub fn classify(&self, u: &[f64]) -> Result<SymmetryClassification> {
        let r = self.mirrored(u)?;
        let s: Vec<f64> = u.iter().zip(&r).map(|(a, b)| 0.5 * (a + b)).collect();
        let a: Vec<f64> = u.iter().zip(&r).map(|(a, b)| 0.5 * (a - b)).collect();
        let (ns, na) = (self.mass_inner(&s, &s), self.mass_inner(&a, &a));
        let fraction_antisymmetric = if ns + na > 0.0 { na / (ns + na) } else { 0.0 };
        let tag = if fraction_antisymmetric < 0.01 {
            SymmetryTag::Symmetric
        } else if fraction_antisymmetric > 0.99 {
            SymmetryTag::Antisymmetric
        } else {
            SymmetryTag::None
        };
        Ok(SymmetryClassification {
            fraction_antisymmetric,
            tag,
        })
    }

    /// Within each cluster of (numerically) equal eigenvalues, rotate to the
    /// eigenbasis of the reflection so every vector is symmetric or
    /// antisymmetric, then tag all solutions.
    fn symmetry_adapt(&self, sols: &mut [EigenSolution]) -> Result<()> {
        let mut start = 0;
        while start < sols.len() {
            let mut end = start + 1;
            while end < sols.len()
                && (sols[end].eigenvalue - sols[start].eigenvalue).abs()
                    <= 1e-7 * sols[start].eigenvalue.abs()
            {
                end += 1;
            }
            if end - start > 1 {
                let c = end - start;
                let reflected: Vec<Vec<f64>> = (start..end)
                    .map(|i| self.mirrored(&sols[i].coefficients))
                    .collect::<Result<_>>()?;
                let r = nalgebra::DMatrix::from_fn(c, c, |i, j| {
                    let a = self.mass_inner(&sols[start + i].coefficients, &reflected[j]);
                    let b = self.mass_inner(&sols[start + j].coefficients, &reflected[i]);
                    0.5 * (a + b)
                });
                let eig = nalgebra::SymmetricEigen::new(r);
                let mut order: Vec<usize> = (0..c).collect();
                order.sort_by(|&i, &j| eig.eigenvalues[j].total_cmp(&eig.eigenvalues[i]));
                let old: Vec<Vec<f64>> = (start..end).map(|i| sols[i].coefficients.clone()).collect();
                for (slot, &k) in order.iter().enumerate() {
                    let w = eig.eigenvectors.column(k);
                    let mut v = vec![0.0; old[0].len()];
                    for (coef, vec) in w.iter().zip(&old) {
                        v.iter_mut().zip(vec).for_each(|(a, b)| *a += coef * b);
                    }
                    sols[start + slot].coefficients = v;
                }
            }
            start = end;
        }
        for s in sols.iter_mut() {
            s.symmetry = self.classify(&s.coefficients)?.tag;
        }
        Ok(())
    }
}

fn check_modes(space: &FemSpace, k: usize) -> Result<()> {
    if k == 0 || k > MAX_MODES {
        return Err(Error::InvalidArgument(format!("mode count {k} outside 1..={MAX_MODES}")));
    }
    if space.mesh.vertex_count() < 10 * k {
        return Err(Error::InvalidArgument(format!(
            "{} vertices are too few for {k} modes; refine the mesh",
            space.mesh.vertex_count()
        )));
    }
    Ok(())
}

/// Mesh, matrices and the first `k` nonzero Neumann eigenpairs of `t`.
pub fn solve_triangle(t: &Triangle, n: usize, k: usize) -> Result<(FemSpace, Vec<EigenSolution>)> {
    let space = FemSpace::neumann(solver_mesh(t, n)?);
    check_modes(&space, k)?;
    let sols = space.eigenpairs(k)?;
    Ok((space, sols))
}

/// First `k` nonzero Neumann eigenvalues of `t` with eigenvectors.
pub fn neumann_spectrum(t: &Triangle, n: usize, k: usize) -> Result<Vec<EigenSolution>> {
    Ok(solve_triangle(t, n, k)?.1)
}

/// As [`solve_triangle`] on the canonical isosceles triangle, whose mesh is
/// reflection compatible.
pub fn solve_isosceles(spec: &IsoscelesSpec, n: usize, k: usize) -> Result<(FemSpace, Vec<EigenSolution>)> {
    let space = FemSpace::neumann(build_isosceles_mesh(spec, n)?);
    check_modes(&space, k)?;
    let sols = space.eigenpairs(k)?;
    Ok((space, sols))
}

/// Half-triangle space: natural condition on the axis for the symmetric
/// class, zero on the axis for the antisymmetric class.
pub fn symmetry_reduced_space(spec: &IsoscelesSpec, n: usize, class: ModeClass) -> Result<FemSpace> {
    let mesh = build_half_mesh(spec, n)?;
    Ok(match class {
        ModeClass::Symmetric => FemSpace::neumann(mesh),
        ModeClass::Antisymmetric => FemSpace::dirichlet_on_axis(mesh),
    })
}

/// `μ_s` or `μ_a` of `T(α)` from its upper half.
pub fn symmetry_reduced_tone(spec: &IsoscelesSpec, n: usize, class: ModeClass) -> Result<EigenSolution> {
    let space = symmetry_reduced_space(spec, n, class)?;
    let mut sol = space.eigenpairs(1)?.remove(0);
    sol.symmetry = match class {
        ModeClass::Symmetric => SymmetryTag::Symmetric,
        ModeClass::Antisymmetric => SymmetryTag::Antisymmetric,
    };
    Ok(sol)
}

/// Fraction of antisymmetric mass and its tag for a full-triangle solution.
pub fn classify_mode_symmetry(space: &FemSpace, sol: &EigenSolution) -> Result<SymmetryClassification> {
    space.classify(&sol.coefficients)
}

/// Rayleigh quotient of nodal values on a mesh.
pub fn rayleigh_quotient_of(mesh: &Mesh, u: &[f64]) -> Result<f64> {
    FemSpace::neumann(mesh.clone()).rayleigh_quotient(u)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExtrapolatedTone {
    pub value: f64,
    pub error_estimate: f64,
    pub levels_used: Vec<usize>,
    /// `None` when the three finest corrections do not shrink monotonically.
    pub observed_order: Option<f64>,
    /// Raw discrete eigenvalue at each level.
    pub level_values: Vec<f64>,
    pub warnings: Vec<String>,
}

impl ExtrapolatedTone {
    /// Multiply every eigenvalue-valued field by `factor` (e.g. `D²`).
    pub fn scaled(&self, factor: f64) -> ExtrapolatedTone {
        ExtrapolatedTone {
            value: self.value * factor,
            error_estimate: self.error_estimate * factor,
            level_values: self.level_values.iter().map(|v| v * factor).collect(),
            ..self.clone()
        }
    }

    pub fn order_ok(&self) -> bool {
        self.observed_order
            .is_some_and(|p| (ORDER_RANGE.0..=ORDER_RANGE.1).contains(&p))
    }
}

/// Order-2 Richardson extrapolation from the three finest of `levels`,
/// which must double from one to the next.
pub fn richardson(levels: &[usize], values: &[f64]) -> Result<ExtrapolatedTone> {
    if levels.len() < 3 || levels.len() != values.len() {
        return Err(Error::InvalidArgument(
            "extrapolation needs at least three levels with one value each".into(),
        ));
    }
    if levels.windows(2).any(|w| w[1] != 2 * w[0]) {
        return Err(Error::InvalidArgument(format!(
            "levels {levels:?} are not in ratio 2"
        )));
    }
    let k = values.len();
    let (m1, m2, m3) = (values[k - 3], values[k - 2], values[k - 1]);
    let correction = (m3 - m2) / 3.0;
    let ratio = (m1 - m2) / (m2 - m3);
    let observed_order = (ratio > 0.0 && ratio.is_finite()).then(|| ratio.log2());
    let mut warnings = Vec::new();
    match observed_order {
        Some(p) if (ORDER_RANGE.0..=ORDER_RANGE.1).contains(&p) => {}
        Some(p) => warnings.push(format!(
            "observed convergence order {p:.3} outside [{}, {}]",
            ORDER_RANGE.0, ORDER_RANGE.1
        )),
        None => warnings.push("eigenvalue corrections are not monotone; no observed order".into()),
    }
    for w in &warnings {
        log::warn!("{w}");
    }
    Ok(ExtrapolatedTone {
        value: m3 + correction,
        error_estimate: correction.abs(),
        levels_used: levels.to_vec(),
        observed_order,
        level_values: values.to_vec(),
        warnings,
    })
}

/// Domain of an extrapolated solve.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ToneDomain {
    Triangle(Triangle),
    Isosceles(IsoscelesSpec),
}

/// Eigenvalue being extrapolated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ToneTarget {
    Fundamental,
    Symmetric,
    Antisymmetric,
}

/// Discrete eigenvalue for one level.
pub fn tone_at_level(domain: &ToneDomain, n: usize, target: ToneTarget) -> Result<f64> {
    let sol = match (domain, target) {
        (ToneDomain::Triangle(t), ToneTarget::Fundamental) => {
            FemSpace::neumann(solver_mesh(t, n)?).eigenpairs(1)?.remove(0)
        }
        (ToneDomain::Isosceles(s), ToneTarget::Fundamental) => {
            FemSpace::neumann(build_isosceles_mesh(s, n)?).eigenpairs(1)?.remove(0)
        }
        (ToneDomain::Isosceles(s), ToneTarget::Symmetric) => {
            symmetry_reduced_tone(s, n, ModeClass::Symmetric)?
        }
        (ToneDomain::Isosceles(s), ToneTarget::Antisymmetric) => {
            symmetry_reduced_tone(s, n, ModeClass::Antisymmetric)?
        }
        (ToneDomain::Triangle(t), target) => {
            let (spec, _) = t.as_isosceles().ok_or_else(|| {
                Error::InvalidArgument(format!("{target:?} tone needs an isosceles triangle"))
            })?;
            return tone_at_level(&ToneDomain::Isosceles(spec), n, target);
        }
    };
    Ok(sol.eigenvalue)
}

/// Solve at every level (levels run concurrently) and extrapolate.
pub fn extrapolate_tone(domain: &ToneDomain, levels: &[usize], target: ToneTarget) -> Result<ExtrapolatedTone> {
    let values: Vec<f64> = levels
        .par_iter()
        .map(|&n| tone_at_level(domain, n, target))
        .collect::<Result<_>>()?;
    richardson(levels, &values)
}
