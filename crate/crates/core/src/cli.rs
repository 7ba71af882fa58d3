//! Command-line interface of the `trineumann` binary.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use serde::Serialize;

use crate::acceptance;
use crate::bounds::{audit, random_triangles, stress_set, BoundReport};
use crate::error::{Error, Result};
use crate::fem::{
    extrapolate_tone, richardson, solve_triangle, solver_mesh, symmetry_reduced_space,
    ExtrapolatedTone, ModeClass, SymmetryTag, ToneDomain, ToneTarget,
};
use crate::geometry::{IsoscelesSpec, Triangle};
use crate::special_fn::{bessel_j_zero, bessel_jprime_zero, jprime_crossing};
use crate::sweep::{figure_dataset, write_csv, Figure};

/// Environment variable holding the worker thread count.
pub const THREADS_ENV: &str = "TRINEUMANN_THREADS";

pub const EXIT_CHECK_FAILED: u8 = 1;
pub const EXIT_RUNTIME: u8 = 3;

#[derive(Debug, Parser)]
#[command(name = "trineumann", version, about = "Neumann eigenvalues of triangles")]
pub struct Cli {
    /// Read apertures in degrees instead of radians.
    #[arg(long, global = true)]
    pub degrees: bool,
    /// Mesh levels for extrapolation.
    #[arg(long, global = true, value_enum, default_value_t = Budget::Default)]
    pub budget: Budget,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Budget {
    Fast,
    Default,
    Precise,
}

impl Budget {
    pub fn levels(self) -> [usize; 3] {
        match self {
            Budget::Fast => [16, 32, 64],
            Budget::Default => [32, 64, 128],
            Budget::Precise => [64, 128, 256],
        }
    }
}

#[derive(Debug, Args)]
pub struct TriangleArgs {
    /// Apex angle of an isosceles triangle.
    #[arg(long, conflicts_with = "vertices", required_unless_present = "vertices")]
    pub aperture: Option<f64>,
    /// Length of the equal sides.
    #[arg(long, default_value_t = 1.0, requires = "aperture")]
    pub leg: f64,
    /// Six comma-separated coordinates x0,y0,x1,y1,x2,y2.
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    pub vertices: Option<Vec<f64>>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Extrapolated eigenvalues, symmetry tags and bound table of one triangle.
    Solve {
        #[command(flatten)]
        triangle: TriangleArgs,
        /// Number of nonzero eigenvalues.
        #[arg(long, default_value_t = 1)]
        k: usize,
        /// Also solve the symmetric or antisymmetric half problem (isosceles only).
        #[arg(long)]
        class: Option<ModeClass>,
        /// Write the report as JSON.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Sweep dataset for the subequilateral (2) or superequilateral (3) family.
    Figure {
        #[arg(long)]
        which: Figure,
        /// Extra evenly spaced apertures besides the reference samples.
        #[arg(long, default_value_t = 0)]
        resolution: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Bound audit over seeded random triangles and the stress set.
    Audit {
        #[arg(long, default_value_t = 50)]
        count: usize,
        #[arg(long, default_value_t = 7)]
        seed: u64,
        /// Write all reports as a JSON array.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Bessel zeros and the derivative-zero crossing.
    Bessel {
        /// `J0|J1 K`: the K-th positive zero.
        #[arg(long, num_args = 2, value_names = ["FUNCTION", "K"])]
        zero: Option<Vec<String>>,
        /// First positive zero of J'_nu.
        #[arg(long, value_name = "NU")]
        jprime: Option<f64>,
        /// Order at which the first zero of J'_nu reaches j_{1,1}.
        #[arg(long)]
        crossing: bool,
    },
    /// Run the acceptance checks.
    Selftest {
        /// Run a single check.
        #[arg(long)]
        only: Option<u8>,
    },
    /// Export the solver mesh of a triangle.
    Mesh {
        #[command(flatten)]
        triangle: TriangleArgs,
        #[arg(long, default_value_t = 16)]
        level: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Debug, Clone, Serialize)]
pub struct ModeReport {
    pub index: usize,
    pub value: f64,
    pub value_d2: f64,
    pub error_estimate: f64,
    pub observed_order: Option<f64>,
    pub symmetry: SymmetryTag,
}

#[derive(Debug, Clone, Serialize)]
pub struct ClassTone {
    pub class: ModeClass,
    pub value: f64,
    pub value_d2: f64,
    pub error_estimate: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct SolveReport {
    pub triangle: Triangle,
    pub diameter: f64,
    pub levels: Vec<usize>,
    pub modes: Vec<ModeReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub class_tone: Option<ClassTone>,
    pub bounds: BoundReport,
}

fn triangle_of(args: &TriangleArgs, degrees: bool) -> Result<Triangle> {
    match (&args.vertices, args.aperture) {
        (Some(v), _) => Triangle::from_flat(v),
        (None, Some(a)) => {
            let a = if degrees { a.to_radians() } else { a };
            Ok(IsoscelesSpec::new(a, args.leg)?.triangle())
        }
        (None, None) => Err(Error::InvalidArgument("give --aperture or --vertices".into())),
    }
}

/// First `k` eigenvalues of `t`, extrapolated index by index. Isosceles
/// triangles are solved class by class on the half triangle so that modes
/// of different symmetry are never mixed across levels.
pub fn solve_report(t: &Triangle, k: usize, class: Option<ModeClass>, levels: &[usize]) -> Result<SolveReport> {
    let iso = t.as_isosceles().map(|(s, _)| s);
    let d2 = t.diameter().powi(2);
    let mut modes: Vec<ModeReport> = match &iso {
        Some(spec) => {
            let mut all = Vec::new();
            for (c, tag) in [
                (ModeClass::Symmetric, SymmetryTag::Symmetric),
                (ModeClass::Antisymmetric, SymmetryTag::Antisymmetric),
            ] {
                let per_level: Vec<Vec<f64>> = levels
                    .par_iter()
                    .map(|&n| {
                        let sols = symmetry_reduced_space(spec, n, c)?.eigenpairs(k)?;
                        Ok(sols.iter().map(|s| s.eigenvalue).collect())
                    })
                    .collect::<Result<_>>()?;
                for i in 0..k {
                    let values: Vec<f64> = per_level.iter().map(|v| v[i]).collect();
                    all.push(mode_report(0, &richardson(levels, &values)?, d2, tag));
                }
            }
            all.sort_by(|a, b| a.value.total_cmp(&b.value));
            all.truncate(k);
            all
        }
        None => {
            let per_level: Vec<Vec<f64>> = levels
                .par_iter()
                .map(|&n| Ok(solve_triangle(t, n, k)?.1.iter().map(|s| s.eigenvalue).collect()))
                .collect::<Result<_>>()?;
            (0..k)
                .map(|i| {
                    let values: Vec<f64> = per_level.iter().map(|v| v[i]).collect();
                    Ok(mode_report(0, &richardson(levels, &values)?, d2, SymmetryTag::NotApplicable))
                })
                .collect::<Result<_>>()?
        }
    };
    for (i, m) in modes.iter_mut().enumerate() {
        m.index = i + 1;
    }
    let class_tone = match class {
        None => None,
        Some(c) => {
            let spec = iso.ok_or_else(|| Error::InvalidArgument("--class needs an isosceles triangle".into()))?;
            let target = match c {
                ModeClass::Symmetric => ToneTarget::Symmetric,
                ModeClass::Antisymmetric => ToneTarget::Antisymmetric,
            };
            let tone = extrapolate_tone(&ToneDomain::Isosceles(spec), levels, target)?;
            Some(ClassTone {
                class: c,
                value: tone.value,
                value_d2: tone.value * d2,
                error_estimate: tone.error_estimate,
            })
        }
    };
    Ok(SolveReport {
        triangle: *t,
        diameter: t.diameter(),
        levels: levels.to_vec(),
        modes,
        class_tone,
        bounds: audit(t, levels)?,
    })
}

fn mode_report(index: usize, tone: &ExtrapolatedTone, d2: f64, symmetry: SymmetryTag) -> ModeReport {
    ModeReport {
        index,
        value: tone.value,
        value_d2: tone.value * d2,
        error_estimate: tone.error_estimate,
        observed_order: tone.observed_order,
        symmetry,
    }
}

fn output(path: Option<&Path>) -> Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p)?)),
        None => Box::new(io::stdout().lock()),
    })
}

fn write_json<T: Serialize>(value: &T, path: &Path) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    serde_json::to_writer_pretty(&mut w, value)?;
    writeln!(w)?;
    w.flush()?;
    Ok(())
}

/// Configure the global thread pool from [`THREADS_ENV`], if set.
pub fn init_threads() -> Result<()> {
    if let Ok(v) = std::env::var(THREADS_ENV) {
        let n: usize = v
            .parse()
            .map_err(|_| Error::InvalidArgument(format!("{THREADS_ENV}={v:?} is not a thread count")))?;
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| Error::InvalidArgument(format!("thread pool: {e}")))?;
    }
    Ok(())
}

/// Execute a parsed command line; text output goes to `stdout`.
pub fn run(cli: Cli, stdout: &mut dyn Write) -> Result<ExitCode> {
    let levels = cli.budget.levels();
    match cli.command {
        Command::Solve { triangle, k, class, out } => {
            let t = triangle_of(&triangle, cli.degrees)?;
            let r = solve_report(&t, k, class, &levels)?;
            for m in &r.modes {
                writeln!(
                    stdout,
                    "mu{} = {:.8}  mu{} D^2 = {:.6}  error {:.2e}  {:?}",
                    m.index, m.value, m.index, m.value_d2, m.error_estimate, m.symmetry
                )?;
            }
            if let Some(c) = &r.class_tone {
                let label = match c.class {
                    ModeClass::Symmetric => "mu_s",
                    ModeClass::Antisymmetric => "mu_a",
                };
                writeln!(stdout, "{label} = {:.8}  {label} D^2 = {:.6}  error {:.2e}", c.value, c.value_d2, c.error_estimate)?;
            }
            write!(stdout, "{}", r.bounds.to_table())?;
            if let Some(p) = out {
                write_json(&r, &p)?;
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Figure { which, resolution, out } => {
            let rows = figure_dataset(which, resolution, &levels)?;
            match out {
                Some(p) => write_csv(&rows, output(Some(&p))?)?,
                None => write_csv(&rows, &mut *stdout)?,
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Audit { count, seed, out } => {
            let mut cases: Vec<(String, Triangle)> = random_triangles(count, seed)
                .into_iter()
                .enumerate()
                .map(|(i, t)| (format!("random_{i}"), t))
                .collect();
            cases.extend(stress_set());
            let reports: Vec<BoundReport> = cases.par_iter().map(|(_, t)| audit(t, &levels)).collect::<Result<_>>()?;
            let mut broken = 0;
            for ((name, _), r) in cases.iter().zip(&reports) {
                let d2 = r.diameter * r.diameter;
                writeln!(
                    stdout,
                    "{name:<18} mu1 D^2 {:>10.6}  error {:.1e}  {}",
                    r.mu1_computed.value * d2,
                    r.mu1_computed.error_estimate * d2,
                    if r.chain_ok { "ok" } else { "BROKEN" }
                )?;
                if !r.chain_ok {
                    broken += 1;
                    for f in &r.failures {
                        writeln!(stdout, "  {f}")?;
                    }
                    for e in r.entries.iter().filter(|e| !e.satisfied) {
                        writeln!(stdout, "  {} {:?} {:.8} margin {:.3e}", e.name, e.kind, e.value, e.margin)?;
                    }
                }
            }
            writeln!(stdout, "{} triangles, {broken} broken", reports.len())?;
            if let Some(p) = out {
                write_json(&reports, &p)?;
            }
            Ok(if broken == 0 {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(EXIT_CHECK_FAILED)
            })
        }
        Command::Bessel { zero, jprime, crossing } => {
            let mut any = false;
            if let Some(z) = zero {
                let order = match z[0].to_ascii_uppercase().as_str() {
                    "J0" | "0" => 0,
                    "J1" | "1" => 1,
                    other => return Err(Error::InvalidArgument(format!("unknown Bessel function {other:?}"))),
                };
                let k: usize = z[1]
                    .parse()
                    .map_err(|_| Error::InvalidArgument(format!("bad zero index {:?}", z[1])))?;
                writeln!(stdout, "{:.9}", bessel_j_zero(order, k)?)?;
                any = true;
            }
            if let Some(nu) = jprime {
                writeln!(stdout, "{:.9}", bessel_jprime_zero(nu)?)?;
                any = true;
            }
            if crossing {
                writeln!(stdout, "{:.9}", jprime_crossing())?;
                any = true;
            }
            if !any {
                return Err(Error::InvalidArgument("give --zero, --jprime or --crossing".into()));
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Selftest { only } => {
            let results = match only {
                Some(id) => vec![acceptance::run(id)
                    .ok_or_else(|| Error::InvalidArgument(format!("no acceptance check {id}")))?],
                None => {
                    let mut all = Vec::new();
                    for &(id, ..) in acceptance::CRITERIA.iter() {
                        let r = acceptance::run(id).expect("listed id");
                        writeln!(stdout, "{r}")?;
                        all.push(r);
                    }
                    all
                }
            };
            if only.is_some() {
                writeln!(stdout, "{}", results[0])?;
            }
            let failed = results.iter().filter(|r| !r.passed).count();
            writeln!(stdout, "{} passed, {failed} failed", results.len() - failed)?;
            Ok(if failed == 0 {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(EXIT_CHECK_FAILED)
            })
        }
        Command::Mesh { triangle, level, out } => {
            let t = triangle_of(&triangle, cli.degrees)?;
            let mesh = solver_mesh(&t, level)?;
            match out {
                Some(p) => {
                    let mut w = output(Some(&p))?;
                    mesh.write_ascii(&mut w)?;
                    w.flush()?;
                }
                None => mesh.write_ascii(&mut *stdout)?,
            }
            Ok(ExitCode::SUCCESS)
        }
    }
}
