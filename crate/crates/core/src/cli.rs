//! Batch front end: forward solves, spectrum studies, cylinder validation and
//! the bundled self-checks.
//!
//! Exit codes are 0 success, 1 failed check, 2 configuration error, 3 solver
//! failure and 4 resource budget.

use std::path::{Path, PathBuf};

use num_complex::Complex64;

use crate::assembly::{assemble_dense, assemble_rhs};
use crate::error::{Error, Result};
use crate::fastop::build_operator;
use crate::io::{
    write_field_comparison, write_raster, write_residual_history, write_spectrum, FieldComparisonRow, Summary,
};
use crate::oracle::{dense_spectrum, CylinderSpec, MieCylinder};
use crate::scene::config::{load_config, SceneConfig};
use crate::scene::{incident_fields, FieldVector, Shape};
use crate::selfcheck::{run_selfcheck as run_suites, SelfCheckOptions};
use crate::solver::{solve_scene, Preconditioner, SolveReport, SolverConfig};
use crate::symbol::{dedup_points, predicted_accumulation};

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Mode {
    Forward,
    Spectrum,
    Validate,
    Selfcheck,
}

/// Process exit status.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExitStatus {
    Success,
    CheckFailed,
    ConfigError,
    SolverFailure,
    OverBudget,
}

impl ExitStatus {
    pub fn code(self) -> i32 {
        match self {
            ExitStatus::Success => 0,
            ExitStatus::CheckFailed => 1,
            ExitStatus::ConfigError => 2,
            ExitStatus::SolverFailure => 3,
            ExitStatus::OverBudget => 4,
        }
    }

    pub fn of_error(e: &Error) -> Self {
        match e {
            Error::Config { .. } | Error::Domain(_) | Error::Io(_) => ExitStatus::ConfigError,
            Error::Resource { .. } => ExitStatus::OverBudget,
            Error::Singular { .. } | Error::Numerical(_) | Error::Accuracy(_) => ExitStatus::SolverFailure,
        }
    }
}

/// Solver settings given on the command line; they win over the config file.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct SolverFlags {
    pub tol: Option<f64>,
    pub maxit: Option<usize>,
    pub restart: Option<usize>,
    pub precond: Option<Preconditioner>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunManifest {
    pub config: Option<PathBuf>,
    pub mode: Mode,
    pub out_dir: PathBuf,
    pub solver: SolverFlags,
    pub seed: u64,
    /// Test hook forwarded to the kernel split self-check.
    pub kernel_perturbation: f64,
}

impl RunManifest {
    pub fn new(mode: Mode, config: Option<PathBuf>, out_dir: impl Into<PathBuf>) -> Self {
        Self {
            config,
            mode,
            out_dir: out_dir.into(),
            solver: SolverFlags::default(),
            seed: SelfCheckOptions::default().seed,
            kernel_perturbation: 0.0,
        }
    }
}

/// Status, the summary written to `summary.txt` and an optional diagnostic.
#[derive(Debug, Clone)]
pub struct RunOutcome {
    pub status: ExitStatus,
    pub summary: Summary,
    pub diagnostic: Option<String>,
}

impl RunOutcome {
    fn failure(e: Error) -> Self {
        let diagnostic = match &e {
            Error::Resource { .. } => format!("{e}; use a smaller grid"),
            _ => e.to_string(),
        };
        Self {
            status: ExitStatus::of_error(&e),
            summary: Summary::new(),
            diagnostic: Some(diagnostic),
        }
    }
}

/// Dispatches on `manifest.mode`.
pub fn run(manifest: &RunManifest) -> RunOutcome {
    match manifest.mode {
        Mode::Forward => run_forward(manifest),
        Mode::Spectrum => run_spectrum(manifest),
        Mode::Validate => run_validate(manifest),
        Mode::Selfcheck => run_selfcheck(manifest),
    }
}

fn prepare(manifest: &RunManifest) -> Result<SceneConfig> {
    let path = manifest
        .config
        .as_deref()
        .ok_or_else(|| Error::config(format!("mode {:?} needs --config", manifest.mode)))?;
    let cfg = load_config(path).map_err(|e| match e {
        Error::Io(io) => Error::config(format!("cannot read {}: {io}", path.display())),
        other => other,
    })?;
    make_out_dir(&manifest.out_dir)?;
    Ok(cfg)
}

fn make_out_dir(dir: &Path) -> Result<()> {
    std::fs::create_dir_all(dir)
        .map_err(|e| Error::config(format!("output directory {} is not writable: {e}", dir.display())))
}

/// Config values first, then command-line flags.
pub fn solver_config(cfg: &SceneConfig, flags: &SolverFlags) -> Result<SolverConfig> {
    let mut s = SolverConfig::default();
    let o = &cfg.solver;
    if let Some(v) = o.tol {
        s.rel_tolerance = v;
    }
    if let Some(v) = o.maxit {
        s.max_iterations = v;
    }
    if let Some(v) = o.restart {
        s.restart = v;
    }
    if let Some(p) = &o.precond {
        s.preconditioner = p.parse()?;
    }
    s.rel_tolerance = flags.tol.unwrap_or(s.rel_tolerance);
    s.max_iterations = flags.maxit.unwrap_or(s.max_iterations);
    s.restart = flags.restart.unwrap_or(s.restart);
    s.preconditioner = flags.precond.unwrap_or(s.preconditioner);
    s.validate()?;
    Ok(s)
}

const COMPONENTS: [&str; 3] = ["E1", "E2", "H3"];

fn forward_artifacts(
    cfg: &SceneConfig,
    flags: &SolverFlags,
    out: &Path,
    summary: &mut Summary,
) -> Result<SolveReport> {
    let scene = &cfg.scene;
    let solver = solver_config(cfg, flags)?;
    let op = build_operator(scene)?;
    let b = assemble_rhs(scene, &cfg.wave);
    let report = solve_scene(scene, &op, &b, &solver)?;
    let incident = incident_fields(&cfg.wave, scene);
    let scattered = &report.solution - &incident;
    let grid = scene.grid();
    for (c, name) in COMPONENTS.iter().enumerate() {
        write_raster(&out.join(format!("{name}.csv")), grid, report.solution.block(c))?;
        write_raster(
            &out.join(format!("{name}_scattered.csv")),
            grid,
            scattered.block(c),
        )?;
    }
    write_residual_history(&out.join("residual_history.csv"), &report.residual_history)?;
    summary
        .push("cells", scene.num_cells())
        .push("unknowns", scene.dim())
        .push("kb_h", scene.kb_h())
        .push("preconditioner", format!("{:?}", solver.preconditioner))
        .push("tolerance", format!("{:e}", solver.rel_tolerance))
        .push("iterations", report.iterations)
        .push("converged", report.converged)
        .push(
            "true_relative_residual",
            format!("{:e}", report.true_relative_residual),
        );
    if let Some(b) = &report.breakdown {
        summary.push("breakdown", b);
    }
    Ok(report)
}

fn finish(out: &Path, summary: Summary, status: ExitStatus, diagnostic: Option<String>) -> RunOutcome {
    if let Err(e) = summary.write(&out.join("summary.txt")) {
        return RunOutcome::failure(e);
    }
    RunOutcome {
        status,
        summary,
        diagnostic,
    }
}

fn not_converged(report: &SolveReport) -> String {
    format!(
        "solver did not converge after {} iterations (relative residual {:e})",
        report.iterations, report.true_relative_residual
    )
}

/// Solves the scene and writes total and scattered field rasters, the
/// residual history and a summary.
pub fn run_forward(manifest: &RunManifest) -> RunOutcome {
    let cfg = match prepare(manifest) {
        Ok(c) => c,
        Err(e) => return RunOutcome::failure(e),
    };
    let mut summary = Summary::new();
    summary.push("mode", "forward");
    match forward_artifacts(&cfg, &manifest.solver, &manifest.out_dir, &mut summary) {
        Ok(r) if r.converged => finish(&manifest.out_dir, summary, ExitStatus::Success, None),
        Ok(r) => finish(
            &manifest.out_dir,
            summary,
            ExitStatus::SolverFailure,
            Some(not_converged(&r)),
        ),
        Err(e) => RunOutcome::failure(e),
    }
}

/// Dense eigenvalues next to the predicted accumulation points.
pub fn run_spectrum(manifest: &RunManifest) -> RunOutcome {
    let cfg = match prepare(manifest) {
        Ok(c) => c,
        Err(e) => return RunOutcome::failure(e),
    };
    let out = &manifest.out_dir;
    let result = (|| -> Result<Summary> {
        let scene = &cfg.scene;
        if scene.dim() > crate::oracle::spectrum::EIGEN_BUDGET {
            return Err(Error::Resource {
                what: "dense eigensolver dimension".into(),
                required: scene.dim() as u64,
                budget: crate::oracle::spectrum::EIGEN_BUDGET as u64,
            });
        }
        let predicted = dedup_points(&predicted_accumulation(scene.contrast()), 1e-12);
        let a = assemble_dense(scene)?;
        let report = dense_spectrum(&a, &predicted)?;
        write_spectrum(&out.join("spectrum.csv"), &report.eigenvalues, &report.predicted)?;
        let mut s = Summary::new();
        s.push("mode", "spectrum")
            .push("eigenvalues", report.eigenvalues.len())
            .push("min_modulus", format!("{:e}", report.min_modulus()))
            .push("predicted_points", report.predicted.len());
        for (i, (p, d)) in report.predicted.iter().zip(&report.distances).enumerate() {
            s.push(format!("predicted_{i}"), format!("{},{}", p.re, p.im));
            s.push(format!("min_distance_{i}"), format!("{d:e}"));
        }
        Ok(s)
    })();
    match result {
        Ok(s) => finish(out, s, ExitStatus::Success, None),
        Err(e) => RunOutcome::failure(e),
    }
}

fn cylinder_of(cfg: &SceneConfig) -> Result<CylinderSpec> {
    match cfg.shapes.as_slice() {
        [s] => match s.shape {
            Shape::Disk { center, radius } if s.chi_m == Complex64::new(0.0, 0.0) => {
                CylinderSpec::new(radius, s.chi_e, center)
            }
            Shape::Disk { .. } => Err(Error::config("validation needs chi_m = 0 on the cylinder")),
            _ => Err(Error::config("validation needs a disk shape")),
        },
        _ => Err(Error::config(
            "validation needs exactly one disk shape in [[contrast.shape]]",
        )),
    }
}

/// Relative L2 error of `(E1, E2)` over cells whose centres lie more than `h`
/// from the cylinder boundary, with the compared rows.
pub fn compare_with_cylinder(
    cfg: &SceneConfig,
    solution: &FieldVector,
) -> Result<(f64, usize, Vec<FieldComparisonRow>)> {
    let spec = cylinder_of(cfg)?;
    let scene = &cfg.scene;
    let mie = MieCylinder::new(spec, *scene.medium(), cfg.wave)?;
    let h = scene.grid().h();
    let (mut num, mut den, mut used) = (0.0, 0.0, 0);
    let mut rows = Vec::new();
    for (n, x) in scene.grid().centers().enumerate() {
        let dist = (x[0] - spec.center[0]).hypot(x[1] - spec.center[1]);
        if (dist - spec.radius).abs() <= h {
            continue;
        }
        let reference = mie.fields_at(x)?;
        for (c, field) in COMPONENTS.iter().enumerate() {
            let numerical = solution.block(c)[n];
            if c < 2 {
                num += (numerical - reference[c]).norm_sqr();
                den += reference[c].norm_sqr();
            }
            rows.push(FieldComparisonRow {
                x,
                field,
                numerical,
                reference: reference[c],
            });
        }
        used += 1;
    }
    if used == 0 || den == 0.0 {
        return Err(Error::config(
            "no cells lie farther than h from the cylinder boundary",
        ));
    }
    Ok(((num / den).sqrt(), used, rows))
}

/// Solves a single-cylinder scene and compares with the series solution.
pub fn run_validate(manifest: &RunManifest) -> RunOutcome {
    let cfg = match prepare(manifest) {
        Ok(c) => c,
        Err(e) => return RunOutcome::failure(e),
    };
    if let Err(e) = cylinder_of(&cfg) {
        return RunOutcome::failure(e);
    }
    let out = &manifest.out_dir;
    let mut summary = Summary::new();
    summary.push("mode", "validate");
    let report = match forward_artifacts(&cfg, &manifest.solver, out, &mut summary) {
        Ok(r) => r,
        Err(e) => return RunOutcome::failure(e),
    };
    let (err, used, rows) = match compare_with_cylinder(&cfg, &report.solution) {
        Ok(v) => v,
        Err(e) => return RunOutcome::failure(e),
    };
    if let Err(e) = write_field_comparison(&out.join("field_comparison.csv"), &rows) {
        return RunOutcome::failure(e);
    }
    summary
        .push("cells_compared", used)
        .push("relative_l2_error", format!("{err:e}"))
        .push("threshold", cfg.validate_threshold);
    if !report.converged {
        let msg = not_converged(&report);
        return finish(out, summary, ExitStatus::SolverFailure, Some(msg));
    }
    if err < cfg.validate_threshold {
        finish(out, summary, ExitStatus::Success, None)
    } else {
        let msg = format!(
            "relative error {err:e} is not below the threshold {}",
            cfg.validate_threshold
        );
        finish(out, summary, ExitStatus::CheckFailed, Some(msg))
    }
}

/// Runs the invariant suites and writes `selfcheck.csv`.
pub fn run_selfcheck(manifest: &RunManifest) -> RunOutcome {
    if let Err(e) = make_out_dir(&manifest.out_dir) {
        return RunOutcome::failure(e);
    }
    let opts = SelfCheckOptions {
        seed: manifest.seed,
        kernel_perturbation: manifest.kernel_perturbation,
    };
    let report = run_suites(&opts);
    if let Err(e) = report.write_table(&manifest.out_dir.join("selfcheck.csv")) {
        return RunOutcome::failure(e);
    }
    let mut summary = Summary::new();
    summary
        .push("mode", "selfcheck")
        .push("seed", manifest.seed)
        .push("invariants", report.results.len());
    let failing = report.failing_ids();
    summary.push("failing", failing.join(" "));
    if failing.is_empty() {
        finish(&manifest.out_dir, summary, ExitStatus::Success, None)
    } else {
        let msg = format!("failing invariants: {}", failing.join(", "));
        finish(&manifest.out_dir, summary, ExitStatus::CheckFailed, Some(msg))
    }
}
