//! TOML scene description.
//!
//! ```toml
//! [medium]
//! omega = 1.0
//! eps_b = 1.0
//! mu_b = 1.0
//!
//! [grid]
//! center = [0.0, 0.0]      # or origin = [x1, x2] (lower-left corner)
//! h = 0.05
//! n1 = 48
//! n2 = 48
//!
//! [wave]
//! direction = [1.0, 0.0]
//! amplitude = 1.0          # complex values are a number or [re, im]
//!
//! [[contrast.shape]]
//! kind = "disk"            # disk | annulus | square
//! center = [0.0, 0.0]
//! radius = 1.0             # annulus: inner, outer; square: side
//! chi_e = [1.0, 0.0]
//! chi_m = 0.0
//!
//! [solver]                 # optional
//! tol = 1e-8
//! maxit = 2000
//! restart = 80
//! precond = "none"         # none | symbol_diagonal
//!
//! [validate]               # optional
//! threshold = 0.05
//! ```
//!
//! Instead of shapes, `[contrast]` may name per-cell rasters with
//! `chi_e_raster = "file.csv"` and optionally `chi_m_raster`. Each raster line
//! is `re,im` in cell order `n = j * n1 + i`; blank lines and lines starting
//! with `#` are skipped. Relative paths resolve against the config file.
//!
//! Every error that can be tied to the input carries a line number.

use std::ops::Range;
use std::path::{Path, PathBuf};

use num_complex::Complex64;
use serde::Deserialize;
use toml::Spanned;

use super::{BackgroundMedium, ContrastMap, ContrastShape, Grid2D, PlaneWaveTE, Scene, Shape};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(untagged)]
enum RawComplex {
    Real(f64),
    Pair([f64; 2]),
}

impl RawComplex {
    fn value(self) -> Complex64 {
        match self {
            RawComplex::Real(re) => Complex64::new(re, 0.0),
            RawComplex::Pair([re, im]) => Complex64::new(re, im),
        }
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawMedium {
    omega: Spanned<f64>,
    eps_b: Spanned<f64>,
    mu_b: Spanned<f64>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawGrid {
    origin: Option<Spanned<[f64; 2]>>,
    center: Option<Spanned<[f64; 2]>>,
    h: Spanned<f64>,
    n1: Spanned<i64>,
    n2: Spanned<i64>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawWave {
    direction: Spanned<[f64; 2]>,
    amplitude: Option<Spanned<RawComplex>>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawShape {
    kind: Spanned<String>,
    center: Option<[f64; 2]>,
    radius: Option<f64>,
    inner: Option<f64>,
    outer: Option<f64>,
    side: Option<f64>,
    chi_e: Option<RawComplex>,
    chi_m: Option<RawComplex>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawContrast {
    #[serde(default)]
    shape: Vec<Spanned<RawShape>>,
    chi_e_raster: Option<Spanned<String>>,
    chi_m_raster: Option<Spanned<String>>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSolver {
    tol: Option<f64>,
    maxit: Option<usize>,
    restart: Option<usize>,
    precond: Option<Spanned<String>>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawValidate {
    threshold: Option<f64>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    medium: RawMedium,
    grid: RawGrid,
    wave: RawWave,
    #[serde(default)]
    contrast: RawContrast,
    #[serde(default)]
    solver: RawSolver,
    #[serde(default)]
    validate: RawValidate,
}

/// Solver settings read from the `[solver]` table; unset keys keep defaults.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct SolverOverrides {
    pub tol: Option<f64>,
    pub maxit: Option<usize>,
    pub restart: Option<usize>,
    pub precond: Option<String>,
}

/// A fully validated configuration.
#[derive(Debug, Clone)]
pub struct SceneConfig {
    pub scene: Scene,
    pub wave: PlaneWaveTE,
    /// Analytic shapes, empty when the contrast came from rasters.
    pub shapes: Vec<ContrastShape>,
    pub solver: SolverOverrides,
    pub validate_threshold: f64,
}

/// Default pass threshold for the cylinder validation error.
pub const DEFAULT_VALIDATE_THRESHOLD: f64 = 0.05;

fn line_of(text: &str, span: Range<usize>) -> usize {
    let end = span.start.min(text.len());
    text[..end].bytes().filter(|&b| b == b'\n').count() + 1
}

struct Ctx<'a> {
    text: &'a str,
}

impl Ctx<'_> {
    fn err(&self, span: Range<usize>, msg: impl Into<String>) -> Error {
        Error::config_at(line_of(self.text, span), msg)
    }

    fn positive(&self, name: &str, v: &Spanned<f64>) -> Result<f64> {
        let x = *v.get_ref();
        if x.is_finite() && x > 0.0 {
            Ok(x)
        } else {
            Err(self.err(v.span(), format!("{name} must be positive and finite, got {x}")))
        }
    }

    fn count(&self, name: &str, v: &Spanned<i64>) -> Result<usize> {
        let x = *v.get_ref();
        if x >= 1 {
            Ok(x as usize)
        } else {
            Err(self.err(v.span(), format!("{name} must be at least 1, got {x}")))
        }
    }
}

/// Parses configuration text. `base_dir` resolves relative raster paths.
pub fn parse_config(text: &str, base_dir: &Path) -> Result<SceneConfig> {
    let raw: RawConfig = toml::from_str(text).map_err(|e| {
        let msg = e.message().trim().to_string();
        match e.span() {
            Some(span) => Error::config_at(line_of(text, span), msg),
            None => Error::config(msg),
        }
    })?;
    let ctx = Ctx { text };

    let m = &raw.medium;
    let medium = BackgroundMedium::new(
        ctx.positive("omega", &m.omega)?,
        ctx.positive("eps_b", &m.eps_b)?,
        ctx.positive("mu_b", &m.mu_b)?,
    )?;

    let g = &raw.grid;
    let h = ctx.positive("h", &g.h)?;
    let n1 = ctx.count("n1", &g.n1)?;
    let n2 = ctx.count("n2", &g.n2)?;
    let grid = match (&g.origin, &g.center) {
        (Some(o), None) => {
            Grid2D::new(*o.get_ref(), h, n1, n2).map_err(|e| ctx.err(o.span(), e.to_string()))?
        }
        (None, Some(c)) => {
            Grid2D::centered(*c.get_ref(), h, n1, n2).map_err(|e| ctx.err(c.span(), e.to_string()))?
        }
        (Some(o), Some(_)) => return Err(ctx.err(o.span(), "grid takes either origin or center, not both")),
        (None, None) => return Err(ctx.err(g.h.span(), "grid needs origin or center")),
    };

    let w = &raw.wave;
    let amplitude = w
        .amplitude
        .as_ref()
        .map(|a| a.get_ref().value())
        .unwrap_or(Complex64::new(1.0, 0.0));
    let wave = PlaneWaveTE::new(*w.direction.get_ref(), amplitude)
        .map_err(|e| ctx.err(w.direction.span(), e.to_string()))?;

    let c = &raw.contrast;
    let mut shapes = Vec::with_capacity(c.shape.len());
    for s in &c.shape {
        shapes.push(build_shape(&ctx, s)?);
    }
    let contrast = match (&c.chi_e_raster, shapes.is_empty()) {
        (Some(path), true) => {
            let chi_e = read_raster(&ctx, path, base_dir, grid.num_cells())?;
            let chi_m = match &c.chi_m_raster {
                Some(p) => read_raster(&ctx, p, base_dir, grid.num_cells())?,
                None => vec![Complex64::new(0.0, 0.0); grid.num_cells()],
            };
            ContrastMap::new(chi_e, chi_m).map_err(|e| ctx.err(path.span(), e.to_string()))?
        }
        (Some(path), false) => {
            return Err(ctx.err(path.span(), "contrast takes either shapes or rasters, not both"))
        }
        (None, _) => {
            if let Some(p) = &c.chi_m_raster {
                return Err(ctx.err(p.span(), "chi_m_raster requires chi_e_raster"));
            }
            ContrastMap::from_shapes(&grid, &shapes)
        }
    };

    let solver = SolverOverrides {
        tol: raw.solver.tol,
        maxit: raw.solver.maxit,
        restart: raw.solver.restart,
        precond: match &raw.solver.precond {
            Some(p) => {
                let v = p.get_ref().as_str();
                if v != "none" && v != "symbol_diagonal" {
                    return Err(ctx.err(
                        p.span(),
                        format!("precond must be none or symbol_diagonal, got {v:?}"),
                    ));
                }
                Some(v.to_string())
            }
            None => None,
        },
    };

    let scene = Scene::new(medium, grid, contrast)?;
    Ok(SceneConfig {
        scene,
        wave,
        shapes,
        solver,
        validate_threshold: raw.validate.threshold.unwrap_or(DEFAULT_VALIDATE_THRESHOLD),
    })
}

/// Reads and parses a configuration file.
pub fn load_config(path: &Path) -> Result<SceneConfig> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::config(format!("cannot read {}: {e}", path.display())))?;
    let base = path
        .parent()
        .map(Path::to_path_buf)
        .unwrap_or_else(|| PathBuf::from("."));
    parse_config(&text, &base)
}

fn build_shape(ctx: &Ctx<'_>, s: &Spanned<RawShape>) -> Result<ContrastShape> {
    let span = s.span();
    let r = s.get_ref();
    let need = |name: &str, v: Option<f64>| -> Result<f64> {
        match v {
            Some(x) if x.is_finite() && x > 0.0 => Ok(x),
            Some(x) => Err(ctx.err(span.clone(), format!("shape {name} must be positive, got {x}"))),
            None => Err(ctx.err(span.clone(), format!("{} shape needs {name}", r.kind.get_ref()))),
        }
    };
    let center = r.center.unwrap_or([0.0, 0.0]);
    let shape = match r.kind.get_ref().as_str() {
        "disk" => Shape::Disk {
            center,
            radius: need("radius", r.radius)?,
        },
        "annulus" => {
            let inner = need("inner", r.inner)?;
            let outer = need("outer", r.outer)?;
            if inner >= outer {
                return Err(ctx.err(span, "annulus needs inner < outer"));
            }
            Shape::Annulus { center, inner, outer }
        }
        "square" => Shape::Square {
            center,
            side: need("side", r.side)?,
        },
        other => {
            return Err(ctx.err(
                r.kind.span(),
                format!("unknown shape kind {other:?}; expected disk, annulus or square"),
            ))
        }
    };
    let chi_e = r.chi_e.map(RawComplex::value).unwrap_or_default();
    let chi_m = r.chi_m.map(RawComplex::value).unwrap_or_default();
    if ![chi_e, chi_m]
        .iter()
        .all(|c| c.re.is_finite() && c.im.is_finite())
    {
        return Err(ctx.err(span, "shape contrast must be finite"));
    }
    Ok(ContrastShape { shape, chi_e, chi_m })
}

fn read_raster(
    ctx: &Ctx<'_>,
    path: &Spanned<String>,
    base_dir: &Path,
    cells: usize,
) -> Result<Vec<Complex64>> {
    let file = base_dir.join(path.get_ref());
    let text = std::fs::read_to_string(&file)
        .map_err(|e| ctx.err(path.span(), format!("cannot read raster {}: {e}", file.display())))?;
    let values = parse_raster(&text)
        .map_err(|(line, msg)| Error::config_at(line, format!("{}: {msg}", file.display())))?;
    if values.len() != cells {
        return Err(ctx.err(
            path.span(),
            format!(
                "raster {} has {} values, grid needs {cells}",
                file.display(),
                values.len()
            ),
        ));
    }
    Ok(values)
}

/// Parses `re,im` lines; errors report the 1-based line within the raster.
pub fn parse_raster(text: &str) -> std::result::Result<Vec<Complex64>, (usize, String)> {
    let mut out = Vec::new();
    for (idx, line) in text.lines().enumerate() {
        let t = line.trim();
        if t.is_empty() || t.starts_with('#') {
            continue;
        }
        let mut parts = t.split(',').map(str::trim);
        let parse = |p: Option<&str>| -> std::result::Result<f64, (usize, String)> {
            let s = p.ok_or((idx + 1, format!("expected \"re,im\", got {t:?}")))?;
            let v: f64 = s.parse().map_err(|_| (idx + 1, format!("not a number: {s:?}")))?;
            if v.is_finite() {
                Ok(v)
            } else {
                Err((idx + 1, format!("non-finite value {s:?}")))
            }
        };
        let re = parse(parts.next())?;
        let im = parse(parts.next())?;
        if parts.next().is_some() {
            return Err((idx + 1, format!("expected two columns, got {t:?}")));
        }
        out.push(Complex64::new(re, im));
    }
    Ok(out)
}
