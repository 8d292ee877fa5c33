//! Command line front end: spec ingestion, pipeline runs and CSV/SVG/JSON output.
//!
//! Spec documents are JSON:
//!
//! ```json
//! {
//!   "prefix": [ [[[1, 0], [0, 0]], [[0, 0], [2, 0]]] ],
//!   "tail": { "kind": "periodic", "cycle": [ [[[0, 0], [1, 0]], [[0, 0], [0, 0]]] ] }
//! }
//! ```
//!
//! A matrix is a list of rows and every entry an `[re, im]` pair. The tail is
//! one of `{"kind": "periodic", "cycle": [...]}`,
//! `{"kind": "vanishing", "limits": [...], "decay": {"type": "power", "c": 1, "p": 1}}`
//! or `{"kind": "builtin", "name": "dense_angle_diagonal"}`; the builtin takes
//! an optional `"shift": [re, im]` subtracted from every tail block.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::blockop::{limsup_ranges_capped, BlockOperatorSpec, Builtin, Decay, TailModel, DEFAULT_K_CAP};
use crate::convex2d::{AngleGrid, ConvexRegion, Point, DEFAULT_ANGLES};
use crate::error::{Error, Result};
use crate::essrange::{essential_numerical_range_capped, translate_spec, EssentialRangeResult};
use crate::linalg::ComplexMatrix;
use crate::numrange::numerical_range;
use crate::oracle::{inner_approximate_we, DEFAULT_WINDOW};
use crate::regroup::{choose_translation, regroup, verify_conv_free, Decomposition, DEFAULT_GROUPS, DEFAULT_SCAN_CAP};

type MatrixJson = Vec<Vec<[f64; 2]>>;

#[derive(Serialize, Deserialize, Debug)]
#[serde(deny_unknown_fields)]
struct SpecJson {
    #[serde(default)]
    prefix: Vec<MatrixJson>,
    tail: TailJson,
}

#[derive(Serialize, Deserialize, Debug)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
enum TailJson {
    Periodic {
        cycle: Vec<MatrixJson>,
    },
    Vanishing {
        limits: Vec<MatrixJson>,
        decay: DecayJson,
    },
    Builtin {
        name: String,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        shift: Option<[f64; 2]>,
    },
}

#[derive(Serialize, Deserialize, Debug)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
enum DecayJson {
    Power { c: f64, p: f64 },
}

fn matrix_from_json(m: &MatrixJson, path: &str) -> Result<ComplexMatrix> {
    if m.is_empty() {
        return Err(Error::validation(path, "matrix has no rows"));
    }
    let dim = m.len();
    let mut entries = Vec::with_capacity(dim * dim);
    for (i, row) in m.iter().enumerate() {
        if row.len() != dim {
            return Err(Error::validation(
                format!("{path}[{i}]"),
                format!("row has {} entries but the matrix has {dim} rows (blocks must be square)", row.len()),
            ));
        }
        for (j, [re, im]) in row.iter().enumerate() {
            if !(re.is_finite() && im.is_finite()) {
                return Err(Error::validation(format!("{path}[{i}][{j}]"), "entry must be finite"));
            }
            entries.push(Complex64::new(*re, *im));
        }
    }
    ComplexMatrix::new(dim, entries)
}

fn matrices_from_json(ms: &[MatrixJson], path: &str) -> Result<Vec<ComplexMatrix>> {
    ms.iter()
        .enumerate()
        .map(|(i, m)| matrix_from_json(m, &format!("{path}[{i}]")))
        .collect()
}

fn matrix_to_json(a: &ComplexMatrix) -> MatrixJson {
    a.rows()
        .into_iter()
        .map(|row| row.into_iter().map(|z| [z.re, z.im]).collect())
        .collect()
}

/// Parses and validates a spec document.
pub fn parse_spec(text: &str) -> Result<BlockOperatorSpec> {
    let de = &mut serde_json::Deserializer::from_str(text);
    let doc: SpecJson = serde_path_to_error::deserialize(de).map_err(|e| {
        let inner = e.inner();
        Error::Parse {
            path: e.path().to_string(),
            message: format!("{inner} (line {}, column {})", inner.line(), inner.column()),
        }
    })?;
    let prefix = matrices_from_json(&doc.prefix, "prefix")?;
    let tail = match &doc.tail {
        TailJson::Periodic { cycle } => {
            if cycle.is_empty() {
                return Err(Error::validation("tail.cycle", "cycle must be non-empty"));
            }
            TailModel::Periodic {
                cycle: matrices_from_json(cycle, "tail.cycle")?,
            }
        }
        TailJson::Vanishing { limits, decay } => {
            if limits.is_empty() {
                return Err(Error::validation("tail.limits", "limit list must be non-empty"));
            }
            let DecayJson::Power { c, p } = *decay;
            TailModel::Vanishing {
                limits: matrices_from_json(limits, "tail.limits")?,
                decay: Decay::Power { c, p },
            }
        }
        TailJson::Builtin { name, shift } => {
            let name = Builtin::from_name(name)
                .ok_or_else(|| Error::validation("tail.name", format!("unknown builtin '{name}'")))?;
            let shift = shift.map_or(Complex64::new(0.0, 0.0), |[re, im]| Complex64::new(re, im));
            TailModel::Builtin { name, shift }
        }
    };
    BlockOperatorSpec::new(prefix, tail)
}

/// Pretty-printed JSON accepted by [`parse_spec`].
pub fn serialize_spec(spec: &BlockOperatorSpec) -> String {
    let tail = match spec.tail() {
        TailModel::Periodic { cycle } => TailJson::Periodic {
            cycle: cycle.iter().map(matrix_to_json).collect(),
        },
        TailModel::Vanishing { limits, decay } => {
            let Decay::Power { c, p } = *decay;
            TailJson::Vanishing {
                limits: limits.iter().map(matrix_to_json).collect(),
                decay: DecayJson::Power { c, p },
            }
        }
        TailModel::Builtin { name, shift } => TailJson::Builtin {
            name: name.name().to_string(),
            shift: (shift.norm() != 0.0).then_some([shift.re, shift.im]),
        },
    };
    let doc = SpecJson {
        prefix: spec.prefix().iter().map(matrix_to_json).collect(),
        tail,
    };
    serde_json::to_string_pretty(&doc).expect("spec documents always serialize")
}

pub fn load_spec(path: &Path) -> Result<BlockOperatorSpec> {
    let text = fs::read_to_string(path).map_err(|e| Error::Parse {
        path: path.display().to_string(),
        message: e.to_string(),
    })?;
    parse_spec(&text)
}

#[derive(Parser, Debug)]
#[command(name = "essrange", version, about = "Numerical and essential numerical ranges of block diagonal operators")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Numerical range of a single block.
    Range {
        #[command(flatten)]
        common: RunConfig,
        /// Block index (1-based).
        #[arg(long, default_value_t = 1)]
        block: usize,
    },
    /// Essential numerical range of the operator.
    Essential {
        #[command(flatten)]
        common: RunConfig,
        /// Oracle samples drawn for the plot.
        #[arg(long, default_value_t = 2000)]
        samples: usize,
    },
    /// Regrouped decomposition removing the convex hull.
    Decompose {
        #[command(flatten)]
        common: RunConfig,
    },
    /// Conv-free gap of a decomposition and the crosscheck gap.
    Verify {
        #[command(flatten)]
        common: RunConfig,
        /// Use one block per group instead of the regrouped decomposition.
        #[arg(long)]
        ungrouped: bool,
    },
    /// Monte-Carlo essential samples.
    Oracle {
        #[command(flatten)]
        common: RunConfig,
        #[arg(long, default_value_t = 10_000)]
        samples: usize,
        /// Tail start; defaults to the limsup convergence index.
        #[arg(long)]
        k: Option<usize>,
    },
}

#[derive(Args, Debug, Clone)]
pub struct RunConfig {
    /// Path of the spec JSON document.
    pub spec: PathBuf,
    /// Size K of the angle grid.
    #[arg(long, default_value_t = DEFAULT_ANGLES)]
    pub angles: usize,
    /// Tail-doubling threshold.
    #[arg(long, default_value_t = 1e-3)]
    pub eps: f64,
    /// Proximity parameter of the regrouping.
    #[arg(long, default_value_t = crate::regroup::DEFAULT_EPS)]
    pub group_eps: f64,
    /// Block window beyond the tail start used by the oracle.
    #[arg(long, default_value_t = DEFAULT_WINDOW)]
    pub horizon: usize,
    /// Number of groups built by the regrouping.
    #[arg(long, default_value_t = DEFAULT_GROUPS)]
    pub groups: usize,
    /// Blocks scanned per extreme point before giving up.
    #[arg(long, default_value_t = DEFAULT_SCAN_CAP)]
    pub scan_cap: usize,
    /// Cap on the tail start index during doubling.
    #[arg(long, default_value_t = DEFAULT_K_CAP)]
    pub k_cap: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// CSV output; standard output when absent.
    #[arg(long)]
    pub csv: Option<PathBuf>,
    #[arg(long)]
    pub svg: Option<PathBuf>,
    /// Certificate JSON output.
    #[arg(long)]
    pub cert: Option<PathBuf>,
}

impl RunConfig {
    fn grid(&self) -> Result<AngleGrid> {
        if self.angles < 8 {
            return Err(Error::validation("--angles", format!("must be at least 8, got {}", self.angles)));
        }
        AngleGrid::new(self.angles)
    }

    fn check_eps(&self) -> Result<()> {
        for (name, v) in [("--eps", self.eps), ("--group-eps", self.group_eps)] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::validation(name, format!("must be positive, got {v}")));
            }
        }
        Ok(())
    }
}

/// Process exit status for an error.
pub fn exit_code(err: &Error) -> i32 {
    match err {
        Error::Parse { .. } | Error::Validation { .. } => 2,
        Error::NoConvergence { .. }
        | Error::ScanExhausted { .. }
        | Error::NonConvergence { .. }
        | Error::HorizonTooSmall { .. } => 3,
        Error::InconsistentResult { .. } => 4,
        _ => 1,
    }
}

fn write_out(path: &Path, content: &str) -> Result<()> {
    fs::write(path, content).map_err(|e| Error::validation(path.display().to_string(), e.to_string()))
}

fn emit_csv(cfg: &RunConfig, content: &str) -> Result<()> {
    match &cfg.csv {
        Some(p) => write_out(p, content),
        None => {
            print!("{content}");
            Ok(())
        }
    }
}

fn sibling(path: &Path, suffix: &str) -> PathBuf {
    let stem = path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    path.with_file_name(format!("{stem}.{suffix}"))
}

pub fn points_csv(header: &str, points: &[Point]) -> String {
    let mut out = format!("{header}\n");
    for p in points {
        let _ = writeln!(out, "{},{}", p.re, p.im);
    }
    out
}

/// Runs a command; diagnostics go to standard error.
pub fn run(cli: &Cli) -> Result<()> {
    match &cli.command {
        Command::Range { common, block } => run_range(common, *block),
        Command::Essential { common, samples } => run_essential(common, *samples),
        Command::Decompose { common } => run_decompose(common),
        Command::Verify { common, ungrouped } => run_verify(common, *ungrouped),
        Command::Oracle { common, samples, k } => run_oracle(common, *samples, *k),
    }
}

fn run_range(cfg: &RunConfig, block: usize) -> Result<()> {
    let spec = load_spec(&cfg.spec)?;
    let grid = cfg.grid()?;
    if block == 0 {
        return Err(Error::validation("--block", "blocks are indexed from 1"));
    }
    let r = numerical_range(&spec.block(block), grid)?;
    let mut csv = String::from("theta,support,boundary_re,boundary_im\n");
    for j in 0..grid.len() {
        let _ = writeln!(csv, "{},{},{},{}", grid.angle(j), r.supports[j], r.points[j].re, r.points[j].im);
    }
    emit_csv(cfg, &csv)?;
    if let Some(svg) = &cfg.svg {
        let plot = Plot::new()
            .polygon(&r.outer, "#999999", "none")
            .polygon(&r.inner, "#1f77b4", "#1f77b433");
        write_out(svg, &plot.render())?;
    }
    eprintln!("block {block}: {} inner vertices, inner/outer gap {:e}", r.inner.vertices().len(), r.gap);
    Ok(())
}

fn essential(cfg: &RunConfig, spec: &BlockOperatorSpec) -> Result<EssentialRangeResult> {
    cfg.check_eps()?;
    essential_numerical_range_capped(spec, cfg.grid()?, cfg.eps, cfg.k_cap)
}

fn certificate_json(we: &EssentialRangeResult) -> serde_json::Value {
    serde_json::json!({
        "converged_at_k": we.converged_at_k,
        "certificate": we.certificate.iter().map(|(k, d)| serde_json::json!({"k": k, "distance": d})).collect::<Vec<_>>(),
        "crosscheck_gap": we.crosscheck_gap,
        "tolerance": we.tolerance,
        "limsup_resolution": we.limsup.resolution(),
        "vertices": we.region.vertices().len(),
    })
}

fn run_essential(cfg: &RunConfig, samples: usize) -> Result<()> {
    let spec = load_spec(&cfg.spec)?;
    let we = essential(cfg, &spec)?;
    emit_csv(cfg, &points_csv("re,im", we.region.vertices()))?;
    if let Some(csv) = &cfg.csv {
        write_out(&sibling(csv, "limsup.csv"), &points_csv("re,im", we.limsup.points()))?;
    }
    if let Some(cert) = &cfg.cert {
        let text = serde_json::to_string_pretty(&certificate_json(&we)).expect("json values serialize");
        write_out(cert, &text)?;
    }
    if let Some(svg) = &cfg.svg {
        let oracle = inner_approximate_we(&spec, we.converged_at_k, samples.max(1), cfg.seed, cfg.horizon)?;
        let plot = Plot::new()
            .polygon(&we.region, "#1f77b4", "#1f77b422")
            .points(we.limsup.points(), "#d62728", 1.5)
            .points(oracle.points(), "#2ca02c", 0.8);
        write_out(svg, &plot.render())?;
    }
    eprintln!(
        "essential range: {} vertices, converged at k = {}, crosscheck gap {:e} (tolerance {:e})",
        we.region.vertices().len(),
        we.converged_at_k,
        we.crosscheck_gap,
        we.tolerance
    );
    Ok(())
}

struct Regrouped {
    spec: BlockOperatorSpec,
    we: EssentialRangeResult,
    z: Complex64,
    reason: &'static str,
    decomposition: Decomposition,
}

fn regrouped(cfg: &RunConfig, spec: &BlockOperatorSpec, ungrouped: bool) -> Result<Regrouped> {
    let grid = cfg.grid()?;
    let we = essential(cfg, spec)?;
    let t = choose_translation(&we.region)?;
    let shifted = translate_spec(spec, t.z);
    let we = essential(cfg, &shifted)?;
    let decomposition = if ungrouped {
        Decomposition::identity(cfg.groups)
    } else {
        regroup(&shifted, &we, grid, cfg.group_eps, cfg.scan_cap, cfg.groups)?
    };
    Ok(Regrouped {
        spec: shifted,
        we,
        z: t.z,
        reason: t.reason.as_str(),
        decomposition,
    })
}

fn run_decompose(cfg: &RunConfig) -> Result<()> {
    let spec = load_spec(&cfg.spec)?;
    let r = regrouped(cfg, &spec, false)?;
    let mut csv = String::from("m,boundary,distance\n");
    for (i, (b, d)) in r.decomposition.boundaries.iter().zip(&r.decomposition.distances).enumerate() {
        let _ = writeln!(csv, "{},{},{}", i + 1, b, d);
    }
    emit_csv(cfg, &csv)?;
    if let Some(cert) = &cfg.cert {
        let doc = serde_json::json!({
            "translation": [r.z.re, r.z.im],
            "reason": r.reason,
            "boundaries": r.decomposition.boundaries,
            "distances": r.decomposition.distances,
        });
        write_out(cert, &serde_json::to_string_pretty(&doc).expect("json values serialize"))?;
    }
    eprintln!(
        "translation z = {} ({}), {} groups, last boundary {}",
        r.z,
        r.reason,
        r.decomposition.len(),
        r.decomposition.boundaries.last().copied().unwrap_or(0)
    );
    Ok(())
}

fn run_verify(cfg: &RunConfig, ungrouped: bool) -> Result<()> {
    let spec = load_spec(&cfg.spec)?;
    let r = regrouped(cfg, &spec, ungrouped)?;
    let report = verify_conv_free(&r.spec, &r.decomposition, &r.we, cfg.grid()?, cfg.group_eps)?;
    let csv = format!(
        "quantity,value\nconv_free_gap,{}\ncrosscheck_gap,{}\ngroup_certificate_k,{}\n",
        report.gap, r.we.crosscheck_gap, report.converged_at
    );
    emit_csv(cfg, &csv)?;
    if let Some(cert) = &cfg.cert {
        let doc = serde_json::json!({
            "conv_free_gap": report.gap,
            "crosscheck_gap": r.we.crosscheck_gap,
            "ungrouped": ungrouped,
            "certificate": report.certificate.iter().map(|(k, d)| serde_json::json!({"k": k, "distance": d})).collect::<Vec<_>>(),
        });
        write_out(cert, &serde_json::to_string_pretty(&doc).expect("json values serialize"))?;
    }
    eprintln!("conv-free gap {:e}, crosscheck gap {:e}", report.gap, r.we.crosscheck_gap);
    Ok(())
}

fn run_oracle(cfg: &RunConfig, samples: usize, k: Option<usize>) -> Result<()> {
    let spec = load_spec(&cfg.spec)?;
    let k = match k {
        Some(0) => return Err(Error::validation("--k", "tail start must be ≥ 1")),
        Some(k) => k,
        None => {
            cfg.check_eps()?;
            limsup_ranges_capped(&spec, cfg.grid()?, cfg.eps, cfg.k_cap)?.converged_at_k
        }
    };
    let cloud = inner_approximate_we(&spec, k, samples, cfg.seed, cfg.horizon)?;
    emit_csv(cfg, &points_csv("re,im", cloud.points()))?;
    if let Some(svg) = &cfg.svg {
        write_out(svg, &Plot::new().points(cloud.points(), "#2ca02c", 0.8).render())?;
    }
    eprintln!("{} samples from blocks {k}..{}", cloud.len(), k + cfg.horizon);
    Ok(())
}

enum Layer {
    Polygon {
        vertices: Vec<Point>,
        stroke: String,
        fill: String,
    },
    Points {
        points: Vec<Point>,
        color: String,
        radius: f64,
    },
}

/// Minimal SVG scatter/polygon plot in mathematical orientation (y up).
pub struct Plot {
    layers: Vec<Layer>,
}

impl Default for Plot {
    fn default() -> Self {
        Self::new()
    }
}

impl Plot {
    const SIZE: f64 = 600.0;

    pub fn new() -> Self {
        Self { layers: Vec::new() }
    }

    pub fn polygon(mut self, region: &ConvexRegion, stroke: &str, fill: &str) -> Self {
        self.layers.push(Layer::Polygon {
            vertices: region.vertices().to_vec(),
            stroke: stroke.into(),
            fill: fill.into(),
        });
        self
    }

    pub fn points(mut self, points: &[Point], color: &str, radius: f64) -> Self {
        self.layers.push(Layer::Points {
            points: points.to_vec(),
            color: color.into(),
            radius,
        });
        self
    }

    pub fn render(&self) -> String {
        let all: Vec<Point> = self
            .layers
            .iter()
            .flat_map(|l| match l {
                Layer::Polygon { vertices, .. } => vertices.iter(),
                Layer::Points { points, .. } => points.iter(),
            })
            .copied()
            .collect();
        let (mut x0, mut x1, mut y0, mut y1) = (0.0f64, 0.0f64, 0.0f64, 0.0f64);
        if let Some(p) = all.first() {
            (x0, x1, y0, y1) = (p.re, p.re, p.im, p.im);
        }
        for p in &all {
            x0 = x0.min(p.re);
            x1 = x1.max(p.re);
            y0 = y0.min(p.im);
            y1 = y1.max(p.im);
        }
        let span = (x1 - x0).max(y1 - y0).max(1e-9);
        let margin = 0.1 * span;
        let (cx, cy) = ((x0 + x1) / 2.0, (y0 + y1) / 2.0);
        let half = span / 2.0 + margin;
        let scale = Self::SIZE / (2.0 * half);
        let map = |p: Point| ((p.re - cx + half) * scale, (cy + half - p.im) * scale);

        let mut out = String::new();
        let _ = writeln!(
            out,
            r#"<svg xmlns="http://www.w3.org/2000/svg" width="{s}" height="{s}" viewBox="0 0 {s} {s}">"#,
            s = Self::SIZE
        );
        let _ = writeln!(out, r#"<rect width="100%" height="100%" fill="white"/>"#);
        let (ax0, ay) = map(Complex64::new(cx - half, 0.0));
        let (ax1, _) = map(Complex64::new(cx + half, 0.0));
        let (ax, ay0) = map(Complex64::new(0.0, cy + half));
        let (_, ay1) = map(Complex64::new(0.0, cy - half));
        let _ = writeln!(
            out,
            r##"<g stroke="#bbbbbb" stroke-width="1"><line x1="{ax0:.3}" y1="{ay:.3}" x2="{ax1:.3}" y2="{ay:.3}"/><line x1="{ax:.3}" y1="{ay0:.3}" x2="{ax:.3}" y2="{ay1:.3}"/></g>"##
        );
        for layer in &self.layers {
            match layer {
                Layer::Polygon { vertices, stroke, fill } => {
                    let pts: Vec<String> = vertices
                        .iter()
                        .map(|&p| {
                            let (x, y) = map(p);
                            format!("{x:.3},{y:.3}")
                        })
                        .collect();
                    let _ = writeln!(
                        out,
                        r#"<polygon points="{}" stroke="{stroke}" fill="{fill}" stroke-width="1.5"/>"#,
                        pts.join(" ")
                    );
                }
                Layer::Points { points, color, radius } => {
                    let _ = writeln!(out, r#"<g fill="{color}">"#);
                    for &p in points {
                        let (x, y) = map(p);
                        let _ = writeln!(out, r#"<circle cx="{x:.3}" cy="{y:.3}" r="{radius}"/>"#);
                    }
                    let _ = writeln!(out, "</g>");
                }
            }
        }
        out.push_str("</svg>\n");
        out
    }
}
