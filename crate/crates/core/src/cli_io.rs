//! Model spec files, batch commands and report emission for the command-line tool.
//!
//! Exit codes: 0 success, 2 parse, 3 precondition, 4 window, 5 audit failure.

use std::fmt::Write as _;
use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use crate::builders::{
    build_crossed_product_model, build_point_collapse, build_product_triple, build_torus_triple, graph_model,
    scalar_model, two_point_model, CircleBundleBlockModel, CircleBundleParams, CrossedOptions, DecomposedTripleModel,
    GraphSpec, TorusParams,
};
use crate::collapse::{self, EpsSweepResult};
use crate::error::{Error, Result};
use crate::estimates::{self, AuditConfig, AuditReport};
use crate::matrix::{c, CMatrix};
use crate::operator::hermitian_spectrum;
use crate::qmetric::{self, distance_bruteforce_oracle, SolverParams, StateFunctional};
use crate::triple::SpectralTripleModel;

pub const SCHEMA_VERSION: u32 = 1;
pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");
/// Grid intervals per cube edge used by `distance --oracle`.
pub const ORACLE_RESOLUTION: usize = 24;

pub const EXIT_OK: i32 = 0;
pub const EXIT_PARSE: i32 = 2;
pub const EXIT_PRECONDITION: i32 = 3;
pub const EXIT_WINDOW: i32 = 4;
pub const EXIT_AUDIT: i32 = 5;

/// Exit code for an error.
pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Parse(_) | Error::Io(_) => EXIT_PARSE,
        Error::WindowExceeded { .. } => EXIT_WINDOW,
        _ => EXIT_PRECONDITION,
    }
}

/// Small commutative models used as inputs of the product, crossed-product and point builders.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum BaseModelSpec {
    Graph(GraphSpec),
    Path {
        points: usize,
        #[serde(default, skip_serializing_if = "Vec::is_empty")]
        kernel_points: Vec<usize>,
    },
    Cycle {
        points: usize,
    },
    /// Diagonal 2×2 algebra with D = [[0, κ], [κ, 0]].
    TwoPoint {
        kappa: f64,
    },
    /// Scalars acting on C^n with D = diag(values).
    Scalar {
        values: Vec<f64>,
    },
}

impl BaseModelSpec {
    pub fn build(&self) -> Result<SpectralTripleModel> {
        match self {
            BaseModelSpec::Graph(g) => graph_model(g),
            BaseModelSpec::Path { points, kernel_points } => {
                graph_model(&GraphSpec::path(*points).with_kernel_points(kernel_points.clone()))
            }
            BaseModelSpec::Cycle { points } => {
                if *points < 3 {
                    return Err(Error::Precondition("a cycle needs at least 3 points".into()));
                }
                graph_model(&GraphSpec::cycle(*points))
            }
            BaseModelSpec::TwoPoint { kappa } => two_point_model(c(*kappa, 0.0)),
            BaseModelSpec::Scalar { values } => scalar_model(values),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProductParams {
    pub even: BaseModelSpec,
    pub other: BaseModelSpec,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CrossedParams {
    pub base: BaseModelSpec,
    pub d: usize,
    pub cutoff: i64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cocycle: Option<Vec<Vec<f64>>>,
    #[serde(default = "one", skip_serializing_if = "is_one")]
    pub degree: i64,
    #[serde(default, skip_serializing_if = "is_false")]
    pub adversarial_twist: bool,
}

fn one() -> i64 {
    1
}

fn is_one(v: &i64) -> bool {
    *v == 1
}

fn is_false(v: &bool) -> bool {
    !*v
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PointParams {
    pub model: BaseModelSpec,
    /// Point (graph models) or basis vector defining the averaging state.
    pub state: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub enum BuilderSpec {
    Torus(TorusParams),
    CircleBundle(CircleBundleParams),
    Product(ProductParams),
    CrossedProduct(CrossedParams),
    PointCollapse(PointParams),
}

impl BuilderSpec {
    pub fn name(&self) -> &'static str {
        match self {
            BuilderSpec::Torus(_) => "torus",
            BuilderSpec::CircleBundle(_) => "circle_bundle",
            BuilderSpec::Product(_) => "product",
            BuilderSpec::CrossedProduct(_) => "crossed_product",
            BuilderSpec::PointCollapse(_) => "point_collapse",
        }
    }
}

/// A model file: `{"schema_version": 1, "seed": …, "builder": …, "params": {…}}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawSpec", into = "RawSpec")]
pub struct ModelSpecFile {
    pub schema_version: u32,
    pub seed: u64,
    pub builder: BuilderSpec,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSpec {
    schema_version: u32,
    seed: u64,
    builder: String,
    params: Value,
}

impl TryFrom<RawSpec> for ModelSpecFile {
    type Error = String;

    fn try_from(raw: RawSpec) -> std::result::Result<Self, String> {
        if raw.schema_version != SCHEMA_VERSION {
            return Err(format!("unsupported schema_version {} (expected {SCHEMA_VERSION})", raw.schema_version));
        }
        fn params<T: serde::de::DeserializeOwned>(v: Value) -> std::result::Result<T, String> {
            serde_json::from_value(v).map_err(|e| format!("params: {e}"))
        }
        let builder = match raw.builder.as_str() {
            "torus" => BuilderSpec::Torus(params(raw.params)?),
            "circle_bundle" => BuilderSpec::CircleBundle(params(raw.params)?),
            "product" => BuilderSpec::Product(params(raw.params)?),
            "crossed_product" => BuilderSpec::CrossedProduct(params(raw.params)?),
            "point_collapse" => BuilderSpec::PointCollapse(params(raw.params)?),
            other => return Err(format!("unknown builder `{other}`")),
        };
        Ok(Self { schema_version: raw.schema_version, seed: raw.seed, builder })
    }
}

impl From<ModelSpecFile> for RawSpec {
    fn from(s: ModelSpecFile) -> Self {
        let name = s.builder.name().to_string();
        let params = match &s.builder {
            BuilderSpec::Torus(p) => serde_json::to_value(p),
            BuilderSpec::CircleBundle(p) => serde_json::to_value(p),
            BuilderSpec::Product(p) => serde_json::to_value(p),
            BuilderSpec::CrossedProduct(p) => serde_json::to_value(p),
            BuilderSpec::PointCollapse(p) => serde_json::to_value(p),
        }
        .expect("params serialize");
        RawSpec { schema_version: s.schema_version, seed: s.seed, builder: name, params }
    }
}

impl ModelSpecFile {
    pub fn parse(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))
    }

    pub fn emit(&self) -> String {
        serde_json::to_string_pretty(self).expect("spec serializes")
    }

    /// SHA-256 of the canonical compact serialization.
    pub fn hash(&self) -> String {
        let canonical = serde_json::to_string(self).expect("spec serializes");
        format!("{:x}", Sha256::digest(canonical.as_bytes()))
    }
}

/// A built model together with its source.
pub struct LoadedModel {
    pub spec: ModelSpecFile,
    pub hash: String,
    pub model: DecomposedTripleModel,
    /// Set for circle-bundle specs, whose sweeps run block by block.
    pub blocks: Option<CircleBundleBlockModel>,
}

pub fn build_model(spec: &ModelSpecFile) -> Result<(DecomposedTripleModel, Option<CircleBundleBlockModel>)> {
    Ok(match &spec.builder {
        BuilderSpec::Torus(p) => (build_torus_triple(p)?, None),
        BuilderSpec::CircleBundle(p) => {
            let blocks = CircleBundleBlockModel::from_params(p)?;
            (blocks.assemble()?, Some(blocks))
        }
        BuilderSpec::Product(p) => (build_product_triple(&p.even.build()?, &p.other.build()?)?, None),
        BuilderSpec::CrossedProduct(p) => {
            let opts = CrossedOptions {
                cocycle: p.cocycle.clone(),
                degree: p.degree,
                adversarial_twist: p.adversarial_twist,
            };
            (build_crossed_product_model(&p.base.build()?, p.d, p.cutoff, &opts)?, None)
        }
        BuilderSpec::PointCollapse(p) => {
            let m = p.model.build()?;
            let mu = if m.graph().is_some() {
                StateFunctional::point(&m, p.state)?
            } else if p.state < m.hilbert_dim() {
                StateFunctional::basis_vector(m.hilbert_dim(), p.state)?
            } else {
                return Err(Error::Precondition(format!("state index {} out of range", p.state)));
            };
            (build_point_collapse(&m, &mu)?, None)
        }
    })
}

pub fn load_model(path: &Path) -> Result<LoadedModel> {
    let text = fs::read_to_string(path)?;
    let spec = ModelSpecFile::parse(&text)?;
    let (model, blocks) = build_model(&spec)?;
    Ok(LoadedModel { hash: spec.hash(), spec, model, blocks })
}

/// Comma list of values, or `geometric:start:ratio:count`.
pub fn parse_eps_grid(s: &str) -> Result<Vec<f64>> {
    let bad = |what: &str| Error::Parse(format!("eps grid `{s}`: {what}"));
    if let Some(rest) = s.strip_prefix("geometric:") {
        let parts: Vec<&str> = rest.split(':').collect();
        if parts.len() != 3 {
            return Err(bad("expected geometric:start:ratio:count"));
        }
        let start: f64 = parts[0].trim().parse().map_err(|_| bad("start"))?;
        let ratio: f64 = parts[1].trim().parse().map_err(|_| bad("ratio"))?;
        let count: usize = parts[2].trim().parse().map_err(|_| bad("count"))?;
        return Ok((0..count).map(|i| start * ratio.powi(i as i32)).collect());
    }
    s.split(',').map(|t| t.trim().parse::<f64>().map_err(|_| bad(t))).collect()
}

/// Writes through a temporary file in the target directory and renames it into place.
pub fn write_atomic(path: &Path, contents: &[u8]) -> Result<()> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p.to_path_buf(),
        _ => PathBuf::from("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(&dir)?;
    tmp.write_all(contents)?;
    tmp.flush()?;
    tmp.persist(path).map_err(|e| Error::Io(e.error))?;
    Ok(())
}

/// Display form of a float; non-finite values become "inf", "-inf" or "nan".
pub fn fmt_num(x: f64) -> String {
    if x.is_nan() {
        "nan".into()
    } else if x == f64::INFINITY {
        "inf".into()
    } else if x == f64::NEG_INFINITY {
        "-inf".into()
    } else {
        format!("{x}")
    }
}

/// JSON number, or the string "inf" for the Hausdorff sentinel.
pub fn json_num(x: f64) -> Value {
    if x.is_finite() {
        json!(x)
    } else {
        Value::String(fmt_num(x))
    }
}

fn sector_cell(sector: &[i64]) -> String {
    if sector.is_empty() {
        "none".into()
    } else {
        sector.iter().map(|k| k.to_string()).collect::<Vec<_>>().join(";")
    }
}

/// Track table with header `eps,sector,track_index,eigenvalue`, track-major.
pub fn sweep_csv(s: &EpsSweepResult) -> String {
    let mut out = String::from("eps,sector,track_index,eigenvalue\n");
    for tr in &s.tracks {
        let sector = sector_cell(&tr.sector);
        for (e, v) in s.eps_grid.iter().zip(&tr.values) {
            writeln!(out, "{},{},{},{}", fmt_num(*e), sector, tr.index, fmt_num(*v)).unwrap();
        }
    }
    out
}

/// Per-ε table with header `eps,hausdorff,bound`.
pub fn summary_csv(s: &EpsSweepResult) -> String {
    let mut out = String::from("eps,hausdorff,bound\n");
    for ((e, h), b) in s.eps_grid.iter().zip(&s.hausdorff_curve).zip(&s.bound_curve) {
        writeln!(out, "{},{},{}", fmt_num(*e), fmt_num(*h), fmt_num(*b)).unwrap();
    }
    out
}

/// `out.csv` → `out.summary.csv`
pub fn summary_path(out: &Path) -> PathBuf {
    let stem = out.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    out.with_file_name(format!("{stem}.summary.csv"))
}

pub fn run_sweep(loaded: &LoadedModel, grid: Option<&[f64]>, window: Option<f64>) -> Result<EpsSweepResult> {
    let default_grid = collapse::default_eps_grid();
    let grid = grid.unwrap_or(&default_grid);
    match &loaded.blocks {
        Some(b) => collapse::sweep_blocks(b, grid, window.unwrap_or_else(|| b.reliable_window())),
        None => collapse::sweep(&loaded.model, grid, window.unwrap_or_else(|| loaded.model.default_window())),
    }
}

pub fn cmd_sweep(model: &Path, grid: Option<&[f64]>, window: Option<f64>, out: &Path) -> Result<EpsSweepResult> {
    let loaded = load_model(model)?;
    let s = run_sweep(&loaded, grid, window)?;
    write_atomic(out, sweep_csv(&s).as_bytes())?;
    write_atomic(&summary_path(out), summary_csv(&s).as_bytes())?;
    Ok(s)
}

/// Table `eps,index,sector,eigenvalue` of D_ε.
pub fn cmd_spectrum(model: &Path, eps: f64) -> Result<String> {
    let loaded = load_model(model)?;
    let d = collapse::rescale(&loaded.model, eps)?;
    let mut out = String::from("eps,index,eigenvalue\n");
    for (i, v) in hermitian_spectrum(&d).iter().enumerate() {
        writeln!(out, "{},{},{}", fmt_num(eps), i, fmt_num(*v)).unwrap();
    }
    Ok(out)
}

pub fn build_summary(loaded: &LoadedModel) -> Result<Value> {
    let m = &loaded.model;
    let kp = collapse::model_kernel(m)?;
    Ok(json!({
        "model": m.total().label(),
        "builder": loaded.spec.builder.name(),
        "model_hash": loaded.hash,
        "seed": loaded.spec.seed,
        "tool_version": TOOL_VERSION,
        "hilbert_dim": m.hilbert_dim(),
        "algebra_dim": m.total().basis_len(),
        "base_dim": m.base_coeffs().len(),
        "kernel_rank": kp.rank(),
        "vertical_gap": m.vertical_gap(),
        "reliable_window": json_num(m.reliable_window()),
        "mvt_constant": m.mvt_constant(),
        "comparison_constant": m.comparison_constant(),
        "kernel_tol": m.kernel_tol(),
    }))
}

pub fn to_json(v: &impl Serialize) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("report serializes");
    s.push('\n');
    s
}

pub fn run_audit(loaded: &LoadedModel, samples: usize, seed: u64) -> Result<AuditReport> {
    estimates::hypothesis_audit(&loaded.model, &AuditConfig { samples, seed, ..Default::default() })
}

fn parse_side(model: &SpectralTripleModel, tok: &str) -> Result<StateFunctional> {
    let tok = tok.trim();
    if let Some(path) = tok.strip_prefix('@') {
        let text = fs::read_to_string(path)?;
        let rows: Vec<Vec<Entry>> = serde_json::from_str(&text).map_err(|e| Error::Parse(format!("{path}: {e}")))?;
        let n = rows.len();
        if rows.iter().any(|r| r.len() != n) {
            return Err(Error::Parse(format!("{path}: density matrix is not square")));
        }
        let m = CMatrix::from_fn(n, n, |i, j| rows[i][j].value());
        return StateFunctional::new(m, Some(format!("file:{path}")));
    }
    let i: usize = tok.parse().map_err(|_| Error::Parse(format!("state `{tok}`")))?;
    if model.graph().is_some() {
        StateFunctional::point(model, i)
    } else if i < model.hilbert_dim() {
        StateFunctional::basis_vector(model.hilbert_dim(), i)
    } else {
        Err(Error::Precondition(format!("state index {i} out of range")))
    }
}

#[derive(Deserialize)]
#[serde(untagged)]
enum Entry {
    Real(f64),
    Complex([f64; 2]),
}

impl Entry {
    fn value(&self) -> crate::matrix::C64 {
        match *self {
            Entry::Real(x) => c(x, 0.0),
            Entry::Complex([re, im]) => c(re, im),
        }
    }
}

/// `i:j,k:l` (indices or `@density.json`), or `haar:N` for N seeded Haar-random pairs.
pub fn parse_states(model: &SpectralTripleModel, spec: &str, seed: u64) -> Result<Vec<(StateFunctional, StateFunctional)>> {
    if let Some(n) = spec.strip_prefix("haar:") {
        let n: usize = n.trim().parse().map_err(|_| Error::Parse(format!("states `{spec}`")))?;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let dim = model.hilbert_dim();
        return Ok((0..n)
            .map(|i| {
                let a = StateFunctional::haar_pure(dim, &mut rng).labelled(format!("haar:{}", 2 * i));
                let b = StateFunctional::haar_pure(dim, &mut rng).labelled(format!("haar:{}", 2 * i + 1));
                (a, b)
            })
            .collect());
    }
    spec.split(',')
        .map(|pair| {
            let (a, b) = pair.split_once(':').ok_or_else(|| Error::Parse(format!("state pair `{pair}`")))?;
            Ok((parse_side(model, a)?, parse_side(model, b)?))
        })
        .collect()
}

#[derive(Debug, Clone, Serialize)]
pub struct DistanceRow {
    pub phi: String,
    pub psi: String,
    pub value: f64,
    pub method: String,
    /// Oracle grid accuracy; zero for exact values.
    pub accuracy: f64,
    pub converged: bool,
}

pub fn run_distances(loaded: &LoadedModel, states: &str, oracle: bool, seed: u64) -> Result<Vec<DistanceRow>> {
    let model = loaded.model.total();
    let pairs = parse_states(model, states, seed)?;
    let solver = SolverParams { seed, ..Default::default() };
    let label = |s: &StateFunctional| s.label.clone().unwrap_or_else(|| "state".into());
    pairs
        .iter()
        .map(|(a, b)| {
            if oracle {
                let r = distance_bruteforce_oracle(model, a, b, ORACLE_RESOLUTION)?;
                Ok(DistanceRow {
                    phi: label(a),
                    psi: label(b),
                    value: r.value,
                    method: qmetric::Method::Oracle.tag().into(),
                    accuracy: r.accuracy,
                    converged: true,
                })
            } else {
                let r = qmetric::connes_distance(model, a, b, &solver)?;
                Ok(DistanceRow {
                    phi: label(a),
                    psi: label(b),
                    value: r.value,
                    method: r.method.tag().into(),
                    accuracy: 0.0,
                    converged: r.converged,
                })
            }
        })
        .collect()
}

pub fn distance_csv(rows: &[DistanceRow]) -> String {
    let mut out = String::from("phi,psi,value,method,accuracy,converged\n");
    for r in rows {
        writeln!(out, "{},{},{},{},{},{}", r.phi, r.psi, fmt_num(r.value), r.method, fmt_num(r.accuracy), r.converged)
            .unwrap();
    }
    out
}

/// Tolerances in force for every reported number.
pub fn tolerance_context(m: &DecomposedTripleModel) -> Value {
    json!({
        "kernel_tol": m.kernel_tol(),
        "commute_tol": collapse::COMMUTE_TOL,
        "check_slack": estimates::CHECK_SLACK,
        "hausdorff_window": "closed interval [-window, window]",
    })
}

/// Metadata, sweep curves, track convergence, audit verdicts and optional distances.
pub fn report_bundle(
    loaded: &LoadedModel,
    sweep: &EpsSweepResult,
    audit: &AuditReport,
    distances: Option<&[DistanceRow]>,
    seed: u64,
) -> Value {
    let tracks = collapse::track_convergence_report(sweep, &sweep.base_spectrum);
    let curves: Vec<Value> = sweep
        .eps_grid
        .iter()
        .zip(&sweep.hausdorff_curve)
        .zip(&sweep.bound_curve)
        .map(|((e, h), b)| json!({ "eps": e, "hausdorff": json_num(*h), "bound": json_num(*b) }))
        .collect();
    json!({
        "metadata": {
            "model": loaded.model.total().label(),
            "builder": loaded.spec.builder.name(),
            "model_hash": loaded.hash,
            "seed": seed,
            "tool_version": TOOL_VERSION,
        },
        "tolerances": tolerance_context(&loaded.model),
        "sweep": {
            "window": sweep.window,
            "heuristic_tracking": sweep.heuristic,
            "base_spectrum": sweep.base_spectrum,
            "curves": curves,
            "tracks": tracks,
        },
        "audit": audit,
        "distances": distances,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    const TORUS: &str = r#"{"schema_version": 1, "seed": 7, "builder": "torus",
        "params": {"g_base": 0, "g_fiber": 1, "cutoff": 1}}"#;

    #[test]
    fn minimal_torus_spec() {
        let spec = ModelSpecFile::parse(TORUS).unwrap();
        let (m, _) = build_model(&spec).unwrap();
        assert_eq!(m.hilbert_dim(), 6);
        let again = ModelSpecFile::parse(&spec.emit()).unwrap();
        assert_eq!(again, spec);
        assert_eq!(again.hash(), spec.hash());
    }

    #[test]
    fn parse_and_precondition_errors() {
        let unknown = TORUS.replace("\"torus\"", "\"sphere\"");
        let e = ModelSpecFile::parse(&unknown).unwrap_err();
        assert_eq!(exit_code(&e), EXIT_PARSE);
        let version = TORUS.replace("\"schema_version\": 1", "\"schema_version\": 9");
        assert_eq!(exit_code(&ModelSpecFile::parse(&version).unwrap_err()), EXIT_PARSE);
        let negative = TORUS.replace("\"cutoff\": 1", "\"cutoff\": -1");
        let spec = ModelSpecFile::parse(&negative).unwrap();
        let e = build_model(&spec).err().unwrap();
        assert_eq!(exit_code(&e), EXIT_PRECONDITION);
        assert!(e.to_string().contains("cutoff"));
    }

    #[test]
    fn eps_grid_forms() {
        assert_eq!(parse_eps_grid("1").unwrap(), vec![1.0]);
        assert_eq!(parse_eps_grid("1, 0.5,0.25").unwrap(), vec![1.0, 0.5, 0.25]);
        assert_eq!(parse_eps_grid("geometric:1:0.5:13").unwrap(), collapse::default_eps_grid());
        assert!(parse_eps_grid("geometric:1:0.5").is_err());
        assert!(parse_eps_grid("x").is_err());
    }

    #[test]
    fn sentinel_cells() {
        assert_eq!(fmt_num(f64::INFINITY), "inf");
        assert_eq!(json_num(f64::INFINITY), Value::String("inf".into()));
        assert_eq!(fmt_num(0.25), "0.25");
    }

    #[test]
    fn every_builder_round_trips() {
        let specs = [
            r#"{"schema_version":1,"seed":1,"builder":"circle_bundle","params":{"mu":[1.0,-2.0],"ell":1.0,"k_min":-2,"k_max":2}}"#,
            r#"{"schema_version":1,"seed":1,"builder":"product","params":{"even":{"kind":"two_point","kappa":1.0},"other":{"kind":"graph","points":2,"edges":[[0,1,0.5]],"kernel_points":[0]}}}"#,
            r#"{"schema_version":1,"seed":1,"builder":"crossed_product","params":{"base":{"kind":"path","points":3},"d":1,"cutoff":2}}"#,
            r#"{"schema_version":1,"seed":1,"builder":"point_collapse","params":{"model":{"kind":"path","points":2,"kernel_points":[0,1]},"state":0}}"#,
        ];
        for s in specs {
            let spec = ModelSpecFile::parse(s).unwrap();
            assert_eq!(ModelSpecFile::parse(&spec.emit()).unwrap(), spec);
            build_model(&spec).unwrap();
        }
    }
}
