//! Model documents and trajectory tables.
//!
//! A model is a JSON object:
//!
//! ```json
//! {
//!   "dim": 2,
//!   "hamiltonian": [[[0.5, 0], [0, 0]], [[0, 0], [-0.5, 0]]],
//!   "jumps": [{"rate": 1.5, "operator": [[[0, 0], [0, 0]], [[1, 0], [0, 0]]]}],
//!   "initial_state": [[[1, 0], [0, 0]], [[0, 0], [0, 0]]],
//!   "times": {"start": 0, "stop": 10, "count": 101, "spacing": "linear"},
//!   "options": {"tol_zero": 1e-9, "outputs": {"expectations": [{"name": "sz", "operator": ...}]}}
//! }
//! ```
//!
//! Complex numbers are `[re, im]` pairs and matrices are row-major nested
//! arrays. `times` may also be an explicit, strictly increasing list.

use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

use crate::error::{Error, Result};
use crate::generators::{lindblad_liouvillian, Jump, LindbladModel, Liouvillian};
use crate::qm::{expectation, purity, CMatrix, DensityMatrix, Operator, C64, HERMITIAN_TOL};
use crate::spectral::{AnalyzeOptions, Trajectory};

type RawMatrix = Vec<Vec<[f64; 2]>>;

#[derive(Debug, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
struct RawModel {
    dim: usize,
    hamiltonian: RawMatrix,
    #[serde(default)]
    jumps: Vec<RawJump>,
    initial_state: RawMatrix,
    times: RawTimes,
    #[serde(default)]
    options: RawOptions,
}

#[derive(Debug, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
struct RawJump {
    rate: f64,
    operator: RawMatrix,
}

#[derive(Debug, Deserialize, Serialize)]
#[serde(untagged)]
enum RawTimes {
    List(Vec<f64>),
    Grid(RawGrid),
}

#[derive(Debug, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
struct RawGrid {
    start: f64,
    stop: f64,
    count: usize,
    #[serde(default)]
    spacing: Spacing,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Deserialize, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Spacing {
    #[default]
    Linear,
    Log,
}

#[derive(Debug, Default, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
struct RawOptions {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    tol_cluster: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    tol_diag: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    tol_zero: Option<f64>,
    #[serde(default)]
    outputs: RawOutputs,
}

#[derive(Debug, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
struct RawOutputs {
    #[serde(default = "yes")]
    populations: bool,
    #[serde(default = "yes")]
    coherences: bool,
    #[serde(default = "yes")]
    purity: bool,
    #[serde(default)]
    expectations: Vec<RawObservable>,
}

fn yes() -> bool {
    true
}

impl Default for RawOutputs {
    fn default() -> Self {
        Self {
            populations: true,
            coherences: true,
            purity: true,
            expectations: Vec::new(),
        }
    }
}

#[derive(Debug, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
struct RawObservable {
    name: String,
    operator: RawMatrix,
}

/// A named observable for trajectory output.
#[derive(Clone, Debug, PartialEq)]
pub struct Observable {
    pub name: String,
    pub op: Operator,
}

/// Which columns a trajectory table carries besides `t` and `trace`.
#[derive(Clone, Debug, PartialEq)]
pub struct OutputSelection {
    pub populations: bool,
    pub coherences: bool,
    pub purity: bool,
    pub expectations: Vec<Observable>,
}

impl Default for OutputSelection {
    fn default() -> Self {
        Self {
            populations: true,
            coherences: true,
            purity: true,
            expectations: Vec::new(),
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct ModelOptions {
    pub tol_cluster: Option<f64>,
    pub tol_diag: Option<f64>,
    pub tol_zero: Option<f64>,
    pub outputs: OutputSelection,
}

/// A validated model document.
#[derive(Clone, Debug)]
pub struct ModelSpec {
    pub dim: usize,
    pub hamiltonian: Operator,
    pub jumps: Vec<Jump>,
    pub initial_state: DensityMatrix,
    pub times: Vec<f64>,
    pub options: ModelOptions,
}

impl ModelSpec {
    pub fn lindblad_model(&self) -> Result<LindbladModel> {
        LindbladModel::new(self.hamiltonian.clone(), self.jumps.clone())
    }

    pub fn liouvillian(&self) -> Result<Liouvillian> {
        lindblad_liouvillian(&self.lindblad_model()?)
    }

    pub fn analyze_options(&self) -> AnalyzeOptions {
        AnalyzeOptions {
            tol_cluster: self.options.tol_cluster,
            tol_diag: self.options.tol_diag,
            tol_zero: self.options.tol_zero,
            ..AnalyzeOptions::default()
        }
    }

    /// Serializes the model with an explicit time list.
    pub fn to_json(&self) -> String {
        let raw = RawModel {
            dim: self.dim,
            hamiltonian: raw_matrix(self.hamiltonian.matrix()),
            jumps: self
                .jumps
                .iter()
                .map(|j| RawJump {
                    rate: j.rate,
                    operator: raw_matrix(j.op.matrix()),
                })
                .collect(),
            initial_state: raw_matrix(self.initial_state.matrix()),
            times: RawTimes::List(self.times.clone()),
            options: RawOptions {
                tol_cluster: self.options.tol_cluster,
                tol_diag: self.options.tol_diag,
                tol_zero: self.options.tol_zero,
                outputs: RawOutputs {
                    populations: self.options.outputs.populations,
                    coherences: self.options.outputs.coherences,
                    purity: self.options.outputs.purity,
                    expectations: self
                        .options
                        .outputs
                        .expectations
                        .iter()
                        .map(|o| RawObservable {
                            name: o.name.clone(),
                            operator: raw_matrix(o.op.matrix()),
                        })
                        .collect(),
                },
            },
        };
        let mut s = serde_json::to_string_pretty(&raw).expect("plain data serializes");
        s.push('\n');
        s
    }
}

fn raw_matrix(m: &CMatrix) -> RawMatrix {
    (0..m.nrows())
        .map(|i| (0..m.ncols()).map(|j| [m[(i, j)].re, m[(i, j)].im]).collect())
        .collect()
}

fn schema(path: impl Into<String>, reason: impl Into<String>) -> Error {
    Error::Schema {
        path: path.into(),
        reason: reason.into(),
    }
}

fn matrix_at(raw: &RawMatrix, dim: usize, path: &str) -> Result<Operator> {
    let rows = raw.len();
    let cols = raw.first().map_or(0, |r| r.len());
    if rows != dim || raw.iter().any(|r| r.len() != dim) {
        let found = if raw.iter().all(|r| r.len() == cols) {
            format!("{rows}x{cols}")
        } else {
            format!("{rows} rows of unequal length")
        };
        return Err(Error::ShapeMismatch {
            path: path.into(),
            expected: format!("{dim}x{dim}"),
            found,
        });
    }
    let entries: Vec<C64> = raw.iter().flatten().map(|&[re, im]| C64::new(re, im)).collect();
    if entries.iter().any(|z| !z.is_finite()) {
        return Err(schema(path, "entries must be finite"));
    }
    Operator::from_rows(dim, &entries)
}

/// Expands a time specification into an explicit grid.
pub fn time_grid(start: f64, stop: f64, count: usize, spacing: Spacing) -> Result<Vec<f64>> {
    if count == 0 {
        return Err(schema("times.count", "must be at least 1"));
    }
    if !(start.is_finite() && stop.is_finite()) {
        return Err(schema("times", "start and stop must be finite"));
    }
    if count > 1 && stop <= start {
        return Err(schema("times.stop", "must exceed start"));
    }
    if count == 1 {
        return Ok(vec![start]);
    }
    let last = (count - 1) as f64;
    let grid: Vec<f64> = match spacing {
        Spacing::Linear => (0..count)
            .map(|k| start + (stop - start) * k as f64 / last)
            .collect(),
        Spacing::Log => {
            if start <= 0.0 {
                return Err(schema("times.start", "log spacing needs start > 0"));
            }
            let (a, b) = (start.ln(), stop.ln());
            (0..count)
                .map(|k| (a + (b - a) * k as f64 / last).exp())
                .collect()
        }
    };
    let mut grid = grid;
    grid[0] = start;
    grid[count - 1] = stop;
    Ok(grid)
}

fn check_times(times: &[f64]) -> Result<()> {
    if times.is_empty() {
        return Err(schema("times", "at least one time is required"));
    }
    for (i, t) in times.iter().enumerate() {
        if !t.is_finite() {
            return Err(schema(format!("times[{i}]"), "must be finite"));
        }
        if i > 0 && *t <= times[i - 1] {
            return Err(schema(format!("times[{i}]"), "times must be strictly increasing"));
        }
    }
    Ok(())
}

fn check_tol(value: Option<f64>, path: &str) -> Result<()> {
    match value {
        Some(v) if !(v > 0.0 && v.is_finite()) => Err(schema(path, "tolerance must be positive")),
        _ => Ok(()),
    }
}

/// Parses and validates a model document.
pub fn parse_model(text: &str) -> Result<ModelSpec> {
    let de = &mut serde_json::Deserializer::from_str(text);
    let raw: RawModel = serde_path_to_error::deserialize(de).map_err(|e| {
        let path = e.path().to_string();
        schema(
            if path == "." { String::new() } else { path },
            e.into_inner().to_string(),
        )
    })?;

    let dim = raw.dim;
    if dim == 0 {
        return Err(schema("dim", "must be at least 1"));
    }
    let hamiltonian = matrix_at(&raw.hamiltonian, dim, "hamiltonian")?;
    let defect = hamiltonian.hermitian_defect();
    if defect > HERMITIAN_TOL {
        return Err(Error::NonHermitianHamiltonian { defect });
    }

    let mut jumps = Vec::with_capacity(raw.jumps.len());
    for (i, j) in raw.jumps.iter().enumerate() {
        if !(j.rate >= 0.0 && j.rate.is_finite()) {
            return Err(schema(
                format!("jumps[{i}].rate"),
                format!("rate must be finite and >= 0, got {}", j.rate),
            ));
        }
        let op = matrix_at(&j.operator, dim, &format!("jumps[{i}].operator"))?;
        jumps.push(Jump::new(j.rate, op));
    }

    let rho = matrix_at(&raw.initial_state, dim, "initial_state")?;
    let initial_state = DensityMatrix::new(rho).map_err(|e| schema("initial_state", e.to_string()))?;

    let times = match raw.times {
        RawTimes::List(list) => list,
        RawTimes::Grid(g) => time_grid(g.start, g.stop, g.count, g.spacing)?,
    };
    check_times(&times)?;

    let o = raw.options;
    check_tol(o.tol_cluster, "options.tol_cluster")?;
    check_tol(o.tol_diag, "options.tol_diag")?;
    check_tol(o.tol_zero, "options.tol_zero")?;
    let mut expectations = Vec::with_capacity(o.outputs.expectations.len());
    for (i, obs) in o.outputs.expectations.iter().enumerate() {
        let path = format!("options.outputs.expectations[{i}]");
        if obs.name.is_empty() || obs.name.contains([',', '"', '\n']) {
            return Err(schema(
                format!("{path}.name"),
                "name must be non-empty plain text",
            ));
        }
        if expectations.iter().any(|e: &Observable| e.name == obs.name) {
            return Err(schema(
                format!("{path}.name"),
                format!("duplicate name {:?}", obs.name),
            ));
        }
        let op = matrix_at(&obs.operator, dim, &format!("{path}.operator"))?;
        expectations.push(Observable {
            name: obs.name.clone(),
            op,
        });
    }

    Ok(ModelSpec {
        dim,
        hamiltonian,
        jumps,
        initial_state,
        times,
        options: ModelOptions {
            tol_cluster: o.tol_cluster,
            tol_diag: o.tol_diag,
            tol_zero: o.tol_zero,
            outputs: OutputSelection {
                populations: o.outputs.populations,
                coherences: o.outputs.coherences,
                purity: o.outputs.purity,
                expectations,
            },
        },
    })
}

pub fn read_model(path: &Path) -> Result<ModelSpec> {
    parse_model(&std::fs::read_to_string(path)?)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
}

/// A trajectory flattened into named numeric columns.
#[derive(Clone, Debug, PartialEq)]
pub struct TrajectoryRecord {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl TrajectoryRecord {
    /// Columns: `t`, then `rho_i_j_re` / `rho_i_j_im` in row-major order for
    /// the selected entries, `trace`, `purity` and `<name>_re` / `<name>_im`.
    pub fn from_trajectory(tr: &Trajectory, outputs: &OutputSelection) -> Result<Self> {
        let d = tr.states.first().map_or(0, |s| s.dim());
        let entries: Vec<(usize, usize)> = (0..d)
            .flat_map(|i| (0..d).map(move |j| (i, j)))
            .filter(|&(i, j)| {
                if i == j {
                    outputs.populations
                } else {
                    outputs.coherences
                }
            })
            .collect();

        let mut columns = vec!["t".to_string()];
        for &(i, j) in &entries {
            columns.push(format!("rho_{i}_{j}_re"));
            columns.push(format!("rho_{i}_{j}_im"));
        }
        columns.push("trace".into());
        if outputs.purity {
            columns.push("purity".into());
        }
        for obs in &outputs.expectations {
            columns.push(format!("{}_re", obs.name));
            columns.push(format!("{}_im", obs.name));
        }

        let mut rows = Vec::with_capacity(tr.len());
        for (t, state) in tr.times.iter().zip(&tr.states) {
            let m = state.matrix();
            let mut row = vec![*t];
            for &(i, j) in &entries {
                row.push(m[(i, j)].re);
                row.push(m[(i, j)].im);
            }
            row.push(m.trace().re);
            if outputs.purity {
                row.push(purity(state));
            }
            for obs in &outputs.expectations {
                let v = expectation(state, &obs.op)?;
                row.push(v.re);
                row.push(v.im);
            }
            rows.push(row);
        }
        Ok(Self { columns, rows })
    }

    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let k = self.columns.iter().position(|c| c == name)?;
        Some(self.rows.iter().map(|r| r[k]).collect())
    }

    fn check_finite(&self) -> Result<()> {
        if self.rows.iter().flatten().any(|x| !x.is_finite()) {
            return Err(Error::NonFinite);
        }
        Ok(())
    }

    /// Header line then one line per row; numbers in shortest round-trip form.
    pub fn to_csv(&self) -> Result<String> {
        self.check_finite()?;
        let mut w = csv::Writer::from_writer(Vec::new());
        let io = |e: csv::Error| Error::Io(std::io::Error::other(e));
        w.write_record(&self.columns).map_err(io)?;
        for row in &self.rows {
            w.write_record(row.iter().map(|x| format!("{x:?}"))).map_err(io)?;
        }
        let bytes = w
            .into_inner()
            .map_err(|e| Error::Io(std::io::Error::other(e.to_string())))?;
        Ok(String::from_utf8(bytes).expect("ascii output"))
    }

    /// An array of row objects with keys in column order.
    pub fn to_json(&self) -> Result<String> {
        self.check_finite()?;
        let rows: Vec<Value> = self
            .rows
            .iter()
            .map(|row| {
                let obj: Map<String, Value> = self
                    .columns
                    .iter()
                    .zip(row)
                    .map(|(c, &x)| (c.clone(), Value::from(x)))
                    .collect();
                Value::Object(obj)
            })
            .collect();
        let mut s = serde_json::to_string_pretty(&rows).expect("finite numbers serialize");
        s.push('\n');
        Ok(s)
    }

    pub fn to_format(&self, format: Format) -> Result<String> {
        match format {
            Format::Csv => self.to_csv(),
            Format::Json => self.to_json(),
        }
    }

    pub fn from_csv(text: &str) -> Result<Self> {
        let mut r = csv::Reader::from_reader(text.as_bytes());
        let columns: Vec<String> = r
            .headers()
            .map_err(|e| schema("header", e.to_string()))?
            .iter()
            .map(str::to_string)
            .collect();
        let mut rows = Vec::new();
        for (i, rec) in r.records().enumerate() {
            let rec = rec.map_err(|e| schema(format!("row {i}"), e.to_string()))?;
            let row = rec
                .iter()
                .enumerate()
                .map(|(j, f)| {
                    f.parse::<f64>()
                        .map_err(|e| schema(format!("row {i}, column {j}"), e.to_string()))
                })
                .collect::<Result<Vec<_>>>()?;
            rows.push(row);
        }
        Ok(Self { columns, rows })
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let value: Vec<Map<String, Value>> =
            serde_json::from_str(text).map_err(|e| schema("", e.to_string()))?;
        let columns: Vec<String> = value
            .first()
            .map(|m| m.keys().cloned().collect())
            .unwrap_or_default();
        let mut rows = Vec::with_capacity(value.len());
        for (i, obj) in value.iter().enumerate() {
            let keys: Vec<&String> = obj.keys().collect();
            if keys.len() != columns.len() || keys.iter().zip(&columns).any(|(a, b)| *a != b) {
                return Err(schema(format!("[{i}]"), "keys differ from the first row"));
            }
            let row = obj
                .iter()
                .map(|(k, v)| {
                    v.as_f64()
                        .ok_or_else(|| schema(format!("[{i}].{k}"), "expected a number"))
                })
                .collect::<Result<Vec<_>>>()?;
            rows.push(row);
        }
        Ok(Self { columns, rows })
    }
}

/// Writes `contents` next to `path` and renames it into place.
pub fn write_atomic(path: &Path, contents: &[u8]) -> Result<()> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(contents)?;
    tmp.as_file().sync_all()?;
    tmp.persist(path).map_err(|e| Error::Io(e.error))?;
    Ok(())
}
