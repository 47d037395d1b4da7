//! Measurement records, Bell-value estimates, violation reports and scaling tables.

use std::collections::HashMap;
use std::fmt;
use std::io::Read;
use std::ops::RangeInclusive;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::bell::{graph_bell_operator, rotated_graph_bell_operator, SignedPauliSum};
use crate::error::{Error, Result};
use crate::graph::{Graph, Preset};
use crate::lhv::{ghz_formula_bound, ghz_graph_bound, lhv_max, mk_bound, product_bound, LhvBound};
use crate::noise::{noisy_ghz_summary, NoiseSpec};
use crate::pauli::{PauliString, Phase};
use crate::stabilizer::{
    apply_inverse_local_unitaries, conjugate_by_inverse, graph_state_vector, parse_local_words,
    stabilizer_group, LocalWord,
};
use crate::state::StateVector;

/// Local corrections relating the experimental box-cluster basis to `|BC₄⟩`.
pub const BC4_HAT_CORRECTIONS: &str = "HXZ, HX, HX, HXZ";

/// A graph state, optionally expressed in a locally rotated basis `U†|G⟩`.
#[derive(Clone, Debug)]
pub struct Target {
    name: String,
    graph: Graph,
    preset: Option<Preset>,
    corrections: Option<Vec<LocalWord>>,
}

impl Target {
    pub fn from_preset(p: Preset) -> Result<Self> {
        Ok(Target {
            name: preset_name(p),
            graph: p.graph()?,
            preset: Some(p),
            corrections: None,
        })
    }

    pub fn from_graph(name: impl Into<String>, graph: Graph) -> Self {
        Target {
            name: name.into(),
            graph,
            preset: None,
            corrections: None,
        }
    }

    /// Box cluster in the experimental basis.
    pub fn bc4_hat() -> Result<Self> {
        Ok(Target {
            name: "bc4-hat".into(),
            graph: Preset::Box4.graph()?,
            preset: Some(Preset::Box4),
            corrections: Some(parse_local_words(BC4_HAT_CORRECTIONS)?),
        })
    }

    /// Preset name, `bc4-hat`, or a path to a graph JSON file.
    pub fn resolve(spec: &str) -> Result<Self> {
        let lower = spec.to_ascii_lowercase();
        if lower == "bc4-hat" || lower == "bc4hat" {
            return Self::bc4_hat();
        }
        match spec.parse::<Preset>() {
            Ok(p) => Self::from_preset(p),
            Err(e) => {
                let path = Path::new(spec);
                if path.exists() {
                    Ok(Self::from_graph(spec, Graph::load(path)?))
                } else {
                    Err(e)
                }
            }
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn graph(&self) -> &Graph {
        &self.graph
    }

    pub fn n(&self) -> usize {
        self.graph.n()
    }

    pub fn preset(&self) -> Option<Preset> {
        self.preset
    }

    pub fn corrections(&self) -> Option<&[LocalWord]> {
        self.corrections.as_deref()
    }

    /// Signed stabilizer words in group order (generator-subset index).
    pub fn stabilizer_words(&self) -> Result<Vec<PauliString>> {
        let group = stabilizer_group(&self.graph)?;
        match &self.corrections {
            None => Ok(group.into_iter().map(|e| e.word).collect()),
            Some(ops) => group
                .into_iter()
                .map(|e| conjugate_by_inverse(&e.word, ops))
                .collect(),
        }
    }

    pub fn bell_operator(&self) -> Result<SignedPauliSum> {
        match &self.corrections {
            None => graph_bell_operator(&self.graph),
            Some(ops) => rotated_graph_bell_operator(&self.graph, ops),
        }
    }

    pub fn state_vector(&self) -> Result<StateVector> {
        let g = graph_state_vector(&self.graph)?;
        match &self.corrections {
            None => Ok(g),
            Some(ops) => apply_inverse_local_unitaries(&g, ops),
        }
    }

    /// GHZ-family size, when the target is a complete or star graph.
    fn ghz_size(&self) -> Option<usize> {
        match self.preset {
            Some(Preset::GhzComplete(n)) | Some(Preset::GhzStar(n)) if self.corrections.is_none() => Some(n),
            _ => None,
        }
    }

    /// Edge-connected factorization `[G₁, GHZ_{k+1}]` for the EC family.
    fn product_parts(&self) -> Option<usize> {
        match self.preset {
            Some(Preset::Ec(k)) if self.corrections.is_none() => Some(k),
            Some(Preset::Ec3Lc) => Some(3),
            _ => None,
        }
    }
}

fn preset_name(p: Preset) -> String {
    match p {
        Preset::Linear(4) => "lc4".into(),
        Preset::Linear(n) => format!("linear{n}"),
        Preset::Box4 => "bc4".into(),
        Preset::Ec(k) => format!("ec{k}"),
        Preset::GhzComplete(n) => format!("ghz{n}"),
        Preset::GhzStar(n) => format!("star{n}"),
        Preset::Ec3Lc => "ec3-lc".into(),
        Preset::SingleVertex => "single".into(),
    }
}

/// How to obtain `D` for a target.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BoundMethod {
    /// Closed GHZ reduction for GHZ targets, exhaustive search otherwise,
    /// product bound when the search does not fit.
    Auto,
    Brute,
    Ghz,
    Formula,
    Product,
}

impl FromStr for BoundMethod {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "auto" => BoundMethod::Auto,
            "brute" => BoundMethod::Brute,
            "ghz" => BoundMethod::Ghz,
            "formula" => BoundMethod::Formula,
            "product" => BoundMethod::Product,
            _ => return Err(Error::Invalid(format!("unknown bound method `{s}`"))),
        })
    }
}

pub fn select_bound(target: &Target, method: BoundMethod, restrict_z: bool) -> Result<LhvBound> {
    let not_ghz = || Error::Invalid(format!("{} is not a GHZ-family graph", target.name()));
    match method {
        BoundMethod::Brute => lhv_max(&target.bell_operator()?, restrict_z),
        BoundMethod::Ghz => ghz_graph_bound(target.ghz_size().ok_or_else(not_ghz)?),
        BoundMethod::Formula => ghz_formula_bound(target.ghz_size().ok_or_else(not_ghz)?),
        BoundMethod::Product => {
            let k = target.product_parts().ok_or_else(|| {
                Error::Invalid(format!("no product factorization known for {}", target.name()))
            })?;
            let single = lhv_max(&graph_bell_operator(&Graph::empty(1)?)?, false)?;
            product_bound(&[single, ghz_graph_bound(k + 1)?])
        }
        BoundMethod::Auto => {
            if target.ghz_size().is_some() {
                return select_bound(target, BoundMethod::Ghz, restrict_z);
            }
            match select_bound(target, BoundMethod::Brute, restrict_z) {
                Err(Error::Capacity(_)) if target.product_parts().is_some() => {
                    select_bound(target, BoundMethod::Product, restrict_z)
                }
                other => other,
            }
        }
    }
}

/// One measured stabilizer observable.
#[derive(Clone, Debug, PartialEq)]
pub struct MeasurementRecord {
    /// Observable including its sign.
    pub word: PauliString,
    pub value: f64,
    pub stderr: f64,
    pub shots: Option<u64>,
}

#[derive(Deserialize)]
struct RawRecord {
    pauli: String,
    sign: serde_json::Value,
    value: f64,
    stderr: f64,
    #[serde(default)]
    shots: Option<u64>,
}

fn parse_sign(text: &str) -> std::result::Result<Phase, String> {
    match text.trim() {
        "+1" | "1" | "+" => Ok(Phase::ONE),
        "-1" | "-" => Ok(Phase::MINUS_ONE),
        other => Err(format!("sign must be +1 or -1, got `{other}`")),
    }
}

fn build_record(
    n: usize,
    pauli: &str,
    sign: &str,
    value: f64,
    stderr: f64,
    shots: Option<u64>,
) -> std::result::Result<MeasurementRecord, String> {
    let bare = pauli.trim();
    if !bare.chars().all(|c| "IXYZ".contains(c)) {
        return Err(format!("pauli `{bare}` must use only the letters IXYZ"));
    }
    let word = PauliString::parse(bare, n).map_err(|e| e.to_string())?;
    let word = word.with_phase(parse_sign(sign)?);
    if !value.is_finite() || value.abs() > 1.0 {
        return Err(format!("value {value} outside [-1, 1]"));
    }
    if !stderr.is_finite() || stderr < 0.0 {
        return Err(format!("stderr {stderr} must be non-negative"));
    }
    if shots == Some(0) {
        return Err("shots must be positive".into());
    }
    Ok(MeasurementRecord {
        word,
        value,
        stderr,
        shots,
    })
}

/// Reads records from CSV (`pauli,sign,value,stderr,shots`) or, for a
/// `.json` path, from an array of objects with the same keys.
pub fn load_measurements(path: &Path, n: usize) -> Result<Vec<MeasurementRecord>> {
    let mut text = String::new();
    std::fs::File::open(path)
        .and_then(|mut f| f.read_to_string(&mut text))
        .map_err(|source| Error::Io {
            path: path.to_path_buf(),
            source,
        })?;
    let is_json = path.extension().is_some_and(|e| e.eq_ignore_ascii_case("json"));
    if is_json {
        parse_measurements_json(&text, n, path)
    } else {
        parse_measurements_csv(&text, n, path)
    }
}

fn record_error(path: &Path, line: u64, message: impl Into<String>) -> Error {
    Error::Record {
        path: path.to_path_buf(),
        line,
        message: message.into(),
    }
}

pub fn parse_measurements_csv(text: &str, n: usize, path: &Path) -> Result<Vec<MeasurementRecord>> {
    let mut reader = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let headers = reader
        .headers()
        .map_err(|e| record_error(path, 1, e.to_string()))?
        .clone();
    let column = |name: &str| headers.iter().position(|h| h == name);
    let (pauli, sign, value, stderr) = match (column("pauli"), column("sign"), column("value"), column("stderr")) {
        (Some(a), Some(b), Some(c), Some(d)) => (a, b, c, d),
        _ => {
            return Err(record_error(
                path,
                1,
                "header must be pauli,sign,value,stderr,shots",
            ))
        }
    };
    let shots = column("shots");
    let mut out = Vec::new();
    for row in reader.records() {
        let row = row.map_err(|e| {
            let line = e.position().map(|p| p.line()).unwrap_or(0);
            record_error(path, line, e.to_string())
        })?;
        let line = row.position().map(|p| p.line()).unwrap_or(0);
        let field = |i: usize| row.get(i).unwrap_or("");
        let number = |i: usize, what: &str| -> Result<f64> {
            field(i)
                .parse::<f64>()
                .map_err(|_| record_error(path, line, format!("{what} `{}` is not a number", field(i))))
        };
        let shot_count = match shots.map(field).filter(|s| !s.is_empty()) {
            None => None,
            Some(s) => Some(
                s.parse::<u64>()
                    .map_err(|_| record_error(path, line, format!("shots `{s}` is not a positive integer")))?,
            ),
        };
        let rec = build_record(
            n,
            field(pauli),
            field(sign),
            number(value, "value")?,
            number(stderr, "stderr")?,
            shot_count,
        )
        .map_err(|m| record_error(path, line, m))?;
        out.push((line, rec));
    }
    finish_records(out, path)
}

pub fn parse_measurements_json(text: &str, n: usize, path: &Path) -> Result<Vec<MeasurementRecord>> {
    let raw: Vec<RawRecord> =
        serde_json::from_str(text).map_err(|e| record_error(path, e.line() as u64, e.to_string()))?;
    let mut out = Vec::new();
    for (k, r) in raw.into_iter().enumerate() {
        let entry = k as u64 + 1;
        let sign = match &r.sign {
            serde_json::Value::String(s) => s.clone(),
            serde_json::Value::Number(v) => v.to_string(),
            other => return Err(record_error(path, entry, format!("bad sign {other}"))),
        };
        let rec = build_record(n, &r.pauli, &sign, r.value, r.stderr, r.shots)
            .map_err(|m| record_error(path, entry, format!("entry {entry}: {m}")))?;
        out.push((entry, rec));
    }
    finish_records(out, path)
}

fn finish_records(rows: Vec<(u64, MeasurementRecord)>, path: &Path) -> Result<Vec<MeasurementRecord>> {
    if rows.is_empty() {
        return Err(record_error(path, 0, "no records"));
    }
    let mut seen: HashMap<(u64, u64), u64> = HashMap::new();
    for (line, r) in &rows {
        if let Some(first) = seen.insert((r.word.x_bits(), r.word.z_bits()), *line) {
            return Err(record_error(
                path,
                *line,
                format!("duplicate observable {} (first seen at line {first})", r.word.unsigned()),
            ));
        }
    }
    Ok(rows.into_iter().map(|(_, r)| r).collect())
}

/// CSV text with header `pauli,sign,value,stderr,shots`.
pub fn measurements_to_csv(records: &[MeasurementRecord]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let io = |e: csv::Error| Error::Invalid(e.to_string());
    w.write_record(["pauli", "sign", "value", "stderr", "shots"]).map_err(io)?;
    for r in records {
        let letters: String = r.word.letters().map(|l| l.as_char()).collect();
        let sign = match r.word.sign() {
            Some(1) => "+1",
            Some(_) => "-1",
            None => return Err(Error::Contract(format!("{} is not Hermitian", r.word))),
        };
        let shots = r.shots.map(|s| s.to_string()).unwrap_or_default();
        w.write_record([
            letters,
            sign.to_string(),
            r.value.to_string(),
            r.stderr.to_string(),
            shots,
        ])
        .map_err(io)?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Invalid(e.to_string()))?;
    Ok(String::from_utf8(bytes).expect("csv output is UTF-8"))
}

pub fn write_measurements(path: &Path, records: &[MeasurementRecord]) -> Result<()> {
    std::fs::write(path, measurements_to_csv(records)?).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })
}

/// `⟨B_n⟩` estimated from stabilizer measurements.
#[derive(Clone, Debug, PartialEq)]
pub struct BellEstimate {
    pub value: f64,
    pub stderr: f64,
    /// `value − 1` per observable, in group order.
    pub residuals: Vec<(PauliString, f64)>,
}

/// `2^{−n} Σ value_i` with quadrature error `2^{−n} sqrt(Σ stderr_i²)`.
///
/// Every non-identity stabilizer must be present with matching sign; the
/// identity row is optional and taken as `(1, 0)` when absent.
pub fn bell_value_from_records(records: &[MeasurementRecord], target: &Target) -> Result<BellEstimate> {
    let n = target.n();
    if let Some(r) = records.iter().find(|r| r.word.n() != n) {
        return Err(Error::dimension(n, r.word.n()));
    }
    let words = target.stabilizer_words()?;
    let by_letters: HashMap<(u64, u64), &MeasurementRecord> = records
        .iter()
        .map(|r| ((r.word.x_bits(), r.word.z_bits()), r))
        .collect();
    let mut missing = Vec::new();
    let mut mismatched = Vec::new();
    let mut values = Vec::with_capacity(words.len());
    let mut variance = 0.0;
    let mut residuals = Vec::with_capacity(words.len());
    for w in &words {
        match by_letters.get(&(w.x_bits(), w.z_bits())) {
            Some(r) if r.word.phase() != w.phase() => {
                mismatched.push(format!("{} (stabilizer is {w})", r.word))
            }
            Some(r) => {
                values.push(r.value);
                variance += r.stderr * r.stderr;
                residuals.push((*w, r.value - 1.0));
            }
            None if w.is_identity() => {
                values.push(1.0);
                residuals.push((*w, 0.0));
            }
            None => missing.push(w.to_string()),
        }
    }
    if !missing.is_empty() {
        return Err(Error::Invalid(format!("missing observables: {}", missing.join(", "))));
    }
    if !mismatched.is_empty() {
        return Err(Error::Invalid(format!("sign mismatch: {}", mismatched.join(", "))));
    }
    let known: std::collections::HashSet<(u64, u64)> = words.iter().map(|w| (w.x_bits(), w.z_bits())).collect();
    let extra: Vec<String> = records
        .iter()
        .filter(|r| !known.contains(&(r.word.x_bits(), r.word.z_bits())))
        .map(|r| r.word.to_string())
        .collect();
    if !extra.is_empty() {
        return Err(Error::Invalid(format!(
            "not stabilizers of {}: {}",
            target.name(),
            extra.join(", ")
        )));
    }
    let scale = 1.0 / words.len() as f64;
    Ok(BellEstimate {
        value: scale * crate::bell::pairwise_sum(&values),
        stderr: scale * variance.sqrt(),
        residuals,
    })
}

/// Measured value against an LHV bound.
#[derive(Clone, Debug, PartialEq)]
pub struct ViolationReport {
    pub graph: String,
    pub bell_value: f64,
    pub stderr: f64,
    pub bound: LhvBound,
    /// `bell_value / bound.value`.
    pub relative_violation: f64,
    pub relative_stderr: f64,
    /// Set when the bound is only an upper bound, making `R` a lower bound.
    pub relative_is_lower_bound: bool,
    /// `(bell_value − bound)/stderr`; infinite for exact data.
    pub sigmas: f64,
    pub verdict: bool,
}

impl ViolationReport {
    pub fn new(graph: impl Into<String>, bell_value: f64, stderr: f64, bound: LhvBound) -> Self {
        let d = bound.value;
        let excess = bell_value - d;
        let sigmas = if stderr > 0.0 {
            excess / stderr
        } else if excess == 0.0 {
            0.0
        } else {
            excess.signum() * f64::INFINITY
        };
        ViolationReport {
            graph: graph.into(),
            bell_value,
            stderr,
            relative_violation: bell_value / d,
            relative_stderr: stderr / d,
            relative_is_lower_bound: bound.kind == crate::lhv::BoundKind::UpperBound,
            sigmas,
            verdict: bell_value > d,
            bound,
        }
    }

    pub fn to_json(&self) -> serde_json::Value {
        let finite = |v: f64| if v.is_finite() { serde_json::json!(v) } else { serde_json::json!(v.to_string()) };
        serde_json::json!({
            "graph": self.graph,
            "bell_value": self.bell_value,
            "stderr": self.stderr,
            "bound": {
                "value": self.bound.value,
                "kind": self.bound.kind,
                "fraction": self.bound.fraction_string(),
                "method": self.bound.method,
            },
            "relative_violation": self.relative_violation,
            "relative_stderr": self.relative_stderr,
            "relative_is_lower_bound": self.relative_is_lower_bound,
            "sigmas": finite(self.sigmas),
            "verdict": self.verdict,
        })
    }
}

/// Two-decimal display rounding, half away from zero, tolerant of binary
/// representation error in decimal inputs (0.855 → 0.86).
pub fn round2(v: f64) -> f64 {
    let scaled = v * 100.0;
    (scaled + scaled.signum() * 1e-9).round() / 100.0
}

impl fmt::Display for ViolationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let ge = if self.relative_is_lower_bound { "≥ " } else { "" };
        writeln!(f, "graph      {}", self.graph)?;
        writeln!(
            f,
            "value      {:.6} ± {:.6}  ({:.2}±{:.2})",
            self.bell_value,
            self.stderr,
            round2(self.bell_value),
            round2(self.stderr)
        )?;
        writeln!(f, "bound      {}", self.bound)?;
        writeln!(
            f,
            "R          {ge}{:.6} ± {:.6}  ({ge}{:.2}±{:.2})",
            self.relative_violation,
            self.relative_stderr,
            round2(self.relative_violation),
            round2(self.relative_stderr)
        )?;
        writeln!(f, "sigmas     {:.2}", self.sigmas)?;
        write!(f, "verdict    {}", if self.verdict { "VIOLATED" } else { "not violated" })
    }
}

/// Populations and extreme coherence of a measured GHZ state.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct GhzSummary {
    pub n: usize,
    pub p0: f64,
    pub p1: f64,
    pub coherence: f64,
    pub phase: Option<f64>,
    pub p0_err: f64,
    pub p1_err: f64,
    pub coh_err: f64,
}

impl GhzSummary {
    /// `errors` are `[p0_err, p1_err, coh_err]`.
    pub fn new(n: usize, p0: f64, p1: f64, coherence: f64, phase: Option<f64>, errors: [f64; 3]) -> Result<Self> {
        let tol = 1e-9;
        if n < 1 {
            return Err(Error::Invalid("n must be at least 1".into()));
        }
        if p0 < -tol || p1 < -tol || p0 + p1 > 1.0 + tol {
            return Err(Error::Invalid(format!("unphysical populations p0 = {p0}, p1 = {p1}")));
        }
        if coherence < 0.0 || coherence > (p0 * p1).max(0.0).sqrt() + tol {
            return Err(Error::Invalid(format!(
                "coherence {coherence} exceeds sqrt(p0·p1) = {}",
                (p0 * p1).max(0.0).sqrt()
            )));
        }
        if errors.iter().any(|e| !(e.is_finite() && *e >= 0.0)) {
            return Err(Error::Invalid("uncertainties must be non-negative".into()));
        }
        let [p0_err, p1_err, coh_err] = errors;
        Ok(GhzSummary {
            n,
            p0,
            p1,
            coherence,
            phase,
            p0_err,
            p1_err,
            coh_err,
        })
    }

    /// `F = (p0 + p1)/2 + coherence`.
    pub fn fidelity(&self) -> f64 {
        (self.p0 + self.p1) / 2.0 + self.coherence
    }
}

/// Reads `n,p0,p1,coherence,phase,p0_err,p1_err,coh_err` rows.
pub fn load_ghz_summaries(path: &Path) -> Result<Vec<GhzSummary>> {
    let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    parse_ghz_summaries(&text, path)
}

pub fn parse_ghz_summaries(text: &str, path: &Path) -> Result<Vec<GhzSummary>> {
    #[derive(Deserialize)]
    struct Row {
        n: usize,
        p0: f64,
        p1: f64,
        coherence: f64,
        phase: Option<f64>,
        p0_err: f64,
        p1_err: f64,
        coh_err: f64,
    }
    let mut reader = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let mut out = Vec::new();
    for row in reader.deserialize::<Row>() {
        let row = row.map_err(|e| {
            let line = e.position().map(|p| p.line()).unwrap_or(0);
            record_error(path, line, e.to_string())
        })?;
        let s = GhzSummary::new(
            row.n,
            row.p0,
            row.p1,
            row.coherence,
            row.phase,
            [row.p0_err, row.p1_err, row.coh_err],
        )
        .map_err(|e| record_error(path, out.len() as u64 + 2, e.to_string()))?;
        out.push(s);
    }
    if out.is_empty() {
        return Err(record_error(path, 0, "no records"));
    }
    Ok(out)
}

/// Graph-inequality and MK reports for a GHZ summary.
///
/// Graph: `F` against `D(GHZ_n)`; MK: `2·coherence` against `2^{−(n−1)/2}`
/// assuming the analyser phase is matched. Errors are propagated to first
/// order assuming independent inputs.
pub fn ghz_summary_metrics(s: &GhzSummary, graph_bound: &LhvBound, mk: &LhvBound) -> (ViolationReport, ViolationReport) {
    let f_err = ((s.p0_err / 2.0).powi(2) + (s.p1_err / 2.0).powi(2) + s.coh_err.powi(2)).sqrt();
    let name = format!("ghz{}", s.n);
    (
        ViolationReport::new(name.clone(), s.fidelity(), f_err, graph_bound.clone()),
        ViolationReport::new(format!("{name}-mk"), 2.0 * s.coherence, 2.0 * s.coh_err, mk.clone()),
    )
}

/// Data feeding a GHZ scaling table.
#[derive(Clone, Debug)]
pub enum ScalingSource {
    Ideal,
    Noise(NoiseSpec),
    Summaries(Vec<GhzSummary>),
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ScalingRow {
    pub n: usize,
    pub fidelity: f64,
    pub graph_bound: f64,
    pub graph_bound_fraction: Option<String>,
    pub graph_r: f64,
    pub mk_value: f64,
    pub mk_bound: f64,
    pub mk_r: f64,
}

pub fn scaling_table(ns: RangeInclusive<usize>, source: &ScalingSource) -> Result<Vec<ScalingRow>> {
    if ns.is_empty() || *ns.start() < 2 || *ns.end() > 64 {
        return Err(Error::Invalid(format!(
            "scaling range {}..={} must lie within 2..=64",
            ns.start(),
            ns.end()
        )));
    }
    let summaries: Vec<GhzSummary> = match source {
        ScalingSource::Ideal => ns
            .clone()
            .map(|n| GhzSummary::new(n, 0.5, 0.5, 0.5, None, [0.0; 3]))
            .collect::<Result<_>>()?,
        ScalingSource::Noise(spec) => ns.clone().map(|n| noisy_ghz_summary(n, *spec)).collect::<Result<_>>()?,
        ScalingSource::Summaries(rows) => rows.iter().copied().filter(|s| ns.contains(&s.n)).collect(),
    };
    if summaries.is_empty() {
        return Err(Error::Invalid("no summary rows inside the requested range".into()));
    }
    summaries
        .iter()
        .map(|s| {
            let gb = ghz_graph_bound(s.n)?;
            let mb = mk_bound(s.n)?;
            let (g, m) = ghz_summary_metrics(s, &gb, &mb);
            Ok(ScalingRow {
                n: s.n,
                fidelity: g.bell_value,
                graph_bound: gb.value,
                graph_bound_fraction: gb.fraction_string(),
                graph_r: g.relative_violation,
                mk_value: m.bell_value,
                mk_bound: mb.value,
                mk_r: m.relative_violation,
            })
        })
        .collect()
}

pub fn scaling_to_csv(rows: &[ScalingRow]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in rows {
        w.serialize(r).map_err(|e| Error::Invalid(e.to_string()))?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Invalid(e.to_string()))?;
    Ok(String::from_utf8(bytes).expect("csv output is UTF-8"))
}

/// Location of the bundled box-cluster measurement table.
pub fn bundled_bc4_hat_table() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("data/bc4_hat_measurements.csv")
}
