//! Run configurations, task dispatch and deterministic report emission.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use thiserror::Error;

use crate::bracket::{bracket_self, bracket_with, equal_term_pairs, BracketError};
use crate::intersections::{
    exact_count, self_intersections, stabilized_count, Enumeration, IntersectionError,
    IntersectionRecord,
};
use crate::pipeline::{
    build_pair_general, build_pair_self, check_equal_length_with, check_nonconjugate, find_min_n,
    is_filling, Filling, PipelineError,
};
use crate::sampler::{sample_representation, Representation, SamplerError};
use crate::trace::{trace_polynomial, verify_trace_identity_with, TraceReducer};
use crate::word::{SurfaceSpec, Word, WordError};

pub const EXIT_OK: i32 = 0;
pub const EXIT_RUNTIME: i32 = 1;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_INCONCLUSIVE: i32 = 3;
pub const EXIT_VERIFICATION: i32 = 4;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Task {
    Bracket,
    BracketSelf,
    Pairs,
    Verify,
    TraceId,
    Filling,
    SampleReps,
}

impl std::str::FromStr for Task {
    type Err = RunError;
    fn from_str(s: &str) -> Result<Self, RunError> {
        serde_json::from_value(Value::String(s.to_string()))
            .map_err(|_| RunError::Config(format!("unknown task {s:?}")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Json,
    Csv,
    Text,
}

impl std::str::FromStr for Format {
    type Err = RunError;
    fn from_str(s: &str) -> Result<Self, RunError> {
        serde_json::from_value(Value::String(s.to_string()))
            .map_err(|_| RunError::Config(format!("unknown format {s:?}")))
    }
}

fn default_spread() -> f64 {
    3.0
}
fn default_word_bound() -> usize {
    6
}
fn default_scc_bound() -> usize {
    4
}
fn default_tol() -> f64 {
    1e-9
}
fn default_seeds() -> Vec<u64> {
    vec![0]
}
fn default_n_range() -> [u32; 2] {
    [1, 10]
}
fn default_alpha() -> String {
    "alpha".into()
}
fn default_beta() -> String {
    "beta".into()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub surface: SurfaceSpec,
    #[serde(default)]
    pub words: BTreeMap<String, String>,
    pub task: Task,
    #[serde(default = "default_seeds")]
    pub seeds: Vec<u64>,
    #[serde(default = "default_spread")]
    pub spread: f64,
    #[serde(default = "default_word_bound")]
    pub word_bound: usize,
    #[serde(default = "default_scc_bound")]
    pub scc_word_bound: usize,
    /// Inclusive range of powers `n`.
    #[serde(default = "default_n_range")]
    pub n_range: [u32; 2],
    #[serde(default = "default_tol")]
    pub tol: f64,
    /// Name of the word used as `α`.
    #[serde(default = "default_alpha")]
    pub alpha: String,
    /// Name of the word used as `β`.
    #[serde(default = "default_beta")]
    pub beta: String,
    #[serde(default)]
    pub output_path: Option<String>,
    #[serde(default)]
    pub format: Format,
}

#[derive(Debug, Error)]
pub enum RunError {
    #[error("config error: {0}")]
    Config(String),
    #[error("inconclusive: {0}")]
    Inconclusive(String),
    #[error("{0}")]
    Runtime(String),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

impl RunError {
    pub fn exit_code(&self) -> i32 {
        match self {
            RunError::Config(_) => EXIT_CONFIG,
            RunError::Inconclusive(_) => EXIT_INCONCLUSIVE,
            RunError::Runtime(_) | RunError::Io(_) => EXIT_RUNTIME,
        }
    }
}

impl From<WordError> for RunError {
    fn from(e: WordError) -> Self {
        RunError::Config(e.to_string())
    }
}

impl From<SamplerError> for RunError {
    fn from(e: SamplerError) -> Self {
        RunError::Runtime(e.to_string())
    }
}

impl From<IntersectionError> for RunError {
    fn from(e: IntersectionError) -> Self {
        match e {
            IntersectionError::Inconclusive { .. } => RunError::Inconclusive(e.to_string()),
            IntersectionError::ProperPower(_)
            | IntersectionError::NotCyclicallyReduced(_)
            | IntersectionError::EmptyWord
            | IntersectionError::Word(_) => RunError::Config(e.to_string()),
            _ => RunError::Runtime(e.to_string()),
        }
    }
}

impl From<BracketError> for RunError {
    fn from(e: BracketError) -> Self {
        match e {
            BracketError::Intersection(i) => i.into(),
            other => RunError::Config(other.to_string()),
        }
    }
}

impl From<PipelineError> for RunError {
    fn from(e: PipelineError) -> Self {
        match e {
            PipelineError::Intersection(i) => i.into(),
            PipelineError::Sampler(s) => s.into(),
            PipelineError::Input(_) | PipelineError::ZeroPower | PipelineError::NotFilling(..) => {
                RunError::Config(e.to_string())
            }
            other => RunError::Runtime(other.to_string()),
        }
    }
}

impl RunConfig {
    pub fn from_json(text: &str) -> Result<Self, RunError> {
        serde_json::from_str(text).map_err(|e| RunError::Config(e.to_string()))
    }

    pub fn validate(&self) -> Result<(), RunError> {
        self.surface.validate()?;
        let rank = self.surface.rank();
        for (name, w) in &self.words {
            Word::parse_with_rank(w, rank)
                .map_err(|e| RunError::Config(format!("word {name:?}: {e}")))?;
        }
        if self.seeds.is_empty() {
            return Err(RunError::Config("seeds must not be empty".into()));
        }
        if self.word_bound == 0 || self.scc_word_bound == 0 {
            return Err(RunError::Config("bounds must be positive".into()));
        }
        let [lo, hi] = self.n_range;
        if lo == 0 || hi < lo {
            return Err(RunError::Config(format!("bad n_range [{lo}, {hi}]")));
        }
        if !(self.tol > 0.0 && self.tol <= 1e-3) {
            return Err(RunError::Config(format!("tol {} not in (0, 1e-3]", self.tol)));
        }
        if !(self.spread.is_finite() && self.spread > 0.0) {
            return Err(RunError::Config("spread must be positive".into()));
        }
        let needs: &[&str] = match self.task {
            Task::Bracket => &["alpha", "beta"],
            Task::BracketSelf | Task::Pairs | Task::Verify => &["alpha"],
            Task::Filling => {
                if self.words.is_empty() {
                    return Err(RunError::Config("filling needs at least one word".into()));
                }
                &[]
            }
            Task::TraceId | Task::SampleReps => &[],
        };
        for role in needs {
            let name = if *role == "alpha" { &self.alpha } else { &self.beta };
            if !self.words.contains_key(name) {
                return Err(RunError::Config(format!("word {name:?} ({role}) is not defined")));
            }
        }
        Ok(())
    }

    fn word(&self, name: &str) -> Result<Word, RunError> {
        let text = self
            .words
            .get(name)
            .ok_or_else(|| RunError::Config(format!("word {name:?} is not defined")))?;
        Ok(Word::parse_with_rank(text, self.surface.rank())?)
    }

    fn n_values(&self) -> std::ops::RangeInclusive<u32> {
        self.n_range[0]..=self.n_range[1]
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Ok,
    Inconclusive,
    VerificationFailed,
}

impl Status {
    pub fn exit_code(self) -> i32 {
        match self {
            Status::Ok => EXIT_OK,
            Status::Inconclusive => EXIT_INCONCLUSIVE,
            Status::VerificationFailed => EXIT_VERIFICATION,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    fn new(columns: &[&str]) -> Self {
        Self {
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    fn push(&mut self, row: Vec<String>) {
        self.rows.push(row);
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub tool: String,
    pub version: String,
    pub config: RunConfig,
    pub status: Status,
    /// Short human-readable findings, in order.
    pub summary: Vec<String>,
    pub payload: Value,
    pub table: Table,
}

/// Floats are kept at 9 significant digits so reports are byte-stable.
pub fn round_sig(x: f64) -> f64 {
    if !x.is_finite() || x == 0.0 {
        return x;
    }
    format!("{x:.8e}").parse().unwrap_or(x)
}

fn round_value(v: &mut Value) {
    match v {
        Value::Number(n) if n.is_f64() => {
            if let Some(x) = n.as_f64() {
                *v = json!(round_sig(x));
            }
        }
        Value::Array(a) => a.iter_mut().for_each(round_value),
        Value::Object(o) => o.values_mut().for_each(round_value),
        _ => {}
    }
}

fn to_value<T: Serialize>(x: &T) -> Value {
    serde_json::to_value(x).expect("report values serialize")
}

fn fmt_f(x: f64) -> String {
    serde_json::to_string(&round_sig(x)).unwrap_or_else(|_| x.to_string())
}

fn filling_str(f: Filling) -> &'static str {
    match f {
        Filling::Yes => "yes",
        Filling::No => "no",
        Filling::Inconclusive => "inconclusive",
    }
}

fn record_value(r: &IntersectionRecord) -> Value {
    let six = |x: f64| format!("{x:.6}").parse::<f64>().unwrap_or(x);
    json!({
        "witness": r.witness.to_string(),
        "coset_key": r.coset_key,
        "point": [six(r.point.x), six(r.point.y)],
        "coordinate": r.coordinate,
        "sign": r.sign,
        "angle": r.angle,
    })
}

fn sample_all(cfg: &RunConfig) -> Result<Vec<Representation>, RunError> {
    cfg.seeds
        .iter()
        .map(|&s| sample_representation(&cfg.surface, s, cfg.spread).map_err(RunError::from))
        .collect()
}

struct Outcome {
    status: Status,
    summary: Vec<String>,
    payload: Value,
    table: Table,
}

/// Execute the configured task.
pub fn run(config: &RunConfig) -> Result<Report, RunError> {
    config.validate()?;
    let out = match config.task {
        Task::TraceId => run_trace_id(config)?,
        Task::Bracket => run_bracket(config)?,
        Task::BracketSelf => run_bracket_self(config)?,
        Task::Pairs => run_pairs(config)?,
        Task::Verify => run_verify(config)?,
        Task::Filling => run_filling(config)?,
        Task::SampleReps => run_sample_reps(config)?,
    };
    let mut payload = out.payload;
    round_value(&mut payload);
    Ok(Report {
        tool: "lengthpairs".into(),
        version: env!("CARGO_PKG_VERSION").into(),
        config: config.clone(),
        status: out.status,
        summary: out.summary,
        payload,
        table: out.table,
    })
}

fn run_trace_id(cfg: &RunConfig) -> Result<Outcome, RunError> {
    let mut reducer = TraceReducer::new();
    let mut rows = Vec::new();
    let mut table = Table::new(&["n", "holds", "trace_left", "trace_right"]);
    let a = Word::generator(1);
    let b = Word::generator(2);
    let mut all = true;
    for n in cfg.n_values() {
        let holds = verify_trace_identity_with(&mut reducer, n);
        let l = reducer
            .trace(&a.power(n as i64).compose(&b))
            .map_err(|e| RunError::Runtime(e.to_string()))?;
        let r = reducer
            .trace(&b.power(n as i64).compose(&a))
            .map_err(|e| RunError::Runtime(e.to_string()))?;
        all &= holds;
        rows.push(json!({"n": n, "holds": holds, "trace_left": l.to_string(), "trace_right": r.to_string()}));
        table.push(vec![n.to_string(), holds.to_string(), l.to_string(), r.to_string()]);
    }
    let commutator = trace_polynomial(&"abAB".parse().expect("literal word"))
        .map_err(|e| RunError::Runtime(e.to_string()))?;
    Ok(Outcome {
        status: if all { Status::Ok } else { Status::VerificationFailed },
        summary: vec![format!(
            "tr(a^n b) = tr(b^n a) on tr a = tr b: {} of {} rows hold",
            rows.iter().filter(|r| r["holds"] == json!(true)).count(),
            rows.len()
        )],
        payload: json!({"rows": rows, "commutator": commutator.to_string()}),
        table,
    })
}

fn run_bracket(cfg: &RunConfig) -> Result<Outcome, RunError> {
    let alpha = cfg.word(&cfg.alpha)?;
    let beta = cfg.word(&cfg.beta)?;
    let reps = sample_all(cfg)?;
    let mut per_seed = Vec::new();
    let mut sums = Vec::new();
    for rep in &reps {
        let res = bracket_with(&alpha, &beta, rep, Enumeration::Bounded(cfg.word_bound))?;
        let stable = stabilized_count(&alpha, &beta, rep)?;
        let exact = exact_count(&alpha, &beta, rep)?;
        per_seed.push(json!({
            "seed": rep.seed,
            "records": res.records.iter().map(record_value).collect::<Vec<_>>(),
            "terms": to_value(&res.terms),
            "sum": to_value(&res.sum),
            "stabilized": to_value(&stable),
            "exact_count": exact,
        }));
        sums.push(res.sum);
    }
    let reverse = bracket_with(&beta, &alpha, &reps[0], Enumeration::Bounded(cfg.word_bound))?.sum;
    let antisymmetric = (sums[0].clone() + reverse).is_zero();
    let metric_independent = sums.iter().all(|s| *s == sums[0]);
    let mut table = Table::new(&["class", "coefficient"]);
    for (k, c) in sums[0].terms() {
        table.push(vec![k.to_string(), c.to_string()]);
    }
    let ok = antisymmetric && metric_independent;
    Ok(Outcome {
        status: if ok { Status::Ok } else { Status::VerificationFailed },
        summary: vec![
            format!("[{alpha}, {beta}] = {}", sums[0]),
            format!("antisymmetric: {antisymmetric}"),
            format!("identical across {} seeds: {metric_independent}", reps.len()),
        ],
        payload: json!({
            "alpha": alpha.to_string(),
            "beta": beta.to_string(),
            "sum": to_value(&sums[0]),
            "antisymmetric": antisymmetric,
            "metric_independent": metric_independent,
            "per_seed": per_seed,
        }),
        table,
    })
}

fn run_bracket_self(cfg: &RunConfig) -> Result<Outcome, RunError> {
    let alpha = cfg.word(&cfg.alpha)?;
    let reps = sample_all(cfg)?;
    let res = bracket_self(&alpha, &reps[0], cfg.word_bound)?;
    let zero = res.sum.is_zero();
    let paired = res
        .terms
        .chunks(2)
        .all(|p| p.len() == 2 && p[0].coefficient == -p[1].coefficient && p[0].class == p[1].class);
    let mut table = Table::new(&["class", "coefficient", "witness"]);
    for t in &res.terms {
        table.push(vec![t.class.to_string(), t.coefficient.to_string(), t.witness.to_string()]);
    }
    Ok(Outcome {
        status: if zero && paired { Status::Ok } else { Status::VerificationFailed },
        summary: vec![
            format!("[<{alpha}>, <{alpha}>] = {}", res.sum),
            format!("{} terms before cancellation", res.terms.len()),
        ],
        payload: json!({
            "alpha": alpha.to_string(),
            "sum": to_value(&res.sum),
            "zero": zero,
            "sign_paired": paired,
            "pre_cancellation": to_value(&res.terms),
            "records": res.records.iter().map(record_value).collect::<Vec<_>>(),
        }),
        table,
    })
}

fn run_pairs(cfg: &RunConfig) -> Result<Outcome, RunError> {
    let alpha = cfg.word(&cfg.alpha)?;
    let reps = sample_all(cfg)?;
    let rep = &reps[0];
    let records = self_intersections(&alpha, rep, cfg.word_bound)?;
    let mut table = Table::new(&["coset_key", "n", "left", "right", "nonconjugate", "not_conjugate_to_inverse"]);
    let mut per_record = Vec::new();
    let mut summary = vec![format!("{} self-intersection records for {alpha}", records.len())];
    for r in &records {
        let scan = find_min_n(&alpha, r, cfg.n_range[1])?;
        let mut pairs = Vec::new();
        for n in cfg.n_values() {
            let p = build_pair_self(&alpha, r, n)?;
            let (nc, ni) = check_nonconjugate(&p);
            table.push(vec![
                r.coset_key.clone(),
                n.to_string(),
                p.left.to_string(),
                p.right.to_string(),
                nc.to_string(),
                ni.to_string(),
            ]);
            pairs.push(json!({"n": n, "left": p.left.to_string(), "right": p.right.to_string(), "nonconjugate": nc, "not_conjugate_to_inverse": ni}));
        }
        summary.push(format!(
            "record {}: observed N = {}",
            r.coset_key,
            scan.n_observed.map_or("not found".to_string(), |n| n.to_string())
        ));
        per_record.push(json!({"record": record_value(r), "threshold": to_value(&scan), "pairs": pairs}));
    }
    let mut general = Value::Null;
    if cfg.words.contains_key(&cfg.beta) {
        let beta = cfg.word(&cfg.beta)?;
        let eq = equal_term_pairs(&alpha, &beta, rep, cfg.word_bound)?;
        let mut built = Vec::new();
        for (g, h) in &eq {
            for n in cfg.n_values() {
                let p = build_pair_general(&alpha, &beta, g, h, n)?;
                let (nc, ni) = check_nonconjugate(&p);
                built.push(json!({"g": g.to_string(), "h": h.to_string(), "n": n, "left": p.left.to_string(), "right": p.right.to_string(), "nonconjugate": nc, "not_conjugate_to_inverse": ni}));
            }
        }
        general = json!({"beta": beta.to_string(), "equal_term_pairs": eq.iter().map(|(g, h)| [g.to_string(), h.to_string()]).collect::<Vec<_>>(), "pairs": built});
    }
    Ok(Outcome {
        status: Status::Ok,
        summary,
        payload: json!({"alpha": alpha.to_string(), "self": per_record, "general": general}),
        table,
    })
}

fn run_verify(cfg: &RunConfig) -> Result<Outcome, RunError> {
    let alpha = cfg.word(&cfg.alpha)?;
    let reps = sample_all(cfg)?;
    let records = self_intersections(&alpha, &reps[0], cfg.word_bound)?;
    let Some(record) = records.first() else {
        return Ok(Outcome {
            status: Status::VerificationFailed,
            summary: vec![format!("{alpha} has no self-intersections; nothing to verify")],
            payload: json!({"alpha": alpha.to_string(), "records": []}),
            table: Table::new(&["seed", "n", "tau_left", "tau_right", "rel_dev", "nonconjugate", "filling_left", "filling_right"]),
        });
    };
    // the record must be the same double coset on every representation
    let mut metric_independent = true;
    for rep in &reps[1..] {
        let keys: Vec<String> = self_intersections(&alpha, rep, cfg.word_bound)?
            .into_iter()
            .map(|r| r.coset_key)
            .collect();
        metric_independent &= keys == records.iter().map(|r| r.coset_key.clone()).collect::<Vec<_>>();
    }
    let scan = find_min_n(&alpha, record, cfg.n_range[1].max(2))?;
    let mut reducer = TraceReducer::new();
    let mut table = Table::new(&["seed", "n", "tau_left", "tau_right", "rel_dev", "nonconjugate", "filling_left", "filling_right"]);
    let mut per_n = Vec::new();
    let mut ok = metric_independent;
    let mut inconclusive = false;
    for n in cfg.n_values() {
        let pair = build_pair_self(&alpha, record, n)?;
        let lengths = check_equal_length_with(&pair, &reps, cfg.tol, &mut reducer)?;
        let (nc, ni) = check_nonconjugate(&pair);
        let fl = is_filling(&pair.left.cyclic_reduction(), &reps[0], cfg.scc_word_bound)?.verdict;
        let fr = is_filling(&pair.right.cyclic_reduction(), &reps[0], cfg.scc_word_bound)?.verdict;
        inconclusive |= fl == Filling::Inconclusive || fr == Filling::Inconclusive;
        ok &= lengths.equal_numeric && lengths.equal_symbolic;
        if scan.n_observed.is_some_and(|m| n > m) {
            ok &= nc && ni;
        }
        for r in &lengths.per_rep {
            table.push(vec![
                r.seed.to_string(),
                n.to_string(),
                fmt_f(r.tau_left),
                fmt_f(r.tau_right),
                fmt_f(r.rel_dev),
                nc.to_string(),
                filling_str(fl).into(),
                filling_str(fr).into(),
            ]);
        }
        per_n.push(json!({
            "n": n,
            "left": pair.left.to_string(),
            "right": pair.right.to_string(),
            "equal_length_numeric": lengths.equal_numeric,
            "max_deviation": lengths.max_deviation,
            "equal_length_symbolic": lengths.equal_symbolic,
            "nonconjugate": nc,
            "not_conjugate_to_inverse": ni,
            "filling_left": filling_str(fl),
            "filling_right": filling_str(fr),
            "length_equivalent": lengths.equal_numeric && lengths.equal_symbolic && nc && ni,
        }));
    }
    let n_text = scan.n_observed.map_or("not found".to_string(), |n| n.to_string());
    let mut summary = vec![
        format!("alpha = {alpha}, g = {}", record.witness),
        format!("observed N = {n_text} (scanned to {})", scan.n_max),
    ];
    for row in &per_n {
        summary.push(format!(
            "n = {}: length_equivalent = {}, filling = {}/{}",
            row["n"], row["length_equivalent"], row["filling_left"].as_str().unwrap_or("?"), row["filling_right"].as_str().unwrap_or("?")
        ));
    }
    let status = if !ok {
        Status::VerificationFailed
    } else if inconclusive {
        Status::Inconclusive
    } else {
        Status::Ok
    };
    Ok(Outcome {
        status,
        summary,
        payload: json!({
            "alpha": alpha.to_string(),
            "record": record_value(record),
            "metric_independent": metric_independent,
            "threshold": to_value(&scan),
            "per_n": per_n,
        }),
        table,
    })
}

fn run_filling(cfg: &RunConfig) -> Result<Outcome, RunError> {
    let reps = sample_all(cfg)?;
    let mut table = Table::new(&["name", "word", "verdict", "witness", "reason"]);
    let mut rows = Vec::new();
    let mut inconclusive = false;
    for (name, text) in &cfg.words {
        let w = Word::parse_with_rank(text, cfg.surface.rank())?.cyclic_reduction();
        let r = is_filling(&w, &reps[0], cfg.scc_word_bound)?;
        inconclusive |= r.verdict == Filling::Inconclusive;
        table.push(vec![
            name.clone(),
            w.to_string(),
            filling_str(r.verdict).into(),
            r.witness.as_ref().map_or(String::new(), |z| z.to_string()),
            r.reason.clone(),
        ]);
        rows.push(json!({"name": name, "report": to_value(&r)}));
    }
    Ok(Outcome {
        status: if inconclusive { Status::Inconclusive } else { Status::Ok },
        summary: table.rows.iter().map(|r| format!("{} ({}): {}", r[0], r[1], r[2])).collect(),
        payload: json!({"scc_word_bound": cfg.scc_word_bound, "words": rows}),
        table,
    })
}

fn run_sample_reps(cfg: &RunConfig) -> Result<Outcome, RunError> {
    let reps = sample_all(cfg)?;
    let mut table = Table::new(&["seed", "generator", "a", "b", "c", "d"]);
    let mut dumps = Vec::new();
    for rep in &reps {
        for (i, m) in rep.matrices.iter().enumerate() {
            let mut row = vec![rep.seed.to_string(), crate::word::Letter::gen(i + 1).to_char().to_string()];
            row.extend(m.to_array().iter().map(|&x| fmt_f(x)));
            table.push(row);
        }
        let topology = rep.topology();
        dumps.push(json!({
            "representation": to_value(rep),
            "peripheral": topology.map(|t| t.peripheral.iter().map(|c| c.to_string()).collect::<Vec<_>>()),
        }));
    }
    Ok(Outcome {
        status: Status::Ok,
        summary: vec![format!("{} certified representations", reps.len())],
        payload: json!({"representations": dumps}),
        table,
    })
}

/// Serialise a report. JSON is pretty-printed with sorted keys.
pub fn emit(report: &Report, format: Format) -> Result<Vec<u8>, RunError> {
    match format {
        Format::Json => {
            let mut v = serde_json::to_vec_pretty(report).map_err(|e| RunError::Runtime(e.to_string()))?;
            v.push(b'\n');
            Ok(v)
        }
        Format::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            let io = |e: csv::Error| RunError::Runtime(e.to_string());
            w.write_record(&report.table.columns).map_err(io)?;
            for r in &report.table.rows {
                w.write_record(r).map_err(io)?;
            }
            w.into_inner().map_err(|e| RunError::Runtime(e.to_string()))
        }
        Format::Text => Ok(render_text(report).into_bytes()),
    }
}

/// Thread-count override read from the environment.
pub const THREADS_ENV: &str = "LENGTHPAIRS_THREADS";

/// Size the global worker pool from `LENGTHPAIRS_THREADS`, if set.
pub fn configure_threads() -> Result<(), RunError> {
    let Ok(v) = std::env::var(THREADS_ENV) else {
        return Ok(());
    };
    let n: usize = v
        .trim()
        .parse()
        .map_err(|_| RunError::Config(format!("{THREADS_ENV}={v:?} is not a thread count")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| RunError::Runtime(e.to_string()))
}

/// Emit and write to `path`, or return the bytes when no path is given.
pub fn write_report(report: &Report, format: Format, path: Option<&str>) -> Result<Vec<u8>, RunError> {
    let bytes = emit(report, format)?;
    if let Some(p) = path {
        std::fs::write(p, &bytes)?;
    }
    Ok(bytes)
}

fn render_text(report: &Report) -> String {
    let mut s = String::new();
    let task = serde_json::to_value(report.config.task)
        .ok()
        .and_then(|v| v.as_str().map(str::to_string))
        .unwrap_or_default();
    let status = serde_json::to_value(report.status)
        .ok()
        .and_then(|v| v.as_str().map(str::to_string))
        .unwrap_or_default();
    let _ = writeln!(s, "{} {}  task: {task}  status: {status}", report.tool, report.version);
    for line in &report.summary {
        let _ = writeln!(s, "  {line}");
    }
    let t = &report.table;
    let widths: Vec<usize> = (0..t.columns.len())
        .map(|i| {
            t.rows
                .iter()
                .map(|r| r.get(i).map_or(0, |c| c.chars().count()))
                .chain([t.columns[i].chars().count()])
                .max()
                .unwrap_or(0)
        })
        .collect();
    let line = |cells: &[String]| {
        cells
            .iter()
            .zip(&widths)
            .map(|(c, w)| format!("{c:<w$}"))
            .collect::<Vec<_>>()
            .join("  ")
            .trim_end()
            .to_string()
    };
    let _ = writeln!(s);
    let _ = writeln!(s, "{}", line(&t.columns));
    for r in &t.rows {
        let _ = writeln!(s, "{}", line(r));
    }
    s
}
