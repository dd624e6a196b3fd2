//! Command-line front end. Every command reads one JSON document (a path,
//! inline text starting with `{`, or `-` for stdin) and prints one JSON
//! report, or DOT where offered.
//!
//! Exit codes: 0 on success, 1 when the answer is a negative verdict (not
//! Mumford, not covering, a reduction failing), 2 on bad input or lost
//! precision. Errors are printed as `{"error": {"kind", "message"}}`.

pub mod literal;

use std::io::Read;
use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Map, Value};

use crate::bt_tree::{self, hull_tree, mirror_distance, scan_mirrors, Moebius, P1Point, TreeVertex};
use crate::covering::{self, CoveringSuite, Radius, Tag};
use crate::criterion::{evaluate, genus, is_mumford, BranchData};
use crate::error::{CoveringError, CriterionError, FieldError, GroupError, ThetaError, TreeError};
use crate::groups::{make_parabolic, ParabolicGen};
use crate::theta::{recover_lambda, LambdaRecovery, ThetaConfig};
use crate::valfield::{FieldParams, LaurentElem, Rational, Valu};

use literal::{literal_from_json, LiteralError, GRAMMAR_VERSION};

const DEFAULT_WORDS: usize = 4;
const DEFAULT_RADIUS: i64 = 8;

#[derive(Parser, Debug)]
#[command(name = "mumford", version, about = "Mumford criterion, affinoid coverings and theta products for y^p - y = sum lambda_i/(x - a_i)")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub options: Options,
}

#[derive(clap::Args, Debug, Clone, Default)]
pub struct Options {
    /// Residue characteristic. Must agree with the input when both are given.
    #[arg(long, global = true)]
    pub p: Option<u32>,
    /// Residue degree.
    #[arg(long, global = true)]
    pub f: Option<u32>,
    /// Ramification index.
    #[arg(long, global = true)]
    pub e: Option<u32>,
    /// Truncate printed series to absolute precision `t^prec`.
    #[arg(long, global = true)]
    pub prec: Option<i64>,
    /// Word-length cutoff for theta products.
    #[arg(long = "words", global = true)]
    pub words: Option<usize>,
    /// Search depth for mirror scans.
    #[arg(long, global = true)]
    pub radius: Option<i64>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    /// Also write the report to this file.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
}

#[derive(ValueEnum, Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Format {
    #[default]
    Json,
    Dot,
}

#[derive(Subcommand, Debug, Clone)]
pub enum Command {
    /// Evaluate the valuation criterion on branch data.
    Check { input: String },
    /// Print (p - 1)(r - 1).
    Genus {
        #[arg(long)]
        r: usize,
    },
    /// Build the affinoid covering and verify it.
    Cover { input: String },
    /// Classify the reduction on every piece of the covering.
    Reduce { input: String },
    /// Recover lambda_1, lambda_2 from a pair of parabolic generators.
    Theta { input: String },
    /// Theta, then the criterion and the covering on the recovered data.
    Roundtrip { input: String },
    /// Bruhat-Tits tree queries.
    Tree {
        #[command(subcommand)]
        op: TreeOp,
    },
}

#[derive(Subcommand, Debug, Clone)]
pub enum TreeOp {
    /// Distance between two vertices given as balls.
    Dist { input: String },
    /// Mirror distance of two parabolic elements.
    Mirror { input: String },
    /// Subtree spanned by a set of ends.
    Hull { input: String },
}

/// One validated invocation.
#[derive(Debug, Clone)]
pub struct JobSpec {
    pub command: Command,
    pub options: Options,
}

impl JobSpec {
    pub fn new(command: Command, options: Options) -> Result<Self, CliError> {
        let name = command_name(&command);
        let dot_ok = matches!(
            command,
            Command::Cover { .. } | Command::Tree { op: TreeOp::Mirror { .. } | TreeOp::Hull { .. } }
        );
        if options.format == Format::Dot && !dot_ok {
            return Err(CliError::Schema(format!("--format dot is not available for {}", name)));
        }
        if options.words.is_some() && !matches!(command, Command::Theta { .. } | Command::Roundtrip { .. }) {
            return Err(CliError::Schema(format!("--words does not apply to {}", name)));
        }
        if options.radius.is_some() && !matches!(command, Command::Tree { op: TreeOp::Mirror { .. } }) {
            return Err(CliError::Schema(format!("--radius does not apply to {}", name)));
        }
        if matches!(command, Command::Genus { .. }) && options.p.is_none() {
            return Err(CliError::Schema("genus needs --p".into()));
        }
        Ok(JobSpec { command, options })
    }
}

fn command_name(c: &Command) -> &'static str {
    match c {
        Command::Check { .. } => "check",
        Command::Genus { .. } => "genus",
        Command::Cover { .. } => "cover",
        Command::Reduce { .. } => "reduce",
        Command::Theta { .. } => "theta",
        Command::Roundtrip { .. } => "roundtrip",
        Command::Tree { op: TreeOp::Dist { .. } } => "tree dist",
        Command::Tree { op: TreeOp::Mirror { .. } } => "tree mirror",
        Command::Tree { op: TreeOp::Hull { .. } } => "tree hull",
    }
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Schema(String),
    #[error(transparent)]
    Literal(#[from] LiteralError),
    #[error("invalid JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("cannot read {path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error(transparent)]
    Tree(#[from] TreeError),
    #[error(transparent)]
    Group(#[from] GroupError),
    #[error(transparent)]
    Criterion(#[from] CriterionError),
    #[error(transparent)]
    Covering(#[from] CoveringError),
    #[error(transparent)]
    Theta(#[from] ThetaError),
}

impl CliError {
    pub fn kind(&self) -> &'static str {
        match self {
            CliError::Schema(_) | CliError::Literal(_) | CliError::Json(_) => "schema",
            CliError::Io { .. } => "io",
            CliError::Field(FieldError::DivisionByZeroToPrecision)
            | CliError::Tree(TreeError::InsufficientPrecision { .. })
            | CliError::Theta(ThetaError::PrecisionExhausted(_)) => "precision",
            _ => "input",
        }
    }

    pub fn to_json(&self) -> Value {
        json!({"error": {"kind": self.kind(), "message": self.to_string()}})
    }
}

/// Exit code and the text to print.
#[derive(Debug, Clone)]
pub struct Outcome {
    pub code: i32,
    pub body: String,
}

pub fn run(job: &JobSpec) -> Outcome {
    match dispatch(job) {
        Ok((code, body)) => Outcome { code, body },
        Err(e) => Outcome { code: 2, body: pretty(&e.to_json()) },
    }
}

/// Parse arguments, run, print, and return the exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    let outcome = match JobSpec::new(cli.command, cli.options) {
        Ok(job) => {
            let out = run(&job);
            if let Some(path) = &job.options.out {
                if let Err(e) = std::fs::write(path, &out.body) {
                    let err = CliError::Io { path: path.display().to_string(), source: e };
                    emit(&pretty(&err.to_json()));
                    return 2;
                }
            }
            out
        }
        Err(e) => Outcome { code: 2, body: pretty(&e.to_json()) },
    };
    emit(&outcome.body);
    outcome.code
}

/// Print, ignoring a closed pipe.
fn emit(body: &str) {
    use std::io::Write;
    let _ = writeln!(std::io::stdout().lock(), "{}", body);
}

fn pretty(v: &Value) -> String {
    serde_json::to_string_pretty(v).expect("serializable")
}

fn dispatch(job: &JobSpec) -> Result<(i32, String), CliError> {
    let o = &job.options;
    match &job.command {
        Command::Genus { r } => Ok((0, genus(o.p.expect("validated"), *r).to_string())),
        Command::Check { input } => cmd_check(&load(input)?, o),
        Command::Cover { input } => cmd_cover(&load(input)?, o, false),
        Command::Reduce { input } => cmd_cover(&load(input)?, o, true),
        Command::Theta { input } => cmd_theta(&load(input)?, o, false),
        Command::Roundtrip { input } => cmd_theta(&load(input)?, o, true),
        Command::Tree { op } => match op {
            TreeOp::Dist { input } => cmd_tree_dist(&load(input)?, o),
            TreeOp::Mirror { input } => cmd_tree_mirror(&load(input)?, o),
            TreeOp::Hull { input } => cmd_tree_hull(&load(input)?, o),
        },
    }
}

fn load(input: &str) -> Result<Value, CliError> {
    let text = if input.trim_start().starts_with('{') {
        input.to_string()
    } else if input == "-" {
        let mut s = String::new();
        std::io::stdin()
            .read_to_string(&mut s)
            .map_err(|e| CliError::Io { path: "<stdin>".into(), source: e })?;
        s
    } else {
        std::fs::read_to_string(input).map_err(|e| CliError::Io { path: input.into(), source: e })?
    };
    let v: Value = serde_json::from_str(&text)?;
    if !v.is_object() {
        return Err(CliError::Schema("input must be a JSON object".into()));
    }
    Ok(v)
}

// ---- input helpers ----

fn field_of(v: &Value, o: &Options, default_f: u32) -> Result<FieldParams, CliError> {
    let pick = |key: &str, flag: Option<u32>, default: Option<u32>| -> Result<u32, CliError> {
        let from_json = match v.get(key) {
            None => None,
            Some(x) => Some(
                x.as_u64()
                    .and_then(|n| u32::try_from(n).ok())
                    .ok_or_else(|| CliError::Schema(format!("'{}' must be a small positive integer", key)))?,
            ),
        };
        match (from_json, flag) {
            (Some(a), Some(b)) if a != b => Err(CliError::Schema(format!("--{} {} disagrees with input {}", key, b, a))),
            (Some(a), _) | (None, Some(a)) => Ok(a),
            (None, None) => default.ok_or_else(|| CliError::Schema(format!("missing '{}'", key))),
        }
    };
    let p = pick("p", o.p, None)?;
    let f = pick("f", o.f, Some(default_f))?;
    let e = pick("e", o.e, Some(1))?;
    Ok(FieldParams::new(p, f, e)?)
}

fn elem(k: &FieldParams, v: &Value, key: &str) -> Result<LaurentElem, CliError> {
    let x = v.get(key).ok_or_else(|| CliError::Schema(format!("missing '{}'", key)))?;
    Ok(literal_from_json(k, x)?)
}

fn elems(k: &FieldParams, v: &Value, key: &str) -> Result<Vec<LaurentElem>, CliError> {
    let arr = v
        .get(key)
        .and_then(Value::as_array)
        .ok_or_else(|| CliError::Schema(format!("'{}' must be an array", key)))?;
    arr.iter().map(|x| Ok(literal_from_json(k, x)?)).collect()
}

fn point(k: &FieldParams, v: &Value) -> Result<P1Point, CliError> {
    if v.as_str() == Some("inf") {
        return Ok(P1Point::Infinity);
    }
    Ok(P1Point::Finite(literal_from_json(k, v)?))
}

fn branch_data(v: &Value, o: &Options) -> Result<BranchData, CliError> {
    let k = field_of(v, o, 1)?;
    Ok(BranchData::new(elems(&k, v, "a")?, elems(&k, v, "lambda")?)?)
}

// ---- output helpers ----

fn rat_json(r: Rational) -> Value {
    if r.is_integer() {
        json!(r.to_integer())
    } else {
        json!(format!("{}/{}", r.numer(), r.denom()))
    }
}

fn valu_json(v: Valu) -> Value {
    match v {
        Valu::Finite(r) => rat_json(r),
        Valu::Infinity => json!("inf"),
    }
}

/// A radius `|t|^v` is printed as `v`; radius 0 as `"inf"`, radius ∞ as `"-inf"`.
fn radius_json(r: Radius) -> Value {
    match r {
        Radius::Zero => json!("inf"),
        Radius::Pow(v) => rat_json(v),
        Radius::Infinite => json!("-inf"),
    }
}

fn elem_str(x: &LaurentElem, o: &Options) -> String {
    match o.prec {
        Some(cap) => x.truncate(cap * x.params().e() as i64).to_string(),
        None => x.to_string(),
    }
}

fn field_json(k: &FieldParams) -> Value {
    json!({"p": k.p(), "f": k.f(), "e": k.e(), "modulus": k.residue_field().modulus(), "literal_grammar": GRAMMAR_VERSION})
}

fn tag_json(t: &Tag) -> Value {
    match t {
        Tag::Epsilon => json!("epsilon"),
        Tag::Lambda => json!("lambda"),
        Tag::Diff(j) => json!({"diff": j}),
        Tag::Quotient(j) => json!({"quotient": j}),
        Tag::Midpoint(j) => json!({"midpoint": j}),
        Tag::Gap(j, k) => json!({"gap": [j, k]}),
    }
}

fn verdict_json(bd: &BranchData) -> Value {
    let v = evaluate(bd);
    let margins: Vec<Vec<Value>> = v
        .margins
        .iter()
        .map(|row| row.iter().map(|m| m.map_or(Value::Null, rat_json)).collect())
        .collect();
    let witness = v.witness.map(|(i, j)| json!({"pair": [i, j], "margin": rat_json(bd.margin(i, j))}));
    json!({"is_mumford": v.is_mumford, "margins": margins, "witness": witness})
}

// ---- commands ----

fn cmd_check(v: &Value, o: &Options) -> Result<(i32, String), CliError> {
    let bd = branch_data(v, o)?;
    let verdict = is_mumford(&bd)?;
    let mut out = verdict_json(&bd);
    out["field"] = field_json(bd.params());
    out["genus"] = json!(genus(bd.p(), bd.r()));
    Ok((if verdict.is_mumford { 0 } else { 1 }, pretty(&out)))
}

const MIDPOINT_NOTE: &str = "thresholds include the midpoint exponents (val lambda_i + 2 val(a_i - a_j) - val lambda_j)/2";

fn suite_json(bd: &BranchData, s: &CoveringSuite, o: &Options, detail: bool) -> Value {
    let rows: Vec<Value> = s
        .table
        .rows
        .iter()
        .map(|row| {
            Value::Array(
                row.iter()
                    .map(|e| json!({"exp": rat_json(e.exp), "tags": e.tags.iter().map(tag_json).collect::<Vec<_>>()}))
                    .collect(),
            )
        })
        .collect();
    let pieces: Vec<Value> = s
        .pieces
        .iter()
        .map(|pc| {
            json!({
                "index": pc.index,
                "center": pc.center_index,
                "outer": radius_json(pc.outer),
                "holes": pc.holes.iter().map(|h| json!({"branch": h.index, "radius": radius_json(h.radius)})).collect::<Vec<_>>(),
                "bounds": pc.bounds.iter().map(|(lo, hi)| json!([radius_json(*lo), radius_json(*hi)])).collect::<Vec<_>>(),
            })
        })
        .collect();
    let cert: Vec<Value> = s
        .certificate
        .branches
        .iter()
        .map(|b| {
            Value::Array(b.iter().map(|(lo, hi, k)| json!({"from": radius_json(*lo), "to": radius_json(*hi), "piece": k})).collect())
        })
        .collect();
    let mut out = json!({
        "field": field_json(bd.params()),
        "notes": [MIDPOINT_NOTE],
        "ramification": s.table.ramification,
        "thresholds": rows,
        "pieces": pieces,
        "covering": true,
        "certificate": cert,
        "normal_form_failures": s.normal_form_failures.iter().map(|(k, m)| json!({"piece": k, "message": m})).collect::<Vec<_>>(),
        "all_pass": s.all_pass(),
    });
    let reports: Vec<Value> = s
        .reports
        .iter()
        .map(|r| {
            let mut m = Map::new();
            m.insert("shape".into(), json!(r.shape.name()));
            m.insert("passes".into(), json!(r.passes_condition));
            if detail {
                m.insert("lambda_set".into(), json!(r.lambda_set));
                m.insert("minimizer".into(), json!(r.m));
                m.insert("case".into(), json!(format!("{:?}", r.case)));
                m.insert("dists".into(), Value::Array(r.dists.iter().map(|d| radius_json(*d)).collect()));
                m.insert("f_small".into(), json!(r.f_small));
                m.insert("b1".into(), json!(r.b1p.map(|b| format!("{:?}", b))));
                m.insert("b2".into(), json!(r.b2p.map(|b| format!("{:?}", b))));
                m.insert("shift".into(), json!(r.cp.as_ref().map(|c| elem_str(c, o))));
                m.insert("shift_extension".into(), json!(r.shift_extension.map(|(e, f)| json!({"e": e, "f": f}))));
                m.insert("model".into(), json!({"a": r.model.a, "b": r.model.b}));
            }
            Value::Object(m)
        })
        .collect();
    out["reductions"] = Value::Array(reports);
    out
}

/// `Err` carries a negative verdict already rendered as a report.
fn covering_or_verdict(bd: &BranchData) -> Result<Result<CoveringSuite, Value>, CliError> {
    match covering::run_suite(bd) {
        Ok(s) => Ok(Ok(s)),
        Err(CoveringError::CriterionViolated(i, j)) => Ok(Err(json!({
            "covering": false,
            "criterion": verdict_json(bd),
            "reason": format!("criterion fails at pair ({}, {})", i, j),
        }))),
        Err(CoveringError::NotCovering { tuple }) => Ok(Err(json!({
            "covering": false,
            "reason": "point not covered",
            "uncovered": tuple.into_iter().map(valu_json).collect::<Vec<_>>(),
        }))),
        Err(CoveringError::MultipleMinimizers(i, j)) => Ok(Err(json!({
            "covering": true,
            "all_pass": false,
            "reason": format!("branch points {} and {} both minimize the distance ratio on a piece", i, j),
        }))),
        Err(e) => Err(e.into()),
    }
}

fn cmd_cover(v: &Value, o: &Options, detail: bool) -> Result<(i32, String), CliError> {
    let bd = branch_data(v, o)?;
    match covering_or_verdict(&bd)? {
        Ok(s) => {
            let code = if s.all_pass() { 0 } else { 1 };
            if o.format == Format::Dot {
                return Ok((code, covering::cover_dot(&s.pieces, &bd)));
            }
            Ok((code, pretty(&suite_json(&bd, &s, o, detail))))
        }
        Err(mut report) => {
            report["field"] = field_json(bd.params());
            Ok((1, pretty(&report)))
        }
    }
}

fn theta_config(v: &Value, o: &Options) -> Result<(ThetaConfig, bool), CliError> {
    let p = v.get("p").and_then(Value::as_u64).map(|p| p as u32).or(o.p);
    // u = ω·P₂ needs a residue outside {0, 1}
    let default_f = if p == Some(2) { 2 } else { 1 };
    let k = field_of(v, o, default_f)?;
    let p2 = match v.get("p2") {
        Some(x) => literal_from_json(&k, x)?,
        None => LaurentElem::one(&k),
    };
    let eta = elem(&k, v, "eta")?;
    let u = v.get("u").map(|x| literal_from_json(&k, x)).transpose()?;
    let words = match (v.get("words"), o.words) {
        (Some(x), flag) => {
            let w = x.as_u64().ok_or_else(|| CliError::Schema("'words' must be a non-negative integer".into()))? as usize;
            if flag.is_some_and(|f| f != w) {
                return Err(CliError::Schema("--words disagrees with input".into()));
            }
            w
        }
        (None, flag) => flag.unwrap_or(DEFAULT_WORDS),
    };
    Ok(ThetaConfig::from_pair(&p2, &eta, u.as_ref(), words)?)
}

fn theta_json(cfg: &ThetaConfig, normalized: bool, rec: &LambdaRecovery, o: &Options) -> Value {
    let mut notes = vec![json!("expansions at P_i run over words closed under left multiplication by powers of s_i")];
    if normalized {
        notes.push(json!("input pair conjugated by an element commuting with s_1 to reach |eta| < |P_2|; eta unchanged"));
    }
    json!({
        "field": field_json(cfg.params()),
        "notes": notes,
        "config": {
            "p2": elem_str(&cfg.p2(), o),
            "eta": cfg.eta().map(|e| elem_str(&e, o)).unwrap_or_default(),
            "u": elem_str(&cfg.u, o),
            "words": cfg.cutoff,
            "normalized": normalized,
        },
        "alpha": elem_str(&rec.alpha, o),
        "lambda1": elem_str(&rec.lambda1, o),
        "lambda2": elem_str(&rec.lambda2, o),
        "valuations": [valu_json(rec.lambda1.valuation()), valu_json(rec.lambda2.valuation())],
        "bounds": [valu_json(rec.bounds.0), valu_json(rec.bounds.1)],
        "bounds_hold": rec.bounds_hold(),
        "stability": rec.stability.map(|(a, b)| json!([valu_json(a), valu_json(b)])),
    })
}

fn cmd_theta(v: &Value, o: &Options, chain: bool) -> Result<(i32, String), CliError> {
    let (cfg, normalized) = theta_config(v, o)?;
    let rec = recover_lambda(&cfg)?;
    let mut out = theta_json(&cfg, normalized, &rec, o);
    let mut ok = rec.bounds_hold();
    if chain {
        let k = cfg.params();
        let bd = BranchData::new(vec![LaurentElem::zero(k), LaurentElem::one(k)], vec![rec.lambda1.clone(), rec.lambda2.clone()])?;
        let verdict = evaluate(&bd);
        ok &= verdict.is_mumford;
        out["criterion"] = verdict_json(&bd);
        out["genus"] = json!(genus(bd.p(), bd.r()));
        match covering_or_verdict(&bd)? {
            Ok(s) => {
                ok &= s.all_pass();
                let mut cov = suite_json(&bd, &s, o, false);
                if let Value::Object(m) = &mut cov {
                    m.remove("field");
                }
                out["covering"] = cov;
            }
            Err(report) => {
                ok = false;
                out["covering"] = report;
            }
        }
    }
    Ok((if ok { 0 } else { 1 }, pretty(&out)))
}

fn vertex(k: &FieldParams, v: &Value, key: &str) -> Result<TreeVertex, CliError> {
    let x = v.get(key).ok_or_else(|| CliError::Schema(format!("missing '{}'", key)))?;
    let level = x
        .get("level")
        .and_then(Value::as_i64)
        .ok_or_else(|| CliError::Schema(format!("'{}.level' must be an integer", key)))?;
    Ok(TreeVertex::new(&elem(k, x, "center")?, level)?)
}

fn cmd_tree_dist(v: &Value, o: &Options) -> Result<(i32, String), CliError> {
    let k = field_of(v, o, 1)?;
    let a = vertex(&k, v, "u")?;
    let b = vertex(&k, v, "v")?;
    let path: Vec<String> = bt_tree::path(&a, &b).iter().map(TreeVertex::label).collect();
    let out = json!({
        "field": field_json(&k),
        "distance": bt_tree::distance(&a, &b),
        "lattice_distance": bt_tree::lattice_distance(&a, &b),
        "path": path,
    });
    Ok((0, pretty(&out)))
}

fn generator(k: &FieldParams, v: &Value, key: &str) -> Result<Moebius, CliError> {
    let g = v.get(key).ok_or_else(|| CliError::Schema(format!("missing '{}'", key)))?;
    if let Some(m) = g.get("matrix") {
        let m = m
            .as_array()
            .filter(|m| m.len() == 4)
            .ok_or_else(|| CliError::Schema(format!("'{}.matrix' must list four entries", key)))?;
        let e = m.iter().map(|x| literal_from_json(k, x)).collect::<Result<Vec<_>, _>>()?;
        let [a, b, c, d]: [LaurentElem; 4] = e.try_into().expect("four entries");
        return Ok(ParabolicGen::from_matrix(Moebius::new(a, b, c, d)?)?.matrix);
    }
    let pt = point(k, g.get("point").ok_or_else(|| CliError::Schema(format!("missing '{}.point'", key)))?)?;
    Ok(make_parabolic(&pt, &elem(k, g, "eta")?)?.matrix)
}

fn cmd_tree_mirror(v: &Value, o: &Options) -> Result<(i32, String), CliError> {
    let k = field_of(v, o, 1)?;
    let g1 = generator(&k, v, "g1")?;
    let g2 = generator(&k, v, "g2")?;
    let depth = o.radius.unwrap_or(DEFAULT_RADIUS);
    let scan = scan_mirrors(&g1, &g2, depth)?;
    if o.format == Format::Dot {
        return Ok((0, scan.to_dot()));
    }
    let m = mirror_distance(&g1, &g2)?;
    let out = json!({
        "field": field_json(&k),
        "d": m.d,
        "eta": elem_str(&m.eta, o),
        "xi1": m.xi1.label(),
        "xi2": m.xi2.label(),
        "scan": {
            "depth": depth,
            "convex": scan.convex(),
            "d": scan.closest().map(|(d, _, _)| d),
        },
    });
    Ok((0, pretty(&out)))
}

fn cmd_tree_hull(v: &Value, o: &Options) -> Result<(i32, String), CliError> {
    let k = field_of(v, o, 1)?;
    let pts = v
        .get("points")
        .and_then(Value::as_array)
        .ok_or_else(|| CliError::Schema("'points' must be an array".into()))?
        .iter()
        .map(|x| point(&k, x))
        .collect::<Result<Vec<_>, _>>()?;
    let hull = hull_tree(&pts)?;
    if o.format == Format::Dot {
        return Ok((0, hull.to_dot()));
    }
    let out = json!({
        "field": field_json(&k),
        "nodes": hull.nodes.iter().map(TreeVertex::label).collect::<Vec<_>>(),
        "edges": hull.edges.iter().map(|(a, b, l)| json!([a, b, l])).collect::<Vec<_>>(),
        "base": hull.base,
    });
    Ok((0, pretty(&out)))
}
