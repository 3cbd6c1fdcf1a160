//! Batch front end: JSON run configurations, command dispatch and export.

use std::fmt::Write as _;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde_json::{json, Map, Value};

use crate::conjugacy::{verify_conjugacy, Conjugacy};
use crate::dynamics::{detect_jumps, omega_limit_sample, orbit, sample_word, synchronization_gap, write_points_csv, OmegaSampling};
use crate::error::{Error, Result};
use crate::format::{csv_num, to_json_string};
use crate::measure::{empirical_stationary, iterate_to_stationary, lebesgue_check, IterationMode, PiecewiseDensity};
use crate::resonant::{
    box_dimension_estimate, build_intervals, cantor_approx, dimension_report, pressure, pressure_t0,
    res_full_analysis, solve_pressure_zero, support_dimension, symbolic_weights, write_intervals_csv,
};
use crate::system::{int_field, num_field, reject_unknown, Endpoint, ResonantSystem, SystemSpec};

pub const DEFAULT_TOL: f64 = 1e-10;

/// Subcommands with the preconditions they check.
pub const COMMANDS: &[(&str, &str)] = &[
    ("classify", "any system; reports disjoint, border or overlapping type"),
    ("lyapunov", "needs p_minus in (0, 1)"),
    ("resonance", "any system; searches convergents up to max_denominator"),
    ("simulate", "x0 (and y0) in [0, 1]; with n_orbits samples the limit set of a disjoint system"),
    ("jumps", "disjoint-type system"),
    ("stationary", "method transfer|cesaro|orbit; warns unless both Lyapunov exponents are positive"),
    ("lebesgue", "needs p_minus; warns unless both Lyapunov exponents are positive"),
    ("support", "resonant system with rho <= eta; action build|approx|boxdim"),
    ("weights", "resonant system with l = 1 and p_minus strictly inside the positivity window"),
    ("dimension", "resonant system"),
    ("pressure", "resonant system; t above t0, zero needs rho <= eta"),
    ("conjugacy", "two resonant systems (system, target) with equal k, l and rho < eta"),
    ("resfull", "no system needed"),
];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
}

impl Format {
    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            other => Err(Error::Config(format!("format must be csv or json, got `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    Classify,
    Lyapunov,
    Resonance,
    Simulate,
    Jumps,
    Stationary,
    Lebesgue,
    Support,
    Weights,
    Dimension,
    Pressure,
    Conjugacy,
    ResFull,
}

impl Command {
    fn parse(s: &str) -> Result<Self> {
        Ok(match s {
            "classify" => Command::Classify,
            "lyapunov" => Command::Lyapunov,
            "resonance" => Command::Resonance,
            "simulate" => Command::Simulate,
            "jumps" => Command::Jumps,
            "stationary" => Command::Stationary,
            "lebesgue" => Command::Lebesgue,
            "support" => Command::Support,
            "weights" => Command::Weights,
            "dimension" => Command::Dimension,
            "pressure" => Command::Pressure,
            "conjugacy" => Command::Conjugacy,
            "resfull" => Command::ResFull,
            other => {
                let names: Vec<&str> = COMMANDS.iter().map(|c| c.0).collect();
                return Err(Error::Config(format!(
                    "field `command`: unknown command `{other}` (expected one of {})",
                    names.join(", ")
                )));
            }
        })
    }
}

/// Optional numeric and string settings; `None` means the command default.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Options {
    pub iterations: Option<usize>,
    pub samples: Option<usize>,
    pub bins: Option<usize>,
    pub burn_in: Option<usize>,
    pub depth: Option<u32>,
    pub j_range: Option<u32>,
    pub suffix_depth: Option<u32>,
    pub x0: Option<f64>,
    pub y0: Option<f64>,
    pub length: Option<usize>,
    pub method: Option<String>,
    pub action: Option<String>,
    pub endpoint: Option<u32>,
    pub max_denominator: Option<u64>,
    pub t: Option<f64>,
    pub n_orbits: Option<usize>,
    pub min_jumps: Option<usize>,
    pub tail: Option<usize>,
    pub p_minus: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub system: Option<SystemSpec>,
    pub target: Option<SystemSpec>,
    pub command: Command,
    pub seed: u64,
    pub tol: f64,
    pub threads: Option<usize>,
    pub output: Option<PathBuf>,
    pub format: Format,
    pub options: Options,
}

const TOP_KEYS: &[&str] = &[
    "system", "target", "command", "seed", "tol", "threads", "output", "format", "iterations",
    "samples", "bins", "burn_in", "depth", "j_range", "suffix_depth", "x0", "y0", "length",
    "method", "action", "endpoint", "max_denominator", "t", "n_orbits", "min_jumps", "tail",
    "p_minus",
];

fn opt_f64(obj: &Map<String, Value>, key: &str) -> Result<Option<f64>> {
    obj.get(key).map(|_| num_field(obj, key, "config")).transpose()
}

fn opt_u64(obj: &Map<String, Value>, key: &str) -> Result<Option<u64>> {
    obj.get(key)
        .map(|v| {
            v.as_u64()
                .ok_or_else(|| Error::Config(format!("field `{key}` must be a non-negative integer")))
        })
        .transpose()
}

fn opt_usize(obj: &Map<String, Value>, key: &str) -> Result<Option<usize>> {
    Ok(opt_u64(obj, key)?.map(|v| v as usize))
}

fn opt_u32(obj: &Map<String, Value>, key: &str) -> Result<Option<u32>> {
    obj.get(key).map(|_| int_field(obj, key, "config")).transpose()
}

fn opt_str(obj: &Map<String, Value>, key: &str) -> Result<Option<String>> {
    obj.get(key)
        .map(|v| {
            v.as_str()
                .map(str::to_owned)
                .ok_or_else(|| Error::Config(format!("field `{key}` must be a string")))
        })
        .transpose()
}

fn system_at(obj: &Map<String, Value>, key: &str) -> Result<Option<SystemSpec>> {
    obj.get(key)
        .map(|v| {
            SystemSpec::from_json(v).map_err(|e| match e {
                Error::Config(m) => Error::Config(format!("field `{key}`: {m}")),
                other => Error::Config(format!("field `{key}`: {other}")),
            })
        })
        .transpose()
}

/// Parses and validates a run configuration.
pub fn parse_config(text: &str) -> Result<RunConfig> {
    let v: Value = serde_json::from_str(text).map_err(|e| {
        Error::Config(format!("invalid JSON at line {}, column {}: {e}", e.line(), e.column()))
    })?;
    let obj = v
        .as_object()
        .ok_or_else(|| Error::Config("config must be a JSON object".into()))?;
    reject_unknown(obj, TOP_KEYS, "config")?;
    let command = match obj.get("command") {
        None => return Err(Error::Config("missing field `command`".into())),
        Some(c) => Command::parse(
            c.as_str()
                .ok_or_else(|| Error::Config("field `command` must be a string".into()))?,
        )?,
    };
    let format = match opt_str(obj, "format")? {
        Some(s) => Format::parse(&s)?,
        None => Format::Json,
    };
    let options = Options {
        iterations: opt_usize(obj, "iterations")?,
        samples: opt_usize(obj, "samples")?,
        bins: opt_usize(obj, "bins")?,
        burn_in: opt_usize(obj, "burn_in")?,
        depth: opt_u32(obj, "depth")?,
        j_range: opt_u32(obj, "j_range")?,
        suffix_depth: opt_u32(obj, "suffix_depth")?,
        x0: opt_f64(obj, "x0")?,
        y0: opt_f64(obj, "y0")?,
        length: opt_usize(obj, "length")?,
        method: opt_str(obj, "method")?,
        action: opt_str(obj, "action")?,
        endpoint: opt_u32(obj, "endpoint")?,
        max_denominator: opt_u64(obj, "max_denominator")?,
        t: opt_f64(obj, "t")?,
        n_orbits: opt_usize(obj, "n_orbits")?,
        min_jumps: opt_usize(obj, "min_jumps")?,
        tail: opt_usize(obj, "tail")?,
        p_minus: opt_f64(obj, "p_minus")?,
    };
    let cfg = RunConfig {
        system: system_at(obj, "system")?,
        target: system_at(obj, "target")?,
        command,
        seed: opt_u64(obj, "seed")?.unwrap_or(0),
        tol: opt_f64(obj, "tol")?.unwrap_or(DEFAULT_TOL),
        threads: opt_usize(obj, "threads")?,
        output: opt_str(obj, "output")?.map(PathBuf::from),
        format,
        options,
    };
    validate(&cfg)?;
    Ok(cfg)
}

fn validate(cfg: &RunConfig) -> Result<()> {
    if !(cfg.tol > 0.0) {
        return Err(Error::Config("field `tol` must be positive".into()));
    }
    if cfg.command != Command::ResFull && cfg.system.is_none() {
        return Err(Error::Config("missing field `system`".into()));
    }
    if let Some(p) = cfg.options.p_minus {
        if !(p > 0.0 && p < 1.0) {
            return Err(Error::Config(format!("field `p_minus` must lie in (0, 1), got {p}")));
        }
    }
    for (key, v) in [("x0", cfg.options.x0), ("y0", cfg.options.y0)] {
        if let Some(x) = v {
            if !(0.0..=1.0).contains(&x) {
                return Err(Error::Config(format!("field `{key}` must lie in [0, 1], got {x}")));
            }
        }
    }
    if let Some(m) = &cfg.options.method {
        if !["transfer", "cesaro", "orbit"].contains(&m.as_str()) {
            return Err(Error::Config(format!(
                "field `method` must be transfer, cesaro or orbit, got `{m}`"
            )));
        }
    }
    if let Some(a) = &cfg.options.action {
        if !["build", "approx", "boxdim"].contains(&a.as_str()) {
            return Err(Error::Config(format!(
                "field `action` must be build, approx or boxdim, got `{a}`"
            )));
        }
    }
    if let Some(e) = cfg.options.endpoint {
        if e > 1 {
            return Err(Error::Config("field `endpoint` must be 0 or 1".into()));
        }
    }
    if cfg.command == Command::Conjugacy && cfg.target.is_none() {
        return Err(Error::Config("command `conjugacy` needs field `target`".into()));
    }
    Ok(())
}

/// What a command produced: a JSON document, and a table when the result
/// has a natural CSV form.
#[derive(Debug, Clone, PartialEq)]
pub struct Artifact {
    pub json: Value,
    pub csv: Option<String>,
}

impl Artifact {
    fn json(json: Value) -> Self {
        Artifact { json, csv: None }
    }

    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Json => {
                let mut s = to_json_string(&self.json);
                s.push('\n');
                s
            }
            Format::Csv => self.csv.clone().unwrap_or_else(|| flat_csv(&self.json)),
        }
    }
}

/// One header row of keys and one row of values; arrays join with `;`.
fn flat_csv(v: &Value) -> String {
    let cell = |v: &Value| -> String {
        match v {
            Value::Number(n) => match n.as_f64() {
                Some(x) if !n.is_i64() && !n.is_u64() => csv_num(x),
                _ => n.to_string(),
            },
            Value::String(s) => s.clone(),
            Value::Null => String::new(),
            Value::Array(a) => a
                .iter()
                .map(|x| match x {
                    Value::Number(n) if n.is_f64() => csv_num(n.as_f64().unwrap()),
                    other => other.to_string(),
                })
                .collect::<Vec<_>>()
                .join(";"),
            other => other.to_string(),
        }
    };
    match v.as_object() {
        Some(obj) => {
            let keys: Vec<&str> = obj.keys().map(String::as_str).collect();
            let vals: Vec<String> = obj.values().map(cell).collect();
            format!("{}\n{}\n", keys.join(","), vals.join(","))
        }
        None => format!("value\n{}\n", cell(v)),
    }
}

/// Result of [`run`]: the artifact plus a warning that should turn into a
/// nonzero exit after the artifact is written.
#[derive(Debug, Clone)]
pub struct RunOutput {
    pub artifact: Artifact,
    pub warning: Option<Error>,
}

fn ok(artifact: Artifact) -> Result<RunOutput> {
    Ok(RunOutput {
        artifact,
        warning: None,
    })
}

fn resonant_of(spec: &SystemSpec, cmd: &str) -> Result<ResonantSystem> {
    spec.resonant().copied().ok_or_else(|| {
        Error::Config(format!(
            "command `{cmd}` needs a resonant system {{\"rho\", \"k\", \"l\", \"p_minus\"}}"
        ))
    })
}

fn p_minus_of(cfg: &RunConfig, spec: &SystemSpec) -> Result<f64> {
    cfg.options
        .p_minus
        .or(spec.p_minus())
        .ok_or_else(|| Error::Config("this command needs `p_minus` (top level or in the system)".into()))
}

fn system_comment(spec: &SystemSpec, cfg: &RunConfig) -> String {
    let s = spec.system();
    let mut c = format!(
        "a_minus={} b_minus={} a_plus={} b_plus={}",
        s.a_minus(),
        s.b_minus(),
        s.a_plus(),
        s.b_plus()
    );
    if let Ok(p) = p_minus_of(cfg, spec) {
        let _ = write!(c, " p_minus={p}");
    }
    let _ = write!(c, " seed={}", cfg.seed);
    c
}

fn cdf_pairs(d: &PiecewiseDensity) -> Value {
    Value::Array(d.cdf_table().into_iter().map(|(x, f)| json!([x, f])).collect())
}

fn cdf_csv(d: &PiecewiseDensity) -> String {
    let mut buf = Vec::new();
    d.write_cdf_csv(&mut buf).expect("writing to memory");
    String::from_utf8(buf).expect("ASCII output")
}

/// Runs one configuration.
pub fn run(cfg: &RunConfig) -> Result<RunOutput> {
    let o = &cfg.options;
    if cfg.command == Command::ResFull {
        return ok(Artifact::json(res_full_analysis().to_json()));
    }
    let spec = cfg.system.as_ref().expect("validated");
    let sys = spec.system();
    match cfg.command {
        Command::ResFull => unreachable!(),
        Command::Classify => ok(Artifact::json(json!({
            "type": sys.classify_type().as_str(),
            "x_minus": sys.x_minus(),
            "x_plus": sys.x_plus(),
            "fm_xm": sys.fm_xm(),
            "fp_xp": sys.fp_xp(),
        }))),
        Command::Lyapunov => {
            let l = sys.lyapunov_exponents(p_minus_of(cfg, spec)?)?;
            ok(Artifact::json(json!({
                "lambda0": l.lambda0,
                "lambda1": l.lambda1,
                "both_positive": l.both_positive(),
            })))
        }
        Command::Resonance => {
            let max_den = o.max_denominator.unwrap_or(100);
            let find = |e| sys.detect_resonance(e, max_den, cfg.tol).map(|(k, l)| json!([k, l]));
            let mut m = Map::new();
            if o.endpoint != Some(1) {
                m.insert("endpoint_0".into(), find(Endpoint::Zero).unwrap_or(Value::Null));
            }
            if o.endpoint != Some(0) {
                m.insert("endpoint_1".into(), find(Endpoint::One).unwrap_or(Value::Null));
            }
            m.insert("max_denominator".into(), json!(max_den));
            m.insert("tol".into(), json!(cfg.tol));
            ok(Artifact::json(Value::Object(m)))
        }
        Command::Simulate => run_simulate(cfg, spec),
        Command::Jumps => {
            let p = p_minus_of(cfg, spec)?;
            let word = sample_word(cfg.seed, o.length.unwrap_or(1000), p)?;
            let orb = orbit(&sys, o.x0.unwrap_or(0.5), &word)?;
            let rec = detect_jumps(&sys, &orb)?;
            let csv = std::iter::once("time".to_string())
                .chain(rec.times.iter().map(|t| t.to_string()))
                .map(|l| l + "\n")
                .collect();
            ok(Artifact {
                json: json!({
                    "count": rec.times.len(),
                    "times": rec.times,
                    "central": [rec.central.0, rec.central.1],
                    "seed": cfg.seed,
                }),
                csv: Some(csv),
            })
        }
        Command::Stationary => run_stationary(cfg, spec),
        Command::Lebesgue => {
            let v = lebesgue_check(&sys, p_minus_of(cfg, spec)?)?;
            ok(Artifact::json(v.to_json()))
        }
        Command::Support => {
            let r = resonant_of(spec, "support")?;
            let j_range = o.j_range.unwrap_or(3);
            match o.action.as_deref().unwrap_or("build") {
                "build" => {
                    let ivs = build_intervals(r.rho, r.k, r.l, j_range, o.suffix_depth.unwrap_or(2))?;
                    intervals_artifact(&ivs, json!({}))
                }
                "approx" => {
                    let a = cantor_approx(r.rho, r.k, r.l, o.depth.unwrap_or(6), j_range)?;
                    intervals_artifact(
                        &a.intervals,
                        json!({
                            "depth": a.depth,
                            "j_range": a.j_range,
                            "total_length": a.total_length(),
                            "hull_length": a.hull_length(),
                            "tail_length": a.tail_length,
                        }),
                    )
                }
                _ => {
                    let depth = o.depth.unwrap_or(10);
                    let a = cantor_approx(r.rho, r.k, r.l, depth, 1)?;
                    ok(Artifact::json(json!({
                        "depth": depth,
                        "box_dimension": box_dimension_estimate(&a)?,
                        "support_dimension": support_dimension(r.rho, r.k, r.l)?.dim,
                    })))
                }
            }
        }
        Command::Weights => {
            let r = resonant_of(spec, "weights")?;
            if r.l != 1 {
                return Err(Error::InvalidRegime("symbolic weights need l = 1".into()));
            }
            ok(Artifact::json(symbolic_weights(r.k, p_minus_of(cfg, spec)?)?.to_json()))
        }
        Command::Dimension => {
            let r = resonant_of(spec, "dimension")?;
            let rep = dimension_report(&r)?;
            if rep.dim_supp.is_none() {
                support_dimension(r.rho, r.k, r.l)?;
            }
            ok(Artifact::json(rep.to_json()))
        }
        Command::Pressure => {
            let r = resonant_of(spec, "pressure")?;
            let mut m = Map::new();
            m.insert("t0".into(), json!(pressure_t0(r.rho, r.l)?));
            if let Some(t) = o.t {
                m.insert("t".into(), json!(t));
                m.insert("pressure".into(), json!(pressure(r.rho, r.k, r.l, t)?));
            }
            m.insert("zero".into(), json!(solve_pressure_zero(r.rho, r.k, r.l)?));
            ok(Artifact::json(Value::Object(m)))
        }
        Command::Conjugacy => {
            let f = resonant_of(spec, "conjugacy")?;
            let g = resonant_of(cfg.target.as_ref().expect("validated"), "conjugacy")?;
            let rep = verify_conjugacy(&f, &g, o.samples.unwrap_or(1000), cfg.tol, cfg.seed)?;
            let mut json = rep.to_json();
            if let Some(x) = o.x0 {
                json["x0"] = json!(x);
                json["h_x0"] = json!(Conjugacy::new(&f, &g)?.eval(x, cfg.tol)?.value);
            }
            ok(Artifact::json(json))
        }
    }
}

fn intervals_artifact(ivs: &[crate::resonant::AddressedInterval], mut meta: Value) -> Result<RunOutput> {
    let mut buf = Vec::new();
    write_intervals_csv(&mut buf, ivs)?;
    meta["intervals"] = Value::Array(
        ivs.iter()
            .map(|iv| json!({"code": iv.code_string(), "lo": iv.lo, "hi": iv.hi}))
            .collect(),
    );
    ok(Artifact {
        json: meta,
        csv: Some(String::from_utf8(buf).expect("ASCII output")),
    })
}

fn run_simulate(cfg: &RunConfig, spec: &SystemSpec) -> Result<RunOutput> {
    let o = &cfg.options;
    let sys = spec.system();
    let p = p_minus_of(cfg, spec)?;
    let x0 = o.x0.unwrap_or(0.5);
    let length = o.length.unwrap_or(1000);
    let comment = system_comment(spec, cfg);
    if let Some(n_orbits) = o.n_orbits {
        let opts = OmegaSampling {
            p_minus: p,
            n_orbits,
            length,
            min_jumps: o.min_jumps.unwrap_or(10),
            tail: o.tail.unwrap_or(10),
            seed: cfg.seed,
        };
        let pts = omega_limit_sample(&sys, x0, &opts)?;
        let mut buf = Vec::new();
        write_points_csv(&mut buf, &comment, &pts)?;
        return ok(Artifact {
            json: json!({"seed": cfg.seed, "points": pts}),
            csv: Some(String::from_utf8(buf).expect("ASCII output")),
        });
    }
    let word = sample_word(cfg.seed, length, p)?;
    if let Some(y0) = o.y0 {
        let orb_x = orbit(&sys, x0, &word)?;
        let orb_y = orbit(&sys, y0, &word)?;
        let gaps = synchronization_gap(&sys, x0, y0, &word)?;
        let mut csv = format!("# {comment}\nx,y,gap\n");
        for ((x, y), g) in orb_x.points.iter().zip(&orb_y.points).zip(&gaps) {
            let _ = writeln!(csv, "{},{},{}", csv_num(*x), csv_num(*y), csv_num(*g));
        }
        return ok(Artifact {
            json: json!({
                "seed": cfg.seed,
                "word": word.to_string(),
                "x": orb_x.points,
                "y": orb_y.points,
                "gap": gaps,
            }),
            csv: Some(csv),
        });
    }
    let orb = orbit(&sys, x0, &word)?;
    let mut buf = Vec::new();
    orb.write_csv(&mut buf, &comment)?;
    ok(Artifact {
        json: json!({
            "seed": cfg.seed,
            "x0": x0,
            "word": word.to_string(),
            "points": orb.points,
        }),
        csv: Some(String::from_utf8(buf).expect("ASCII output")),
    })
}

fn run_stationary(cfg: &RunConfig, spec: &SystemSpec) -> Result<RunOutput> {
    let o = &cfg.options;
    let sys = spec.system();
    let p = p_minus_of(cfg, spec)?;
    let method = o.method.as_deref().unwrap_or("transfer");
    if method == "orbit" {
        let e = empirical_stationary(
            &sys,
            p,
            o.burn_in.unwrap_or(1000),
            o.samples.unwrap_or(1_000_000),
            o.bins.unwrap_or(1000),
            cfg.seed,
        )?;
        let d = e.to_density();
        return ok(Artifact {
            json: json!({
                "method": method,
                "bins": e.bin_count,
                "masses": e.masses,
                "cdf": cdf_pairs(&d),
            }),
            csv: Some(cdf_csv(&d)),
        });
    }
    let mode = if method == "cesaro" {
        IterationMode::Cesaro
    } else {
        IterationMode::Direct
    };
    let r = iterate_to_stationary(
        &sys,
        p,
        &PiecewiseDensity::uniform(),
        o.iterations.unwrap_or(60),
        cfg.tol,
        mode,
    )?;
    let warning = (!r.converged).then_some(Error::Nonconvergence {
        last_distance: r.last_distance,
    });
    Ok(RunOutput {
        artifact: Artifact {
            json: json!({
                "method": method,
                "iterations": r.iterations,
                "converged": r.converged,
                "last_distance": r.last_distance,
                "pieces": r.density.pieces(),
                "cdf": cdf_pairs(&r.density),
            }),
            csv: Some(cdf_csv(&r.density)),
        },
        warning,
    })
}

/// Writes `text` to `path`, or to stdout when no path is given.
pub fn export(text: &str, path: Option<&Path>) -> Result<()> {
    match path {
        Some(p) => fs::write(p, text).map_err(|e| Error::Io(format!("{}: {e}", p.display()))),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes())?;
            Ok(())
        }
    }
}

/// The structured error document printed on stderr.
pub fn error_json(e: &Error) -> String {
    to_json_string(&json!({"error": e.kind(), "message": e.to_string()}))
}

/// Help text listing each subcommand with its precondition.
pub fn commands_help() -> String {
    let mut s = String::from("Commands (set \"command\" in the config):\n");
    for (name, pre) in COMMANDS {
        let _ = writeln!(s, "  {name:<11} {pre}");
    }
    s
}
