//! `key = value` run configuration with per-subcommand schemas.

use std::collections::BTreeMap;
use std::fmt;

use crate::error::ConfigError;
use crate::linalg::c64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, clap::ValueEnum)]
pub enum Subcommand {
    Takagi,
    Antilinear,
    DecayBound,
    KernelScan,
    KpFig1,
    Resonance,
    ResolventMap,
}

impl Subcommand {
    pub const ALL: [Subcommand; 7] = [
        Subcommand::Takagi,
        Subcommand::Antilinear,
        Subcommand::DecayBound,
        Subcommand::KernelScan,
        Subcommand::KpFig1,
        Subcommand::Resonance,
        Subcommand::ResolventMap,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Subcommand::Takagi => "takagi",
            Subcommand::Antilinear => "antilinear",
            Subcommand::DecayBound => "decay-bound",
            Subcommand::KernelScan => "kernel-scan",
            Subcommand::KpFig1 => "kp-fig1",
            Subcommand::Resonance => "resonance",
            Subcommand::ResolventMap => "resolvent-map",
        }
    }

    pub fn from_name(s: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|c| c.name() == s)
    }
}

impl fmt::Display for Subcommand {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, clap::ValueEnum)]
pub enum Format {
    #[default]
    Csv,
    Json,
}

impl Format {
    pub fn name(self) -> &'static str {
        match self {
            Format::Csv => "csv",
            Format::Json => "json",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum Kind {
    Float,
    Int,
    Bool,
    Complex,
    FloatList,
    Text,
}

impl Kind {
    fn describe(self) -> &'static str {
        match self {
            Kind::Float => "a number",
            Kind::Int => "an integer",
            Kind::Bool => "true or false",
            Kind::Complex => "a complex number such as 4.07-0.2i",
            Kind::FloatList => "a comma-separated list of numbers",
            Kind::Text => "text",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Value {
    Float(f64),
    Int(i64),
    Bool(bool),
    Complex(c64),
    FloatList(Vec<f64>),
    Text(String),
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Float(x) => write!(f, "{x:?}"),
            Value::Int(x) => write!(f, "{x}"),
            Value::Bool(x) => write!(f, "{x}"),
            Value::Complex(z) => write!(f, "{:?}, {:?}", z.re, z.im),
            Value::FloatList(v) => {
                let parts: Vec<String> = v.iter().map(|x| format!("{x:?}")).collect();
                write!(f, "{}", parts.join(", "))
            }
            Value::Text(s) => write!(f, "{s}"),
        }
    }
}

#[derive(Debug, Clone, Copy)]
enum Check {
    Any,
    /// `0 <= x < 1`.
    HalfOpenUnit,
    Positive,
    NonNegative,
    AtLeast(i64),
    /// Open interval.
    Between(f64, f64),
    OneOf(&'static [&'static str]),
}

struct Param {
    key: &'static str,
    kind: Kind,
    default: Option<&'static str>,
    check: Check,
}

const fn p(key: &'static str, kind: Kind, default: Option<&'static str>, check: Check) -> Param {
    Param { key, kind, default, check }
}

fn schema(cmd: Subcommand) -> Vec<Param> {
    use Check::*;
    use Kind::*;
    match cmd {
        Subcommand::Takagi => vec![
            p("matrix", Text, None, Any),
            p("random_n", Int, None, AtLeast(1)),
            p("seed", Int, Some("1"), NonNegative),
        ],
        Subcommand::Antilinear => vec![
            p("matrix", Text, None, Any),
            p("random_n", Int, None, AtLeast(1)),
            p("seed", Int, Some("1"), NonNegative),
            p("conjugation", Text, None, Any),
            p("shift", Complex, Some("0, 0"), Any),
        ],
        Subcommand::DecayBound => vec![
            p("e_minus", Float, Some("1.0"), Positive),
            p("e_plus", Float, Some("2.0"), Positive),
            p("energy", Float, None, Positive),
            p("q", Float, None, NonNegative),
            p("q_fraction", Float, Some("0.5"), Between(0.0, 1.0)),
            p("points", Int, Some("101"), AtLeast(1)),
            p("eps", Float, Some("0.5"), Positive),
            p("d", Int, Some("1"), AtLeast(1)),
        ],
        Subcommand::KernelScan => vec![
            p("v0", Float, Some("3.0"), Positive),
            p("cells", Int, Some("40"), AtLeast(2)),
            p("n", Int, Some("2000"), AtLeast(3)),
            p("potential", Text, None, Any),
            p("length", Float, None, Positive),
            p("band_count", Int, None, AtLeast(1)),
            p("energy", Float, None, Any),
            p("eps", Float, Some("0.25"), Positive),
            p("q_fraction", Float, Some("0.9"), Between(0.0, 1.0)),
            p("spacing", Float, Some("0.5"), Positive),
            p("margin", Float, Some("1.0"), Positive),
        ],
        Subcommand::KpFig1 => vec![
            p("v0_min", Float, Some("0.5"), Positive),
            p("v0_max", Float, Some("30.0"), Positive),
            p("points", Int, Some("20"), AtLeast(1)),
            p("cross_check", Bool, Some("false"), Any),
            p("points_per_cell", Int, Some("20"), AtLeast(4)),
        ],
        Subcommand::Resonance => vec![
            p("alpha", Float, Some("7.5"), Positive),
            p("length", Float, Some("40.0"), Positive),
            p("n", Int, Some("1500"), AtLeast(3)),
            p("theta_im", Float, Some("0.3"), Between(0.0, std::f64::consts::FRAC_PI_2)),
            p("dtheta_im", Float, Some("0.02"), Positive),
            p("perturbation", Text, Some("same"), OneOf(&["same", "gaussian"])),
            p("gammas", FloatList, Some("0.0, 0.01, 0.02, 0.05"), Any),
            p("z_probe", Complex, None, Any),
            p("a", Float, None, HalfOpenUnit),
            p("b", Float, None, NonNegative),
            p("re_window", FloatList, Some("0.0, 6.0"), Any),
            p("im_window", FloatList, Some("-0.5, 0.0"), Any),
        ],
        Subcommand::ResolventMap => vec![
            p("alpha", Float, Some("7.5"), Positive),
            p("length", Float, Some("40.0"), Positive),
            p("n", Int, Some("600"), AtLeast(3)),
            p("theta_im", Float, Some("0.3"), Between(0.0, std::f64::consts::FRAC_PI_2)),
            p("gamma", Float, Some("0.0"), Any),
            p("re_min", Float, Some("3.5"), Any),
            p("re_max", Float, Some("4.5"), Any),
            p("im_min", Float, Some("-0.5"), Any),
            p("im_max", Float, Some("0.1"), Any),
            p("nre", Int, Some("21"), AtLeast(1)),
            p("nim", Int, Some("21"), AtLeast(1)),
        ],
    }
}

/// Validated configuration: every schema key with a value or default is present.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub subcommand: Subcommand,
    pub format: Format,
    values: BTreeMap<String, Value>,
}

impl RunConfig {
    pub fn get(&self, key: &str) -> Option<&Value> {
        self.values.get(key)
    }

    pub fn float(&self, key: &str) -> Option<f64> {
        match self.values.get(key)? {
            Value::Float(x) => Some(*x),
            Value::Int(x) => Some(*x as f64),
            _ => None,
        }
    }

    pub fn int(&self, key: &str) -> Option<i64> {
        match self.values.get(key)? {
            Value::Int(x) => Some(*x),
            _ => None,
        }
    }

    pub fn usize(&self, key: &str) -> Option<usize> {
        self.int(key).map(|x| x as usize)
    }

    pub fn bool(&self, key: &str) -> Option<bool> {
        match self.values.get(key)? {
            Value::Bool(x) => Some(*x),
            _ => None,
        }
    }

    pub fn complex(&self, key: &str) -> Option<c64> {
        match self.values.get(key)? {
            Value::Complex(z) => Some(*z),
            _ => None,
        }
    }

    pub fn list(&self, key: &str) -> Option<&[f64]> {
        match self.values.get(key)? {
            Value::FloatList(v) => Some(v),
            _ => None,
        }
    }

    pub fn text(&self, key: &str) -> Option<&str> {
        match self.values.get(key)? {
            Value::Text(s) => Some(s),
            _ => None,
        }
    }

    /// Sets a value through the same parsing and validation as a config line.
    pub fn set(&mut self, key: &str, raw: &str) -> Result<(), ConfigError> {
        if key == "format" {
            self.format = parse_format(0, raw)?;
            return Ok(());
        }
        let specs = schema(self.subcommand);
        let spec = specs
            .iter()
            .find(|s| s.key == key)
            .ok_or_else(|| ConfigError::UnknownKey { line: 0, key: key.to_string() })?;
        let v = parse_value(0, spec, raw)?;
        check(spec, &v)?;
        self.values.insert(key.to_string(), v);
        Ok(())
    }

    pub fn entries(&self) -> impl Iterator<Item = (&String, &Value)> {
        self.values.iter()
    }
}

fn parse_format(line: usize, raw: &str) -> Result<Format, ConfigError> {
    match raw {
        "csv" => Ok(Format::Csv),
        "json" => Ok(Format::Json),
        _ => Err(ConfigError::TypeMismatch {
            line,
            key: "format".into(),
            expected: "csv or json".into(),
            value: raw.into(),
        }),
    }
}

fn parse_float(s: &str) -> Option<f64> {
    let x: f64 = s.trim().parse().ok()?;
    x.is_finite().then_some(x)
}

/// Accepts `re, im`, `a+bi`, `a-bi`, `bi` or a plain real.
pub fn parse_complex(s: &str) -> Option<c64> {
    let s = s.trim();
    if let Some((a, b)) = s.split_once(',') {
        return Some(c64::new(parse_float(a)?, parse_float(b)?));
    }
    let body = match s.strip_suffix('i').or_else(|| s.strip_suffix('j')) {
        Some(b) => b,
        None => return parse_float(s).map(|x| c64::new(x, 0.0)),
    };
    let bytes = body.as_bytes();
    let mut split = None;
    for i in (1..bytes.len()).rev() {
        if (bytes[i] == b'+' || bytes[i] == b'-') && !matches!(bytes[i - 1], b'e' | b'E') {
            split = Some(i);
            break;
        }
    }
    let imag = |t: &str| -> Option<f64> {
        match t.trim() {
            "" | "+" => Some(1.0),
            "-" => Some(-1.0),
            t => parse_float(t),
        }
    };
    match split {
        Some(i) => Some(c64::new(parse_float(&body[..i])?, imag(&body[i..])?)),
        None => Some(c64::new(0.0, imag(body)?)),
    }
}

fn parse_value(line: usize, spec: &Param, raw: &str) -> Result<Value, ConfigError> {
    let mismatch = || ConfigError::TypeMismatch {
        line,
        key: spec.key.into(),
        expected: spec.kind.describe().into(),
        value: raw.into(),
    };
    let v = match spec.kind {
        Kind::Float => Value::Float(parse_float(raw).ok_or_else(mismatch)?),
        Kind::Int => Value::Int(raw.trim().parse().map_err(|_| mismatch())?),
        Kind::Bool => Value::Bool(match raw.trim() {
            "true" | "yes" | "1" => true,
            "false" | "no" | "0" => false,
            _ => return Err(mismatch()),
        }),
        Kind::Complex => Value::Complex(parse_complex(raw).ok_or_else(mismatch)?),
        Kind::FloatList => {
            let t = raw.trim();
            let items: Option<Vec<f64>> =
                if t.is_empty() { Some(vec![]) } else { t.split(',').map(parse_float).collect() };
            Value::FloatList(items.ok_or_else(mismatch)?)
        }
        Kind::Text => Value::Text(raw.trim().to_string()),
    };
    Ok(v)
}

fn check(spec: &Param, v: &Value) -> Result<(), ConfigError> {
    let violated = |constraint: String| ConfigError::Precondition { key: spec.key.into(), constraint };
    let x = match v {
        Value::Float(x) => Some(*x),
        Value::Int(x) => Some(*x as f64),
        _ => None,
    };
    match (spec.check, x) {
        (Check::Positive, Some(x)) if !(x > 0.0) => Err(violated(format!("{} > 0", spec.key))),
        (Check::NonNegative, Some(x)) if !(x >= 0.0) => Err(violated(format!("{} >= 0", spec.key))),
        (Check::AtLeast(m), Some(x)) if x < m as f64 => Err(violated(format!("{} >= {m}", spec.key))),
        (Check::Between(lo, hi), Some(x)) if !(x > lo && x < hi) => {
            Err(violated(format!("{lo} < {} < {hi}", spec.key)))
        }
        (Check::HalfOpenUnit, Some(x)) if !(0.0..1.0).contains(&x) => Err(violated(format!("0 <= {} < 1", spec.key))),
        (Check::OneOf(opts), _) => match v {
            Value::Text(s) if !opts.contains(&s.as_str()) => {
                Err(violated(format!("{} one of {}", spec.key, opts.join(", "))))
            }
            _ => Ok(()),
        },
        _ => Ok(()),
    }
}

/// Parses `key = value` lines (`#` starts a comment), applies defaults and
/// validates every value against the subcommand's preconditions.
pub fn parse_config(subcommand: Subcommand, text: &str) -> Result<RunConfig, ConfigError> {
    let specs = schema(subcommand);
    let mut values = BTreeMap::new();
    let mut format = Format::Csv;
    let mut seen = std::collections::BTreeSet::new();
    for (idx, raw_line) in text.lines().enumerate() {
        let line = idx + 1;
        let content = raw_line.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let (key, raw) = content
            .split_once('=')
            .ok_or_else(|| ConfigError::Syntax { line, message: format!("expected `key = value`, got `{content}`") })?;
        let key = key.trim();
        if !seen.insert(key.to_string()) {
            return Err(ConfigError::Syntax { line, message: format!("duplicate key `{key}`") });
        }
        if key == "format" {
            format = parse_format(line, raw.trim())?;
            continue;
        }
        let spec = specs
            .iter()
            .find(|s| s.key == key)
            .ok_or_else(|| ConfigError::UnknownKey { line, key: key.to_string() })?;
        let v = parse_value(line, spec, raw)?;
        check(spec, &v)?;
        values.insert(key.to_string(), v);
    }
    for spec in &specs {
        if !values.contains_key(spec.key) {
            if let Some(d) = spec.default {
                values.insert(spec.key.to_string(), parse_value(0, spec, d)?);
            }
        }
    }
    let cfg = RunConfig { subcommand, format, values };
    cross_check(&cfg)?;
    Ok(cfg)
}

// Constraints that involve more than one key.
fn cross_check(cfg: &RunConfig) -> Result<(), ConfigError> {
    let pre =
        |key: &str, constraint: &str| ConfigError::Precondition { key: key.into(), constraint: constraint.into() };
    match cfg.subcommand {
        Subcommand::Takagi | Subcommand::Antilinear => {
            if cfg.get("matrix").is_none() && cfg.get("random_n").is_none() {
                return Err(ConfigError::MissingRequired("matrix".into()));
            }
        }
        Subcommand::DecayBound => {
            let (em, ep) = (cfg.float("e_minus").unwrap(), cfg.float("e_plus").unwrap());
            if !(ep > em) {
                return Err(pre("e_plus", "e_plus > e_minus"));
            }
            if let Some(e) = cfg.float("energy") {
                if !(e > em && e < ep) {
                    return Err(pre("energy", "e_minus < energy < e_plus"));
                }
            }
        }
        Subcommand::KernelScan => {
            if cfg.get("potential").is_some() && cfg.get("length").is_none() {
                return Err(ConfigError::MissingRequired("length".into()));
            }
        }
        Subcommand::KpFig1 => {
            if !(cfg.float("v0_max").unwrap() >= cfg.float("v0_min").unwrap()) {
                return Err(pre("v0_max", "v0_max >= v0_min"));
            }
        }
        Subcommand::Resonance => {
            for key in ["re_window", "im_window"] {
                let w = cfg.list(key).unwrap();
                if w.len() != 2 || !(w[0] < w[1]) {
                    return Err(pre(key, &format!("{key} = lo, hi with lo < hi")));
                }
            }
            if cfg.list("gammas").unwrap().is_empty() {
                return Err(pre("gammas", "at least one coupling"));
            }
        }
        Subcommand::ResolventMap => {
            if !(cfg.float("re_max").unwrap() >= cfg.float("re_min").unwrap()) {
                return Err(pre("re_max", "re_max >= re_min"));
            }
            if !(cfg.float("im_max").unwrap() >= cfg.float("im_min").unwrap()) {
                return Err(pre("im_max", "im_max >= im_min"));
            }
        }
    }
    Ok(())
}

/// Writes every key (defaults included) so that `parse_config` reads back an
/// identical configuration.
pub fn serialize_config(cfg: &RunConfig) -> String {
    let mut out = format!("format = {}\n", cfg.format.name());
    for (k, v) in &cfg.values {
        out.push_str(&format!("{k} = {v}\n"));
    }
    out
}
