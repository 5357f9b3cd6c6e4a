//! Flat `key = value` experiment configuration.
//!
//! Lines are trimmed, `#` starts a comment, blank lines are ignored. Keys are
//! case-sensitive; unknown keys are errors. See [`ExperimentConfig::KEYS`]
//! for the schema.

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use badapprox::constructions::BKind;
use badapprox::cover::DecayFunction;
use badapprox::engine::NormConvention;
use badapprox::exponent::Method;

use crate::CliError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum Parallelism {
    #[default]
    Auto,
    Threads(usize),
}

impl fmt::Display for Parallelism {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Parallelism::Auto => f.write_str("auto"),
            Parallelism::Threads(n) => write!(f, "{n}"),
        }
    }
}

impl FromStr for Parallelism {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if s.eq_ignore_ascii_case("auto") {
            return Ok(Parallelism::Auto);
        }
        match s.parse::<usize>() {
            Ok(n) if n >= 1 => Ok(Parallelism::Threads(n)),
            _ => Err(format!("parallelism must be 'auto' or a positive integer, got '{s}'")),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum ProfileRows {
    /// Every `T ≤ 100`, then about 100 log-spaced rows per decade, plus `T_max`.
    #[default]
    Log,
    All,
}

impl fmt::Display for ProfileRows {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ProfileRows::Log => "log",
            ProfileRows::All => "all",
        })
    }
}

impl FromStr for ProfileRows {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "log" => Ok(ProfileRows::Log),
            "all" => Ok(ProfileRows::All),
            _ => Err(format!("profile_rows must be 'log' or 'all', got '{s}'")),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentConfig {
    pub subject: String,
    pub d: usize,
    pub a: usize,
    pub b: usize,
    pub c: usize,
    pub b_kind: BKind,
    pub theta_bound: f64,
    pub seed: u64,
    pub t_max: u64,
    pub b_t_max: u64,
    pub sample_count: usize,
    pub method: Method,
    /// `None` selects the estimator's default window.
    pub window: Option<usize>,
    pub slack: f64,
    pub threshold: f64,
    pub convention: NormConvention,
    pub budget: u64,
    pub output_dir: PathBuf,
    pub parallelism: Parallelism,
    pub psi: DecayFunction,
    pub phi: DecayFunction,
    pub series_t_max: usize,
    pub profile_rows: ProfileRows,
    pub lemma_psi: DecayFunction,
    pub lemma_t: Vec<f64>,
    pub shift_count: usize,
    pub lemma_scale: f64,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            subject: "golden".into(),
            d: 4,
            a: 3,
            b: 1,
            c: 2,
            b_kind: BKind::Algebraic,
            theta_bound: 1.0,
            seed: 20_240_601,
            t_max: 10_000,
            b_t_max: 100_000,
            sample_count: 50,
            method: Method::TailSlope,
            window: None,
            slack: 0.25,
            threshold: 0.9,
            convention: NormConvention::Inclusive,
            budget: badapprox::engine::DEFAULT_BUDGET,
            output_dir: PathBuf::from("out"),
            parallelism: Parallelism::Auto,
            psi: DecayFunction::power(1.0, 1.0 / 3.0),
            phi: DecayFunction::power(1.0, 2.0),
            series_t_max: 1_000_000,
            profile_rows: ProfileRows::Log,
            lemma_psi: DecayFunction::power(0.2, 1.0),
            lemma_t: vec![10.0, 100.0, 1000.0],
            shift_count: 1000,
            lemma_scale: 0.5,
        }
    }
}

fn parse<T: FromStr>(key: &str, value: &str) -> Result<T, CliError>
where
    T::Err: fmt::Display,
{
    value.parse::<T>().map_err(|e| CliError::Config(format!("{key}: {e}")))
}

/// Integers may be written as `100000`, `1e5` or `100_000`.
fn parse_count(key: &str, value: &str) -> Result<u64, CliError> {
    let cleaned = value.replace('_', "");
    if let Ok(v) = cleaned.parse::<u64>() {
        return Ok(v);
    }
    match cleaned.parse::<f64>() {
        Ok(v) if v >= 0.0 && v.fract() == 0.0 && v < 9.0e18 => Ok(v as u64),
        _ => Err(CliError::Config(format!("{key}: expected a nonnegative integer, got '{value}'"))),
    }
}

fn parse_decay(key: &str, value: &str) -> Result<DecayFunction, CliError> {
    let parts: Vec<f64> = value
        .split(',')
        .map(|p| parse::<f64>(key, p.trim()))
        .collect::<Result<_, _>>()?;
    match parts[..] {
        [rho, gamma] => Ok(DecayFunction::power(rho, gamma)),
        [rho, gamma, logpow] => Ok(DecayFunction::new(rho, gamma, logpow)),
        _ => Err(CliError::Config(format!("{key}: expected 'rho,gamma[,logpow]', got '{value}'"))),
    }
}

fn decay_text(f: &DecayFunction) -> String {
    format!("{},{},{}", f.rho, f.gamma, f.logpow)
}

impl ExperimentConfig {
    pub const KEYS: &'static [&'static str] = &[
        "subject",
        "d",
        "a",
        "b",
        "c",
        "b_kind",
        "theta_bound",
        "seed",
        "t_max",
        "b_t_max",
        "sample_count",
        "method",
        "window",
        "slack",
        "threshold",
        "convention",
        "budget",
        "output_dir",
        "parallelism",
        "psi",
        "phi",
        "series_t_max",
        "profile_rows",
        "lemma_psi",
        "lemma_t",
        "shift_count",
        "lemma_scale",
    ];

    pub fn set(&mut self, key: &str, value: &str) -> Result<(), CliError> {
        let value = value.trim();
        match key {
            "subject" => self.subject = value.to_string(),
            "d" => self.d = parse_count(key, value)? as usize,
            "a" => self.a = parse_count(key, value)? as usize,
            "b" => self.b = parse_count(key, value)? as usize,
            "c" => self.c = parse_count(key, value)? as usize,
            "b_kind" => self.b_kind = parse(key, value)?,
            "theta_bound" | "R" => self.theta_bound = parse(key, value)?,
            "seed" => self.seed = parse_count(key, value)?,
            "t_max" => self.t_max = parse_count(key, value)?,
            "b_t_max" => self.b_t_max = parse_count(key, value)?,
            "sample_count" | "samples" => self.sample_count = parse_count(key, value)? as usize,
            "method" => self.method = parse(key, value)?,
            "window" => {
                self.window = if value.eq_ignore_ascii_case("auto") {
                    None
                } else {
                    Some(parse_count(key, value)? as usize)
                }
            }
            "slack" => self.slack = parse(key, value)?,
            "threshold" => self.threshold = parse(key, value)?,
            "convention" => self.convention = parse(key, value)?,
            "budget" => self.budget = parse_count(key, value)?,
            "output_dir" | "out_dir" => self.output_dir = PathBuf::from(value),
            "parallelism" => self.parallelism = parse(key, value)?,
            "psi" => self.psi = parse_decay(key, value)?,
            "phi" => self.phi = parse_decay(key, value)?,
            "series_t_max" => self.series_t_max = parse_count(key, value)? as usize,
            "profile_rows" => self.profile_rows = parse(key, value)?,
            "lemma_psi" => self.lemma_psi = parse_decay(key, value)?,
            "lemma_t" => {
                self.lemma_t = value
                    .split(',')
                    .map(|p| parse::<f64>(key, p.trim()))
                    .collect::<Result<_, _>>()?
            }
            "shift_count" => self.shift_count = parse_count(key, value)? as usize,
            "lemma_scale" => self.lemma_scale = parse(key, value)?,
            other => return Err(CliError::Config(format!("unknown key '{other}'"))),
        }
        Ok(())
    }

    /// Apply every `key = value` line of `text` on top of `self`.
    pub fn apply_text(&mut self, text: &str) -> Result<(), CliError> {
        for (n, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| CliError::Config(format!("line {}: expected 'key = value'", n + 1)))?;
            self.set(key.trim(), value)
                .map_err(|e| CliError::Config(format!("line {}: {}", n + 1, e.message())))?;
        }
        Ok(())
    }

    pub fn from_file(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
        let mut cfg = Self::default();
        cfg.apply_text(&text)?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<(), CliError> {
        let fail = |m: String| Err(CliError::Config(m));
        if self.sample_count < 1 {
            return fail("sample_count must be at least 1".into());
        }
        if self.t_max < 10 || self.b_t_max < 10 {
            return fail("t_max and b_t_max must be at least 10".into());
        }
        if !(self.slack >= 0.0) {
            return fail(format!("slack = {} must be nonnegative", self.slack));
        }
        if !(0.0..=1.0).contains(&self.threshold) {
            return fail(format!("threshold = {} must lie in [0, 1]", self.threshold));
        }
        if !(self.theta_bound > 0.0 && self.theta_bound.is_finite()) {
            return fail(format!("theta_bound = {} must be positive", self.theta_bound));
        }
        if matches!(self.window, Some(w) if w < 2) {
            return fail("window must be at least 2".into());
        }
        if !(self.lemma_scale > 0.0 && self.lemma_scale <= 1.0) {
            return fail(format!("lemma_scale = {} must lie in (0, 1]", self.lemma_scale));
        }
        if self.lemma_t.iter().any(|&t| !(t >= 1.0)) {
            return fail("every lemma_t value must be at least 1".into());
        }
        if self.series_t_max < 1 {
            return fail("series_t_max must be at least 1".into());
        }
        Ok(())
    }

    /// Canonical `key = value` pairs, in schema order.
    pub fn entries(&self) -> Vec<(&'static str, String)> {
        let lemma_t: Vec<String> = self.lemma_t.iter().map(|t| t.to_string()).collect();
        vec![
            ("subject", self.subject.clone()),
            ("d", self.d.to_string()),
            ("a", self.a.to_string()),
            ("b", self.b.to_string()),
            ("c", self.c.to_string()),
            ("b_kind", self.b_kind.to_string()),
            ("theta_bound", self.theta_bound.to_string()),
            ("seed", self.seed.to_string()),
            ("t_max", self.t_max.to_string()),
            ("b_t_max", self.b_t_max.to_string()),
            ("sample_count", self.sample_count.to_string()),
            ("method", self.method.to_string()),
            ("window", self.window.map_or("auto".into(), |w| w.to_string())),
            ("slack", self.slack.to_string()),
            ("threshold", self.threshold.to_string()),
            ("convention", self.convention.to_string()),
            ("budget", self.budget.to_string()),
            ("output_dir", self.output_dir.display().to_string()),
            ("parallelism", self.parallelism.to_string()),
            ("psi", decay_text(&self.psi)),
            ("phi", decay_text(&self.phi)),
            ("series_t_max", self.series_t_max.to_string()),
            ("profile_rows", self.profile_rows.to_string()),
            ("lemma_psi", decay_text(&self.lemma_psi)),
            ("lemma_t", lemma_t.join(",")),
            ("shift_count", self.shift_count.to_string()),
            ("lemma_scale", self.lemma_scale.to_string()),
        ]
    }

    pub fn to_text(&self) -> String {
        self.entries().into_iter().map(|(k, v)| format!("{k} = {v}\n")).collect()
    }
}
