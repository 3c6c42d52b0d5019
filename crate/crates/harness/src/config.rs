//! Experiment configuration and its key-value text format.
//!
//! ```text
//! # comments start with '#'
//! dims = 2, 4, 8, 16
//! trials = 50
//! seed = 20240
//! perturbation_scale = 0.5
//! quad_nodes = 32
//! tol_thm = 1e-8
//! tol_lip = 1e-8
//! tol_kernel = 1e-9
//! suites = thm41, thm42, thm43, s2, thm51, thm52, thm53, oracles
//!
//! function r_-i
//!   res 1 0 0 -1
//! end
//! ```
//!
//! Omitted keys keep their defaults. If any `function` block is present the
//! default function list is replaced.

use std::collections::HashSet;
use std::fmt;
use std::str::FromStr;

use dissip_core::{AnalyticFunction, Complex64};
use serde::{Deserialize, Serialize};

/// Config problem, located by line (when read from text) and field.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ConfigError {
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("{}field `{field}`: {message}", line.map(|l| format!("line {l}: ")).unwrap_or_default())]
    Field {
        line: Option<usize>,
        field: String,
        message: String,
    },
    #[error("cannot read config: {0}")]
    Io(String),
}

impl ConfigError {
    fn field(line: Option<usize>, field: &str, message: impl Into<String>) -> Self {
        ConfigError::Field {
            line,
            field: field.to_string(),
            message: message.into(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Suite {
    /// Resolvent-sandwiched difference identity for unrelated `L₁, L₂`.
    Thm41,
    /// `f(L₁) − f(L₂)` as a double operator integral in `K = L₁ − L₂`.
    Thm42,
    /// Operator-norm Lipschitz estimate.
    Thm43,
    /// Hilbert–Schmidt Lipschitz estimate.
    S2,
    /// Sandwich identity with an extra bounded `R`.
    Thm51,
    /// Quasicommutator `f(L₁)R − Rf(L₂)` as a double operator integral.
    Thm52,
    /// Quasicommutator norm estimate.
    Thm53,
    /// Kernel cross-checks and structural invariants.
    Oracles,
}

impl Suite {
    pub const ALL: [Suite; 8] = [
        Suite::Thm41,
        Suite::Thm42,
        Suite::Thm43,
        Suite::S2,
        Suite::Thm51,
        Suite::Thm52,
        Suite::Thm53,
        Suite::Oracles,
    ];

    pub fn id(self) -> &'static str {
        match self {
            Suite::Thm41 => "thm41",
            Suite::Thm42 => "thm42",
            Suite::Thm43 => "thm43",
            Suite::S2 => "s2",
            Suite::Thm51 => "thm51",
            Suite::Thm52 => "thm52",
            Suite::Thm53 => "thm53",
            Suite::Oracles => "oracles",
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.id())
    }
}

impl FromStr for Suite {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        Suite::ALL
            .into_iter()
            .find(|x| x.id() == s)
            .ok_or_else(|| format!("unknown suite `{s}`"))
    }
}

/// A named function from the config.
#[derive(Debug, Clone, PartialEq)]
pub struct FunctionSpec {
    pub name: String,
    pub function: AnalyticFunction,
}

impl FunctionSpec {
    pub fn new(name: impl Into<String>, function: AnalyticFunction) -> Self {
        Self {
            name: name.into(),
            function,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances {
    /// Representation residuals.
    pub thm: f64,
    /// Relative slack on one-sided norm estimates.
    pub lip: f64,
    /// Structural invariants of the kernels (Cayley, semigroup, resolvent).
    pub kernel: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            thm: 1e-8,
            lip: 1e-8,
            kernel: 1e-9,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub dims: Vec<usize>,
    pub trials: usize,
    pub seed: u64,
    pub functions: Vec<FunctionSpec>,
    pub perturbation_scale: f64,
    pub quad_nodes: usize,
    pub tolerances: Tolerances,
    /// Kept sorted and free of duplicates.
    pub suites: Vec<Suite>,
}

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// `r_{−i}`, `e_1` and `e_{1/2} + 3 r_{−2i}`.
pub fn default_functions() -> Vec<FunctionSpec> {
    let r = AnalyticFunction::resolvent(c(1.0, 0.0), c(0.0, -1.0)).expect("pole below the axis");
    let e1 = AnalyticFunction::exponential(c(1.0, 0.0), 1.0).expect("positive time");
    let mixed = AnalyticFunction::exponential(c(1.0, 0.0), 0.5)
        .and_then(|f| f.with_resolvent(c(3.0, 0.0), c(0.0, -2.0)))
        .expect("valid terms");
    vec![
        FunctionSpec::new("r_-i", r),
        FunctionSpec::new("e_1", e1),
        FunctionSpec::new("e_0.5+3r_-2i", mixed),
    ]
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            dims: vec![2, 4, 8, 16],
            trials: 50,
            seed: 20240,
            functions: default_functions(),
            perturbation_scale: 0.5,
            quad_nodes: 32,
            tolerances: Tolerances::default(),
            suites: Suite::ALL.to_vec(),
        }
    }
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.trials < 1 {
            return Err(ConfigError::field(None, "trials", "must be at least 1"));
        }
        if self.dims.iter().any(|&d| d < 1) {
            return Err(ConfigError::field(None, "dims", "every dimension must be at least 1"));
        }
        if !(self.perturbation_scale > 0.0 && self.perturbation_scale.is_finite()) {
            return Err(ConfigError::field(None, "perturbation_scale", "must be positive and finite"));
        }
        if self.quad_nodes < 1 {
            return Err(ConfigError::field(None, "quad_nodes", "must be at least 1"));
        }
        for (name, v) in [
            ("tol_thm", self.tolerances.thm),
            ("tol_lip", self.tolerances.lip),
            ("tol_kernel", self.tolerances.kernel),
        ] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(ConfigError::field(None, name, "must be positive and finite"));
            }
        }
        let mut names = HashSet::new();
        for f in &self.functions {
            if !names.insert(f.name.as_str()) {
                return Err(ConfigError::field(None, "function", format!("duplicate name `{}`", f.name)));
            }
        }
        Ok(())
    }

    pub fn from_path(path: impl AsRef<std::path::Path>) -> Result<Self, ConfigError> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| ConfigError::Io(format!("{}: {e}", path.display())))?;
        text.parse()
    }

    pub fn set_suites(&mut self, suites: impl IntoIterator<Item = Suite>) {
        let mut v: Vec<Suite> = suites.into_iter().collect();
        v.sort();
        v.dedup();
        self.suites = v;
    }
}

pub fn parse_dims(s: &str) -> Result<Vec<usize>, String> {
    split_list(s)
        .map(|t| t.parse::<usize>().map_err(|e| format!("`{t}`: {e}")))
        .collect()
}

pub fn parse_suites(s: &str) -> Result<Vec<Suite>, String> {
    split_list(s).map(str::parse).collect()
}

fn split_list(s: &str) -> impl Iterator<Item = &str> {
    s.split(',').map(str::trim).filter(|t| !t.is_empty())
}

fn parse_value<T: FromStr>(line: usize, key: &str, value: &str) -> Result<T, ConfigError>
where
    T::Err: fmt::Display,
{
    value
        .parse()
        .map_err(|e: T::Err| ConfigError::field(Some(line), key, format!("`{value}`: {e}")))
}

impl FromStr for ExperimentConfig {
    type Err = ConfigError;

    fn from_str(text: &str) -> Result<Self, ConfigError> {
        let mut cfg = ExperimentConfig::default();
        let mut functions: Vec<FunctionSpec> = Vec::new();
        let mut seen: HashSet<String> = HashSet::new();
        let lines: Vec<&str> = text.lines().collect();
        let mut i = 0;
        while i < lines.len() {
            let lineno = i + 1;
            let line = lines[i].split('#').next().unwrap_or("").trim();
            i += 1;
            if line.is_empty() {
                continue;
            }
            if let Some(rest) = line.strip_prefix("function").filter(|r| r.is_empty() || r.starts_with(char::is_whitespace)) {
                let name = match rest.trim() {
                    "" => format!("f{}", functions.len()),
                    n => n.to_string(),
                };
                let start = i;
                while i < lines.len() && lines[i].split('#').next().unwrap_or("").trim() != "end" {
                    i += 1;
                }
                if i == lines.len() {
                    return Err(ConfigError::Syntax {
                        line: lineno,
                        message: format!("function `{name}` has no matching `end`"),
                    });
                }
                let body = lines[start..i].iter().copied();
                i += 1;
                let function = AnalyticFunction::parse_lines(body, start + 1).map_err(|e| match e {
                    dissip_core::Error::Parse { line, message } => ConfigError::field(Some(line), "function", message),
                    other => ConfigError::field(Some(lineno), "function", other.to_string()),
                })?;
                if functions.iter().any(|f| f.name == name) {
                    return Err(ConfigError::field(Some(lineno), "function", format!("duplicate name `{name}`")));
                }
                functions.push(FunctionSpec::new(name, function));
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| ConfigError::Syntax {
                line: lineno,
                message: format!("expected `key = value` or a function block, got `{line}`"),
            })?;
            let (key, value) = (key.trim(), value.trim());
            if !seen.insert(key.to_string()) {
                return Err(ConfigError::field(Some(lineno), key, "given more than once"));
            }
            let field_err = |m: String| ConfigError::field(Some(lineno), key, m);
            match key {
                "dims" => cfg.dims = parse_dims(value).map_err(field_err)?,
                "trials" => cfg.trials = parse_value(lineno, key, value)?,
                "seed" => cfg.seed = parse_value(lineno, key, value)?,
                "perturbation_scale" => cfg.perturbation_scale = parse_value(lineno, key, value)?,
                "quad_nodes" => cfg.quad_nodes = parse_value(lineno, key, value)?,
                "tol_thm" => cfg.tolerances.thm = parse_value(lineno, key, value)?,
                "tol_lip" => cfg.tolerances.lip = parse_value(lineno, key, value)?,
                "tol_kernel" => cfg.tolerances.kernel = parse_value(lineno, key, value)?,
                "suites" => {
                    let s = parse_suites(value).map_err(field_err)?;
                    cfg.set_suites(s);
                }
                _ => return Err(ConfigError::field(Some(lineno), key, "unknown key")),
            }
            // re-validate so the error points at the offending line
            cfg.validate().map_err(|e| match e {
                ConfigError::Field { field, message, .. } if field == key => {
                    ConfigError::Field { line: Some(lineno), field, message }
                }
                other => other,
            })?;
        }
        if !functions.is_empty() {
            cfg.functions = functions;
        }
        cfg.validate()?;
        Ok(cfg)
    }
}
