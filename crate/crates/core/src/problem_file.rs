//! Problem-definition files.
//!
//! One problem per file, one `key = value` pair per line. `#` starts a
//! comment. Values are numbers, booleans, bare identifiers or arrays of
//! numbers written `[v0, v1, …]`. Keys mirror the fields of the problem
//! structs; the free boundary is given either as `alpha = c`
//! (`α(t) = c√t`) or as `boundary_taylor = [0, c1, c2, …]`.
//!
//! ```text
//! kind = model
//! nu = 1
//! diffusivity = 1
//! alpha = 2
//! f_taylor = [0, 3]
//! conductivity = 1
//! latent_heat = 1
//! density = 1
//! truncation = 1
//! ```
//!
//! The one-phase flux is either `flux_taylor = [..]` or the marker
//! `flux = UNKNOWN`; exactly one must be present.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

use thiserror::Error;

use crate::problems::{FluxSpec, FreeBoundary, ModelProblemD0, OnePhaseISP, ProblemError, ProblemSpec, TwoPhaseISP};

#[derive(Debug, Error)]
pub enum ParseError {
    #[error("line {line}, column {column}: {msg}")]
    Syntax { line: usize, column: usize, msg: String },
    #[error("line {line}: unknown field '{key}' for kind {kind}")]
    UnknownField { line: usize, key: String, kind: String },
    #[error("line {line}: duplicate field '{key}' (first set on line {first})")]
    Duplicate { line: usize, key: String, first: usize },
    #[error("missing required field '{0}'")]
    Missing(&'static str),
    #[error("line {line}: '{key}' expects {expected}")]
    Type {
        line: usize,
        key: String,
        expected: &'static str,
    },
    #[error("line {line}: '{second}' and '{first}' (line {first_line}) are mutually exclusive")]
    MutuallyExclusive {
        line: usize,
        first: &'static str,
        first_line: usize,
        second: &'static str,
    },
    #[error("{}invalid problem: {source}", line.map(|l| format!("line {l}: ")).unwrap_or_default())]
    Validation {
        line: Option<usize>,
        #[source]
        source: ProblemError,
    },
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

pub type Result<T> = std::result::Result<T, ParseError>;

#[derive(Debug, Clone, PartialEq)]
enum Value {
    Number(f64),
    Bool(bool),
    Ident(String),
    Array(Vec<f64>),
}

#[derive(Debug)]
struct Entry {
    line: usize,
    value: Value,
    used: bool,
}

struct Fields {
    kind: String,
    map: BTreeMap<String, Entry>,
}

pub fn parse_problem_file(path: &Path) -> Result<ProblemSpec> {
    let text = std::fs::read_to_string(path).map_err(|source| ParseError::Io {
        path: path.display().to_string(),
        source,
    })?;
    parse_problem_str(&text)
}

pub fn parse_problem_str(text: &str) -> Result<ProblemSpec> {
    let mut map: BTreeMap<String, Entry> = BTreeMap::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let content = raw.split('#').next().unwrap_or("");
        if content.trim().is_empty() {
            continue;
        }
        let Some(eq) = content.find('=') else {
            return Err(syntax(line, first_non_space(content), "expected 'key = value'"));
        };
        let key = content[..eq].trim();
        if key.is_empty() || !key.chars().all(|c| c.is_ascii_alphanumeric() || c == '_') {
            return Err(syntax(line, first_non_space(content), "invalid key"));
        }
        let value_col = eq + 2 + first_non_space(&content[eq + 1..]) - 1;
        let value = parse_value(content[eq + 1..].trim(), line, value_col)?;
        if let Some(prev) = map.get(key) {
            return Err(ParseError::Duplicate {
                line,
                key: key.to_string(),
                first: prev.line,
            });
        }
        map.insert(
            key.to_string(),
            Entry {
                line,
                value,
                used: false,
            },
        );
    }

    let kind = match map.get_mut("kind") {
        Some(e) => {
            e.used = true;
            match &e.value {
                Value::Ident(s) => s.clone(),
                _ => {
                    return Err(ParseError::Type {
                        line: e.line,
                        key: "kind".into(),
                        expected: "one of one_phase, model, two_phase",
                    })
                }
            }
        }
        None => return Err(ParseError::Missing("kind")),
    };
    let mut f = Fields {
        kind: kind.clone(),
        map,
    };
    let spec = match kind.as_str() {
        "one_phase" => ProblemSpec::OnePhase(one_phase(&mut f)?),
        "model" => ProblemSpec::Model(model(&mut f)?),
        "two_phase" => ProblemSpec::TwoPhase(two_phase(&mut f)?),
        _ => {
            return Err(ParseError::Type {
                line: f.map["kind"].line,
                key: "kind".into(),
                expected: "one of one_phase, model, two_phase",
            })
        }
    };
    f.reject_unused()?;
    spec.validate().map_err(|source| ParseError::Validation {
        line: f.line_of_error(&source),
        source,
    })?;
    Ok(spec)
}

fn syntax(line: usize, column: usize, msg: impl Into<String>) -> ParseError {
    ParseError::Syntax {
        line,
        column,
        msg: msg.into(),
    }
}

fn first_non_space(s: &str) -> usize {
    s.chars().take_while(|c| c.is_whitespace()).count() + 1
}

fn parse_number(s: &str, line: usize, column: usize) -> Result<f64> {
    match s.parse::<f64>() {
        Ok(v) if v.is_finite() => Ok(v),
        Ok(_) => Err(syntax(line, column, format!("'{s}' is not finite"))),
        Err(_) => Err(syntax(line, column, format!("'{s}' is not a number"))),
    }
}

fn parse_value(s: &str, line: usize, column: usize) -> Result<Value> {
    if s.is_empty() {
        return Err(syntax(line, column, "missing value"));
    }
    if let Some(rest) = s.strip_prefix('[') {
        let Some(inner) = rest.strip_suffix(']') else {
            return Err(syntax(line, column + s.chars().count(), "unterminated array"));
        };
        if inner.trim().is_empty() {
            return Ok(Value::Array(Vec::new()));
        }
        let mut out = Vec::new();
        let mut offset = column + 1;
        for item in inner.split(',') {
            let col = offset + first_non_space(item) - 1;
            let t = item.trim();
            if t.is_empty() {
                return Err(syntax(line, col, "empty array element"));
            }
            out.push(parse_number(t, line, col)?);
            offset += item.chars().count() + 1;
        }
        return Ok(Value::Array(out));
    }
    match s {
        "true" => return Ok(Value::Bool(true)),
        "false" => return Ok(Value::Bool(false)),
        _ => {}
    }
    if s.starts_with(|c: char| c.is_ascii_alphabetic()) && s.chars().all(|c| c.is_ascii_alphanumeric() || c == '_') {
        return Ok(Value::Ident(s.to_string()));
    }
    parse_number(s, line, column).map(Value::Number)
}

impl Fields {
    fn take(&mut self, key: &'static str) -> Option<(usize, Value)> {
        self.map.get_mut(key).map(|e| {
            e.used = true;
            (e.line, e.value.clone())
        })
    }

    fn number(&mut self, key: &'static str) -> Result<f64> {
        self.opt_number(key)?.ok_or(ParseError::Missing(key))
    }

    fn opt_number(&mut self, key: &'static str) -> Result<Option<f64>> {
        match self.take(key) {
            None => Ok(None),
            Some((_, Value::Number(v))) => Ok(Some(v)),
            Some((line, _)) => Err(type_err(line, key, "a number")),
        }
    }

    fn count(&mut self, key: &'static str) -> Result<usize> {
        self.opt_count(key)?.ok_or(ParseError::Missing(key))
    }

    fn opt_count(&mut self, key: &'static str) -> Result<Option<usize>> {
        match self.take(key) {
            None => Ok(None),
            Some((_, Value::Number(v))) if v >= 0.0 && v.fract() == 0.0 && v < 1e9 => Ok(Some(v as usize)),
            Some((line, _)) => Err(type_err(line, key, "a non-negative integer")),
        }
    }

    fn flag(&mut self, key: &'static str) -> Result<bool> {
        match self.take(key) {
            None => Ok(false),
            Some((_, Value::Bool(b))) => Ok(b),
            Some((line, _)) => Err(type_err(line, key, "true or false")),
        }
    }

    fn array(&mut self, key: &'static str) -> Result<Vec<f64>> {
        self.opt_array(key)?.ok_or(ParseError::Missing(key))
    }

    fn opt_array(&mut self, key: &'static str) -> Result<Option<Vec<f64>>> {
        match self.take(key) {
            None => Ok(None),
            Some((_, Value::Array(v))) => Ok(Some(v)),
            Some((line, _)) => Err(type_err(line, key, "an array of numbers")),
        }
    }

    fn exclusive(&self, first: &'static str, second: &'static str) -> Result<()> {
        if let (Some(a), Some(b)) = (self.map.get(first), self.map.get(second)) {
            let (first, second, a, b) = if a.line <= b.line {
                (first, second, a, b)
            } else {
                (second, first, b, a)
            };
            return Err(ParseError::MutuallyExclusive {
                line: b.line,
                first,
                first_line: a.line,
                second,
            });
        }
        Ok(())
    }

    fn boundary(&mut self) -> Result<FreeBoundary> {
        self.exclusive("alpha", "boundary_taylor")?;
        if let Some(coeff) = self.opt_number("alpha")? {
            return Ok(FreeBoundary::SelfSimilar { coeff });
        }
        if let Some(coeffs) = self.opt_array("boundary_taylor")? {
            return Ok(FreeBoundary::Polynomial { coeffs });
        }
        Err(ParseError::Missing("alpha"))
    }

    fn reject_unused(&self) -> Result<()> {
        let first = self.map.iter().filter(|(_, e)| !e.used).min_by_key(|(_, e)| e.line);
        match first {
            Some((key, e)) => Err(ParseError::UnknownField {
                line: e.line,
                key: key.clone(),
                kind: self.kind.clone(),
            }),
            None => Ok(()),
        }
    }

    fn line_of_error(&self, err: &ProblemError) -> Option<usize> {
        let ProblemError::Invalid { field, .. } = err else {
            return None;
        };
        let keys: &[&str] = match *field {
            "boundary" => &["alpha", "boundary_taylor"],
            other => &[other],
        };
        keys.iter().find_map(|k| self.map.get(*k).map(|e| e.line))
    }
}

fn type_err(line: usize, key: &str, expected: &'static str) -> ParseError {
    ParseError::Type {
        line,
        key: key.to_string(),
        expected,
    }
}

fn one_phase(f: &mut Fields) -> Result<OnePhaseISP> {
    f.exclusive("flux_taylor", "flux")?;
    let flux = match (f.opt_array("flux_taylor")?, f.take("flux")) {
        (Some(p), None) => FluxSpec::Known(p),
        (None, Some((_, Value::Ident(s)))) if s == "UNKNOWN" => FluxSpec::Unknown,
        (None, Some((line, _))) => return Err(type_err(line, "flux", "the marker UNKNOWN")),
        (None, None) => return Err(ParseError::Missing("flux_taylor")),
        (Some(_), Some(_)) => unreachable!("checked above"),
    };
    Ok(OnePhaseISP {
        nu: f.number("nu")?,
        diffusivity: f.number("diffusivity")?,
        melt_temp: f.number("melt_temp")?,
        boundary_temp: f.opt_array("boundary_temp")?.unwrap_or_default(),
        robin_beta: f.number("robin_beta")?,
        robin_gamma: f.number("robin_gamma")?,
        latent_heat: f.number("latent_heat")?,
        density: f.number("density")?,
        conductivity: f.number("conductivity")?,
        boundary: f.boundary()?,
        flux,
        truncation: f.count("truncation")?,
        extended_domain: f.flag("extended_domain")?,
    })
}

fn model(f: &mut Fields) -> Result<ModelProblemD0> {
    Ok(ModelProblemD0 {
        nu: f.number("nu")?,
        diffusivity: f.number("diffusivity")?,
        boundary: f.boundary()?,
        f_taylor: f.array("f_taylor")?,
        conductivity: f.number("conductivity")?,
        latent_heat: f.number("latent_heat")?,
        density: f.number("density")?,
        truncation: f.count("truncation")?,
        extended_domain: f.flag("extended_domain")?,
    })
}

fn two_phase(f: &mut Fields) -> Result<TwoPhaseISP> {
    Ok(TwoPhaseISP {
        nu: f.number("nu")?,
        a1: f.number("a1")?,
        a2: f.number("a2")?,
        melt_temp: f.number("melt_temp")?,
        robin_beta: f.number("robin_beta")?,
        robin_gamma: f.number("robin_gamma")?,
        latent_heat: f.number("latent_heat")?,
        density: f.number("density")?,
        conductivity1: f.number("conductivity1")?,
        conductivity2: f.number("conductivity2")?,
        initial_profile_taylor: f.array("initial_profile_taylor")?,
        boundary: f.boundary()?,
        far_field_cutoff: f.opt_number("far_field_cutoff")?,
        far_field_points: f.opt_count("far_field_points")?.unwrap_or(0),
        collocation_count: f.count("collocation_count")?,
        horizon: f.number("horizon")?,
        flux_terms: f.opt_count("flux_terms")?,
        truncation: f.count("truncation")?,
        extended_domain: f.flag("extended_domain")?,
    })
}

/// Writes `spec` in the file format; `parse_problem_str` reads it back
/// bit-for-bit.
pub fn format_problem(spec: &ProblemSpec) -> String {
    let mut out = String::new();
    let o = &mut out;
    match spec {
        ProblemSpec::OnePhase(p) => {
            line(o, "kind", "one_phase");
            num(o, "nu", p.nu);
            num(o, "diffusivity", p.diffusivity);
            num(o, "melt_temp", p.melt_temp);
            if !p.boundary_temp.is_empty() {
                line(o, "boundary_temp", &array(&p.boundary_temp));
            }
            num(o, "robin_beta", p.robin_beta);
            num(o, "robin_gamma", p.robin_gamma);
            num(o, "latent_heat", p.latent_heat);
            num(o, "density", p.density);
            num(o, "conductivity", p.conductivity);
            boundary(o, &p.boundary);
            match &p.flux {
                FluxSpec::Known(v) => line(o, "flux_taylor", &array(v)),
                FluxSpec::Unknown => line(o, "flux", "UNKNOWN"),
            }
            tail(o, p.truncation, p.extended_domain);
        }
        ProblemSpec::Model(p) => {
            line(o, "kind", "model");
            num(o, "nu", p.nu);
            num(o, "diffusivity", p.diffusivity);
            boundary(o, &p.boundary);
            line(o, "f_taylor", &array(&p.f_taylor));
            num(o, "conductivity", p.conductivity);
            num(o, "latent_heat", p.latent_heat);
            num(o, "density", p.density);
            tail(o, p.truncation, p.extended_domain);
        }
        ProblemSpec::TwoPhase(p) => {
            line(o, "kind", "two_phase");
            for (k, v) in [
                ("nu", p.nu),
                ("a1", p.a1),
                ("a2", p.a2),
                ("melt_temp", p.melt_temp),
                ("robin_beta", p.robin_beta),
                ("robin_gamma", p.robin_gamma),
                ("latent_heat", p.latent_heat),
                ("density", p.density),
                ("conductivity1", p.conductivity1),
                ("conductivity2", p.conductivity2),
            ] {
                num(o, k, v);
            }
            line(o, "initial_profile_taylor", &array(&p.initial_profile_taylor));
            boundary(o, &p.boundary);
            if let Some(x) = p.far_field_cutoff {
                num(o, "far_field_cutoff", x);
                line(o, "far_field_points", &p.far_field_points.to_string());
            }
            line(o, "collocation_count", &p.collocation_count.to_string());
            num(o, "horizon", p.horizon);
            if let Some(n) = p.flux_terms {
                line(o, "flux_terms", &n.to_string());
            }
            tail(o, p.truncation, p.extended_domain);
        }
    }
    out
}

fn line(out: &mut String, key: &str, value: &str) {
    writeln!(out, "{key} = {value}").unwrap();
}

// `{:?}` prints the shortest string that parses back to the same f64.
fn num(out: &mut String, key: &str, v: f64) {
    line(out, key, &format!("{v:?}"));
}

fn array(v: &[f64]) -> String {
    let items: Vec<String> = v.iter().map(|x| format!("{x:?}")).collect();
    format!("[{}]", items.join(", "))
}

fn boundary(out: &mut String, b: &FreeBoundary) {
    match b {
        FreeBoundary::SelfSimilar { coeff } => num(out, "alpha", *coeff),
        FreeBoundary::Polynomial { coeffs } => line(out, "boundary_taylor", &array(coeffs)),
    }
}

fn tail(out: &mut String, truncation: usize, extended: bool) {
    line(out, "truncation", &truncation.to_string());
    if extended {
        line(out, "extended_domain", "true");
    }
}
