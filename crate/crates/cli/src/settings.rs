//! Flat `key = value` run configuration, merged with command-line flags.

use std::fmt;

use coxasep::coxeter::CoxeterType;
use coxasep::dynamics::Boundary;
use coxasep::scalar::{rat, Rational};

/// Error tied to one configuration key; reported with exit code 2.
#[derive(Debug, Clone, PartialEq)]
pub struct KeyError {
    pub key: String,
    pub message: String,
}

impl KeyError {
    pub fn new(key: &str, message: impl Into<String>) -> Self {
        Self { key: key.into(), message: message.into() }
    }
}

impl fmt::Display for KeyError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "config key `{}`: {}", self.key, self.message)
    }
}

pub const KEYS: [&str; 12] =
    ["ctype", "rank", "q", "m", "blocks", "boundary", "t", "trajectories", "seed", "window", "bins", "thresholds"];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Family {
    A,
    Bc,
}

/// `q` as written, kept exact for rational checks.
#[derive(Debug, Clone, PartialEq)]
pub struct QValue {
    pub value: f64,
    pub exact: Rational,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Settings {
    pub ctype: Option<Family>,
    pub rank: Option<usize>,
    pub q: Option<QValue>,
    pub m: Option<Vec<usize>>,
    pub blocks: Option<Vec<usize>>,
    pub boundary: Option<Boundary>,
    pub t: Option<f64>,
    pub trajectories: Option<usize>,
    pub seed: Option<u64>,
    pub window: Option<usize>,
    pub bins: Option<usize>,
    pub thresholds: Option<Vec<i64>>,
}

fn list<T: std::str::FromStr>(key: &str, v: &str) -> Result<Vec<T>, KeyError> {
    v.split(',')
        .map(|s| s.trim().parse::<T>().map_err(|_| KeyError::new(key, format!("cannot parse {s:?} in list {v:?}"))))
        .collect()
}

fn scalar<T: std::str::FromStr>(key: &str, v: &str) -> Result<T, KeyError> {
    v.trim().parse::<T>().map_err(|_| KeyError::new(key, format!("cannot parse {v:?}")))
}

/// Reads `a/b` or a decimal literal exactly.
pub fn parse_q(v: &str) -> Result<QValue, KeyError> {
    let v = v.trim();
    let bad = || KeyError::new("q", format!("cannot parse {v:?}; use a decimal or a/b"));
    let exact = if let Some((a, b)) = v.split_once('/') {
        let a: i64 = a.trim().parse().map_err(|_| bad())?;
        let b: i64 = b.trim().parse().map_err(|_| bad())?;
        if b == 0 {
            return Err(bad());
        }
        rat(a, b)
    } else {
        let (int, frac) = v.split_once('.').unwrap_or((v, ""));
        if int.is_empty() && frac.is_empty() || !frac.chars().all(|c| c.is_ascii_digit()) || frac.len() > 18 {
            return Err(bad());
        }
        let digits: i64 = format!("{int}{frac}").parse().map_err(|_| bad())?;
        rat(digits, 10i64.pow(frac.len() as u32))
    };
    let value = coxasep::scalar::Scalar::to_f64(&exact);
    if !(value > 0.0 && value < 1.0) {
        return Err(KeyError::new("q", format!("{v} must lie in (0, 1)")));
    }
    Ok(QValue { value, exact })
}

pub fn parse_family(v: &str) -> Result<Family, KeyError> {
    match v.trim().to_ascii_uppercase().as_str() {
        "A" => Ok(Family::A),
        "BC" | "B" | "C" => Ok(Family::Bc),
        _ => Err(KeyError::new("ctype", format!("unknown Coxeter type {v:?} (expected A or BC)"))),
    }
}

pub fn parse_boundary(v: &str) -> Result<Boundary, KeyError> {
    match v.trim().to_ascii_lowercase().as_str() {
        "none" | "closed" => Ok(Boundary::None),
        "case1" | "1" => Ok(Boundary::Case1),
        "case2" | "2" => Ok(Boundary::Case2),
        _ => Err(KeyError::new("boundary", format!("unknown boundary {v:?} (expected none, case1 or case2)"))),
    }
}

impl Settings {
    /// Parses the text of a config file; `#` starts a comment.
    pub fn parse(text: &str) -> Result<Self, KeyError> {
        let mut s = Settings::default();
        for (n, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| KeyError::new(line, format!("line {} is not `key = value`", n + 1)))?;
            s.set(key.trim(), value.trim())?;
        }
        Ok(s)
    }

    pub fn set(&mut self, key: &str, v: &str) -> Result<(), KeyError> {
        match key {
            "ctype" => self.ctype = Some(parse_family(v)?),
            "rank" => self.rank = Some(scalar(key, v)?),
            "q" => self.q = Some(parse_q(v)?),
            "m" => self.m = Some(list(key, v)?),
            "blocks" => self.blocks = Some(list(key, v)?),
            "boundary" => self.boundary = Some(parse_boundary(v)?),
            "t" => self.t = Some(scalar(key, v)?),
            "trajectories" => self.trajectories = Some(scalar(key, v)?),
            "seed" => self.seed = Some(scalar(key, v)?),
            "window" => self.window = Some(scalar(key, v)?),
            "bins" => self.bins = Some(scalar(key, v)?),
            "thresholds" => self.thresholds = Some(list(key, v)?),
            _ => return Err(KeyError::new(key, format!("unknown key; expected one of {}", KEYS.join(", ")))),
        }
        Ok(())
    }

    /// Fields set in `other` win.
    pub fn overlay(self, other: Settings) -> Settings {
        Settings {
            ctype: other.ctype.or(self.ctype),
            rank: other.rank.or(self.rank),
            q: other.q.or(self.q),
            m: other.m.or(self.m),
            blocks: other.blocks.or(self.blocks),
            boundary: other.boundary.or(self.boundary),
            t: other.t.or(self.t),
            trajectories: other.trajectories.or(self.trajectories),
            seed: other.seed.or(self.seed),
            window: other.window.or(self.window),
            bins: other.bins.or(self.bins),
            thresholds: other.thresholds.or(self.thresholds),
        }
    }

    pub fn coxeter_type(&self, default_rank: usize) -> CoxeterType {
        let rank = self.rank.unwrap_or(default_rank);
        match self.ctype.unwrap_or(Family::A) {
            Family::A => CoxeterType::a(rank),
            Family::Bc => CoxeterType::bc(rank),
        }
    }

    pub fn q_or(&self, default: &str) -> QValue {
        self.q.clone().unwrap_or_else(|| parse_q(default).expect("valid default"))
    }
}
