//! Flat `key = value` run configuration.
//!
//! Lists are comma-separated; `auto` leaves a value to the model or
//! scenario default. Unknown keys and out-of-range values are rejected when
//! parsed, so a config that loads is a config that runs.

use std::fmt::Write as _;

use anyhow::{anyhow, bail, Context, Result};
use tailmdp::models::{BetaModelParams, GrowthModelParams};
use tailmdp::weakconv::SCENARIOS;
use tailmdp::{ClosedSetSpec, ScalarLaw};

pub const COMMANDS: [&str; 4] = ["simulate", "verify", "solve", "weakconv"];
pub const MODELS: [&str; 3] = ["beta", "growth", "toy"];
pub const CHECKS: [&str; 6] = ["condition-c", "tight-set", "envelope", "coercivity", "kernel-continuity", "all"];
pub const TEST_FUNCTIONS: [&str; 3] = ["y", "one", "min1"];

#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig {
    pub command: String,
    pub model: String,
    pub seed: u64,
    pub horizon: Option<usize>,
    pub samples: usize,
    pub grid: usize,
    pub amax: u64,
    pub p: u64,
    pub rho: f64,
    pub sigma: f64,
    pub discount: f64,
    pub z: f64,
    pub d: f64,
    pub income: String,
    pub check: String,
    pub tmax: usize,
    pub tol: f64,
    pub t: usize,
    pub target: f64,
    pub domain: String,
    pub net_step: f64,
    pub betas: Vec<f64>,
    pub points: usize,
    pub g: String,
    pub scenario: String,
    pub n: Option<Vec<usize>>,
    pub oracle: bool,
    pub out: String,
}

impl Default for RunConfig {
    fn default() -> Self {
        let g = GrowthModelParams::default();
        Self {
            command: "simulate".into(),
            model: "beta".into(),
            seed: 42,
            horizon: None,
            samples: 20_000,
            grid: 201,
            amax: 8,
            p: 3,
            rho: g.rho,
            sigma: g.sigma,
            discount: g.beta_discount,
            z: g.z,
            d: g.d,
            income: "uniform".into(),
            check: "all".into(),
            tmax: 40,
            tol: 1e-2,
            t: 1,
            target: 0.41,
            domain: "full".into(),
            net_step: 1e-3,
            betas: vec![-10.0],
            points: 1001,
            g: "y".into(),
            scenario: SCENARIOS[0].into(),
            n: None,
            oracle: false,
            out: ".".into(),
        }
    }
}

fn one_of(key: &str, value: &str, allowed: &[&str]) -> Result<String> {
    if allowed.contains(&value) {
        Ok(value.to_string())
    } else {
        bail!("{key} must be one of {}, got {value:?}", allowed.join(", "))
    }
}

fn parse<T: std::str::FromStr>(key: &str, value: &str) -> Result<T>
where
    T::Err: std::fmt::Display,
{
    value.trim().parse::<T>().map_err(|e| anyhow!("{key}: cannot parse {value:?}: {e}"))
}

fn positive<T: PartialOrd + Default + std::fmt::Display>(key: &str, v: T) -> Result<T> {
    if v > T::default() {
        Ok(v)
    } else {
        bail!("{key} must be positive, got {v}")
    }
}

fn positive_real(key: &str, value: &str) -> Result<f64> {
    let v: f64 = parse(key, value)?;
    if v > 0.0 && v.is_finite() {
        Ok(v)
    } else {
        bail!("{key} must be a positive finite number, got {value}")
    }
}

fn list<T: std::str::FromStr>(key: &str, value: &str) -> Result<Vec<T>>
where
    T::Err: std::fmt::Display,
{
    let items: Vec<T> = value.split(',').map(|s| parse(key, s)).collect::<Result<_>>()?;
    if items.is_empty() {
        bail!("{key} must not be empty");
    }
    Ok(items)
}

fn join<T: std::fmt::Display>(xs: &[T]) -> String {
    xs.iter().map(T::to_string).collect::<Vec<_>>().join(",")
}

/// `uniform`, `uniform:lo:hi` or `point:v`.
pub fn parse_income(s: &str) -> Result<ScalarLaw> {
    let parts: Vec<&str> = s.split(':').collect();
    let law = match parts.as_slice() {
        ["uniform"] => ScalarLaw::uniform(0.0, 1.0),
        ["uniform", lo, hi] => ScalarLaw::uniform(parse("income", lo)?, parse("income", hi)?),
        ["point", v] => Ok(ScalarLaw::Point(parse("income", v)?)),
        _ => bail!("income must be uniform, uniform:LO:HI or point:V, got {s:?}"),
    };
    Ok(law?)
}

/// `full`, `keps:E` or `LO:HI,LO:HI,...`. `full` needs the state-space
/// bounds, so it resolves to `None` here.
pub fn parse_domain(s: &str) -> Result<Option<ClosedSetSpec>> {
    if s == "full" {
        return Ok(None);
    }
    if let Some(e) = s.strip_prefix("keps:") {
        return Ok(Some(ClosedSetSpec::keps(parse("domain", e)?)?));
    }
    let intervals = s
        .split(',')
        .map(|iv| {
            let (lo, hi) = iv.split_once(':').ok_or_else(|| anyhow!("domain interval {iv:?} must be LO:HI"))?;
            Ok((parse("domain", lo)?, parse("domain", hi)?))
        })
        .collect::<Result<Vec<(f64, f64)>>>()?;
    Ok(Some(ClosedSetSpec::new(intervals)?))
}

impl RunConfig {
    /// Set one key from its text form, with range checks.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let value = value.trim();
        match key {
            "command" => self.command = one_of(key, value, &COMMANDS)?,
            "model" => {
                if value == "custom-file" || value.starts_with("custom") {
                    bail!("custom model files are not supported; use beta, growth or toy");
                }
                self.model = one_of(key, value, &MODELS)?
            }
            "seed" => self.seed = parse(key, value)?,
            "horizon" => self.horizon = if value == "auto" { None } else { Some(positive(key, parse(key, value)?)?) },
            "samples" => {
                let n: usize = parse(key, value)?;
                if n < 2 {
                    bail!("samples must be >= 2 for a variance estimate, got {n}");
                }
                self.samples = n
            }
            "grid" => {
                let g: usize = parse(key, value)?;
                if g < 3 || g % 2 == 0 {
                    bail!("grid must be odd and >= 3, got {g}");
                }
                self.grid = g
            }
            "amax" => self.amax = positive(key, parse(key, value)?)?,
            "p" => self.p = positive(key, parse(key, value)?)?,
            "rho" => self.rho = positive_real(key, value)?,
            "sigma" => self.sigma = positive_real(key, value)?,
            "discount" => self.discount = positive_real(key, value)?,
            "z" => self.z = positive_real(key, value)?,
            "d" => self.d = positive_real(key, value)?,
            "income" => {
                parse_income(value)?;
                self.income = value.to_string()
            }
            "check" => self.check = one_of(key, value, &CHECKS)?,
            "tmax" => self.tmax = positive(key, parse(key, value)?)?,
            "tol" => self.tol = positive_real(key, value)?,
            "t" => self.t = positive(key, parse(key, value)?)?,
            "target" => self.target = positive_real(key, value)?,
            "domain" => {
                parse_domain(value)?;
                self.domain = value.to_string()
            }
            "net_step" => {
                let s = positive_real(key, value)?;
                if s > 1e-2 {
                    bail!("net_step must be at most 1e-2, got {s}");
                }
                self.net_step = s
            }
            "betas" => {
                let b: Vec<f64> = list(key, value)?;
                if b.iter().any(|x| !x.is_finite()) {
                    bail!("betas must be finite");
                }
                self.betas = b
            }
            "points" => {
                let n: usize = parse(key, value)?;
                if n < 2 {
                    bail!("points must be >= 2, got {n}");
                }
                self.points = n
            }
            "g" => self.g = one_of(key, value, &TEST_FUNCTIONS)?,
            "scenario" => self.scenario = value.to_string(),
            "n" => {
                self.n = if value == "auto" {
                    None
                } else {
                    let ns: Vec<usize> = list(key, value)?;
                    if ns.contains(&0) {
                        bail!("n entries must be positive");
                    }
                    Some(ns)
                }
            }
            "oracle" => self.oracle = parse(key, value)?,
            "out" => {
                if value.is_empty() {
                    bail!("out must not be empty");
                }
                self.out = value.to_string()
            }
            other => bail!("unknown config key {other:?}"),
        }
        Ok(())
    }

    #[cfg(test)]
    pub fn from_text(text: &str) -> Result<Self> {
        let mut cfg = Self::default();
        cfg.apply_text(text)?;
        Ok(cfg)
    }

    pub fn apply_text(&mut self, text: &str) -> Result<()> {
        for (i, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (k, v) = line.split_once('=').ok_or_else(|| anyhow!("line {}: expected key = value", i + 1))?;
            self.set(k.trim(), v).with_context(|| format!("line {}", i + 1))?;
        }
        Ok(())
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let mut kv = |k: &str, v: String| writeln!(out, "{k} = {v}").unwrap();
        kv("command", self.command.clone());
        kv("model", self.model.clone());
        kv("seed", self.seed.to_string());
        kv("horizon", self.horizon.map_or("auto".into(), |h| h.to_string()));
        kv("samples", self.samples.to_string());
        kv("grid", self.grid.to_string());
        kv("amax", self.amax.to_string());
        kv("p", self.p.to_string());
        kv("rho", self.rho.to_string());
        kv("sigma", self.sigma.to_string());
        kv("discount", self.discount.to_string());
        kv("z", self.z.to_string());
        kv("d", self.d.to_string());
        kv("income", self.income.clone());
        kv("check", self.check.clone());
        kv("tmax", self.tmax.to_string());
        kv("tol", self.tol.to_string());
        kv("t", self.t.to_string());
        kv("target", self.target.to_string());
        kv("domain", self.domain.clone());
        kv("net_step", self.net_step.to_string());
        kv("betas", join(&self.betas));
        kv("points", self.points.to_string());
        kv("g", self.g.clone());
        kv("scenario", self.scenario.clone());
        kv("n", self.n.as_ref().map_or("auto".into(), |n| join(n)));
        kv("oracle", self.oracle.to_string());
        kv("out", self.out.clone());
        out
    }

    pub fn beta_params(&self) -> BetaModelParams {
        BetaModelParams { p: self.p, a_max: self.amax }
    }

    pub fn growth_params(&self) -> Result<GrowthModelParams> {
        Ok(GrowthModelParams {
            rho: self.rho,
            sigma: self.sigma,
            beta_discount: self.discount,
            z: self.z,
            d: self.d,
            income: parse_income(&self.income)?,
        })
    }
}
