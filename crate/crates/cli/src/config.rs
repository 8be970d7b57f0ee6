//! Flat key-value JSON configuration with command-line overrides.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde_json::Value;
use wos_core::bounds::ProblemData;
use wos_core::Domain;

use crate::catalog;
use crate::error::CliError;
use crate::expr::{parse_expr, Expr};

pub const KNOWN_KEYS: &[&str] = &[
    "domain.kind",
    "domain.dim",
    "domain.halfwidth",
    "domain.l1_radius",
    "domain.radius",
    "domain.r0",
    "domain.r1",
    "problem.f",
    "problem.g",
    "problem.exact",
    "problem.g_inf",
    "problem.g_alpha",
    "problem.alpha",
    "problem.f_inf",
    "problem.f_alpha",
    "problem.lap_g_inf",
    "solver.M",
    "solver.N",
    "solver.seed",
    "solver.eps",
    "solver.beta",
    "solve.points",
    "solve.random_points",
    "solve.bounds",
    "test1.x",
    "test1.x1",
    "test1.dims",
    "test1.m_values",
    "test1.m_start",
    "test1.m_stop",
    "test1.m_step",
    "test1.delta",
    "test2.L",
    "test2.E",
    "test2.n_values",
    "test2.hist",
    "plan.gamma",
    "plan.eta",
    "plan.defective",
    "plan.coef",
    "nn.gamma",
    "nn.eps_p",
    "nn.c",
    "nn.probe",
    "nn.g_net",
    "nn.f_net",
    "nn.r_net",
    "nn.cap",
    "nn.dense_limit",
    "out",
];

#[derive(Debug, Clone, Default)]
pub struct Config {
    values: BTreeMap<String, Value>,
    /// Keys set from the command line rather than the file.
    overridden: Vec<String>,
    source: String,
    path: Option<PathBuf>,
}

impl Config {
    pub fn empty() -> Self {
        Self::default()
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::parse(&text, Some(path.to_path_buf()))
    }

    pub fn parse(text: &str, path: Option<PathBuf>) -> Result<Self, CliError> {
        let name = path.as_ref().map_or("<config>".to_string(), |p| p.display().to_string());
        let v: Value = serde_json::from_str(text).map_err(|e| CliError::Config(format!("{name}: {e}")))?;
        let Value::Object(map) = v else {
            return Err(CliError::Config(format!("{name}: top level must be a JSON object")));
        };
        let mut cfg = Self { values: BTreeMap::new(), overridden: Vec::new(), source: text.to_string(), path };
        for (k, v) in map {
            if !KNOWN_KEYS.contains(&k.as_str()) {
                return Err(cfg.err(&k, "unknown key"));
            }
            cfg.values.insert(k, v);
        }
        Ok(cfg)
    }

    /// Sets `key` from command-line text: JSON if it parses, a string otherwise.
    pub fn set_raw(&mut self, key: &str, raw: &str) -> Result<(), CliError> {
        let v = serde_json::from_str(raw).unwrap_or_else(|_| Value::String(raw.to_string()));
        self.set(key, v)
    }

    pub fn set(&mut self, key: &str, v: Value) -> Result<(), CliError> {
        if !KNOWN_KEYS.contains(&key) {
            return Err(CliError::Config(format!("override: unknown key '{key}'")));
        }
        self.values.insert(key.to_string(), v);
        self.overridden.push(key.to_string());
        Ok(())
    }

    pub fn contains(&self, key: &str) -> bool {
        self.values.contains_key(key)
    }

    pub fn raw(&self, key: &str) -> Option<&Value> {
        self.values.get(key)
    }

    /// Error message pointing at the line of `key` in the file.
    pub fn err(&self, key: &str, msg: &str) -> CliError {
        if self.overridden.iter().any(|k| k == key) {
            return CliError::Config(format!("override of '{key}': {msg}"));
        }
        let name = self.path.as_ref().map_or("<config>".to_string(), |p| p.display().to_string());
        match self.source.find(&format!("\"{key}\"")) {
            Some(off) => {
                let line = self.source[..off].matches('\n').count() + 1;
                CliError::Config(format!("{name}:{line}: '{key}': {msg}"))
            }
            None => CliError::Config(format!("{name}: '{key}': {msg}")),
        }
    }

    pub fn f64(&self, key: &str) -> Result<Option<f64>, CliError> {
        match self.values.get(key) {
            None => Ok(None),
            Some(v) => v.as_f64().map(Some).ok_or_else(|| self.err(key, "expected a number")),
        }
    }

    pub fn u64(&self, key: &str) -> Result<Option<u64>, CliError> {
        match self.values.get(key) {
            None => Ok(None),
            Some(v) => v.as_u64().map(Some).ok_or_else(|| self.err(key, "expected a non-negative integer")),
        }
    }

    pub fn usize(&self, key: &str) -> Result<Option<usize>, CliError> {
        Ok(self.u64(key)?.map(|v| v as usize))
    }

    pub fn bool(&self, key: &str) -> Result<Option<bool>, CliError> {
        match self.values.get(key) {
            None => Ok(None),
            Some(v) => v.as_bool().map(Some).ok_or_else(|| self.err(key, "expected true or false")),
        }
    }

    pub fn str(&self, key: &str) -> Result<Option<String>, CliError> {
        match self.values.get(key) {
            None => Ok(None),
            Some(Value::String(s)) => Ok(Some(s.clone())),
            Some(_) => Err(self.err(key, "expected a string")),
        }
    }

    pub fn require_f64(&self, key: &str) -> Result<f64, CliError> {
        self.f64(key)?.ok_or_else(|| self.err(key, "required"))
    }

    pub fn require_usize(&self, key: &str) -> Result<usize, CliError> {
        self.usize(key)?.ok_or_else(|| self.err(key, "required"))
    }

    pub fn point(&self, key: &str) -> Result<Option<Vec<f64>>, CliError> {
        match self.values.get(key) {
            None => Ok(None),
            Some(v) => self.as_point(key, v).map(Some),
        }
    }

    fn as_point(&self, key: &str, v: &Value) -> Result<Vec<f64>, CliError> {
        let arr = v.as_array().ok_or_else(|| self.err(key, "expected an array of numbers"))?;
        arr.iter().map(|t| t.as_f64().ok_or_else(|| self.err(key, "expected an array of numbers"))).collect()
    }

    pub fn points(&self, key: &str) -> Result<Option<Vec<Vec<f64>>>, CliError> {
        match self.values.get(key) {
            None => Ok(None),
            Some(v) => {
                let arr = v.as_array().ok_or_else(|| self.err(key, "expected an array of points"))?;
                arr.iter().map(|p| self.as_point(key, p)).collect::<Result<Vec<_>, _>>().map(Some)
            }
        }
    }

    pub fn usize_list(&self, key: &str) -> Result<Option<Vec<usize>>, CliError> {
        match self.values.get(key) {
            None => Ok(None),
            Some(v) => {
                let arr = v.as_array().ok_or_else(|| self.err(key, "expected an array of integers"))?;
                arr.iter()
                    .map(|t| t.as_u64().map(|u| u as usize).ok_or_else(|| self.err(key, "expected an array of integers")))
                    .collect::<Result<Vec<_>, _>>()
                    .map(Some)
            }
        }
    }

    /// `problem.f` / `problem.g` style entry: catalog name, expression text or number.
    pub fn expr(&self, key: &str, dim: usize, ball_radius: Option<f64>) -> Result<Option<Expr>, CliError> {
        let text = match self.values.get(key) {
            None => return Ok(None),
            Some(Value::Number(n)) => n.to_string(),
            Some(Value::String(s)) => match catalog::lookup(s.trim(), dim, ball_radius) {
                Some(Ok(t)) => t,
                Some(Err(e)) => return Err(self.err(key, &e)),
                None => s.clone(),
            },
            Some(_) => return Err(self.err(key, "expected an expression string or a number")),
        };
        let e = parse_expr(&text).map_err(|e| self.err(key, &e.to_string()))?;
        if e.max_var() > dim {
            return Err(self.err(key, &format!("expression uses x{} but domain.dim is {dim}", e.max_var())));
        }
        Ok(Some(e))
    }

    pub fn out(&self) -> Result<Option<PathBuf>, CliError> {
        Ok(self.str("out")?.map(PathBuf::from))
    }
}

/// The domain described by the `domain.*` keys, with dimension `dim`.
pub fn domain_with_dim(cfg: &Config, dim: usize) -> Result<Domain, CliError> {
    let kind = cfg.str("domain.kind")?.ok_or_else(|| cfg.err("domain.kind", "required"))?;
    let h = cfg.f64("domain.halfwidth")?.unwrap_or(1.0);
    let built = match kind.as_str() {
        "hypercube" => Domain::hypercube(h, dim),
        "annular_hypercube" => {
            let l1 = cfg.f64("domain.l1_radius")?.unwrap_or(0.5 * h);
            Domain::annular_hypercube(h, l1, dim)
        }
        "ball" => Domain::ball(cfg.f64("domain.radius")?.unwrap_or(1.0), dim),
        "annulus" => Domain::annulus(cfg.require_f64("domain.r0")?, cfg.require_f64("domain.r1")?, dim),
        other => {
            return Err(cfg.err(
                "domain.kind",
                &format!("unknown kind '{other}' (hypercube, annular_hypercube, ball, annulus)"),
            ))
        }
    };
    built.map_err(|e| cfg.err("domain.kind", &e.to_string()))
}

/// The configuration shared by all experiments.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub domain: Domain,
    /// `None` when `f ≡ 0`.
    pub f: Option<Expr>,
    pub g: Expr,
    pub exact: Option<Expr>,
    pub steps: Option<usize>,
    pub trajectories: Option<usize>,
    pub seed: u64,
    pub eps: Option<f64>,
    pub beta: f64,
    pub data: ProblemData,
    pub out: Option<PathBuf>,
}

impl RunConfig {
    pub fn from_config(cfg: &Config) -> Result<Self, CliError> {
        let dim = cfg.require_usize("domain.dim")?;
        let domain = domain_with_dim(cfg, dim)?;
        let radius = (cfg.str("domain.kind")?.as_deref() == Some("ball")).then(|| cfg.f64("domain.radius").ok().flatten().unwrap_or(1.0));
        let f = cfg.expr("problem.f", dim, radius)?;
        let f = f.filter(|e| e.constant_value() != Some(0.0));
        let g = cfg.expr("problem.g", dim, radius)?.unwrap_or(Expr::Num(0.0));
        let exact = cfg.expr("problem.exact", dim, radius)?;
        let beta = cfg.f64("solver.beta")?.unwrap_or(1.0);
        if !(beta > 0.0 && beta <= 1.0) {
            return Err(cfg.err("solver.beta", "must lie in (0, 1]"));
        }
        let eps = cfg.f64("solver.eps")?;
        if eps.is_some_and(|e| !(e > 0.0)) {
            return Err(cfg.err("solver.eps", "must be positive"));
        }

        let mut data = ProblemData::for_domain(&domain);
        data.beta = beta;
        data.r_tilde_lip = beta;
        let constant_f = f.as_ref().map_or(Some(0.0), Expr::constant_value);
        data.f_inf = match cfg.f64("problem.f_inf")? {
            Some(v) => v,
            None => constant_f.map_or(0.0, f64::abs),
        };
        if constant_f.is_some() {
            data.f_alpha = 0.0;
        }
        if let Some(c) = g.constant_value() {
            data.g_inf = c.abs();
            data.g_alpha = 0.0;
        }
        for (key, slot) in [
            ("problem.g_inf", &mut data.g_inf),
            ("problem.g_alpha", &mut data.g_alpha),
            ("problem.alpha", &mut data.alpha),
            ("problem.f_alpha", &mut data.f_alpha),
        ] {
            if let Some(v) = cfg.f64(key)? {
                *slot = v;
            }
        }
        data.lap_g_inf = cfg.f64("problem.lap_g_inf")?;
        data.validate().map_err(|e| CliError::Config(format!("problem data: {e}")))?;

        let seed = cfg.u64("solver.seed")?.unwrap_or(0);
        Ok(Self {
            domain,
            f,
            g,
            exact,
            steps: cfg.usize("solver.M")?,
            trajectories: cfg.usize("solver.N")?,
            seed,
            eps,
            beta,
            data,
            out: cfg.out()?,
        })
    }

    pub fn dim(&self) -> usize {
        self.domain.dim()
    }
}
