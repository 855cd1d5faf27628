//! Run configuration: a strict flat `key = value` file, plus the output header.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};

/// Version tags of the numerical modules, reported in every output header.
pub const MODULE_VERSIONS: [(&str, &str); 7] = [
    ("series", "1.0.0"),
    ("borel", "1.0.0"),
    ("ode", "1.0.0"),
    ("connection", "1.0.0"),
    ("pole_sector", "1.0.0"),
    ("cycles", "1.0.0"),
    ("cli", "1.0.0"),
];

/// Arithmetic used for numerical work. Series recurrences are always exact.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Backend {
    F64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RunConfig {
    pub backend: Backend,
    pub ode_tol: f64,
    pub quad_tol: f64,
    pub fit_tol: f64,
    pub n_series: usize,
    pub n_borel: usize,
    pub k_levels: usize,
    pub r: f64,
    pub delta: f64,
    pub eps: f64,
    pub out_dir: Option<PathBuf>,
    pub seed: u64,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            backend: Backend::F64,
            ode_tol: 1e-12,
            quad_tol: 1e-12,
            fit_tol: 1e-4,
            n_series: 200,
            n_borel: 200,
            k_levels: 8,
            r: 20.0,
            delta: 0.05,
            eps: 0.1,
            out_dir: None,
            seed: 0,
        }
    }
}

pub const KEYS: [&str; 12] = [
    "backend", "ode_tol", "quad_tol", "fit_tol", "n_series", "n_borel", "k_levels", "r", "delta", "eps", "out_dir", "seed",
];

fn parse_num<T: std::str::FromStr>(key: &str, v: &str) -> Result<T> {
    v.parse().map_err(|_| Error::Config(format!("{key}: cannot parse '{v}'")))
}

impl RunConfig {
    /// Parses `key = value` lines; `#` starts a comment. Unknown or repeated keys are errors.
    pub fn parse(text: &str) -> Result<Self> {
        let mut cfg = RunConfig::default();
        let mut seen = std::collections::BTreeSet::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| Error::Config(format!("line {}: expected key = value", i + 1)))?;
            let (k, v) = (k.trim(), v.trim());
            if !seen.insert(k.to_string()) {
                return Err(Error::Config(format!("line {}: duplicate key '{k}'", i + 1)));
            }
            cfg.set(k, v)?;
        }
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::parse(&text)
    }

    pub fn set(&mut self, key: &str, v: &str) -> Result<()> {
        match key {
            "backend" => {
                self.backend = match v {
                    "f64" => Backend::F64,
                    _ => return Err(Error::Config(format!("backend: unsupported '{v}'"))),
                }
            }
            "ode_tol" => self.ode_tol = parse_num(key, v)?,
            "quad_tol" => self.quad_tol = parse_num(key, v)?,
            "fit_tol" => self.fit_tol = parse_num(key, v)?,
            "n_series" => self.n_series = parse_num(key, v)?,
            "n_borel" => self.n_borel = parse_num(key, v)?,
            "k_levels" => self.k_levels = parse_num(key, v)?,
            "r" => self.r = parse_num(key, v)?,
            "delta" => self.delta = parse_num(key, v)?,
            "eps" => self.eps = parse_num(key, v)?,
            "out_dir" => self.out_dir = Some(PathBuf::from(v)),
            "seed" => self.seed = parse_num(key, v)?,
            _ => return Err(Error::Config(format!("unknown key '{key}'"))),
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<()> {
        for (k, t) in [("ode_tol", self.ode_tol), ("quad_tol", self.quad_tol), ("fit_tol", self.fit_tol)] {
            if !(t > 0.0 && t.is_finite()) {
                return Err(Error::Config(format!("{k} must be positive, got {t}")));
            }
        }
        if self.n_series < 4 {
            return Err(Error::Config(format!("n_series must be at least 4, got {}", self.n_series)));
        }
        if self.n_borel < 100 {
            return Err(Error::Config(format!("n_borel must be at least 100, got {}", self.n_borel)));
        }
        if self.k_levels < 1 {
            return Err(Error::Config("k_levels must be at least 1".into()));
        }
        for (k, t) in [("r", self.r), ("delta", self.delta), ("eps", self.eps)] {
            if !(t > 0.0 && t.is_finite()) {
                return Err(Error::Config(format!("{k} must be positive, got {t}")));
            }
        }
        Ok(())
    }

    /// Canonical text: every key in fixed order, floats in shortest round-trip form.
    pub fn canonical(&self) -> String {
        let out = self.out_dir.as_ref().map(|p| p.display().to_string()).unwrap_or_default();
        let vals = [
            "f64".to_string(),
            format!("{:?}", self.ode_tol),
            format!("{:?}", self.quad_tol),
            format!("{:?}", self.fit_tol),
            self.n_series.to_string(),
            self.n_borel.to_string(),
            self.k_levels.to_string(),
            format!("{:?}", self.r),
            format!("{:?}", self.delta),
            format!("{:?}", self.eps),
            out,
            self.seed.to_string(),
        ];
        KEYS.iter().zip(vals).map(|(k, v)| format!("{k} = {v}\n")).collect()
    }

    /// SHA-256 of the canonical text, hex encoded.
    pub fn hash(&self) -> String {
        let d = Sha256::digest(self.canonical().as_bytes());
        d.iter().map(|b| format!("{b:02x}")).collect()
    }
}

/// Header attached to every output.
#[derive(Clone, Debug, Serialize)]
pub struct Header {
    pub tool: String,
    pub version: String,
    pub command: String,
    pub config_hash: String,
    pub params: BTreeMap<String, String>,
    pub modules: BTreeMap<String, String>,
}

impl Header {
    pub fn new(cfg: &RunConfig, command: &str, params: BTreeMap<String, String>) -> Self {
        Header {
            tool: "tronquee".into(),
            version: env!("CARGO_PKG_VERSION").into(),
            command: command.into(),
            config_hash: cfg.hash(),
            params,
            modules: MODULE_VERSIONS.iter().map(|(k, v)| (k.to_string(), v.to_string())).collect(),
        }
    }

    /// `# key: value` lines for CSV output.
    pub fn comment_block(&self) -> String {
        let mut s = format!("# tool: {} {}\n# command: {}\n# config_hash: {}\n", self.tool, self.version, self.command, self.config_hash);
        for (k, v) in &self.params {
            s += &format!("# param {k}: {v}\n");
        }
        for (k, v) in &self.modules {
            s += &format!("# module {k}: {v}\n");
        }
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_round_trip() {
        let c = RunConfig::default();
        let back = RunConfig::parse(&c.canonical().replace("out_dir = \n", "")).unwrap();
        assert_eq!(back, c);
        assert_eq!(back.hash(), c.hash());
    }

    #[test]
    fn unknown_key_rejected() {
        let e = RunConfig::parse("ode_tol = 1e-10\nfoo = 3\n").unwrap_err();
        assert_eq!(e.kind(), "Config");
    }

    #[test]
    fn duplicate_and_malformed_rejected() {
        assert!(RunConfig::parse("r = 20\nr = 30\n").is_err());
        assert!(RunConfig::parse("r 20\n").is_err());
        assert!(RunConfig::parse("r = abc\n").is_err());
        assert!(RunConfig::parse("ode_tol = -1\n").is_err());
        assert!(RunConfig::parse("backend = mpfr\n").is_err());
    }

    #[test]
    fn comments_and_hash_sensitivity() {
        let a = RunConfig::parse("# comment\nr = 25 # trailing\n").unwrap();
        assert_eq!(a.r, 25.0);
        assert_ne!(a.hash(), RunConfig::default().hash());
    }
}
