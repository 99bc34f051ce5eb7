//! System configuration: flat key-value config files, defaults, validation,
//! and the canonical hash echoed into every emitted row.
//!
//! Keys are the system symbols transliterated: `lambda_b`, `R_h`, `alpha`,
//! `P_t`, `P_b`, `W`, `M`, `N`, `gamma`, `beta`, plus the experiment keys
//! `R_d` (comma-separated rate sweep), `K_list`, `seed`, `n_realizations`,
//! `budget`, `cluster_mode`, and `window`. Missing keys take the defaults
//! below; an empty file is the default system.

use crate::error::{Error, Result};
use crate::field::{ClusterGeometry, PathlossModel};
use crate::optimizer::PowerModel;
use crate::popularity::ZipfPopularity;
use crate::sim::{ClusterMode, SimProtocol};
use sha2::{Digest, Sha256};
use std::path::Path;

#[derive(Debug, Clone, PartialEq)]
pub struct SystemConfig {
    /// SBS density, points per square meter.
    pub lambda_b: f64,
    /// Half inter-cluster center distance, meters.
    pub r_h: f64,
    /// Pathloss exponent.
    pub alpha: f64,
    /// SBS transmit power, watts.
    pub p_t: f64,
    /// Backhaul power per request per SBS, watts.
    pub p_b: f64,
    /// Available bandwidth, Hz.
    pub bandwidth: f64,
    /// Per-SBS cache capacity, files.
    pub capacity: u64,
    /// Content library size, files.
    pub library: u64,
    /// Zipf shape parameter.
    pub gamma: f64,
    /// Transmission time fraction left after backhaul delay.
    pub beta: f64,
    /// Target rate sweep, bit/s.
    pub rates: Vec<f64>,
    /// Base seed for every estimator and simulation.
    pub seed: u64,
    /// Simulator realizations per estimate.
    pub n_realizations: u64,
    /// Monte Carlo distance draws per analytic estimate.
    pub budget: u64,
    /// Cluster sizes swept by per-K figures.
    pub k_list: Vec<u32>,
    /// Origin cluster shape for the simulator.
    pub cluster_mode: ClusterMode,
    /// Simulation window side, meters.
    pub window: f64,
}

impl Default for SystemConfig {
    fn default() -> Self {
        // 25 log-spaced target rates over 1..50 Mbit/s
        let rates = (0..25).map(|i| 1e6 * 50f64.powf(i as f64 / 24.0)).collect();
        Self {
            lambda_b: 1e-4,
            r_h: 100.0,
            alpha: 4.0,
            p_t: 1.0,
            p_b: 10.0,
            bandwidth: 1e7,
            capacity: 5000,
            library: 100_000,
            gamma: 0.5,
            beta: 0.95,
            rates,
            seed: 42,
            n_realizations: 40_000,
            budget: 200_000,
            k_list: vec![2, 3, 4],
            cluster_mode: ClusterMode::Hexagon,
            window: 1000.0,
        }
    }
}

fn parse_f64(key: &str, value: &str, line: usize) -> Result<f64> {
    value.trim().parse::<f64>().map_err(|_| Error::ConfigParse {
        line,
        message: format!("key '{key}': '{value}' is not a number"),
    })
}

fn parse_u64(key: &str, value: &str, line: usize) -> Result<u64> {
    if let Ok(v) = value.trim().parse::<u64>() {
        return Ok(v);
    }
    // allow scientific notation (N = 1e5) up to where f64 is still exact
    let v = parse_f64(key, value, line)?;
    if v < 0.0 || v.fract() != 0.0 || v > 9_007_199_254_740_992.0 {
        return Err(Error::ConfigParse {
            line,
            message: format!("key '{key}': '{value}' is not a non-negative integer"),
        });
    }
    Ok(v as u64)
}

fn parse_f64_list(key: &str, value: &str, line: usize) -> Result<Vec<f64>> {
    value
        .split(',')
        .map(|item| parse_f64(key, item, line))
        .collect()
}

fn parse_u32_list(key: &str, value: &str, line: usize) -> Result<Vec<u32>> {
    value
        .split(',')
        .map(|item| {
            let v = parse_u64(key, item, line)?;
            u32::try_from(v).map_err(|_| Error::ConfigParse {
                line,
                message: format!("key '{key}': '{item}' exceeds the u32 range"),
            })
        })
        .collect()
}

impl SystemConfig {
    /// Apply one `key = value` assignment. `line` feeds parse errors; use 0
    /// for programmatic overrides.
    fn set(&mut self, key: &str, value: &str, line: usize) -> Result<()> {
        match key {
            "lambda_b" => self.lambda_b = parse_f64(key, value, line)?,
            "R_h" => self.r_h = parse_f64(key, value, line)?,
            "alpha" => self.alpha = parse_f64(key, value, line)?,
            "P_t" => self.p_t = parse_f64(key, value, line)?,
            "P_b" => self.p_b = parse_f64(key, value, line)?,
            "W" => self.bandwidth = parse_f64(key, value, line)?,
            "M" => self.capacity = parse_u64(key, value, line)?,
            "N" => self.library = parse_u64(key, value, line)?,
            "gamma" => self.gamma = parse_f64(key, value, line)?,
            "beta" => self.beta = parse_f64(key, value, line)?,
            "R_d" => self.rates = parse_f64_list(key, value, line)?,
            "seed" => self.seed = parse_u64(key, value, line)?,
            "n_realizations" => self.n_realizations = parse_u64(key, value, line)?,
            "budget" => self.budget = parse_u64(key, value, line)?,
            "K_list" => self.k_list = parse_u32_list(key, value, line)?,
            "cluster_mode" => {
                self.cluster_mode =
                    ClusterMode::parse(value.trim()).map_err(|_| Error::ConfigParse {
                        line,
                        message: format!("key '{key}': '{value}' is not 'hexagon' or 'disc'"),
                    })?
            }
            "window" => self.window = parse_f64(key, value, line)?,
            _ => {
                return Err(Error::UnknownKey {
                    key: key.to_string(),
                })
            }
        }
        Ok(())
    }

    /// Apply a `key=value` override (CLI `--set`).
    pub fn apply_override(&mut self, assignment: &str) -> Result<()> {
        let (key, value) = assignment.split_once('=').ok_or_else(|| {
            Error::Argument(format!(
                "override '{assignment}' is not of the form key=value"
            ))
        })?;
        self.set(key.trim(), value.trim(), 0)
    }

    /// Every Table-style constraint, each error naming the offending key.
    pub fn validate(&self) -> Result<()> {
        let err = |key: &str, message: String| {
            Err(Error::ConfigValue {
                key: key.into(),
                message,
            })
        };
        if !(self.lambda_b > 0.0) {
            return err("lambda_b", "SBS density must be positive".into());
        }
        if !(self.r_h > 0.0) {
            return err("R_h", "half spacing must be positive".into());
        }
        if !(self.alpha > 2.0) {
            return err("alpha", "alpha must exceed 2".into());
        }
        if !(self.p_t > 0.0) {
            return err("P_t", "transmit power must be positive".into());
        }
        if !(self.p_b >= 0.0) {
            return err("P_b", "backhaul power must be >= 0".into());
        }
        if !(self.bandwidth > 0.0) {
            return err("W", "bandwidth must be positive".into());
        }
        if self.library < 1 {
            return err("N", "library size must be >= 1".into());
        }
        if self.capacity > self.library {
            return err(
                "M",
                format!(
                    "cache capacity {} exceeds library size {}",
                    self.capacity, self.library
                ),
            );
        }
        if !(self.gamma >= 0.0) {
            return err("gamma", "Zipf shape must be >= 0".into());
        }
        if !(self.beta > 0.0 && self.beta <= 1.0) {
            return err("beta", format!("beta {} outside (0, 1]", self.beta));
        }
        if self.rates.is_empty() || self.rates.iter().any(|&r| !(r > 0.0)) {
            return err("R_d", "rate sweep must be non-empty and positive".into());
        }
        if self.k_list.is_empty() || self.k_list.iter().any(|&k| k < 1) {
            return err("K_list", "cluster sizes must be non-empty and >= 1".into());
        }
        if self.n_realizations < 1 {
            return err("n_realizations", "need at least one realization".into());
        }
        if self.budget < 1 {
            return err("budget", "Monte Carlo budget must be >= 1".into());
        }
        if !(self.window >= 4.0 * self.r_h) {
            return err(
                "window",
                format!(
                    "window side {} must be >= 4 * R_h = {}",
                    self.window,
                    4.0 * self.r_h
                ),
            );
        }
        Ok(())
    }

    /// Canonical flat rendering: fixed key order, shortest-roundtrip floats.
    pub fn canonical_string(&self) -> String {
        let rates = self
            .rates
            .iter()
            .map(|r| r.to_string())
            .collect::<Vec<_>>()
            .join(",");
        let ks = self
            .k_list
            .iter()
            .map(|k| k.to_string())
            .collect::<Vec<_>>()
            .join(",");
        format!(
            "lambda_b = {}\nR_h = {}\nalpha = {}\nP_t = {}\nP_b = {}\nW = {}\nM = {}\nN = {}\ngamma = {}\nbeta = {}\nR_d = {}\nseed = {}\nn_realizations = {}\nbudget = {}\nK_list = {}\ncluster_mode = {}\nwindow = {}\n",
            self.lambda_b,
            self.r_h,
            self.alpha,
            self.p_t,
            self.p_b,
            self.bandwidth,
            self.capacity,
            self.library,
            self.gamma,
            self.beta,
            rates,
            self.seed,
            self.n_realizations,
            self.budget,
            ks,
            self.cluster_mode,
            self.window,
        )
    }

    /// First 16 hex digits of the SHA-256 of the canonical rendering; rows
    /// emitted under different configs are thereby distinguishable.
    pub fn hash(&self) -> String {
        let digest = Sha256::digest(self.canonical_string().as_bytes());
        digest[..8].iter().map(|b| format!("{b:02x}")).collect()
    }

    /// Human-readable echo of the resolved parameters and the derived
    /// geometry.
    pub fn validation_report(&self) -> String {
        let geom = ClusterGeometry::new(self.r_h, self.lambda_b).expect("validated configuration");
        format!(
            "{}derived: area = {:.3} m^2, disc radius R = {:.1} m, mean cluster size = {:.4}, empty-cluster probability = {:.4}\n",
            self.canonical_string(),
            geom.area(),
            geom.disc_radius(),
            geom.mean_cluster_size(),
            geom.cluster_size_pmf(0),
        )
    }

    pub fn geometry(&self) -> Result<ClusterGeometry> {
        ClusterGeometry::new(self.r_h, self.lambda_b)
    }

    pub fn pathloss(&self) -> Result<PathlossModel> {
        PathlossModel::new(self.alpha)
    }

    pub fn power(&self) -> Result<PowerModel> {
        PowerModel::new(self.p_t, self.p_b)
    }

    pub fn popularity(&self) -> Result<ZipfPopularity> {
        ZipfPopularity::new(self.library, self.gamma)
    }

    /// Simulator protocol conditioned on `k` cooperators.
    pub fn protocol(&self, k: Option<u32>) -> Result<SimProtocol> {
        SimProtocol::new(
            self.window,
            self.n_realizations,
            self.cluster_mode,
            k,
            self.seed,
        )
    }
}

/// Parse a config from flat `key = value` text. `#` starts a comment; blank
/// lines are skipped; later assignments win. The result is validated.
pub fn parse_config_str(text: &str) -> Result<SystemConfig> {
    let mut config = SystemConfig::default();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let (key, value) = content.split_once('=').ok_or(Error::ConfigParse {
            line,
            message: format!("expected 'key = value', got '{content}'"),
        })?;
        config
            .set(key.trim(), value.trim(), line)
            .map_err(|e| match e {
                Error::UnknownKey { key } => Error::ConfigParse {
                    line,
                    message: format!("unknown key '{key}'"),
                },
                other => other,
            })?;
    }
    config.validate()?;
    Ok(config)
}

/// Load and validate a config file.
pub fn load_config(path: &Path) -> Result<SystemConfig> {
    parse_config_str(&std::fs::read_to_string(path)?)
}
