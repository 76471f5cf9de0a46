//! Run configuration.

use std::path::PathBuf;

use thiserror::Error;
use wplus_core::algebra::factor::DEFAULT_SEED;
use wplus_core::supersingular::classpoly::DEFAULT_MAX_FACTOR;
use wplus_core::supersingular::oracle::DEFAULT_ORACLE_BOUND;
use wplus_core::weierstrass::VerifyOptions;

/// Environment variable overriding the cache directory.
pub const CACHE_ENV: &str = "WPLUS_CACHE";

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ConfigError {
    #[error("jobs must be at least 1")]
    NoJobs,
    #[error("precision slack must be nonnegative, got {0}")]
    NegativeSlack(i64),
    #[error("float escalation factor must be at least 1")]
    NoEscalation,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Config {
    pub precision_slack: i64,
    pub oracle_bound: u64,
    /// `None` disables the on-disk cache.
    pub cache_dir: Option<PathBuf>,
    pub jobs: usize,
    pub paranoid: bool,
    /// Starting precision for CM evaluation; `None` picks it from D.
    pub float_start_bits: Option<u32>,
    pub float_max_factor: u32,
    pub rng_seed: u64,
}

impl Default for Config {
    fn default() -> Self {
        Config {
            precision_slack: 10,
            oracle_bound: DEFAULT_ORACLE_BOUND,
            cache_dir: None,
            jobs: std::thread::available_parallelism().map_or(1, |n| n.get()),
            paranoid: false,
            float_start_bits: None,
            float_max_factor: DEFAULT_MAX_FACTOR,
            rng_seed: DEFAULT_SEED,
        }
    }
}

impl Config {
    /// Default configuration with the cache directory taken from the environment.
    pub fn from_env() -> Self {
        Config {
            cache_dir: std::env::var_os(CACHE_ENV).map(PathBuf::from),
            ..Config::default()
        }
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.jobs == 0 {
            return Err(ConfigError::NoJobs);
        }
        if self.precision_slack < 0 {
            return Err(ConfigError::NegativeSlack(self.precision_slack));
        }
        if self.float_max_factor == 0 {
            return Err(ConfigError::NoEscalation);
        }
        Ok(())
    }

    pub fn verify_options(&self) -> VerifyOptions {
        VerifyOptions {
            slack: self.precision_slack,
            paranoid: self.paranoid,
            oracle_bound: self.oracle_bound,
            seed: self.rng_seed,
        }
    }
}
