//! Verification service for the mod-p divisor of Weierstrass points on X0+(p).

pub mod cache;
pub mod config;
pub mod service;

pub use cache::{Cache, CacheEntry, CachedArtifacts, Kind};
pub use config::Config;
pub use service::{run_verify, scan, status_of, JsonReport, ScanReport, ServiceError, Status};
