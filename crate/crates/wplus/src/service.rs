//! Commands behind the CLI: single-prime verification, range scans and the
//! inspection commands.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;
use wplus_core::algebra::factor::factor;
use wplus_core::algebra::field::{is_prime, primes_between};
use wplus_core::algebra::{FpPoly, QExpansion};
use wplus_core::level1::minimal_precision;
use wplus_core::modsym::basis::minimal_basis_precision;
use wplus_core::modsym::{wt_infinity, ModSymError};
use wplus_core::supersingular::split::ss_polys_for;
use wplus_core::supersingular::{ss_oracle, SupersingularError};
use wplus_core::weierstrass::{verify, Artifacts, VerificationReport, WeierstrassError};

use crate::config::{Config, ConfigError};

pub const REPORT_SCHEMA: u32 = 1;
/// Exit code for malformed invocations.
pub const EXIT_USAGE: i32 = 64;

#[derive(Debug, Error)]
pub enum ServiceError {
    #[error("{0} is not a prime >= 5")]
    NotPrime(u64),
    #[error("empty or reversed range {0}..{1}")]
    BadRange(u64, u64),
    #[error("could not start worker pool: {0}")]
    Pool(String),
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    ModSym(#[from] ModSymError),
    #[error(transparent)]
    Supersingular(#[from] SupersingularError),
}

impl ServiceError {
    pub fn is_usage(&self) -> bool {
        matches!(
            self,
            ServiceError::NotPrime(_)
                | ServiceError::BadRange(..)
                | ServiceError::Config(_)
                | ServiceError::Supersingular(SupersingularError::InvalidDiscriminant(_))
        )
    }

    pub fn exit_code(&self) -> i32 {
        if self.is_usage() {
            EXIT_USAGE
        } else {
            3
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Pass,
    Falsified,
    NotGoodBasis,
    InternalError,
}

impl Status {
    pub fn exit_code(self) -> i32 {
        match self {
            Status::Pass => 0,
            Status::Falsified => 1,
            Status::NotGoodBasis => 2,
            Status::InternalError => 3,
        }
    }
}

pub fn status_of(result: &Result<VerificationReport, WeierstrassError>) -> Status {
    match result {
        Ok(r) if !r.good_basis => Status::NotGoodBasis,
        Ok(r) if !r.passed() => Status::Falsified,
        Ok(_) => Status::Pass,
        Err(e) if e.is_falsifier() => Status::Falsified,
        Err(_) => Status::InternalError,
    }
}

fn require_prime(p: u64) -> Result<(), ServiceError> {
    if p < 5 || !is_prime(p) {
        return Err(ServiceError::NotPrime(p));
    }
    Ok(())
}

pub fn run_verify(
    p: u64,
    config: &Config,
    art: &dyn Artifacts,
) -> Result<Result<VerificationReport, WeierstrassError>, ServiceError> {
    config.validate()?;
    require_prime(p)?;
    Ok(verify(p, &config.verify_options(), art))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct JsonPolys {
    pub modulus: u64,
    #[serde(rename = "S_p")]
    pub s_p: Vec<u64>,
    #[serde(rename = "S_l")]
    pub s_l: Vec<u64>,
    #[serde(rename = "S_q")]
    pub s_q: Vec<u64>,
    #[serde(rename = "H_p_mod_p")]
    pub h_p_mod_p: Vec<u64>,
    #[serde(rename = "F_p")]
    pub f_p: Vec<u64>,
    #[serde(rename = "H")]
    pub h: Vec<u64>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct JsonReport {
    pub schema: u32,
    pub p: u64,
    pub g_p: usize,
    pub g_plus: usize,
    pub pivots: Vec<i64>,
    pub wt_inf: i64,
    pub good_basis: bool,
    pub polys: JsonPolys,
    pub checks: BTreeMap<String, bool>,
    pub timings_ms: BTreeMap<String, u128>,
}

fn coeffs(f: &FpPoly) -> Vec<u64> {
    f.coeffs().to_vec()
}

impl JsonReport {
    pub fn from_report(r: &VerificationReport) -> Self {
        JsonReport {
            schema: REPORT_SCHEMA,
            p: r.p,
            g_p: r.g_p,
            g_plus: r.g,
            pivots: r.pivots.clone(),
            wt_inf: r.wt_inf,
            good_basis: r.good_basis,
            polys: JsonPolys {
                modulus: r.p,
                s_p: coeffs(&r.split.s_p),
                s_l: coeffs(&r.split.s_l),
                s_q: coeffs(&r.split.s_q),
                h_p_mod_p: coeffs(&r.h_p_mod_p),
                f_p: coeffs(&r.f_p),
                h: coeffs(&r.h),
            },
            checks: r.checks.iter().map(|(k, v)| (k.to_string(), *v)).collect(),
            timings_ms: r.timings_ms.iter().map(|(k, v)| (k.to_string(), *v)).collect(),
        }
    }
}

/// `unit * (f1)^e1 (f2)^e2 ...` over F_p.
pub fn factored(f: &FpPoly, seed: u64) -> String {
    if f.is_zero() {
        return "0".into();
    }
    let Ok(fac) = factor(f, seed) else {
        return f.to_string();
    };
    let mut out = String::new();
    if fac.unit != 1 || fac.factors.is_empty() {
        out.push_str(&fac.unit.to_string());
    }
    for (g, e) in &fac.factors {
        let body = if g.coeffs() == [0, 1] {
            "x".to_string()
        } else {
            format!("({g})")
        };
        out.push_str(&body);
        if *e > 1 {
            let _ = write!(out, "^{e}");
        }
    }
    out
}

fn shown(f: &QExpansion, through: i64) -> String {
    f.truncate((through + 1).min(f.precision())).to_string()
}

fn yes(b: bool) -> &'static str {
    if b {
        "yes"
    } else {
        "no"
    }
}

/// Human-readable report, in the order basis, Wronskian, F~, S_p, F_p, H.
pub fn render_text(r: &VerificationReport, seed: u64) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "p = {}  g_p = {}  g+ = {}", r.p, r.g_p, r.g);
    let _ = writeln!(
        s,
        "pivots = {:?}  wt_inf = {}  good basis: {}",
        r.pivots,
        r.wt_inf,
        yes(r.good_basis)
    );
    if let Some(b) = &r.basis {
        let through = r.pivots.last().copied().unwrap_or(0).max(8) + 2;
        let _ = writeln!(s, "\nbasis (precision {}):", b.precision);
        for (i, f) in b.forms.iter().enumerate() {
            let _ = writeln!(s, "  f{} = {}", i + 1, shown(f, through));
        }
    }
    if let Some(w) = &r.wronskian {
        let through = w.w_p.valuation() + 5;
        let _ = writeln!(s, "\nWronskian:");
        let _ = writeln!(s, "  W = {}", shown(&w.w_p, through));
        let _ = writeln!(s, "  V = {}  Vandermonde = {}  p-integral: {}", w.v, w.vandermonde, yes(w.p_integral));
    }
    if let Some(e) = &r.exponents {
        let _ = writeln!(s, "  eps = ({}, {})", e.eps_rho, e.eps_i);
    }
    if let Some(f) = &r.ftilde_wtilde {
        let _ = writeln!(s, "\nF~(W~, x) = {}", factored(f, seed));
    }
    let _ = writeln!(s, "\nS_p = {}", factored(&r.split.s_p, seed));
    let _ = writeln!(s, "  S_l = {}", factored(&r.split.s_l, seed));
    let _ = writeln!(s, "  S_q = {}", factored(&r.split.s_q, seed));
    let _ = writeln!(s, "  H_p mod p = {}", factored(&r.h_p_mod_p, seed));
    let _ = writeln!(s, "\nF_p = {}", factored(&r.f_p, seed));
    let _ = writeln!(s, "H = {}", r.h);
    let _ = writeln!(s, "\nchecks:");
    for (k, v) in &r.checks {
        let _ = writeln!(s, "  {:<28} {}", k, if *v { "pass" } else { "FAIL" });
    }
    let total: u128 = r.timings_ms.values().sum();
    let _ = writeln!(s, "time: {total} ms");
    s
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ScanEntry {
    pub p: u64,
    pub status: Status,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub report: Option<JsonReport>,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct ScanSummary {
    pub primes: usize,
    pub passed: usize,
    pub falsified: usize,
    pub not_good_basis: usize,
    pub internal_errors: usize,
    pub wt_inf_positive: Vec<u64>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ScanReport {
    pub schema: u32,
    pub range: (u64, u64),
    pub summary: ScanSummary,
    pub results: Vec<ScanEntry>,
}

impl ScanReport {
    /// 1 if anything was falsified, else 3 on internal errors, else 2 if
    /// some basis was not good, else 0.
    pub fn exit_code(&self) -> i32 {
        let s = &self.summary;
        if s.falsified > 0 {
            1
        } else if s.internal_errors > 0 {
            3
        } else if s.not_good_basis > 0 {
            2
        } else {
            0
        }
    }
}

pub fn scan_entry(p: u64, config: &Config, art: &dyn Artifacts) -> ScanEntry {
    let result = verify(p, &config.verify_options(), art);
    let status = status_of(&result);
    match result {
        Ok(r) => ScanEntry {
            p,
            status,
            error: None,
            report: Some(JsonReport::from_report(&r)),
        },
        Err(e) => ScanEntry {
            p,
            status,
            error: Some(e.to_string()),
            report: None,
        },
    }
}

/// Verifies every prime in `[a, b]` on `config.jobs` workers.
pub fn scan(a: u64, b: u64, config: &Config, art: &dyn Artifacts) -> Result<ScanReport, ServiceError> {
    config.validate()?;
    if a > b {
        return Err(ServiceError::BadRange(a, b));
    }
    let primes = primes_between(a.max(5), b);
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(config.jobs)
        .build()
        .map_err(|e| ServiceError::Pool(e.to_string()))?;
    let mut results: Vec<ScanEntry> =
        pool.install(|| primes.par_iter().map(|&p| scan_entry(p, config, art)).collect());
    results.sort_by_key(|e| e.p);
    let mut summary = ScanSummary {
        primes: results.len(),
        ..ScanSummary::default()
    };
    for e in &results {
        match e.status {
            Status::Pass => summary.passed += 1,
            Status::Falsified => summary.falsified += 1,
            Status::NotGoodBasis => summary.not_good_basis += 1,
            Status::InternalError => summary.internal_errors += 1,
        }
        if e.report.as_ref().is_some_and(|r| r.wt_inf > 0) {
            summary.wt_inf_positive.push(e.p);
        }
    }
    Ok(ScanReport {
        schema: REPORT_SCHEMA,
        range: (a, b),
        summary,
        results,
    })
}

pub fn render_scan_text(s: &ScanReport) -> String {
    let mut out = String::new();
    for e in &s.results {
        match &e.report {
            Some(r) => {
                let _ = writeln!(
                    out,
                    "p = {:<5} g+ = {:<3} wt_inf = {:<3} pivots = {:?}  {:?}",
                    e.p, r.g_plus, r.wt_inf, r.pivots, e.status
                );
            }
            None => {
                let _ = writeln!(out, "p = {:<5} {:?}: {}", e.p, e.status, e.error.as_deref().unwrap_or(""));
            }
        }
    }
    let m = &s.summary;
    let _ = writeln!(
        out,
        "{} primes: {} passed, {} falsified, {} without good basis, {} errors; wt_inf > 0 at {:?}",
        m.primes, m.passed, m.falsified, m.not_good_basis, m.internal_errors, m.wt_inf_positive
    );
    out
}

pub fn ssing_text(p: u64, config: &Config) -> Result<String, ServiceError> {
    require_prime(p)?;
    let split = ss_polys_for(p)?;
    let seed = config.rng_seed;
    let prec = minimal_precision(p as i64 - 1).map_err(SupersingularError::from)? + 2;
    let mut s = String::new();
    let _ = writeln!(s, "route: F~(E_{}, x) mod {p}, q-precision {prec}", p - 1);
    let _ = writeln!(s, "S_p = {}", factored(&split.s_p, seed));
    let _ = writeln!(s, "S_l = {}", factored(&split.s_l, seed));
    let _ = writeln!(s, "S_q = {}", factored(&split.s_q, seed));
    let _ = writeln!(s, "S~_p = {}", factored(&split.s_tilde, seed));
    let _ = writeln!(s, "alpha = ({}, {})  degree {}", split.alpha_rho, split.alpha_i, split.s_p.deg());
    if p <= config.oracle_bound {
        let agree = ss_oracle(p, config.oracle_bound)? == split.s_p;
        let _ = writeln!(s, "oracle (Legendre resultant and point counts): {}", if agree { "agrees" } else { "DISAGREES" });
    }
    Ok(s)
}

pub fn hilbert_text(d: u64, art: &dyn Artifacts) -> Result<String, ServiceError> {
    let c = art.class_poly(d)?;
    let mut s = String::new();
    let _ = writeln!(s, "route: j at reduced forms, fixed point with {} bits", c.float_precision_bits);
    let _ = writeln!(s, "h(-{d}) = {}  forms = {:?}", c.h, c.reduced_forms);
    let _ = writeln!(s, "H_{d} = {}", c.poly());
    Ok(s)
}

pub fn basis_text(p: u64, config: &Config, art: &dyn Artifacts) -> Result<String, ServiceError> {
    config.validate()?;
    require_prime(p)?;
    let prec = minimal_basis_precision(p) + config.precision_slack;
    let b = art.good_basis(p, prec)?;
    let mut s = String::new();
    let _ = writeln!(s, "route: +1 quotient of weight-2 modular symbols, precision {prec}");
    let _ = writeln!(
        s,
        "g+ = {}  pivots = {:?}  wt_inf = {}  p-integral: {}  good: {}",
        b.g,
        b.pivots,
        wt_infinity(&b),
        yes(b.p_integral),
        yes(b.is_good())
    );
    let through = b.pivots.last().copied().unwrap_or(0).max(8);
    for (i, f) in b.forms.iter().enumerate() {
        let _ = writeln!(s, "f{} = {}", i + 1, shown(f, through));
    }
    for blk in &b.galois_blocks {
        let _ = writeln!(s, "block dim {} via {}: {}", blk.dimension, blk.operator, blk.minpoly);
    }
    Ok(s)
}
