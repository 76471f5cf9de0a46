//! On-disk JSON cache for the expensive intermediate objects.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use num_bigint::BigInt;
use serde::{Deserialize, Serialize};
use serde_json::Value;
use sha2::{Digest, Sha256};
use wplus_core::algebra::field::{parse_rat, rat_to_string, PrimeField, Rat, Rationals};
use wplus_core::algebra::{FpSeries, Poly, Series};
use wplus_core::modsym::{GaloisBlock, GoodBasis, ModSymError};
use wplus_core::supersingular::classpoly::{class_poly_with, start_bits};
use wplus_core::supersingular::{ClassPolyData, SupersingularError};
use wplus_core::weierstrass::lift::miller_mod_p;
use wplus_core::weierstrass::{Artifacts, WeierstrassError};

use crate::config::Config;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Kind {
    GoodBasis,
    ClassPoly,
    MillerBasis,
}

impl Kind {
    fn dir_name(self) -> &'static str {
        match self {
            Kind::GoodBasis => "good_basis",
            Kind::ClassPoly => "class_poly",
            Kind::MillerBasis => "miller_basis",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CacheEntry {
    pub schema_version: u32,
    pub kind: Kind,
    pub key: String,
    pub payload: Value,
    pub checksum: String,
}

/// Hex SHA-256 of the compact serialization of `payload`.
pub fn checksum(payload: &Value) -> String {
    hex::encode(Sha256::digest(payload.to_string().as_bytes()))
}

impl CacheEntry {
    pub fn new(kind: Kind, key: &str, payload: Value) -> Self {
        CacheEntry {
            schema_version: SCHEMA_VERSION,
            kind,
            key: key.to_string(),
            checksum: checksum(&payload),
            payload,
        }
    }

    pub fn is_valid_for(&self, kind: Kind, key: &str) -> bool {
        self.schema_version == SCHEMA_VERSION
            && self.kind == kind
            && self.key == key
            && self.checksum == checksum(&self.payload)
    }
}

#[derive(Clone, Debug)]
pub struct Cache {
    dir: PathBuf,
}

impl Cache {
    pub fn new(dir: impl Into<PathBuf>) -> Self {
        Cache { dir: dir.into() }
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    pub fn path(&self, kind: Kind, key: &str) -> PathBuf {
        let name: String = key
            .chars()
            .map(|c| if c.is_ascii_alphanumeric() { c } else { '_' })
            .collect();
        self.dir.join(kind.dir_name()).join(format!("{name}.json"))
    }

    /// Payload of a valid entry; anything unreadable, stale or corrupt is a miss.
    pub fn load(&self, kind: Kind, key: &str) -> Option<Value> {
        let text = fs::read_to_string(self.path(kind, key)).ok()?;
        let entry: CacheEntry = serde_json::from_str(&text).ok()?;
        entry.is_valid_for(kind, key).then_some(entry.payload)
    }

    /// Writes through a temporary file in the target directory, then renames.
    pub fn store(&self, kind: Kind, key: &str, payload: Value) -> std::io::Result<()> {
        let path = self.path(kind, key);
        let parent = path.parent().expect("cache paths have a parent");
        fs::create_dir_all(parent)?;
        let entry = CacheEntry::new(kind, key, payload);
        let mut tmp = tempfile::NamedTempFile::new_in(parent)?;
        serde_json::to_writer(&mut tmp, &entry)?;
        tmp.flush()?;
        tmp.persist(&path).map_err(|e| e.error)?;
        Ok(())
    }
}

fn rats_to_json(v: &[Rat]) -> Value {
    Value::Array(v.iter().map(|r| Value::String(rat_to_string(r))).collect())
}

fn json_to_rats(v: &Value) -> Option<Vec<Rat>> {
    v.as_array()?
        .iter()
        .map(|x| parse_rat(x.as_str()?).ok())
        .collect()
}

pub fn encode_good_basis(b: &GoodBasis) -> Value {
    let blocks: Vec<Value> = b
        .galois_blocks
        .iter()
        .map(|blk| {
            serde_json::json!({
                "dimension": blk.dimension,
                "operator": blk.operator,
                "minpoly": rats_to_json(blk.minpoly.coeffs()),
            })
        })
        .collect();
    serde_json::json!({
        "p": b.p,
        "g": b.g,
        "precision": b.precision,
        "pivots": b.pivots,
        "hasse_ok": b.hasse_ok,
        "rows": b.rows().iter().map(|r| rats_to_json(r)).collect::<Vec<_>>(),
        "galois_blocks": blocks,
    })
}

pub fn decode_good_basis(v: &Value) -> Option<GoodBasis> {
    let p = v.get("p")?.as_u64()?;
    let precision = v.get("precision")?.as_i64()?;
    let hasse_ok = v.get("hasse_ok")?.as_bool()?;
    let rows = v
        .get("rows")?
        .as_array()?
        .iter()
        .map(json_to_rats)
        .collect::<Option<Vec<_>>>()?;
    let blocks = v
        .get("galois_blocks")?
        .as_array()?
        .iter()
        .map(|blk| {
            Some(GaloisBlock {
                dimension: blk.get("dimension")?.as_u64()? as usize,
                operator: blk.get("operator")?.as_str()?.to_string(),
                minpoly: Poly::new(Rationals, json_to_rats(blk.get("minpoly")?)?),
            })
        })
        .collect::<Option<Vec<_>>>()?;
    let b = GoodBasis::from_rows(p, precision, rows, blocks, hasse_ok).ok()?;
    let pivots: Vec<i64> = serde_json::from_value(v.get("pivots")?.clone()).ok()?;
    (b.pivots == pivots && b.g == v.get("g")?.as_u64()? as usize).then_some(b)
}

pub fn encode_class_poly(c: &ClassPolyData) -> Value {
    serde_json::json!({
        "d": c.d,
        "h": c.h,
        "reduced_forms": c.reduced_forms,
        "coeffs": c.coeffs.iter().map(|x| x.to_string()).collect::<Vec<_>>(),
        "float_precision_bits": c.float_precision_bits,
    })
}

pub fn decode_class_poly(v: &Value) -> Option<ClassPolyData> {
    let coeffs = v
        .get("coeffs")?
        .as_array()?
        .iter()
        .map(|x| x.as_str()?.parse::<BigInt>().ok())
        .collect::<Option<Vec<_>>>()?;
    let c = ClassPolyData {
        d: v.get("d")?.as_u64()?,
        h: v.get("h")?.as_u64()? as usize,
        reduced_forms: serde_json::from_value(v.get("reduced_forms")?.clone()).ok()?,
        coeffs,
        float_precision_bits: v.get("float_precision_bits")?.as_u64()? as u32,
    };
    (c.h == c.reduced_forms.len() && c.coeffs.len() == c.h + 1).then_some(c)
}

pub fn encode_miller(p: u64, prec: i64, basis: &[FpSeries]) -> Value {
    let rows: Vec<Vec<String>> = basis
        .iter()
        .map(|f| f.coeffs_range(0, prec).iter().map(|c| c.to_string()).collect())
        .collect();
    serde_json::json!({
        "p": p,
        "precision": prec,
        "weight": basis.first().map_or(p as i64 + 1, |f| f.weight()),
        "rows": rows,
    })
}

pub fn decode_miller(v: &Value) -> Option<Vec<FpSeries>> {
    let field = PrimeField::new(v.get("p")?.as_u64()?).ok()?;
    let prec = v.get("precision")?.as_i64()?;
    let weight = v.get("weight")?.as_i64()?;
    v.get("rows")?
        .as_array()?
        .iter()
        .map(|row| {
            let coeffs = row
                .as_array()?
                .iter()
                .map(|c| {
                    let c: u64 = c.as_str()?.parse().ok()?;
                    (c < field.modulus()).then_some(c)
                })
                .collect::<Option<Vec<_>>>()?;
            (coeffs.len() as i64 == prec).then(|| Series::from_coeffs(field, 0, coeffs, prec).with_weight(weight))
        })
        .collect()
}

/// Artifact source that consults the cache first and fills it on a miss.
#[derive(Clone, Debug)]
pub struct CachedArtifacts {
    cache: Option<Cache>,
    float_start_bits: Option<u32>,
    float_max_factor: u32,
}

impl CachedArtifacts {
    pub fn new(config: &Config) -> Self {
        CachedArtifacts {
            cache: config.cache_dir.as_ref().map(Cache::new),
            float_start_bits: config.float_start_bits,
            float_max_factor: config.float_max_factor,
        }
    }

    pub fn cache(&self) -> Option<&Cache> {
        self.cache.as_ref()
    }

    fn through<T, E>(
        &self,
        kind: Kind,
        key: &str,
        decode: impl Fn(&Value) -> Option<T>,
        encode: impl Fn(&T) -> Value,
        compute: impl Fn() -> Result<T, E>,
    ) -> Result<T, E> {
        let Some(cache) = &self.cache else {
            return compute();
        };
        if let Some(hit) = cache.load(kind, key).as_ref().and_then(decode) {
            return Ok(hit);
        }
        let value = compute()?;
        // A failed write only costs time on the next run.
        let _ = cache.store(kind, key, encode(&value));
        Ok(value)
    }
}

impl Artifacts for CachedArtifacts {
    fn good_basis(&self, p: u64, prec: i64) -> Result<GoodBasis, ModSymError> {
        self.through(
            Kind::GoodBasis,
            &format!("p{p}_prec{prec}"),
            decode_good_basis,
            encode_good_basis,
            || wplus_core::modsym::good_basis(p, prec),
        )
    }

    fn class_poly(&self, d: u64) -> Result<ClassPolyData, SupersingularError> {
        self.through(Kind::ClassPoly, &format!("d{d}"), decode_class_poly, encode_class_poly, || {
            let start = match self.float_start_bits {
                Some(b) => b,
                None => start_bits(d)?,
            };
            class_poly_with(d, start, self.float_max_factor)
        })
    }

    fn miller_mod_p(&self, p: u64, prec: i64) -> Result<Vec<FpSeries>, WeierstrassError> {
        self.through(
            Kind::MillerBasis,
            &format!("p{p}_prec{prec}"),
            decode_miller,
            |b: &Vec<FpSeries>| encode_miller(p, prec, b),
            || miller_mod_p(p, prec),
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn checksum_detects_edits() {
        let e = CacheEntry::new(Kind::ClassPoly, "d7", serde_json::json!({"coeffs": ["3375", "1"]}));
        assert!(e.is_valid_for(Kind::ClassPoly, "d7"));
        let mut bad = e.clone();
        bad.payload = serde_json::json!({"coeffs": ["3376", "1"]});
        assert!(!bad.is_valid_for(Kind::ClassPoly, "d7"));
        let mut old = e.clone();
        old.schema_version = 0;
        assert!(!old.is_valid_for(Kind::ClassPoly, "d7"));
        assert!(!e.is_valid_for(Kind::GoodBasis, "d7"));
    }

    #[test]
    fn kind_serializes_snake_case() {
        assert_eq!(serde_json::to_string(&Kind::MillerBasis).unwrap(), "\"miller_basis\"");
    }

    #[test]
    fn class_poly_payload_round_trip() {
        let c = wplus_core::supersingular::class_poly(23).unwrap();
        assert_eq!(decode_class_poly(&encode_class_poly(&c)), Some(c));
    }

    #[test]
    fn good_basis_payload_round_trip() {
        let b = wplus_core::modsym::good_basis(67, 20).unwrap();
        assert_eq!(decode_good_basis(&encode_good_basis(&b)), Some(b));
    }

    #[test]
    fn miller_payload_round_trip() {
        let m = miller_mod_p(67, 30).unwrap();
        assert_eq!(decode_miller(&encode_miller(67, 30, &m)), Some(m));
    }
}
