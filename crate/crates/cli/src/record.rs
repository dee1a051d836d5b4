use std::collections::BTreeMap;
use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};

use ergolab::ergodic::{DensityReport, ErrorSeries, ExponentFit, MonotoneReport, RatioStat};
use ergolab::spaces::DimensionCertificate;
use ergolab::{Error, Result};

use crate::config::ExperimentConfig;

/// Everything a run produces that is reproducible byte-for-byte from the
/// config and seed. Serialized to `payload.json` and hashed.
#[derive(Clone, Debug, Default, Serialize, Deserialize)]
pub struct Payload {
    pub config_echo: serde_json::Value,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub series: Vec<ErrorSeries>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub fits: BTreeMap<String, ExponentFit>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub ratios: Vec<RatioStat>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub densities: Vec<DensityReport>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub monotone: Option<MonotoneReport>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub certificates: BTreeMap<String, serde_json::Value>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dimension: Option<DimensionCertificate>,
    /// Exact element counts per enumeration, keyed by a stable name.
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub element_counts: BTreeMap<String, u64>,
    /// Scalar audit values (mass bounds, chi-square statistics, ...).
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub scalars: BTreeMap<String, f64>,
}

/// A versioned experiment record: the deterministic payload plus
/// non-reproducible metadata (wall-clock).
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ResultRecord {
    pub code_version: String,
    pub payload_hash: String,
    pub wall_ms: u128,
    pub payload: Payload,
}

impl ResultRecord {
    pub fn new(payload: Payload, wall_ms: u128) -> Result<Self> {
        let hash = payload_hash(&payload)?;
        Ok(ResultRecord {
            code_version: env!("CARGO_PKG_VERSION").to_string(),
            payload_hash: hash,
            wall_ms,
            payload,
        })
    }

    /// Write `record.json`, `payload.json` and one CSV per series,
    /// ratio and density table into the directory.
    pub fn write_to(&self, dir: &Path, config: &ExperimentConfig) -> Result<()> {
        std::fs::create_dir_all(dir).map_err(io_err)?;
        let payload_bytes = canonical_json(&self.payload)?;
        std::fs::write(dir.join("payload.json"), &payload_bytes).map_err(io_err)?;
        let record_bytes =
            serde_json::to_vec_pretty(self).map_err(|e| Error::Config(e.to_string()))?;
        std::fs::write(dir.join("record.json"), record_bytes).map_err(io_err)?;

        for (i, series) in self.payload.series.iter().enumerate() {
            let path = dir.join(format!("series_{i:02}_{}.csv", sanitize(&series.meta.function)));
            let mut out = Vec::new();
            writeln!(out, "t,value,norm,meta_hash").map_err(io_err)?;
            let mh = fnv1a(format!("{:?}", series.meta).as_bytes());
            for &(t, e) in &series.entries {
                writeln!(out, "{t},{e},{:?},{mh:016x}", series.norm).map_err(io_err)?;
            }
            std::fs::write(path, out).map_err(io_err)?;
        }
        for (i, ratio) in self.payload.ratios.iter().enumerate() {
            let path = dir.join(format!("ratio_{i:02}.csv"));
            let mut out = Vec::new();
            writeln!(out, "t,n1,n2,ratio").map_err(io_err)?;
            for &(t, n1, n2) in &ratio.counts {
                let r = if n2 > 0 { (n1 as f64 / n2 as f64).to_string() } else { "nan".into() };
                writeln!(out, "{t},{n1},{n2},{r}").map_err(io_err)?;
            }
            std::fs::write(path, out).map_err(io_err)?;
        }
        for (i, density) in self.payload.densities.iter().enumerate() {
            let path = dir.join(format!("density_{i:02}.csv"));
            let mut out = Vec::new();
            writeln!(out, "t,cell,r_mid,area,count,mass").map_err(io_err)?;
            for h in &density.histograms {
                for (cell, (&c, &m)) in h.counts.iter().zip(&h.masses).enumerate() {
                    writeln!(
                        out,
                        "{},{cell},{},{},{c},{m}",
                        h.t,
                        density.binning.cell_radius(cell),
                        density.binning.cell_area(cell),
                    )
                    .map_err(io_err)?;
                }
            }
            std::fs::write(path, out).map_err(io_err)?;
        }
        let _ = config;
        Ok(())
    }
}

fn sanitize(s: &str) -> String {
    s.chars().map(|c| if c.is_ascii_alphanumeric() { c } else { '_' }).take(32).collect()
}

fn io_err(e: std::io::Error) -> Error {
    Error::Config(format!("io: {e}"))
}

/// Canonical payload bytes: serde_json with default (stable) formatting;
/// map keys use BTreeMap so ordering is fixed.
pub fn canonical_json<T: Serialize>(value: &T) -> Result<Vec<u8>> {
    serde_json::to_vec(value).map_err(|e| Error::Config(e.to_string()))
}

/// FNV-1a hash of the canonical payload bytes, as a hex string.
pub fn payload_hash(payload: &Payload) -> Result<String> {
    Ok(format!("{:016x}", fnv1a(&canonical_json(payload)?)))
}

fn fnv1a(bytes: &[u8]) -> u64 {
    let mut h: u64 = 0xcbf29ce484222325;
    for &b in bytes {
        h ^= b as u64;
        h = h.wrapping_mul(0x100000001b3);
    }
    h
}

/// Point-cloud CSV export of a space sample: space tag, coordinates and
/// weight per row.
pub fn write_point_cloud(space: &ergolab::spaces::Space, n: usize, seed: u64, path: &Path) -> Result<()> {
    let mut out = Vec::new();
    writeln!(out, "space,x,y,z,weight").map_err(io_err)?;
    for (p, w) in space.sample(n, seed) {
        let (x, y, z) = match p {
            ergolab::spaces::Point::Vec3(v) => (v[0], v[1], v[2]),
            ergolab::spaces::Point::Vec2(v) => (v[0], v[1], 0.0),
            ergolab::spaces::Point::Angle(a) => (a, 0.0, 0.0),
            ergolab::spaces::Point::Index(i) => (i as f64, 0.0, 0.0),
        };
        writeln!(out, "{},{x},{y},{z},{w}", space.kind_tag()).map_err(io_err)?;
    }
    std::fs::write(path, out).map_err(io_err)?;
    Ok(())
}

/// CSV dump of an enumerated norm ball: `a,b,c,d,norm` per element in
/// enumeration order, for cross-language diffing.
pub fn write_ball_csv(norm_bound: f64, budget: u64, path: &Path) -> Result<()> {
    let ball = ergolab::matgroup::Sl2Ball::new(norm_bound)?;
    let mut out = Vec::new();
    writeln!(out, "a,b,c,d,norm").map_err(io_err)?;
    ball.visit(budget, |g| {
        let norm = g.norm(ergolab::matgroup::MatrixNorm::Euclidean);
        writeln!(out, "{},{},{},{},{norm}", g.a, g.b, g.c, g.d).expect("vec write");
    })?;
    std::fs::write(path, out).map_err(io_err)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hash_is_stable_and_sensitive() {
        let mut p = Payload::default();
        p.scalars.insert("x".into(), 1.5);
        let h1 = payload_hash(&p).unwrap();
        let h2 = payload_hash(&p).unwrap();
        assert_eq!(h1, h2);
        p.scalars.insert("x".into(), 1.5000001);
        assert_ne!(h1, payload_hash(&p).unwrap());
    }
}
