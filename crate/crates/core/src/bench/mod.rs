//! Declarative experiments: a flat TOML config in, a CSV curve plus a JSON sidecar out.
//!
//! ```toml
//! code = "lcs:1:3"           # or "lcs:ELL:L:J", "surface:ELL:L"
//! noise = "code_capacity"    # phenomenological | circuit_level
//! decoder = "mle"            # or "bposd"
//! p_grid = [0.06, 0.07, 0.08]
//! shots = 100000
//! seed = 7
//! output = "out/lcs13.csv"   # optional
//! ```
//!
//! Optional keys: `q` (syndrome flip rate, default `p`), `rounds` (noisy
//! rounds or cycles, default the code distance), `basis` (`"Z"` or `"X"`,
//! circuit memory basis), `bp_max_iter`, `osd_order`.

mod fit;

use std::fs::File;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::circuit::{memory_experiment, sample_circuit_level};
use crate::code::Pauli;
use crate::decode::{BposdParams, DecoderSpec};
use crate::error::{Error, Result};
use crate::product::CodeSpec;
use crate::sampling::{per_cycle_rate, sample_code_capacity, sample_phenomenological, NoiseKind, SampleStats};

pub use fit::{crossing_point, pseudo_threshold, Estimate, Quadratic};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub code: String,
    pub noise: NoiseKind,
    pub decoder: String,
    pub p_grid: Vec<f64>,
    pub shots: u64,
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub q: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rounds: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub basis: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bp_max_iter: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub osd_order: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<PathBuf>,
}

impl ExperimentConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        let cfg: Self = toml::from_str(text)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_toml(&std::fs::read_to_string(path)?)
    }

    pub fn validate(&self) -> Result<()> {
        CodeSpec::parse(&self.code)?;
        self.decoder_spec(3)?;
        if self.shots == 0 {
            return Err(Error::InvalidParameter("shots must be at least 1".into()));
        }
        if self.p_grid.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidParameter("p_grid must be strictly increasing".into()));
        }
        if let Some(p) = self.p_grid.iter().chain(&self.q).find(|p| !(0.0..0.5).contains(*p)) {
            return Err(Error::InvalidParameter(format!("probability {p} outside [0, 0.5)")));
        }
        self.basis()?;
        Ok(())
    }

    pub fn code_spec(&self) -> Result<CodeSpec> {
        CodeSpec::parse(&self.code)
    }

    pub fn basis(&self) -> Result<Pauli> {
        self.basis.as_deref().unwrap_or("Z").parse()
    }

    /// Decoder for a code of distance `d`, with any overrides applied.
    pub fn decoder_spec(&self, d: usize) -> Result<DecoderSpec> {
        match self.decoder.as_str() {
            "mle" => Ok(DecoderSpec::Mle),
            "bposd" | "bp+osd" => {
                let mut p = BposdParams::from_distance(d);
                if let Some(it) = self.bp_max_iter {
                    p.max_iter = it;
                }
                if let Some(o) = self.osd_order {
                    p.order = o;
                }
                Ok(DecoderSpec::Bposd(p))
            }
            other => Err(Error::Parse(format!("unknown decoder {other:?} (mle | bposd)"))),
        }
    }
}

/// One point of a logical-error curve.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CurvePoint {
    pub p: f64,
    pub shots: u64,
    pub failures: u64,
    pub p_l: f64,
    pub stderr: f64,
    pub per_cycle_p_l: Option<f64>,
}

impl CurvePoint {
    pub fn from_stats(p: f64, stats: &SampleStats, cycles: Option<usize>) -> Self {
        let p_l = stats.rate();
        Self {
            p,
            shots: stats.shots,
            failures: stats.failures,
            p_l,
            stderr: stats.stderr(),
            per_cycle_p_l: cycles.map(|n| per_cycle_rate(p_l, n)),
        }
    }
}

/// One CSV record.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CsvRow {
    pub code: String,
    pub noise_kind: NoiseKind,
    pub p: f64,
    pub q: Option<f64>,
    pub rounds: Option<usize>,
    pub shots: u64,
    pub failures: u64,
    #[serde(rename = "p_L")]
    pub p_l: f64,
    pub stderr: f64,
    #[serde(rename = "per_cycle_p_L")]
    pub per_cycle_p_l: Option<f64>,
}

impl CsvRow {
    pub fn point(&self) -> CurvePoint {
        CurvePoint {
            p: self.p,
            shots: self.shots,
            failures: self.failures,
            p_l: self.p_l,
            stderr: self.stderr,
            per_cycle_p_l: self.per_cycle_p_l,
        }
    }
}

pub fn read_curve_csv(path: &Path) -> Result<Vec<CsvRow>> {
    let mut rdr = csv::Reader::from_path(path)?;
    rdr.deserialize().map(|r| r.map_err(Error::from)).collect()
}

/// Sidecar written next to the CSV.
#[derive(Serialize)]
struct Sidecar<'a> {
    config: &'a ExperimentConfig,
    code_label: String,
    n: usize,
    k: usize,
    distance: usize,
    decoder: DecoderSpec,
}

/// Samples one point of the configured experiment.
pub fn run_point(cfg: &ExperimentConfig, p: f64) -> Result<(CurvePoint, CsvRow)> {
    let spec = cfg.code_spec()?;
    let code = spec.build()?;
    let d = spec.expected_distance();
    let decoder = cfg.decoder_spec(d)?;
    let rounds = cfg.rounds.unwrap_or(d);
    let (stats, q, cycles) = match cfg.noise {
        NoiseKind::CodeCapacity => (sample_code_capacity(&code, &decoder, p, cfg.shots, cfg.seed)?, None, None),
        NoiseKind::Phenomenological => {
            let q = cfg.q.unwrap_or(p);
            let stats = sample_phenomenological(&code, &decoder, p, q, rounds, cfg.shots, cfg.seed)?;
            (stats, Some(q), Some(rounds))
        }
        NoiseKind::CircuitLevel => {
            let circuit = memory_experiment(&code, cfg.basis()?, rounds, p)?;
            (sample_circuit_level(&circuit, &decoder, cfg.shots, cfg.seed)?, None, Some(rounds))
        }
    };
    let point = CurvePoint::from_stats(p, &stats, cycles);
    let row = CsvRow {
        code: spec.label(),
        noise_kind: cfg.noise,
        p,
        q,
        rounds: cycles,
        shots: point.shots,
        failures: point.failures,
        p_l: point.p_l,
        stderr: point.stderr,
        per_cycle_p_l: point.per_cycle_p_l,
    };
    Ok((point, row))
}

/// Runs every grid point in order, appending each row to the CSV as it completes.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<Vec<CurvePoint>> {
    cfg.validate()?;
    let mut writer = match &cfg.output {
        Some(path) => {
            if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
                std::fs::create_dir_all(dir)?;
            }
            let spec = cfg.code_spec()?;
            let code = spec.build()?;
            let sidecar = Sidecar {
                config: cfg,
                code_label: spec.label(),
                n: code.n,
                k: code.k,
                distance: spec.expected_distance(),
                decoder: cfg.decoder_spec(spec.expected_distance())?,
            };
            let mut json = File::create(path.with_extension("json"))?;
            serde_json::to_writer_pretty(&mut json, &sidecar)?;
            json.write_all(b"\n")?;
            Some(csv::Writer::from_path(path)?)
        }
        None => None,
    };
    let mut out = Vec::with_capacity(cfg.p_grid.len());
    for &p in &cfg.p_grid {
        let (point, row) = run_point(cfg, p).map_err(|e| match e {
            Error::Io(_) => e,
            other => Error::InvalidParameter(format!("point p={p}: {other}")),
        })?;
        if let Some(w) = writer.as_mut() {
            w.serialize(&row)?;
            w.flush()?;
        }
        out.push(point);
    }
    if let (Some(w), true) = (writer.as_mut(), cfg.p_grid.is_empty()) {
        // header only
        w.write_record([
            "code",
            "noise_kind",
            "p",
            "q",
            "rounds",
            "shots",
            "failures",
            "p_L",
            "stderr",
            "per_cycle_p_L",
        ])?;
        w.flush()?;
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    const CFG: &str = r#"
code = "lcs:1:3"
noise = "code_capacity"
decoder = "mle"
p_grid = [0.05, 0.1]
shots = 2000
seed = 11
"#;

    #[test]
    fn parse_and_validate() {
        let cfg = ExperimentConfig::from_toml(CFG).unwrap();
        assert_eq!(cfg.code_spec().unwrap().n(), 15);
        assert_eq!(cfg.decoder_spec(3).unwrap(), DecoderSpec::Mle);
        assert!(ExperimentConfig::from_toml(&CFG.replace("[0.05, 0.1]", "[0.1, 0.05]")).is_err());
        assert!(ExperimentConfig::from_toml(&CFG.replace("shots = 2000", "shots = 0")).is_err());
        assert!(ExperimentConfig::from_toml(&format!("{CFG}\nbogus = 1")).is_err());
        let b = ExperimentConfig::from_toml(&CFG.replace("\"mle\"", "\"bposd\"")).unwrap();
        assert_eq!(b.decoder_spec(9).unwrap(), DecoderSpec::bposd_for_distance(9));
    }

    #[test]
    fn csv_roundtrip_and_determinism() {
        let dir = std::env::temp_dir().join(format!("lcs-bench-{}", std::process::id()));
        let mut cfg = ExperimentConfig::from_toml(CFG).unwrap();
        cfg.output = Some(dir.join("a.csv"));
        let pts = run_experiment(&cfg).unwrap();
        assert_eq!(pts.len(), 2);
        assert!(pts[1].p_l > pts[0].p_l);
        let rows = read_curve_csv(&dir.join("a.csv")).unwrap();
        assert_eq!(rows.iter().map(CsvRow::point).collect::<Vec<_>>(), pts);
        let first = std::fs::read(dir.join("a.csv")).unwrap();
        run_experiment(&cfg).unwrap();
        assert_eq!(std::fs::read(dir.join("a.csv")).unwrap(), first);
        let side: serde_json::Value = serde_json::from_slice(&std::fs::read(dir.join("a.json")).unwrap()).unwrap();
        assert_eq!(side["n"], 15);
        std::fs::remove_dir_all(dir).ok();
    }

    #[test]
    fn empty_grid() {
        let mut cfg = ExperimentConfig::from_toml(CFG).unwrap();
        cfg.p_grid.clear();
        assert!(run_experiment(&cfg).unwrap().is_empty());
    }

    #[test]
    fn pheno_point_has_per_cycle_rate() {
        let cfg = ExperimentConfig::from_toml(
            &CFG.replace("code_capacity", "phenomenological").replace("[0.05, 0.1]", "[0.03]"),
        )
        .unwrap();
        let (pt, row) = run_point(&cfg, 0.03).unwrap();
        assert_eq!(row.rounds, Some(3));
        assert_eq!(row.q, Some(0.03));
        assert!(pt.per_cycle_p_l.unwrap() < pt.p_l);
    }
}
