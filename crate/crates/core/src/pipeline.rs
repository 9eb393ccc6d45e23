//! Configuration, fixture loading and end-to-end elimination runs.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::arith::{FieldCtx, QuadElem};
use crate::eliminate::{
    aggregate_bound, eliminate_forms, forms_per_level, EliminationParams, EliminationReport,
    LevelSummary, FAKE_CURVE_THRESHOLD, IRREDUCIBILITY_THRESHOLD, METHOD, STRUCTURAL,
};
use crate::error::{Error, Result};
use crate::newform::{parse_newforms, Level};

/// The shipped constants file.
pub const DEFAULT_CONSTANTS: &str = include_str!("../data/constants.toml");
/// The shipped fixture sources.
pub const DEFAULT_FIXTURE_SOURCES: &str = include_str!("../data/fixture_sources.toml");
pub const FIXTURE_DIR_ENV: &str = "PP3_FIXTURE_DIR";

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Defaults {
    pub skip_primes: Vec<u64>,
    pub inertia_threshold: u64,
    pub n_max: u32,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FieldConstants {
    pub fixture: String,
    pub torsion: BTreeMap<Level, u64>,
    #[serde(default)]
    pub expected_forms: BTreeMap<Level, usize>,
    pub inertia_threshold: Option<u64>,
    #[serde(default)]
    pub skip_primes: Option<Vec<u64>>,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Constants {
    pub defaults: Defaults,
    pub field: BTreeMap<u64, FieldConstants>,
}

pub fn parse_constants(text: &str) -> Result<Constants> {
    toml::from_str(text).map_err(|e| Error::Config(format!("constants: {e}")))
}

pub fn default_constants() -> Constants {
    parse_constants(DEFAULT_CONSTANTS).expect("shipped constants parse")
}

/// `--fixtures`, then `$PP3_FIXTURE_DIR`, then the shipped directory.
pub fn fixture_dir(explicit: Option<&Path>) -> PathBuf {
    if let Some(p) = explicit {
        return p.to_path_buf();
    }
    if let Some(p) = std::env::var_os(FIXTURE_DIR_ENV) {
        return PathBuf::from(p);
    }
    Path::new(env!("CARGO_MANIFEST_DIR")).join("data").join("fixtures")
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    Json,
    Table,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Thresholds {
    pub irreducibility: u64,
    pub fake_curve: u64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PipelineConfig {
    pub d: u64,
    pub coef_a: String,
    pub coef_b: String,
    pub coef_c: String,
    pub levels: Vec<Level>,
    pub torsion_primes: BTreeMap<Level, u64>,
    pub expected_forms: BTreeMap<Level, usize>,
    pub thresholds: Thresholds,
    pub skip_primes: Vec<u64>,
    pub inertia_threshold: u64,
    /// Not part of the hash; only the fixture contents are.
    #[serde(skip)]
    pub fixture_path: PathBuf,
    pub n_max: u32,
    pub format: OutputFormat,
}

impl PipelineConfig {
    /// Settings for field `d` from `constants`, reading fixtures from `dir`.
    pub fn for_field(d: u64, constants: &Constants, dir: &Path) -> Result<PipelineConfig> {
        FieldCtx::new(d)?;
        let fc = constants.field.get(&d).ok_or_else(|| {
            Error::Config(format!(
                "no constants for d = {d} (known: {:?})",
                constants.field.keys().collect::<Vec<_>>()
            ))
        })?;
        Ok(PipelineConfig {
            d,
            coef_a: "1".into(),
            coef_b: "1".into(),
            coef_c: "1".into(),
            levels: vec![Level::D, Level::LD],
            torsion_primes: fc.torsion.clone(),
            expected_forms: fc.expected_forms.clone(),
            thresholds: Thresholds {
                irreducibility: IRREDUCIBILITY_THRESHOLD,
                fake_curve: FAKE_CURVE_THRESHOLD,
            },
            skip_primes: fc
                .skip_primes
                .clone()
                .unwrap_or_else(|| constants.defaults.skip_primes.clone()),
            inertia_threshold: fc
                .inertia_threshold
                .unwrap_or(constants.defaults.inertia_threshold),
            fixture_path: dir.join(&fc.fixture),
            n_max: constants.defaults.n_max,
            format: OutputFormat::Json,
        })
    }

    fn canonical_json(&self) -> String {
        serde_json::to_string(self).expect("config serialises")
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RunManifest {
    pub config_sha256: String,
    pub fixture: String,
    pub fixture_sha256: String,
    pub version: String,
    pub elapsed_ms: u128,
}

fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

/// Loads the fixture, eliminates every form at the configured levels and
/// aggregates `B_K`. Fails if a form survives, if a level has no torsion
/// constant, or if a level expected to have forms has none.
pub fn run_pipeline(cfg: &PipelineConfig) -> Result<(EliminationReport, RunManifest)> {
    let start = Instant::now();
    let ctx = FieldCtx::new(cfg.d)?;
    for (name, s) in [("A", &cfg.coef_a), ("B", &cfg.coef_b), ("C", &cfg.coef_c)] {
        let x = QuadElem::parse(ctx, s)?;
        if x.is_zero() || !x.is_integral() {
            return Err(Error::Config(format!("{name} = {s} must be a nonzero integer of K")));
        }
    }
    let text = std::fs::read(&cfg.fixture_path).map_err(|source| Error::Io {
        path: cfg.fixture_path.display().to_string(),
        source,
    })?;
    let origin = cfg.fixture_path.display().to_string();
    let file = parse_newforms(
        std::str::from_utf8(&text).map_err(|e| Error::schema(&origin, e.to_string()))?,
        &origin,
    )?;
    if file.ctx != ctx {
        return Err(Error::Config(format!(
            "fixture {origin} is for d = {}, not {}",
            file.ctx.d(),
            cfg.d
        )));
    }
    let records: Vec<_> = file
        .forms
        .into_iter()
        .filter(|f| cfg.levels.contains(&f.level))
        .collect();
    let found = forms_per_level(&records);
    let mut levels = Vec::new();
    let mut ell = 0;
    for &level in &cfg.levels {
        let torsion_ell = *cfg.torsion_primes.get(&level).ok_or_else(|| {
            Error::Config(format!("no torsion prime for level {level} of d = {}", cfg.d))
        })?;
        let forms_found = found.get(&level).copied().unwrap_or(0);
        let forms_expected = cfg.expected_forms.get(&level).copied();
        if forms_found == 0 && forms_expected.is_some_and(|n| n > 0) {
            return Err(Error::Config(format!(
                "fixture {origin} has no forms at level {level}, expected {}",
                forms_expected.unwrap()
            )));
        }
        ell = ell.max(torsion_ell);
        levels.push(LevelSummary { level, torsion_ell, forms_found, forms_expected });
    }
    let params = EliminationParams {
        skip_primes: cfg.skip_primes.clone(),
        inertia_threshold: cfg.inertia_threshold,
    };
    let per_form = eliminate_forms(&records, &params)?;
    let bound = aggregate_bound(&per_form, ell, true)?;
    let fixture_complete = levels
        .iter()
        .all(|l| l.forms_expected.is_none_or(|n| l.forms_found >= n));
    let report = EliminationReport {
        field_d: cfg.d,
        method: METHOD,
        skip_primes: cfg.skip_primes.clone(),
        inertia_threshold: cfg.inertia_threshold,
        levels,
        fixture_complete,
        per_form,
        torsion_prime_ell: ell,
        structural: STRUCTURAL,
        b_k: bound.b_k,
        conservative_b_k: bound.conservative_b_k,
    };
    let manifest = RunManifest {
        config_sha256: sha256_hex(cfg.canonical_json().as_bytes()),
        fixture: cfg
            .fixture_path
            .file_name()
            .map(|n| n.to_string_lossy().into_owned())
            .unwrap_or_default(),
        fixture_sha256: sha256_hex(&text),
        version: env!("CARGO_PKG_VERSION").to_string(),
        elapsed_ms: start.elapsed().as_millis(),
    };
    Ok((report, manifest))
}
