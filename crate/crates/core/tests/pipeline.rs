use std::path::{Path, PathBuf};

use pp3_core::basechange::{build_fixture, parse_sources};
use pp3_core::eliminate::EliminatedBy;
use pp3_core::newform::{emit_newforms, load_newforms, parse_newforms, Level};
use pp3_core::pipeline::{
    default_constants, run_pipeline, PipelineConfig, DEFAULT_FIXTURE_SOURCES,
};
use pp3_core::Error;

fn shipped() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("data").join("fixtures")
}

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("pp3-pipeline-{}-{name}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

fn config(d: u64, dir: &Path) -> PipelineConfig {
    PipelineConfig::for_field(d, &default_constants(), dir).unwrap()
}

#[test]
fn shipped_fixtures_match_their_sources() {
    let sources = parse_sources(DEFAULT_FIXTURE_SOURCES).unwrap();
    for d in [7, 19, 43, 67] {
        let built = emit_newforms(&build_fixture(&sources, d).unwrap());
        let path = shipped().join(format!("d{d}.json"));
        let on_disk = std::fs::read_to_string(&path).unwrap();
        assert_eq!(built, on_disk, "{} is stale; rebuild with `pp3 fixture build --d {d}`", path.display());
    }
}

#[test]
fn fixtures_round_trip() {
    for d in [7, 19, 43, 67] {
        let path = shipped().join(format!("d{d}.json"));
        let text = std::fs::read_to_string(&path).unwrap();
        let file = load_newforms(&path).unwrap();
        assert_eq!(emit_newforms(&file), text);
    }
}

#[test]
fn per_form_elimination_primes() {
    let expect: &[(u64, &[(&str, u64, u64)])] = &[
        (7, &[("bc-21a", 788480, 11)]),
        (19, &[("bc-19a", 0, 7), ("bc-57a", 280, 7), ("bc-57b", 280, 7), ("bc-57c", 320, 5)]),
        (43, &[("bc-43a", 560, 7), ("bc-129-1", 560, 7), ("bc-129-2", 8960, 7)]),
        (67, &[("bc-67a", 12320, 11), ("bc-201-1", 1400, 7), ("bc-201-2", 5600, 7)]),
    ];
    for (d, forms) in expect {
        let (report, _) = run_pipeline(&config(*d, &shipped())).unwrap();
        let got: Vec<(String, String, u64)> = report
            .per_form
            .iter()
            .map(|f| (f.form_id.clone(), f.c_f.to_string(), f.elimination_prime.unwrap()))
            .collect();
        let want: Vec<(String, String, u64)> = forms
            .iter()
            .map(|(id, c, p)| (id.to_string(), c.to_string(), *p))
            .collect();
        assert_eq!(got, want, "d = {d}");
    }
}

#[test]
fn level_d_form_of_19_needs_inertia() {
    let (report, _) = run_pipeline(&config(19, &shipped())).unwrap();
    let f = report.per_form.iter().find(|f| f.level == Level::D).unwrap();
    assert_eq!(f.eliminated_by, EliminatedBy::Inertia);
    let inertia = f.inertia.unwrap();
    assert_eq!((inertia.threshold, inertia.conservative_threshold), (7, 24));
    assert_eq!(report.conservative_b_k, 24);
}

#[test]
fn runs_are_deterministic() {
    let cfg = config(67, &shipped());
    let (r1, m1) = run_pipeline(&cfg).unwrap();
    let (r2, m2) = run_pipeline(&cfg).unwrap();
    assert_eq!(r1.to_json(), r2.to_json());
    assert_eq!(r1.to_table(), r2.to_table());
    assert_eq!((m1.config_sha256, m1.fixture_sha256), (m2.config_sha256, m2.fixture_sha256));
}

#[test]
fn skipping_more_primes_never_lowers_c_f() {
    // Dropping keys from a gcd can only enlarge it.
    let base = run_pipeline(&config(43, &shipped())).unwrap().0;
    let mut cfg = config(43, &shipped());
    cfg.skip_primes = vec![2, 5];
    let wider = run_pipeline(&cfg).unwrap().0;
    for (a, b) in base.per_form.iter().zip(&wider.per_form) {
        assert!((&b.c_f % &a.c_f) == 0u32.into(), "{}: {} vs {}", a.form_id, a.c_f, b.c_f);
    }
}

#[test]
fn missing_fixture_is_io_error() {
    let dir = scratch("missing");
    assert!(matches!(run_pipeline(&config(7, &dir)), Err(Error::Io { .. })));
}

#[test]
fn empty_required_level_is_config_error() {
    let dir = scratch("empty");
    std::fs::write(dir.join("d19.json"), "{\"field_d\": 19, \"forms\": []}").unwrap();
    assert!(matches!(run_pipeline(&config(19, &dir)), Err(Error::Config(_))));
}

#[test]
fn wrong_field_fixture_is_rejected() {
    let dir = scratch("wrong");
    std::fs::copy(shipped().join("d7.json"), dir.join("d19.json")).unwrap();
    assert!(matches!(run_pipeline(&config(19, &dir)), Err(Error::Config(_))));
}

#[test]
fn schema_errors_carry_paths() {
    let cases = [
        (r#"{"field_d": 7, "forms": [{"id": "f", "level": "LD", "hecke": {"kind": "Q"}, "ap": [{"p": 4, "split": "s0", "value": [1]}]}]}"#, "forms[0].ap[0].p"),
        (r#"{"field_d": 7, "forms": [{"id": "f", "level": "LD", "hecke": {"kind": "Q"}, "ap": [{"p": 5, "split": "s0", "value": [1]}]}]}"#, "forms[0].ap[0].split"),
        (r#"{"field_d": 7, "forms": [{"id": "f", "level": "LD", "hecke": {"kind": "Q"}, "ap": [{"p": 5, "split": "inert", "value": [99]}]}]}"#, "forms[0].ap[0].value"),
        (r#"{"field_d": 7, "forms": [{"id": "f", "level": "XX", "hecke": {"kind": "Q"}, "ap": []}]}"#, "forms[0].level"),
        (r#"{"field_d": 7, "forms": [], "extra": 1}"#, "extra"),
        (r#"{"field_d": 7, "forms": [{"id": "f", "level": "LD", "hecke": {"kind": "quad", "disc": 4}, "ap": [{"p": 5, "split": "inert", "value": [1, 1]}]}]}"#, "forms[0].hecke"),
    ];
    for (text, want) in cases {
        match parse_newforms(text, "t.json") {
            Err(Error::Schema { path, .. }) => {
                assert!(path.starts_with("t.json: "), "{path}");
                assert!(path.contains(want), "{path} should mention {want}");
            }
            other => panic!("{want}: expected a schema error, got {other:?}"),
        }
    }
}
