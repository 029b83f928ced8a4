use virpath::bosonic::CharacterParams;
use virpath::harness::{character_table, emit_character, run_sweep, CharacterModel, OutputFormat, Suite, SweepConfig};
use virpath::HalfInt;

fn hi(s: &str) -> HalfInt {
    s.parse().unwrap()
}

#[test]
fn abf_suite_passes_for_small_bands() {
    let mut config = SweepConfig::new(Suite::Abf);
    config.p = vec![3, 4];
    config.l_max = 10;
    let report = run_sweep(&config).unwrap();
    assert!(report.pass && report.total > 0 && report.failed == 0);
    assert!(report.records.iter().any(|r| r.identity == "abf_fermionic"));
}

#[test]
fn every_suite_passes_on_a_small_range() {
    for suite in Suite::ALL {
        let mut config = SweepConfig::new(suite);
        config.l_max = config.l_max.min(4);
        config.order = 8;
        config.p = config.p.into_iter().take(2).collect();
        let report = run_sweep(&config).unwrap();
        let bad: Vec<_> = report
            .failures()
            .map(|r| format!("{} {}", r.identity, r.indices))
            .collect();
        assert!(bad.is_empty(), "{suite}: {bad:?}");
        assert!(report.total > 0, "{suite}");
    }
}

#[test]
fn empty_ranges_pass_vacuously() {
    let mut config = SweepConfig::new(Suite::Hl);
    config.t.clear();
    let report = run_sweep(&config).unwrap();
    assert!(report.pass);
    assert_eq!(report.total, 0);
    assert!(report.records.is_empty());
}

#[test]
fn reports_are_deterministic() {
    let mut config = SweepConfig::new(Suite::Modified);
    config.l_max = 6;
    config.jobs = 1;
    let serial = run_sweep(&config).unwrap().to_json();
    config.jobs = 3;
    assert_eq!(run_sweep(&config).unwrap().to_json(), serial);
}

#[test]
fn invalid_configurations_are_rejected() {
    let mut config = SweepConfig::new(Suite::Abf);
    config.order = 10_000;
    assert!(run_sweep(&config).is_err());
    let mut config = SweepConfig::new(Suite::Abf);
    config.l_max = -1;
    assert!(run_sweep(&config).is_err());
    let mut config = SweepConfig::new(Suite::Abf);
    config.f = vec![3];
    assert!(run_sweep(&config).is_err());
    assert!("abc".parse::<Suite>().is_err());
}

#[test]
fn rogers_ramanujan_csv() {
    let params = CharacterParams::new(hi("2"), 5, hi("1"), 2).unwrap();
    let csv = emit_character(&CharacterModel::Virasoro(params), 10, OutputFormat::Csv).unwrap();
    let rows: Vec<&str> = csv.lines().skip(1).collect();
    assert_eq!(rows.len(), 11);
    let coeffs: Vec<&str> = rows.iter().map(|r| r.split(',').nth(1).unwrap()).collect();
    assert_eq!(coeffs, ["1", "1", "1", "1", "2", "2", "3", "3", "4", "5", "6"]);
}

#[test]
fn four_table_rows_give_identical_columns() {
    let table = character_table(&CharacterModel::HalfLattice { t: hi("3"), r: 2, a: 2 }, 20).unwrap();
    let names: Vec<&str> = table.columns.iter().map(|(n, _)| n.as_str()).collect();
    assert_eq!(names, ["rocha_caridi", "case_a", "case_b", "case_c", "case_d"]);
    for (_, s) in &table.columns[1..] {
        assert_eq!(s, &table.columns[0].1);
    }
}

#[test]
fn order_zero_is_a_single_row() {
    let params = CharacterParams::new(hi("3"), 4, hi("2"), 2).unwrap();
    let csv = emit_character(&CharacterModel::Virasoro(params), 0, OutputFormat::Csv).unwrap();
    assert_eq!(csv.lines().count(), 2);
    let json = emit_character(
        &CharacterModel::HalfLattice {
            t: hi("5/2"),
            r: 2,
            a: 1,
        },
        0,
        OutputFormat::Json,
    )
    .unwrap();
    let value: serde_json::Value = serde_json::from_str(&json).unwrap();
    assert_eq!(value["rows"].as_array().unwrap().len(), 1);
}

#[test]
fn invalid_models_are_rejected() {
    assert!(character_table(&CharacterModel::HalfLattice { t: hi("3"), r: 3, a: 1 }, 5).is_err());
    assert!(character_table(&CharacterModel::HalfLattice { t: hi("3"), r: 1, a: 4 }, 5).is_err());
    assert!(CharacterParams::new(hi("2"), 5, hi("0"), 1).is_err());
}
