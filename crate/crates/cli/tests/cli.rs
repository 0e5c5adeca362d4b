use std::fs;
use std::process::Command;

use fdaa_cli::curves::{read_curves, write_curves, CURVE_HEADER};
use fdaa_cli::experiment::{CrossTable, GameEntry, RunConfig};
use fdaa_cli::{
    replay_record, run_experiments, synthesize, CliError, ExperimentConfig, ReplayOptions,
    SynthSpec,
};
use fdaa_core::assessment::FmlVariant;
use fdaa_core::go::{serialize_sgf, Color};
use fdaa_core::pipeline::GameReport;
use fdaa_engine::{EngineConfig, StubSettings};

fn record(seed: u64, moves: u32, result: Option<&str>) -> fdaa_core::go::GameRecord {
    synthesize(&SynthSpec {
        result: result.map(str::to_string),
        ..SynthSpec::new(StubSettings::new(seed, 20000), moves)
    })
}

fn stub_options(seed: u64) -> ReplayOptions {
    ReplayOptions {
        engine: EngineConfig::stub(seed),
        ..ReplayOptions::default()
    }
}

#[test]
fn curves_round_trip_at_full_precision() {
    let dir = tempfile::tempdir().unwrap();
    let report = replay_record("g", &record(42, 120, Some("B+R")), &stub_options(42)).unwrap();
    let path = dir.path().join("curves.csv");
    assert_eq!(write_curves(&report.report, &path).unwrap(), 120);
    let text = fs::read_to_string(&path).unwrap();
    assert_eq!(text.lines().count(), 121);
    assert_eq!(text.lines().next().unwrap(), CURVE_HEADER.join(","));
    let rows = read_curves(&path).unwrap();
    for (row, f) in rows.iter().zip(&report.report.features) {
        assert_eq!((row.move_no, row.color, row.sn), (f.move_no, f.color, f.sn));
        assert_eq!(row.wr.to_bits(), f.wr.to_bits());
        assert_eq!(
            [row.tmr1, row.tmr2, row.tmr3].map(f64::to_bits),
            f.tmr_after.map(f64::to_bits)
        );
    }
    for r in &report.report.cgs {
        let row = &rows[r.move_no as usize - 1];
        assert_eq!(row.cgs_crisp.unwrap().to_bits(), r.crisp_cgs.to_bits());
        assert_eq!(row.cgs_label.as_deref(), Some(r.label.as_str()));
    }
    assert!(rows[..10].iter().all(|r| r.cgs_crisp.is_none()));
}

#[test]
fn empty_report_gives_header_only() {
    let dir = tempfile::tempdir().unwrap();
    let report = replay_record("e", &record(1, 0, None), &stub_options(1)).unwrap();
    let path = dir.path().join("curves.csv");
    assert_eq!(write_curves(&report.report, &path).unwrap(), 0);
    assert_eq!(fs::read_to_string(&path).unwrap().lines().count(), 1);
}

#[test]
fn unknown_result_leaves_correctness_unset() {
    let r = replay_record("n", &record(3, 40, None), &stub_options(3)).unwrap().report;
    assert_eq!(r.method1.unwrap().correct, None);
    assert_eq!(r.method2.unwrap().correct, None);
    assert_eq!(r.cgs.len(), 30);
}

#[test]
fn record_count_is_moves_minus_ten() {
    for moves in [0, 5, 10, 11, 37] {
        let r = replay_record("c", &record(9, moves, None), &stub_options(9)).unwrap();
        assert_eq!(r.report.cgs.len(), moves.saturating_sub(10) as usize);
    }
}

#[test]
fn engine_failure_mid_game_marks_the_report_partial() {
    // Answers the three setup commands and two analyze/play rounds, then quits.
    let script = r#"n=0; while read l; do n=$((n+1)); [ $n -gt 8 ] && exit 0; case "$l" in analyze*) printf "= Q16 100 0.5\n\n";; *) printf "=\n\n";; esac; done"#;
    let options = ReplayOptions {
        engine: EngineConfig::gtp(vec!["sh".into(), "-c".into(), script.into()]),
        ..ReplayOptions::default()
    };
    let r = replay_record("p", &record(42, 20, Some("B+R")), &options).unwrap();
    assert!(r.partial);
    assert!(r.error.as_deref().unwrap().starts_with("move 3"), "{:?}", r.error);
    assert_eq!(r.report.features.len(), 2);
}

fn write_games(dir: &std::path::Path, seeds: &[u64]) -> Vec<GameEntry> {
    seeds
        .iter()
        .map(|&seed| {
            let path = dir.join(format!("g{seed}.sgf"));
            let favored = StubSettings::new(seed, 20000).favored();
            let result = format!("{}+R", favored.letter());
            fs::write(&path, serialize_sgf(&record(seed, 60, Some(&result)))).unwrap();
            GameEntry::Detailed {
                path,
                seed: Some(seed),
                bias: None,
                settle_after: None,
            }
        })
        .collect()
}

fn run(name: &str, fml: FmlVariant, method: u8, games: Vec<GameEntry>) -> RunConfig {
    RunConfig {
        name: name.into(),
        simulation_setting: None,
        engine: EngineConfig::default(),
        fml_variant: fml,
        ogs_method: method,
        games,
    }
}

#[test]
fn single_game_accuracy_is_zero_or_one() {
    let dir = tempfile::tempdir().unwrap();
    let games = write_games(dir.path(), &[5]);
    let config = ExperimentConfig {
        runs: vec![run("one", FmlVariant::Fml2, 1, games)],
    };
    let (summary, _) = run_experiments(&config).unwrap();
    let acc = summary.runs[0].accuracy.unwrap();
    assert!(acc == 0.0 || acc == 1.0);
}

#[test]
fn experiments_are_repeatable_and_tables_pure() {
    let dir = tempfile::tempdir().unwrap();
    let games = write_games(dir.path(), &[1, 2, 3, 4]);
    let config = ExperimentConfig {
        runs: vec![
            run("a", FmlVariant::Fml1, 1, games.clone()),
            run("b", FmlVariant::Fml2, 2, games),
        ],
    };
    let (first, _) = run_experiments(&config).unwrap();
    let (second, _) = run_experiments(&config).unwrap();
    assert_eq!(first, second);
    assert_eq!(CrossTable::from_runs(&first.runs), first.table);
    let rendered = first.table.render();
    assert!(rendered.contains("FML-1") && rendered.contains("Method 2"));
}

#[test]
fn bad_experiments_are_input_errors() {
    let dir = tempfile::tempdir().unwrap();
    let games = write_games(dir.path(), &[1]);
    let cases = [
        vec![run("x", FmlVariant::Fml2, 1, games.clone()), run("x", FmlVariant::Fml2, 2, games.clone())],
        vec![run("empty", FmlVariant::Fml2, 1, vec![])],
        vec![run("m", FmlVariant::Fml2, 3, games.clone())],
        vec![run("missing", FmlVariant::Fml2, 1, vec![GameEntry::Path(dir.path().join("nope.sgf"))])],
    ];
    for runs in cases {
        let err = run_experiments(&ExperimentConfig { runs }).unwrap_err();
        assert!(matches!(err, CliError::Input(_)), "{err:?}");
        assert_eq!(err.exit_code(), 2);
    }
}

#[test]
fn config_file_paths_are_relative_to_the_file() {
    let dir = tempfile::tempdir().unwrap();
    fs::create_dir(dir.path().join("games")).unwrap();
    fs::write(dir.path().join("games/a.sgf"), serialize_sgf(&record(2, 12, Some("W+R")))).unwrap();
    let toml = r#"
[[run]]
name = "only"
simulation_setting = 10000
fml_variant = "FML-1"
ogs_method = 2
games = ["games/a.sgf", { path = "games/a.sgf", seed = 7, bias = "white" }]
"#;
    let path = dir.path().join("suite.toml");
    fs::write(&path, toml).unwrap();
    let config = ExperimentConfig::load(&path).unwrap();
    assert!(config.runs[0].games.iter().all(|g| g.path().exists()));
    let (summary, reports) = run_experiments(&config).unwrap();
    assert_eq!(summary.runs[0].simulation_setting, 10000);
    assert_eq!(reports[0].len(), 2);
    assert_eq!(summary.runs[0].fml_variant, FmlVariant::Fml1);
}

#[test]
fn replays_are_bit_identical() {
    let rec = record(42, 120, Some("B+R"));
    let a = replay_record("d", &rec, &stub_options(42)).unwrap();
    let b = replay_record("d", &rec, &stub_options(42)).unwrap();
    let json = |r: &GameReport| serde_json::to_string(r).unwrap();
    assert_eq!(json(&a.report), json(&b.report));
    assert_eq!(a.black_wr, b.black_wr);
    assert!(a.black_wr.unwrap().machine > a.white_wr.unwrap().machine);
    assert_eq!(a.report.cgs.iter().filter(|r| r.label.favors() == Some(Color::Black)).count() > 0, true);
}

#[test]
fn binary_exit_codes() {
    let bin = env!("CARGO_BIN_EXE_fdaa");
    let dir = tempfile::tempdir().unwrap();
    let code = |args: &[&str]| Command::new(bin).args(args).output().unwrap().status.code();
    assert_eq!(code(&["--help"]), Some(0));
    assert_eq!(code(&["frobnicate"]), Some(1));
    assert_eq!(code(&["replay", "/nonexistent.sgf"]), Some(2));
    let sgf = dir.path().join("g.sgf");
    let sgf = sgf.to_str().unwrap();
    assert_eq!(code(&["synth", "--moves", "15", "--out", sgf]), Some(0));
    assert_eq!(code(&["replay", sgf, "--engine", "gtp", "--engine-cmd", "/nonexistent/engine"]), Some(3));
    let out = Command::new(bin).args(["replay", sgf]).output().unwrap();
    assert_eq!(out.status.code(), Some(0));
    assert!(String::from_utf8(out.stdout).unwrap().contains("Overall game situation"));
    fs::write(dir.path().join("bad.sgf"), "(;FF[4];B[aa];B[ab])").unwrap();
    assert_eq!(code(&["replay", dir.path().join("bad.sgf").to_str().unwrap()]), Some(2));
}
