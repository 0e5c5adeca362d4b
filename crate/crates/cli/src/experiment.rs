//! Experiment suites: many replays, one accuracy per run and a cross
//! table of knowledge base against verdict method.

use std::collections::{BTreeMap, HashSet};
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use fdaa_core::assessment::{FmlVariant, Ogs, OgsVerdict, Outcome};
use fdaa_core::go::{parse_sgf, Color};
use fdaa_core::pipeline::CommentarySource;
use fdaa_engine::EngineConfig;
use rayon::prelude::*;
use serde::{Deserialize, Deserializer, Serialize};

use crate::error::CliError;
use crate::replay::{replay_record, ReplayOptions, ReplayReport};

fn variant<'de, D: Deserializer<'de>>(d: D) -> Result<FmlVariant, D::Error> {
    let s = String::deserialize(d)?;
    s.parse().map_err(serde::de::Error::custom)
}

/// A game file, optionally with stub settings of its own.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum GameEntry {
    Path(PathBuf),
    Detailed {
        path: PathBuf,
        #[serde(default)]
        seed: Option<u64>,
        #[serde(default)]
        bias: Option<Color>,
        #[serde(default)]
        settle_after: Option<u32>,
    },
}

impl GameEntry {
    pub fn path(&self) -> &Path {
        match self {
            GameEntry::Path(p) | GameEntry::Detailed { path: p, .. } => p,
        }
    }

    fn engine(&self, base: &EngineConfig) -> EngineConfig {
        let mut cfg = base.clone();
        if let GameEntry::Detailed {
            seed,
            bias,
            settle_after,
            ..
        } = self
        {
            cfg.seed = seed.unwrap_or(cfg.seed);
            cfg.bias = bias.or(cfg.bias);
            cfg.settle_after = settle_after.or(cfg.settle_after);
        }
        cfg
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub name: String,
    /// Overrides the engine's own setting when present.
    #[serde(default)]
    pub simulation_setting: Option<u32>,
    #[serde(default)]
    pub engine: EngineConfig,
    #[serde(deserialize_with = "variant")]
    pub fml_variant: FmlVariant,
    pub ogs_method: u8,
    pub games: Vec<GameEntry>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    #[serde(rename = "run")]
    pub runs: Vec<RunConfig>,
}

impl ExperimentConfig {
    pub fn from_toml(text: &str) -> Result<Self, CliError> {
        toml::from_str(text).map_err(|e| CliError::input("experiment config", e))
    }

    /// Reads a config; game paths are taken relative to its directory.
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = fs::read_to_string(path).map_err(|e| CliError::input(path.display(), e))?;
        let mut config = Self::from_toml(&text)?;
        let base = path.parent().unwrap_or(Path::new("."));
        for run in &mut config.runs {
            for game in &mut run.games {
                let p = match game {
                    GameEntry::Path(p) | GameEntry::Detailed { path: p, .. } => p,
                };
                if p.is_relative() {
                    *p = base.join(&*p);
                }
            }
        }
        Ok(config)
    }

    /// Rewrites game paths under `base` relative to it, for a config file
    /// saved in `base`.
    pub fn relative_to(mut self, base: &Path) -> Self {
        for run in &mut self.runs {
            for game in &mut run.games {
                let p = match game {
                    GameEntry::Path(p) | GameEntry::Detailed { path: p, .. } => p,
                };
                if let Ok(rel) = p.strip_prefix(base) {
                    *p = rel.to_path_buf();
                }
            }
        }
        self
    }

    pub fn to_toml(&self) -> String {
        toml::to_string_pretty(self).expect("experiment config serializes")
    }

    pub fn validate(&self) -> Result<(), CliError> {
        if self.runs.is_empty() {
            return Err(CliError::Input("experiment has no runs".into()));
        }
        let mut names = HashSet::new();
        for run in &self.runs {
            if !names.insert(run.name.as_str()) {
                return Err(CliError::Input(format!("run name `{}` is used twice", run.name)));
            }
            if !matches!(run.ogs_method, 1 | 2) {
                return Err(CliError::Input(format!(
                    "run `{}`: ogs_method must be 1 or 2",
                    run.name
                )));
            }
            if run.games.is_empty() {
                return Err(CliError::Input(format!("run `{}` has an empty game set", run.name)));
            }
            if let Some(missing) = run.games.iter().find(|g| !g.path().exists()) {
                return Err(CliError::Input(format!(
                    "run `{}`: {} does not exist",
                    run.name,
                    missing.path().display()
                )));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GameOutcome {
    pub game: String,
    pub result: Option<String>,
    pub verdict: Option<Ogs>,
    pub correct: Option<bool>,
    pub partial: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunResult {
    pub name: String,
    pub fml_variant: FmlVariant,
    pub ogs_method: u8,
    pub simulation_setting: u32,
    /// Games with a known result.
    pub known: usize,
    pub correct: usize,
    pub accuracy: Option<f64>,
    pub games: Vec<GameOutcome>,
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Cell {
    pub correct: usize,
    pub known: usize,
}

impl Cell {
    pub fn accuracy(&self) -> Option<f64> {
        (self.known > 0).then(|| self.correct as f64 / self.known as f64)
    }
}

/// Accuracy by knowledge base (rows) and verdict method (columns), pooled
/// over every run in that cell.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct CrossTable {
    pub cells: BTreeMap<String, Cell>,
}

impl CrossTable {
    fn key(fml: FmlVariant, method: u8) -> String {
        format!("{}/method-{method}", fml.as_str())
    }

    pub fn from_runs(runs: &[RunResult]) -> Self {
        let mut table = CrossTable::default();
        for run in runs {
            let cell = table
                .cells
                .entry(Self::key(run.fml_variant, run.ogs_method))
                .or_default();
            cell.correct += run.correct;
            cell.known += run.known;
        }
        table
    }

    pub fn cell(&self, fml: FmlVariant, method: u8) -> Option<Cell> {
        self.cells.get(&Self::key(fml, method)).copied()
    }

    pub fn render(&self) -> String {
        let mut out = format!("{:<8}{:>20}{:>20}\n", "", "Method 1", "Method 2");
        for fml in FmlVariant::ALL {
            let _ = write!(out, "{:<8}", fml.as_str().to_uppercase());
            for method in [1, 2] {
                let text = match self.cell(fml, method) {
                    Some(c) => match c.accuracy() {
                        Some(a) => format!("{:.2}% ({}/{})", a * 100.0, c.correct, c.known),
                        None => format!("n/a (0/{})", c.known),
                    },
                    None => "-".to_string(),
                };
                let _ = write!(out, "{text:>20}");
            }
            out.push('\n');
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentSummary {
    pub runs: Vec<RunResult>,
    pub table: CrossTable,
}

impl ExperimentSummary {
    pub fn render(&self) -> String {
        let mut out = String::new();
        for run in &self.runs {
            let acc = run
                .accuracy
                .map_or("n/a".to_string(), |a| format!("{:.2}%", a * 100.0));
            let _ = writeln!(
                out,
                "{}: {} method {} sims {}: {acc} ({}/{})",
                run.name,
                run.fml_variant.as_str(),
                run.ogs_method,
                run.simulation_setting,
                run.correct,
                run.known
            );
        }
        out.push('\n');
        out.push_str(&self.table.render());
        out
    }
}

/// Replays every game of every run. Games run in parallel; results are
/// joined in configuration order so output never depends on scheduling.
pub fn run_experiments(
    config: &ExperimentConfig,
) -> Result<(ExperimentSummary, Vec<Vec<ReplayReport>>), CliError> {
    config.validate()?;
    let mut runs = Vec::new();
    let mut all_reports = Vec::new();
    for run in &config.runs {
        let mut base = run.engine.clone();
        if let Some(s) = run.simulation_setting {
            base.simulation_setting = s;
        }
        let source = if run.ogs_method == 1 {
            CommentarySource::Method1
        } else {
            CommentarySource::Method2
        };
        let reports: Vec<ReplayReport> = run
            .games
            .par_iter()
            .map(|entry| {
                let path = entry.path();
                let text =
                    fs::read_to_string(path).map_err(|e| CliError::input(path.display(), e))?;
                let record = parse_sgf(&text).map_err(|e| CliError::input(path.display(), e))?;
                let name = path
                    .file_stem()
                    .map_or_else(|| path.display().to_string(), |s| s.to_string_lossy().into_owned());
                let options = ReplayOptions {
                    engine: entry.engine(&base),
                    fml: run.fml_variant,
                    source,
                };
                replay_record(&name, &record, &options)
            })
            .collect::<Result<_, _>>()?;
        let games: Vec<GameOutcome> = reports
            .iter()
            .map(|r| {
                let v: Option<&OgsVerdict> = if run.ogs_method == 1 {
                    r.report.method1.as_ref()
                } else {
                    r.report.method2.as_ref()
                };
                GameOutcome {
                    game: r.game.clone(),
                    result: r.report.result.clone(),
                    verdict: v.map(|v| v.verdict),
                    // A known result with no verdict at all counts as a miss.
                    correct: v.and_then(|v| v.correct).or_else(|| {
                        r.report
                            .result
                            .as_deref()
                            .filter(|res| Outcome::parse(Some(res)) != Outcome::Unknown)
                            .map(|_| false)
                    }),
                    partial: r.partial,
                }
            })
            .collect();
        let known = games.iter().filter(|g| g.correct.is_some()).count();
        let correct = games.iter().filter(|g| g.correct == Some(true)).count();
        runs.push(RunResult {
            name: run.name.clone(),
            fml_variant: run.fml_variant,
            ogs_method: run.ogs_method,
            simulation_setting: base.simulation_setting,
            known,
            correct,
            accuracy: (known > 0).then(|| correct as f64 / known as f64),
            games,
        });
        all_reports.push(reports);
    }
    let table = CrossTable::from_runs(&runs);
    Ok((ExperimentSummary { runs, table }, all_reports))
}

pub const SUMMARY_FILE: &str = "summary.json";

/// Writes the summary, the rendered table and each game's report.
pub fn write_run_dir(
    dir: &Path,
    summary: &ExperimentSummary,
    reports: &[Vec<ReplayReport>],
) -> Result<(), CliError> {
    let io = |e: std::io::Error| CliError::input(dir.display(), e);
    fs::create_dir_all(dir).map_err(io)?;
    let json = serde_json::to_string_pretty(summary).expect("summary serializes");
    fs::write(dir.join(SUMMARY_FILE), json).map_err(io)?;
    fs::write(dir.join("accuracy.txt"), summary.render()).map_err(io)?;
    for (run, reports) in summary.runs.iter().zip(reports) {
        let run_dir = dir.join("reports").join(&run.name);
        fs::create_dir_all(&run_dir).map_err(io)?;
        for r in reports {
            let json = serde_json::to_string_pretty(r).expect("report serializes");
            fs::write(run_dir.join(format!("{}.json", r.game)), json).map_err(io)?;
        }
    }
    let all: Vec<&ReplayReport> = reports.iter().flatten().collect();
    crate::curves::write_hints(dir, &all)?;
    Ok(())
}

pub fn read_summary(dir: &Path) -> Result<ExperimentSummary, CliError> {
    let path = dir.join(SUMMARY_FILE);
    let text = fs::read_to_string(&path).map_err(|e| CliError::input(path.display(), e))?;
    serde_json::from_str(&text).map_err(|e| CliError::input(path.display(), e))
}
