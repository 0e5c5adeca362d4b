//! Tabular exports: per-move curves and hint-usage aggregates.

use std::collections::{BTreeMap, HashMap};
use std::fs;
use std::path::Path;

use fdaa_core::go::Color;
use fdaa_core::pipeline::GameReport;
use serde::{Deserialize, Serialize};

use crate::error::CliError;
use crate::replay::ReplayReport;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CurveRow {
    pub move_no: u32,
    pub color: Color,
    pub sn: u32,
    pub wr: f64,
    pub tmr1: f64,
    pub tmr2: f64,
    pub tmr3: f64,
    pub cgs_crisp: Option<f64>,
    pub cgs_label: Option<String>,
}

pub fn curve_rows(report: &GameReport) -> Vec<CurveRow> {
    let cgs: HashMap<u32, _> = report.cgs.iter().map(|r| (r.move_no, r)).collect();
    report
        .features
        .iter()
        .map(|f| {
            let c = cgs.get(&f.move_no);
            CurveRow {
                move_no: f.move_no,
                color: f.color,
                sn: f.sn,
                wr: f.wr,
                tmr1: f.tmr_after[0],
                tmr2: f.tmr_after[1],
                tmr3: f.tmr_after[2],
                cgs_crisp: c.map(|r| r.crisp_cgs),
                cgs_label: c.map(|r| r.label.to_string()),
            }
        })
        .collect()
}

fn csv_err(path: &Path) -> impl Fn(csv::Error) -> CliError + '_ {
    move |e| CliError::input(path.display(), e)
}

fn write_csv<T: Serialize>(path: &Path, header: &[&str], rows: &[T]) -> Result<(), CliError> {
    let mut w = csv::WriterBuilder::new()
        .has_headers(false)
        .from_path(path)
        .map_err(csv_err(path))?;
    w.write_record(header).map_err(csv_err(path))?;
    for row in rows {
        w.serialize(row).map_err(csv_err(path))?;
    }
    w.flush().map_err(|e| CliError::input(path.display(), e))
}

pub const CURVE_HEADER: [&str; 9] = [
    "move_no", "color", "sn", "wr", "tmr1", "tmr2", "tmr3", "cgs_crisp", "cgs_label",
];

/// Writes one row per analyzed move. Returns the row count; an empty
/// report still gets a header.
pub fn write_curves(report: &GameReport, path: &Path) -> Result<usize, CliError> {
    let rows = curve_rows(report);
    if rows.is_empty() {
        tracing::warn!(path = %path.display(), "report has no analyzed moves; writing header only");
    }
    write_csv(path, &CURVE_HEADER, &rows)?;
    Ok(rows.len())
}

pub fn read_curves(path: &Path) -> Result<Vec<CurveRow>, CliError> {
    let mut r = csv::Reader::from_path(path).map_err(csv_err(path))?;
    r.deserialize().collect::<Result<_, _>>().map_err(csv_err(path))
}

/// How one player used the hints in one game.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HintRow {
    pub game: String,
    pub color: Color,
    pub player: Option<String>,
    pub rank: Option<String>,
    pub moves: u32,
    pub tmr1: f64,
    pub tmr2: f64,
    pub tmr3: f64,
    pub hit1: u32,
    pub hit2: u32,
    pub hit3: u32,
    pub hit4: u32,
    pub hit5: u32,
    pub misses: u32,
}

pub fn hint_rows(report: &ReplayReport) -> Vec<HintRow> {
    [(Color::Black, &report.black), (Color::White, &report.white)]
        .into_iter()
        .filter_map(|(color, player)| {
            let own: Vec<_> = report.report.features.iter().filter(|f| f.color == color).collect();
            let last = own.last()?;
            let mut hits = [0u32; 5];
            let mut misses = 0;
            for f in &own {
                match f.matched_rank {
                    Some(k) => hits[usize::from(k) - 1] += 1,
                    None => misses += 1,
                }
            }
            Some(HintRow {
                game: report.game.clone(),
                color,
                player: player.name.clone(),
                rank: player.rank.clone(),
                moves: own.len() as u32,
                tmr1: last.tmr_after[0],
                tmr2: last.tmr_after[1],
                tmr3: last.tmr_after[2],
                hit1: hits[0],
                hit2: hits[1],
                hit3: hits[2],
                hit4: hits[3],
                hit5: hits[4],
                misses,
            })
        })
        .collect()
}

/// Mean top-move rates of all players sharing a rank.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RankBucket {
    pub rank: String,
    pub players: usize,
    pub mean_tmr1: f64,
    pub mean_tmr2: f64,
    pub mean_tmr3: f64,
}

pub fn rank_buckets(rows: &[HintRow]) -> Vec<RankBucket> {
    let mut groups: BTreeMap<String, Vec<&HintRow>> = BTreeMap::new();
    for row in rows {
        let rank = row.rank.clone().unwrap_or_else(|| "unranked".into());
        groups.entry(rank).or_default().push(row);
    }
    groups
        .into_iter()
        .map(|(rank, rows)| {
            let n = rows.len() as f64;
            let mean = |f: fn(&HintRow) -> f64| rows.iter().map(|r| f(r)).sum::<f64>() / n;
            RankBucket {
                rank,
                players: rows.len(),
                mean_tmr1: mean(|r| r.tmr1),
                mean_tmr2: mean(|r| r.tmr2),
                mean_tmr3: mean(|r| r.tmr3),
            }
        })
        .collect()
}

/// `hints.csv` per game and side, `rank_buckets.csv` pooled by rank.
pub fn write_hints(dir: &Path, reports: &[&ReplayReport]) -> Result<(), CliError> {
    fs::create_dir_all(dir).map_err(|e| CliError::input(dir.display(), e))?;
    let rows: Vec<HintRow> = reports.iter().flat_map(|r| hint_rows(r)).collect();
    write_csv(
        &dir.join("hints.csv"),
        &[
            "game", "color", "player", "rank", "moves", "tmr1", "tmr2", "tmr3", "hit1", "hit2",
            "hit3", "hit4", "hit5", "misses",
        ],
        &rows,
    )?;
    write_csv(
        &dir.join("rank_buckets.csv"),
        &["rank", "players", "mean_tmr1", "mean_tmr2", "mean_tmr3"],
        &rank_buckets(&rows),
    )
}
