//! CSV and JSON statistics files.
//!
//! `matches.csv` has one row per completed match, in match-index order, then
//! one aggregate row whose `match` column reads `ALL`. Columns:
//!
//! | column | meaning |
//! |---|---|
//! | `match` | match index, or `ALL` |
//! | `seed` | match seed (master seed on the aggregate row) |
//! | `seat0`..`seat3` | agent name in each seat |
//! | `winner_seat` | seat of the winner |
//! | `winner_slot` | lineup slot of the winner |
//! | `end_reason` | `TARGET` or `CUTOFF` (aggregate: cutoff count) |
//! | `shifts`, `pizzas`, `plays`, `passes` | counts (aggregate: totals) |
//! | `pass_rate` | passes / (plays + passes), six decimals |
//! | `food_fights`, `dinners_served` | special actions declared |
//! | `faults` | agent faults logged |
//! | `score0`..`score3` | final score per seat (blank on the aggregate row) |
//!
//! Per-agent wins and means are in `stats.json`.

use std::fs;
use std::path::Path;

use crate::tournament::{seat_lineup, TournamentConfig, TournamentError, TournamentReport, TournamentStats};

pub const CSV_HEADER: [&str; 21] = [
    "match",
    "seed",
    "seat0",
    "seat1",
    "seat2",
    "seat3",
    "winner_seat",
    "winner_slot",
    "end_reason",
    "shifts",
    "pizzas",
    "plays",
    "passes",
    "pass_rate",
    "food_fights",
    "dinners_served",
    "faults",
    "score0",
    "score1",
    "score2",
    "score3",
];

fn rate(x: f64) -> String {
    format!("{x:.6}")
}

pub fn write_csv(path: &Path, config: &TournamentConfig, report: &TournamentReport) -> Result<(), TournamentError> {
    let mut out = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_path(path)?;
    out.write_record(CSV_HEADER)?;
    let (mut shifts, mut pizzas, mut plays, mut passes) = (0u64, 0u64, 0u64, 0u64);
    let (mut food, mut dinners, mut faults) = (0u64, 0u64, 0u64);
    for (index, s) in &report.summaries {
        let (_, slots) = seat_lineup(&config.lineup, *index, config.rotate_seats);
        let end = serde_json::to_value(s.end_reason).expect("enum serializes");
        let mut row = vec![index.to_string(), s.seed.to_string()];
        row.extend(s.seats.iter().cloned());
        row.extend([
            s.winner.0.to_string(),
            slots[s.winner.index()].to_string(),
            end.as_str().unwrap_or_default().to_string(),
            s.shifts.to_string(),
            s.pizzas.to_string(),
            s.plays.to_string(),
            s.passes.to_string(),
            rate(s.pass_rate()),
            s.food_fights.to_string(),
            s.dinners_served.to_string(),
            s.faults.to_string(),
        ]);
        row.extend(s.scores.iter().map(u32::to_string));
        out.write_record(&row)?;
        shifts += u64::from(s.shifts);
        pizzas += u64::from(s.pizzas);
        plays += u64::from(s.plays);
        passes += u64::from(s.passes);
        food += u64::from(s.food_fights);
        dinners += u64::from(s.dinners_served);
        faults += u64::from(s.faults);
    }
    let stats = &report.stats;
    let mut row = vec!["ALL".to_string(), config.master_seed.to_string()];
    row.extend(config.lineup.iter().cloned());
    row.extend([
        String::new(),
        String::new(),
        stats.cutoffs.to_string(),
        shifts.to_string(),
        pizzas.to_string(),
        plays.to_string(),
        passes.to_string(),
        rate(stats.pass_rate),
        food.to_string(),
        dinners.to_string(),
        faults.to_string(),
    ]);
    row.extend([String::new(), String::new(), String::new(), String::new()]);
    out.write_record(&row)?;
    out.flush()?;
    Ok(())
}

pub fn write_stats_json(path: &Path, stats: &TournamentStats) -> Result<(), TournamentError> {
    let mut text = serde_json::to_string_pretty(stats).expect("stats serialize");
    text.push('\n');
    fs::write(path, text)?;
    Ok(())
}
