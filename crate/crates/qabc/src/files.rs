//! Scenario documents (strict JSON) and Taguchi CSV tables.

use std::fs;
use std::path::Path;

use qabc_core::doe::{Factor, LevelEffect, RowResult, TaguchiReport};
use qabc_core::{RawScenario, Scenario};

use crate::error::{Error, Result};

/// Parses and validates a scenario document. Unknown keys are rejected.
pub fn load_scenario(text: &str) -> Result<Scenario> {
    let raw: RawScenario = serde_json::from_str(text)?;
    Ok(Scenario::new(raw)?)
}

/// Pretty JSON with a trailing newline; `horizon_s` is always written.
pub fn save_scenario(scenario: &Scenario) -> String {
    let mut s = serde_json::to_string_pretty(&scenario.to_raw()).expect("scenario serializes");
    s.push('\n');
    s
}

pub fn read_scenario(path: &Path) -> Result<Scenario> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    load_scenario(&text)
}

pub fn write_scenario(path: &Path, scenario: &Scenario) -> Result<()> {
    write_text(path, &save_scenario(scenario))
}

pub(crate) fn write_text(path: &Path, text: &str) -> Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    }
    fs::write(path, text).map_err(|e| Error::io(path, e))
}

fn parse_f64(field: &str, s: &str) -> Result<f64> {
    s.trim().parse().map_err(|_| Error::Format(format!("{field}: not a number: {s:?}")))
}

fn parse_usize(field: &str, s: &str) -> Result<usize> {
    s.trim().parse().map_err(|_| Error::Format(format!("{field}: not an integer: {s:?}")))
}

/// `row,N_p,I,L,rep_1..rep_k,mean,snr_db,infeasible`
pub fn rows_csv(report: &TaguchiReport) -> Result<String> {
    let reps = report.rows.first().map_or(0, |r| r.fitness.len());
    let mut w = csv::Writer::from_writer(Vec::new());
    let mut header: Vec<String> = ["row", "N_p", "I", "L"].map(String::from).to_vec();
    header.extend((1..=reps).map(|k| format!("rep_{k}")));
    header.extend(["mean", "snr_db", "infeasible"].map(String::from));
    w.write_record(&header)?;
    for r in &report.rows {
        let mut rec = vec![r.row.to_string(), r.n_pop.to_string(), r.n_iter.to_string(), r.scout_limit.to_string()];
        rec.extend(r.fitness.iter().map(f64::to_string));
        rec.extend([r.mean.to_string(), r.snr_db.to_string(), r.infeasible.to_string()]);
        w.write_record(&rec)?;
    }
    into_string(w)
}

/// `factor,level,value,avg_fitness,snr_db,is_best`
pub fn effects_csv(report: &TaguchiReport) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["factor", "level", "value", "avg_fitness", "snr_db", "is_best"])?;
    for l in &report.levels {
        w.write_record([
            l.factor.name().to_string(),
            l.level.to_string(),
            l.value.to_string(),
            l.avg_fitness.to_string(),
            l.snr_db.to_string(),
            l.is_best.to_string(),
        ])?;
    }
    into_string(w)
}

fn into_string(w: csv::Writer<Vec<u8>>) -> Result<String> {
    let bytes = w.into_inner().map_err(|e| Error::Format(e.to_string()))?;
    String::from_utf8(bytes).map_err(|e| Error::Format(e.to_string()))
}

pub fn parse_rows_csv(text: &str) -> Result<Vec<RowResult>> {
    let mut rdr = csv::Reader::from_reader(text.as_bytes());
    let header = rdr.headers()?.clone();
    let reps = header.iter().filter(|h| h.starts_with("rep_")).count();
    if header.len() != reps + 7 {
        return Err(Error::Format(format!("rows.csv: unexpected header {header:?}")));
    }
    rdr.records()
        .map(|rec| {
            let rec = rec?;
            let get = |i: usize| rec.get(i).unwrap_or("");
            Ok(RowResult {
                row: parse_usize("row", get(0))?,
                n_pop: parse_usize("N_p", get(1))?,
                n_iter: parse_usize("I", get(2))?,
                scout_limit: parse_usize("L", get(3))? as u32,
                fitness: (0..reps).map(|k| parse_f64("rep", get(4 + k))).collect::<Result<_>>()?,
                mean: parse_f64("mean", get(4 + reps))?,
                snr_db: parse_f64("snr_db", get(5 + reps))?,
                infeasible: get(6 + reps) == "true",
            })
        })
        .collect()
}

pub fn parse_effects_csv(text: &str) -> Result<Vec<LevelEffect>> {
    let mut rdr = csv::Reader::from_reader(text.as_bytes());
    rdr.records()
        .map(|rec| {
            let rec = rec?;
            let get = |i: usize| rec.get(i).unwrap_or("");
            let factor = Factor::ALL
                .into_iter()
                .find(|f| f.name() == get(0))
                .ok_or_else(|| Error::Format(format!("effects.csv: unknown factor {:?}", get(0))))?;
            Ok(LevelEffect {
                factor,
                level: parse_usize("level", get(1))?,
                value: parse_f64("value", get(2))?,
                avg_fitness: parse_f64("avg_fitness", get(3))?,
                snr_db: parse_f64("snr_db", get(4))?,
                is_best: get(5) == "true",
            })
        })
        .collect()
}
