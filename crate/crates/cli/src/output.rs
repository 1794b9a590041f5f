//! CSV and JSON writers and the determinism digest.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::run::{Outcome, Row};

pub const COLUMNS: [&str; 7] = [
    "experiment",
    "n_cells",
    "epsilon",
    "metric",
    "value",
    "seed",
    "runtime_ms",
];

/// `RESULT_DIR` when set, otherwise `fallback`.
pub fn result_dir(fallback: &Path) -> PathBuf {
    std::env::var_os("RESULT_DIR")
        .map(PathBuf::from)
        .unwrap_or_else(|| fallback.to_path_buf())
}

pub fn csv_text(rows: &[Row]) -> std::io::Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in rows {
        w.serialize(r)?;
    }
    if rows.is_empty() {
        w.write_record(COLUMNS)?;
    }
    let body = w.into_inner().map_err(|e| e.into_error())?;
    Ok(format!(
        "# generated {}\n{}",
        chrono::Utc::now().to_rfc3339_opts(chrono::SecondsFormat::Secs, true),
        String::from_utf8(body).expect("csv output is utf-8")
    ))
}

/// SHA-256 over the CSV body: `#` comment lines and the `runtime_ms`
/// column are left out, so reruns with the same spec and seed agree.
pub fn csv_digest(text: &str) -> String {
    let body: String = text
        .lines()
        .filter(|l| !l.starts_with('#'))
        .collect::<Vec<_>>()
        .join("\n");
    let mut rd = csv::ReaderBuilder::new()
        .has_headers(false)
        .from_reader(body.as_bytes());
    let mut h = Sha256::new();
    let mut drop = None;
    for (i, rec) in rd.records().enumerate() {
        let Ok(rec) = rec else {
            continue;
        };
        if i == 0 {
            drop = rec.iter().position(|f| f == "runtime_ms");
        }
        for (j, f) in rec.iter().enumerate() {
            if Some(j) != drop {
                h.update(f.as_bytes());
                h.update(b"\x1f");
            }
        }
        h.update(b"\n");
    }
    h.finalize().iter().map(|b| format!("{b:02x}")).collect()
}

#[derive(Serialize)]
struct Summary<'a> {
    experiment: &'a str,
    seed: u64,
    rows: usize,
    /// Value of each metric at the finest refinement (and last epsilon).
    final_values: Vec<(&'a str, Option<f64>, f64)>,
    nets: &'a [oa_core::compact::NetRecord],
    failures: &'a [String],
    coarse: &'a [String],
}

pub fn write_outputs(dir: &Path, stem: &str, name: &str, seed: u64, out: &Outcome) -> std::io::Result<(PathBuf, PathBuf)> {
    fs::create_dir_all(dir)?;
    let csv_path = dir.join(format!("{stem}.csv"));
    fs::File::create(&csv_path)?.write_all(csv_text(&out.rows)?.as_bytes())?;
    let top = out.rows.iter().map(|r| r.n_cells).max();
    let mut final_values: Vec<(&str, Option<f64>, f64)> = Vec::new();
    for r in out.rows.iter().filter(|r| Some(r.n_cells) == top) {
        match final_values.iter_mut().find(|(m, _, _)| *m == r.metric) {
            Some(entry) => *entry = (&r.metric, r.epsilon, r.value),
            None => final_values.push((&r.metric, r.epsilon, r.value)),
        }
    }
    let summary = Summary {
        experiment: name,
        seed,
        rows: out.rows.len(),
        final_values,
        nets: &out.nets,
        failures: &out.failures,
        coarse: &out.coarse,
    };
    let json_path = dir.join(format!("{stem}.json"));
    fs::write(&json_path, serde_json::to_string_pretty(&summary)? + "\n")?;
    Ok((csv_path, json_path))
}
