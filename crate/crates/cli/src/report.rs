//! Text summaries of result CSVs.

use std::collections::BTreeMap;
use std::fmt::Write;

use crate::output::COLUMNS;

#[derive(Debug, Clone, PartialEq)]
pub struct ReportError(pub String);

impl std::fmt::Display for ReportError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for ReportError {}

struct Record {
    experiment: String,
    n_cells: usize,
    metric: String,
    value: f64,
}

fn parse(text: &str) -> Result<Vec<Record>, ReportError> {
    let body: String = text
        .lines()
        .filter(|l| !l.starts_with('#'))
        .map(|l| format!("{l}\n"))
        .collect();
    let mut rd = csv::Reader::from_reader(body.as_bytes());
    let headers = rd
        .headers()
        .map_err(|e| ReportError(format!("unreadable header: {e}")))?
        .clone();
    let missing: Vec<&str> = COLUMNS
        .iter()
        .copied()
        .filter(|c| !headers.iter().any(|h| h == *c))
        .collect();
    if !missing.is_empty() {
        return Err(ReportError(format!("missing columns: {}", missing.join(", "))));
    }
    let col = |name: &str| headers.iter().position(|h| h == name).expect("checked above");
    let (ce, cn, cm, cv) = (col("experiment"), col("n_cells"), col("metric"), col("value"));
    let mut out = Vec::new();
    for (i, rec) in rd.records().enumerate() {
        let rec = rec.map_err(|e| ReportError(format!("row {}: {e}", i + 1)))?;
        let field = |c: usize| rec.get(c).unwrap_or("");
        let n_cells = field(cn)
            .parse()
            .map_err(|_| ReportError(format!("row {}: bad n_cells `{}`", i + 1, field(cn))))?;
        let value = field(cv)
            .parse()
            .map_err(|_| ReportError(format!("row {}: bad value `{}`", i + 1, field(cv))))?;
        out.push(Record {
            experiment: field(ce).to_string(),
            n_cells,
            metric: field(cm).to_string(),
            value,
        });
    }
    Ok(out)
}

fn median(sorted: &[f64]) -> f64 {
    let m = sorted.len() / 2;
    if sorted.len() % 2 == 1 {
        sorted[m]
    } else {
        0.5 * (sorted[m - 1] + sorted[m])
    }
}

/// Whether the per-refinement minima head to zero: they never increase
/// and either reach zero or end below where they started.
pub fn trend_to_zero(mins: &[f64]) -> bool {
    let Some(&last) = mins.last() else {
        return false;
    };
    last == 0.0 || (mins.windows(2).all(|w| w[1] <= w[0]) && last < mins[0])
}

/// Per experiment and metric: min and median value per `n_cells`, plus a
/// bar plot and trend line for `defect`.
pub fn summarize(text: &str) -> Result<String, ReportError> {
    let records = parse(text)?;
    let mut grouped: BTreeMap<&str, BTreeMap<&str, BTreeMap<usize, Vec<f64>>>> = BTreeMap::new();
    for r in &records {
        grouped
            .entry(&r.experiment)
            .or_default()
            .entry(&r.metric)
            .or_default()
            .entry(r.n_cells)
            .or_default()
            .push(r.value);
    }
    let mut s = String::new();
    for (exp, metrics) in &grouped {
        let rows: usize = metrics.values().flat_map(|m| m.values()).map(Vec::len).sum();
        writeln!(s, "experiment {exp} ({rows} rows)").unwrap();
        for (metric, levels) in metrics {
            writeln!(s, "  {metric}").unwrap();
            writeln!(s, "    {:>8}  {:>4}  {:>13}  {:>13}", "n_cells", "rows", "min", "median").unwrap();
            let mut mins = Vec::new();
            for (n, vals) in levels {
                let mut v = vals.clone();
                v.sort_by(f64::total_cmp);
                mins.push(v[0]);
                writeln!(s, "    {n:>8}  {:>4}  {:>13.6e}  {:>13.6e}", v.len(), v[0], median(&v)).unwrap();
            }
            if *metric == "defect" {
                let top = mins.iter().copied().fold(0.0, f64::max);
                for ((n, _), m) in levels.iter().zip(&mins) {
                    let width = if top > 0.0 { (40.0 * m / top).round() as usize } else { 0 };
                    writeln!(s, "    n={n:<6} |{} {m:.3e}", "#".repeat(width)).unwrap();
                }
                let yes = trend_to_zero(&mins);
                writeln!(s, "  defect → 0 trend: {}", if yes { "yes" } else { "no" }).unwrap();
            }
        }
    }
    Ok(s)
}

#[cfg(test)]
mod tests {
    use super::*;

    const HEAD: &str = "# generated now\nexperiment,n_cells,epsilon,metric,value,seed,runtime_ms\n";

    #[test]
    fn monotone_defects() {
        let csv = format!("{HEAD}a,8,0.1,defect,0.4,0,1\na,16,0.1,defect,0.2,0,1\na,32,0.1,defect,0.1,0,1\n");
        let out = summarize(&csv).unwrap();
        assert!(out.contains("defect → 0 trend: yes"), "{out}");
    }

    #[test]
    fn single_row() {
        let csv = format!("{HEAD}a,8,0.3,defect,0.0,0,1\n");
        let out = summarize(&csv).unwrap();
        assert!(out.contains("experiment a (1 rows)"));
        assert!(out.contains("0.000000e0"));
        assert!(out.contains("trend: yes"));
    }

    #[test]
    fn grouped_by_name() {
        let csv = format!("{HEAD}b,8,,net_size,2,0,1\na,8,0.1,defect,0.3,0,1\na,16,0.1,defect,0.5,0,1\n");
        let out = summarize(&csv).unwrap();
        let ia = out.find("experiment a").unwrap();
        let ib = out.find("experiment b").unwrap();
        assert!(ia < ib);
        assert!(out.contains("trend: no"));
    }

    #[test]
    fn missing_columns() {
        let e = summarize("experiment,n_cells,metric\na,8,defect\n").unwrap_err();
        assert!(e.0.contains("epsilon"), "{e}");
    }
}
