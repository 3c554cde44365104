//! CSV report rows and algorithm-vs-algorithm comparison.

use std::collections::BTreeMap;
use std::fs::OpenOptions;
use std::io::{Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportRow {
    pub benchmark: String,
    pub algo: String,
    pub mode: String,
    /// pJ.
    pub total_energy: f64,
    pub comm_cost: u128,
    /// Empty when the graph has no positive-volume arc.
    pub avg_latency: Option<f64>,
    pub eta: usize,
    pub runtime_ms: f64,
    pub seed: u64,
}

impl ReportRow {
    /// `algo/mode`, the key rows are compared by.
    pub fn variant(&self) -> String {
        format!("{}/{}", self.algo, self.mode)
    }

    /// Copy with the runtime zeroed, for run-to-run comparisons.
    pub fn without_runtime(&self) -> ReportRow {
        ReportRow {
            runtime_ms: 0.0,
            ..self.clone()
        }
    }
}

fn csv_err(e: csv::Error) -> Error {
    Error::InvalidParam(format!("csv: {e}"))
}

pub fn write_rows<W: Write>(w: W, rows: &[ReportRow], header: bool) -> Result<()> {
    let mut wtr = csv::WriterBuilder::new().has_headers(header).from_writer(w);
    for r in rows {
        wtr.serialize(r).map_err(csv_err)?;
    }
    wtr.flush()
        .map_err(|e| Error::InvalidParam(format!("csv: {e}")))?;
    Ok(())
}

pub fn rows_to_csv(rows: &[ReportRow]) -> String {
    let mut buf = Vec::new();
    write_rows(&mut buf, rows, true).expect("in-memory write");
    String::from_utf8(buf).expect("csv output is utf-8")
}

/// Appends rows to `path`, writing the header when the file is new or empty.
pub fn append_rows(path: &Path, rows: &[ReportRow]) -> std::io::Result<()> {
    let fresh = std::fs::metadata(path).map(|m| m.len() == 0).unwrap_or(true);
    let file = OpenOptions::new().create(true).append(true).open(path)?;
    write_rows(file, rows, fresh).map_err(|e| std::io::Error::other(e.to_string()))
}

pub fn read_rows<R: Read>(r: R) -> Result<Vec<ReportRow>> {
    let mut rdr = csv::Reader::from_reader(r);
    rdr.deserialize().map(|r| r.map_err(csv_err)).collect()
}

/// Percentage reductions of variant A relative to variant B on one
/// benchmark: `100·(B − A)/B`. `None` when B is zero and A is not.
#[derive(Debug, Clone, PartialEq)]
pub struct Reduction {
    pub benchmark: String,
    pub energy: Option<f64>,
    pub cost: Option<f64>,
    pub latency: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Comparison {
    pub a: String,
    pub b: String,
    pub per_benchmark: Vec<Reduction>,
    pub mean_energy: Option<f64>,
    pub mean_cost: Option<f64>,
    pub mean_latency: Option<f64>,
}

impl Comparison {
    pub fn to_csv(&self) -> String {
        let fmt = |v: Option<f64>| v.map(|x| format!("{x:.4}")).unwrap_or_default();
        let mut out = "benchmark,energy_red_pct,cost_red_pct,latency_red_pct\n".to_string();
        for r in &self.per_benchmark {
            out.push_str(&format!(
                "{},{},{},{}\n",
                r.benchmark,
                fmt(r.energy),
                fmt(r.cost),
                fmt(r.latency)
            ));
        }
        out.push_str(&format!(
            "MEAN,{},{},{}\n",
            fmt(self.mean_energy),
            fmt(self.mean_cost),
            fmt(self.mean_latency)
        ));
        out
    }
}

pub fn reduction_pct(a: f64, b: f64) -> Option<f64> {
    if b == 0.0 {
        return (a == 0.0).then_some(0.0);
    }
    Some(100.0 * (b - a) / b)
}

fn mean(values: impl Iterator<Item = Option<f64>>) -> Option<f64> {
    let v: Vec<f64> = values.flatten().collect();
    (!v.is_empty()).then(|| v.iter().sum::<f64>() / v.len() as f64)
}

/// Compares variant `a` against variant `b` (both `algo/mode`) on every
/// benchmark. Both variants must cover exactly the same benchmarks, once
/// each.
pub fn compare_report(rows: &[ReportRow], a: &str, b: &str) -> Result<Comparison> {
    let collect = |variant: &str| -> Result<BTreeMap<String, &ReportRow>> {
        let mut m = BTreeMap::new();
        for r in rows.iter().filter(|r| r.variant() == variant) {
            if m.insert(r.benchmark.clone(), r).is_some() {
                return Err(Error::MismatchedRows(format!(
                    "benchmark '{}' appears twice for {variant}",
                    r.benchmark
                )));
            }
        }
        Ok(m)
    };
    let ra = collect(a)?;
    let rb = collect(b)?;
    if ra.is_empty() {
        return Err(Error::MismatchedRows(format!("no rows for {a}")));
    }
    if !ra.keys().eq(rb.keys()) {
        return Err(Error::MismatchedRows(format!(
            "{a} covers {:?}, {b} covers {:?}",
            ra.keys().collect::<Vec<_>>(),
            rb.keys().collect::<Vec<_>>()
        )));
    }

    let per_benchmark: Vec<Reduction> = ra
        .iter()
        .map(|(name, x)| {
            let y = rb[name];
            Reduction {
                benchmark: name.clone(),
                energy: reduction_pct(x.total_energy, y.total_energy),
                cost: reduction_pct(x.comm_cost as f64, y.comm_cost as f64),
                latency: match (x.avg_latency, y.avg_latency) {
                    (Some(p), Some(q)) => reduction_pct(p, q),
                    _ => None,
                },
            }
        })
        .collect();

    Ok(Comparison {
        a: a.to_string(),
        b: b.to_string(),
        mean_energy: mean(per_benchmark.iter().map(|r| r.energy)),
        mean_cost: mean(per_benchmark.iter().map(|r| r.cost)),
        mean_latency: mean(per_benchmark.iter().map(|r| r.latency)),
        per_benchmark,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn row(bench: &str, algo: &str, e: f64, c: u128, l: Option<f64>) -> ReportRow {
        ReportRow {
            benchmark: bench.into(),
            algo: algo.into(),
            mode: "map".into(),
            total_energy: e,
            comm_cost: c,
            avg_latency: l,
            eta: 3,
            runtime_ms: 1.5,
            seed: 0,
        }
    }

    #[test]
    fn identical_rows_give_zero() {
        let rows = vec![row("x", "ddmap", 5.0, 3, Some(2.0)), row("x", "spiral", 5.0, 3, Some(2.0))];
        let c = compare_report(&rows, "ddmap/map", "spiral/map").unwrap();
        assert_eq!(c.per_benchmark[0].energy, Some(0.0));
        assert_eq!(c.mean_cost, Some(0.0));
        assert_eq!(c.mean_latency, Some(0.0));
    }

    #[test]
    fn halving_is_fifty_percent() {
        let rows = vec![
            row("x", "ddmap", 100.0, 10, Some(1.0)),
            row("x", "crinkle", 200.0, 40, Some(4.0)),
            row("y", "ddmap", 0.0, 0, None),
            row("y", "crinkle", 0.0, 5, Some(1.0)),
        ];
        let c = compare_report(&rows, "ddmap/map", "crinkle/map").unwrap();
        assert_eq!(c.per_benchmark[0].energy, Some(50.0));
        assert_eq!(c.per_benchmark[0].cost, Some(75.0));
        assert_eq!(c.per_benchmark[1].energy, Some(0.0));
        assert_eq!(c.per_benchmark[1].cost, Some(100.0));
        assert_eq!(c.per_benchmark[1].latency, None);
        assert_eq!(c.mean_energy, Some(25.0));
        assert_eq!(c.mean_latency, Some(75.0));
        assert!(c.to_csv().ends_with("MEAN,25.0000,87.5000,75.0000\n"));
    }

    #[test]
    fn mismatched_sets_rejected() {
        let rows = vec![row("x", "ddmap", 1.0, 1, None), row("y", "spiral", 1.0, 1, None)];
        assert!(matches!(
            compare_report(&rows, "ddmap/map", "spiral/map"),
            Err(Error::MismatchedRows(_))
        ));
        let dup = vec![
            row("x", "ddmap", 1.0, 1, None),
            row("x", "ddmap", 2.0, 1, None),
            row("x", "spiral", 1.0, 1, None),
        ];
        assert!(compare_report(&dup, "ddmap/map", "spiral/map").is_err());
        assert!(compare_report(&dup, "pso/map", "spiral/map").is_err());
    }

    #[test]
    fn csv_roundtrip() {
        let rows = vec![row("x", "ddmap", 101.7, 10, Some(2.5)), row("y", "spiral", 0.0, 0, None)];
        let text = rows_to_csv(&rows);
        assert!(text.starts_with(
            "benchmark,algo,mode,total_energy,comm_cost,avg_latency,eta,runtime_ms,seed\n"
        ));
        assert!(text.contains("y,spiral,map,0.0,0,,3,1.5,0\n"));
        assert_eq!(read_rows(text.as_bytes()).unwrap(), rows);
    }

    #[test]
    fn append_writes_header_once() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("out.csv");
        append_rows(&path, &[row("x", "ddmap", 1.0, 1, None)]).unwrap();
        append_rows(&path, &[row("y", "ddmap", 2.0, 1, None)]).unwrap();
        let text = std::fs::read_to_string(&path).unwrap();
        assert_eq!(text.matches("benchmark,").count(), 1);
        assert_eq!(read_rows(text.as_bytes()).unwrap().len(), 2);
    }
}
