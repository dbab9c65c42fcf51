//! Evaluation reports and their JSON, CSV and plot-data emitters.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::config::RunConfig;
use crate::embed::Normalization;
use crate::error::{Error, Result};
use crate::fsutil::write_atomic;
use crate::metrics::{CapabilityMatrix, SimilarityStats};
use crate::perturb::Category;
use crate::retrieval::TaskId;

pub const REPORT_FILE: &str = "report.json";

/// Rounds a percentage to the reported precision.
pub fn round_pct(v: f64) -> f64 {
    (v * 100.0).round() / 100.0
}

/// Rounds an MRR to the reported precision.
pub fn round_mrr(v: f64) -> f64 {
    (v * 1000.0).round() / 1000.0
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunMetadata {
    pub tool_version: String,
    pub dataset: String,
    pub corpus_documents: usize,
    pub model: String,
    pub dimension: usize,
    pub normalization: Normalization,
    pub seed: u64,
    pub pair_cap: usize,
    pub aggregation: String,
    pub generated_at: Option<String>,
    pub config_digest: String,
    pub config: RunConfig,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RetrievalRow {
    pub task: TaskId,
    pub queries: usize,
    pub candidates_per_query: usize,
    pub mrr: f64,
    pub t100: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KValue {
    pub k: usize,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NnRetRow {
    pub code: String,
    pub category: Category,
    pub queries: usize,
    pub candidates: usize,
    pub values: Vec<KValue>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NnRetCategoryRow {
    pub category: Category,
    pub codes: usize,
    pub values: Vec<KValue>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AopRow {
    pub code: String,
    pub category: Category,
    pub k: usize,
    pub pairs: usize,
    pub candidates: usize,
    pub aop: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AopCategoryRow {
    pub category: Category,
    pub k: usize,
    pub codes: usize,
    pub aop: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimilarityRow {
    pub code: String,
    pub category: Option<Category>,
    pub stats: SimilarityStats,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CapabilitySection {
    pub k: usize,
    pub aggregation: String,
    pub matrix: CapabilityMatrix,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub metadata: RunMetadata,
    pub retrieval: Vec<RetrievalRow>,
    pub nn_ret: Vec<NnRetRow>,
    pub nn_ret_by_category: Vec<NnRetCategoryRow>,
    pub aop: Vec<AopRow>,
    pub aop_by_category: Vec<AopCategoryRow>,
    pub similarity: Vec<SimilarityRow>,
    pub capability: Option<CapabilitySection>,
}

impl EvalReport {
    pub fn to_json(&self) -> Result<String> {
        let mut s = serde_json::to_string_pretty(self)?;
        s.push('\n');
        Ok(s)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = crate::fsutil::read_to_string(path)?;
        serde_json::from_str(&text).map_err(|e| Error::Parse {
            path: path.display().to_string(),
            line: e.line(),
            message: e.to_string(),
        })
    }

    pub fn retrieval_row(&self, task: TaskId) -> Option<&RetrievalRow> {
        self.retrieval.iter().find(|r| r.task == task)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
    Plotdata,
}

impl FromStr for Format {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "json" => Ok(Format::Json),
            "csv" => Ok(Format::Csv),
            "plotdata" | "plot" => Ok(Format::Plotdata),
            other => Err(Error::Validation(format!("unknown report format {other:?}; expected json, csv or plotdata"))),
        }
    }
}

fn pct(v: f64) -> String {
    format!("{v:.2}")
}

fn ratio(v: f64) -> String {
    format!("{v:.3}")
}

fn stat(v: f64) -> String {
    format!("{v:.6}")
}

fn csv_bytes(header: &[String], rows: &[Vec<String>]) -> Result<Vec<u8>> {
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(Vec::new());
    let wrap = |e: csv::Error| Error::Format(format!("csv: {e}"));
    w.write_record(header).map_err(wrap)?;
    for r in rows {
        w.write_record(r).map_err(wrap)?;
    }
    w.into_inner().map_err(|e| Error::Format(format!("csv: {e}")))
}

fn strings(items: &[&str]) -> Vec<String> {
    items.iter().map(|s| s.to_string()).collect()
}

fn k_union(reports: &[EvalReport], pick: impl Fn(&EvalReport) -> Vec<usize>) -> Vec<usize> {
    let mut ks: Vec<usize> = reports.iter().flat_map(pick).collect();
    ks.sort_unstable();
    ks.dedup();
    ks
}

fn value_at(values: &[KValue], k: usize) -> String {
    values.iter().find(|v| v.k == k).map_or_else(String::new, |v| pct(v.value))
}

/// One CSV file per table, each with a header row. Tables with no rows are skipped.
pub fn csv_tables(reports: &[EvalReport]) -> Result<Vec<(String, Vec<u8>)>> {
    let mut out = Vec::new();
    for task in [TaskId::Task1, TaskId::Task2] {
        let rows: Vec<Vec<String>> = reports
            .iter()
            .filter_map(|r| {
                r.retrieval_row(task).map(|row| {
                    vec![r.metadata.dataset.clone(), r.metadata.model.clone(), ratio(row.mrr), pct(row.t100)]
                })
            })
            .collect();
        if !rows.is_empty() {
            out.push((format!("{task}.csv"), csv_bytes(&strings(&["dataset", "model", "MRR", "T100"]), &rows)?));
        }
    }

    let ks = k_union(reports, |r| r.nn_ret.iter().flat_map(|n| n.values.iter().map(|v| v.k)).collect());
    let nn_cols: Vec<String> = ks.iter().map(|k| format!("NN{k}_Ret")).collect();
    let rows: Vec<Vec<String>> = reports
        .iter()
        .flat_map(|r| {
            r.nn_ret.iter().map(|n| {
                let mut row = vec![
                    r.metadata.dataset.clone(),
                    r.metadata.model.clone(),
                    n.code.clone(),
                    n.category.to_string(),
                    n.queries.to_string(),
                ];
                row.extend(ks.iter().map(|&k| value_at(&n.values, k)));
                row
            })
        })
        .collect();
    if !rows.is_empty() {
        let mut header = strings(&["dataset", "model", "code", "category", "queries"]);
        header.extend(nn_cols.iter().cloned());
        out.push(("nn_ret.csv".into(), csv_bytes(&header, &rows)?));
        let rows: Vec<Vec<String>> = reports
            .iter()
            .flat_map(|r| {
                r.nn_ret_by_category.iter().map(|n| {
                    let mut row = vec![
                        r.metadata.dataset.clone(),
                        r.metadata.model.clone(),
                        n.category.to_string(),
                        n.codes.to_string(),
                    ];
                    row.extend(ks.iter().map(|&k| value_at(&n.values, k)));
                    row
                })
            })
            .collect();
        let mut header = strings(&["dataset", "model", "category", "codes"]);
        header.extend(nn_cols);
        out.push(("nn_ret_category.csv".into(), csv_bytes(&header, &rows)?));
    }

    let rows: Vec<Vec<String>> = reports
        .iter()
        .flat_map(|r| {
            r.aop.iter().map(|a| {
                vec![
                    r.metadata.dataset.clone(),
                    r.metadata.model.clone(),
                    a.code.clone(),
                    a.category.to_string(),
                    a.k.to_string(),
                    a.pairs.to_string(),
                    a.candidates.to_string(),
                    pct(a.aop),
                ]
            })
        })
        .collect();
    if !rows.is_empty() {
        let header = strings(&["dataset", "model", "code", "category", "k", "pairs", "candidates", "AOP"]);
        out.push(("aop.csv".into(), csv_bytes(&header, &rows)?));
        let rows: Vec<Vec<String>> = reports
            .iter()
            .flat_map(|r| {
                r.aop_by_category.iter().map(|a| {
                    vec![
                        r.metadata.dataset.clone(),
                        r.metadata.model.clone(),
                        a.category.to_string(),
                        a.k.to_string(),
                        a.codes.to_string(),
                        pct(a.aop),
                    ]
                })
            })
            .collect();
        let header = strings(&["dataset", "model", "category", "k", "codes", "AOP"]);
        out.push(("aop_category.csv".into(), csv_bytes(&header, &rows)?));
    }

    let rows: Vec<Vec<String>> = reports
        .iter()
        .flat_map(|r| {
            r.similarity.iter().map(|s| {
                vec![
                    r.metadata.dataset.clone(),
                    r.metadata.model.clone(),
                    s.code.clone(),
                    s.category.map(|c| c.to_string()).unwrap_or_default(),
                    s.stats.vectors.to_string(),
                    s.stats.pairs.to_string(),
                    s.stats.sampled.to_string(),
                    stat(s.stats.mean),
                    stat(s.stats.std),
                    stat(s.stats.min),
                    stat(s.stats.max),
                    pct(s.stats.percent_above_mean),
                ]
            })
        })
        .collect();
    if !rows.is_empty() {
        let header = strings(&[
            "dataset",
            "model",
            "code",
            "category",
            "vectors",
            "pairs",
            "sampled",
            "mean",
            "std",
            "min",
            "max",
            "percent_above_mean",
        ]);
        out.push(("similarity.csv".into(), csv_bytes(&header, &rows)?));
    }

    let rows: Vec<Vec<String>> = reports
        .iter()
        .flat_map(|r| {
            r.capability.iter().flat_map(move |c| {
                c.matrix.cells.iter().map(move |cell| {
                    vec![
                        r.metadata.dataset.clone(),
                        r.metadata.model.clone(),
                        c.k.to_string(),
                        cell.category.to_string(),
                        pct(cell.value),
                        cell.threshold.to_string(),
                        cell.optimal.to_string(),
                    ]
                })
            })
        })
        .collect();
    if !rows.is_empty() {
        let header = strings(&["dataset", "model", "k", "category", "AOP", "threshold", "optimal"]);
        out.push(("capability.csv".into(), csv_bytes(&header, &rows)?));
    }
    Ok(out)
}

fn series_header(out: &mut String, r: &EvalReport, columns: &str) {
    let _ = writeln!(out, "# series: {} / {}", r.metadata.dataset, r.metadata.model);
    let _ = writeln!(out, "# {columns}");
}

/// Stacked-bar increments: the first k, then each later k minus the previous.
fn stacked(values: &[KValue]) -> (String, Vec<f64>) {
    let mut vs = values.to_vec();
    vs.sort_by_key(|v| v.k);
    let mut names = Vec::new();
    let mut cols = Vec::new();
    let mut prev: Option<KValue> = None;
    for v in vs {
        match prev {
            None => {
                names.push(format!("NN{}_Ret", v.k));
                cols.push(v.value);
            }
            Some(p) => {
                names.push(format!("NN{}_minus_NN{}", v.k, p.k));
                cols.push(v.value - p.value);
            }
        }
        prev = Some(v);
    }
    (names.join(" "), cols)
}

/// Whitespace-delimited series, one block per report, blocks separated by two blank lines.
pub fn plot_files(reports: &[EvalReport]) -> Vec<(String, Vec<u8>)> {
    let mut files: Vec<(String, String)> = Vec::new();
    let mut add = |name: &str, block: String| match files.iter_mut().find(|(n, _)| n == name) {
        Some((_, body)) => {
            body.push_str("\n\n");
            body.push_str(&block);
        }
        None => files.push((name.to_string(), block)),
    };
    for r in reports {
        if !r.nn_ret.is_empty() {
            for (name, rows) in [
                ("nn_ret_class.dat", r.nn_ret.iter().map(|n| (n.code.clone(), &n.values[..])).collect::<Vec<_>>()),
                (
                    "nn_ret_category.dat",
                    r.nn_ret_by_category.iter().map(|n| (n.category.to_string(), &n.values[..])).collect(),
                ),
            ] {
                let mut block = String::new();
                let (cols, _) = stacked(rows.first().map_or(&[][..], |r| r.1));
                series_header(&mut block, r, &format!("index label {cols}"));
                for (i, (label, values)) in rows.iter().enumerate() {
                    let (_, ys) = stacked(values);
                    let ys: Vec<String> = ys.into_iter().map(pct).collect();
                    let _ = writeln!(block, "{i} {label} {}", ys.join(" "));
                }
                add(name, block);
            }
        }
        if !r.aop_by_category.is_empty() {
            let mut ks: Vec<usize> = r.aop_by_category.iter().map(|a| a.k).collect();
            ks.sort_unstable();
            ks.dedup();
            let mut block = String::new();
            let cols: Vec<String> = ks.iter().map(|k| format!("AOP{k}")).collect();
            series_header(&mut block, r, &format!("index category {}", cols.join(" ")));
            let mut cats: Vec<Category> = r.aop_by_category.iter().map(|a| a.category).collect();
            cats.dedup();
            for (i, c) in cats.iter().enumerate() {
                let ys: Vec<String> = ks
                    .iter()
                    .map(|&k| {
                        r.aop_by_category
                            .iter()
                            .find(|a| a.category == *c && a.k == k)
                            .map_or("nan".into(), |a| pct(a.aop))
                    })
                    .collect();
                let _ = writeln!(block, "{i} {c} {}", ys.join(" "));
            }
            add("aop_category.dat", block);
        }
        if !r.similarity.is_empty() {
            let mut block = String::new();
            series_header(&mut block, r, "index code mean std min max percent_above_mean");
            for (i, s) in r.similarity.iter().enumerate() {
                let _ = writeln!(
                    block,
                    "{i} {} {} {} {} {} {}",
                    s.code,
                    stat(s.stats.mean),
                    stat(s.stats.std),
                    stat(s.stats.min),
                    stat(s.stats.max),
                    pct(s.stats.percent_above_mean)
                );
            }
            add("similarity.dat", block);
        }
    }
    files.into_iter().map(|(n, b)| (n, b.into_bytes())).collect()
}

/// Writes the requested format into `dir` and returns the paths written.
pub fn emit(reports: &[EvalReport], format: Format, dir: impl AsRef<Path>) -> Result<Vec<PathBuf>> {
    let dir = dir.as_ref();
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let files: Vec<(String, Vec<u8>)> = match format {
        Format::Json => match reports {
            [one] => vec![(REPORT_FILE.to_string(), one.to_json()?.into_bytes())],
            many => {
                let mut s = serde_json::to_string_pretty(many)?;
                s.push('\n');
                vec![("reports.json".to_string(), s.into_bytes())]
            }
        },
        Format::Csv => csv_tables(reports)?,
        Format::Plotdata => plot_files(reports),
    };
    let mut written = Vec::with_capacity(files.len());
    for (name, bytes) in files {
        let p = dir.join(name);
        write_atomic(&p, &bytes)?;
        written.push(p);
    }
    Ok(written)
}
