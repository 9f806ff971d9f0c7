//! Suite report emitters: JSON, CSV, Markdown and plot data.

use std::fmt::Write as _;
use std::str::FromStr;

use serde::Serialize;
use stripex_core::bench::{score_of, BackendChoice, SuiteResult, SCORE_COLUMNS};

use crate::error::CliError;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ReportFormat {
    Json,
    Csv,
    Markdown,
    Plotdata,
}

impl ReportFormat {
    pub const ALL: [ReportFormat; 4] = [ReportFormat::Json, ReportFormat::Csv, ReportFormat::Markdown, ReportFormat::Plotdata];

    pub fn file_name(self) -> &'static str {
        match self {
            ReportFormat::Json => "report.json",
            ReportFormat::Csv => "report.csv",
            ReportFormat::Markdown => "report.md",
            ReportFormat::Plotdata => "plotdata.json",
        }
    }
}

impl FromStr for ReportFormat {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self, CliError> {
        match s {
            "json" => Ok(ReportFormat::Json),
            "csv" => Ok(ReportFormat::Csv),
            "markdown" | "md" => Ok(ReportFormat::Markdown),
            "plotdata" => Ok(ReportFormat::Plotdata),
            other => Err(CliError::usage(format!("unknown report format {other:?}"))),
        }
    }
}

pub fn emit_report(result: &SuiteResult, format: ReportFormat) -> String {
    match format {
        ReportFormat::Json => crate::io::to_json_pretty(result),
        ReportFormat::Csv => csv(result),
        ReportFormat::Markdown => markdown(result),
        ReportFormat::Plotdata => plotdata(result),
    }
}

pub fn parse_json(text: &str) -> serde_json::Result<SuiteResult> {
    serde_json::from_str(text)
}

/// Six significant digits, fixed notation, no negative zero.
pub fn sig6(x: f64) -> String {
    if !x.is_finite() {
        return format!("{x}");
    }
    if x == 0.0 {
        return String::from("0");
    }
    let mag = x.abs().log10().floor() as i32;
    let decimals = (5 - mag).max(0) as usize;
    let s = format!("{x:.decimals$}");
    if s.trim_start_matches('-').chars().all(|c| c == '0' || c == '.') {
        String::from("0")
    } else {
        s
    }
}

fn encoding_label(e: Option<bool>) -> &'static str {
    match e {
        Some(true) => "yes",
        Some(false) => "no",
        None => "?",
    }
}

fn csv(r: &SuiteResult) -> String {
    let mut out = String::from("backend,explainer,encoding,seed,score,value\n");
    for cell_backend in &r.backends {
        for (e, name) in r.explainers.iter().enumerate() {
            for (s, seed) in r.seeds.iter().enumerate() {
                let cell = r.cell(*cell_backend, e, s);
                for score in SCORE_COLUMNS {
                    if let Some(v) = score_of(&cell.scores, score) {
                        let _ = writeln!(
                            out,
                            "{},{},{},{},{},{}",
                            cell_backend.name(),
                            name,
                            encoding_label(r.encoding[e]),
                            seed,
                            score,
                            v
                        );
                    }
                }
            }
        }
    }
    out
}

fn columns(r: &SuiteResult, backend: BackendChoice) -> Vec<&'static str> {
    SCORE_COLUMNS
        .into_iter()
        .filter(|c| r.explainers.iter().any(|e| r.summary(backend, e, c).is_some()))
        .collect()
}

fn markdown(r: &SuiteResult) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "# Suite `{}` ({})\n", r.name, r.dgp);
    let _ = writeln!(
        out,
        "alpha = {}, H(y) = {}, H(y|x) = {}, seeds = {}; cells show the mean over seeds, bold marks the column optimum.\n",
        sig6(r.alpha),
        sig6(r.entropy.h_y),
        sig6(r.entropy.h_y_given_x),
        r.seeds.len()
    );
    for &b in &r.backends {
        let cols = columns(r, b);
        let _ = writeln!(out, "## Backend: {}\n", b.name());
        let _ = writeln!(out, "| explainer | encoding | {} |", cols.join(" | "));
        let _ = writeln!(out, "|---|---|{}", "---|".repeat(cols.len()));
        let best: Vec<Option<f64>> = cols
            .iter()
            .map(|c| {
                r.explainers
                    .iter()
                    .filter_map(|e| r.summary(b, e, c).map(|s| orient(c, s.mean)))
                    .fold(None, |acc: Option<f64>, v| Some(acc.map_or(v, |a| a.max(v))))
            })
            .collect();
        for (e, name) in r.explainers.iter().enumerate() {
            let mut row = format!("| {} | {} |", name, encoding_label(r.encoding[e]));
            for (c, col) in cols.iter().enumerate() {
                match r.summary(b, name, col) {
                    Some(s) => {
                        let text = sig6(s.mean);
                        let at_opt = best[c].is_some_and(|m| orient(col, s.mean) >= m - r.tolerance);
                        if at_opt {
                            let _ = write!(row, " **{text}** |");
                        } else {
                            let _ = write!(row, " {text} |");
                        }
                    }
                    None => row.push_str(" |"),
                }
            }
            let _ = writeln!(out, "{row}");
        }
        let threshold = format!("−H(y) = −{}", sig6(r.entropy.h_y));
        let _ = writeln!(out, "| {threshold} | |{}", " |".repeat(cols.len()));
        out.push('\n');
        let rows: Vec<_> = r.detection.iter().filter(|d| d.backend == b).collect();
        if !rows.is_empty() {
            let _ = writeln!(out, "### Detection ({})\n", b.name());
            let _ = writeln!(out, "| score | weak | strong | seeds agree |");
            let _ = writeln!(out, "|---|---|---|---|");
            let mark = |v: bool| if v { "✓" } else { "✗" };
            for d in rows {
                let _ = writeln!(out, "| {} | {} | {} | {} |", d.score, mark(d.weak), mark(d.strong), mark(d.stable));
            }
            out.push('\n');
        }
    }
    out
}

/// Higher is better after orientation: a ROAR complement log-likelihood
/// and an ENCODE-METER value are better when lower.
fn orient(score: &str, v: f64) -> f64 {
    match score {
        "roar" | "encode_meter" => -v,
        _ => v,
    }
}

#[derive(Serialize)]
struct PlotPoint<'a> {
    backend: &'static str,
    explainer: &'a str,
    encoding: Option<bool>,
    seed: u64,
    score: &'static str,
    value: f64,
}

#[derive(Serialize)]
struct Threshold {
    label: &'static str,
    value: f64,
}

#[derive(Serialize)]
struct PlotData<'a> {
    suite: &'a str,
    dgp: &'a str,
    points: Vec<PlotPoint<'a>>,
    thresholds: Vec<Threshold>,
}

fn plotdata(r: &SuiteResult) -> String {
    let mut points = Vec::new();
    for &b in &r.backends {
        for (e, name) in r.explainers.iter().enumerate() {
            for (s, &seed) in r.seeds.iter().enumerate() {
                let cell = r.cell(b, e, s);
                for score in SCORE_COLUMNS {
                    if let Some(value) = score_of(&cell.scores, score) {
                        points.push(PlotPoint { backend: b.name(), explainer: name, encoding: r.encoding[e], seed, score, value });
                    }
                }
            }
        }
    }
    let thresholds = vec![
        Threshold { label: "-H(y)", value: -r.entropy.h_y },
        Threshold { label: "-H(y|x)", value: -r.entropy.h_y_given_x },
    ];
    crate::io::to_json_pretty(&PlotData { suite: &r.name, dgp: &r.dgp, points, thresholds })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn six_significant_digits() {
        assert_eq!(sig6(-std::f64::consts::LN_2), "-0.693147");
        assert_eq!(sig6(-2.4764), "-2.47640");
        assert_eq!(sig6(123456.7), "123457");
        assert_eq!(sig6(0.0001234567), "0.000123457");
        assert_eq!(sig6(0.0), "0");
        assert_eq!(sig6(-1e-12), "-0.00000000000100000");
    }

    #[test]
    fn formats_parse() {
        assert_eq!("md".parse::<ReportFormat>().unwrap(), ReportFormat::Markdown);
        assert!("xml".parse::<ReportFormat>().is_err());
    }
}
