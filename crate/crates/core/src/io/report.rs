//! Indicator reports in JSON and CSV.

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::indicators::{IndicatorResult, SpreadCorrelation};
use crate::projection::JointProjection;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReportFormat {
    Json,
    Csv,
}

/// A JSON report, or the summary CSV plus the per-solution point CSV.
#[derive(Debug, Clone, PartialEq)]
pub struct ReportDocuments {
    pub main: String,
    /// Per-solution coordinates; CSV only, present when a projection was given.
    pub points: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub sets: Vec<SetRow>,
    pub correlation: CorrelationBlock,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub projection: Option<ProjectionBlock>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SetRow {
    pub label: String,
    pub n: usize,
    pub o: usize,
    pub ms: f64,
    pub mas: f64,
    pub max_d: f64,
    #[serde(rename = "L_pad")]
    pub l_pad: usize,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub diagnostics: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorrelationBlock {
    pub computable: bool,
    pub n: usize,
    pub pearson: Option<f64>,
    pub spearman: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reason: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProjectionBlock {
    pub stress: f64,
    pub eigenvalue_share: f64,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub diagnostics: Vec<String>,
    pub sets: Vec<ProjectedSet>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProjectedSet {
    pub label: String,
    pub points: Vec<PointRow>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PointRow {
    pub id: String,
    pub x: f64,
    pub y: f64,
}

impl CorrelationBlock {
    /// `correlation` is the outcome of
    /// [`spread_correlation`](crate::indicators::spread_correlation); an error
    /// (too few sets) becomes a not-computable block.
    pub fn from_outcome(n: usize, correlation: &Result<SpreadCorrelation>) -> Self {
        match correlation {
            Ok(c) => CorrelationBlock {
                computable: c.pearson.is_some() || c.spearman.is_some(),
                n: c.n,
                pearson: c.pearson,
                spearman: c.spearman,
                reason: (c.pearson.is_none() || c.spearman.is_none())
                    .then(|| "zero variance in ms or mas".to_string()),
            },
            Err(e) => CorrelationBlock {
                computable: false,
                n,
                pearson: None,
                spearman: None,
                reason: Some(e.to_string()),
            },
        }
    }
}

impl Report {
    pub fn new(
        results: &[IndicatorResult],
        correlation: &Result<SpreadCorrelation>,
        projection: Option<&JointProjection>,
    ) -> Self {
        Report {
            sets: results
                .iter()
                .map(|r| SetRow {
                    label: r.set_label.clone(),
                    n: r.n,
                    o: r.o,
                    ms: r.ms,
                    mas: r.mas,
                    max_d: r.max_d,
                    l_pad: r.l_pad,
                    diagnostics: r.diagnostics.clone(),
                })
                .collect(),
            correlation: CorrelationBlock::from_outcome(results.len(), correlation),
            projection: projection.map(projection_block),
        }
    }
}

pub fn projection_block(p: &JointProjection) -> ProjectionBlock {
    ProjectionBlock {
        stress: p.projection.stress,
        eigenvalue_share: p.projection.eigenvalue_share,
        diagnostics: p.projection.diagnostics.clone(),
        sets: p
            .sets
            .iter()
            .map(|s| ProjectedSet {
                label: s.label.clone(),
                points: s.points.iter().map(|q| PointRow { id: q.id.clone(), x: q.x, y: q.y }).collect(),
            })
            .collect(),
    }
}

pub fn write_report(
    results: &[IndicatorResult],
    correlation: &Result<SpreadCorrelation>,
    projection: Option<&JointProjection>,
    format: ReportFormat,
) -> ReportDocuments {
    render(&Report::new(results, correlation, projection), format)
}

pub fn render(report: &Report, format: ReportFormat) -> ReportDocuments {
    match format {
        ReportFormat::Json => {
            let mut main = serde_json::to_string_pretty(report).expect("report serializes");
            main.push('\n');
            ReportDocuments { main, points: None }
        }
        ReportFormat::Csv => ReportDocuments {
            main: summary_csv(report),
            points: report.projection.as_ref().map(points_csv),
        },
    }
}

fn summary_csv(report: &Report) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["label", "n", "o", "ms", "mas", "max_d", "L_pad"]).expect("in-memory write");
    for r in &report.sets {
        w.write_record([
            r.label.clone(),
            r.n.to_string(),
            r.o.to_string(),
            format_g17(r.ms),
            format_g17(r.mas),
            format_g17(r.max_d),
            r.l_pad.to_string(),
        ])
        .expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8")
}

fn points_csv(p: &ProjectionBlock) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["id", "set", "x", "y"]).expect("in-memory write");
    for set in &p.sets {
        for q in &set.points {
            w.write_record([q.id.clone(), set.label.clone(), format_g17(q.x), format_g17(q.y)])
                .expect("in-memory write");
        }
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8")
}

/// `%.17g`: 17 significant digits, trailing zeros trimmed.
pub fn format_g17(x: f64) -> String {
    if !x.is_finite() {
        return x.to_string();
    }
    if x == 0.0 {
        return "0".into();
    }
    let sci = format!("{:.16e}", x);
    let (mantissa, exp) = sci.split_once('e').expect("scientific notation");
    let exp: i32 = exp.parse().expect("integer exponent");
    if !(-5..17).contains(&exp) {
        return format!("{}e{}{:02}", trim_zeros(mantissa), if exp < 0 { '-' } else { '+' }, exp.abs());
    }
    let decimals = (16 - exp).max(0) as usize;
    trim_zeros(&format!("{:.*}", decimals, x)).to_string()
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}
