//! End-to-end scoring of a bundle: indicators for every set, the MS/MAS
//! correlation across sets and, optionally, the joint projection.

use crate::distance::DistanceWeights;
use crate::encoding::build_encoding;
use crate::error::Result;
use crate::indicators::{indicators_for, spread_correlation, IndicatorOptions, IndicatorResult, SpreadCorrelation};
use crate::io::report::{Report, ReportDocuments, ReportFormat};
use crate::io::{emit_scatter_svg, AnalysisBundle};
use crate::projection::{project_sets, JointProjection};

#[derive(Debug, Clone)]
pub struct Analysis {
    pub results: Vec<IndicatorResult>,
    /// Errors when fewer than three sets were scored.
    pub correlation: Result<SpreadCorrelation>,
    pub projection: Option<JointProjection>,
}

pub fn analyze(
    bundle: &AnalysisBundle,
    w: DistanceWeights,
    options: &IndicatorOptions,
    with_projection: bool,
) -> Result<Analysis> {
    let table = build_encoding(&bundle.sets);
    let results = indicators_for(&bundle.sets, &table, w, options)?;
    let correlation = spread_correlation(&results);
    let projection = if with_projection {
        Some(project_sets(&bundle.sets, &table, w)?)
    } else {
        None
    };
    Ok(Analysis { results, correlation, projection })
}

impl Analysis {
    pub fn report(&self) -> Report {
        Report::new(&self.results, &self.correlation, self.projection.as_ref())
    }

    pub fn render(&self, format: ReportFormat) -> ReportDocuments {
        crate::io::render(&self.report(), format)
    }

    /// Scatter chart of the projection; `None` when no projection was computed.
    pub fn svg(&self) -> Option<String> {
        self.projection.as_ref().map(|p| emit_scatter_svg(&p.sets, &self.results))
    }
}
