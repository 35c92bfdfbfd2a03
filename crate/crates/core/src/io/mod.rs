//! Dataset ingestion, report serialization and chart emission.

pub mod bundle;
pub mod report;
pub mod svg;

pub use bundle::{bundle_to_json, parse_bundle, parse_bundle_unchecked, AnalysisBundle, ParsedBundle};
pub use report::{render, write_report, Report, ReportDocuments, ReportFormat};
pub use svg::{emit_scatter_svg, min_enclosing_circle, Circle};
