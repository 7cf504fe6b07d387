//! Structural and semantic analysis for SQL query corpora.
//!
//! The library decomposes questions-expressed-as-queries along two axes:
//!
//! * **FAR structure** — every supported query is read as Filter (scoping
//!   predicates), Aggregate (summarization), and Return (the result
//!   relation), with conformance checking and precise reason codes where
//!   the structure is degenerate.
//! * **W5H dimensions** — filter predicates are classified by the kind of
//!   constraint they express: WHO (entities), WHAT (attributes), WHERE
//!   (location), WHEN (time), WHY (causal linkage), HOW (mechanism or
//!   quantification).
//!
//! On top of those sit a nested-query decomposer that turns subqueries into
//! explicit dataflow steps, and a corpus profiler that reduces whole query
//! sets to dimensional fingerprints comparable against built-in reference
//! profiles of published text-to-SQL benchmarks.

pub mod cli;
pub mod decompose;
pub mod far;
pub mod generate;
pub mod profile;
pub mod render;
pub mod schema;
pub mod sql;
pub mod w5h;

use serde::Serialize;
use thiserror::Error;

/// Everything the analyzer can say about one query, in one document.
#[derive(Debug, Clone, Serialize)]
pub struct QueryAnalysis {
    /// The query printed back in canonical form.
    pub canonical: String,
    pub far: far::FarStructure,
    pub conformance: far::ConformanceReport,
    pub dimensions: w5h::QueryDimensions,
    pub plan: decompose::DecompositionPlan,
}

#[derive(Debug, Error)]
pub enum AnalyzeError {
    #[error(transparent)]
    Sql(#[from] sql::SqlError),
    #[error(transparent)]
    Far(#[from] far::FarError),
    #[error(transparent)]
    Resolve(#[from] schema::ResolveError),
}

/// Run the full pipeline — parse, FAR extraction, conformance, dimensional
/// tagging, decomposition — over one query against one catalog.
pub fn analyze_query(
    query: &str,
    catalog: &schema::SchemaCatalog,
) -> Result<QueryAnalysis, AnalyzeError> {
    let ast = sql::parse_query(query)?;
    let canonical = sql::print_query(&ast);
    let (far, conformance) = far::analyze_conformance(&ast, catalog)?;
    let dimensions = w5h::tag_query(&ast, catalog)?;
    let plan = decompose::decompose(&ast, catalog)?;
    Ok(QueryAnalysis { canonical, far, conformance, dimensions, plan })
}
