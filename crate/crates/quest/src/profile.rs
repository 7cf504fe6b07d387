//! Corpus ingestion, dimensional profiling, reference profiles, and
//! profile comparison.
//!
//! A corpus is a line-delimited file of records `{id?, question?, query,
//! db_id?}`. Each record runs through the full pipeline — parse, FAR
//! extraction, conformance, dimensional tagging — and lands in exactly one
//! bucket: parsed, unsupported (recognized but out-of-subset SQL),
//! unresolved (no catalog, or names that do not resolve), or failed
//! (malformed record or SQL that does not lex/parse). Proportions are
//! computed over parsed records only; the buckets themselves are always
//! reported, so denominators stay honest.
//!
//! Aggregation across records is a commutative merge of per-record tallies,
//! so profiles are independent of record order and safe to compute in
//! parallel.
//!
//! [`builtin_references`] returns the reference fingerprints for five
//! published query corpora. Only individually reported cells carry values;
//! everything else is explicitly unknown — never assumed zero. WHY is known
//! only as "under one percent" and is stored as an upper bound, not a point
//! value.

use std::collections::HashMap;
use std::path::Path;

use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::far::analyze_conformance;
use crate::schema::{Dimension, SchemaCatalog};
use crate::sql::{parse_query, SqlError};
use crate::w5h::{tag_nl, tag_query_with, NlLexicon, TaggerOptions};

/// One corpus record as read from disk.
#[derive(Debug, Clone, Serialize)]
pub struct CorpusRecord {
    pub id: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub question: Option<String>,
    pub query: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub db_id: Option<String>,
    /// 1-based line number in the source file.
    pub line: usize,
}

/// One line of an ingested corpus: a record, or a malformed line kept as a
/// failure so nothing is silently dropped.
#[derive(Debug, Clone)]
pub enum IngestItem {
    Record(CorpusRecord),
    Malformed { line: usize, message: String },
}

/// Read a corpus file. IO problems are errors; malformed lines are not —
/// they are yielded as [`IngestItem::Malformed`].
pub fn ingest(path: &Path) -> Result<Vec<IngestItem>, std::io::Error> {
    let text = std::fs::read_to_string(path)?;
    Ok(ingest_str(&text))
}

/// Parse corpus text, one record per non-blank line.
pub fn ingest_str(text: &str) -> Vec<IngestItem> {
    let mut items = Vec::new();
    for (index, raw) in text.lines().enumerate() {
        let line = index + 1;
        if raw.trim().is_empty() {
            continue;
        }
        items.push(parse_record(raw, line));
    }
    items
}

fn parse_record(raw: &str, line: usize) -> IngestItem {
    let value: serde_json::Value = match serde_json::from_str(raw) {
        Ok(v) => v,
        Err(e) => return IngestItem::Malformed { line, message: e.to_string() },
    };
    let Some(object) = value.as_object() else {
        return IngestItem::Malformed { line, message: "record is not an object".to_string() };
    };
    let query = match object.get("query").and_then(|v| v.as_str()) {
        Some(q) if !q.trim().is_empty() => q.to_string(),
        Some(_) => {
            return IngestItem::Malformed { line, message: "empty query".to_string() }
        }
        None => {
            return IngestItem::Malformed {
                line,
                message: "missing required field `query`".to_string(),
            }
        }
    };
    let id = object
        .get("id")
        .and_then(|v| v.as_str())
        .map(str::to_string)
        .unwrap_or_else(|| format!("line{line}"));
    let question = object.get("question").and_then(|v| v.as_str()).map(str::to_string);
    let db_id = object.get("db_id").and_then(|v| v.as_str()).map(str::to_string);
    IngestItem::Record(CorpusRecord { id, question, query, db_id, line })
}

/// Loaded catalogs addressable by name, with an optional default for
/// records that do not carry a `db_id`.
#[derive(Debug, Default, Clone)]
pub struct CatalogSet {
    by_name: HashMap<String, SchemaCatalog>,
    default_name: Option<String>,
}

impl CatalogSet {
    pub fn new() -> CatalogSet {
        CatalogSet::default()
    }

    /// Add a catalog, keyed by its declared name (case-insensitive). When
    /// the set holds exactly one catalog, it doubles as the default.
    pub fn insert(&mut self, catalog: SchemaCatalog) {
        let key = catalog.name.to_ascii_lowercase();
        self.by_name.insert(key.clone(), catalog);
        self.default_name = if self.by_name.len() == 1 { Some(key) } else { None };
    }

    pub fn len(&self) -> usize {
        self.by_name.len()
    }

    pub fn is_empty(&self) -> bool {
        self.by_name.is_empty()
    }

    /// The default catalog, present when exactly one catalog is loaded.
    pub fn default_catalog(&self) -> Option<&SchemaCatalog> {
        self.default_name.as_ref().and_then(|n| self.by_name.get(n))
    }

    /// Resolve a record's catalog: by `db_id` when given, the default
    /// otherwise.
    pub fn resolve(&self, db_id: Option<&str>) -> Option<&SchemaCatalog> {
        match db_id {
            Some(name) => self.by_name.get(&name.to_ascii_lowercase()),
            None => self.default_catalog(),
        }
    }
}

/// Profiling options: tagging knobs plus the optional NL lexicon (presence
/// turns the NL columns on).
#[derive(Debug, Clone, Default)]
pub struct ProfileOptions {
    pub tagger: TaggerOptions,
    pub nl_lexicon: Option<NlLexicon>,
}

/// Natural-language tally, kept strictly apart from SQL-derived counts.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct NlCounts {
    /// Records carrying a non-blank question (the NL denominator).
    pub n_questions: u64,
    pub dim_counts: [u64; 6],
    pub how_many_count: u64,
}

/// Dimensional profile of one corpus. Counts are exact; proportions are
/// derived views over `n_parsed`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CorpusProfile {
    pub name: String,
    pub n_total: u64,
    pub n_parsed: u64,
    pub n_unsupported: u64,
    pub n_unresolved: u64,
    pub n_failed: u64,
    /// Parsed queries engaging each dimension, in canonical order.
    pub dim_counts: [u64; 6],
    pub how_many_count: u64,
    pub mechanistic_count: u64,
    pub aggregation_count: u64,
    pub conformant_count: u64,
    pub dimensionless_count: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub nl: Option<NlCounts>,
}

impl CorpusProfile {
    fn ratio(numerator: u64, denominator: u64) -> f64 {
        if denominator == 0 {
            0.0
        } else {
            numerator as f64 / denominator as f64
        }
    }

    pub fn dim_proportion(&self, dim: Dimension) -> f64 {
        Self::ratio(self.dim_counts[dim.index()], self.n_parsed)
    }

    pub fn how_many_proportion(&self) -> f64 {
        Self::ratio(self.how_many_count, self.n_parsed)
    }

    pub fn mechanistic_how_proportion(&self) -> f64 {
        Self::ratio(self.mechanistic_count, self.n_parsed)
    }

    pub fn aggregation_density(&self) -> f64 {
        Self::ratio(self.aggregation_count, self.n_parsed)
    }

    pub fn conformance_rate(&self) -> f64 {
        Self::ratio(self.conformant_count, self.n_parsed)
    }

    pub fn dimensionless_fraction(&self) -> f64 {
        Self::ratio(self.dimensionless_count, self.n_parsed)
    }

    /// NL proportion of a dimension over question-bearing records.
    pub fn nl_dim_proportion(&self, dim: Dimension) -> Option<f64> {
        self.nl.map(|nl| Self::ratio(nl.dim_counts[dim.index()], nl.n_questions))
    }

    /// This profile as a renderable row of percentage cells.
    pub fn row(&self) -> ProfileRow {
        let mut cells = [ProfileCell::Unknown; 6];
        for dim in Dimension::ALL {
            cells[dim.index()] = ProfileCell::known(self.dim_proportion(dim) * 100.0);
        }
        ProfileRow {
            dataset: self.name.clone(),
            cells,
            aggregation: ProfileCell::known(self.aggregation_density() * 100.0),
        }
    }
}

#[derive(Debug, Error)]
pub enum ProfileError {
    #[error("empty corpus: no records to profile")]
    EmptyCorpus,
}

/// Profile a corpus. Records are analyzed independently and merged with a
/// commutative tally, so the result does not depend on record order.
pub fn profile_corpus(
    name: &str,
    items: &[IngestItem],
    catalogs: &CatalogSet,
    options: &ProfileOptions,
) -> Result<CorpusProfile, ProfileError> {
    if items.is_empty() {
        return Err(ProfileError::EmptyCorpus);
    }
    let tally = items
        .par_iter()
        .map(|item| tally_item(item, catalogs, options))
        .reduce(Tally::default, Tally::merge);

    Ok(CorpusProfile {
        name: name.to_string(),
        n_total: tally.total,
        n_parsed: tally.parsed,
        n_unsupported: tally.unsupported,
        n_unresolved: tally.unresolved,
        n_failed: tally.failed,
        dim_counts: tally.dim_counts,
        how_many_count: tally.how_many,
        mechanistic_count: tally.mechanistic,
        aggregation_count: tally.aggregation,
        conformant_count: tally.conformant,
        dimensionless_count: tally.dimensionless,
        nl: options.nl_lexicon.as_ref().map(|_| NlCounts {
            n_questions: tally.nl_questions,
            dim_counts: tally.nl_dim_counts,
            how_many_count: tally.nl_how_many,
        }),
    })
}

#[derive(Debug, Default, Clone, Copy)]
struct Tally {
    total: u64,
    parsed: u64,
    unsupported: u64,
    unresolved: u64,
    failed: u64,
    dim_counts: [u64; 6],
    how_many: u64,
    mechanistic: u64,
    aggregation: u64,
    conformant: u64,
    dimensionless: u64,
    nl_questions: u64,
    nl_dim_counts: [u64; 6],
    nl_how_many: u64,
}

impl Tally {
    fn merge(mut self, other: Tally) -> Tally {
        self.total += other.total;
        self.parsed += other.parsed;
        self.unsupported += other.unsupported;
        self.unresolved += other.unresolved;
        self.failed += other.failed;
        for i in 0..6 {
            self.dim_counts[i] += other.dim_counts[i];
            self.nl_dim_counts[i] += other.nl_dim_counts[i];
        }
        self.how_many += other.how_many;
        self.mechanistic += other.mechanistic;
        self.aggregation += other.aggregation;
        self.conformant += other.conformant;
        self.dimensionless += other.dimensionless;
        self.nl_questions += other.nl_questions;
        self.nl_how_many += other.nl_how_many;
        self
    }
}

fn tally_item(item: &IngestItem, catalogs: &CatalogSet, options: &ProfileOptions) -> Tally {
    let mut tally = Tally { total: 1, ..Tally::default() };
    let record = match item {
        IngestItem::Record(r) => r,
        IngestItem::Malformed { .. } => {
            tally.failed = 1;
            return tally;
        }
    };

    // The NL side is independent of whether the SQL analyzes.
    if let (Some(lexicon), Some(question)) = (&options.nl_lexicon, &record.question) {
        if let Some(tags) = tag_nl(question, lexicon) {
            tally.nl_questions = 1;
            for dim in tags.dimensions.iter() {
                tally.nl_dim_counts[dim.index()] = 1;
            }
            if tags.how_many {
                tally.nl_how_many = 1;
            }
        }
    }

    let Some(catalog) = catalogs.resolve(record.db_id.as_deref()) else {
        tally.unresolved = 1;
        return tally;
    };
    let ast = match parse_query(&record.query) {
        Ok(ast) => ast,
        Err(SqlError::Unsupported { .. }) => {
            tally.unsupported = 1;
            return tally;
        }
        Err(_) => {
            tally.failed = 1;
            return tally;
        }
    };
    let Ok((_, conformance)) = analyze_conformance(&ast, catalog) else {
        tally.unresolved = 1;
        return tally;
    };
    let Ok(dimensions) = tag_query_with(&ast, catalog, &options.tagger) else {
        tally.unresolved = 1;
        return tally;
    };

    tally.parsed = 1;
    for dim in dimensions.engaged.iter() {
        tally.dim_counts[dim.index()] = 1;
    }
    if dimensions.how_kind.includes_how_many() {
        tally.how_many = 1;
    }
    if dimensions.how_kind.includes_mechanistic() {
        tally.mechanistic = 1;
    }
    if dimensions.has_aggregation {
        tally.aggregation = 1;
    }
    if conformance.conformant {
        tally.conformant = 1;
    }
    if dimensions.is_dimensionless() {
        tally.dimensionless = 1;
    }
    tally
}

/// One table cell: a reported value, an upper bound ("under x"), or
/// explicitly unknown.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ProfileCell {
    Known { value: f64 },
    UpperBound { value: f64 },
    Unknown,
}

impl ProfileCell {
    pub const fn known(value: f64) -> ProfileCell {
        ProfileCell::Known { value }
    }

    pub fn point_value(&self) -> Option<f64> {
        match self {
            ProfileCell::Known { value } => Some(*value),
            _ => None,
        }
    }
}

/// A dataset row of percentage cells, the common shape rendered by every
/// report format.
#[derive(Debug, Clone, Serialize)]
pub struct ProfileRow {
    pub dataset: String,
    /// WHO, WHAT, WHERE, WHEN, WHY, HOW.
    pub cells: [ProfileCell; 6],
    pub aggregation: ProfileCell,
}

/// A reference fingerprint for a published corpus: the individually
/// reported percentage cells, everything else unknown.
#[derive(Debug, Clone, Serialize)]
pub struct ReferenceProfile {
    pub dataset: String,
    /// WHO, WHAT, WHERE, WHEN, WHY, HOW.
    pub cells: [ProfileCell; 6],
    pub aggregation: ProfileCell,
    pub note: String,
}

impl ReferenceProfile {
    pub fn row(&self) -> ProfileRow {
        ProfileRow {
            dataset: self.dataset.clone(),
            cells: self.cells,
            aggregation: self.aggregation,
        }
    }
}

/// The built-in reference fingerprints. Values are compile-time constants;
/// WHY is an upper bound (under 1%) for every dataset, and absent cells are
/// unknown rather than zero.
pub fn builtin_references() -> Vec<ReferenceProfile> {
    use ProfileCell::Unknown;
    let known = ProfileCell::known;
    let under = |value| ProfileCell::UpperBound { value };
    vec![
        ReferenceProfile {
            dataset: "EHRSQL".to_string(),
            // WHO, WHAT, WHERE, WHEN, WHY, HOW
            cells: [known(73.0), Unknown, Unknown, known(80.4), under(1.0), Unknown],
            aggregation: known(38.3),
            note: "Clinical questions over hospital records (24,405 queries); \
                   entity- and time-anchored filtering dominates."
                .to_string(),
        },
        ReferenceProfile {
            dataset: "WikiSQL".to_string(),
            cells: [known(9.8), Unknown, Unknown, known(31.3), under(1.0), Unknown],
            aggregation: known(23.4),
            note: "Single-table questions over web tables (80,654 queries)."
                .to_string(),
        },
        ReferenceProfile {
            dataset: "ATIS".to_string(),
            cells: [known(0.2), Unknown, Unknown, known(20.4), under(1.0), Unknown],
            aggregation: known(4.1),
            note: "Flight-booking questions (5,871 queries); almost entirely \
                   place-driven lookups."
                .to_string(),
        },
        ReferenceProfile {
            dataset: "Spider".to_string(),
            cells: [known(16.0), Unknown, Unknown, known(16.3), under(1.0), known(32.9)],
            aggregation: Unknown,
            note: "Cross-domain multi-table questions (8,034 queries)."
                .to_string(),
        },
        ReferenceProfile {
            dataset: "BIRD".to_string(),
            cells: [Unknown, Unknown, Unknown, known(20.8), under(1.0), known(44.0)],
            aggregation: known(43.4),
            note: "Large-database questions (1,500 queries); the HOW share \
                   predominantly reflects quantitative HOW-MANY counting, \
                   not mechanistic reasoning."
                .to_string(),
        },
    ]
}

/// Look up a built-in reference by dataset name, case-insensitively.
pub fn builtin_reference(name: &str) -> Option<ReferenceProfile> {
    builtin_references().into_iter().find(|r| r.dataset.eq_ignore_ascii_case(name))
}

/// One compared cell of a delta.
#[derive(Debug, Clone, Serialize)]
pub struct DeltaCell {
    /// Lowercase dimension name, or `agg` for aggregation density.
    pub metric: String,
    /// a − b, when both sides are point values.
    pub diff: Option<f64>,
    /// a ÷ b, when both sides are point values and b ≠ 0.
    pub ratio: Option<f64>,
}

/// Comparison of two profiles. The mismatch score is the mean absolute
/// difference over the dimensions known on both sides (aggregation density
/// is reported as a cell but kept out of the score).
#[derive(Debug, Clone, Serialize)]
pub struct ProfileDelta {
    pub a: String,
    pub b: String,
    pub cells: Vec<DeltaCell>,
    pub mismatch: f64,
}

#[derive(Debug, Error)]
pub enum CompareError {
    #[error("profiles `{0}` and `{1}` share no known dimension")]
    NoOverlap(String, String),
}

/// Compare two profile rows cell by cell.
pub fn compare_profiles(a: &ProfileRow, b: &ProfileRow) -> Result<ProfileDelta, CompareError> {
    let mut cells = Vec::new();
    let mut known_diffs = Vec::new();
    for dim in Dimension::ALL {
        let cell = delta_cell(dim.name().to_string(), a.cells[dim.index()], b.cells[dim.index()]);
        if let Some(diff) = cell.diff {
            known_diffs.push(diff.abs());
        }
        cells.push(cell);
    }
    if known_diffs.is_empty() {
        return Err(CompareError::NoOverlap(a.dataset.clone(), b.dataset.clone()));
    }
    let mismatch = known_diffs.iter().sum::<f64>() / known_diffs.len() as f64;
    cells.push(delta_cell("agg".to_string(), a.aggregation, b.aggregation));
    Ok(ProfileDelta { a: a.dataset.clone(), b: b.dataset.clone(), cells, mismatch })
}

fn delta_cell(metric: String, a: ProfileCell, b: ProfileCell) -> DeltaCell {
    let (Some(av), Some(bv)) = (a.point_value(), b.point_value()) else {
        return DeltaCell { metric, diff: None, ratio: None };
    };
    let ratio = if bv != 0.0 { Some(av / bv) } else { None };
    DeltaCell { metric, diff: Some(av - bv), ratio }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::schema::{parse_catalog, LoadOptions};

    fn flights() -> SchemaCatalog {
        parse_catalog(
            r#"{
                "format": "quest-schema/1",
                "name": "flights",
                "tables": {
                    "flights": [
                        {"name": "flight_id", "type": "text", "roles": ["who"], "primary_key": true},
                        {"name": "airline", "type": "text", "roles": ["who"]},
                        {"name": "origin_city", "type": "text", "roles": ["where"]},
                        {"name": "destination_city", "type": "text", "roles": ["where"]},
                        {"name": "departure_time", "type": "integer", "roles": ["when"]},
                        {"name": "arrival_time", "type": "integer", "roles": ["when"]},
                        {"name": "fare", "type": "real", "roles": ["what"]}
                    ]
                }
            }"#,
            LoadOptions::default(),
        )
        .unwrap()
    }

    fn catalog_set() -> CatalogSet {
        let mut set = CatalogSet::new();
        set.insert(flights());
        set
    }

    #[test]
    fn ingest_keeps_malformed_lines_as_failures() {
        let items = ingest_str(
            "{\"id\": \"q1\", \"query\": \"SELECT * FROM flights WHERE fare > 0\"}\n\
             not json\n\
             {\"id\": \"q3\", \"query\": \"\"}\n\
             {\"id\": \"q4\"}\n\
             {\"query\": \"SELECT COUNT(*) FROM flights\"}\n",
        );
        assert_eq!(items.len(), 5);
        assert!(matches!(items[0], IngestItem::Record(_)));
        assert!(matches!(items[1], IngestItem::Malformed { line: 2, .. }));
        assert!(matches!(items[2], IngestItem::Malformed { line: 3, .. }));
        assert!(matches!(items[3], IngestItem::Malformed { line: 4, .. }));
        let IngestItem::Record(r) = &items[4] else { panic!() };
        assert_eq!(r.id, "line5");
    }

    #[test]
    fn buckets_conserve_totals() {
        let items = ingest_str(
            "{\"query\": \"SELECT * FROM flights WHERE fare > 0\"}\n\
             {\"query\": \"SELECT * FROM flights UNION SELECT * FROM flights\"}\n\
             {\"query\": \"SELECT * FROM nowhere WHERE x = 1\"}\n\
             {\"query\": \"SELECT FROM WHERE\"}\n\
             {\"query\": \"SELECT * FROM flights\", \"db_id\": \"unknown_db\"}\n\
             garbage\n",
        );
        let profile =
            profile_corpus("t", &items, &catalog_set(), &ProfileOptions::default()).unwrap();
        assert_eq!(profile.n_total, 6);
        assert_eq!(profile.n_parsed, 1);
        assert_eq!(profile.n_unsupported, 1);
        assert_eq!(profile.n_unresolved, 2);
        assert_eq!(profile.n_failed, 2);
        assert_eq!(
            profile.n_total,
            profile.n_parsed + profile.n_unsupported + profile.n_unresolved + profile.n_failed
        );
    }

    #[test]
    fn empty_corpus_is_an_error() {
        let items = ingest_str("\n\n");
        assert!(matches!(
            profile_corpus("t", &items, &catalog_set(), &ProfileOptions::default()),
            Err(ProfileError::EmptyCorpus)
        ));
    }

    #[test]
    fn single_count_query_profile_matches_forced_values() {
        let items = ingest_str(
            "{\"query\": \"SELECT COUNT(*) FROM flights WHERE origin_city = 'Boston'\"}\n",
        );
        let profile =
            profile_corpus("t", &items, &catalog_set(), &ProfileOptions::default()).unwrap();
        assert_eq!(profile.aggregation_density(), 1.0);
        assert_eq!(profile.dim_proportion(Dimension::How), 1.0);
        assert_eq!(profile.how_many_proportion(), 1.0);
        assert_eq!(profile.mechanistic_how_proportion(), 0.0);
        assert_eq!(profile.conformance_rate(), 1.0);
        assert_eq!(profile.dimensionless_fraction(), 0.0);
    }

    #[test]
    fn profiles_are_order_independent() {
        let forward = ingest_str(
            "{\"query\": \"SELECT COUNT(*) FROM flights WHERE origin_city = 'Boston'\"}\n\
             {\"query\": \"SELECT * FROM flights WHERE departure_time < 720\"}\n\
             {\"query\": \"SELECT * FROM flights\"}\n",
        );
        let mut backward = forward.clone();
        backward.reverse();
        let options = ProfileOptions::default();
        let a = profile_corpus("t", &forward, &catalog_set(), &options).unwrap();
        let b = profile_corpus("t", &backward, &catalog_set(), &options).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn nl_counts_stay_separate_from_sql_counts() {
        let items = ingest_str(
            "{\"question\": \"how many flights from Boston\", \"query\": \"SELECT COUNT(*) FROM flights WHERE origin_city = 'Boston'\"}\n\
             {\"question\": \"patients readmitted due to surgical complications\", \"query\": \"SELECT * FROM flights WHERE fare > 100\"}\n",
        );
        let options = ProfileOptions {
            tagger: TaggerOptions::default(),
            nl_lexicon: Some(NlLexicon::bundled()),
        };
        let profile = profile_corpus("t", &items, &catalog_set(), &options).unwrap();
        let nl = profile.nl.unwrap();
        assert_eq!(nl.n_questions, 2);
        assert_eq!(nl.dim_counts[Dimension::Who.index()], 1);
        assert_eq!(nl.dim_counts[Dimension::Where.index()], 1);
        assert_eq!(nl.dim_counts[Dimension::Why.index()], 1);
        assert_eq!(nl.how_many_count, 1);
        // SQL side unaffected: WHY never fires on these queries.
        assert_eq!(profile.dim_counts[Dimension::Why.index()], 0);
    }

    #[test]
    fn builtin_references_match_the_published_cells() {
        let refs = builtin_references();
        assert_eq!(refs.len(), 5);
        let get = |name: &str| builtin_reference(name).unwrap();
        let ehrsql = get("EHRSQL");
        assert_eq!(ehrsql.cells[Dimension::Who.index()], ProfileCell::known(73.0));
        assert_eq!(ehrsql.cells[Dimension::When.index()], ProfileCell::known(80.4));
        assert_eq!(ehrsql.aggregation, ProfileCell::known(38.3));
        assert_eq!(ehrsql.cells[Dimension::What.index()], ProfileCell::Unknown);
        let wikisql = get("wikisql");
        assert_eq!(wikisql.cells[Dimension::Who.index()], ProfileCell::known(9.8));
        assert_eq!(wikisql.cells[Dimension::When.index()], ProfileCell::known(31.3));
        assert_eq!(wikisql.aggregation, ProfileCell::known(23.4));
        let atis = get("ATIS");
        assert_eq!(atis.cells[Dimension::Who.index()], ProfileCell::known(0.2));
        assert_eq!(atis.cells[Dimension::When.index()], ProfileCell::known(20.4));
        assert_eq!(atis.aggregation, ProfileCell::known(4.1));
        let spider = get("Spider");
        assert_eq!(spider.cells[Dimension::Who.index()], ProfileCell::known(16.0));
        assert_eq!(spider.cells[Dimension::When.index()], ProfileCell::known(16.3));
        assert_eq!(spider.cells[Dimension::How.index()], ProfileCell::known(32.9));
        assert_eq!(spider.aggregation, ProfileCell::Unknown);
        let bird = get("BIRD");
        assert_eq!(bird.cells[Dimension::When.index()], ProfileCell::known(20.8));
        assert_eq!(bird.cells[Dimension::How.index()], ProfileCell::known(44.0));
        assert_eq!(bird.aggregation, ProfileCell::known(43.4));
        assert_eq!(bird.cells[Dimension::Who.index()], ProfileCell::Unknown);
        for r in &refs {
            assert_eq!(
                r.cells[Dimension::Why.index()],
                ProfileCell::UpperBound { value: 1.0 },
                "{}",
                r.dataset
            );
        }
    }

    #[test]
    fn comparison_reports_diffs_ratios_and_mismatch() {
        let ehrsql = builtin_reference("EHRSQL").unwrap().row();
        let wikisql = builtin_reference("WikiSQL").unwrap().row();
        let delta = compare_profiles(&ehrsql, &wikisql).unwrap();
        let when = delta.cells.iter().find(|c| c.metric == "when").unwrap();
        let ratio = when.ratio.unwrap();
        assert!((2.5..=2.6).contains(&ratio), "{ratio}");
        assert!((when.diff.unwrap() - 49.1).abs() < 1e-9);
        // WHY is an upper bound on both sides: no diff, no ratio.
        let why = delta.cells.iter().find(|c| c.metric == "why").unwrap();
        assert!(why.diff.is_none() && why.ratio.is_none());
        // Identity comparison.
        let same = compare_profiles(&ehrsql, &ehrsql).unwrap();
        assert_eq!(same.mismatch, 0.0);
        for cell in same.cells.iter().filter(|c| c.diff.is_some()) {
            assert_eq!(cell.diff.unwrap(), 0.0);
        }
    }

    #[test]
    fn comparison_without_overlap_is_an_error() {
        let a = ProfileRow {
            dataset: "a".to_string(),
            cells: [ProfileCell::Unknown; 6],
            aggregation: ProfileCell::known(1.0),
        };
        let b = builtin_reference("BIRD").unwrap().row();
        assert!(matches!(compare_profiles(&a, &b), Err(CompareError::NoOverlap(..))));
    }
}
