//! Dimensional tagging: WHO / WHAT / WHERE / WHEN / WHY / HOW.
//!
//! Every filter predicate is classified by the schema roles of the columns
//! it constrains, with three structural rules on top:
//!
//! * **Anchored WHEN** — a temporal column compared against a scalar
//!   subquery that pins another entity (an equality on a WHO-role or key
//!   column inside the subquery) is a WHEN whose reference point is an
//!   entity, not a constant. The tag records the anchor; whether it also
//!   counts as WHO engagement is a reporting option.
//! * **Join WHO** — key-to-key join predicates constrain entity identity.
//! * **Chain WHY** — traversing a foreign-key chain of configurable length
//!   (default 2, the shape of an association-table hop pair) marks the
//!   participating join predicates as WHY.
//!
//! At the query level, HOW splits into HOW-MANY (the query aggregates) and
//! mechanistic HOW (a predicate touches a column explicitly annotated with
//! the `how` role); both can hold at once.
//!
//! A separate, lexicon-driven tagger handles natural-language questions and
//! is never merged with SQL-derived tags.

use std::collections::HashSet;
use std::path::Path;

use serde::Serialize;
use thiserror::Error;

use crate::decompose::{detect_constraint_operators, ConstraintOperator};
use crate::schema::{Dimension, DimensionSet, ResolveError, SchemaCatalog, Scope};
use crate::sql::{
    atomize_predicates, enumerate_subqueries, AtomicPredicate, Atomization, CompareOp, Expr,
    PredicateSource, QueryAst,
};

/// Tagging knobs. Defaults mirror the documented behavior; both knobs exist
/// because the underlying choices are judgment calls, not ground truth.
#[derive(Debug, Clone)]
pub struct TaggerOptions {
    /// Count an anchored WHEN's query as also engaging WHO.
    pub anchored_counts_who: bool,
    /// Foreign-key hops required before join predicates count as WHY.
    pub why_chain_threshold: usize,
}

impl Default for TaggerOptions {
    fn default() -> Self {
        TaggerOptions { anchored_counts_who: false, why_chain_threshold: 2 }
    }
}

/// The entity a WHO-anchored WHEN is pinned to: the table whose key is held
/// fixed, and the id of the equality predicate that pins it.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct AnchorEntity {
    pub table: String,
    pub predicate_id: String,
}

/// Dimension tag for one filter predicate.
#[derive(Debug, Clone, Serialize)]
pub struct PredicateTag {
    pub predicate_id: String,
    pub text: String,
    pub dimensions: DimensionSet,
    pub who_anchored: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub anchor_entity: Option<AnchorEntity>,
}

/// How a query engages the HOW dimension, if at all.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum HowKind {
    None,
    HowMany,
    Mechanistic,
    Both,
}

impl HowKind {
    fn from_flags(how_many: bool, mechanistic: bool) -> HowKind {
        match (how_many, mechanistic) {
            (false, false) => HowKind::None,
            (true, false) => HowKind::HowMany,
            (false, true) => HowKind::Mechanistic,
            (true, true) => HowKind::Both,
        }
    }

    pub fn includes_how_many(self) -> bool {
        matches!(self, HowKind::HowMany | HowKind::Both)
    }

    pub fn includes_mechanistic(self) -> bool {
        matches!(self, HowKind::Mechanistic | HowKind::Both)
    }
}

/// Dimensional reading of one whole query.
#[derive(Debug, Clone, Serialize)]
pub struct QueryDimensions {
    /// Dimensions engaged by any predicate or rule.
    pub engaged: DimensionSet,
    pub how_kind: HowKind,
    pub has_aggregation: bool,
    pub predicate_tags: Vec<PredicateTag>,
    pub constraint_operators: Vec<ConstraintOperator>,
}

impl QueryDimensions {
    /// A query with no predicates engages nothing (unless aggregation adds
    /// HOW); such queries are counted separately, never guessed at.
    pub fn is_dimensionless(&self) -> bool {
        self.engaged.is_empty()
    }
}

/// Tag one predicate with default options. The predicate should come from
/// atomizing `ast`, so its id lines up with anchor references.
pub fn tag_predicate(
    predicate: &AtomicPredicate,
    ast: &QueryAst,
    catalog: &SchemaCatalog,
) -> Result<PredicateTag, ResolveError> {
    tag_predicate_with(predicate, ast, catalog, &TaggerOptions::default())
}

/// Tag one predicate with explicit options.
pub fn tag_predicate_with(
    predicate: &AtomicPredicate,
    ast: &QueryAst,
    catalog: &SchemaCatalog,
    options: &TaggerOptions,
) -> Result<PredicateTag, ResolveError> {
    let ctx = TagContext::new(ast, catalog, options)?;
    ctx.tag_atom(predicate)
}

/// Tag a whole query with default options.
pub fn tag_query(ast: &QueryAst, catalog: &SchemaCatalog) -> Result<QueryDimensions, ResolveError> {
    tag_query_with(ast, catalog, &TaggerOptions::default())
}

/// Tag a whole query with explicit options.
pub fn tag_query_with(
    ast: &QueryAst,
    catalog: &SchemaCatalog,
    options: &TaggerOptions,
) -> Result<QueryDimensions, ResolveError> {
    let ctx = TagContext::new(ast, catalog, options)?;

    let mut predicate_tags = Vec::new();
    for atom in ctx.atomization.root_atoms() {
        predicate_tags.push(ctx.tag_atom(atom)?);
    }

    let mut engaged = DimensionSet::new();
    for tag in &predicate_tags {
        engaged = engaged.union(tag.dimensions);
    }
    if options.anchored_counts_who && predicate_tags.iter().any(|t| t.who_anchored) {
        engaged.insert(Dimension::Who);
    }

    let has_aggregation = !ast.own_aggregates().is_empty();
    let mechanistic = ctx.references_how_role()?;
    let how_kind = HowKind::from_flags(has_aggregation, mechanistic);
    if how_kind != HowKind::None {
        engaged.insert(Dimension::How);
    }

    Ok(QueryDimensions {
        engaged,
        how_kind,
        has_aggregation,
        predicate_tags,
        constraint_operators: detect_constraint_operators(ast),
    })
}

/// Shared state for tagging one query's predicates.
struct TagContext<'a> {
    catalog: &'a SchemaCatalog,
    scope: Scope<'a>,
    atomization: Atomization,
    subqueries: Vec<&'a QueryAst>,
    /// Ids of join predicates that each traverse one foreign-key hop.
    fk_hop_ids: HashSet<String>,
    options: &'a TaggerOptions,
}

impl<'a> TagContext<'a> {
    fn new(
        ast: &'a QueryAst,
        catalog: &'a SchemaCatalog,
        options: &'a TaggerOptions,
    ) -> Result<TagContext<'a>, ResolveError> {
        let scope = Scope::build(catalog, ast)?;
        let atomization = atomize_predicates(ast);
        let subqueries = enumerate_subqueries(ast);
        let mut ctx = TagContext {
            catalog,
            scope,
            atomization,
            subqueries,
            fk_hop_ids: HashSet::new(),
            options,
        };
        ctx.fk_hop_ids = ctx.collect_fk_hops()?;
        Ok(ctx)
    }

    /// Join predicates (explicit ON or implicit cross-table WHERE equality)
    /// where one side is a foreign key into the other side's table.
    fn collect_fk_hops(&self) -> Result<HashSet<String>, ResolveError> {
        let mut hops = HashSet::new();
        for atom in self.atomization.root_atoms() {
            let Expr::Compare { op: CompareOp::Eq, left, right } = &atom.expr else { continue };
            let (Expr::Column(a), Expr::Column(b)) = (left.as_ref(), right.as_ref()) else {
                continue;
            };
            let ra = self.scope.resolve(a.qualifier.as_deref(), &a.name)?;
            let rb = self.scope.resolve(b.qualifier.as_deref(), &b.name)?;
            if ra.frame_depth != 0 || rb.frame_depth != 0 {
                continue;
            }
            let joins_tables =
                atom.source == PredicateSource::JoinOn || ra.table_index != rb.table_index;
            if !joins_tables {
                continue;
            }
            let a_into_b = ra
                .column
                .references
                .as_ref()
                .is_some_and(|t| t.table.eq_ignore_ascii_case(&rb.table));
            let b_into_a = rb
                .column
                .references
                .as_ref()
                .is_some_and(|t| t.table.eq_ignore_ascii_case(&ra.table));
            if a_into_b || b_into_a {
                hops.insert(atom.id.clone());
            }
        }
        Ok(hops)
    }

    fn tag_atom(&self, atom: &AtomicPredicate) -> Result<PredicateTag, ResolveError> {
        let mut dimensions = DimensionSet::new();
        for column in constrained_side(&atom.expr).columns() {
            let resolution = self.scope.resolve(column.qualifier.as_deref(), &column.name)?;
            dimensions = dimensions.union(resolution.column.roles);
        }

        // Key-to-key join scoping constrains entity identity.
        if self.is_join_key_equality(atom)? {
            dimensions.insert(Dimension::Who);
        }

        // A long-enough foreign-key chain is a causal/linkage traversal.
        if self.fk_hop_ids.len() >= self.options.why_chain_threshold
            && self.fk_hop_ids.contains(&atom.id)
        {
            dimensions.insert(Dimension::Why);
        }

        let (who_anchored, anchor_entity) = self.detect_anchor(atom)?;

        Ok(PredicateTag {
            predicate_id: atom.id.clone(),
            text: atom.text.clone(),
            dimensions,
            who_anchored,
            anchor_entity,
        })
    }

    fn is_join_key_equality(&self, atom: &AtomicPredicate) -> Result<bool, ResolveError> {
        let Expr::Compare { op: CompareOp::Eq, left, right } = &atom.expr else {
            return Ok(false);
        };
        let (Expr::Column(a), Expr::Column(b)) = (left.as_ref(), right.as_ref()) else {
            return Ok(false);
        };
        let ra = self.scope.resolve(a.qualifier.as_deref(), &a.name)?;
        let rb = self.scope.resolve(b.qualifier.as_deref(), &b.name)?;
        if ra.frame_depth != 0 || rb.frame_depth != 0 {
            return Ok(false);
        }
        let joins_tables =
            atom.source == PredicateSource::JoinOn || ra.table_index != rb.table_index;
        Ok(joins_tables && ra.column.is_key() && rb.column.is_key())
    }

    /// An anchored WHEN: `when_column <op> (scalar subquery)` where the
    /// subquery's own filter holds a WHO-role or key column equal to a value
    /// constant with respect to the subquery.
    fn detect_anchor(
        &self,
        atom: &AtomicPredicate,
    ) -> Result<(bool, Option<AnchorEntity>), ResolveError> {
        let Expr::Compare { left, right, .. } = &atom.expr else {
            return Ok((false, None));
        };
        let (column, sub) = match (left.as_ref(), right.as_ref()) {
            (Expr::Column(c), Expr::Subquery(s)) => (c, s),
            (Expr::Subquery(s), Expr::Column(c)) => (c, s),
            _ => return Ok((false, None)),
        };
        let resolution = self.scope.resolve(column.qualifier.as_deref(), &column.name)?;
        if !resolution.column.roles.contains(Dimension::When) {
            return Ok((false, None));
        }
        let Some(ord) = self.subqueries.iter().position(|s| *s == sub.as_ref()) else {
            return Ok((false, None));
        };
        let Ok(sub_scope) = Scope::build(self.catalog, sub) else {
            return Ok((false, None));
        };
        for inner in &self.atomization.atoms {
            if inner.subquery_ord != Some(ord) {
                continue;
            }
            if let Some(table) = pinned_entity_table(&inner.expr, &sub_scope) {
                return Ok((
                    true,
                    Some(AnchorEntity { table, predicate_id: inner.id.clone() }),
                ));
            }
        }
        Ok((false, None))
    }

    /// True when any root predicate references a column carrying the
    /// explicit `how` role (role inference never assigns HOW).
    fn references_how_role(&self) -> Result<bool, ResolveError> {
        for atom in self.atomization.root_atoms() {
            for column in atom.expr.columns() {
                let resolution = self.scope.resolve(column.qualifier.as_deref(), &column.name)?;
                if resolution.column.roles.contains(Dimension::How) {
                    return Ok(true);
                }
            }
        }
        Ok(false)
    }
}

/// The side a predicate constrains: the tested expression for predicate
/// forms, otherwise the comparison side that actually references columns
/// (so `720 > departure_time` still reads as a constraint on the column).
fn constrained_side(expr: &Expr) -> &Expr {
    match expr {
        Expr::Compare { left, right, .. } => {
            if left.columns().is_empty() && !right.columns().is_empty() {
                right
            } else {
                left
            }
        }
        Expr::Between { expr, .. }
        | Expr::InList { expr, .. }
        | Expr::InSubquery { expr, .. }
        | Expr::Like { expr, .. }
        | Expr::IsNull { expr, .. } => expr,
        Expr::Not(inner) => constrained_side(inner),
        other => other,
    }
}

/// If `expr` pins an entity — an equality holding a WHO-role or key column
/// of the subquery's own scope to a value constant for that subquery —
/// return the pinned column's table.
fn pinned_entity_table(expr: &Expr, sub_scope: &Scope<'_>) -> Option<String> {
    let Expr::Compare { op: CompareOp::Eq, left, right } = expr else {
        return None;
    };
    for (candidate, other) in [(left, right), (right, left)] {
        let Expr::Column(column) = candidate.as_ref() else { continue };
        let Ok(resolution) = sub_scope.resolve(column.qualifier.as_deref(), &column.name) else {
            continue;
        };
        if !resolution.column.roles.contains(Dimension::Who) && !resolution.column.is_key() {
            continue;
        }
        // The pinning value must not vary per subquery row.
        let constant = other
            .columns()
            .iter()
            .all(|c| sub_scope.resolve(c.qualifier.as_deref(), &c.name).is_err());
        if constant {
            return Some(resolution.table);
        }
    }
    None
}

/// One lexicon rule: a lowercased word-sequence trigger and the dimension it
/// signals, optionally marking quantitative HOW-MANY.
#[derive(Debug, Clone, Serialize)]
pub struct NlRule {
    pub pattern: String,
    pub dimension: Dimension,
    pub how_many: bool,
}

/// Errors loading a lexicon file.
#[derive(Debug, Error)]
pub enum LexiconError {
    #[error("cannot read lexicon: {0}")]
    Io(#[from] std::io::Error),
    #[error("lexicon line {line}: {message}")]
    Format { line: usize, message: String },
}

/// An ordered set of natural-language trigger patterns.
#[derive(Debug, Clone)]
pub struct NlLexicon {
    rules: Vec<NlRule>,
}

impl NlLexicon {
    /// Parse the line-oriented format: `pattern<TAB>dimension[<TAB>how_many]`,
    /// with `#` comments and blank lines ignored. Patterns must be unique.
    pub fn parse(text: &str) -> Result<NlLexicon, LexiconError> {
        let mut rules: Vec<NlRule> = Vec::new();
        for (index, raw) in text.lines().enumerate() {
            let line_no = index + 1;
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let fields: Vec<&str> = line.split('\t').collect();
            if fields.len() < 2 || fields.len() > 3 {
                return Err(LexiconError::Format {
                    line: line_no,
                    message: format!(
                        "expected `pattern<TAB>dimension[<TAB>how_many]`, got {} field(s)",
                        fields.len()
                    ),
                });
            }
            let pattern = normalize_words(fields[0]);
            if pattern.is_empty() {
                return Err(LexiconError::Format {
                    line: line_no,
                    message: "empty pattern".to_string(),
                });
            }
            let dimension = Dimension::parse(fields[1].trim()).ok_or_else(|| {
                LexiconError::Format {
                    line: line_no,
                    message: format!("unknown dimension `{}`", fields[1].trim()),
                }
            })?;
            let how_many = match fields.get(2).map(|f| f.trim()) {
                None | Some("") => false,
                Some("how_many") => true,
                Some(other) => {
                    return Err(LexiconError::Format {
                        line: line_no,
                        message: format!("unknown marker `{other}` (expected `how_many`)"),
                    })
                }
            };
            let key = pattern.join(" ");
            if rules.iter().any(|r| r.pattern == key) {
                return Err(LexiconError::Format {
                    line: line_no,
                    message: format!("duplicate pattern `{key}`"),
                });
            }
            rules.push(NlRule { pattern: key, dimension, how_many });
        }
        Ok(NlLexicon { rules })
    }

    /// Load a lexicon from a file.
    pub fn load(path: &Path) -> Result<NlLexicon, LexiconError> {
        let text = std::fs::read_to_string(path)?;
        NlLexicon::parse(&text)
    }

    /// The lexicon bundled with the library.
    pub fn bundled() -> NlLexicon {
        NlLexicon::parse(include_str!("default.lexicon"))
            .expect("bundled lexicon is well-formed")
    }

    pub fn rules(&self) -> &[NlRule] {
        &self.rules
    }
}

/// Dimensions signalled by a natural-language question.
#[derive(Debug, Clone, Serialize)]
pub struct NlTags {
    pub dimensions: DimensionSet,
    pub how_many: bool,
    /// Patterns that fired, in lexicon order.
    pub matched: Vec<String>,
}

/// Tag a natural-language question by whole-word pattern matching; the
/// result is the union over every rule that fires. Returns `None` for a
/// blank question — no text, no tags.
pub fn tag_nl(question: &str, lexicon: &NlLexicon) -> Option<NlTags> {
    let words = normalize_words(question);
    if words.is_empty() {
        return None;
    }
    let mut dimensions = DimensionSet::new();
    let mut how_many = false;
    let mut matched = Vec::new();
    for rule in &lexicon.rules {
        let pattern_words: Vec<&str> = rule.pattern.split(' ').collect();
        if contains_sequence(&words, &pattern_words) {
            dimensions.insert(rule.dimension);
            how_many |= rule.how_many;
            matched.push(rule.pattern.clone());
        }
    }
    Some(NlTags { dimensions, how_many, matched })
}

/// Lowercased alphanumeric words of a text, in order.
fn normalize_words(text: &str) -> Vec<String> {
    text.split(|c: char| !c.is_ascii_alphanumeric())
        .filter(|w| !w.is_empty())
        .map(|w| w.to_ascii_lowercase())
        .collect()
}

fn contains_sequence(words: &[String], pattern: &[&str]) -> bool {
    if pattern.is_empty() || pattern.len() > words.len() {
        return false;
    }
    words
        .windows(pattern.len())
        .any(|window| window.iter().zip(pattern).all(|(w, p)| w == p))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::schema::{parse_catalog, LoadOptions};
    use crate::sql::parse_query;

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

    fn ehr() -> SchemaCatalog {
        parse_catalog(
            r#"{
                "format": "quest-schema/1",
                "name": "ehr",
                "tables": {
                    "patients": [
                        {"name": "patient_id", "type": "integer", "primary_key": true},
                        {"name": "name", "type": "text", "roles": ["who"]},
                        {"name": "birth_date", "type": "date"}
                    ],
                    "admissions": [
                        {"name": "admission_id", "type": "integer", "primary_key": true},
                        {"name": "patient_id", "type": "integer", "references": "patients.patient_id"},
                        {"name": "admit_time", "type": "timestamp"},
                        {"name": "admission_route", "type": "text", "roles": ["how"]},
                        {"name": "readmission_reason", "type": "text", "roles": ["why"]}
                    ],
                    "labs": [
                        {"name": "lab_id", "type": "integer", "primary_key": true},
                        {"name": "admission_id", "type": "integer", "references": "admissions.admission_id"},
                        {"name": "test_name", "type": "text"},
                        {"name": "value", "type": "real"}
                    ]
                }
            }"#,
            LoadOptions::default(),
        )
        .unwrap()
    }

    fn tags_for(sql: &str, catalog: &SchemaCatalog) -> QueryDimensions {
        let ast = parse_query(sql).unwrap();
        tag_query(&ast, catalog).unwrap()
    }

    fn dims(names: &[Dimension]) -> DimensionSet {
        let mut set = DimensionSet::new();
        for d in names {
            set.insert(*d);
        }
        set
    }

    #[test]
    fn roles_drive_predicate_dimensions() {
        let catalog = flights();
        let result = tags_for(
            "SELECT * FROM flights WHERE origin_city = 'Boston' AND destination_city = 'New York' AND departure_time < 720",
            &catalog,
        );
        assert_eq!(result.engaged, dims(&[Dimension::Where, Dimension::When]));
        assert_eq!(result.how_kind, HowKind::None);
        assert!(!result.has_aggregation);
        assert_eq!(result.predicate_tags.len(), 3);
        assert_eq!(result.predicate_tags[0].dimensions, dims(&[Dimension::Where]));
        assert_eq!(result.predicate_tags[2].dimensions, dims(&[Dimension::When]));
    }

    #[test]
    fn reversed_comparison_still_tags_the_column_side() {
        let catalog = flights();
        let result = tags_for("SELECT * FROM flights WHERE 720 > departure_time", &catalog);
        assert_eq!(result.engaged, dims(&[Dimension::When]));
    }

    #[test]
    fn anchored_when_is_detected_with_entity_and_pin() {
        let catalog = flights();
        let result = tags_for(
            "SELECT * FROM flights WHERE origin_city = 'Boston' AND arrival_time < \
             (SELECT MAX(departure_time) FROM flights WHERE flight_id = 'AA100')",
            &catalog,
        );
        let anchored = &result.predicate_tags[1];
        assert!(anchored.who_anchored);
        assert_eq!(anchored.dimensions, dims(&[Dimension::When]));
        let anchor = anchored.anchor_entity.as_ref().unwrap();
        assert_eq!(anchor.table, "flights");
        assert_eq!(anchor.predicate_id, "p3");
        // Anchoring alone does not engage WHO...
        assert_eq!(result.engaged, dims(&[Dimension::Where, Dimension::When]));
        // ...unless the reporting option says it should.
        let ast = parse_query(
            "SELECT * FROM flights WHERE origin_city = 'Boston' AND arrival_time < \
             (SELECT MAX(departure_time) FROM flights WHERE flight_id = 'AA100')",
        )
        .unwrap();
        let opts = TaggerOptions { anchored_counts_who: true, ..TaggerOptions::default() };
        let counted = tag_query_with(&ast, &catalog, &opts).unwrap();
        assert!(counted.engaged.contains(Dimension::Who));
    }

    #[test]
    fn anchoring_requires_an_entity_pin_inside_the_subquery() {
        let catalog = flights();
        // destination_city is WHERE-role, not an entity key: no anchor.
        let result = tags_for(
            "SELECT * FROM flights WHERE arrival_time < \
             (SELECT MAX(departure_time) FROM flights WHERE destination_city = 'London')",
            &catalog,
        );
        assert!(!result.predicate_tags[0].who_anchored);
        assert!(result.predicate_tags[0].anchor_entity.is_none());
        // A non-temporal compared column is not an anchored WHEN either.
        let result = tags_for(
            "SELECT * FROM flights WHERE fare < \
             (SELECT MAX(fare) FROM flights WHERE flight_id = 'AA100')",
            &catalog,
        );
        assert!(!result.predicate_tags[0].who_anchored);
    }

    #[test]
    fn join_on_keys_contributes_who() {
        let catalog = ehr();
        let result = tags_for(
            "SELECT name FROM patients JOIN admissions ON patients.patient_id = admissions.patient_id \
             WHERE admissions.admit_time > 100",
            &catalog,
        );
        let join_tag = result
            .predicate_tags
            .iter()
            .find(|t| t.text.contains("patient_id"))
            .unwrap();
        assert!(join_tag.dimensions.contains(Dimension::Who));
    }

    #[test]
    fn fk_chain_of_two_hops_contributes_why() {
        let catalog = ehr();
        let result = tags_for(
            "SELECT value FROM labs JOIN admissions ON labs.admission_id = admissions.admission_id \
             JOIN patients ON admissions.patient_id = patients.patient_id WHERE patients.name = 'Ada'",
            &catalog,
        );
        assert!(result.engaged.contains(Dimension::Why));
        let why_tags: Vec<_> = result
            .predicate_tags
            .iter()
            .filter(|t| t.dimensions.contains(Dimension::Why))
            .collect();
        assert_eq!(why_tags.len(), 2);
        // A single hop stays below the default threshold.
        let single = tags_for(
            "SELECT admit_time FROM admissions JOIN patients ON admissions.patient_id = patients.patient_id \
             WHERE patients.name = 'Ada'",
            &catalog,
        );
        assert!(!single.engaged.contains(Dimension::Why));
    }

    #[test]
    fn explicit_why_role_contributes_why() {
        let catalog = ehr();
        let result = tags_for(
            "SELECT patient_id FROM admissions WHERE readmission_reason = 'surgical complications'",
            &catalog,
        );
        assert!(result.engaged.contains(Dimension::Why));
    }

    #[test]
    fn aggregation_is_how_many() {
        let catalog = flights();
        let result =
            tags_for("SELECT COUNT(*) FROM flights WHERE origin_city = 'Boston'", &catalog);
        assert_eq!(result.engaged, dims(&[Dimension::Where, Dimension::How]));
        assert_eq!(result.how_kind, HowKind::HowMany);
        assert!(result.has_aggregation);
        assert!(result.how_kind.includes_how_many());
        assert!(!result.how_kind.includes_mechanistic());
    }

    #[test]
    fn how_role_column_is_mechanistic_and_both_combines() {
        let catalog = ehr();
        let result = tags_for(
            "SELECT patient_id FROM admissions WHERE admission_route = 'ED'",
            &catalog,
        );
        assert_eq!(result.how_kind, HowKind::Mechanistic);
        assert!(result.engaged.contains(Dimension::How));
        let both = tags_for(
            "SELECT COUNT(*) FROM admissions WHERE admission_route = 'ED'",
            &catalog,
        );
        assert_eq!(both.how_kind, HowKind::Both);
    }

    #[test]
    fn subquery_aggregates_do_not_make_the_root_how_many() {
        let catalog = flights();
        let result = tags_for(
            "SELECT * FROM flights WHERE fare < (SELECT AVG(fare) FROM flights)",
            &catalog,
        );
        assert!(!result.has_aggregation);
        assert_eq!(result.how_kind, HowKind::None);
    }

    #[test]
    fn dimensionless_queries_are_flagged_not_guessed() {
        let catalog = flights();
        let result = tags_for("SELECT * FROM flights LIMIT 5", &catalog);
        assert!(result.is_dimensionless());
        assert!(result.predicate_tags.is_empty());
    }

    #[test]
    fn constraint_operators_ride_along() {
        let catalog = flights();
        let result = tags_for(
            "SELECT * FROM flights WHERE origin_city = 'Boston' ORDER BY fare ASC LIMIT 1",
            &catalog,
        );
        assert_eq!(result.constraint_operators.len(), 1);
        assert_eq!(result.constraint_operators[0].describe(), "ranking(asc, 1, fare)");
    }

    #[test]
    fn monotone_under_role_enrichment() {
        // Adding a role to a column only ever adds dimensions.
        let base = flights();
        let enriched = parse_catalog(
            r#"{
                "format": "quest-schema/1",
                "name": "flights",
                "tables": {
                    "flights": [
                        {"name": "flight_id", "type": "text", "roles": ["who"], "primary_key": true},
                        {"name": "airline", "type": "text", "roles": ["who"]},
                        {"name": "origin_city", "type": "text", "roles": ["where", "what"]},
                        {"name": "destination_city", "type": "text", "roles": ["where"]},
                        {"name": "departure_time", "type": "integer", "roles": ["when"]},
                        {"name": "arrival_time", "type": "integer", "roles": ["when"]},
                        {"name": "fare", "type": "real", "roles": ["what"]}
                    ]
                }
            }"#,
            LoadOptions::default(),
        )
        .unwrap();
        let sql = "SELECT * FROM flights WHERE origin_city = 'Boston'";
        let before = tags_for(sql, &base);
        let after = tags_for(sql, &enriched);
        for dim in before.engaged.iter() {
            assert!(after.engaged.contains(dim));
        }
        assert!(after.engaged.contains(Dimension::What));
    }

    #[test]
    fn lexicon_parses_and_rejects_bad_lines() {
        let lexicon = NlLexicon::parse("# comment\nhow many\thow\thow_many\nfrom\twhere\n").unwrap();
        assert_eq!(lexicon.rules().len(), 2);
        assert!(lexicon.rules()[0].how_many);
        assert!(matches!(
            NlLexicon::parse("pattern only\n"),
            Err(LexiconError::Format { line: 1, .. })
        ));
        assert!(matches!(
            NlLexicon::parse("x\tnotadim\n"),
            Err(LexiconError::Format { line: 1, .. })
        ));
        assert!(matches!(
            NlLexicon::parse("x\twho\tbogus\n"),
            Err(LexiconError::Format { line: 1, .. })
        ));
        assert!(matches!(
            NlLexicon::parse("x\twho\nx\twhat\n"),
            Err(LexiconError::Format { line: 2, .. })
        ));
    }

    #[test]
    fn bundled_lexicon_tags_the_reference_questions() {
        let lexicon = NlLexicon::bundled();
        let tags = tag_nl("patients readmitted due to surgical complications", &lexicon).unwrap();
        assert_eq!(tags.dimensions, dims(&[Dimension::Who, Dimension::Why]));
        assert!(!tags.how_many);

        let tags = tag_nl("how many flights from Boston", &lexicon).unwrap();
        assert_eq!(tags.dimensions, dims(&[Dimension::Where, Dimension::How]));
        assert!(tags.how_many);

        let tags = tag_nl("zzz", &lexicon).unwrap();
        assert!(tags.dimensions.is_empty());
        assert!(tags.matched.is_empty());

        assert!(tag_nl("", &lexicon).is_none());
        assert!(tag_nl("   ", &lexicon).is_none());
    }

    #[test]
    fn matching_is_whole_word_and_case_insensitive() {
        let lexicon = NlLexicon::parse("from\twhere\nhow many\thow\thow_many\n").unwrap();
        // "therefrom" must not match the word "from".
        let tags = tag_nl("therefrom came nothing", &lexicon).unwrap();
        assert!(tags.dimensions.is_empty());
        let tags = tag_nl("FROM Boston, HOW MANY?", &lexicon).unwrap();
        assert_eq!(tags.dimensions, dims(&[Dimension::Where, Dimension::How]));
        // Sequence must be contiguous: "how very many" does not fire.
        let tags = tag_nl("how very many", &lexicon).unwrap();
        assert!(!tags.dimensions.contains(Dimension::How));
    }

    #[test]
    fn reordering_lexicon_rules_does_not_change_tags() {
        let a = NlLexicon::parse("from\twhere\npatients\twho\n").unwrap();
        let b = NlLexicon::parse("patients\twho\nfrom\twhere\n").unwrap();
        let question = "patients from Boston";
        let ta = tag_nl(question, &a).unwrap();
        let tb = tag_nl(question, &b).unwrap();
        assert_eq!(ta.dimensions, tb.dimensions);
    }
}
