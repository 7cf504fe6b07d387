//! FAR extraction and conformance checking.
//!
//! Every supported query is read as three cooperating parts:
//!
//! * **Filter** — the scoping constraints: WHERE / JOIN ON / HAVING atoms
//!   plus row limits. HAVING atoms are filters applied post-aggregation,
//!   not part of the aggregation itself. WHERE equalities between key
//!   columns of different tables are join scoping written in implicit-join
//!   style and are reclassified as such.
//! * **Aggregate** — aggregate calls from projection, HAVING, and ORDER BY
//!   plus the grouping keys. A query with neither is an identity aggregate
//!   (plain enumeration).
//! * **Return** — the ordered output expressions (star expanded against the
//!   catalog), result ordering, and limit.
//!
//! [`check_conformance`] judges each part and reports machine-readable
//! reason codes for the degenerate shapes: unscoped scans, non-numeric
//! arithmetic aggregation, unknown functions, unresolvable output or order
//! columns, and HAVING with no aggregation context.

use serde::Serialize;
use thiserror::Error;

use crate::schema::{ColumnTarget, ResolveError, SchemaCatalog, Scope};
use crate::sql::{
    atomize_with_outer, print_expr, AggArg, AggregateFunc, Expr, Literal, PredicateSource,
    QueryAst, SelectItem,
};

/// Errors raised during extraction. Column references in filter predicates,
/// grouping keys, and aggregate arguments must resolve; unresolvable output
/// and order-key columns are tolerated here and reported as conformance
/// verdicts instead.
#[derive(Debug, Error)]
pub enum FarError {
    #[error(transparent)]
    Resolve(#[from] ResolveError),
}

/// Classification of one filter atom.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum FilterClass {
    Where,
    JoinOn,
    Having,
    /// A WHERE equality between key columns of different tables, treated as
    /// join scoping.
    ImplicitJoin,
}

/// One predicate participating in the Filter step.
#[derive(Debug, Clone, Serialize)]
pub struct FilterAtom {
    pub id: String,
    pub text: String,
    pub class: FilterClass,
    /// True for HAVING atoms: the filter applies after aggregation.
    pub post_aggregation: bool,
    pub correlated: bool,
}

/// The Filter step: scoping predicates and flags.
#[derive(Debug, Clone, Serialize)]
pub struct FilterSpec {
    pub predicates: Vec<FilterAtom>,
    pub has_where_scoping: bool,
    pub has_join_scoping: bool,
    pub has_having_scoping: bool,
    pub has_row_limit: bool,
    /// LIMIT without ORDER BY: still scoping, but the selected rows are
    /// not deterministic.
    pub nondeterministic_scope: bool,
}

/// One aggregate call in the Aggregate step.
#[derive(Debug, Clone, Serialize)]
pub struct AggregateCallSpec {
    /// Lowercased function name (unknown names preserved verbatim).
    pub function: String,
    /// Canonical argument text; `*` for COUNT(*).
    pub argument: String,
    pub distinct: bool,
    /// Resolved columns referenced by the argument.
    #[serde(skip)]
    pub argument_columns: Vec<ColumnTarget>,
    /// Column names in the argument that did not resolve.
    #[serde(skip)]
    pub argument_unresolved: Vec<String>,
    /// True when the argument contains a non-numeric literal.
    #[serde(skip)]
    pub argument_has_text_literal: bool,
    #[serde(skip)]
    pub func: AggregateFunc,
}

/// The Aggregate step: calls plus grouping keys.
#[derive(Debug, Clone, Serialize)]
pub struct AggregateSpec {
    pub calls: Vec<AggregateCallSpec>,
    /// Resolved grouping keys as `table.column`.
    pub group_keys: Vec<String>,
    /// True when there are no calls and no grouping: plain enumeration.
    pub identity: bool,
}

/// One output expression of the Return step.
#[derive(Debug, Clone, Serialize)]
pub struct OutputColumn {
    pub text: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub alias: Option<String>,
    /// Column references that did not resolve against the catalog.
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub unresolved: Vec<String>,
}

/// One ORDER BY key of the Return step.
#[derive(Debug, Clone, Serialize)]
pub struct OrderSpec {
    pub key: String,
    pub direction: String,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub unresolved: Vec<String>,
}

/// The Return step: output shape, ordering, and limit.
#[derive(Debug, Clone, Serialize)]
pub struct ReturnSpec {
    pub columns: Vec<OutputColumn>,
    pub ordering: Vec<OrderSpec>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub limit: Option<u64>,
}

/// The complete Filter → Aggregate → Return reading of one query.
#[derive(Debug, Clone, Serialize)]
pub struct FarStructure {
    pub filter: FilterSpec,
    pub aggregate: AggregateSpec,
    #[serde(rename = "return")]
    pub return_spec: ReturnSpec,
}

/// Reason codes for conformance failures.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub enum ReasonCode {
    #[serde(rename = "F_NO_SCOPING")]
    FNoScoping,
    #[serde(rename = "A_NON_NUMERIC_AGG")]
    ANonNumericAgg,
    #[serde(rename = "A_UNKNOWN_FUNCTION")]
    AUnknownFunction,
    #[serde(rename = "R_UNKNOWN_COLUMN")]
    RUnknownColumn,
    #[serde(rename = "R_UNRESOLVABLE_ORDER_KEY")]
    RUnresolvableOrderKey,
    #[serde(rename = "R_HAVING_WITHOUT_AGG_CONTEXT")]
    RHavingWithoutAggContext,
}

impl ReasonCode {
    pub fn as_str(self) -> &'static str {
        match self {
            ReasonCode::FNoScoping => "F_NO_SCOPING",
            ReasonCode::ANonNumericAgg => "A_NON_NUMERIC_AGG",
            ReasonCode::AUnknownFunction => "A_UNKNOWN_FUNCTION",
            ReasonCode::RUnknownColumn => "R_UNKNOWN_COLUMN",
            ReasonCode::RUnresolvableOrderKey => "R_UNRESOLVABLE_ORDER_KEY",
            ReasonCode::RHavingWithoutAggContext => "R_HAVING_WITHOUT_AGG_CONTEXT",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Pass,
    Fail,
}

/// Verdict for one FAR step. A fail always carries at least one reason.
#[derive(Debug, Clone, Serialize)]
pub struct StepVerdict {
    pub verdict: Verdict,
    pub reasons: Vec<ReasonCode>,
}

impl StepVerdict {
    fn from_reasons(mut reasons: Vec<ReasonCode>) -> StepVerdict {
        reasons.sort();
        reasons.dedup();
        let verdict = if reasons.is_empty() { Verdict::Pass } else { Verdict::Fail };
        StepVerdict { verdict, reasons }
    }

    pub fn passed(&self) -> bool {
        self.verdict == Verdict::Pass
    }
}

/// Conformance report for one query: three step verdicts and the overall
/// flag, which is true exactly when all three steps pass.
#[derive(Debug, Clone, Serialize)]
pub struct ConformanceReport {
    pub filter: StepVerdict,
    pub aggregate: StepVerdict,
    #[serde(rename = "return")]
    pub return_spec: StepVerdict,
    pub conformant: bool,
}

impl ConformanceReport {
    /// All reason codes across the three steps, in code order.
    pub fn reasons(&self) -> Vec<ReasonCode> {
        let mut out = Vec::new();
        out.extend(&self.filter.reasons);
        out.extend(&self.aggregate.reasons);
        out.extend(&self.return_spec.reasons);
        out.sort();
        out
    }
}

/// Extract the FAR structure of a query against a catalog.
pub fn extract_far(ast: &QueryAst, catalog: &SchemaCatalog) -> Result<FarStructure, FarError> {
    let scope = Scope::build(catalog, ast)?;
    extract_far_scoped(ast, &scope)
}

/// Extract with an explicit scope, which may include enclosing query frames
/// (used when analyzing decomposition steps of correlated subqueries). The
/// innermost frame must be `ast`'s own.
pub fn extract_far_scoped(ast: &QueryAst, scope: &Scope<'_>) -> Result<FarStructure, FarError> {
    let catalog = scope.catalog();
    let outer_names = outer_frame_names(ast, scope);
    let atomization = atomize_with_outer(ast, &outer_names);

    // Filter: the query's own atoms only; subquery internals belong to the
    // subqueries' own steps.
    let mut predicates = Vec::new();
    for atom in atomization.root_atoms() {
        let class = match atom.source {
            PredicateSource::Where => {
                if is_key_equality(&atom.expr, scope)? {
                    FilterClass::ImplicitJoin
                } else {
                    FilterClass::Where
                }
            }
            PredicateSource::JoinOn => FilterClass::JoinOn,
            PredicateSource::Having => FilterClass::Having,
            PredicateSource::SubqueryInternal => unreachable!("root atoms only"),
        };
        // Resolve every non-subquery column so unknown names in scoping
        // predicates fail loudly instead of skewing analysis.
        for column in atom.expr.columns() {
            scope.resolve(column.qualifier.as_deref(), &column.name)?;
        }
        predicates.push(FilterAtom {
            id: atom.id.clone(),
            text: atom.text.clone(),
            class,
            post_aggregation: atom.source == PredicateSource::Having,
            correlated: atom.correlated,
        });
    }

    let has_where_scoping = predicates.iter().any(|p| p.class == FilterClass::Where);
    let has_join_scoping = predicates
        .iter()
        .any(|p| matches!(p.class, FilterClass::JoinOn | FilterClass::ImplicitJoin));
    let has_having_scoping = predicates.iter().any(|p| p.class == FilterClass::Having);
    let has_row_limit = ast.limit.is_some();
    let nondeterministic_scope = ast.limit.is_some() && ast.order_by.is_empty();

    let filter = FilterSpec {
        predicates,
        has_where_scoping,
        has_join_scoping,
        has_having_scoping,
        has_row_limit,
        nondeterministic_scope,
    };

    // Aggregate: calls from projection / HAVING / ORDER BY plus group keys.
    let mut calls = Vec::new();
    for agg in ast.own_aggregates() {
        let Expr::Aggregate { func, distinct, arg } = agg else { unreachable!() };
        let (argument, argument_columns, argument_unresolved, argument_has_text_literal) =
            match arg {
                AggArg::Star => ("*".to_string(), Vec::new(), Vec::new(), false),
                AggArg::Expr(e) => {
                    let mut resolved = Vec::new();
                    let mut unresolved = Vec::new();
                    for column in e.columns() {
                        match scope.resolve(column.qualifier.as_deref(), &column.name) {
                            Ok(r) => resolved.push(ColumnTarget {
                                table: r.table,
                                column: r.column.name.clone(),
                            }),
                            Err(_) => unresolved.push(print_expr(&Expr::Column(column.clone()))),
                        }
                    }
                    (print_expr(e), resolved, unresolved, has_text_literal(e))
                }
            };
        calls.push(AggregateCallSpec {
            function: func.name().to_ascii_lowercase(),
            argument,
            distinct: *distinct,
            argument_columns,
            argument_unresolved,
            argument_has_text_literal,
            func: func.clone(),
        });
    }

    let mut group_keys = Vec::new();
    for key in &ast.group_by {
        let resolution = scope.resolve(key.qualifier.as_deref(), &key.name)?;
        group_keys.push(format!("{}.{}", resolution.table, resolution.column.name));
    }
    let identity = calls.is_empty() && group_keys.is_empty();
    let aggregate = AggregateSpec { calls, group_keys, identity };

    // Return: output expressions with star expansion, ordering, limit.
    let mut columns = Vec::new();
    for item in &ast.select_items {
        match item {
            SelectItem::Star => {
                let scope_tables = scope.innermost_tables();
                let qualify = scope_tables.len() > 1;
                for entry in scope_tables {
                    let table = catalog.table(&entry.table).expect("scope table");
                    for column in &table.columns {
                        let text = if qualify {
                            format!("{}.{}", entry.effective_display, column.name)
                        } else {
                            column.name.clone()
                        };
                        columns.push(OutputColumn { text, alias: None, unresolved: Vec::new() });
                    }
                }
            }
            SelectItem::Expr { expr, alias } => {
                columns.push(OutputColumn {
                    text: print_expr(expr),
                    alias: alias.clone(),
                    unresolved: unresolved_columns(expr, scope),
                });
            }
        }
    }

    let ordering = ast
        .order_by
        .iter()
        .map(|key| OrderSpec {
            key: print_expr(&key.expr),
            direction: key.direction.keyword().to_ascii_lowercase(),
            unresolved: unresolved_columns(&key.expr, scope),
        })
        .collect();

    let return_spec = ReturnSpec { columns, ordering, limit: ast.limit };

    Ok(FarStructure { filter, aggregate, return_spec })
}

/// Judge a FAR structure against the catalog it was extracted from.
pub fn check_conformance(far: &FarStructure, catalog: &SchemaCatalog) -> ConformanceReport {
    // Filter: some scoping must exist — predicates, join scoping, a row
    // limit, or a non-identity aggregate (summarization scopes the
    // enumeration on its own).
    let mut filter_reasons = Vec::new();
    if far.filter.predicates.is_empty()
        && !far.filter.has_join_scoping
        && !far.filter.has_row_limit
        && far.aggregate.identity
    {
        filter_reasons.push(ReasonCode::FNoScoping);
    }

    // Aggregate: known functions; sum/avg over numeric arguments only
    // (min/max/count apply to any type).
    let mut aggregate_reasons = Vec::new();
    for call in &far.aggregate.calls {
        if !call.func.is_known() {
            aggregate_reasons.push(ReasonCode::AUnknownFunction);
            continue;
        }
        if matches!(call.func, AggregateFunc::Sum | AggregateFunc::Avg) {
            if call.argument_has_text_literal {
                aggregate_reasons.push(ReasonCode::ANonNumericAgg);
                continue;
            }
            if !call.argument_unresolved.is_empty() {
                // The unknown column is reported on the Return side; there
                // is no type to judge here.
                continue;
            }
            let non_numeric = call.argument_columns.iter().any(|target| {
                catalog
                    .table(&target.table)
                    .and_then(|t| t.column(&target.column))
                    .is_some_and(|c| !c.data_type.is_numeric())
            });
            if non_numeric {
                aggregate_reasons.push(ReasonCode::ANonNumericAgg);
            }
        }
    }

    // Return: output and order keys must resolve; HAVING needs aggregation
    // context to be meaningful.
    let mut return_reasons = Vec::new();
    if far.return_spec.columns.iter().any(|c| !c.unresolved.is_empty()) {
        return_reasons.push(ReasonCode::RUnknownColumn);
    }
    if far.return_spec.ordering.iter().any(|k| !k.unresolved.is_empty()) {
        return_reasons.push(ReasonCode::RUnresolvableOrderKey);
    }
    if far.filter.has_having_scoping
        && far.aggregate.calls.is_empty()
        && far.aggregate.group_keys.is_empty()
    {
        return_reasons.push(ReasonCode::RHavingWithoutAggContext);
    }

    let filter = StepVerdict::from_reasons(filter_reasons);
    let aggregate = StepVerdict::from_reasons(aggregate_reasons);
    let return_spec = StepVerdict::from_reasons(return_reasons);
    let conformant = filter.passed() && aggregate.passed() && return_spec.passed();
    ConformanceReport { filter, aggregate, return_spec, conformant }
}

/// Convenience: extract and check in one call.
pub fn analyze_conformance(
    ast: &QueryAst,
    catalog: &SchemaCatalog,
) -> Result<(FarStructure, ConformanceReport), FarError> {
    let far = extract_far(ast, catalog)?;
    let report = check_conformance(&far, catalog);
    Ok((far, report))
}

/// Effective table names of the scope's outer frames (everything except the
/// innermost), outermost first, as the atomizer expects.
fn outer_frame_names(ast: &QueryAst, scope: &Scope<'_>) -> Vec<Vec<String>> {
    // The scope does not expose its frames directly; rebuild the outer
    // names by resolving the ast's own tables away from the full stack.
    // Outer frames only matter for correlation marks, which need just the
    // effective names, so the ast's own frame is recomputed and excluded.
    let own: Vec<String> =
        ast.scope_tables().map(|t| t.effective_name().to_ascii_lowercase()).collect();
    let mut all = scope.frame_names();
    // Drop the innermost frame (the ast's own), keeping enclosing ones.
    if all.last().is_some_and(|last| *last == own) {
        all.pop();
    }
    all
}

/// True when `expr` is `a = b` with both sides single key columns resolving
/// to different tables of the innermost scope.
fn is_key_equality(expr: &Expr, scope: &Scope<'_>) -> Result<bool, FarError> {
    let Expr::Compare { op: crate::sql::CompareOp::Eq, left, right } = expr else {
        return Ok(false);
    };
    let (Expr::Column(a), Expr::Column(b)) = (left.as_ref(), right.as_ref()) else {
        return Ok(false);
    };
    let ra = scope.resolve(a.qualifier.as_deref(), &a.name)?;
    let rb = scope.resolve(b.qualifier.as_deref(), &b.name)?;
    Ok(ra.frame_depth == 0
        && rb.frame_depth == 0
        && ra.table_index != rb.table_index
        && ra.column.is_key()
        && rb.column.is_key())
}

fn unresolved_columns(expr: &Expr, scope: &Scope<'_>) -> Vec<String> {
    let mut out = Vec::new();
    for column in expr.columns() {
        if scope.resolve(column.qualifier.as_deref(), &column.name).is_err() {
            out.push(print_expr(&Expr::Column(column.clone())));
        }
    }
    out
}

fn has_text_literal(expr: &Expr) -> bool {
    match expr {
        Expr::Literal(Literal::String(_)) => true,
        Expr::Literal(_) | Expr::Column(_) | Expr::Binding(_) | Expr::Subquery(_) => false,
        Expr::Binary { left, right, .. } | Expr::Compare { left, right, .. } => {
            has_text_literal(left) || has_text_literal(right)
        }
        Expr::Between { expr, low, high, .. } => {
            has_text_literal(expr) || has_text_literal(low) || has_text_literal(high)
        }
        Expr::InList { expr, list, .. } => {
            has_text_literal(expr) || list.iter().any(has_text_literal)
        }
        Expr::InSubquery { expr, .. } => has_text_literal(expr),
        Expr::Like { expr, pattern, .. } => has_text_literal(expr) || has_text_literal(pattern),
        Expr::IsNull { expr, .. } => has_text_literal(expr),
        Expr::Not(inner) => has_text_literal(inner),
        Expr::And(l, r) | Expr::Or(l, r) => has_text_literal(l) || has_text_literal(r),
        Expr::Aggregate { arg, .. } => match arg {
            AggArg::Expr(e) => has_text_literal(e),
            AggArg::Star => false,
        },
    }
}
