//! Decomposition of nested queries into ordered Filter→Aggregate→Return
//! steps, plus detection of constraint operators (ranking and superlative
//! anchors) that modify filtered values rather than filtering rows.
//!
//! Every subquery becomes its own step: the innermost steps come first,
//! siblings left to right, and the enclosing query's predicate refers to a
//! child step through a `@stepN` binding. Correlated predicates stay inside
//! the child step, annotated with the outer references they use.
//! [`recompose`] inverts the whole transformation, reproducing a query
//! structurally equal to the original.

use serde::Serialize;

use crate::far::{check_conformance, extract_far_scoped, ConformanceReport, FarError, FarStructure};
use crate::schema::{SchemaCatalog, Scope};
use crate::sql::{
    atomize_with_outer, print_query, AggArg, AggregateFunc, Expr, OrderDirection, QueryAst,
    SelectItem,
};

/// Which clause an operator was detected in.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum OperatorSource {
    #[serde(rename = "order-by+limit")]
    OrderByLimit,
    #[serde(rename = "subquery")]
    Subquery,
}

/// The operator itself: a ranking (ORDER BY + LIMIT k) or a superlative
/// anchor (a scalar subquery computing exactly MIN(col) or MAX(col)).
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum ConstraintKind {
    Ranking { direction: String, k: u64 },
    SuperlativeAnchor { function: String },
}

/// A constraint operator: it reshapes or selects among values produced by
/// the Filter step instead of acting as a filter predicate, so it never
/// appears in any step's predicate list.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConstraintOperator {
    #[serde(flatten)]
    pub kind: ConstraintKind,
    pub target_column: String,
    pub source: OperatorSource,
}

impl ConstraintOperator {
    /// Compact display form, e.g. `ranking(asc, 1, fare)`.
    pub fn describe(&self) -> String {
        match &self.kind {
            ConstraintKind::Ranking { direction, k } => {
                format!("ranking({direction}, {k}, {})", self.target_column)
            }
            ConstraintKind::SuperlativeAnchor { function } => {
                format!("superlative-anchor({function}, {})", self.target_column)
            }
        }
    }
}

/// What a step's binding stands for when referenced by its parent.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ResultKind {
    /// A single value (the subquery sat in a comparison or arithmetic spot).
    Scalar,
    /// A set of values (the subquery sat on the right of IN).
    Set,
    /// The root query's full result rows.
    Relation,
}

/// One step of a decomposition plan.
#[derive(Debug, Clone, Serialize)]
pub struct DecompositionStep {
    pub id: String,
    /// Binding name parents use to reference this step's result; the root
    /// step has none.
    pub binding: Option<String>,
    pub result: ResultKind,
    /// Ids of the steps whose bindings this step references directly.
    pub depends_on: Vec<String>,
    /// Outer column references (`alias.column`) used by this step's own
    /// predicates; non-empty exactly when the step is correlated.
    pub correlated_on: Vec<String>,
    pub far: FarStructure,
    pub conformance: ConformanceReport,
    /// The step's query with child subqueries replaced by bindings.
    #[serde(skip)]
    pub ast: QueryAst,
}

/// An ordered decomposition: every dependency precedes its dependents, and
/// the root step comes last.
#[derive(Debug, Clone, Serialize)]
pub struct DecompositionPlan {
    pub steps: Vec<DecompositionStep>,
    pub root: String,
}

impl DecompositionPlan {
    pub fn step(&self, id: &str) -> Option<&DecompositionStep> {
        self.steps.iter().find(|s| s.id == id)
    }

    pub fn root_step(&self) -> &DecompositionStep {
        self.step(&self.root).expect("plan has a root step")
    }

    /// True when every step's three parts pass conformance.
    pub fn all_steps_conformant(&self) -> bool {
        self.steps.iter().all(|s| s.conformance.conformant)
    }

    /// Human-readable indented rendering, stable for golden comparison.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!("plan: {} step(s), root = {}\n", self.steps.len(), self.root));
        for step in &self.steps {
            let deps = if step.depends_on.is_empty() {
                "-".to_string()
            } else {
                step.depends_on.join(", ")
            };
            out.push_str(&format!(
                "{} [{}] depends on: {}\n",
                step.id,
                result_kind_name(step.result),
                deps
            ));
            out.push_str(&format!("  query: {}\n", print_query(&step.ast)));
            if !step.correlated_on.is_empty() {
                out.push_str(&format!("  correlated on: {}\n", step.correlated_on.join(", ")));
            }
            if step.far.filter.predicates.is_empty() {
                out.push_str("  filter: (none)\n");
            } else {
                out.push_str("  filter:\n");
                for atom in &step.far.filter.predicates {
                    let mut notes = Vec::new();
                    if atom.post_aggregation {
                        notes.push("post-aggregation");
                    }
                    if atom.correlated {
                        notes.push("correlated");
                    }
                    let suffix = if notes.is_empty() {
                        String::new()
                    } else {
                        format!("  [{}]", notes.join(", "))
                    };
                    out.push_str(&format!("    {}: {}{}\n", atom.id, atom.text, suffix));
                }
            }
            if step.far.aggregate.identity {
                out.push_str("  aggregate: identity\n");
            } else {
                let mut parts: Vec<String> = step
                    .far
                    .aggregate
                    .calls
                    .iter()
                    .map(|c| format!("{}({})", c.function, c.argument))
                    .collect();
                if !step.far.aggregate.group_keys.is_empty() {
                    parts.push(format!("group by {}", step.far.aggregate.group_keys.join(", ")));
                }
                out.push_str(&format!("  aggregate: {}\n", parts.join(", ")));
            }
            let mut ret = format!("{} column(s)", step.far.return_spec.columns.len());
            if !step.far.return_spec.ordering.is_empty() {
                let keys: Vec<String> = step
                    .far
                    .return_spec
                    .ordering
                    .iter()
                    .map(|k| format!("{} {}", k.key, k.direction))
                    .collect();
                ret.push_str(&format!(", order by {}", keys.join(", ")));
            }
            if let Some(limit) = step.far.return_spec.limit {
                ret.push_str(&format!(", limit {limit}"));
            }
            out.push_str(&format!("  return: {ret}\n"));
            let verdict = if step.conformance.conformant {
                "conformant".to_string()
            } else {
                let reasons: Vec<&str> =
                    step.conformance.reasons().iter().map(|r| r.as_str()).collect();
                format!("nonconformant ({})", reasons.join(", "))
            };
            out.push_str(&format!("  verdict: {verdict}\n"));
        }
        out
    }
}

fn result_kind_name(kind: ResultKind) -> &'static str {
    match kind {
        ResultKind::Scalar => "scalar",
        ResultKind::Set => "set",
        ResultKind::Relation => "relation",
    }
}

/// Detect the query's own constraint operators: a ranking when both ORDER BY
/// and a positive LIMIT are present, and a superlative anchor for each
/// scalar-position subquery whose entire projection is MIN(col) or MAX(col).
/// Nested subqueries report their own operators through their own steps.
pub fn detect_constraint_operators(ast: &QueryAst) -> Vec<ConstraintOperator> {
    let mut operators = Vec::new();
    if let (Some(k), Some(first_key)) = (ast.limit, ast.order_by.first()) {
        if k >= 1 {
            let target = match &first_key.expr {
                Expr::Column(c) => c.name.clone(),
                other => crate::sql::print_expr(other),
            };
            let direction = match first_key.direction {
                OrderDirection::Asc => "asc",
                OrderDirection::Desc => "desc",
            };
            operators.push(ConstraintOperator {
                kind: ConstraintKind::Ranking { direction: direction.to_string(), k },
                target_column: target,
                source: OperatorSource::OrderByLimit,
            });
        }
    }
    for expr in ast.clause_exprs() {
        collect_scalar_subqueries(expr, &mut |sub| {
            if let Some((function, column)) = superlative_form(sub) {
                operators.push(ConstraintOperator {
                    kind: ConstraintKind::SuperlativeAnchor { function },
                    target_column: column,
                    source: OperatorSource::Subquery,
                });
            }
        });
    }
    operators
}

/// Visit scalar-position subqueries of one expression (not IN-subqueries,
/// not subqueries nested inside other subqueries).
fn collect_scalar_subqueries<'a>(expr: &'a Expr, visit: &mut impl FnMut(&'a QueryAst)) {
    match expr {
        Expr::Subquery(sub) => visit(sub),
        Expr::Column(_) | Expr::Literal(_) | Expr::Binding(_) | Expr::InSubquery { .. } => {}
        Expr::Binary { left, right, .. } | Expr::Compare { left, right, .. } => {
            collect_scalar_subqueries(left, visit);
            collect_scalar_subqueries(right, visit);
        }
        Expr::Between { expr, low, high, .. } => {
            collect_scalar_subqueries(expr, visit);
            collect_scalar_subqueries(low, visit);
            collect_scalar_subqueries(high, visit);
        }
        Expr::InList { expr, list, .. } => {
            collect_scalar_subqueries(expr, visit);
            for item in list {
                collect_scalar_subqueries(item, visit);
            }
        }
        Expr::Like { expr, pattern, .. } => {
            collect_scalar_subqueries(expr, visit);
            collect_scalar_subqueries(pattern, visit);
        }
        Expr::IsNull { expr, .. } => collect_scalar_subqueries(expr, visit),
        Expr::Not(inner) => collect_scalar_subqueries(inner, visit),
        Expr::And(l, r) | Expr::Or(l, r) => {
            collect_scalar_subqueries(l, visit);
            collect_scalar_subqueries(r, visit);
        }
        Expr::Aggregate { arg, .. } => {
            if let AggArg::Expr(e) = arg {
                collect_scalar_subqueries(e, visit);
            }
        }
    }
}

/// `Some((function, column))` when the query's whole projection is exactly
/// MIN(col) or MAX(col) — a single ungrouped superlative. Anything wrapping
/// the call (arithmetic, extra items, grouping) disqualifies it.
fn superlative_form(sub: &QueryAst) -> Option<(String, String)> {
    if sub.select_items.len() != 1 || !sub.group_by.is_empty() {
        return None;
    }
    let SelectItem::Expr { expr, .. } = &sub.select_items[0] else {
        return None;
    };
    let Expr::Aggregate { func, arg, .. } = expr else {
        return None;
    };
    if !matches!(func, AggregateFunc::Min | AggregateFunc::Max) {
        return None;
    }
    let AggArg::Expr(arg_expr) = arg else { return None };
    let Expr::Column(column) = arg_expr.as_ref() else { return None };
    Some((func.name().to_ascii_lowercase(), column.name.clone()))
}

/// Decompose a query into FAR steps, innermost subqueries first. The root
/// step comes last under the id `root`; every other step is named `step1`,
/// `step2`, … in the order its subquery finishes (left to right, inner
/// before outer), which is also its position in the plan.
pub fn decompose(ast: &QueryAst, catalog: &SchemaCatalog) -> Result<DecompositionPlan, FarError> {
    let mut root = ast.clone();
    let mut steps = Vec::new();
    let mut counter = 0usize;
    let root_children =
        process_query(&mut root, &[], &mut counter, &mut steps, catalog)?;

    let scope = Scope::build(catalog, &root)?;
    let far = extract_far_scoped(&root, &scope)?;
    let conformance = check_conformance(&far, catalog);
    steps.push(DecompositionStep {
        id: "root".to_string(),
        binding: None,
        result: ResultKind::Relation,
        depends_on: root_children,
        correlated_on: Vec::new(),
        far,
        conformance,
        ast: root,
    });

    Ok(DecompositionPlan { steps, root: "root".to_string() })
}

/// Substitute every subquery of `query` (recursively, bottom-up) with a
/// binding, emitting one step per subquery. Returns the ids of the steps
/// created for `query`'s direct subqueries. `ancestors` holds the enclosing
/// queries outermost-first, for scope chains.
fn process_query(
    query: &mut QueryAst,
    ancestors: &[QueryAst],
    counter: &mut usize,
    steps: &mut Vec<DecompositionStep>,
    catalog: &SchemaCatalog,
) -> Result<Vec<String>, FarError> {
    // Snapshot before substitution: only FROM/JOIN tables matter for the
    // scope chain, and substitution never touches them.
    let mut chain: Vec<QueryAst> = ancestors.to_vec();
    chain.push(query.clone());

    let mut child_ids = Vec::new();
    let mut slots: Vec<&mut Expr> = Vec::new();
    for item in &mut query.select_items {
        if let SelectItem::Expr { expr, .. } = item {
            slots.push(expr);
        }
    }
    for join in &mut query.joins {
        slots.push(&mut join.on);
    }
    if let Some(w) = &mut query.where_clause {
        slots.push(w);
    }
    if let Some(h) = &mut query.having_clause {
        slots.push(h);
    }
    for key in &mut query.order_by {
        slots.push(&mut key.expr);
    }
    for slot in slots {
        substitute_expr(slot, &chain, counter, steps, catalog, &mut child_ids)?;
    }
    Ok(child_ids)
}

fn substitute_expr(
    expr: &mut Expr,
    ancestors: &[QueryAst],
    counter: &mut usize,
    steps: &mut Vec<DecompositionStep>,
    catalog: &SchemaCatalog,
    child_ids: &mut Vec<String>,
) -> Result<(), FarError> {
    match expr {
        Expr::Subquery(sub) => {
            let name = emit_step(sub, ResultKind::Scalar, ancestors, counter, steps, catalog)?;
            child_ids.push(name.clone());
            *expr = Expr::Binding(name);
        }
        Expr::InSubquery { .. } => {
            let owned = std::mem::replace(expr, Expr::Binding(String::new()));
            let Expr::InSubquery { expr: mut tested, subquery: mut sub, negated } = owned else {
                unreachable!()
            };
            substitute_expr(&mut tested, ancestors, counter, steps, catalog, child_ids)?;
            let name = emit_step(&mut sub, ResultKind::Set, ancestors, counter, steps, catalog)?;
            child_ids.push(name.clone());
            *expr = Expr::InList {
                expr: tested,
                list: vec![Expr::Binding(name)],
                negated,
            };
        }
        Expr::Column(_) | Expr::Literal(_) | Expr::Binding(_) => {}
        Expr::Binary { left, right, .. } | Expr::Compare { left, right, .. } => {
            substitute_expr(left, ancestors, counter, steps, catalog, child_ids)?;
            substitute_expr(right, ancestors, counter, steps, catalog, child_ids)?;
        }
        Expr::Between { expr, low, high, .. } => {
            substitute_expr(expr, ancestors, counter, steps, catalog, child_ids)?;
            substitute_expr(low, ancestors, counter, steps, catalog, child_ids)?;
            substitute_expr(high, ancestors, counter, steps, catalog, child_ids)?;
        }
        Expr::InList { expr, list, .. } => {
            substitute_expr(expr, ancestors, counter, steps, catalog, child_ids)?;
            for item in list {
                substitute_expr(item, ancestors, counter, steps, catalog, child_ids)?;
            }
        }
        Expr::Like { expr, pattern, .. } => {
            substitute_expr(expr, ancestors, counter, steps, catalog, child_ids)?;
            substitute_expr(pattern, ancestors, counter, steps, catalog, child_ids)?;
        }
        Expr::IsNull { expr, .. } => {
            substitute_expr(expr, ancestors, counter, steps, catalog, child_ids)?;
        }
        Expr::Not(inner) => {
            substitute_expr(inner, ancestors, counter, steps, catalog, child_ids)?;
        }
        Expr::And(l, r) | Expr::Or(l, r) => {
            substitute_expr(l, ancestors, counter, steps, catalog, child_ids)?;
            substitute_expr(r, ancestors, counter, steps, catalog, child_ids)?;
        }
        Expr::Aggregate { arg, .. } => {
            if let AggArg::Expr(e) = arg {
                substitute_expr(e, ancestors, counter, steps, catalog, child_ids)?;
            }
        }
    }
    Ok(())
}

/// Finish one subquery: substitute its own children first (so inner steps
/// get the lower numbers), then extract, check, and record it as a step.
fn emit_step(
    sub: &mut QueryAst,
    result: ResultKind,
    ancestors: &[QueryAst],
    counter: &mut usize,
    steps: &mut Vec<DecompositionStep>,
    catalog: &SchemaCatalog,
) -> Result<String, FarError> {
    let grandchildren = process_query(sub, ancestors, counter, steps, catalog)?;

    *counter += 1;
    let name = format!("step{counter}");

    let mut scope = Scope::build(catalog, &ancestors[0])?;
    for ancestor in &ancestors[1..] {
        scope.push(ancestor)?;
    }
    scope.push(sub)?;
    let far = extract_far_scoped(sub, &scope)?;
    let conformance = check_conformance(&far, catalog);

    // The step's own outer references, in predicate order.
    let mut outer_names = scope.frame_names();
    outer_names.pop();
    let atomization = atomize_with_outer(sub, &outer_names);
    let mut correlated_on = Vec::new();
    for atom in atomization.root_atoms() {
        for reference in &atom.outer_refs {
            if !correlated_on.iter().any(|r: &String| r.eq_ignore_ascii_case(reference)) {
                correlated_on.push(reference.clone());
            }
        }
    }

    steps.push(DecompositionStep {
        id: name.clone(),
        binding: Some(name.clone()),
        result,
        depends_on: grandchildren,
        correlated_on,
        far,
        conformance,
        ast: sub.clone(),
    });
    Ok(name)
}

/// Rebuild the original query from a plan by replacing each binding
/// reference with its step's (recursively rebuilt) subquery.
pub fn recompose(plan: &DecompositionPlan) -> QueryAst {
    let root = plan.root_step();
    let mut ast = root.ast.clone();
    restore_query(&mut ast, plan);
    ast
}

fn restore_query(query: &mut QueryAst, plan: &DecompositionPlan) {
    let mut slots: Vec<&mut Expr> = Vec::new();
    for item in &mut query.select_items {
        if let SelectItem::Expr { expr, .. } = item {
            slots.push(expr);
        }
    }
    for join in &mut query.joins {
        slots.push(&mut join.on);
    }
    if let Some(w) = &mut query.where_clause {
        slots.push(w);
    }
    if let Some(h) = &mut query.having_clause {
        slots.push(h);
    }
    for key in &mut query.order_by {
        slots.push(&mut key.expr);
    }
    for slot in slots {
        restore_expr(slot, plan);
    }
}

fn restore_expr(expr: &mut Expr, plan: &DecompositionPlan) {
    // An IN list holding exactly one set-kind binding came from an
    // IN-subquery; a scalar-kind binding anywhere came from a scalar
    // subquery.
    if let Expr::InList { list, .. } = expr {
        if list.len() == 1 {
            if let Expr::Binding(name) = &list[0] {
                if let Some(step) = plan.step(name) {
                    if step.result == ResultKind::Set {
                        let mut sub = step.ast.clone();
                        restore_query(&mut sub, plan);
                        let owned = std::mem::replace(expr, Expr::Binding(String::new()));
                        let Expr::InList { expr: tested, negated, .. } = owned else {
                            unreachable!()
                        };
                        let mut tested = tested;
                        restore_expr(&mut tested, plan);
                        *expr = Expr::InSubquery {
                            expr: tested,
                            subquery: Box::new(sub),
                            negated,
                        };
                        return;
                    }
                }
            }
        }
    }
    if let Expr::Binding(name) = expr {
        if let Some(step) = plan.step(name.as_str()) {
            if step.result == ResultKind::Scalar {
                let mut sub = step.ast.clone();
                restore_query(&mut sub, plan);
                *expr = Expr::Subquery(Box::new(sub));
            }
        }
        return;
    }
    match expr {
        Expr::Column(_) | Expr::Literal(_) | Expr::Binding(_) => {}
        Expr::Subquery(sub) => restore_query(sub, plan),
        Expr::InSubquery { expr, subquery, .. } => {
            restore_expr(expr, plan);
            restore_query(subquery, plan);
        }
        Expr::Binary { left, right, .. } | Expr::Compare { left, right, .. } => {
            restore_expr(left, plan);
            restore_expr(right, plan);
        }
        Expr::Between { expr, low, high, .. } => {
            restore_expr(expr, plan);
            restore_expr(low, plan);
            restore_expr(high, plan);
        }
        Expr::InList { expr, list, .. } => {
            restore_expr(expr, plan);
            for item in list {
                restore_expr(item, plan);
            }
        }
        Expr::Like { expr, pattern, .. } => {
            restore_expr(expr, plan);
            restore_expr(pattern, plan);
        }
        Expr::IsNull { expr, .. } => restore_expr(expr, plan),
        Expr::Not(inner) => restore_expr(inner, plan),
        Expr::And(l, r) | Expr::Or(l, r) => {
            restore_expr(l, plan);
            restore_expr(r, plan);
        }
        Expr::Aggregate { arg, .. } => {
            if let AggArg::Expr(e) = arg {
                restore_expr(e, plan);
            }
        }
    }
}
