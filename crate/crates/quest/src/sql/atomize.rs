//! Predicate atomization.
//!
//! The boolean expressions of WHERE, JOIN ... ON, and HAVING are flattened
//! into atomic predicates — comparison, BETWEEN, IN, LIKE, IS NULL leaves —
//! while the AND/OR/NOT structure above them is recorded as a tree of
//! predicate ids. Re-conjoining the tree reproduces the original expression
//! exactly, so atomization is lossless.
//!
//! Subqueries inside predicates are walked too: their internal predicates
//! join the same list, flagged [`PredicateSource::SubqueryInternal`], after
//! all of the root query's own atoms (so root atom ids are independent of
//! subquery content), one nesting level at a time. Predicates that reference
//! an enclosing query's tables are marked correlated, with the referenced
//! outer aliases recorded.

use serde::Serialize;

use super::ast::{enumerate_subqueries, Expr, QueryAst};
use super::printer::print_expr;

/// Where an atomic predicate was written.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum PredicateSource {
    Where,
    JoinOn,
    Having,
    SubqueryInternal,
}

/// One atomic predicate with a stable id.
#[derive(Debug, Clone, Serialize)]
pub struct AtomicPredicate {
    /// Stable within one query: `p1`, `p2`, ... in emission order.
    pub id: String,
    /// Canonical text of the predicate expression.
    pub text: String,
    pub source: PredicateSource,
    /// True when the predicate references a table of an enclosing query.
    pub correlated: bool,
    /// Outer column references (`alias.column`), as written; empty unless
    /// correlated.
    pub outer_refs: Vec<String>,
    /// The predicate expression itself.
    #[serde(skip)]
    pub expr: Expr,
    /// Index into [`enumerate_subqueries`] of the owning subquery, `None`
    /// for atoms of the root query's own clauses.
    #[serde(skip)]
    pub subquery_ord: Option<usize>,
}

/// The AND/OR/NOT skeleton of one clause, with atom ids at the leaves.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum PredicateTree {
    Leaf(String),
    Not(Box<PredicateTree>),
    And(Box<PredicateTree>, Box<PredicateTree>),
    Or(Box<PredicateTree>, Box<PredicateTree>),
}

/// Result of atomizing one query.
#[derive(Debug, Clone, Default, Serialize)]
pub struct Atomization {
    pub atoms: Vec<AtomicPredicate>,
    pub where_tree: Option<PredicateTree>,
    /// One tree per JOIN clause, in join order.
    pub join_trees: Vec<PredicateTree>,
    pub having_tree: Option<PredicateTree>,
}

impl Atomization {
    /// Atoms of the root query's own clauses, in id order.
    pub fn root_atoms(&self) -> impl Iterator<Item = &AtomicPredicate> {
        self.atoms.iter().filter(|a| a.source != PredicateSource::SubqueryInternal)
    }

    pub fn atom(&self, id: &str) -> Option<&AtomicPredicate> {
        self.atoms.iter().find(|a| a.id == id)
    }
}

/// Atomize the filter predicates of `ast`. See the module docs for ordering
/// and correlation rules.
pub fn atomize_predicates(ast: &QueryAst) -> Atomization {
    atomize_with_outer(ast, &[])
}

/// Atomize with enclosing scopes visible, for analyzing a subquery on its
/// own. `outer_scopes` lists the effective table names of enclosing queries,
/// outermost first, lowercased.
pub fn atomize_with_outer(ast: &QueryAst, outer_scopes: &[Vec<String>]) -> Atomization {
    let subquery_index = enumerate_subqueries(ast);
    let mut walker = Walker {
        atomization: Atomization::default(),
        next_id: 1,
        subquery_index,
        pending: Vec::new(),
    };

    let mut scopes: Vec<Vec<String>> = outer_scopes.to_vec();
    scopes.push(scope_names(ast));

    if let Some(where_clause) = &ast.where_clause {
        let tree = walker.flatten(where_clause, PredicateSource::Where, &scopes, None);
        walker.atomization.where_tree = Some(tree);
    }
    for join in &ast.joins {
        let tree = walker.flatten(&join.on, PredicateSource::JoinOn, &scopes, None);
        walker.atomization.join_trees.push(tree);
    }
    if let Some(having) = &ast.having_clause {
        let tree = walker.flatten(having, PredicateSource::Having, &scopes, None);
        walker.atomization.having_tree = Some(tree);
    }

    // Root atoms are numbered first; subqueries queued while flattening are
    // then walked level by level, so ids group outer atoms before inner ones.
    while !walker.pending.is_empty() {
        let batch = std::mem::take(&mut walker.pending);
        for (sub, scopes) in batch {
            walker.walk_subquery(sub, &scopes);
        }
    }

    walker.atomization
}

/// Rebuild the boolean expression a tree was flattened from.
pub fn reconjoin(tree: &PredicateTree, atomization: &Atomization) -> Option<Expr> {
    match tree {
        PredicateTree::Leaf(id) => atomization.atom(id).map(|a| a.expr.clone()),
        PredicateTree::Not(inner) => {
            Some(Expr::Not(Box::new(reconjoin(inner, atomization)?)))
        }
        PredicateTree::And(l, r) => Some(Expr::And(
            Box::new(reconjoin(l, atomization)?),
            Box::new(reconjoin(r, atomization)?),
        )),
        PredicateTree::Or(l, r) => Some(Expr::Or(
            Box::new(reconjoin(l, atomization)?),
            Box::new(reconjoin(r, atomization)?),
        )),
    }
}

fn scope_names(ast: &QueryAst) -> Vec<String> {
    ast.scope_tables().map(|t| t.effective_name().to_ascii_lowercase()).collect()
}

type PendingSubquery<'a> = (&'a QueryAst, Vec<Vec<String>>);

struct Walker<'a> {
    atomization: Atomization,
    next_id: usize,
    subquery_index: Vec<&'a QueryAst>,
    pending: Vec<PendingSubquery<'a>>,
}

impl<'a> Walker<'a> {
    fn flatten(
        &mut self,
        expr: &'a Expr,
        source: PredicateSource,
        scopes: &[Vec<String>],
        subquery_ord: Option<usize>,
    ) -> PredicateTree {
        match expr {
            Expr::And(l, r) => PredicateTree::And(
                Box::new(self.flatten(l, source, scopes, subquery_ord)),
                Box::new(self.flatten(r, source, scopes, subquery_ord)),
            ),
            Expr::Or(l, r) => PredicateTree::Or(
                Box::new(self.flatten(l, source, scopes, subquery_ord)),
                Box::new(self.flatten(r, source, scopes, subquery_ord)),
            ),
            Expr::Not(inner) => {
                PredicateTree::Not(Box::new(self.flatten(inner, source, scopes, subquery_ord)))
            }
            leaf => PredicateTree::Leaf(self.emit(leaf, source, scopes, subquery_ord)),
        }
    }

    fn emit(
        &mut self,
        leaf: &'a Expr,
        source: PredicateSource,
        scopes: &[Vec<String>],
        subquery_ord: Option<usize>,
    ) -> String {
        let id = format!("p{}", self.next_id);
        self.next_id += 1;

        let (correlated, outer_refs) = correlation(leaf, scopes);
        self.atomization.atoms.push(AtomicPredicate {
            id: id.clone(),
            text: print_expr(leaf),
            source,
            correlated,
            outer_refs,
            expr: leaf.clone(),
            subquery_ord,
        });

        // Queue the subqueries this leaf contains; their internal predicates
        // are appended after all atoms at the current depth.
        for sub in leaf.subqueries() {
            let mut sub_scopes = scopes.to_vec();
            sub_scopes.push(scope_names(sub));
            self.pending.push((sub, sub_scopes));
        }
        id
    }

    fn walk_subquery(&mut self, sub: &'a QueryAst, scopes: &[Vec<String>]) {
        let ord = self
            .subquery_index
            .iter()
            .position(|candidate| std::ptr::eq(*candidate, sub));
        if let Some(where_clause) = &sub.where_clause {
            self.flatten(where_clause, PredicateSource::SubqueryInternal, scopes, ord);
        }
        for join in &sub.joins {
            self.flatten(&join.on, PredicateSource::SubqueryInternal, scopes, ord);
        }
        if let Some(having) = &sub.having_clause {
            self.flatten(having, PredicateSource::SubqueryInternal, scopes, ord);
        }
    }
}

/// Decide whether a predicate references enclosing scopes, and which.
///
/// Only qualified references can be told apart without a catalog: a
/// qualifier that does not name a table of the innermost scope but does name
/// one of an enclosing scope marks the predicate correlated. Unqualified
/// columns are assumed local.
fn correlation(expr: &Expr, scopes: &[Vec<String>]) -> (bool, Vec<String>) {
    let Some((innermost, outer)) = scopes.split_last() else {
        return (false, Vec::new());
    };
    let mut outer_refs: Vec<String> = Vec::new();
    for column in expr.columns() {
        let Some(qualifier) = &column.qualifier else { continue };
        let lower = qualifier.to_ascii_lowercase();
        if innermost.contains(&lower) {
            continue;
        }
        if outer.iter().any(|scope| scope.contains(&lower)) {
            let reference = format!("{}.{}", qualifier, column.name);
            if !outer_refs.iter().any(|r| r.eq_ignore_ascii_case(&reference)) {
                outer_refs.push(reference);
            }
        }
    }
    (!outer_refs.is_empty(), outer_refs)
}
