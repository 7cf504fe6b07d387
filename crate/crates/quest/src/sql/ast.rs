//! Abstract syntax for the supported SQL subset: single-statement SELECT
//! queries with joins, grouping, ordering, and scalar/IN subqueries.

use serde::Serialize;

/// A (possibly qualified) column reference.
#[derive(Debug, Clone, PartialEq)]
pub struct ColumnRef {
    pub qualifier: Option<String>,
    pub name: String,
}

impl ColumnRef {
    pub fn bare(name: impl Into<String>) -> ColumnRef {
        ColumnRef { qualifier: None, name: name.into() }
    }

    pub fn qualified(qualifier: impl Into<String>, name: impl Into<String>) -> ColumnRef {
        ColumnRef { qualifier: Some(qualifier.into()), name: name.into() }
    }
}

/// Literal values. Floats compare bit-exactly so ASTs have a total,
/// structural notion of equality.
#[derive(Debug, Clone)]
pub enum Literal {
    String(String),
    Integer(i64),
    Float(f64),
}

impl PartialEq for Literal {
    fn eq(&self, other: &Self) -> bool {
        match (self, other) {
            (Literal::String(a), Literal::String(b)) => a == b,
            (Literal::Integer(a), Literal::Integer(b)) => a == b,
            (Literal::Float(a), Literal::Float(b)) => a.to_bits() == b.to_bits(),
            _ => false,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum CompareOp {
    Eq,
    NotEq,
    Lt,
    LtEq,
    Gt,
    GtEq,
}

impl CompareOp {
    pub fn symbol(self) -> &'static str {
        match self {
            CompareOp::Eq => "=",
            CompareOp::NotEq => "<>",
            CompareOp::Lt => "<",
            CompareOp::LtEq => "<=",
            CompareOp::Gt => ">",
            CompareOp::GtEq => ">=",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BinaryOp {
    Add,
    Sub,
    Mul,
    Div,
}

impl BinaryOp {
    pub fn symbol(self) -> &'static str {
        match self {
            BinaryOp::Add => "+",
            BinaryOp::Sub => "-",
            BinaryOp::Mul => "*",
            BinaryOp::Div => "/",
        }
    }
}

/// Aggregate function names. Unknown call names are preserved so downstream
/// analysis can report them instead of the parser rejecting the query.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum AggregateFunc {
    Count,
    Sum,
    Avg,
    Min,
    Max,
    Other(String),
}

impl AggregateFunc {
    pub fn from_name(name: &str) -> AggregateFunc {
        match name.to_ascii_lowercase().as_str() {
            "count" => AggregateFunc::Count,
            "sum" => AggregateFunc::Sum,
            "avg" => AggregateFunc::Avg,
            "min" => AggregateFunc::Min,
            "max" => AggregateFunc::Max,
            _ => AggregateFunc::Other(name.to_string()),
        }
    }

    /// Lowercase name for reports; `Other` keeps the original spelling.
    pub fn name(&self) -> String {
        match self {
            AggregateFunc::Count => "count".to_string(),
            AggregateFunc::Sum => "sum".to_string(),
            AggregateFunc::Avg => "avg".to_string(),
            AggregateFunc::Min => "min".to_string(),
            AggregateFunc::Max => "max".to_string(),
            AggregateFunc::Other(name) => name.clone(),
        }
    }

    pub fn is_known(&self) -> bool {
        !matches!(self, AggregateFunc::Other(_))
    }
}

/// Argument of an aggregate call: `*` or a value expression.
#[derive(Debug, Clone, PartialEq)]
pub enum AggArg {
    Star,
    Expr(Box<Expr>),
}

#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Column(ColumnRef),
    Literal(Literal),
    /// Arithmetic with `+ - * /`.
    Binary { op: BinaryOp, left: Box<Expr>, right: Box<Expr> },
    Compare { op: CompareOp, left: Box<Expr>, right: Box<Expr> },
    Between { expr: Box<Expr>, low: Box<Expr>, high: Box<Expr>, negated: bool },
    InList { expr: Box<Expr>, list: Vec<Expr>, negated: bool },
    InSubquery { expr: Box<Expr>, subquery: Box<QueryAst>, negated: bool },
    Like { expr: Box<Expr>, pattern: Box<Expr>, negated: bool },
    IsNull { expr: Box<Expr>, negated: bool },
    Not(Box<Expr>),
    And(Box<Expr>, Box<Expr>),
    Or(Box<Expr>, Box<Expr>),
    Aggregate { func: AggregateFunc, distinct: bool, arg: AggArg },
    /// Scalar subquery in expression position.
    Subquery(Box<QueryAst>),
    /// Reference to a decomposition-step binding. Never produced by the
    /// parser; query plans substitute these for subqueries.
    Binding(String),
}

impl Expr {
    /// True for the boolean combinators; everything else is a predicate or
    /// value leaf from the atomizer's point of view.
    pub fn is_boolean_combinator(&self) -> bool {
        matches!(self, Expr::Not(_) | Expr::And(_, _) | Expr::Or(_, _))
    }

    /// Collect column references in this expression without descending into
    /// subqueries (their columns belong to inner scopes).
    pub fn columns(&self) -> Vec<&ColumnRef> {
        let mut out = Vec::new();
        self.walk_columns(&mut out);
        out
    }

    fn walk_columns<'a>(&'a self, out: &mut Vec<&'a ColumnRef>) {
        match self {
            Expr::Column(c) => out.push(c),
            Expr::Literal(_) | Expr::Binding(_) | Expr::Subquery(_) => {}
            Expr::Binary { left, right, .. } | Expr::Compare { left, right, .. } => {
                left.walk_columns(out);
                right.walk_columns(out);
            }
            Expr::Between { expr, low, high, .. } => {
                expr.walk_columns(out);
                low.walk_columns(out);
                high.walk_columns(out);
            }
            Expr::InList { expr, list, .. } => {
                expr.walk_columns(out);
                for item in list {
                    item.walk_columns(out);
                }
            }
            Expr::InSubquery { expr, .. } => expr.walk_columns(out),
            Expr::Like { expr, pattern, .. } => {
                expr.walk_columns(out);
                pattern.walk_columns(out);
            }
            Expr::IsNull { expr, .. } => expr.walk_columns(out),
            Expr::Not(inner) => inner.walk_columns(out),
            Expr::And(l, r) | Expr::Or(l, r) => {
                l.walk_columns(out);
                r.walk_columns(out);
            }
            Expr::Aggregate { arg, .. } => {
                if let AggArg::Expr(e) = arg {
                    e.walk_columns(out);
                }
            }
        }
    }

    /// Immediate subqueries of this expression (not recursing into them).
    pub fn subqueries(&self) -> Vec<&QueryAst> {
        let mut out = Vec::new();
        self.walk_subqueries(&mut out);
        out
    }

    fn walk_subqueries<'a>(&'a self, out: &mut Vec<&'a QueryAst>) {
        match self {
            Expr::Subquery(q) => out.push(q),
            Expr::InSubquery { expr, subquery, .. } => {
                expr.walk_subqueries(out);
                out.push(subquery);
            }
            Expr::Column(_) | Expr::Literal(_) | Expr::Binding(_) => {}
            Expr::Binary { left, right, .. } | Expr::Compare { left, right, .. } => {
                left.walk_subqueries(out);
                right.walk_subqueries(out);
            }
            Expr::Between { expr, low, high, .. } => {
                expr.walk_subqueries(out);
                low.walk_subqueries(out);
                high.walk_subqueries(out);
            }
            Expr::InList { expr, list, .. } => {
                expr.walk_subqueries(out);
                for item in list {
                    item.walk_subqueries(out);
                }
            }
            Expr::Like { expr, pattern, .. } => {
                expr.walk_subqueries(out);
                pattern.walk_subqueries(out);
            }
            Expr::IsNull { expr, .. } => expr.walk_subqueries(out),
            Expr::Not(inner) => inner.walk_subqueries(out),
            Expr::And(l, r) | Expr::Or(l, r) => {
                l.walk_subqueries(out);
                r.walk_subqueries(out);
            }
            Expr::Aggregate { arg, .. } => {
                if let AggArg::Expr(e) = arg {
                    e.walk_subqueries(out);
                }
            }
        }
    }

    /// Aggregate calls in this expression, not descending into subqueries.
    pub fn aggregates(&self) -> Vec<&Expr> {
        let mut out = Vec::new();
        self.walk_aggregates(&mut out);
        out
    }

    fn walk_aggregates<'a>(&'a self, out: &mut Vec<&'a Expr>) {
        match self {
            Expr::Aggregate { arg, .. } => {
                out.push(self);
                if let AggArg::Expr(e) = arg {
                    e.walk_aggregates(out);
                }
            }
            Expr::Column(_) | Expr::Literal(_) | Expr::Binding(_) | Expr::Subquery(_) => {}
            Expr::Binary { left, right, .. } | Expr::Compare { left, right, .. } => {
                left.walk_aggregates(out);
                right.walk_aggregates(out);
            }
            Expr::Between { expr, low, high, .. } => {
                expr.walk_aggregates(out);
                low.walk_aggregates(out);
                high.walk_aggregates(out);
            }
            Expr::InList { expr, list, .. } => {
                expr.walk_aggregates(out);
                for item in list {
                    item.walk_aggregates(out);
                }
            }
            Expr::InSubquery { expr, .. } => expr.walk_aggregates(out),
            Expr::Like { expr, pattern, .. } => {
                expr.walk_aggregates(out);
                pattern.walk_aggregates(out);
            }
            Expr::IsNull { expr, .. } => expr.walk_aggregates(out),
            Expr::Not(inner) => inner.walk_aggregates(out),
            Expr::And(l, r) | Expr::Or(l, r) => {
                l.walk_aggregates(out);
                r.walk_aggregates(out);
            }
        }
    }
}

/// One projected item.
#[derive(Debug, Clone, PartialEq)]
pub enum SelectItem {
    Star,
    Expr { expr: Expr, alias: Option<String> },
}

/// A table in FROM or JOIN position.
#[derive(Debug, Clone, PartialEq)]
pub struct TableRef {
    pub name: String,
    pub alias: Option<String>,
}

impl TableRef {
    /// Name that later clauses refer to this table by.
    pub fn effective_name(&self) -> &str {
        self.alias.as_deref().unwrap_or(&self.name)
    }
}

/// An explicit `JOIN ... ON ...` clause (inner joins only).
#[derive(Debug, Clone, PartialEq)]
pub struct Join {
    pub table: TableRef,
    pub on: Expr,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum OrderDirection {
    Asc,
    Desc,
}

impl OrderDirection {
    pub fn keyword(self) -> &'static str {
        match self {
            OrderDirection::Asc => "ASC",
            OrderDirection::Desc => "DESC",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct OrderKey {
    pub expr: Expr,
    pub direction: OrderDirection,
}

/// A parsed single-statement SELECT query.
#[derive(Debug, Clone, PartialEq)]
pub struct QueryAst {
    pub distinct: bool,
    pub select_items: Vec<SelectItem>,
    pub from_tables: Vec<TableRef>,
    pub joins: Vec<Join>,
    pub where_clause: Option<Expr>,
    pub group_by: Vec<ColumnRef>,
    pub having_clause: Option<Expr>,
    pub order_by: Vec<OrderKey>,
    pub limit: Option<u64>,
}

impl QueryAst {
    /// All tables this query brings into scope, FROM tables first, in order.
    pub fn scope_tables(&self) -> impl Iterator<Item = &TableRef> {
        self.from_tables.iter().chain(self.joins.iter().map(|j| &j.table))
    }

    /// Expressions of the query's own clauses, in canonical clause order:
    /// select items, join conditions, where, having, order keys.
    pub fn clause_exprs(&self) -> Vec<&Expr> {
        let mut out = Vec::new();
        for item in &self.select_items {
            if let SelectItem::Expr { expr, .. } = item {
                out.push(expr);
            }
        }
        for join in &self.joins {
            out.push(&join.on);
        }
        if let Some(w) = &self.where_clause {
            out.push(w);
        }
        if let Some(h) = &self.having_clause {
            out.push(h);
        }
        for key in &self.order_by {
            out.push(&key.expr);
        }
        out
    }

    /// Aggregate calls in projection, HAVING, and ORDER BY — the positions
    /// that define this query's own aggregation — without descending into
    /// subqueries.
    pub fn own_aggregates(&self) -> Vec<&Expr> {
        let mut out = Vec::new();
        for item in &self.select_items {
            if let SelectItem::Expr { expr, .. } = item {
                out.extend(expr.aggregates());
            }
        }
        if let Some(h) = &self.having_clause {
            out.extend(h.aggregates());
        }
        for key in &self.order_by {
            out.extend(key.expr.aggregates());
        }
        out
    }
}

/// Enumerate every subquery reachable from `ast` in document order:
/// clause order within a query, expression order within a clause, and each
/// subquery before its own nested subqueries.
pub fn enumerate_subqueries(ast: &QueryAst) -> Vec<&QueryAst> {
    fn visit<'a>(query: &'a QueryAst, out: &mut Vec<&'a QueryAst>) {
        for expr in query.clause_exprs() {
            for sub in expr.subqueries() {
                out.push(sub);
                visit(sub, out);
            }
        }
    }
    let mut out = Vec::new();
    visit(ast, &mut out);
    out
}
