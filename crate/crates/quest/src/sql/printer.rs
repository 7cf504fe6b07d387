//! Canonical query printing.
//!
//! The canonical form uses uppercase keywords, single spaces, explicit ASC /
//! DESC, and parentheses only where required to preserve structure. Printing
//! then reparsing yields a structurally identical AST, which makes the
//! canonical form a stable key for corpus-level deduplication and goldens.

use std::fmt::Write;

use super::ast::*;

/// Render a query in canonical form.
pub fn print_query(ast: &QueryAst) -> String {
    let mut out = String::new();
    write_query(&mut out, ast);
    out
}

/// Render one expression in canonical form.
pub fn print_expr(expr: &Expr) -> String {
    let mut out = String::new();
    write_expr(&mut out, expr, 0);
    out
}

fn write_query(out: &mut String, ast: &QueryAst) {
    out.push_str("SELECT ");
    if ast.distinct {
        out.push_str("DISTINCT ");
    }
    for (i, item) in ast.select_items.iter().enumerate() {
        if i > 0 {
            out.push_str(", ");
        }
        match item {
            SelectItem::Star => out.push('*'),
            SelectItem::Expr { expr, alias } => {
                write_expr(out, expr, 0);
                if let Some(alias) = alias {
                    write!(out, " AS {alias}").expect("write to string");
                }
            }
        }
    }

    out.push_str(" FROM ");
    for (i, table) in ast.from_tables.iter().enumerate() {
        if i > 0 {
            out.push_str(", ");
        }
        write_table(out, table);
    }
    for join in &ast.joins {
        out.push_str(" JOIN ");
        write_table(out, &join.table);
        out.push_str(" ON ");
        write_expr(out, &join.on, 0);
    }

    if let Some(where_clause) = &ast.where_clause {
        out.push_str(" WHERE ");
        write_expr(out, where_clause, 0);
    }

    if !ast.group_by.is_empty() {
        out.push_str(" GROUP BY ");
        for (i, column) in ast.group_by.iter().enumerate() {
            if i > 0 {
                out.push_str(", ");
            }
            write_column(out, column);
        }
    }

    if let Some(having) = &ast.having_clause {
        out.push_str(" HAVING ");
        write_expr(out, having, 0);
    }

    if !ast.order_by.is_empty() {
        out.push_str(" ORDER BY ");
        for (i, key) in ast.order_by.iter().enumerate() {
            if i > 0 {
                out.push_str(", ");
            }
            write_expr(out, &key.expr, 0);
            out.push(' ');
            out.push_str(key.direction.keyword());
        }
    }

    if let Some(limit) = ast.limit {
        write!(out, " LIMIT {limit}").expect("write to string");
    }
}

fn write_table(out: &mut String, table: &TableRef) {
    out.push_str(&table.name);
    if let Some(alias) = &table.alias {
        write!(out, " AS {alias}").expect("write to string");
    }
}

fn write_column(out: &mut String, column: &ColumnRef) {
    if let Some(qualifier) = &column.qualifier {
        out.push_str(qualifier);
        out.push('.');
    }
    out.push_str(&column.name);
}

/// Binding strength used to decide parenthesization. Higher binds tighter.
fn precedence(expr: &Expr) -> u8 {
    match expr {
        Expr::Or(_, _) => 1,
        Expr::And(_, _) => 2,
        Expr::Not(_) => 3,
        Expr::Compare { .. }
        | Expr::Between { .. }
        | Expr::InList { .. }
        | Expr::InSubquery { .. }
        | Expr::Like { .. }
        | Expr::IsNull { .. } => 4,
        Expr::Binary { op: BinaryOp::Add | BinaryOp::Sub, .. } => 5,
        Expr::Binary { op: BinaryOp::Mul | BinaryOp::Div, .. } => 6,
        Expr::Column(_)
        | Expr::Literal(_)
        | Expr::Aggregate { .. }
        | Expr::Subquery(_)
        | Expr::Binding(_) => 10,
    }
}

/// Write `expr`, parenthesizing when its precedence is below `min_prec`.
///
/// Left children of left-associative operators print at the operator's own
/// level; right children print one level tighter so that, e.g.,
/// `Or(a, Or(b, c))` renders as `a OR (b OR c)` and reparses to the same tree.
fn write_expr(out: &mut String, expr: &Expr, min_prec: u8) {
    let prec = precedence(expr);
    let parens = prec < min_prec;
    if parens {
        out.push('(');
    }
    match expr {
        Expr::Column(column) => write_column(out, column),
        Expr::Literal(literal) => write_literal(out, literal),
        Expr::Binary { op, left, right } => {
            write_expr(out, left, prec);
            write!(out, " {} ", op.symbol()).expect("write to string");
            write_expr(out, right, prec + 1);
        }
        Expr::Compare { op, left, right } => {
            write_expr(out, left, 5);
            write!(out, " {} ", op.symbol()).expect("write to string");
            write_expr(out, right, 5);
        }
        Expr::Between { expr, low, high, negated } => {
            write_expr(out, expr, 5);
            out.push_str(if *negated { " NOT BETWEEN " } else { " BETWEEN " });
            write_expr(out, low, 5);
            out.push_str(" AND ");
            write_expr(out, high, 5);
        }
        Expr::InList { expr, list, negated } => {
            write_expr(out, expr, 5);
            out.push_str(if *negated { " NOT IN (" } else { " IN (" });
            for (i, item) in list.iter().enumerate() {
                if i > 0 {
                    out.push_str(", ");
                }
                write_expr(out, item, 0);
            }
            out.push(')');
        }
        Expr::InSubquery { expr, subquery, negated } => {
            write_expr(out, expr, 5);
            out.push_str(if *negated { " NOT IN (" } else { " IN (" });
            write_query(out, subquery);
            out.push(')');
        }
        Expr::Like { expr, pattern, negated } => {
            write_expr(out, expr, 5);
            out.push_str(if *negated { " NOT LIKE " } else { " LIKE " });
            write_expr(out, pattern, 5);
        }
        Expr::IsNull { expr, negated } => {
            write_expr(out, expr, 5);
            out.push_str(if *negated { " IS NOT NULL" } else { " IS NULL" });
        }
        Expr::Not(inner) => {
            out.push_str("NOT ");
            write_expr(out, inner, 3);
        }
        Expr::And(left, right) => {
            write_expr(out, left, 2);
            out.push_str(" AND ");
            write_expr(out, right, 3);
        }
        Expr::Or(left, right) => {
            write_expr(out, left, 1);
            out.push_str(" OR ");
            write_expr(out, right, 2);
        }
        Expr::Aggregate { func, distinct, arg } => {
            out.push_str(&func.name().to_ascii_uppercase());
            out.push('(');
            if *distinct {
                out.push_str("DISTINCT ");
            }
            match arg {
                AggArg::Star => out.push('*'),
                AggArg::Expr(e) => write_expr(out, e, 0),
            }
            out.push(')');
        }
        Expr::Subquery(subquery) => {
            out.push('(');
            write_query(out, subquery);
            out.push(')');
        }
        Expr::Binding(name) => {
            out.push('@');
            out.push_str(name);
        }
    }
    if parens {
        out.push(')');
    }
}

fn write_literal(out: &mut String, literal: &Literal) {
    match literal {
        Literal::String(s) => {
            out.push('\'');
            out.push_str(&s.replace('\'', "''"));
            out.push('\'');
        }
        Literal::Integer(n) => write!(out, "{n}").expect("write to string"),
        // {:?} keeps a decimal point (or exponent) so the value reparses as
        // a float, and it round-trips f64 values exactly.
        Literal::Float(x) => write!(out, "{x:?}").expect("write to string"),
    }
}
