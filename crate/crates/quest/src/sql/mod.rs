//! SQL frontend: lexer, parser, canonical printer, and predicate atomizer
//! for the supported SELECT subset.

mod ast;
mod atomize;
mod error;
mod lexer;
mod parser;
mod printer;
mod token;

pub use ast::{
    enumerate_subqueries, AggArg, AggregateFunc, BinaryOp, ColumnRef, CompareOp, Expr, Join,
    Literal, OrderDirection, OrderKey, QueryAst, SelectItem, TableRef,
};
pub use atomize::{
    atomize_predicates, atomize_with_outer, reconjoin, AtomicPredicate, Atomization,
    PredicateSource, PredicateTree,
};
pub use error::SqlError;
pub use lexer::tokenize;
pub use parser::parse_query;
pub use printer::{print_expr, print_query};
pub use token::{Position, Token, TokenKind};
