//! Recursive-descent parser for the supported SQL subset.
//!
//! The grammar covers single-statement SELECT queries: projection (with
//! DISTINCT and aliases), FROM with comma-separated tables and inner JOINs,
//! WHERE, GROUP BY, HAVING, ORDER BY, and LIMIT. Expressions include
//! comparisons, BETWEEN / IN / LIKE / IS NULL (each with NOT forms), boolean
//! combinators, `+ - * /` arithmetic, aggregate calls, and scalar or IN
//! subqueries. Recognized SQL outside the subset — UNION, CTEs, window
//! functions, outer joins, DML/DDL statements — is reported as an
//! unsupported feature, distinct from a parse error.

use super::ast::*;
use super::error::SqlError;
use super::lexer::tokenize;
use super::token::{Position, Token, TokenKind};

/// Parse one SELECT statement.
pub fn parse_query(text: &str) -> Result<QueryAst, SqlError> {
    let tokens = tokenize(text)?;
    let end = Position {
        offset: text.len(),
        line: text.lines().count().max(1) as u32,
        column: text.lines().last().map(|l| l.chars().count() + 1).unwrap_or(1) as u32,
    };
    let mut parser = Parser { tokens: &tokens, pos: 0, end, agg_depth: 0 };

    for statement in ["INSERT", "UPDATE", "DELETE", "CREATE", "DROP", "ALTER", "VALUES"] {
        if parser.sees_keyword(statement) {
            return Err(parser.unsupported(format!("{statement} statement")));
        }
    }
    if parser.sees_keyword("WITH") {
        return Err(parser.unsupported("WITH (common table expression)"));
    }

    let ast = parser.parse_select()?;
    if let Some(token) = parser.peek() {
        return Err(SqlError::Parse {
            position: token.position,
            expected: vec!["end of input".to_string()],
            found: format!("{:?}", token.text),
        });
    }
    Ok(ast)
}

struct Parser<'a> {
    tokens: &'a [Token],
    pos: usize,
    end: Position,
    /// Depth of aggregate-call arguments currently being parsed, used to
    /// reject nested aggregates within one query scope.
    agg_depth: u32,
}

impl<'a> Parser<'a> {
    fn peek(&self) -> Option<&'a Token> {
        self.tokens.get(self.pos)
    }

    fn peek_at(&self, ahead: usize) -> Option<&'a Token> {
        self.tokens.get(self.pos + ahead)
    }

    fn bump(&mut self) -> Option<&'a Token> {
        let token = self.tokens.get(self.pos);
        if token.is_some() {
            self.pos += 1;
        }
        token
    }

    fn here(&self) -> Position {
        self.peek().map(|t| t.position).unwrap_or(self.end)
    }

    fn found(&self) -> String {
        self.peek().map(|t| format!("{:?}", t.text)).unwrap_or_else(|| "end of input".to_string())
    }

    fn error(&self, expected: &[&str]) -> SqlError {
        SqlError::Parse {
            position: self.here(),
            expected: expected.iter().map(|s| s.to_string()).collect(),
            found: self.found(),
        }
    }

    fn unsupported(&self, feature: impl Into<String>) -> SqlError {
        SqlError::Unsupported { feature: feature.into(), position: self.here() }
    }

    fn sees_keyword(&self, word: &str) -> bool {
        self.peek().is_some_and(|t| t.is_keyword(word))
    }

    fn take_keyword(&mut self, word: &str) -> bool {
        if self.sees_keyword(word) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect_keyword(&mut self, word: &str) -> Result<(), SqlError> {
        if self.take_keyword(word) {
            Ok(())
        } else {
            Err(self.error(&[word]))
        }
    }

    fn take_punct(&mut self, ch: char) -> bool {
        if self.peek().is_some_and(|t| t.is_punct(ch)) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect_punct(&mut self, ch: char) -> Result<(), SqlError> {
        if self.take_punct(ch) {
            Ok(())
        } else {
            Err(self.error(&[&ch.to_string()]))
        }
    }

    fn take_operator(&mut self, op: &str) -> bool {
        if self.peek().is_some_and(|t| t.is_operator(op)) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn take_identifier(&mut self) -> Option<String> {
        if self.peek().is_some_and(|t| t.kind == TokenKind::Identifier) {
            Some(self.bump().expect("peeked").text.clone())
        } else {
            None
        }
    }

    fn expect_identifier(&mut self, what: &str) -> Result<String, SqlError> {
        self.take_identifier().ok_or_else(|| self.error(&[what]))
    }

    fn parse_select(&mut self) -> Result<QueryAst, SqlError> {
        self.expect_keyword("SELECT")?;
        let distinct = self.take_keyword("DISTINCT");
        let select_items = self.parse_select_items()?;

        self.expect_keyword("FROM")?;
        let mut from_tables = vec![self.parse_table_ref()?];
        while self.take_punct(',') {
            from_tables.push(self.parse_table_ref()?);
        }

        let mut joins = Vec::new();
        loop {
            if self.sees_keyword("LEFT") || self.sees_keyword("RIGHT") || self.sees_keyword("FULL")
            {
                let kind = self.peek().expect("peeked").text.to_ascii_uppercase();
                return Err(self.unsupported(format!("{kind} JOIN")));
            }
            if self.sees_keyword("CROSS") {
                return Err(self.unsupported("CROSS JOIN"));
            }
            let inner = self.take_keyword("INNER");
            if self.take_keyword("JOIN") {
                let table = self.parse_table_ref()?;
                self.expect_keyword("ON")?;
                let on = self.parse_expr()?;
                joins.push(Join { table, on });
            } else if inner {
                return Err(self.error(&["JOIN"]));
            } else {
                break;
            }
        }

        let where_clause = if self.take_keyword("WHERE") { Some(self.parse_expr()?) } else { None };

        let mut group_by = Vec::new();
        if self.take_keyword("GROUP") {
            self.expect_keyword("BY")?;
            group_by.push(self.parse_column_ref()?);
            while self.take_punct(',') {
                group_by.push(self.parse_column_ref()?);
            }
        }

        let having_clause =
            if self.take_keyword("HAVING") { Some(self.parse_expr()?) } else { None };

        let mut order_by = Vec::new();
        if self.take_keyword("ORDER") {
            self.expect_keyword("BY")?;
            loop {
                let expr = self.parse_expr()?;
                let direction = if self.take_keyword("DESC") {
                    OrderDirection::Desc
                } else {
                    self.take_keyword("ASC");
                    OrderDirection::Asc
                };
                order_by.push(OrderKey { expr, direction });
                if !self.take_punct(',') {
                    break;
                }
            }
        }

        let limit = if self.take_keyword("LIMIT") { Some(self.parse_limit()?) } else { None };

        for set_op in ["UNION", "INTERSECT", "EXCEPT"] {
            if self.sees_keyword(set_op) {
                return Err(self.unsupported(set_op));
            }
        }

        let ast = QueryAst {
            distinct,
            select_items,
            from_tables,
            joins,
            where_clause,
            group_by,
            having_clause,
            order_by,
            limit,
        };
        self.check_alias_uniqueness(&ast)?;
        Ok(ast)
    }

    fn check_alias_uniqueness(&self, ast: &QueryAst) -> Result<(), SqlError> {
        let mut seen: Vec<String> = Vec::new();
        for table in ast.scope_tables() {
            let name = table.effective_name().to_ascii_lowercase();
            if seen.contains(&name) {
                return Err(SqlError::Parse {
                    position: self.here(),
                    expected: vec!["unique table name or alias".to_string()],
                    found: format!("{:?}", table.effective_name()),
                });
            }
            seen.push(name);
        }
        Ok(())
    }

    fn parse_select_items(&mut self) -> Result<Vec<SelectItem>, SqlError> {
        if self.peek().is_some_and(|t| t.kind == TokenKind::Star) {
            self.bump();
            return Ok(vec![SelectItem::Star]);
        }
        let mut items = Vec::new();
        loop {
            let expr = self.parse_expr()?;
            let alias = if self.take_keyword("AS") {
                Some(self.expect_identifier("alias")?)
            } else {
                self.take_identifier()
            };
            items.push(SelectItem::Expr { expr, alias });
            if !self.take_punct(',') {
                break;
            }
        }
        Ok(items)
    }

    fn parse_table_ref(&mut self) -> Result<TableRef, SqlError> {
        let name = self.expect_identifier("table name")?;
        let alias = if self.take_keyword("AS") {
            Some(self.expect_identifier("alias")?)
        } else {
            self.take_identifier()
        };
        Ok(TableRef { name, alias })
    }

    fn parse_column_ref(&mut self) -> Result<ColumnRef, SqlError> {
        let first = self.expect_identifier("column name")?;
        if self.take_punct('.') {
            let name = self.expect_identifier("column name")?;
            Ok(ColumnRef { qualifier: Some(first), name })
        } else {
            Ok(ColumnRef { qualifier: None, name: first })
        }
    }

    fn parse_limit(&mut self) -> Result<u64, SqlError> {
        let token = match self.peek() {
            Some(t) if t.kind == TokenKind::NumericLiteral && !t.text.contains('.') => {
                self.bump().expect("peeked")
            }
            _ => return Err(self.error(&["non-negative integer"])),
        };
        token.text.parse::<u64>().map_err(|_| SqlError::Parse {
            position: token.position,
            expected: vec!["non-negative integer".to_string()],
            found: format!("{:?}", token.text),
        })
    }

    fn parse_expr(&mut self) -> Result<Expr, SqlError> {
        self.parse_or()
    }

    fn parse_or(&mut self) -> Result<Expr, SqlError> {
        let mut left = self.parse_and()?;
        while self.take_keyword("OR") {
            let right = self.parse_and()?;
            left = Expr::Or(Box::new(left), Box::new(right));
        }
        Ok(left)
    }

    fn parse_and(&mut self) -> Result<Expr, SqlError> {
        let mut left = self.parse_not()?;
        while self.take_keyword("AND") {
            let right = self.parse_not()?;
            left = Expr::And(Box::new(left), Box::new(right));
        }
        Ok(left)
    }

    fn parse_not(&mut self) -> Result<Expr, SqlError> {
        if self.take_keyword("NOT") {
            let inner = self.parse_not()?;
            Ok(Expr::Not(Box::new(inner)))
        } else {
            self.parse_predicate()
        }
    }

    fn parse_predicate(&mut self) -> Result<Expr, SqlError> {
        let operand = self.parse_additive()?;

        for (op_text, op) in [
            ("=", CompareOp::Eq),
            ("<>", CompareOp::NotEq),
            ("!=", CompareOp::NotEq),
            ("<=", CompareOp::LtEq),
            (">=", CompareOp::GtEq),
            ("<", CompareOp::Lt),
            (">", CompareOp::Gt),
        ] {
            if self.take_operator(op_text) {
                let right = self.parse_additive()?;
                return Ok(Expr::Compare { op, left: Box::new(operand), right: Box::new(right) });
            }
        }

        // `x NOT BETWEEN/IN/LIKE ...` — a NOT here belongs to the predicate,
        // not the boolean combinator level.
        let negated = if self.sees_keyword("NOT")
            && self.peek_at(1).is_some_and(|t| {
                t.is_keyword("BETWEEN") || t.is_keyword("IN") || t.is_keyword("LIKE")
            }) {
            self.bump();
            true
        } else {
            false
        };

        if self.take_keyword("BETWEEN") {
            let low = self.parse_additive()?;
            self.expect_keyword("AND")?;
            let high = self.parse_additive()?;
            return Ok(Expr::Between {
                expr: Box::new(operand),
                low: Box::new(low),
                high: Box::new(high),
                negated,
            });
        }

        if self.take_keyword("IN") {
            self.expect_punct('(')?;
            if self.sees_keyword("SELECT") {
                let subquery = self.parse_subquery()?;
                self.expect_punct(')')?;
                return Ok(Expr::InSubquery {
                    expr: Box::new(operand),
                    subquery: Box::new(subquery),
                    negated,
                });
            }
            let mut list = vec![self.parse_additive()?];
            while self.take_punct(',') {
                list.push(self.parse_additive()?);
            }
            self.expect_punct(')')?;
            return Ok(Expr::InList { expr: Box::new(operand), list, negated });
        }

        if self.take_keyword("LIKE") {
            let pattern = self.parse_additive()?;
            return Ok(Expr::Like {
                expr: Box::new(operand),
                pattern: Box::new(pattern),
                negated,
            });
        }

        if negated {
            return Err(self.error(&["BETWEEN", "IN", "LIKE"]));
        }

        if self.take_keyword("IS") {
            let negated = self.take_keyword("NOT");
            self.expect_keyword("NULL")?;
            return Ok(Expr::IsNull { expr: Box::new(operand), negated });
        }

        Ok(operand)
    }

    fn parse_additive(&mut self) -> Result<Expr, SqlError> {
        let mut left = self.parse_multiplicative()?;
        loop {
            let op = if self.take_operator("+") {
                BinaryOp::Add
            } else if self.take_operator("-") {
                BinaryOp::Sub
            } else {
                break;
            };
            let right = self.parse_multiplicative()?;
            left = Expr::Binary { op, left: Box::new(left), right: Box::new(right) };
        }
        Ok(left)
    }

    fn parse_multiplicative(&mut self) -> Result<Expr, SqlError> {
        let mut left = self.parse_unary()?;
        loop {
            let op = if self.peek().is_some_and(|t| t.kind == TokenKind::Star) {
                self.bump();
                BinaryOp::Mul
            } else if self.take_operator("/") {
                BinaryOp::Div
            } else {
                break;
            };
            let right = self.parse_unary()?;
            left = Expr::Binary { op, left: Box::new(left), right: Box::new(right) };
        }
        Ok(left)
    }

    fn parse_unary(&mut self) -> Result<Expr, SqlError> {
        // Unary minus folds into a numeric literal; the subset has no
        // general negation operator.
        if self.peek().is_some_and(|t| t.is_operator("-"))
            && self.peek_at(1).is_some_and(|t| t.kind == TokenKind::NumericLiteral)
        {
            self.bump();
            let token = self.bump().expect("peeked");
            return parse_number(token, true);
        }
        self.parse_primary()
    }

    fn parse_primary(&mut self) -> Result<Expr, SqlError> {
        let Some(token) = self.peek() else {
            return Err(self.error(&["expression"]));
        };

        match token.kind {
            TokenKind::NumericLiteral => {
                let token = self.bump().expect("peeked");
                parse_number(token, false)
            }
            TokenKind::StringLiteral => {
                let token = self.bump().expect("peeked");
                Ok(Expr::Literal(Literal::String(unquote(&token.text))))
            }
            TokenKind::Identifier => {
                if self.peek_at(1).is_some_and(|t| t.is_punct('(')) {
                    self.parse_call()
                } else {
                    let column = self.parse_primary_column()?;
                    Ok(Expr::Column(column))
                }
            }
            TokenKind::Punctuation if token.is_punct('(') => {
                self.bump();
                if self.sees_keyword("SELECT") {
                    let subquery = self.parse_subquery()?;
                    self.expect_punct(')')?;
                    Ok(Expr::Subquery(Box::new(subquery)))
                } else {
                    let expr = self.parse_expr()?;
                    self.expect_punct(')')?;
                    Ok(expr)
                }
            }
            TokenKind::Keyword if token.is_keyword("EXISTS") => Err(self.unsupported("EXISTS")),
            _ => Err(self.error(&["expression"])),
        }
    }

    fn parse_primary_column(&mut self) -> Result<ColumnRef, SqlError> {
        let first = self.expect_identifier("column name")?;
        if self.take_punct('.') {
            if self.peek().is_some_and(|t| t.kind == TokenKind::Star) {
                return Err(self.unsupported("qualified star"));
            }
            let name = self.expect_identifier("column name")?;
            Ok(ColumnRef { qualifier: Some(first), name })
        } else {
            Ok(ColumnRef { qualifier: None, name: first })
        }
    }

    fn parse_call(&mut self) -> Result<Expr, SqlError> {
        let name_token = self.bump().expect("identifier");
        let call_position = name_token.position;
        let func = AggregateFunc::from_name(&name_token.text);
        self.expect_punct('(')?;

        if self.agg_depth > 0 {
            return Err(SqlError::Parse {
                position: call_position,
                expected: vec!["non-aggregate argument".to_string()],
                found: format!("nested call {:?}", name_token.text),
            });
        }

        let distinct = self.take_keyword("DISTINCT");
        let arg = if self.peek().is_some_and(|t| t.kind == TokenKind::Star) {
            if func != AggregateFunc::Count {
                return Err(SqlError::Parse {
                    position: self.here(),
                    expected: vec!["expression".to_string()],
                    found: "\"*\"".to_string(),
                });
            }
            self.bump();
            AggArg::Star
        } else {
            self.agg_depth += 1;
            let expr = self.parse_additive();
            self.agg_depth -= 1;
            AggArg::Expr(Box::new(expr?))
        };
        self.expect_punct(')')?;

        if self.sees_keyword("OVER") {
            return Err(self.unsupported("window function"));
        }

        Ok(Expr::Aggregate { func, distinct, arg })
    }

    fn parse_subquery(&mut self) -> Result<QueryAst, SqlError> {
        // A subquery is a fresh aggregate scope: its aggregates may appear
        // inside an outer aggregate's argument without "nesting".
        let saved = self.agg_depth;
        self.agg_depth = 0;
        let result = self.parse_select();
        self.agg_depth = saved;
        result
    }
}

fn parse_number(token: &Token, negate: bool) -> Result<Expr, SqlError> {
    let literal = if token.text.contains('.') {
        let value: f64 = token.text.parse().map_err(|_| SqlError::Parse {
            position: token.position,
            expected: vec!["numeric literal".to_string()],
            found: format!("{:?}", token.text),
        })?;
        Literal::Float(if negate { -value } else { value })
    } else {
        let value: i64 = token.text.parse().map_err(|_| SqlError::Parse {
            position: token.position,
            expected: vec!["numeric literal".to_string()],
            found: format!("{:?}", token.text),
        })?;
        Literal::Integer(if negate { -value } else { value })
    };
    Ok(Expr::Literal(literal))
}

fn unquote(text: &str) -> String {
    // Strip the surrounding quotes and collapse doubled quotes.
    let inner = &text[1..text.len() - 1];
    inner.replace("''", "'")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_a_simple_scan() {
        let ast = parse_query("SELECT * FROM flights").unwrap();
        assert_eq!(ast.select_items, vec![SelectItem::Star]);
        assert_eq!(ast.from_tables.len(), 1);
        assert_eq!(ast.from_tables[0].name, "flights");
        assert!(ast.where_clause.is_none());
    }

    #[test]
    fn parses_conjunctive_filters_left_associated() {
        let ast = parse_query(
            "SELECT * FROM flights WHERE origin_city = 'Boston' AND destination_city = 'New York' AND departure_time < 720",
        )
        .unwrap();
        let Some(Expr::And(left, right)) = ast.where_clause else {
            panic!("expected top-level AND");
        };
        assert!(matches!(*left, Expr::And(_, _)));
        assert!(matches!(*right, Expr::Compare { op: CompareOp::Lt, .. }));
    }

    #[test]
    fn parses_whitespace_and_casing_variants_to_the_same_ast() {
        let a = parse_query("SELECT * FROM flights WHERE fare < 100").unwrap();
        let b = parse_query("select *\n  from FLIGHTS\n where fare < 100").unwrap();
        // Table identifier casing is preserved, so compare the rest.
        assert_eq!(a.where_clause, b.where_clause);
        assert_eq!(a.select_items, b.select_items);
    }

    #[test]
    fn parses_subqueries_scalar_and_in() {
        let ast = parse_query(
            "SELECT * FROM flights WHERE arrival_time < (SELECT MAX(departure_time) FROM flights WHERE flight_id = 'AA100')",
        )
        .unwrap();
        let subs = enumerate_subqueries(&ast);
        assert_eq!(subs.len(), 1);
        assert!(subs[0].where_clause.is_some());

        let ast = parse_query(
            "SELECT * FROM flights WHERE flight_id IN (SELECT flight_id FROM flights WHERE fare < 100)",
        )
        .unwrap();
        assert!(matches!(
            ast.where_clause,
            Some(Expr::InSubquery { negated: false, .. })
        ));
    }

    #[test]
    fn parses_aggregates_and_grouping() {
        let ast = parse_query(
            "SELECT origin_city, COUNT(DISTINCT flight_id) FROM flights GROUP BY origin_city HAVING COUNT(*) > 2 ORDER BY COUNT(*) DESC LIMIT 3",
        )
        .unwrap();
        assert_eq!(ast.group_by.len(), 1);
        assert_eq!(ast.limit, Some(3));
        assert_eq!(ast.own_aggregates().len(), 3);
        let SelectItem::Expr { expr: Expr::Aggregate { func, distinct, .. }, .. } =
            &ast.select_items[1]
        else {
            panic!("expected aggregate item");
        };
        assert_eq!(*func, AggregateFunc::Count);
        assert!(distinct);
    }

    #[test]
    fn unknown_function_names_are_preserved_not_rejected() {
        let ast = parse_query("SELECT MEDIAN(fare) FROM flights WHERE fare > 0").unwrap();
        let SelectItem::Expr { expr: Expr::Aggregate { func, .. }, .. } = &ast.select_items[0]
        else {
            panic!("expected call item");
        };
        assert_eq!(*func, AggregateFunc::Other("MEDIAN".to_string()));
    }

    #[test]
    fn rejects_nested_aggregates_but_allows_subquery_aggregates_inside() {
        let err = parse_query("SELECT SUM(MAX(fare)) FROM flights").unwrap_err();
        assert!(matches!(err, SqlError::Parse { .. }));

        parse_query("SELECT SUM(fare + (SELECT MIN(fare) FROM flights WHERE fare > 0)) FROM flights WHERE fare > 0")
            .expect("subquery aggregates are a fresh scope");
    }

    #[test]
    fn star_argument_is_count_only() {
        assert!(parse_query("SELECT COUNT(*) FROM flights").is_ok());
        assert!(matches!(
            parse_query("SELECT SUM(*) FROM flights"),
            Err(SqlError::Parse { .. })
        ));
    }

    #[test]
    fn negated_predicate_forms() {
        let ast = parse_query(
            "SELECT * FROM flights WHERE fare NOT BETWEEN 1 AND 2 AND origin_city NOT IN ('a', 'b') AND airline NOT LIKE 'x%' AND fare IS NOT NULL",
        )
        .unwrap();
        let mut found = 0;
        let mut stack = vec![ast.where_clause.as_ref().unwrap()];
        while let Some(e) = stack.pop() {
            match e {
                Expr::And(l, r) => {
                    stack.push(l);
                    stack.push(r);
                }
                Expr::Between { negated, .. }
                | Expr::InList { negated, .. }
                | Expr::Like { negated, .. }
                | Expr::IsNull { negated, .. } => {
                    assert!(negated);
                    found += 1;
                }
                other => panic!("unexpected node {other:?}"),
            }
        }
        assert_eq!(found, 4);
    }

    #[test]
    fn unary_minus_folds_into_literals() {
        let ast = parse_query("SELECT fare - -45 FROM flights WHERE fare > -1.5").unwrap();
        let SelectItem::Expr { expr, .. } = &ast.select_items[0] else { panic!() };
        let Expr::Binary { op: BinaryOp::Sub, right, .. } = expr else { panic!("{expr:?}") };
        assert_eq!(**right, Expr::Literal(Literal::Integer(-45)));
        let Some(Expr::Compare { right, .. }) = &ast.where_clause else { panic!() };
        assert_eq!(**right, Expr::Literal(Literal::Float(-1.5)));
    }

    #[test]
    fn reports_unsupported_features_by_name() {
        let cases = [
            ("SELECT a FROM t UNION SELECT a FROM u", "UNION"),
            ("WITH x AS (SELECT 1) SELECT * FROM x", "WITH (common table expression)"),
            ("SELECT SUM(a) OVER () FROM t", "window function"),
            ("SELECT * FROM a LEFT JOIN b ON a.x = b.x", "LEFT JOIN"),
            ("SELECT * FROM a CROSS JOIN b", "CROSS JOIN"),
            ("INSERT INTO t VALUES (1)", "INSERT statement"),
            ("SELECT * FROM t WHERE EXISTS (SELECT 1 FROM u)", "EXISTS"),
            ("SELECT t.* FROM t", "qualified star"),
        ];
        for (sql, feature) in cases {
            match parse_query(sql) {
                Err(SqlError::Unsupported { feature: got, .. }) => {
                    assert_eq!(got, feature, "for {sql}")
                }
                other => panic!("expected unsupported feature for {sql}, got {other:?}"),
            }
        }
    }

    #[test]
    fn parse_errors_carry_positions_and_expectations() {
        let err = parse_query("SELECT FROM flights").unwrap_err();
        let SqlError::Parse { position, expected, .. } = err else { panic!("{err:?}") };
        assert_eq!(position.offset, 7);
        assert!(expected.contains(&"expression".to_string()));

        let err = parse_query("SELECT * FROM flights WHERE").unwrap_err();
        let SqlError::Parse { position, .. } = err else { panic!("{err:?}") };
        assert_eq!(position.offset, 27);
    }

    #[test]
    fn duplicate_table_aliases_are_rejected() {
        assert!(matches!(
            parse_query("SELECT * FROM flights, flights"),
            Err(SqlError::Parse { .. })
        ));
        assert!(matches!(
            parse_query("SELECT * FROM flights a JOIN flights A ON a.flight_id = A.flight_id"),
            Err(SqlError::Parse { .. })
        ));
        assert!(parse_query(
            "SELECT * FROM flights f1 JOIN flights f2 ON f1.flight_id = f2.flight_id"
        )
        .is_ok());
    }

    #[test]
    fn limit_must_be_a_nonnegative_integer() {
        assert!(matches!(
            parse_query("SELECT * FROM t LIMIT 1.5"),
            Err(SqlError::Parse { .. })
        ));
        assert!(matches!(
            parse_query("SELECT * FROM t LIMIT x"),
            Err(SqlError::Parse { .. })
        ));
        assert_eq!(parse_query("SELECT * FROM t LIMIT 0").unwrap().limit, Some(0));
    }

    #[test]
    fn implicit_join_commas_are_accepted() {
        let ast = parse_query(
            "SELECT f1.fare FROM flights f1, flights f2 WHERE f1.flight_id = f2.flight_id",
        )
        .unwrap();
        assert_eq!(ast.from_tables.len(), 2);
        assert!(ast.joins.is_empty());
    }

    #[test]
    fn trailing_tokens_are_a_parse_error() {
        assert!(matches!(
            parse_query("SELECT * FROM flights 42"),
            Err(SqlError::Parse { .. })
        ));
    }
}
