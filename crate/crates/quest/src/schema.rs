//! Schema catalogs with per-column semantic role annotations.
//!
//! A catalog names the tables and columns a query corpus runs against and
//! annotates every column with one or more W5H dimensions (WHO, WHAT, WHERE,
//! WHEN, WHY, HOW). Catalogs are loaded from a small JSON format
//! (`"format": "quest-schema/1"`); columns without explicit roles receive
//! conservative inferred ones. The [`Scope`] type resolves (possibly
//! qualified) column references against a catalog for one query, including
//! nested subquery scopes.

use std::fmt;
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::sql::QueryAst;

/// The six W5H dimensions a filter constraint can engage.
///
/// Order is significant: every serialized list, table column, and iterator
/// follows WHO, WHAT, WHERE, WHEN, WHY, HOW.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Dimension {
    Who,
    What,
    Where,
    When,
    Why,
    How,
}

impl Dimension {
    /// All dimensions in canonical order.
    pub const ALL: [Dimension; 6] = [
        Dimension::Who,
        Dimension::What,
        Dimension::Where,
        Dimension::When,
        Dimension::Why,
        Dimension::How,
    ];

    /// Lowercase name as used in catalogs, lexicons, and JSON documents.
    pub fn name(self) -> &'static str {
        match self {
            Dimension::Who => "who",
            Dimension::What => "what",
            Dimension::Where => "where",
            Dimension::When => "when",
            Dimension::Why => "why",
            Dimension::How => "how",
        }
    }

    /// Position in [`Dimension::ALL`].
    pub fn index(self) -> usize {
        match self {
            Dimension::Who => 0,
            Dimension::What => 1,
            Dimension::Where => 2,
            Dimension::When => 3,
            Dimension::Why => 4,
            Dimension::How => 5,
        }
    }

    /// Parse a dimension name, case-insensitively.
    pub fn parse(name: &str) -> Option<Dimension> {
        match name.to_ascii_lowercase().as_str() {
            "who" => Some(Dimension::Who),
            "what" => Some(Dimension::What),
            "where" => Some(Dimension::Where),
            "when" => Some(Dimension::When),
            "why" => Some(Dimension::Why),
            "how" => Some(Dimension::How),
            _ => None,
        }
    }
}

impl fmt::Display for Dimension {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        // Display is the headline form used in tables and reports.
        f.write_str(match self {
            Dimension::Who => "WHO",
            Dimension::What => "WHAT",
            Dimension::Where => "WHERE",
            Dimension::When => "WHEN",
            Dimension::Why => "WHY",
            Dimension::How => "HOW",
        })
    }
}

/// A set of dimensions, iterated in canonical order.
#[derive(Clone, Copy, PartialEq, Eq, Default)]
pub struct DimensionSet(u8);

impl DimensionSet {
    pub const EMPTY: DimensionSet = DimensionSet(0);

    pub fn new() -> DimensionSet {
        DimensionSet::EMPTY
    }

    pub fn insert(&mut self, dim: Dimension) {
        self.0 |= 1 << dim.index();
    }

    pub fn with(mut self, dim: Dimension) -> DimensionSet {
        self.insert(dim);
        self
    }

    pub fn contains(&self, dim: Dimension) -> bool {
        self.0 & (1 << dim.index()) != 0
    }

    pub fn union(&self, other: DimensionSet) -> DimensionSet {
        DimensionSet(self.0 | other.0)
    }

    pub fn is_empty(&self) -> bool {
        self.0 == 0
    }

    pub fn len(&self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn iter(&self) -> impl Iterator<Item = Dimension> + '_ {
        Dimension::ALL.into_iter().filter(|d| self.contains(*d))
    }
}

impl FromIterator<Dimension> for DimensionSet {
    fn from_iter<T: IntoIterator<Item = Dimension>>(iter: T) -> Self {
        let mut set = DimensionSet::EMPTY;
        for d in iter {
            set.insert(d);
        }
        set
    }
}

impl fmt::Debug for DimensionSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter()).finish()
    }
}

impl Serialize for DimensionSet {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_seq(self.iter())
    }
}

impl<'de> Deserialize<'de> for DimensionSet {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let dims = Vec::<Dimension>::deserialize(deserializer)?;
        Ok(dims.into_iter().collect())
    }
}

/// Column data types understood by the analyzer.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DataType {
    Integer,
    Real,
    Text,
    Date,
    Time,
    Timestamp,
    Boolean,
}

impl DataType {
    pub fn parse(name: &str) -> Option<DataType> {
        match name.to_ascii_lowercase().as_str() {
            "integer" | "int" => Some(DataType::Integer),
            "real" | "float" | "double" => Some(DataType::Real),
            "text" | "string" | "varchar" => Some(DataType::Text),
            "date" => Some(DataType::Date),
            "time" => Some(DataType::Time),
            "timestamp" | "datetime" => Some(DataType::Timestamp),
            "boolean" | "bool" => Some(DataType::Boolean),
            _ => None,
        }
    }

    /// True for types that support arithmetic aggregation (`sum`, `avg`).
    pub fn is_numeric(self) -> bool {
        matches!(self, DataType::Integer | DataType::Real)
    }

    pub fn is_temporal(self) -> bool {
        matches!(self, DataType::Date | DataType::Time | DataType::Timestamp)
    }
}

/// A fully-qualified column target, e.g. the destination of a foreign key.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ColumnTarget {
    pub table: String,
    pub column: String,
}

impl fmt::Display for ColumnTarget {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}.{}", self.table, self.column)
    }
}

/// One column of a catalog table.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ColumnInfo {
    pub name: String,
    pub data_type: DataType,
    /// Dimensional roles; never empty after loading (explicit or inferred).
    pub roles: DimensionSet,
    pub is_primary_key: bool,
    /// Foreign-key target, if this column references another table's column.
    pub references: Option<ColumnTarget>,
}

impl ColumnInfo {
    /// True if this column participates in entity identity (primary key or
    /// foreign key).
    pub fn is_key(&self) -> bool {
        self.is_primary_key || self.references.is_some()
    }
}

/// One table of a catalog: name plus ordered columns.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TableInfo {
    pub name: String,
    pub columns: Vec<ColumnInfo>,
}

impl TableInfo {
    pub fn column(&self, name: &str) -> Option<&ColumnInfo> {
        self.columns.iter().find(|c| c.name.eq_ignore_ascii_case(name))
    }
}

/// An annotated schema catalog for one database.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SchemaCatalog {
    pub name: String,
    pub tables: Vec<TableInfo>,
}

impl SchemaCatalog {
    pub fn table(&self, name: &str) -> Option<&TableInfo> {
        self.tables.iter().find(|t| t.name.eq_ignore_ascii_case(name))
    }
}

/// Errors raised while loading or validating a catalog file.
#[derive(Debug, Error)]
pub enum SchemaError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("format error at {location}: {message}")]
    Format { location: String, message: String },
    #[error("validation error: {0}")]
    Validation(#[from] ValidationError),
}

/// Referential problems in an otherwise well-formed catalog document.
#[derive(Debug, Error, PartialEq, Eq)]
pub enum ValidationError {
    #[error("dangling reference {target} from {source_column}")]
    DanglingReference { source_column: String, target: String },
    #[error("duplicate name {0}")]
    DuplicateName(String),
    #[error("catalog declares no tables")]
    NoTables,
    #[error("table {0} declares no columns")]
    EmptyTable(String),
}

/// Options controlling catalog loading strictness.
#[derive(Debug, Clone, Copy, Default)]
pub struct LoadOptions {
    /// In lax mode unknown keys in the document are ignored instead of
    /// rejected.
    pub lax: bool,
}

/// Load a catalog from a JSON file, strictly.
pub fn load_catalog(path: impl AsRef<Path>) -> Result<SchemaCatalog, SchemaError> {
    load_catalog_with(path, LoadOptions::default())
}

/// Load a catalog from a JSON file with explicit strictness options.
pub fn load_catalog_with(
    path: impl AsRef<Path>,
    options: LoadOptions,
) -> Result<SchemaCatalog, SchemaError> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|source| SchemaError::Io {
        path: path.display().to_string(),
        source,
    })?;
    parse_catalog(&text, options)
}

/// Parse a catalog document from its JSON text.
pub fn parse_catalog(text: &str, options: LoadOptions) -> Result<SchemaCatalog, SchemaError> {
    let value: serde_json::Value = serde_json::from_str(text).map_err(|e| SchemaError::Format {
        location: format!("line {}", e.line()),
        message: e.to_string(),
    })?;
    let root = as_object(&value, "$")?;
    if !options.lax {
        reject_unknown_keys(root, "$", &["format", "name", "tables"])?;
    }

    let format = string_field(root, "$", "format")?;
    if format != "quest-schema/1" {
        return Err(SchemaError::Format {
            location: "$.format".to_string(),
            message: format!("unsupported format {format:?}, expected \"quest-schema/1\""),
        });
    }
    let name = string_field(root, "$", "name")?;

    let tables_value = root.get("tables").ok_or_else(|| SchemaError::Format {
        location: "$.tables".to_string(),
        message: "missing required key \"tables\"".to_string(),
    })?;
    let tables_map = as_object(tables_value, "$.tables")?;
    if tables_map.is_empty() {
        return Err(ValidationError::NoTables.into());
    }

    let mut tables = Vec::new();
    for (table_name, columns_value) in tables_map {
        let location = format!("tables.{table_name}");
        let columns_list = columns_value.as_array().ok_or_else(|| SchemaError::Format {
            location: location.clone(),
            message: "expected an array of column objects".to_string(),
        })?;
        if columns_list.is_empty() {
            return Err(ValidationError::EmptyTable(table_name.clone()).into());
        }
        let mut columns = Vec::new();
        for (i, column_value) in columns_list.iter().enumerate() {
            let col_location = format!("{location}[{i}]");
            columns.push(parse_column(column_value, &col_location, options)?);
        }
        tables.push(TableInfo { name: table_name.clone(), columns });
    }

    let catalog = SchemaCatalog { name, tables };
    validate_catalog(&catalog)?;
    Ok(catalog)
}

fn parse_column(
    value: &serde_json::Value,
    location: &str,
    options: LoadOptions,
) -> Result<ColumnInfo, SchemaError> {
    let obj = as_object(value, location)?;
    if !options.lax {
        reject_unknown_keys(obj, location, &["name", "type", "roles", "primary_key", "references"])?;
    }
    let name = string_field(obj, location, "name")?;
    let type_name = string_field(obj, location, "type")?;
    let data_type = DataType::parse(&type_name).ok_or_else(|| SchemaError::Format {
        location: format!("{location}.type"),
        message: format!("unknown column type {type_name:?}"),
    })?;

    let is_primary_key = match obj.get("primary_key") {
        None => false,
        Some(serde_json::Value::Bool(b)) => *b,
        Some(_) => {
            return Err(SchemaError::Format {
                location: format!("{location}.primary_key"),
                message: "expected a boolean".to_string(),
            })
        }
    };

    let references = match obj.get("references") {
        None | Some(serde_json::Value::Null) => None,
        Some(serde_json::Value::String(target)) => {
            let (table, column) = target.split_once('.').ok_or_else(|| SchemaError::Format {
                location: format!("{location}.references"),
                message: format!("expected \"table.column\", got {target:?}"),
            })?;
            Some(ColumnTarget { table: table.to_string(), column: column.to_string() })
        }
        Some(_) => {
            return Err(SchemaError::Format {
                location: format!("{location}.references"),
                message: "expected a \"table.column\" string".to_string(),
            })
        }
    };

    let roles = match obj.get("roles") {
        None => infer_roles(data_type, is_primary_key, references.is_some()),
        Some(serde_json::Value::Array(items)) => {
            let mut set = DimensionSet::EMPTY;
            for item in items {
                let text = item.as_str().ok_or_else(|| SchemaError::Format {
                    location: format!("{location}.roles"),
                    message: "expected role names as strings".to_string(),
                })?;
                let dim = Dimension::parse(text).ok_or_else(|| SchemaError::Format {
                    location: format!("{location}.roles"),
                    message: format!("unknown dimension {text:?}"),
                })?;
                set.insert(dim);
            }
            if set.is_empty() {
                // An explicit empty list falls back to inference so the
                // roles-nonempty invariant holds for every loaded column.
                infer_roles(data_type, is_primary_key, references.is_some())
            } else {
                set
            }
        }
        Some(_) => {
            return Err(SchemaError::Format {
                location: format!("{location}.roles"),
                message: "expected an array of dimension names".to_string(),
            })
        }
    };

    Ok(ColumnInfo { name, data_type, roles, is_primary_key, references })
}

/// Derive default roles for a column that carries no explicit annotation.
///
/// Key columns (primary or foreign) identify entities and map to WHO;
/// temporal types map to WHEN; everything else maps to WHAT. WHERE, WHY, and
/// HOW are never inferred — they require explicit annotation.
pub fn infer_roles(data_type: DataType, is_primary_key: bool, has_reference: bool) -> DimensionSet {
    if is_primary_key || has_reference {
        DimensionSet::EMPTY.with(Dimension::Who)
    } else if data_type.is_temporal() {
        DimensionSet::EMPTY.with(Dimension::When)
    } else {
        DimensionSet::EMPTY.with(Dimension::What)
    }
}

fn validate_catalog(catalog: &SchemaCatalog) -> Result<(), ValidationError> {
    let mut seen_tables: Vec<String> = Vec::new();
    for table in &catalog.tables {
        let lower = table.name.to_ascii_lowercase();
        if seen_tables.contains(&lower) {
            return Err(ValidationError::DuplicateName(table.name.clone()));
        }
        seen_tables.push(lower);

        let mut seen_columns: Vec<String> = Vec::new();
        for column in &table.columns {
            let lower = column.name.to_ascii_lowercase();
            if seen_columns.contains(&lower) {
                return Err(ValidationError::DuplicateName(format!(
                    "{}.{}",
                    table.name, column.name
                )));
            }
            seen_columns.push(lower);
        }
    }
    for table in &catalog.tables {
        for column in &table.columns {
            if let Some(target) = &column.references {
                let resolved = catalog
                    .table(&target.table)
                    .and_then(|t| t.column(&target.column));
                if resolved.is_none() {
                    return Err(ValidationError::DanglingReference {
                        source_column: format!("{}.{}", table.name, column.name),
                        target: target.to_string(),
                    });
                }
            }
        }
    }
    Ok(())
}

fn as_object<'v>(
    value: &'v serde_json::Value,
    location: &str,
) -> Result<&'v serde_json::Map<String, serde_json::Value>, SchemaError> {
    value.as_object().ok_or_else(|| SchemaError::Format {
        location: location.to_string(),
        message: "expected an object".to_string(),
    })
}

fn string_field(
    obj: &serde_json::Map<String, serde_json::Value>,
    location: &str,
    key: &str,
) -> Result<String, SchemaError> {
    match obj.get(key) {
        Some(serde_json::Value::String(s)) => Ok(s.clone()),
        Some(_) => Err(SchemaError::Format {
            location: format!("{location}.{key}"),
            message: "expected a string".to_string(),
        }),
        None => Err(SchemaError::Format {
            location: format!("{location}.{key}"),
            message: format!("missing required key {key:?}"),
        }),
    }
}

fn reject_unknown_keys(
    obj: &serde_json::Map<String, serde_json::Value>,
    location: &str,
    allowed: &[&str],
) -> Result<(), SchemaError> {
    for key in obj.keys() {
        if !allowed.contains(&key.as_str()) {
            return Err(SchemaError::Format {
                location: format!("{location}.{key}"),
                message: format!("unknown key {key:?} (pass --lax to ignore)"),
            });
        }
    }
    Ok(())
}

/// Errors raised while resolving column references against a scope.
#[derive(Debug, Error, PartialEq, Eq)]
pub enum ResolveError {
    #[error("unknown table {0}")]
    UnknownTable(String),
    #[error("unknown column {0}")]
    UnknownColumn(String),
    #[error("ambiguous column {0}")]
    AmbiguousColumn(String),
}

/// One table visible in a query scope.
#[derive(Debug, Clone)]
pub struct ScopeTable {
    /// Lowercased effective name (alias if present, base name otherwise).
    pub effective: String,
    /// Effective name as written in the query, for display.
    pub effective_display: String,
    /// Catalog table name (canonical casing).
    pub table: String,
}

#[derive(Debug, Clone, Default)]
struct ScopeFrame {
    tables: Vec<ScopeTable>,
}

/// A successful column resolution.
#[derive(Debug, Clone, PartialEq)]
pub struct Resolution {
    /// Catalog table the column belongs to.
    pub table: String,
    pub column: ColumnInfo,
    /// 0 for the innermost query scope, 1 for its parent, and so on.
    pub frame_depth: usize,
    /// Index of the matched table within its frame.
    pub table_index: usize,
}

/// Name-resolution scope for one query, with optional enclosing scopes for
/// correlated subqueries. The innermost frame is pushed last.
#[derive(Debug, Clone)]
pub struct Scope<'a> {
    catalog: &'a SchemaCatalog,
    frames: Vec<ScopeFrame>,
}

impl<'a> Scope<'a> {
    /// Build a single-frame scope from a query's FROM and JOIN tables.
    pub fn build(catalog: &'a SchemaCatalog, ast: &QueryAst) -> Result<Scope<'a>, ResolveError> {
        let mut scope = Scope { catalog, frames: Vec::new() };
        scope.push(ast)?;
        Ok(scope)
    }

    /// Push a nested query's tables as the new innermost frame.
    pub fn push(&mut self, ast: &QueryAst) -> Result<(), ResolveError> {
        let mut frame = ScopeFrame::default();
        for table_ref in ast.scope_tables() {
            let table = self
                .catalog
                .table(&table_ref.name)
                .ok_or_else(|| ResolveError::UnknownTable(table_ref.name.clone()))?;
            let display = table_ref.alias.clone().unwrap_or_else(|| table_ref.name.clone());
            frame.tables.push(ScopeTable {
                effective: display.to_ascii_lowercase(),
                effective_display: display,
                table: table.name.clone(),
            });
        }
        self.frames.push(frame);
        Ok(())
    }

    /// Pop the innermost frame.
    pub fn pop(&mut self) {
        self.frames.pop();
    }

    pub fn catalog(&self) -> &'a SchemaCatalog {
        self.catalog
    }

    /// Tables of the innermost frame, in FROM/JOIN order.
    pub fn innermost_tables(&self) -> &[ScopeTable] {
        self.frames.last().map(|f| f.tables.as_slice()).unwrap_or(&[])
    }

    /// Lowercased effective table names per frame, outermost first.
    pub fn frame_names(&self) -> Vec<Vec<String>> {
        self.frames
            .iter()
            .map(|f| f.tables.iter().map(|t| t.effective.clone()).collect())
            .collect()
    }

    /// Resolve a column reference, innermost scope first.
    ///
    /// A qualified reference must name a visible table alias or base name; an
    /// unqualified reference must match exactly one column within the
    /// innermost frame that contains it at all.
    pub fn resolve(&self, qualifier: Option<&str>, name: &str) -> Result<Resolution, ResolveError> {
        for (rev_depth, frame) in self.frames.iter().rev().enumerate() {
            match qualifier {
                Some(q) => {
                    let q_lower = q.to_ascii_lowercase();
                    for (idx, entry) in frame.tables.iter().enumerate() {
                        if entry.effective == q_lower {
                            let table = self.catalog.table(&entry.table).expect("scope table");
                            return match table.column(name) {
                                Some(column) => Ok(Resolution {
                                    table: table.name.clone(),
                                    column: column.clone(),
                                    frame_depth: rev_depth,
                                    table_index: idx,
                                }),
                                None => Err(ResolveError::UnknownColumn(format!("{q}.{name}"))),
                            };
                        }
                    }
                }
                None => {
                    let mut matches = Vec::new();
                    for (idx, entry) in frame.tables.iter().enumerate() {
                        let table = self.catalog.table(&entry.table).expect("scope table");
                        if let Some(column) = table.column(name) {
                            matches.push((idx, table.name.clone(), column.clone()));
                        }
                    }
                    match matches.len() {
                        0 => {}
                        1 => {
                            let (idx, table, column) = matches.pop().expect("one match");
                            return Ok(Resolution {
                                table,
                                column,
                                frame_depth: rev_depth,
                                table_index: idx,
                            });
                        }
                        _ => return Err(ResolveError::AmbiguousColumn(name.to_string())),
                    }
                }
            }
        }
        match qualifier {
            Some(q) => Err(ResolveError::UnknownTable(q.to_string())),
            None => Err(ResolveError::UnknownColumn(name.to_string())),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sql::parse_query;

    fn flights_json() -> &'static str {
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
        }"#
    }

    #[test]
    fn parses_catalog_and_preserves_roles() {
        let catalog = parse_catalog(flights_json(), LoadOptions::default()).unwrap();
        assert_eq!(catalog.name, "flights");
        let table = catalog.table("flights").unwrap();
        assert_eq!(table.columns.len(), 7);
        let fare = table.column("fare").unwrap();
        assert!(fare.roles.contains(Dimension::What));
        assert_eq!(fare.data_type, DataType::Real);
        let id = table.column("FLIGHT_ID").unwrap();
        assert!(id.is_primary_key);
        assert!(id.roles.contains(Dimension::Who));
    }

    #[test]
    fn infers_roles_when_absent() {
        assert_eq!(
            infer_roles(DataType::Text, true, false),
            DimensionSet::EMPTY.with(Dimension::Who)
        );
        assert_eq!(
            infer_roles(DataType::Integer, false, true),
            DimensionSet::EMPTY.with(Dimension::Who)
        );
        assert_eq!(
            infer_roles(DataType::Timestamp, false, false),
            DimensionSet::EMPTY.with(Dimension::When)
        );
        assert_eq!(
            infer_roles(DataType::Text, false, false),
            DimensionSet::EMPTY.with(Dimension::What)
        );
    }

    #[test]
    fn where_and_how_are_never_inferred() {
        for data_type in [
            DataType::Integer,
            DataType::Real,
            DataType::Text,
            DataType::Date,
            DataType::Time,
            DataType::Timestamp,
            DataType::Boolean,
        ] {
            for pk in [false, true] {
                for fk in [false, true] {
                    let roles = infer_roles(data_type, pk, fk);
                    assert!(!roles.contains(Dimension::Where));
                    assert!(!roles.contains(Dimension::How));
                    assert!(!roles.contains(Dimension::Why));
                    assert!(!roles.is_empty());
                }
            }
        }
    }

    #[test]
    fn strict_mode_rejects_unknown_keys() {
        let text = r#"{
            "format": "quest-schema/1",
            "name": "x",
            "tables": {"t": [{"name": "a", "type": "text", "comment": "oops"}]}
        }"#;
        let err = parse_catalog(text, LoadOptions::default()).unwrap_err();
        match err {
            SchemaError::Format { location, .. } => assert_eq!(location, "tables.t[0].comment"),
            other => panic!("expected format error, got {other:?}"),
        }
        // Lax mode accepts the same document.
        let catalog = parse_catalog(text, LoadOptions { lax: true }).unwrap();
        assert_eq!(catalog.tables.len(), 1);
    }

    #[test]
    fn rejects_bad_format_marker() {
        let text = r#"{"format": "quest-schema/2", "name": "x", "tables": {"t": [{"name": "a", "type": "text"}]}}"#;
        assert!(matches!(
            parse_catalog(text, LoadOptions::default()),
            Err(SchemaError::Format { .. })
        ));
    }

    #[test]
    fn rejects_empty_tables_and_duplicates() {
        let empty = r#"{"format": "quest-schema/1", "name": "x", "tables": {}}"#;
        assert!(matches!(
            parse_catalog(empty, LoadOptions::default()),
            Err(SchemaError::Validation(ValidationError::NoTables))
        ));
        let dup = r#"{
            "format": "quest-schema/1",
            "name": "x",
            "tables": {"t": [
                {"name": "a", "type": "text"},
                {"name": "A", "type": "integer"}
            ]}
        }"#;
        assert!(matches!(
            parse_catalog(dup, LoadOptions::default()),
            Err(SchemaError::Validation(ValidationError::DuplicateName(_)))
        ));
    }

    #[test]
    fn rejects_dangling_reference() {
        let text = r#"{
            "format": "quest-schema/1",
            "name": "x",
            "tables": {"t": [{"name": "a", "type": "integer", "references": "missing.b"}]}
        }"#;
        assert!(matches!(
            parse_catalog(text, LoadOptions::default()),
            Err(SchemaError::Validation(ValidationError::DanglingReference { .. }))
        ));
    }

    #[test]
    fn resolves_qualified_and_bare_columns() {
        let catalog = parse_catalog(flights_json(), LoadOptions::default()).unwrap();
        let ast = parse_query("SELECT * FROM flights AS f1 WHERE f1.fare > 100").unwrap();
        let scope = Scope::build(&catalog, &ast).unwrap();

        let bare = scope.resolve(None, "fare").unwrap();
        assert_eq!(bare.table, "flights");
        assert_eq!(bare.column.name, "fare");

        let qualified = scope.resolve(Some("F1"), "FARE").unwrap();
        assert_eq!(qualified.frame_depth, 0);

        assert_eq!(
            scope.resolve(None, "nope"),
            Err(ResolveError::UnknownColumn("nope".to_string()))
        );
        assert_eq!(
            scope.resolve(Some("zz"), "fare"),
            Err(ResolveError::UnknownTable("zz".to_string()))
        );
    }

    #[test]
    fn inner_scope_shadows_outer_and_outer_stays_reachable() {
        let catalog = parse_catalog(flights_json(), LoadOptions::default()).unwrap();
        let outer = parse_query("SELECT * FROM flights AS f1 WHERE fare > 0").unwrap();
        let inner = parse_query("SELECT * FROM flights AS f2 WHERE fare > 0").unwrap();
        let mut scope = Scope::build(&catalog, &outer).unwrap();
        scope.push(&inner).unwrap();

        let shadowed = scope.resolve(None, "fare").unwrap();
        assert_eq!(shadowed.frame_depth, 0);

        let outer_ref = scope.resolve(Some("f1"), "arrival_time").unwrap();
        assert_eq!(outer_ref.frame_depth, 1);

        scope.pop();
        assert!(scope.resolve(Some("f2"), "fare").is_err());
    }

    #[test]
    fn ambiguous_bare_column_is_an_error() {
        let catalog = parse_catalog(flights_json(), LoadOptions::default()).unwrap();
        let ast = parse_query(
            "SELECT f1.flight_id FROM flights AS f1 JOIN flights AS f2 ON f1.flight_id = f2.flight_id",
        )
        .unwrap();
        let scope = Scope::build(&catalog, &ast).unwrap();
        assert_eq!(
            scope.resolve(None, "fare"),
            Err(ResolveError::AmbiguousColumn("fare".to_string()))
        );
    }
}
