//! Shared helpers for the integration suites: fixture paths, golden-file
//! comparison, and property-test strategies that generate well-formed
//! queries over the flights catalog.

#![allow(dead_code)]

use std::path::PathBuf;

use proptest::prelude::*;
use quest::schema::{load_catalog, SchemaCatalog};

pub fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fixtures").join(name)
}

pub fn flights_catalog() -> SchemaCatalog {
    load_catalog(fixture("flights.schema.json")).expect("flights catalog loads")
}

pub fn ehr_catalog() -> SchemaCatalog {
    load_catalog(fixture("ehr.schema.json")).expect("ehr catalog loads")
}

/// Compare against a checked-in golden file. Set `QUEST_UPDATE_GOLDENS=1`
/// to rewrite the golden from the current output instead.
pub fn assert_golden(actual: &str, golden_name: &str) {
    let path = fixture(&format!("goldens/{golden_name}"));
    if std::env::var("QUEST_UPDATE_GOLDENS").is_ok_and(|v| v == "1") {
        std::fs::write(&path, actual)
            .unwrap_or_else(|e| panic!("cannot write golden {golden_name}: {e}"));
        return;
    }
    let expected = std::fs::read_to_string(&path).unwrap_or_else(|_| {
        panic!("missing golden {golden_name}; run with QUEST_UPDATE_GOLDENS=1 to create it")
    });
    assert_eq!(
        actual, expected,
        "output differs from golden {golden_name} (QUEST_UPDATE_GOLDENS=1 regenerates)"
    );
}

// ---------------------------------------------------------------------------
// Query strategies over the flights catalog
// ---------------------------------------------------------------------------

const TEXT_COLUMNS: [&str; 4] = ["flight_id", "airline", "origin_city", "destination_city"];
const NUMERIC_COLUMNS: [&str; 3] = ["departure_time", "arrival_time", "fare"];
const ALL_COLUMNS: [&str; 7] = [
    "flight_id",
    "airline",
    "origin_city",
    "destination_city",
    "departure_time",
    "arrival_time",
    "fare",
];
const WORDS: [&str; 8] = ["Boston", "Denver", "Dallas", "Seattle", "UA", "AA", "DL", "Atlanta"];

fn text_predicate() -> impl Strategy<Value = String> {
    (
        prop::sample::select(&TEXT_COLUMNS[..]),
        prop::sample::select(&WORDS[..]),
        prop::sample::select(&WORDS[..]),
        0..4u8,
    )
        .prop_map(|(column, word, other, op)| match op {
            0 => format!("{column} = '{word}'"),
            1 => format!("{column} <> '{word}'"),
            2 => format!("{column} LIKE '{word}%'"),
            _ => format!("{column} IN ('{word}', '{other}')"),
        })
}

fn numeric_predicate() -> impl Strategy<Value = String> {
    (prop::sample::select(&NUMERIC_COLUMNS[..]), 0..2000i64, 0..5u8).prop_map(
        |(column, value, op)| match op {
            0 => format!("{column} = {value}"),
            1 => format!("{column} < {value}"),
            2 => format!("{column} >= {value}"),
            3 => format!("{column} <> {value}"),
            _ => format!("{column} BETWEEN {value} AND {}", value + 120),
        },
    )
}

fn predicates() -> impl Strategy<Value = String> {
    prop::collection::vec(prop_oneof![text_predicate(), numeric_predicate()], 1..=3)
        .prop_map(|parts| parts.join(" AND "))
}

fn aggregate_item() -> impl Strategy<Value = String> {
    prop_oneof![
        Just("COUNT(*)".to_string()),
        prop::sample::select(&NUMERIC_COLUMNS[..]).prop_map(|c| format!("SUM({c})")),
        prop::sample::select(&NUMERIC_COLUMNS[..]).prop_map(|c| format!("AVG({c})")),
        prop::sample::select(&ALL_COLUMNS[..]).prop_map(|c| format!("MIN({c})")),
        prop::sample::select(&ALL_COLUMNS[..]).prop_map(|c| format!("MAX({c})")),
        prop::sample::select(&ALL_COLUMNS[..]).prop_map(|c| format!("COUNT(DISTINCT {c})")),
    ]
}

fn projection() -> impl Strategy<Value = String> {
    prop_oneof![
        Just("*".to_string()),
        prop::collection::vec(prop::sample::select(&ALL_COLUMNS[..]), 1..=3)
            .prop_map(|cols| cols.join(", ")),
    ]
}

fn order_clause() -> impl Strategy<Value = String> {
    (prop::sample::select(&ALL_COLUMNS[..]), any::<bool>(), prop::option::of(1..50i64)).prop_map(
        |(column, ascending, limit)| {
            let direction = if ascending { "ASC" } else { "DESC" };
            match limit {
                Some(k) => format!(" ORDER BY {column} {direction} LIMIT {k}"),
                None => format!(" ORDER BY {column} {direction}"),
            }
        },
    )
}

/// A well-formed query over the flights catalog: a filtered scan, a
/// filtered or whole-table aggregate, or a grouped count. Conformant by
/// construction.
pub fn arb_flights_query() -> impl Strategy<Value = String> {
    prop_oneof![
        // Filtered scan, optionally ranked.
        (projection(), predicates(), prop::option::of(order_clause())).prop_map(
            |(proj, preds, order)| format!(
                "SELECT {proj} FROM flights WHERE {preds}{}",
                order.unwrap_or_default()
            )
        ),
        // Filtered aggregate.
        (aggregate_item(), predicates())
            .prop_map(|(agg, preds)| format!("SELECT {agg} FROM flights WHERE {preds}")),
        // Whole-table aggregate: summarization is scoping enough.
        aggregate_item().prop_map(|agg| format!("SELECT {agg} FROM flights")),
        // Grouped count, optionally filtered and HAVING-constrained.
        (
            prop::sample::select(&ALL_COLUMNS[..]),
            prop::option::of(predicates()),
            prop::option::of(1..10i64),
        )
            .prop_map(|(key, preds, having)| {
                let mut query = format!("SELECT {key}, COUNT(*) FROM flights");
                if let Some(preds) = preds {
                    query.push_str(&format!(" WHERE {preds}"));
                }
                query.push_str(&format!(" GROUP BY {key}"));
                if let Some(k) = having {
                    query.push_str(&format!(" HAVING COUNT(*) > {k}"));
                }
                query
            }),
    ]
}
