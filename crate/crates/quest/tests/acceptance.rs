//! The acceptance suite: nine criteria, one test (and one pass/fail line)
//! each. Run with `cargo test --test acceptance`.

mod common;

use std::time::Instant;

use proptest::prelude::*;
use proptest::test_runner::{Config, TestRunner};
use quest::analyze_query;
use quest::far::{analyze_conformance, ReasonCode};
use quest::generate::{synthetic_corpus_jsonl, GeneratorConfig};
use quest::profile::{
    builtin_reference, builtin_references, compare_profiles, ingest, ingest_str, profile_corpus,
    CatalogSet, CorpusProfile, IngestItem, ProfileOptions,
};
use quest::render::{render_profile, render_references, Format};
use quest::schema::Dimension;
use quest::sql::{parse_query, print_query};
use quest::w5h::tag_query;

use common::{arb_flights_query, assert_golden, ehr_catalog, fixture, flights_catalog};

const CASE_SIMPLE: &str = "SELECT * FROM flights WHERE origin_city = 'Boston' AND \
                           destination_city = 'New York' AND departure_time < 720";
const CASE_ANCHORED: &str = "SELECT * FROM flights WHERE origin_city = 'Boston' AND \
                             arrival_time < (SELECT MAX(departure_time) FROM flights \
                             WHERE flight_id = 'AA100')";
const CASE_RANKING: &str = "SELECT * FROM flights AS f1 WHERE f1.origin_city = 'Boston' AND \
                            f1.destination_city = 'New York' AND f1.departure_time < 720 AND \
                            f1.arrival_time <= (SELECT MIN(f2.departure_time) - 45 FROM flights \
                            AS f2 WHERE f2.destination_city = 'London' AND f2.departure_time > \
                            f1.arrival_time) ORDER BY f1.fare ASC LIMIT 1";

fn pretty_analysis(query: &str) -> (quest::QueryAnalysis, String) {
    let catalog = flights_catalog();
    let analysis = analyze_query(query, &catalog).expect("case query analyzes");
    let document =
        serde_json::to_string_pretty(&analysis).expect("analysis serializes") + "\n";
    (analysis, document)
}

#[test]
fn criterion_1_case_study_goldens() {
    let started = Instant::now();

    let (simple, simple_doc) = pretty_analysis(CASE_SIMPLE);
    assert_eq!(
        simple.dimensions.engaged.iter().collect::<Vec<_>>(),
        vec![Dimension::Where, Dimension::When],
    );
    assert_eq!(simple.plan.steps.len(), 1);
    assert!(simple.conformance.conformant);

    let (anchored, anchored_doc) = pretty_analysis(CASE_ANCHORED);
    let anchored_tag = anchored
        .dimensions
        .predicate_tags
        .iter()
        .find(|tag| tag.who_anchored)
        .expect("an anchored predicate");
    let anchor = anchored_tag.anchor_entity.as_ref().expect("anchor entity");
    assert_eq!(anchor.table, "flights");
    assert_eq!(anchored.plan.steps.len(), 2);

    let (ranking, ranking_doc) = pretty_analysis(CASE_RANKING);
    let operators: Vec<String> =
        ranking.dimensions.constraint_operators.iter().map(|op| op.describe()).collect();
    assert!(
        operators.iter().any(|op| op == "ranking(asc, 1, fare)"),
        "expected the ranking operator, got {operators:?}"
    );
    assert_eq!(ranking.plan.steps.len(), 2);
    let child = &ranking.plan.steps[0];
    assert!(
        !child.correlated_on.is_empty(),
        "the subquery step should be correlated on the outer row"
    );

    assert_golden(&simple_doc, "case_simple.json");
    assert_golden(&anchored_doc, "case_anchored.json");
    assert_golden(&ranking_doc, "case_ranking.json");

    let elapsed = started.elapsed();
    assert!(elapsed.as_secs_f64() < 1.0, "case studies took {elapsed:?}, budget is 1 s");
    println!("PASS criterion 1: case-study goldens match and run in {elapsed:?}");
}

#[test]
fn criterion_2_nonconformance_reason_codes() {
    let catalog = flights_catalog();
    let reasons = |query: &str| {
        let ast = parse_query(query).expect("query parses");
        let (_, report) = analyze_conformance(&ast, &catalog).expect("query resolves");
        report.reasons()
    };

    assert_eq!(reasons("SELECT * FROM flights"), vec![ReasonCode::FNoScoping]);
    assert_eq!(
        reasons("SELECT AVG(origin_city) FROM flights WHERE fare > 0"),
        vec![ReasonCode::ANonNumericAgg],
    );
    assert_eq!(
        reasons("SELECT cabin_class FROM flights WHERE fare > 0"),
        vec![ReasonCode::RUnknownColumn],
    );
    println!("PASS criterion 2: nonconformance reason codes are exact");
}

#[test]
fn criterion_3_generated_queries_are_conformant() {
    let started = Instant::now();
    let catalog = flights_catalog();
    let mut runner = TestRunner::new(Config { cases: 1000, ..Config::default() });
    runner
        .run(&arb_flights_query(), |query| {
            let ast = parse_query(&query)
                .map_err(|e| TestCaseError::fail(format!("{query}: {e}")))?;
            let (_, report) = analyze_conformance(&ast, &catalog)
                .map_err(|e| TestCaseError::fail(format!("{query}: {e}")))?;
            prop_assert!(report.conformant, "nonconformant: {} ({:?})", query, report.reasons());
            Ok(())
        })
        .unwrap();
    let elapsed = started.elapsed();
    assert!(elapsed.as_secs_f64() < 10.0, "conformance property took {elapsed:?}, budget 10 s");
    println!("PASS criterion 3: 1000 generated queries are 100% conformant in {elapsed:?}");
}

#[test]
fn criterion_4_print_parse_round_trip() {
    // All fixture queries...
    let mut fixture_queries = Vec::new();
    for corpus in ["mini_atis.jsonl", "mini_ehr.jsonl"] {
        for item in ingest(&fixture(corpus)).expect("fixture corpus reads") {
            if let IngestItem::Record(record) = item {
                fixture_queries.push(record.query);
            }
        }
    }
    fixture_queries.extend([CASE_SIMPLE, CASE_ANCHORED, CASE_RANKING].map(str::to_string));
    for query in &fixture_queries {
        let ast = parse_query(query).expect("fixture query parses");
        let reparsed = parse_query(&print_query(&ast)).expect("canonical form parses");
        assert_eq!(ast, reparsed, "round-trip changed structure for {query}");
    }

    // ...plus 1000 generated ones, with shrinking.
    let mut runner = TestRunner::new(Config { cases: 1000, ..Config::default() });
    runner
        .run(&arb_flights_query(), |query| {
            let ast = parse_query(&query)
                .map_err(|e| TestCaseError::fail(format!("{query}: {e}")))?;
            let reparsed = parse_query(&print_query(&ast))
                .map_err(|e| TestCaseError::fail(format!("reparse of {query}: {e}")))?;
            prop_assert_eq!(&ast, &reparsed, "round-trip changed structure for {}", query);
            Ok(())
        })
        .unwrap();
    println!(
        "PASS criterion 4: print∘parse round-trip holds on {} fixture queries + 1000 generated",
        fixture_queries.len()
    );
}

fn profile_fixture(corpus: &str, schema: &str) -> CorpusProfile {
    let items = ingest(&fixture(corpus)).expect("corpus reads");
    let mut catalogs = CatalogSet::new();
    catalogs.insert(quest::schema::load_catalog(fixture(schema)).expect("catalog loads"));
    let name = corpus.trim_end_matches(".jsonl");
    profile_corpus(name, &items, &catalogs, &ProfileOptions::default()).expect("profile computes")
}

fn check_labels(corpus: &str, schema: &str) -> CorpusProfile {
    let labels: serde_json::Value = serde_json::from_str(
        &std::fs::read_to_string(fixture(&format!("{corpus}.labels.json"))).expect("labels read"),
    )
    .expect("labels parse");
    let profile = profile_fixture(&format!("{corpus}.jsonl"), schema);

    // Aggregate counts: exact equality, zero tolerance.
    let counts = &labels["counts"];
    let expect = |key: &str| counts[key].as_u64().unwrap_or_else(|| panic!("label {key}"));
    assert_eq!(profile.n_total, expect("n_total"), "{corpus} n_total");
    assert_eq!(profile.n_parsed, expect("n_parsed"), "{corpus} n_parsed");
    assert_eq!(profile.n_unsupported, expect("n_unsupported"), "{corpus} n_unsupported");
    assert_eq!(profile.n_unresolved, expect("n_unresolved"), "{corpus} n_unresolved");
    assert_eq!(profile.n_failed, expect("n_failed"), "{corpus} n_failed");
    for dim in Dimension::ALL {
        assert_eq!(
            profile.dim_counts[dim.index()],
            expect(dim.name()),
            "{corpus} {} count",
            dim.name()
        );
    }
    assert_eq!(profile.how_many_count, expect("how_many"), "{corpus} how_many");
    assert_eq!(profile.mechanistic_count, expect("mechanistic"), "{corpus} mechanistic");
    assert_eq!(profile.aggregation_count, expect("aggregation"), "{corpus} aggregation");
    assert_eq!(profile.conformant_count, expect("conformant"), "{corpus} conformant");
    assert_eq!(profile.dimensionless_count, expect("dimensionless"), "{corpus} dimensionless");

    // Per-query labels: dimensions, aggregation, conformance, and the
    // anchored/ranking annotations.
    let catalog = quest::schema::load_catalog(fixture(schema)).expect("catalog loads");
    let items = ingest(&fixture(&format!("{corpus}.jsonl"))).expect("corpus reads");
    for item in items {
        let IngestItem::Record(record) = item else { panic!("fixture line malformed") };
        let label = &labels["queries"][&record.id];
        assert!(label.is_object(), "missing label for {}", record.id);
        let ast = parse_query(&record.query).expect("fixture query parses");
        let dims = tag_query(&ast, &catalog).expect("fixture query tags");
        let expected: Vec<Dimension> = label["dimensions"]
            .as_array()
            .unwrap()
            .iter()
            .map(|v| Dimension::parse(v.as_str().unwrap()).unwrap())
            .collect();
        let actual: Vec<Dimension> = dims.engaged.iter().collect();
        let mut expected_sorted = expected.clone();
        expected_sorted.sort_by_key(|d| d.index());
        assert_eq!(actual, expected_sorted, "{} dimensions", record.id);
        assert_eq!(
            dims.has_aggregation,
            label["aggregation"].as_bool().unwrap(),
            "{} aggregation",
            record.id
        );
        let (_, report) = analyze_conformance(&ast, &catalog).expect("fixture query resolves");
        assert_eq!(
            report.conformant,
            label["conformant"].as_bool().unwrap(),
            "{} conformance",
            record.id
        );
        let anchored = dims.predicate_tags.iter().any(|t| t.who_anchored);
        assert_eq!(
            anchored,
            label["who_anchored"].as_bool().unwrap_or(false),
            "{} anchoring",
            record.id
        );
        if let Some(expected_ranking) = label["ranking"].as_str() {
            assert!(
                dims.constraint_operators.iter().any(|op| op.describe() == expected_ranking),
                "{} expected operator {expected_ranking}",
                record.id
            );
        }
    }
    profile
}

#[test]
fn criterion_5_fixture_profiles_match_hand_labels() {
    check_labels("mini_atis", "flights.schema.json");
    check_labels("mini_ehr", "ehr.schema.json");
    println!("PASS criterion 5: mini_atis and mini_ehr match their hand labels exactly");
}

#[test]
fn criterion_6_reference_fidelity() {
    let csv = render_references(&builtin_references(), Format::Csv).unwrap();
    assert_golden(&csv, "refs.csv");

    // Digit-for-digit cells, independently of the rendering path.
    let cell = |dataset: &str, dim: Dimension| {
        builtin_reference(dataset).unwrap().cells[dim.index()].point_value()
    };
    let agg = |dataset: &str| builtin_reference(dataset).unwrap().aggregation.point_value();
    assert_eq!(cell("EHRSQL", Dimension::When), Some(80.4));
    assert_eq!(cell("EHRSQL", Dimension::Who), Some(73.0));
    assert_eq!(agg("EHRSQL"), Some(38.3));
    assert_eq!(cell("WikiSQL", Dimension::When), Some(31.3));
    assert_eq!(cell("WikiSQL", Dimension::Who), Some(9.8));
    assert_eq!(agg("WikiSQL"), Some(23.4));
    assert_eq!(cell("ATIS", Dimension::When), Some(20.4));
    assert_eq!(cell("ATIS", Dimension::Who), Some(0.2));
    assert_eq!(agg("ATIS"), Some(4.1));
    assert_eq!(cell("Spider", Dimension::When), Some(16.3));
    assert_eq!(cell("Spider", Dimension::Who), Some(16.0));
    assert_eq!(cell("Spider", Dimension::How), Some(32.9));
    assert_eq!(cell("BIRD", Dimension::When), Some(20.8));
    assert_eq!(cell("BIRD", Dimension::How), Some(44.0));
    assert_eq!(agg("BIRD"), Some(43.4));
    for line in csv.lines().skip(1) {
        let why = line.split(',').nth(5).unwrap();
        assert_eq!(why, "<1", "WHY renders as <1 in {line}");
    }

    let delta = compare_profiles(
        &builtin_reference("EHRSQL").unwrap().row(),
        &builtin_reference("WikiSQL").unwrap().row(),
    )
    .unwrap();
    let when_ratio =
        delta.cells.iter().find(|c| c.metric == "when").unwrap().ratio.expect("WHEN ratio");
    assert!(
        (2.5..=2.6).contains(&when_ratio),
        "EHRSQL/WikiSQL WHEN ratio {when_ratio} outside [2.5, 2.6]"
    );
    println!("PASS criterion 6: reference cells are digit-for-digit, WHEN ratio = {when_ratio:.3}");
}

#[test]
fn criterion_7_directional_fingerprint() {
    let atis = profile_fixture("mini_atis.jsonl", "flights.schema.json");
    let ehr = profile_fixture("mini_ehr.jsonl", "ehr.schema.json");
    assert!(
        ehr.dim_proportion(Dimension::When) > atis.dim_proportion(Dimension::When),
        "mini_ehr WHEN {} must exceed mini_atis WHEN {}",
        ehr.dim_proportion(Dimension::When),
        atis.dim_proportion(Dimension::When),
    );
    assert!(
        ehr.dim_proportion(Dimension::Who) > atis.dim_proportion(Dimension::Who),
        "mini_ehr WHO {} must exceed mini_atis WHO {}",
        ehr.dim_proportion(Dimension::Who),
        atis.dim_proportion(Dimension::Who),
    );
    println!(
        "PASS criterion 7: mini_ehr dominates on WHEN ({:.3} > {:.3}) and WHO ({:.3} > {:.3})",
        ehr.dim_proportion(Dimension::When),
        atis.dim_proportion(Dimension::When),
        ehr.dim_proportion(Dimension::Who),
        atis.dim_proportion(Dimension::Who),
    );
}

#[test]
fn criterion_8_throughput_10k() {
    let catalog = flights_catalog();
    let corpus = synthetic_corpus_jsonl(&catalog, &GeneratorConfig { seed: 11, count: 10_000 });
    let items = ingest_str(&corpus);
    assert_eq!(items.len(), 10_000);
    let mut catalogs = CatalogSet::new();
    catalogs.insert(catalog);

    let started = Instant::now();
    let profile =
        profile_corpus("synthetic", &items, &catalogs, &ProfileOptions::default()).unwrap();
    let elapsed = started.elapsed();

    assert_eq!(profile.n_parsed, 10_000, "every synthetic query must parse and resolve");
    assert_eq!(profile.conformant_count, 10_000, "every synthetic query must be conformant");
    assert!(elapsed.as_secs_f64() < 30.0, "profiling 10k queries took {elapsed:?}, budget 30 s");
    let soft = if elapsed.as_secs_f64() < 5.0 { "within" } else { "over" } ;
    println!(
        "PASS criterion 8: 10k synthetic queries profiled in {elapsed:?} ({soft} the 5 s soft budget)"
    );
}

#[test]
fn criterion_9_order_independence() {
    let text = std::fs::read_to_string(fixture("mini_ehr.jsonl")).unwrap();
    let mut lines: Vec<&str> = text.lines().filter(|l| !l.trim().is_empty()).collect();
    let forward = ingest_str(&lines.join("\n"));
    // Deterministic shuffle: rotate and interleave.
    lines.rotate_left(7);
    lines.reverse();
    let shuffled = ingest_str(&lines.join("\n"));

    let mut catalogs = CatalogSet::new();
    catalogs.insert(ehr_catalog());
    let options = ProfileOptions::default();
    let a = profile_corpus("mini_ehr", &forward, &catalogs, &options).unwrap();
    let b = profile_corpus("mini_ehr", &shuffled, &catalogs, &options).unwrap();
    for format in [Format::Text, Format::Csv, Format::Json, Format::Svg] {
        assert_eq!(
            render_profile(&a, format).unwrap(),
            render_profile(&b, format).unwrap(),
            "{format} documents differ across input orders"
        );
    }
    // And the rendering itself is pinned.
    let atis = profile_fixture("mini_atis.jsonl", "flights.schema.json");
    assert_golden(&render_profile(&atis, Format::Text).unwrap(), "mini_atis_profile.txt");
    println!("PASS criterion 9: shuffled corpus renders byte-identical documents");
}
