//! Extract Filter→Aggregate→Return structure and check conformance,
//! including the reason codes for degenerate queries.
//!
//! Run with: `cargo run --example check_conformance`

use quest::far::analyze_conformance;
use quest::schema::load_catalog;
use quest::sql::parse_query;

fn main() {
    let catalog = load_catalog(concat!(
        env!("CARGO_MANIFEST_DIR"),
        "/../../fixtures/flights.schema.json"
    ))
    .expect("catalog loads");

    let queries = [
        // Well-scoped lookup: conformant.
        "SELECT flight_id FROM flights WHERE origin_city = 'Boston' AND fare < 200",
        // Whole-table dump with no scoping and no summarization.
        "SELECT * FROM flights",
        // Averages only make sense over numbers.
        "SELECT AVG(origin_city) FROM flights WHERE fare > 0",
        // Projecting a column the schema does not know.
        "SELECT cabin_class FROM flights WHERE fare > 0",
    ];

    for query in queries {
        let ast = parse_query(query).expect("query parses");
        let (far, report) = analyze_conformance(&ast, &catalog).expect("query resolves");
        println!("query: {query}");
        println!(
            "  filter: {} predicate(s), aggregate: {}, returns {} column(s)",
            far.filter.predicates.len(),
            if far.aggregate.identity { "identity".to_string() } else { format!("{} call(s)", far.aggregate.calls.len()) },
            far.return_spec.columns.len(),
        );
        if report.conformant {
            println!("  verdict: conformant\n");
        } else {
            let reasons: Vec<&str> = report.reasons().iter().map(|r| r.as_str()).collect();
            println!("  verdict: nonconformant ({})\n", reasons.join(", "));
        }
    }
}
