//! Generate a seeded synthetic workload over a catalog and confirm every
//! query is conformant by construction.
//!
//! Run with: `cargo run --example generate_queries`

use quest::far::analyze_conformance;
use quest::generate::{generate_queries, GeneratorConfig};
use quest::schema::load_catalog;
use quest::sql::parse_query;

fn main() {
    let catalog = load_catalog(concat!(
        env!("CARGO_MANIFEST_DIR"),
        "/../../fixtures/flights.schema.json"
    ))
    .expect("catalog loads");

    let config = GeneratorConfig { seed: 7, count: 12 };
    let queries = generate_queries(&catalog, &config);
    for query in &queries {
        let ast = parse_query(query).expect("generated query parses");
        let (_, report) = analyze_conformance(&ast, &catalog).expect("generated query resolves");
        assert!(report.conformant, "generator output must be conformant: {query}");
        println!("{query}");
    }
    println!("\nall {} generated queries parse and are conformant (seed {})",
        queries.len(), config.seed);
}
