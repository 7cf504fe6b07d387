//! Decompose a nested query into explicit dataflow steps, each a
//! self-contained Filter→Aggregate→Return unit, then recompose it.
//!
//! Run with: `cargo run --example decompose_steps`

use quest::decompose::{decompose, recompose};
use quest::schema::load_catalog;
use quest::sql::{parse_query, print_query};

fn main() {
    let catalog = load_catalog(concat!(
        env!("CARGO_MANIFEST_DIR"),
        "/../../fixtures/flights.schema.json"
    ))
    .expect("catalog loads");

    // The inner query is correlated: it compares against the outer row's
    // arrival time.
    let query = "SELECT * FROM flights AS f1 WHERE f1.origin_city = 'Boston' AND \
                 f1.destination_city = 'New York' AND f1.departure_time < 720 AND \
                 f1.arrival_time <= (SELECT MIN(f2.departure_time) - 45 FROM flights AS f2 \
                 WHERE f2.destination_city = 'London' AND f2.departure_time > f1.arrival_time) \
                 ORDER BY f1.fare ASC LIMIT 1";

    let ast = parse_query(query).expect("query parses");
    let plan = decompose(&ast, &catalog).expect("query decomposes");
    print!("{}", plan.to_text());

    // Substituted bindings print as @step references.
    let root = plan.root_step();
    println!("\nroot query with bindings: {}", print_query(&root.ast));

    // Recomposition inverts the substitution exactly.
    let restored = recompose(&plan);
    assert_eq!(ast, restored);
    println!("recompose: original structure restored");
}
