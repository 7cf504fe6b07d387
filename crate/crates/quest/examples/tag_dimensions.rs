//! Classify filter predicates into the six W5H dimensions, detect
//! WHO-anchored temporal constraints, and surface constraint operators.
//!
//! Run with: `cargo run --example tag_dimensions`

use quest::schema::load_catalog;
use quest::sql::parse_query;
use quest::w5h::tag_query;

fn main() {
    let catalog = load_catalog(concat!(
        env!("CARGO_MANIFEST_DIR"),
        "/../../fixtures/flights.schema.json"
    ))
    .expect("catalog loads");

    let queries = [
        // Place + time constraints.
        "SELECT * FROM flights WHERE origin_city = 'Boston' AND departure_time < 720",
        // The comparison value comes from a subquery pinned to another
        // entity: a WHO-anchored WHEN.
        "SELECT * FROM flights WHERE origin_city = 'Boston' AND \
         arrival_time < (SELECT MAX(departure_time) FROM flights WHERE flight_id = 'AA100')",
        // "Cheapest" realized as ordering plus limit: a ranking operator,
        // not a filter.
        "SELECT * FROM flights WHERE destination_city = 'Denver' ORDER BY fare ASC LIMIT 1",
        // Counting is quantitative HOW.
        "SELECT COUNT(*) FROM flights WHERE airline = 'UA'",
    ];

    for query in queries {
        let ast = parse_query(query).expect("query parses");
        let tags = tag_query(&ast, &catalog).expect("query tags");
        println!("query: {query}");
        let engaged: Vec<String> = tags.engaged.iter().map(|d| d.to_string()).collect();
        println!(
            "  dimensions: {}",
            if engaged.is_empty() { "(none)".to_string() } else { engaged.join(", ") }
        );
        for tag in &tags.predicate_tags {
            let dims: Vec<String> = tag.dimensions.iter().map(|d| d.to_string()).collect();
            print!("    {}: {} -> {}", tag.predicate_id, tag.text, dims.join(", "));
            if let Some(anchor) = &tag.anchor_entity {
                print!("  [anchored via {} at {}]", anchor.table, anchor.predicate_id);
            }
            println!();
        }
        for operator in &tags.constraint_operators {
            println!("  operator: {}", operator.describe());
        }
        println!();
    }
}
