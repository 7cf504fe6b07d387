//! Parse SQL into an AST and print it back in canonical form.
//!
//! Run with: `cargo run --example parse_query`

use quest::sql::{parse_query, print_query};

fn main() {
    let queries = [
        "select   flight_id , fare   from flights where fare<=150 and origin_city='Boston'",
        "SELECT origin_city, COUNT(*) FROM flights GROUP BY origin_city HAVING COUNT(*) > 3",
        "select * from flights where departure_time between 600 and 1200 order by fare desc limit 5",
    ];
    for query in queries {
        let ast = parse_query(query).expect("query parses");
        let canonical = print_query(&ast);
        println!("input:     {query}");
        println!("canonical: {canonical}");

        // The canonical form is a fixpoint: parsing it again yields the
        // same structure.
        let reparsed = parse_query(&canonical).expect("canonical form parses");
        assert_eq!(ast, reparsed);
        println!("round-trip: structure preserved\n");
    }
}
