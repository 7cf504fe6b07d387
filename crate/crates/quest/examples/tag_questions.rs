//! Tag natural-language questions with the lexicon matcher — the NL side
//! of profiling, kept strictly apart from SQL-derived tags.
//!
//! Run with: `cargo run --example tag_questions`

use quest::w5h::{tag_nl, NlLexicon};

fn main() {
    let lexicon = NlLexicon::bundled();
    let questions = [
        "how many flights go from Boston to Washington",
        "patients readmitted due to surgical complications",
        "which orders shipped last month",
        "average fare by airline",
    ];
    for question in questions {
        println!("question: {question}");
        match tag_nl(question, &lexicon) {
            Some(tags) => {
                let dims: Vec<String> = tags.dimensions.iter().map(|d| d.to_string()).collect();
                println!("  dimensions: {}", if dims.is_empty() { "(none)".to_string() } else { dims.join(", ") });
                println!("  how-many: {}", if tags.how_many { "yes" } else { "no" });
                println!("  matched: {}\n", tags.matched.join(", "));
            }
            None => println!("  no lexicon rule matched\n"),
        }
    }
}
