//! Render the reference profiles as a self-contained SVG heatmap.
//!
//! Run with: `cargo run --example render_heatmap`
//! The image lands in `target/reference_heatmap.svg`.

use quest::profile::builtin_references;
use quest::render::{render_references, Format};

fn main() {
    let svg = render_references(&builtin_references(), Format::Svg).expect("svg renders");
    let path = concat!(env!("CARGO_MANIFEST_DIR"), "/../../target/reference_heatmap.svg");
    std::fs::write(path, &svg).expect("heatmap writes");
    println!("wrote {} bytes to {path}", svg.len());
    println!("known cells are colored by value; unknown cells are hatched, never shown as zero");
}
