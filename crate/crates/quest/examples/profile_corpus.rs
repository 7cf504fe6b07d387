//! Profile a corpus file into a dimensional fingerprint, with the
//! natural-language side tagged by the bundled lexicon.
//!
//! Run with: `cargo run --example profile_corpus`

use quest::profile::{ingest, profile_corpus, CatalogSet, ProfileOptions};
use quest::render::{render_profile, Format};
use quest::schema::load_catalog;
use quest::w5h::NlLexicon;
use std::path::Path;

fn main() {
    let fixtures = Path::new(concat!(env!("CARGO_MANIFEST_DIR"), "/../../fixtures"));
    let mut catalogs = CatalogSet::new();
    catalogs.insert(load_catalog(fixtures.join("ehr.schema.json")).expect("catalog loads"));

    let items = ingest(&fixtures.join("mini_ehr.jsonl")).expect("corpus reads");
    let options = ProfileOptions {
        nl_lexicon: Some(NlLexicon::bundled()),
        ..ProfileOptions::default()
    };
    let profile = profile_corpus("mini_ehr", &items, &catalogs, &options).expect("profiles");

    print!("{}", render_profile(&profile, Format::Text).expect("text renders"));
    println!();
    print!("{}", render_profile(&profile, Format::Csv).expect("csv renders"));
}
