//! Compare a locally profiled corpus against a built-in reference
//! fingerprint, and print the whole reference table.
//!
//! Run with: `cargo run --example compare_profiles`

use quest::profile::{
    builtin_reference, builtin_references, compare_profiles, ingest, profile_corpus, CatalogSet,
    ProfileOptions,
};
use quest::render::{render_delta, render_references, Format};
use quest::schema::load_catalog;
use std::path::Path;

fn main() {
    let fixtures = Path::new(concat!(env!("CARGO_MANIFEST_DIR"), "/../../fixtures"));
    let mut catalogs = CatalogSet::new();
    catalogs.insert(load_catalog(fixtures.join("ehr.schema.json")).expect("catalog loads"));

    let items = ingest(&fixtures.join("mini_ehr.jsonl")).expect("corpus reads");
    let profile = profile_corpus("mini_ehr", &items, &catalogs, &ProfileOptions::default())
        .expect("profiles");

    let reference = builtin_reference("EHRSQL").expect("EHRSQL is built in");
    let delta = compare_profiles(&profile.row(), &reference.row()).expect("profiles overlap");
    print!("{}", render_delta(&delta, Format::Text).expect("delta renders"));

    println!();
    print!("{}", render_references(&builtin_references(), Format::Text).expect("refs render"));
}
