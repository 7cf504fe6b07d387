//! Command-line entry point: every pipeline stage behind one subcommand,
//! with CI-friendly exit codes.
//!
//! Exit codes: `0` success, `1` usage or IO error (bad flags, unreadable
//! files, malformed catalogs or lexicons), `2` analysis error (the query
//! does not parse, names do not resolve, a corpus is empty, profiles share
//! no known dimension), `3` conformance failure when
//! `--fail-on-nonconformant` is set. Result documents go to stdout;
//! diagnostics and the version banner go to stderr, so stdout is valid in
//! the requested format for every successful run.

use std::ffi::OsString;
use std::io::Read;
use std::path::{Path, PathBuf};

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand};

use crate::decompose::decompose;
use crate::far::{analyze_conformance, ConformanceReport, FarStructure};
use crate::profile::{
    builtin_reference, builtin_references, compare_profiles, ingest, profile_corpus, CatalogSet,
    ProfileError, ProfileOptions, ProfileRow,
};
use crate::render::{render_delta, render_profile, render_references, Format};
use crate::schema::{load_catalog_with, parse_catalog, LoadOptions, SchemaCatalog};
use crate::sql::{parse_query, print_query};
use crate::w5h::{tag_nl, tag_query_with, NlLexicon, QueryDimensions, TaggerOptions};

#[derive(Parser)]
#[command(
    name = "quest",
    version,
    about = "Structural (FAR) and dimensional (W5H) analysis for SQL queries and corpora"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Parse one query and print its canonical form.
    Parse(ParseCmd),
    /// Extract Filter/Aggregate/Return structure and check conformance.
    Check(CheckCmd),
    /// Tag a query's W5H dimensions (or a natural-language question with --nl).
    Tag(TagCmd),
    /// Decompose a nested query into explicit dataflow steps.
    Decompose(DecomposeCmd),
    /// Profile a corpus file into a dimensional fingerprint.
    Profile(ProfileCmd),
    /// Compare two profiles (corpus files or built-in reference names).
    Compare(CompareCmd),
    /// Print the built-in reference profiles.
    Refs(RefsCmd),
}

/// Schema catalog selection, shared by every command that resolves names.
#[derive(Args)]
struct SchemaArgs {
    /// Schema catalog file (repeatable).
    #[arg(long = "schema", value_name = "FILE")]
    schema: Vec<PathBuf>,
    /// Load every catalog in a directory (`*.json` files carrying the
    /// quest-schema format marker; other JSON files are skipped).
    #[arg(long = "schema-dir", value_name = "DIR")]
    schema_dir: Option<PathBuf>,
    /// Ignore unknown keys in catalog documents instead of rejecting them.
    #[arg(long)]
    lax: bool,
}

fn parse_format(s: &str) -> Result<Format, String> {
    s.parse()
}

#[derive(Args)]
struct FormatArg {
    /// Output format: text, csv, json, or svg.
    #[arg(long, value_name = "FORMAT", value_parser = parse_format, default_value = "text")]
    format: Format,
}

#[derive(Args)]
struct ParseCmd {
    #[command(flatten)]
    format: FormatArg,
    /// The query; read from standard input when absent.
    query: Option<String>,
}

#[derive(Args)]
struct CheckCmd {
    #[command(flatten)]
    schema: SchemaArgs,
    #[command(flatten)]
    format: FormatArg,
    /// Exit with code 3 when the query is nonconformant.
    #[arg(long)]
    fail_on_nonconformant: bool,
    /// The query; read from standard input when absent.
    query: Option<String>,
}

#[derive(Args)]
struct TagCmd {
    #[command(flatten)]
    schema: SchemaArgs,
    #[command(flatten)]
    format: FormatArg,
    /// Treat the input as a natural-language question, not SQL.
    #[arg(long)]
    nl: bool,
    /// Lexicon file for --nl (default: QUEST_LEXICON, then the bundled one).
    #[arg(long, value_name = "FILE")]
    lexicon: Option<PathBuf>,
    /// Count WHO-anchored predicates toward the WHO dimension.
    #[arg(long)]
    anchored_counts_who: bool,
    /// The query or question; read from standard input when absent.
    input: Option<String>,
}

#[derive(Args)]
struct DecomposeCmd {
    #[command(flatten)]
    schema: SchemaArgs,
    #[command(flatten)]
    format: FormatArg,
    /// Exit with code 3 when any step is nonconformant.
    #[arg(long)]
    fail_on_nonconformant: bool,
    /// The query; read from standard input when absent.
    query: Option<String>,
}

#[derive(Args)]
struct ProfileCmd {
    #[command(flatten)]
    schema: SchemaArgs,
    #[command(flatten)]
    format: FormatArg,
    /// Also tag natural-language questions and report NL columns.
    #[arg(long)]
    nl: bool,
    /// Lexicon file for --nl (default: QUEST_LEXICON, then the bundled one).
    #[arg(long, value_name = "FILE")]
    lexicon: Option<PathBuf>,
    /// Count WHO-anchored predicates toward the WHO dimension.
    #[arg(long)]
    anchored_counts_who: bool,
    /// The corpus file (one record per line).
    corpus: PathBuf,
}

#[derive(Args)]
struct CompareCmd {
    #[command(flatten)]
    schema: SchemaArgs,
    #[command(flatten)]
    format: FormatArg,
    /// Count WHO-anchored predicates toward the WHO dimension.
    #[arg(long)]
    anchored_counts_who: bool,
    /// Left side: a corpus file or a built-in reference name.
    a: String,
    /// Right side: a corpus file or a built-in reference name.
    b: String,
}

#[derive(Args)]
struct RefsCmd {
    #[command(flatten)]
    format: FormatArg,
}

enum CliError {
    /// Exit 1: the invocation or its input files are unusable.
    Usage(String),
    /// Exit 2: the input was read but does not analyze.
    Analysis(String),
}

impl CliError {
    fn code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 1,
            CliError::Analysis(_) => 2,
        }
    }

    fn message(&self) -> &str {
        match self {
            CliError::Usage(m) | CliError::Analysis(m) => m,
        }
    }
}

fn usage(err: impl std::fmt::Display) -> CliError {
    CliError::Usage(err.to_string())
}

fn analysis(err: impl std::fmt::Display) -> CliError {
    CliError::Analysis(err.to_string())
}

/// Run the CLI. Returns the process exit code; output goes directly to
/// stdout/stderr.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(err) => {
            // Help and version are successes; everything else is usage.
            let code = match err.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = err.print();
            return code;
        }
    };
    eprintln!("quest {}", env!("CARGO_PKG_VERSION"));
    match dispatch(cli.command) {
        Ok((document, code)) => {
            print!("{document}");
            code
        }
        Err(err) => {
            eprintln!("error: {}", err.message());
            err.code()
        }
    }
}

fn dispatch(command: Command) -> Result<(String, i32), CliError> {
    match command {
        Command::Parse(cmd) => run_parse(cmd),
        Command::Check(cmd) => run_check(cmd),
        Command::Tag(cmd) => run_tag(cmd),
        Command::Decompose(cmd) => run_decompose(cmd),
        Command::Profile(cmd) => run_profile(cmd),
        Command::Compare(cmd) => run_compare(cmd),
        Command::Refs(cmd) => Ok((render_references(&builtin_references(), cmd.format.format)
            .map_err(usage)?, 0)),
    }
}

// ---------------------------------------------------------------------------
// Shared plumbing
// ---------------------------------------------------------------------------

fn read_input(positional: Option<String>, what: &str) -> Result<String, CliError> {
    let text = match positional {
        Some(text) => text,
        None => {
            let mut buffer = String::new();
            std::io::stdin().read_to_string(&mut buffer).map_err(usage)?;
            buffer
        }
    };
    let text = text.trim().to_string();
    if text.is_empty() {
        return Err(CliError::Usage(format!(
            "no {what} provided (pass it as an argument or on standard input)"
        )));
    }
    Ok(text)
}

fn load_catalogs(args: &SchemaArgs) -> Result<CatalogSet, CliError> {
    let options = LoadOptions { lax: args.lax };
    let mut set = CatalogSet::new();
    for path in &args.schema {
        let catalog = load_catalog_with(path, options)
            .map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))?;
        set.insert(catalog);
    }
    if let Some(dir) = &args.schema_dir {
        let mut found = Vec::new();
        let entries = std::fs::read_dir(dir)
            .map_err(|e| CliError::Usage(format!("{}: {e}", dir.display())))?;
        for entry in entries {
            let path = entry.map_err(usage)?.path();
            if path.extension().is_some_and(|ext| ext.eq_ignore_ascii_case("json")) {
                found.push(path);
            }
        }
        found.sort();
        for path in &found {
            let text = std::fs::read_to_string(path)
                .map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))?;
            let value: serde_json::Value = serde_json::from_str(&text)
                .map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))?;
            let is_catalog = value
                .get("format")
                .and_then(|f| f.as_str())
                .is_some_and(|f| f.starts_with("quest-schema"));
            if !is_catalog {
                continue;
            }
            let catalog = parse_catalog(&text, options)
                .map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))?;
            set.insert(catalog);
        }
    }
    Ok(set)
}

/// Single-query commands need exactly one catalog to resolve against.
fn single_catalog(set: &CatalogSet) -> Result<&SchemaCatalog, CliError> {
    match set.len() {
        0 => Err(CliError::Usage(
            "a schema catalog is required (use --schema or --schema-dir)".to_string(),
        )),
        1 => Ok(set.default_catalog().expect("single catalog is the default")),
        n => Err(CliError::Usage(format!(
            "this command resolves against exactly one catalog, but {n} were loaded"
        ))),
    }
}

fn resolve_lexicon(flag: &Option<PathBuf>) -> Result<NlLexicon, CliError> {
    if let Some(path) = flag {
        return NlLexicon::load(path).map_err(usage);
    }
    match std::env::var("QUEST_LEXICON") {
        Ok(path) if !path.trim().is_empty() => NlLexicon::load(Path::new(&path)).map_err(usage),
        _ => Ok(NlLexicon::bundled()),
    }
}

fn require_text_or_json(format: Format, what: &'static str) -> Result<(), CliError> {
    match format {
        Format::Text | Format::Json => Ok(()),
        other => Err(CliError::Usage(format!("the {other} format does not support {what}"))),
    }
}

fn pretty(value: &serde_json::Value) -> String {
    serde_json::to_string_pretty(value).expect("documents serialize") + "\n"
}

// ---------------------------------------------------------------------------
// Subcommands
// ---------------------------------------------------------------------------

fn run_parse(cmd: ParseCmd) -> Result<(String, i32), CliError> {
    require_text_or_json(cmd.format.format, "parse output")?;
    let query = read_input(cmd.query, "query")?;
    let ast = parse_query(&query).map_err(analysis)?;
    let canonical = print_query(&ast);
    let document = match cmd.format.format {
        Format::Text => format!("{canonical}\n"),
        Format::Json => pretty(&serde_json::json!({ "canonical": canonical })),
        _ => unreachable!(),
    };
    Ok((document, 0))
}

fn run_check(cmd: CheckCmd) -> Result<(String, i32), CliError> {
    require_text_or_json(cmd.format.format, "conformance reports")?;
    let catalogs = load_catalogs(&cmd.schema)?;
    let catalog = single_catalog(&catalogs)?;
    let query = read_input(cmd.query, "query")?;
    let ast = parse_query(&query).map_err(analysis)?;
    let (far, report) = analyze_conformance(&ast, catalog).map_err(analysis)?;
    let document = match cmd.format.format {
        Format::Text => far_text(&print_query(&ast), &far, &report),
        Format::Json => pretty(&serde_json::json!({
            "canonical": print_query(&ast),
            "far": far,
            "conformance": report,
        })),
        _ => unreachable!(),
    };
    let code = if cmd.fail_on_nonconformant && !report.conformant { 3 } else { 0 };
    Ok((document, code))
}

fn far_text(canonical: &str, far: &FarStructure, report: &ConformanceReport) -> String {
    let mut out = format!("query: {canonical}\n");
    if far.filter.predicates.is_empty() {
        out.push_str("filter: (none)\n");
    } else {
        out.push_str("filter:\n");
        for atom in &far.filter.predicates {
            let mut notes = Vec::new();
            if atom.post_aggregation {
                notes.push("post-aggregation");
            }
            if atom.correlated {
                notes.push("correlated");
            }
            let suffix =
                if notes.is_empty() { String::new() } else { format!("  [{}]", notes.join(", ")) };
            out.push_str(&format!("  {}: {}{}\n", atom.id, atom.text, suffix));
        }
    }
    if far.aggregate.identity {
        out.push_str("aggregate: identity\n");
    } else {
        let mut parts: Vec<String> = far
            .aggregate
            .calls
            .iter()
            .map(|call| format!("{}({})", call.function, call.argument))
            .collect();
        if !far.aggregate.group_keys.is_empty() {
            parts.push(format!("group by {}", far.aggregate.group_keys.join(", ")));
        }
        out.push_str(&format!("aggregate: {}\n", parts.join(", ")));
    }
    let mut ret = format!("{} column(s)", far.return_spec.columns.len());
    if !far.return_spec.ordering.is_empty() {
        let keys: Vec<String> = far
            .return_spec
            .ordering
            .iter()
            .map(|key| format!("{} {}", key.key, key.direction))
            .collect();
        ret.push_str(&format!(", order by {}", keys.join(", ")));
    }
    if let Some(limit) = far.return_spec.limit {
        ret.push_str(&format!(", limit {limit}"));
    }
    out.push_str(&format!("return: {ret}\n"));
    if report.conformant {
        out.push_str("verdict: conformant\n");
    } else {
        let reasons: Vec<&str> = report.reasons().iter().map(|r| r.as_str()).collect();
        out.push_str(&format!("verdict: nonconformant ({})\n", reasons.join(", ")));
    }
    out
}

fn run_tag(cmd: TagCmd) -> Result<(String, i32), CliError> {
    require_text_or_json(cmd.format.format, "dimension tags")?;
    if cmd.nl {
        let question = read_input(cmd.input, "question")?;
        let lexicon = resolve_lexicon(&cmd.lexicon)?;
        let tags = tag_nl(&question, &lexicon);
        let document = match cmd.format.format {
            Format::Text => match &tags {
                Some(tags) => {
                    let dims = dims_text(tags.dimensions.iter());
                    format!(
                        "question: {question}\ndimensions: {dims}\nhow-many: {}\nmatched: {}\n",
                        if tags.how_many { "yes" } else { "no" },
                        if tags.matched.is_empty() {
                            "(none)".to_string()
                        } else {
                            tags.matched.join(", ")
                        },
                    )
                }
                None => format!("question: {question}\ndimensions: (none)\n"),
            },
            Format::Json => pretty(&serde_json::json!({ "question": question, "tags": tags })),
            _ => unreachable!(),
        };
        return Ok((document, 0));
    }
    let catalogs = load_catalogs(&cmd.schema)?;
    let catalog = single_catalog(&catalogs)?;
    let query = read_input(cmd.input, "query")?;
    let ast = parse_query(&query).map_err(analysis)?;
    let options =
        TaggerOptions { anchored_counts_who: cmd.anchored_counts_who, ..TaggerOptions::default() };
    let dimensions = tag_query_with(&ast, catalog, &options).map_err(analysis)?;
    let document = match cmd.format.format {
        Format::Text => tag_text(&print_query(&ast), &dimensions),
        Format::Json => pretty(&serde_json::json!({
            "canonical": print_query(&ast),
            "dimensions": dimensions,
        })),
        _ => unreachable!(),
    };
    Ok((document, 0))
}

fn dims_text(dims: impl Iterator<Item = crate::schema::Dimension>) -> String {
    let parts: Vec<String> = dims.map(|d| d.to_string()).collect();
    if parts.is_empty() {
        "(none)".to_string()
    } else {
        parts.join(", ")
    }
}

fn tag_text(canonical: &str, dimensions: &QueryDimensions) -> String {
    let mut out = format!("query: {canonical}\n");
    out.push_str(&format!("dimensions: {}\n", dims_text(dimensions.engaged.iter())));
    let how = match dimensions.how_kind {
        crate::w5h::HowKind::None => "none",
        crate::w5h::HowKind::HowMany => "how-many",
        crate::w5h::HowKind::Mechanistic => "mechanistic",
        crate::w5h::HowKind::Both => "how-many+mechanistic",
    };
    out.push_str(&format!("how: {how}\n"));
    out.push_str(&format!(
        "aggregation: {}\n",
        if dimensions.has_aggregation { "yes" } else { "no" }
    ));
    if dimensions.predicate_tags.is_empty() {
        out.push_str("predicates: (none)\n");
    } else {
        out.push_str("predicates:\n");
        for tag in &dimensions.predicate_tags {
            let mut line = format!(
                "  {}: {} -> {}",
                tag.predicate_id,
                tag.text,
                dims_text(tag.dimensions.iter())
            );
            if let Some(anchor) = &tag.anchor_entity {
                line.push_str(&format!(
                    "  [who-anchored via {} at {}]",
                    anchor.table, anchor.predicate_id
                ));
            } else if tag.who_anchored {
                line.push_str("  [who-anchored]");
            }
            out.push_str(&line);
            out.push('\n');
        }
    }
    if !dimensions.constraint_operators.is_empty() {
        out.push_str("operators:\n");
        for operator in &dimensions.constraint_operators {
            out.push_str(&format!("  {}\n", operator.describe()));
        }
    }
    out
}

fn run_decompose(cmd: DecomposeCmd) -> Result<(String, i32), CliError> {
    require_text_or_json(cmd.format.format, "decomposition plans")?;
    let catalogs = load_catalogs(&cmd.schema)?;
    let catalog = single_catalog(&catalogs)?;
    let query = read_input(cmd.query, "query")?;
    let ast = parse_query(&query).map_err(analysis)?;
    let plan = decompose(&ast, catalog).map_err(analysis)?;
    let document = match cmd.format.format {
        Format::Text => plan.to_text(),
        Format::Json => {
            pretty(&serde_json::to_value(&plan).expect("plans serialize"))
        }
        _ => unreachable!(),
    };
    let code = if cmd.fail_on_nonconformant && !plan.all_steps_conformant() { 3 } else { 0 };
    Ok((document, code))
}

fn profile_options(
    nl: bool,
    lexicon: &Option<PathBuf>,
    anchored_counts_who: bool,
) -> Result<ProfileOptions, CliError> {
    Ok(ProfileOptions {
        tagger: TaggerOptions { anchored_counts_who, ..TaggerOptions::default() },
        nl_lexicon: if nl { Some(resolve_lexicon(lexicon)?) } else { None },
    })
}

fn run_profile(cmd: ProfileCmd) -> Result<(String, i32), CliError> {
    let catalogs = load_catalogs(&cmd.schema)?;
    if catalogs.is_empty() {
        return Err(CliError::Usage(
            "a schema catalog is required (use --schema or --schema-dir)".to_string(),
        ));
    }
    let options = profile_options(cmd.nl, &cmd.lexicon, cmd.anchored_counts_who)?;
    let items = ingest(&cmd.corpus)
        .map_err(|e| CliError::Usage(format!("{}: {e}", cmd.corpus.display())))?;
    let name = corpus_name(&cmd.corpus);
    let profile = profile_corpus(&name, &items, &catalogs, &options).map_err(profile_error)?;
    let document = render_profile(&profile, cmd.format.format).map_err(usage)?;
    Ok((document, 0))
}

fn corpus_name(path: &Path) -> String {
    path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_else(|| {
        path.display().to_string()
    })
}

fn profile_error(err: ProfileError) -> CliError {
    match err {
        ProfileError::EmptyCorpus => analysis(err),
    }
}

fn run_compare(cmd: CompareCmd) -> Result<(String, i32), CliError> {
    let catalogs = load_catalogs(&cmd.schema)?;
    let options = profile_options(false, &None, cmd.anchored_counts_who)?;
    let a = resolve_side(&cmd.a, &catalogs, &options)?;
    let b = resolve_side(&cmd.b, &catalogs, &options)?;
    let delta = compare_profiles(&a, &b).map_err(analysis)?;
    let document = render_delta(&delta, cmd.format.format).map_err(usage)?;
    Ok((document, 0))
}

/// A comparison side is a corpus file when the path exists, otherwise a
/// built-in reference name.
fn resolve_side(
    spec: &str,
    catalogs: &CatalogSet,
    options: &ProfileOptions,
) -> Result<ProfileRow, CliError> {
    let path = Path::new(spec);
    if path.exists() {
        if catalogs.is_empty() {
            return Err(CliError::Usage(format!(
                "a schema catalog is required to profile `{spec}` (use --schema)"
            )));
        }
        let items =
            ingest(path).map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))?;
        let profile =
            profile_corpus(&corpus_name(path), &items, catalogs, options).map_err(profile_error)?;
        return Ok(profile.row());
    }
    match builtin_reference(spec) {
        Some(reference) => Ok(reference.row()),
        None => Err(CliError::Usage(format!(
            "`{spec}` is neither a corpus file nor a built-in reference \
             (built-ins: EHRSQL, WikiSQL, ATIS, Spider, BIRD)"
        ))),
    }
}
