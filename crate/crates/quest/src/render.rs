//! Report rendering for profiles, reference tables, and comparisons.
//!
//! Four formats: `text` (aligned, human-first), `csv` (fixed header,
//! machine-first), `json` (tagged cells, lossless), and `svg` (a
//! self-contained heatmap). Unknown cells render as `-` in text, empty in
//! CSV, a tagged `unknown` object in JSON, and a hatched cell in SVG —
//! never as zero. Upper-bound cells render as `<1`‑style labels.
//!
//! Rendering is deterministic: the same profile always produces the same
//! bytes.

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::profile::{CorpusProfile, ProfileCell, ProfileDelta, ProfileRow, ReferenceProfile};
use crate::schema::Dimension;

/// Output format selector.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Text,
    Csv,
    Json,
    Svg,
}

impl Format {
    pub fn name(self) -> &'static str {
        match self {
            Format::Text => "text",
            Format::Csv => "csv",
            Format::Json => "json",
            Format::Svg => "svg",
        }
    }
}

impl fmt::Display for Format {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Format {
    type Err = String;

    fn from_str(s: &str) -> Result<Format, String> {
        match s.to_ascii_lowercase().as_str() {
            "text" => Ok(Format::Text),
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            "svg" => Ok(Format::Svg),
            other => Err(format!("unknown format `{other}` (expected text, csv, json, or svg)")),
        }
    }
}

#[derive(Debug, Error)]
pub enum RenderError {
    #[error("the {format} format does not support {what}")]
    UnsupportedFormat { what: &'static str, format: Format },
}

const TABLE_HEADERS: [&str; 8] = ["dataset", "who", "what", "where", "when", "why", "how", "agg"];

fn cell_text(cell: ProfileCell) -> String {
    match cell {
        ProfileCell::Known { value } => format!("{value:.1}"),
        ProfileCell::UpperBound { value } => format!("<{}", trim_number(value)),
        ProfileCell::Unknown => "-".to_string(),
    }
}

fn cell_csv(cell: ProfileCell) -> String {
    match cell {
        ProfileCell::Known { value } => format!("{value:.1}"),
        ProfileCell::UpperBound { value } => format!("<{}", trim_number(value)),
        ProfileCell::Unknown => String::new(),
    }
}

fn trim_number(value: f64) -> String {
    if value.fract() == 0.0 {
        format!("{value:.0}")
    } else {
        format!("{value:.1}")
    }
}

fn cell_json(cell: ProfileCell) -> serde_json::Value {
    serde_json::to_value(cell).expect("cells serialize")
}

fn row_cells_json(row: &ProfileRow) -> serde_json::Value {
    let mut map = serde_json::Map::new();
    for dim in Dimension::ALL {
        map.insert(dim.name().to_string(), cell_json(row.cells[dim.index()]));
    }
    map.insert("agg".to_string(), cell_json(row.aggregation));
    serde_json::Value::Object(map)
}

/// Render rows as an aligned text table. Numeric columns are
/// right-aligned; the dataset column is left-aligned.
fn render_table(rows: &[ProfileRow]) -> String {
    let mut grid: Vec<[String; 8]> = Vec::with_capacity(rows.len() + 1);
    grid.push(TABLE_HEADERS.map(str::to_string));
    for row in rows {
        let mut line = [const { String::new() }; 8];
        line[0] = row.dataset.clone();
        for dim in Dimension::ALL {
            line[dim.index() + 1] = cell_text(row.cells[dim.index()]);
        }
        line[7] = cell_text(row.aggregation);
        grid.push(line);
    }
    let mut widths = [0usize; 8];
    for line in &grid {
        for (w, cell) in widths.iter_mut().zip(line) {
            *w = (*w).max(cell.len());
        }
    }
    let mut out = String::new();
    for line in &grid {
        let mut rendered = format!("{:<width$}", line[0], width = widths[0]);
        for col in 1..8 {
            rendered.push_str("  ");
            rendered.push_str(&format!("{:>width$}", line[col], width = widths[col]));
        }
        out.push_str(rendered.trim_end());
        out.push('\n');
    }
    out
}

fn render_csv_rows(rows: &[ProfileRow], nl: Option<&[String; 6]>) -> String {
    let mut out = String::from("dataset,who,what,where,when,why,how,agg");
    if nl.is_some() {
        for dim in Dimension::ALL {
            out.push(',');
            out.push_str(dim.name());
            out.push_str("_nl");
        }
    }
    out.push('\n');
    for row in rows {
        out.push_str(&csv_field(&row.dataset));
        for dim in Dimension::ALL {
            out.push(',');
            out.push_str(&cell_csv(row.cells[dim.index()]));
        }
        out.push(',');
        out.push_str(&cell_csv(row.aggregation));
        if let Some(values) = nl {
            for value in values {
                out.push(',');
                out.push_str(value);
            }
        }
        out.push('\n');
    }
    out
}

fn csv_field(text: &str) -> String {
    if text.contains([',', '"', '\n']) {
        format!("\"{}\"", text.replace('"', "\"\""))
    } else {
        text.to_string()
    }
}

/// Render one corpus profile.
pub fn render_profile(profile: &CorpusProfile, format: Format) -> Result<String, RenderError> {
    let row = profile.row();
    let nl_values = profile.nl.as_ref().map(|nl| {
        let ratio = |count: u64| {
            if nl.n_questions == 0 {
                0.0
            } else {
                count as f64 / nl.n_questions as f64 * 100.0
            }
        };
        Dimension::ALL.map(|dim| format!("{:.1}", ratio(nl.dim_counts[dim.index()])))
    });
    match format {
        Format::Text => {
            let mut out = format!(
                "corpus: {}\nrecords: {} total = {} parsed + {} unsupported + {} unresolved + {} failed\n",
                profile.name,
                profile.n_total,
                profile.n_parsed,
                profile.n_unsupported,
                profile.n_unresolved,
                profile.n_failed,
            );
            out.push_str(&format!(
                "conformant: {}/{}\ndimensionless: {}/{}\nhow-many: {}/{}, mechanistic: {}/{}\n",
                profile.conformant_count,
                profile.n_parsed,
                profile.dimensionless_count,
                profile.n_parsed,
                profile.how_many_count,
                profile.n_parsed,
                profile.mechanistic_count,
                profile.n_parsed,
            ));
            if let Some(nl) = &profile.nl {
                out.push_str(&format!("nl questions: {}\n", nl.n_questions));
            }
            out.push('\n');
            let mut rows = vec![row];
            if let (Some(values), Some(_)) = (&nl_values, &profile.nl) {
                let mut cells = [ProfileCell::Unknown; 6];
                for dim in Dimension::ALL {
                    cells[dim.index()] =
                        ProfileCell::known(values[dim.index()].parse::<f64>().unwrap());
                }
                rows.push(ProfileRow {
                    dataset: format!("{} (nl)", profile.name),
                    cells,
                    aggregation: ProfileCell::Unknown,
                });
            }
            out.push_str(&render_table(&rows));
            Ok(out)
        }
        Format::Csv => Ok(render_csv_rows(&[row], nl_values.as_ref())),
        Format::Json => {
            let mut value = serde_json::to_value(profile).expect("profiles serialize");
            let object = value.as_object_mut().expect("profile is an object");
            object.insert("percent".to_string(), row_cells_json(&row));
            if let Some(values) = &nl_values {
                let mut map = serde_json::Map::new();
                for dim in Dimension::ALL {
                    let number: f64 = values[dim.index()].parse().unwrap();
                    map.insert(
                        dim.name().to_string(),
                        cell_json(ProfileCell::known(number)),
                    );
                }
                object.insert("nl_percent".to_string(), serde_json::Value::Object(map));
            }
            Ok(serde_json::to_string_pretty(&value).expect("profiles serialize") + "\n")
        }
        Format::Svg => Ok(render_svg(&[row])),
    }
}

/// Render the reference table.
pub fn render_references(
    references: &[ReferenceProfile],
    format: Format,
) -> Result<String, RenderError> {
    let rows: Vec<ProfileRow> = references.iter().map(ReferenceProfile::row).collect();
    match format {
        Format::Text => {
            let mut out = render_table(&rows);
            out.push_str("\nnotes:\n");
            for reference in references {
                out.push_str(&format!("  {}: {}\n", reference.dataset, reference.note));
            }
            Ok(out)
        }
        Format::Csv => Ok(render_csv_rows(&rows, None)),
        Format::Json => {
            let items: Vec<serde_json::Value> = references
                .iter()
                .map(|reference| {
                    serde_json::json!({
                        "dataset": reference.dataset,
                        "percent": row_cells_json(&reference.row()),
                        "note": reference.note,
                    })
                })
                .collect();
            Ok(serde_json::to_string_pretty(&items).expect("references serialize") + "\n")
        }
        Format::Svg => Ok(render_svg(&rows)),
    }
}

/// Render a comparison. The heatmap format has no delta rendering.
pub fn render_delta(delta: &ProfileDelta, format: Format) -> Result<String, RenderError> {
    match format {
        Format::Text => {
            let mut grid: Vec<[String; 3]> = Vec::new();
            grid.push(["metric".to_string(), "diff".to_string(), "ratio".to_string()]);
            for cell in &delta.cells {
                grid.push([
                    cell.metric.clone(),
                    cell.diff.map_or("-".to_string(), |d| format!("{d:+.1}")),
                    cell.ratio.map_or("-".to_string(), |r| format!("{r:.3}")),
                ]);
            }
            let mut widths = [0usize; 3];
            for line in &grid {
                for (w, cell) in widths.iter_mut().zip(line) {
                    *w = (*w).max(cell.len());
                }
            }
            let mut out = format!("compare: {} vs {}\n", delta.a, delta.b);
            for line in &grid {
                out.push_str(
                    format!(
                        "{:<w0$}  {:>w1$}  {:>w2$}",
                        line[0],
                        line[1],
                        line[2],
                        w0 = widths[0],
                        w1 = widths[1],
                        w2 = widths[2]
                    )
                    .trim_end(),
                );
                out.push('\n');
            }
            out.push_str(&format!("mismatch: {:.3}\n", delta.mismatch));
            Ok(out)
        }
        Format::Csv => {
            let mut out = String::from("metric,diff,ratio\n");
            for cell in &delta.cells {
                out.push_str(&format!(
                    "{},{},{}\n",
                    cell.metric,
                    cell.diff.map_or(String::new(), |d| format!("{d:.1}")),
                    cell.ratio.map_or(String::new(), |r| format!("{r:.3}")),
                ));
            }
            out.push_str(&format!("mismatch,{:.3},\n", delta.mismatch));
            Ok(out)
        }
        Format::Json => Ok(serde_json::to_string_pretty(delta).expect("deltas serialize") + "\n"),
        Format::Svg => Err(RenderError::UnsupportedFormat { what: "comparisons", format }),
    }
}

// ---------------------------------------------------------------------------
// SVG heatmap
// ---------------------------------------------------------------------------

/// Color ramp stops, dark-to-bright, sampled at 0, 25, 50, 75, 100 percent.
const RAMP: [(u8, u8, u8); 5] = [
    (0x0d, 0x08, 0x87),
    (0x7e, 0x03, 0xa8),
    (0xcc, 0x47, 0x78),
    (0xf8, 0x95, 0x40),
    (0xf0, 0xf9, 0x21),
];

fn ramp_color(percent: f64) -> (u8, u8, u8) {
    let t = (percent / 100.0).clamp(0.0, 1.0) * 4.0;
    let segment = (t.floor() as usize).min(3);
    let f = t - segment as f64;
    let (r0, g0, b0) = RAMP[segment];
    let (r1, g1, b1) = RAMP[segment + 1];
    let lerp = |a: u8, b: u8| (a as f64 + (b as f64 - a as f64) * f).round() as u8;
    (lerp(r0, r1), lerp(g0, g1), lerp(b0, b1))
}

fn hex_color((r, g, b): (u8, u8, u8)) -> String {
    format!("#{r:02x}{g:02x}{b:02x}")
}

/// Black text on bright cells, white on dark ones.
fn label_color((r, g, b): (u8, u8, u8)) -> &'static str {
    let luminance = 0.299 * r as f64 + 0.587 * g as f64 + 0.114 * b as f64;
    if luminance > 150.0 {
        "#1a1a1a"
    } else {
        "#ffffff"
    }
}

fn render_svg(rows: &[ProfileRow]) -> String {
    const MARGIN: f64 = 10.0;
    const LABEL_W: f64 = 130.0;
    const CELL_W: f64 = 88.0;
    const CELL_H: f64 = 44.0;
    const HEADER_H: f64 = 32.0;
    let columns = 7usize;
    let width = MARGIN * 2.0 + LABEL_W + columns as f64 * CELL_W;
    let height = MARGIN * 2.0 + HEADER_H + rows.len() as f64 * CELL_H;

    let mut svg = format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{width:.0}\" height=\"{height:.0}\" \
         viewBox=\"0 0 {width:.0} {height:.0}\" font-family=\"monospace\" font-size=\"13\">\n"
    );
    svg.push_str(
        "  <defs>\n    <pattern id=\"unknown\" width=\"8\" height=\"8\" \
         patternUnits=\"userSpaceOnUse\" patternTransform=\"rotate(45)\">\n      \
         <rect width=\"8\" height=\"8\" fill=\"#e8e8e8\"/>\n      \
         <line x1=\"0\" y1=\"0\" x2=\"0\" y2=\"8\" stroke=\"#b0b0b0\" stroke-width=\"3\"/>\n    \
         </pattern>\n  </defs>\n",
    );
    svg.push_str(&format!(
        "  <rect x=\"0\" y=\"0\" width=\"{width:.0}\" height=\"{height:.0}\" fill=\"#ffffff\"/>\n"
    ));

    for (col, header) in TABLE_HEADERS[1..].iter().enumerate() {
        let x = MARGIN + LABEL_W + col as f64 * CELL_W + CELL_W / 2.0;
        let y = MARGIN + HEADER_H - 10.0;
        svg.push_str(&format!(
            "  <text x=\"{x:.0}\" y=\"{y:.0}\" text-anchor=\"middle\" fill=\"#1a1a1a\" \
             font-weight=\"bold\">{}</text>\n",
            header.to_uppercase()
        ));
    }

    for (row_index, row) in rows.iter().enumerate() {
        let top = MARGIN + HEADER_H + row_index as f64 * CELL_H;
        let label_y = top + CELL_H / 2.0 + 4.0;
        svg.push_str(&format!(
            "  <text x=\"{:.0}\" y=\"{label_y:.0}\" text-anchor=\"end\" fill=\"#1a1a1a\">{}</text>\n",
            MARGIN + LABEL_W - 8.0,
            xml_escape(&row.dataset)
        ));
        let mut cells: Vec<ProfileCell> = row.cells.to_vec();
        cells.push(row.aggregation);
        for (col, cell) in cells.iter().enumerate() {
            let x = MARGIN + LABEL_W + col as f64 * CELL_W;
            match cell {
                ProfileCell::Known { value } | ProfileCell::UpperBound { value } => {
                    let color = ramp_color(*value);
                    svg.push_str(&format!(
                        "  <rect x=\"{x:.0}\" y=\"{top:.0}\" width=\"{CELL_W:.0}\" \
                         height=\"{CELL_H:.0}\" fill=\"{}\" stroke=\"#ffffff\"/>\n",
                        hex_color(color)
                    ));
                    svg.push_str(&format!(
                        "  <text x=\"{:.0}\" y=\"{label_y:.0}\" text-anchor=\"middle\" \
                         fill=\"{}\">{}</text>\n",
                        x + CELL_W / 2.0,
                        label_color(color),
                        xml_escape(&cell_text(*cell))
                    ));
                }
                ProfileCell::Unknown => {
                    svg.push_str(&format!(
                        "  <rect x=\"{x:.0}\" y=\"{top:.0}\" width=\"{CELL_W:.0}\" \
                         height=\"{CELL_H:.0}\" fill=\"url(#unknown)\" stroke=\"#ffffff\"/>\n"
                    ));
                }
            }
        }
    }
    svg.push_str("</svg>\n");
    svg
}

fn xml_escape(text: &str) -> String {
    text.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}
