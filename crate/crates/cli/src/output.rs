//! Report rendering: every command produces one JSON value plus a list
//! of human-readable sections, rendered as JSON, Markdown, or CSV.

use clap::ValueEnum;
use serde_json::Value;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Md,
    Csv,
}

#[derive(Debug, Clone)]
pub struct Table {
    pub title: String,
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

#[derive(Debug, Clone)]
pub enum Section {
    Para(String),
    Table(Table),
}

#[derive(Debug, Clone)]
pub struct Doc {
    pub json: Value,
    pub sections: Vec<Section>,
}

impl Doc {
    pub fn new(json: Value) -> Doc {
        Doc { json, sections: Vec::new() }
    }

    pub fn para(&mut self, text: impl Into<String>) {
        self.sections.push(Section::Para(text.into()));
    }

    pub fn table(
        &mut self,
        title: impl Into<String>,
        header: &[&str],
        rows: Vec<Vec<String>>,
    ) {
        self.sections.push(Section::Table(Table {
            title: title.into(),
            header: header.iter().map(|h| h.to_string()).collect(),
            rows,
        }));
    }

    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Json => {
                let mut s = serde_json::to_string_pretty(&self.json)
                    .expect("report values are plain data");
                s.push('\n');
                s
            }
            Format::Md => self.render_md(),
            Format::Csv => self.render_csv(),
        }
    }

    fn render_md(&self) -> String {
        let mut out = String::new();
        for section in &self.sections {
            match section {
                Section::Para(p) => {
                    out.push_str(p);
                    out.push_str("\n\n");
                }
                Section::Table(t) => {
                    out.push_str(&format!("### {}\n\n", t.title));
                    out.push_str(&md_row(&t.header));
                    out.push_str(&md_row(
                        &t.header.iter().map(|_| "---".to_string()).collect::<Vec<_>>(),
                    ));
                    for row in &t.rows {
                        out.push_str(&md_row(row));
                    }
                    out.push('\n');
                }
            }
        }
        out
    }

    fn render_csv(&self) -> String {
        let mut out = String::new();
        for section in &self.sections {
            match section {
                Section::Para(p) => {
                    for line in p.lines() {
                        out.push_str("# ");
                        out.push_str(line);
                        out.push('\n');
                    }
                }
                Section::Table(t) => {
                    out.push_str("# ");
                    out.push_str(&t.title);
                    out.push('\n');
                    out.push_str(&csv_row(&t.header));
                    for row in &t.rows {
                        out.push_str(&csv_row(row));
                    }
                }
            }
        }
        out
    }
}

fn md_row(cells: &[String]) -> String {
    let escaped: Vec<String> =
        cells.iter().map(|c| c.replace('|', "\\|")).collect();
    format!("| {} |\n", escaped.join(" | "))
}

fn csv_row(cells: &[String]) -> String {
    let escaped: Vec<String> = cells
        .iter()
        .map(|c| {
            if c.contains([',', '"', '\n']) {
                format!("\"{}\"", c.replace('"', "\"\""))
            } else {
                c.clone()
            }
        })
        .collect();
    let mut line = escaped.join(",");
    line.push('\n');
    line
}

/// Compact one-line rendering for witness cells.
pub fn compact(v: &Value) -> String {
    serde_json::to_string(v).expect("report values are plain data")
}
