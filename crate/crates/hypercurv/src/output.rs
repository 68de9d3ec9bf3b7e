use serde::{Deserialize, Serialize};

use crate::error::{CliError, CliResult};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
    #[default]
    Table,
}

/// Rows of text shared by the CSV and human-readable renderings.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Table {
    pub headers: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new<S: Into<String>>(headers: impl IntoIterator<Item = S>) -> Self {
        Table { headers: headers.into_iter().map(Into::into).collect(), rows: Vec::new() }
    }

    /// Two-column `field, value` table.
    pub fn fields() -> Self {
        Table::new(["field", "value"])
    }

    pub fn row<S: Into<String>>(&mut self, cells: impl IntoIterator<Item = S>) -> &mut Self {
        self.rows.push(cells.into_iter().map(Into::into).collect());
        self
    }

    pub fn field(&mut self, name: &str, value: impl Into<String>) -> &mut Self {
        self.row([name.to_string(), value.into()])
    }

    pub fn render_text(&self) -> String {
        let cols = self.headers.len();
        let mut widths: Vec<usize> = self.headers.iter().map(|h| h.chars().count()).collect();
        for row in &self.rows {
            for (w, cell) in widths.iter_mut().zip(row) {
                *w = (*w).max(cell.chars().count());
            }
        }
        let mut out = String::new();
        let mut line = |cells: &[String]| {
            let mut text = String::new();
            for (i, cell) in cells.iter().enumerate().take(cols) {
                if i + 1 < cols {
                    let pad = widths[i] - cell.chars().count();
                    text.push_str(cell);
                    text.push_str(&" ".repeat(pad + 2));
                } else {
                    text.push_str(cell);
                }
            }
            out.push_str(text.trim_end());
            out.push('\n');
        };
        line(&self.headers);
        let rule: Vec<String> = widths.iter().map(|w| "-".repeat(*w)).collect();
        line(&rule);
        for row in &self.rows {
            line(row);
        }
        out
    }

    pub fn render_csv(&self) -> CliResult<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(&self.headers).map_err(|e| CliError::Output(e.to_string()))?;
        for row in &self.rows {
            w.write_record(row).map_err(|e| CliError::Output(e.to_string()))?;
        }
        let bytes = w.into_inner().map_err(|e| CliError::Output(e.to_string()))?;
        String::from_utf8(bytes).map_err(|e| CliError::Output(e.to_string()))
    }
}

/// What every command produces.
pub trait Report: Serialize {
    fn table(&self) -> Table;

    /// `false` when a checked identity or expected verdict did not hold.
    fn passed(&self) -> bool {
        true
    }
}

pub fn render<R: Report + ?Sized>(report: &R, format: Format) -> CliResult<String> {
    match format {
        Format::Json => {
            let mut text = serde_json::to_string_pretty(report).map_err(|e| CliError::Output(e.to_string()))?;
            text.push('\n');
            Ok(text)
        }
        Format::Csv => report.table().render_csv(),
        Format::Table => Ok(report.table().render_text()),
    }
}

pub fn join<T: AsRef<str>>(xs: impl IntoIterator<Item = T>) -> String {
    let parts: Vec<String> = xs.into_iter().map(|x| x.as_ref().to_string()).collect();
    format!("({})", parts.join(", "))
}

pub fn yes_no(b: bool) -> &'static str {
    if b {
        "yes"
    } else {
        "no"
    }
}

pub fn pass_fail(b: bool) -> &'static str {
    if b {
        "PASS"
    } else {
        "FAIL"
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn text_tables_align() {
        let mut t = Table::new(["k", "ratio"]);
        t.row(["1", "0"]).row(["10", "15/16"]);
        assert_eq!(t.render_text(), "k   ratio\n--  -----\n1   0\n10  15/16\n");
    }

    #[test]
    fn csv_quotes_commas() {
        let mut t = Table::fields();
        t.field("lambdas", "(0, 2)");
        assert_eq!(t.render_csv().unwrap(), "field,value\nlambdas,\"(0, 2)\"\n");
    }
}
