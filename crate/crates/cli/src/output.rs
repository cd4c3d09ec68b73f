//! Writing artifacts and the optional gnuplot scripts.

use anyhow::Result;
use necrobifurc::export::{fmt_f64, Cell, Table};
use std::fmt;
use std::fs;
use std::path::Path;

/// Marks an error as an I/O failure (exit code 3).
#[derive(Debug)]
pub struct IoFailure(pub String);

impl fmt::Display for IoFailure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for IoFailure {}

/// How to plot a CSV: columns against `x`, either one curve per listed
/// column or one curve per distinct value of a grouping column.
#[derive(Debug, Clone)]
pub enum Plot {
    Lines { x: String, ys: Vec<String> },
    Grouped { x: String, y: String, group: String },
}

impl Plot {
    pub fn lines(x: &str, ys: &[&str]) -> Self {
        Plot::Lines {
            x: x.into(),
            ys: ys.iter().map(|s| s.to_string()).collect(),
        }
    }

    pub fn grouped(x: &str, y: &str, group: &str) -> Self {
        Plot::Grouped {
            x: x.into(),
            y: y.into(),
            group: group.into(),
        }
    }
}

pub enum Content {
    Csv(Table, Option<Plot>),
    Text(String),
}

pub struct Artifact {
    pub name: String,
    pub content: Content,
}

impl Artifact {
    pub fn csv(name: &str, table: Table, plot: Option<Plot>) -> Self {
        Artifact {
            name: name.into(),
            content: Content::Csv(table, plot),
        }
    }

    pub fn text(name: &str, text: String) -> Self {
        Artifact {
            name: name.into(),
            content: Content::Text(text),
        }
    }
}

fn column(table: &Table, name: &str) -> usize {
    table
        .headers
        .iter()
        .position(|h| h == name)
        .map(|i| i + 1)
        .expect("plot columns are taken from the table header")
}

/// A gnuplot script reading `csv_name` from the script's directory.
pub fn gnuplot_script(csv_name: &str, table: &Table, plot: &Plot) -> String {
    let stem = csv_name.trim_end_matches(".csv");
    let mut s = format!(
        "set datafile separator ','\nset key autotitle columnhead\nset terminal pngcairo size 900,600\nset output '{stem}.png'\n"
    );
    match plot {
        Plot::Lines { x, ys } => {
            let xi = column(table, x);
            s.push_str(&format!("set xlabel '{x}'\n"));
            let curves: Vec<String> = ys
                .iter()
                .map(|y| format!("'{csv_name}' using {xi}:{} with lines", column(table, y)))
                .collect();
            s.push_str(&format!("plot {}\n", curves.join(", \\\n     ")));
        }
        Plot::Grouped { x, y, group } => {
            let (xi, yi, gi) = (column(table, x), column(table, y), column(table, group));
            let mut groups: Vec<String> = Vec::new();
            for row in &table.rows {
                let value = match &row[gi - 1] {
                    Cell::Float(v) => fmt_f64(*v),
                    Cell::Int(v) => v.to_string(),
                    Cell::Bool(v) => v.to_string(),
                    Cell::Text(v) => v.clone(),
                };
                if !groups.contains(&value) {
                    groups.push(value);
                }
            }
            s.push_str(&format!("set xlabel '{x}'\nset ylabel '{y}'\n"));
            let curves: Vec<String> = groups
                .iter()
                .map(|g| {
                    format!(
                        "'{csv_name}' using (stringcolumn({gi}) eq '{g}' ? ${xi} : NaN):{yi} with linespoints title '{group} = {g}'"
                    )
                })
                .collect();
            s.push_str(&format!("plot {}\n", curves.join(", \\\n     ")));
        }
    }
    s
}

/// Renders everything in memory first, then creates `dir` and writes the
/// files. Failures are reported as [`IoFailure`].
pub fn write_all(dir: &Path, artifacts: &[Artifact], gnuplot: bool) -> Result<()> {
    let mut files: Vec<(String, String)> = Vec::new();
    for a in artifacts {
        match &a.content {
            Content::Csv(table, plot) => {
                files.push((a.name.clone(), table.to_csv_string()?));
                if let (true, Some(plot)) = (gnuplot, plot) {
                    let script = a.name.trim_end_matches(".csv").to_string() + ".gp";
                    files.push((script, gnuplot_script(&a.name, table, plot)));
                }
            }
            Content::Text(text) => files.push((a.name.clone(), text.clone())),
        }
    }
    fs::create_dir_all(dir).map_err(|e| {
        IoFailure(format!(
            "cannot create output directory {}: {e}",
            dir.display()
        ))
    })?;
    for (name, body) in files {
        let path = dir.join(&name);
        fs::write(&path, body)
            .map_err(|e| IoFailure(format!("cannot write {}: {e}", path.display())))?;
        eprintln!("wrote {}", path.display());
    }
    Ok(())
}
