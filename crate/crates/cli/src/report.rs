//! Deterministic CSV/SVG output, written only once a command has fully
//! succeeded.

use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};

/// Full-precision float; `NA` for non-finite values.
pub fn num(x: f64) -> String {
    if x.is_finite() {
        format!("{x:?}")
    } else if x.is_nan() {
        "NA".into()
    } else if x > 0.0 {
        "Inf".into()
    } else {
        "-Inf".into()
    }
}

/// One significant digit in scientific notation with a two-digit exponent,
/// e.g. `-1e-05`.
pub fn sci1(x: f64) -> String {
    if x == 0.0 {
        return "0e+00".into();
    }
    if !x.is_finite() {
        return num(x);
    }
    let s = format!("{x:.0e}");
    let (mantissa, exp) = s.split_once('e').expect("scientific format");
    let exp: i32 = exp.parse().expect("exponent");
    format!(
        "{mantissa}e{}{:02}",
        if exp < 0 { '-' } else { '+' },
        exp.abs()
    )
}

pub struct Table {
    header: Vec<String>,
    rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new<S: Into<String>>(header: impl IntoIterator<Item = S>) -> Self {
        Self {
            header: header.into_iter().map(Into::into).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    pub fn to_bytes(&self) -> Result<Vec<u8>> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(&self.header)?;
        for r in &self.rows {
            w.write_record(r)?;
        }
        Ok(w.into_inner()?)
    }
}

/// p-value colour class against two levels (`hi > lo`): white when not
/// rejected at `hi`, yellow when rejected at `hi` only, red at `lo`.
pub fn p_class(p: f64, alphas: (f64, f64)) -> &'static str {
    if p.is_nan() {
        "na"
    } else if p < alphas.1 {
        "red"
    } else if p < alphas.0 {
        "yellow"
    } else {
        "white"
    }
}

/// Grid of coloured cells: one row per label, one column per year.
pub fn heatmap_svg(rows: &[String], columns: &[String], classes: &[Vec<&str>]) -> String {
    const CELL: usize = 14;
    const LEFT: usize = 60;
    const TOP: usize = 50;
    let width = LEFT + CELL * columns.len() + 10;
    let height = TOP + CELL * rows.len() + 10;
    let mut svg = format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{width}\" height=\"{height}\" font-family=\"sans-serif\" font-size=\"9\">\n"
    );
    for (j, c) in columns.iter().enumerate() {
        let x = LEFT + j * CELL + CELL / 2;
        svg.push_str(&format!(
            "<text x=\"{x}\" y=\"{}\" transform=\"rotate(-90 {x} {})\">{c}</text>\n",
            TOP - 4,
            TOP - 4
        ));
    }
    for (i, (label, row)) in rows.iter().zip(classes).enumerate() {
        let y = TOP + i * CELL;
        svg.push_str(&format!(
            "<text x=\"2\" y=\"{}\">{label}</text>\n",
            y + CELL - 3
        ));
        for (j, class) in row.iter().enumerate() {
            let fill = match *class {
                "red" => "#d62728",
                "yellow" => "#ffdd44",
                "white" => "#ffffff",
                _ => "#cccccc",
            };
            svg.push_str(&format!(
                "<rect x=\"{}\" y=\"{y}\" width=\"{CELL}\" height=\"{CELL}\" fill=\"{fill}\" stroke=\"#888\"/>\n",
                LEFT + j * CELL
            ));
        }
    }
    svg.push_str("</svg>\n");
    svg
}

/// Files staged in memory and committed together.
pub struct Outputs {
    dir: PathBuf,
    files: Vec<(String, Vec<u8>)>,
}

impl Outputs {
    pub fn new(dir: &Path) -> Self {
        Self {
            dir: dir.to_path_buf(),
            files: Vec::new(),
        }
    }

    pub fn add(&mut self, name: &str, bytes: Vec<u8>) {
        self.files.push((name.to_string(), bytes));
    }

    pub fn add_table(&mut self, name: &str, table: &Table) -> Result<()> {
        self.add(name, table.to_bytes()?);
        Ok(())
    }

    /// Writes every file through a temporary name and renames it into place.
    pub fn commit(self) -> Result<Vec<PathBuf>> {
        fs::create_dir_all(&self.dir)
            .with_context(|| format!("creating {}", self.dir.display()))?;
        let mut written = Vec::new();
        for (name, bytes) in self.files {
            let path = self.dir.join(&name);
            let tmp = self.dir.join(format!(".{name}.partial"));
            fs::write(&tmp, bytes).with_context(|| format!("writing {}", tmp.display()))?;
            fs::rename(&tmp, &path).with_context(|| format!("renaming to {}", path.display()))?;
            written.push(path);
        }
        Ok(written)
    }
}
