//! Emissions panels: CSV loading, unit conversion and per-year descriptive
//! statistics.

use std::collections::{BTreeSet, HashMap};
use std::io::{Read, Write};
use std::path::Path;
use std::str::FromStr;

use serde::Serialize;

use crate::error::{Error, Result};

/// Mass of CO₂ per unit mass of carbon.
pub const CARBON_TO_CO2: f64 = 3.664;

/// Token written for (and read as) a missing cell.
pub const MISSING_TOKEN: &str = "NA";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PanelFormat {
    /// `country,year,emissions`, one observation per row.
    Long,
    /// `country,<year1>,<year2>,...`, one country per row.
    Wide,
}

impl FromStr for PanelFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "long" => Ok(PanelFormat::Long),
            "wide" => Ok(PanelFormat::Wide),
            other => Err(Error::InvalidParameter(format!(
                "unknown panel format `{other}`"
            ))),
        }
    }
}

/// Country × year table of emissions in MtCO₂/year.
///
/// Every present value is strictly positive and finite, country identifiers
/// are unique and years strictly increasing. Missing cells are `None`.
#[derive(Debug, Clone, PartialEq)]
pub struct EmissionsPanel {
    countries: Vec<String>,
    years: Vec<i32>,
    // values[country][year]
    values: Vec<Vec<Option<f64>>>,
}

impl EmissionsPanel {
    pub fn new(
        countries: Vec<String>,
        years: Vec<i32>,
        values: Vec<Vec<Option<f64>>>,
    ) -> Result<Self> {
        let mut seen = BTreeSet::new();
        for c in &countries {
            if !seen.insert(c.as_str()) {
                return Err(Error::InvalidParameter(format!("duplicate country `{c}`")));
            }
        }
        if years.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidParameter(
                "years must be strictly increasing".into(),
            ));
        }
        if values.len() != countries.len() || values.iter().any(|row| row.len() != years.len()) {
            return Err(Error::InvalidParameter(
                "value matrix does not match panel shape".into(),
            ));
        }
        for (ci, row) in values.iter().enumerate() {
            for (yi, v) in row.iter().enumerate() {
                if let Some(v) = *v {
                    if !(v > 0.0 && v.is_finite()) {
                        return Err(Error::InvalidParameter(format!(
                            "non-positive value {v} for `{}` in {}",
                            countries[ci], years[yi]
                        )));
                    }
                }
            }
        }
        Ok(Self {
            countries,
            years,
            values,
        })
    }

    pub fn countries(&self) -> &[String] {
        &self.countries
    }

    pub fn years(&self) -> &[i32] {
        &self.years
    }

    pub fn n_countries(&self) -> usize {
        self.countries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.countries.is_empty() || self.years.is_empty()
    }

    pub fn year_index(&self, year: i32) -> Option<usize> {
        self.years.binary_search(&year).ok()
    }

    pub fn get(&self, country: &str, year: i32) -> Option<f64> {
        let ci = self.countries.iter().position(|c| c == country)?;
        let yi = self.year_index(year)?;
        self.values[ci][yi]
    }

    /// Present values for `year`, paired with their country identifiers, in
    /// panel country order.
    pub fn cross_section(&self, year: i32) -> Result<Vec<(&str, f64)>> {
        let yi = self.year_index(year).ok_or(Error::UnknownYear(year))?;
        Ok(self
            .countries
            .iter()
            .zip(&self.values)
            .filter_map(|(c, row)| row[yi].map(|v| (c.as_str(), v)))
            .collect())
    }

    /// Present values for `year`.
    pub fn cross_section_values(&self, year: i32) -> Result<Vec<f64>> {
        Ok(self
            .cross_section(year)?
            .into_iter()
            .map(|(_, v)| v)
            .collect())
    }

    /// Restricts the panel to years in `[from, to]`.
    pub fn select_years(&self, from: i32, to: i32) -> Self {
        let keep: Vec<usize> = (0..self.years.len())
            .filter(|&i| self.years[i] >= from && self.years[i] <= to)
            .collect();
        Self {
            countries: self.countries.clone(),
            years: keep.iter().map(|&i| self.years[i]).collect(),
            values: self
                .values
                .iter()
                .map(|row| keep.iter().map(|&i| row[i]).collect())
                .collect(),
        }
    }

    /// Converts carbon mass (MtC/year) to CO₂ mass (MtCO₂/year).
    pub fn convert_carbon_to_co2(&self) -> Self {
        Self {
            countries: self.countries.clone(),
            years: self.years.clone(),
            values: self
                .values
                .iter()
                .map(|row| row.iter().map(|v| v.map(|x| x * CARBON_TO_CO2)).collect())
                .collect(),
        }
    }

    pub fn summarize_year(&self, year: i32) -> Result<YearSummary> {
        let values = self.cross_section_values(year)?;
        YearSummary::from_values(year, &values)
    }

    /// Writes the canonical long format; missing cells are written as `NA`
    /// so that reloading reproduces the panel exactly.
    pub fn write_long<W: Write>(&self, writer: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        w.write_record(["country", "year", "emissions"])?;
        for (c, row) in self.countries.iter().zip(&self.values) {
            for (y, v) in self.years.iter().zip(row) {
                let cell = match v {
                    Some(x) => format!("{x:?}"),
                    None => MISSING_TOKEN.to_string(),
                };
                w.write_record([c.as_str(), &y.to_string(), &cell])?;
            }
        }
        w.flush()?;
        Ok(())
    }

    pub fn save_long(&self, path: impl AsRef<Path>) -> Result<()> {
        let file = std::fs::File::create(path)?;
        self.write_long(std::io::BufWriter::new(file))
    }
}

/// Parses one cell. `Ok(None)` for missing (empty, `NA`, non-numeric, NaN),
/// an error for zero, negative or infinite values.
fn parse_cell(raw: &str, line: usize) -> Result<Option<f64>> {
    let s = raw.trim();
    if s.is_empty() || s.eq_ignore_ascii_case(MISSING_TOKEN) {
        return Ok(None);
    }
    match s.parse::<f64>() {
        Ok(v) if v.is_nan() => Ok(None),
        Ok(v) if v > 0.0 && v.is_finite() => Ok(Some(v)),
        Ok(v) => Err(Error::InvalidRow {
            row: line,
            message: format!("emission value {v} is not strictly positive and finite"),
        }),
        Err(_) => Ok(None),
    }
}

fn line_of(record: &csv::StringRecord, fallback: usize) -> usize {
    record
        .position()
        .map(|p| p.line() as usize)
        .unwrap_or(fallback)
}

pub fn read_panel<R: Read>(reader: R, format: PanelFormat) -> Result<EmissionsPanel> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(false)
        .trim(csv::Trim::All)
        .from_reader(reader);
    let header: Vec<String> = rdr
        .headers()?
        .iter()
        .map(|h| h.trim().to_string())
        .collect();
    match format {
        PanelFormat::Long => read_long(&mut rdr, &header),
        PanelFormat::Wide => read_wide(&mut rdr, &header),
    }
}

pub fn load_panel(path: impl AsRef<Path>, format: PanelFormat) -> Result<EmissionsPanel> {
    let file = std::fs::File::open(path)?;
    read_panel(std::io::BufReader::new(file), format)
}

fn read_long<R: Read>(rdr: &mut csv::Reader<R>, header: &[String]) -> Result<EmissionsPanel> {
    let expected = ["country", "year", "emissions"];
    if header.len() != 3
        || !header
            .iter()
            .zip(expected)
            .all(|(h, e)| h.eq_ignore_ascii_case(e))
    {
        return Err(Error::MalformedHeader(format!(
            "expected `country,year,emissions`, found `{}`",
            header.join(",")
        )));
    }
    let mut countries: Vec<String> = Vec::new();
    let mut country_index: HashMap<String, usize> = HashMap::new();
    let mut cells: HashMap<(usize, i32), (Option<f64>, usize)> = HashMap::new();
    let mut years = BTreeSet::new();
    for (i, record) in rdr.records().enumerate() {
        let record = record?;
        let line = line_of(&record, i + 2);
        let country = record[0].to_string();
        if country.is_empty() {
            return Err(Error::InvalidRow {
                row: line,
                message: "empty country".into(),
            });
        }
        let year: i32 = record[1].parse().map_err(|_| Error::InvalidRow {
            row: line,
            message: format!("year `{}` is not an integer", &record[1]),
        })?;
        let value = parse_cell(&record[2], line)?;
        let next = countries.len();
        let ci = *country_index.entry(country.clone()).or_insert_with(|| {
            countries.push(country.clone());
            next
        });
        if cells.insert((ci, year), (value, line)).is_some() {
            return Err(Error::DuplicateEntry {
                country,
                year,
                row: line,
            });
        }
        years.insert(year);
    }
    let years: Vec<i32> = years.into_iter().collect();
    let values = (0..countries.len())
        .map(|ci| {
            years
                .iter()
                .map(|y| cells.get(&(ci, *y)).and_then(|c| c.0))
                .collect()
        })
        .collect();
    EmissionsPanel::new(countries, years, values)
}

fn read_wide<R: Read>(rdr: &mut csv::Reader<R>, header: &[String]) -> Result<EmissionsPanel> {
    if header.len() < 2 || !header[0].eq_ignore_ascii_case("country") {
        return Err(Error::MalformedHeader(format!(
            "expected `country,<year>,...`, found `{}`",
            header.join(",")
        )));
    }
    let mut column_years = Vec::with_capacity(header.len() - 1);
    for h in &header[1..] {
        let y: i32 = h
            .parse()
            .map_err(|_| Error::MalformedHeader(format!("column `{h}` is not a year")))?;
        column_years.push(y);
    }
    let mut years = column_years.clone();
    years.sort_unstable();
    if years.windows(2).any(|w| w[0] == w[1]) {
        return Err(Error::MalformedHeader("repeated year column".into()));
    }
    let slot: Vec<usize> = column_years
        .iter()
        .map(|y| years.binary_search(y).expect("present"))
        .collect();

    let mut countries = Vec::new();
    let mut values = Vec::new();
    let mut seen = BTreeSet::new();
    for (i, record) in rdr.records().enumerate() {
        let record = record?;
        let line = line_of(&record, i + 2);
        let country = record[0].to_string();
        if country.is_empty() {
            return Err(Error::InvalidRow {
                row: line,
                message: "empty country".into(),
            });
        }
        if !seen.insert(country.clone()) {
            return Err(Error::DuplicateEntry {
                country,
                year: years[0],
                row: line,
            });
        }
        let mut row = vec![None; years.len()];
        for (j, raw) in record.iter().skip(1).enumerate() {
            row[slot[j]] = parse_cell(raw, line)?;
        }
        countries.push(country);
        values.push(row);
    }
    EmissionsPanel::new(countries, years, values)
}

/// Descriptive statistics of one cross-section.
///
/// `sd` is the sample standard deviation (divisor `n − 1`). Skewness and
/// kurtosis are moment ratios `m₃/m₂^{3/2}` and `m₄/m₂²` of the divide-by-n
/// central moments (kurtosis is not excess); both are `None` when the
/// cross-section has zero spread.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct YearSummary {
    pub year: i32,
    pub n: usize,
    pub max: f64,
    pub min: f64,
    pub mean: f64,
    pub sd: f64,
    pub skewness: Option<f64>,
    pub kurtosis: Option<f64>,
}

impl YearSummary {
    pub fn from_values(year: i32, values: &[f64]) -> Result<Self> {
        let n = values.len();
        if n < 2 {
            return Err(Error::InsufficientData {
                required: 2,
                available: n,
            });
        }
        let nf = n as f64;
        let mean = values.iter().sum::<f64>() / nf;
        let (mut m2, mut m3, mut m4) = (0.0, 0.0, 0.0);
        for &v in values {
            let d = v - mean;
            let d2 = d * d;
            m2 += d2;
            m3 += d2 * d;
            m4 += d2 * d2;
        }
        let sd = (m2 / (nf - 1.0)).sqrt();
        m2 /= nf;
        m3 /= nf;
        m4 /= nf;
        let (skewness, kurtosis) = if m2 > 0.0 {
            (Some(m3 / m2.powf(1.5)), Some(m4 / (m2 * m2)))
        } else {
            (None, None)
        };
        Ok(Self {
            year,
            n,
            max: values.iter().copied().fold(f64::NEG_INFINITY, f64::max),
            min: values.iter().copied().fold(f64::INFINITY, f64::min),
            mean: mean.clamp(
                values.iter().copied().fold(f64::INFINITY, f64::min),
                values.iter().copied().fold(f64::NEG_INFINITY, f64::max),
            ),
            sd,
            skewness,
            kurtosis,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn long(s: &str) -> Result<EmissionsPanel> {
        read_panel(s.as_bytes(), PanelFormat::Long)
    }

    #[test]
    fn loads_long_panel() {
        let p = long("country,year,emissions\nA,1970,1.5\nA,1971,2.0\nA,1972,2.5\n").unwrap();
        assert_eq!(p.n_countries(), 1);
        assert_eq!(p.years(), &[1970, 1971, 1972]);
        assert_eq!(p.get("A", 1971), Some(2.0));
    }

    #[test]
    fn na_and_text_become_missing() {
        let p = long("country,year,emissions\nA,1970,NA\nA,1971,n/a\nA,1972,\nB,1970,3\n").unwrap();
        assert_eq!(p.get("A", 1970), None);
        assert_eq!(p.get("A", 1971), None);
        assert_eq!(p.get("A", 1972), None);
        assert_eq!(p.get("B", 1971), None);
        assert_eq!(p.cross_section_values(1970).unwrap(), vec![3.0]);
    }

    #[test]
    fn negative_value_names_the_row() {
        let err = long("country,year,emissions\nA,1970,1.0\nA,1971,-1.0\n").unwrap_err();
        match err {
            Error::InvalidRow { row, .. } => assert_eq!(row, 3),
            other => panic!("unexpected {other:?}"),
        }
        assert!(long("country,year,emissions\nA,1970,0\n").is_err());
    }

    #[test]
    fn malformed_header_and_duplicates() {
        assert!(matches!(
            long("nation,year,value\nA,1970,1\n"),
            Err(Error::MalformedHeader(_))
        ));
        let dup = long("country,year,emissions\nA,1970,1\nA,1970,2\n").unwrap_err();
        assert!(matches!(dup, Error::DuplicateEntry { row: 3, .. }));
        assert!(matches!(
            long("country,year,emissions\nA,x,1\n"),
            Err(Error::InvalidRow { row: 2, .. })
        ));
    }

    #[test]
    fn wide_format() {
        let p = read_panel(
            "country,1971,1970\nA,2,1\nB,NA,5\n".as_bytes(),
            PanelFormat::Wide,
        )
        .unwrap();
        assert_eq!(p.years(), &[1970, 1971]);
        assert_eq!(p.get("A", 1970), Some(1.0));
        assert_eq!(p.get("A", 1971), Some(2.0));
        assert_eq!(p.get("B", 1971), None);
        assert!(read_panel("country,abc\nA,1\n".as_bytes(), PanelFormat::Wide).is_err());
        assert!(read_panel("country,1970\nA,1\nA,2\n".as_bytes(), PanelFormat::Wide).is_err());
    }

    #[test]
    fn carbon_conversion() {
        let p = long("country,year,emissions\nA,1970,1.0\nB,1970,100.0\nB,1971,NA\n").unwrap();
        let c = p.convert_carbon_to_co2();
        assert_eq!(c.get("A", 1970), Some(3.664));
        assert!((c.get("B", 1970).unwrap() - 366.4).abs() < 1e-12);
        assert_eq!(c.get("B", 1971), None);
        let empty = EmissionsPanel::new(vec![], vec![], vec![]).unwrap();
        assert_eq!(empty.convert_carbon_to_co2(), empty);
    }

    #[test]
    fn degenerate_summary() {
        let s = YearSummary::from_values(2000, &[1.0, 1.0, 1.0]).unwrap();
        assert_eq!(s.sd, 0.0);
        assert_eq!(s.skewness, None);
        assert_eq!(s.kurtosis, None);
        assert!(YearSummary::from_values(2000, &[1.0]).is_err());
    }

    #[test]
    fn summary_matches_hand_computation() {
        // {1,2,3,4,100}: mean 22, deviations {-21,-20,-19,-18,78}.
        // Σd² = 441+400+361+324+6084 = 7610
        // Σd³ = -9261-8000-6859-5832+474552 = 444600
        // Σd⁴ = 194481+160000+130321+104976+37015056 = 37604834
        let s = YearSummary::from_values(2000, &[1.0, 2.0, 3.0, 4.0, 100.0]).unwrap();
        let m2: f64 = 7610.0 / 5.0;
        let m3 = 444_600.0 / 5.0;
        let m4 = 37_604_834.0 / 5.0;
        assert_eq!(s.n, 5);
        assert_eq!((s.min, s.max), (1.0, 100.0));
        assert!((s.mean - 22.0).abs() < 1e-12);
        assert!((s.sd - (7610.0f64 / 4.0).sqrt()).abs() < 1e-12);
        assert!((s.skewness.unwrap() - m3 / m2.powf(1.5)).abs() < 1e-12);
        assert!((s.kurtosis.unwrap() - m4 / (m2 * m2)).abs() < 1e-12);
        assert!((s.skewness.unwrap() - 1.497_536_703_333_52).abs() < 1e-12);
        assert!((s.kurtosis.unwrap() - 3.246_716_489_300_164).abs() < 1e-12);
    }

    #[test]
    fn unknown_year() {
        let p = long("country,year,emissions\nA,1970,1\nB,1970,2\n").unwrap();
        assert!(matches!(
            p.summarize_year(1999),
            Err(Error::UnknownYear(1999))
        ));
    }
}
