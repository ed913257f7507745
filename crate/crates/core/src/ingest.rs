//! Indicator panel ingestion: long/wide CSV parsing, cleaning and
//! country categorization by SDG Index score.
//!
//! The canonical input is a long table with header
//! `country_code,indicator_id,sdg_goal,year,value` where an empty `value`
//! marks a missing observation. Cleaning drops every indicator that has a
//! gap inside the year window or does not vary over it.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::fmt;
use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Series with a value range below this are treated as constant.
pub const CONSTANCY_TOLERANCE: f64 = 1e-9;

pub const LONG_HEADER: [&str; 5] = ["country_code", "indicator_id", "sdg_goal", "year", "value"];

/// Inclusive range of years analysed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct YearWindow {
    pub start: i32,
    pub end: i32,
}

impl Default for YearWindow {
    fn default() -> Self {
        YearWindow {
            start: 2000,
            end: 2024,
        }
    }
}

impl YearWindow {
    pub fn new(start: i32, end: i32) -> Result<Self> {
        if start > end {
            return Err(Error::Config(format!(
                "year window {start}..={end} is empty"
            )));
        }
        Ok(YearWindow { start, end })
    }

    pub fn len(&self) -> usize {
        (self.end - self.start + 1) as usize
    }

    pub fn is_empty(&self) -> bool {
        self.end < self.start
    }

    pub fn contains(&self, year: i32) -> bool {
        (self.start..=self.end).contains(&year)
    }

    pub fn years(&self) -> impl Iterator<Item = i32> {
        self.start..=self.end
    }
}

/// One row of the long table. `value == None` is an explicit missing marker.
#[derive(Debug, Clone, PartialEq)]
pub struct RawRecord {
    pub country_code: String,
    pub indicator_id: String,
    pub sdg_goal: u8,
    pub year: i32,
    pub value: Option<f64>,
}

/// One indicator's yearly scores for one country.
#[derive(Debug, Clone, PartialEq)]
pub struct IndicatorSeries {
    pub country_code: String,
    pub indicator_id: String,
    pub sdg_goal: u8,
    pub values: BTreeMap<i32, f64>,
}

impl IndicatorSeries {
    /// Scores in year order.
    pub fn scores(&self) -> Vec<f64> {
        self.values.values().copied().collect()
    }
}

/// Cleaned indicator series of one country.
#[derive(Debug, Clone, PartialEq)]
pub struct CountryPanel {
    pub country_code: String,
    pub series: Vec<IndicatorSeries>,
    pub retained_count: usize,
}

impl CountryPanel {
    /// A network needs at least two indicators.
    pub fn is_usable(&self) -> bool {
        self.retained_count >= 2
    }

    pub fn to_records(&self) -> Vec<RawRecord> {
        self.series
            .iter()
            .flat_map(|s| {
                s.values.iter().map(move |(&year, &v)| RawRecord {
                    country_code: s.country_code.clone(),
                    indicator_id: s.indicator_id.clone(),
                    sdg_goal: s.sdg_goal,
                    year,
                    value: Some(v),
                })
            })
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DropReason {
    /// At least one year of the window has no value.
    Missing,
    /// Range of values below [`CONSTANCY_TOLERANCE`].
    Constant,
    /// A score outside [0, 100].
    OutOfRange,
}

impl fmt::Display for DropReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            DropReason::Missing => "missing",
            DropReason::Constant => "constant",
            DropReason::OutOfRange => "out_of_range",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct DropEntry {
    pub country_code: String,
    pub indicator_id: String,
    pub reason: DropReason,
}

#[derive(Debug, Clone, Default)]
pub struct CleanedPanels {
    /// One panel per country that had any records, ordered by country code.
    pub panels: Vec<CountryPanel>,
    pub drop_log: Vec<DropEntry>,
}

impl CleanedPanels {
    /// Countries with fewer than two retained indicators.
    pub fn unusable_countries(&self) -> Vec<&str> {
        self.panels
            .iter()
            .filter(|p| !p.is_usable())
            .map(|p| p.country_code.as_str())
            .collect()
    }

    pub fn panel(&self, country: &str) -> Option<&CountryPanel> {
        self.panels.iter().find(|p| p.country_code == country)
    }

    pub fn to_records(&self) -> Vec<RawRecord> {
        self.panels.iter().flat_map(|p| p.to_records()).collect()
    }
}

/// Result of reshaping a wide table.
#[derive(Debug, Clone, Default)]
pub struct WideRecords {
    pub records: Vec<RawRecord>,
    /// Header columns ignored because they are not years inside the window.
    pub ignored_columns: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PerformanceCategory {
    Worst,
    Moderate,
    Best,
}

impl PerformanceCategory {
    pub const ALL: [PerformanceCategory; 3] = [
        PerformanceCategory::Worst,
        PerformanceCategory::Moderate,
        PerformanceCategory::Best,
    ];
}

impl fmt::Display for PerformanceCategory {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            PerformanceCategory::Worst => "worst",
            PerformanceCategory::Moderate => "moderate",
            PerformanceCategory::Best => "best",
        })
    }
}

/// SDG Index cutoffs: `score < moderate` is Worst, `score >= best` is Best.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CategoryCutoffs {
    pub moderate: f64,
    pub best: f64,
}

impl Default for CategoryCutoffs {
    fn default() -> Self {
        CategoryCutoffs {
            moderate: 50.0,
            best: 80.0,
        }
    }
}

impl CategoryCutoffs {
    pub fn validate(&self) -> Result<()> {
        let ok = self.moderate.is_finite()
            && self.best.is_finite()
            && 0.0 <= self.moderate
            && self.moderate < self.best
            && self.best <= 100.0;
        if ok {
            Ok(())
        } else {
            Err(Error::Config(format!(
                "category cutoffs must satisfy 0 <= {} < {} <= 100",
                self.moderate, self.best
            )))
        }
    }
}

pub fn categorize_country(sdg_index_score: f64) -> Result<PerformanceCategory> {
    categorize_with(sdg_index_score, CategoryCutoffs::default())
}

pub fn categorize_with(score: f64, cutoffs: CategoryCutoffs) -> Result<PerformanceCategory> {
    if !(0.0..=100.0).contains(&score) {
        return Err(Error::domain(format!(
            "SDG Index score {score} outside [0, 100]"
        )));
    }
    Ok(if score < cutoffs.moderate {
        PerformanceCategory::Worst
    } else if score < cutoffs.best {
        PerformanceCategory::Moderate
    } else {
        PerformanceCategory::Best
    })
}

fn column_index(headers: &csv::StringRecord, name: &str) -> Result<usize> {
    headers
        .iter()
        .position(|h| h.trim() == name)
        .ok_or_else(|| Error::parse(1, format!("header is missing column `{name}`")))
}

fn parse_goal(field: &str, line: u64) -> Result<u8> {
    match field.trim().parse::<u8>() {
        Ok(g) if (1..=17).contains(&g) => Ok(g),
        _ => Err(Error::parse(
            line,
            format!("sdg_goal `{field}` is not an integer in 1..=17"),
        )),
    }
}

fn parse_value(field: &str, line: u64) -> Result<Option<f64>> {
    let field = field.trim();
    if field.is_empty() {
        return Ok(None);
    }
    match field.parse::<f64>() {
        Ok(v) if v.is_finite() => Ok(Some(v)),
        _ => Err(Error::parse(line, format!("unparsable value `{field}`"))),
    }
}

fn non_empty(field: &str, what: &str, line: u64) -> Result<String> {
    let field = field.trim();
    if field.is_empty() {
        Err(Error::parse(line, format!("empty {what}")))
    } else {
        Ok(field.to_string())
    }
}

fn csv_reader<R: Read>(reader: R) -> csv::Reader<R> {
    csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(reader)
}

/// Parse the canonical long table. Row order is preserved.
pub fn parse_long_csv<R: Read>(reader: R) -> Result<Vec<RawRecord>> {
    let mut rdr = csv_reader(reader);
    let headers = rdr.headers()?.clone();
    let idx: Vec<usize> = LONG_HEADER
        .iter()
        .map(|name| column_index(&headers, name))
        .collect::<Result<_>>()?;
    let width = headers.len();

    let mut seen = HashSet::new();
    let mut out = Vec::new();
    for row in rdr.records() {
        let row = row?;
        let line = row.position().map(|p| p.line()).unwrap_or(0);
        if row.len() != width {
            return Err(Error::parse(
                line,
                format!("expected {width} columns, found {}", row.len()),
            ));
        }
        let country_code = non_empty(&row[idx[0]], "country_code", line)?;
        let indicator_id = non_empty(&row[idx[1]], "indicator_id", line)?;
        let sdg_goal = parse_goal(&row[idx[2]], line)?;
        let year = row[idx[3]]
            .trim()
            .parse::<i32>()
            .map_err(|_| Error::parse(line, format!("unparsable year `{}`", &row[idx[3]])))?;
        let value = parse_value(&row[idx[4]], line)?;

        if !seen.insert((country_code.clone(), indicator_id.clone(), year)) {
            return Err(Error::DuplicateKey {
                line,
                country: country_code,
                indicator: indicator_id,
                year,
            });
        }
        out.push(RawRecord {
            country_code,
            indicator_id,
            sdg_goal,
            year,
            value,
        });
    }
    Ok(out)
}

/// Reshape a wide table (`country_code,indicator_id,sdg_goal,<year>...`)
/// into long records. Header columns that are not years inside `window`
/// are skipped and counted.
pub fn normalize_wide<R: Read>(reader: R, window: YearWindow) -> Result<WideRecords> {
    let mut rdr = csv_reader(reader);
    let headers = rdr.headers()?.clone();
    let key_cols: Vec<usize> = LONG_HEADER[..3]
        .iter()
        .map(|name| column_index(&headers, name))
        .collect::<Result<_>>()?;

    let mut year_cols = Vec::new();
    let mut ignored_columns = 0;
    for (i, h) in headers.iter().enumerate() {
        if key_cols.contains(&i) {
            continue;
        }
        match h.trim().parse::<i32>() {
            Ok(y) if window.contains(y) => year_cols.push((i, y)),
            _ => ignored_columns += 1,
        }
    }
    if year_cols.is_empty() {
        log::warn!("wide table has no year columns inside {}..={}", window.start, window.end);
    }

    let mut seen = HashSet::new();
    let mut records = Vec::new();
    for row in rdr.records() {
        let row = row?;
        let line = row.position().map(|p| p.line()).unwrap_or(0);
        if row.len() != headers.len() {
            return Err(Error::parse(
                line,
                format!("expected {} columns, found {}", headers.len(), row.len()),
            ));
        }
        let country_code = non_empty(&row[key_cols[0]], "country_code", line)?;
        let indicator_id = non_empty(&row[key_cols[1]], "indicator_id", line)?;
        let sdg_goal = parse_goal(&row[key_cols[2]], line)?;
        if !seen.insert((country_code.clone(), indicator_id.clone())) {
            return Err(Error::DuplicateKey {
                line,
                country: country_code,
                indicator: indicator_id,
                year: year_cols.first().map(|&(_, y)| y).unwrap_or(window.start),
            });
        }
        for &(col, year) in &year_cols {
            records.push(RawRecord {
                country_code: country_code.clone(),
                indicator_id: indicator_id.clone(),
                sdg_goal,
                year,
                value: parse_value(&row[col], line)?,
            });
        }
    }
    Ok(WideRecords {
        records,
        ignored_columns,
    })
}

/// Read `country_code,sdg_index_score`.
pub fn read_index_scores<R: Read>(reader: R) -> Result<BTreeMap<String, f64>> {
    let mut rdr = csv_reader(reader);
    let headers = rdr.headers()?.clone();
    let c = column_index(&headers, "country_code")?;
    let s = column_index(&headers, "sdg_index_score")?;
    let mut out = BTreeMap::new();
    for row in rdr.records() {
        let row = row?;
        let line = row.position().map(|p| p.line()).unwrap_or(0);
        let country = non_empty(row.get(c).unwrap_or(""), "country_code", line)?;
        let score = parse_value(row.get(s).unwrap_or(""), line)?
            .ok_or_else(|| Error::parse(line, "empty sdg_index_score"))?;
        if !(0.0..=100.0).contains(&score) {
            return Err(Error::parse(line, format!("score {score} outside [0, 100]")));
        }
        if out.insert(country.clone(), score).is_some() {
            return Err(Error::parse(line, format!("duplicate score for {country}")));
        }
    }
    Ok(out)
}

struct SeriesBuilder {
    sdg_goal: u8,
    values: BTreeMap<i32, Option<f64>>,
}

/// Drop incomplete, constant and out-of-range indicators and group the
/// remainder by country. Series keep the order in which indicators first
/// appear in `records`; years outside `window` are ignored.
pub fn clean_panel(records: &[RawRecord], window: YearWindow) -> Result<CleanedPanels> {
    if window.is_empty() {
        return Err(Error::Config("empty year window".into()));
    }

    let mut countries: BTreeMap<&str, (Vec<&str>, HashMap<&str, SeriesBuilder>)> = BTreeMap::new();
    for r in records {
        let (order, map) = countries.entry(&r.country_code).or_default();
        let builder = map.entry(&r.indicator_id).or_insert_with(|| {
            order.push(&r.indicator_id);
            SeriesBuilder {
                sdg_goal: r.sdg_goal,
                values: BTreeMap::new(),
            }
        });
        if builder.sdg_goal != r.sdg_goal {
            return Err(Error::domain(format!(
                "indicator {}/{} tagged with SDG {} and SDG {}",
                r.country_code, r.indicator_id, builder.sdg_goal, r.sdg_goal
            )));
        }
        if window.contains(r.year) && builder.values.insert(r.year, r.value).is_some() {
            return Err(Error::DuplicateKey {
                line: 0,
                country: r.country_code.clone(),
                indicator: r.indicator_id.clone(),
                year: r.year,
            });
        }
    }

    let mut out = CleanedPanels::default();
    for (country, (order, mut map)) in countries {
        let mut series = Vec::new();
        for id in order {
            let b = map.remove(id).expect("indicator registered in order list");
            let complete: Option<BTreeMap<i32, f64>> = window
                .years()
                .map(|y| b.values.get(&y).copied().flatten().map(|v| (y, v)))
                .collect();
            let reason = match &complete {
                None => Some(DropReason::Missing),
                Some(vals) if vals.values().any(|v| !(0.0..=100.0).contains(v)) => {
                    Some(DropReason::OutOfRange)
                }
                Some(vals) => {
                    let (lo, hi) = vals
                        .values()
                        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| {
                            (lo.min(v), hi.max(v))
                        });
                    (hi - lo < CONSTANCY_TOLERANCE).then_some(DropReason::Constant)
                }
            };
            match reason {
                Some(reason) => out.drop_log.push(DropEntry {
                    country_code: country.to_string(),
                    indicator_id: id.to_string(),
                    reason,
                }),
                None => series.push(IndicatorSeries {
                    country_code: country.to_string(),
                    indicator_id: id.to_string(),
                    sdg_goal: b.sdg_goal,
                    values: complete.expect("complete series"),
                }),
            }
        }
        let retained_count = series.len();
        if retained_count < 2 {
            log::warn!("{country}: only {retained_count} indicator(s) retained, no network possible");
        }
        out.panels.push(CountryPanel {
            country_code: country.to_string(),
            series,
            retained_count,
        });
    }
    Ok(out)
}

pub fn write_drop_log<W: Write>(writer: W, log: &[DropEntry]) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(["country_code", "indicator_id", "reason"])?;
    for d in log {
        w.write_record([d.country_code.as_str(), d.indicator_id.as_str(), &d.reason.to_string()])?;
    }
    w.flush()?;
    Ok(())
}

/// Write records in the canonical long layout.
pub fn write_long_csv<W: Write>(writer: W, records: &[RawRecord]) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(LONG_HEADER)?;
    for r in records {
        w.write_record([
            r.country_code.clone(),
            r.indicator_id.clone(),
            r.sdg_goal.to_string(),
            r.year.to_string(),
            r.value.map(|v| v.to_string()).unwrap_or_default(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn long(rows: &[&str]) -> String {
        let mut s = String::from("country_code,indicator_id,sdg_goal,year,value\n");
        for r in rows {
            s.push_str(r);
            s.push('\n');
        }
        s
    }

    fn series_rows(country: &str, id: &str, goal: u8, f: impl Fn(i32) -> Option<f64>) -> Vec<RawRecord> {
        YearWindow::default()
            .years()
            .map(|y| RawRecord {
                country_code: country.into(),
                indicator_id: id.into(),
                sdg_goal: goal,
                year: y,
                value: f(y),
            })
            .collect()
    }

    #[test]
    fn parses_row_fields() {
        let recs = parse_long_csv(long(&["IND,sdg3_lifee,3,2005,62.4"]).as_bytes()).unwrap();
        assert_eq!(
            recs,
            vec![RawRecord {
                country_code: "IND".into(),
                indicator_id: "sdg3_lifee".into(),
                sdg_goal: 3,
                year: 2005,
                value: Some(62.4),
            }]
        );
    }

    #[test]
    fn empty_value_is_missing() {
        let recs = parse_long_csv(long(&["IND,sdg1_wpc,1,2011,"]).as_bytes()).unwrap();
        assert_eq!(recs[0].value, None);
    }

    #[test]
    fn duplicate_key_rejected() {
        let err = parse_long_csv(
            long(&["IND,sdg1_wpc,1,2011,3", "IND,sdg1_wpc,1,2011,4"]).as_bytes(),
        )
        .unwrap_err();
        assert!(matches!(err, Error::DuplicateKey { line: 3, year: 2011, .. }), "{err}");
    }

    #[test]
    fn malformed_rows_name_their_line() {
        for bad in ["IND,x,1,2011", "IND,x,1,20x1,3", "IND,x,1,2011,abc", "IND,x,18,2011,1", "IND,x,1,2011,NaN"] {
            let err = parse_long_csv(long(&["IND,y,1,2010,1", bad]).as_bytes()).unwrap_err();
            assert!(matches!(err, Error::Parse { line: 3, .. }), "{bad}: {err}");
        }
    }

    #[test]
    fn wide_reshape() {
        let years: Vec<String> = (2000..=2024).map(|y| y.to_string()).collect();
        let vals: Vec<String> = (0..25)
            .map(|i| if i == 7 { String::new() } else { format!("{}", 10 + i) })
            .collect();
        let csv = format!(
            "country_code,indicator_id,sdg_goal,{},1999\nIND,a,2,{},5\n",
            years.join(","),
            vals.join(",")
        );
        let out = normalize_wide(csv.as_bytes(), YearWindow::default()).unwrap();
        assert_eq!(out.records.len(), 25);
        assert_eq!(out.ignored_columns, 1);
        let r2007 = out.records.iter().find(|r| r.year == 2007).unwrap();
        assert_eq!(r2007.value, None);
    }

    #[test]
    fn wide_without_year_columns() {
        let csv = "country_code,indicator_id,sdg_goal,note\nIND,a,2,hello\n";
        let out = normalize_wide(csv.as_bytes(), YearWindow::default()).unwrap();
        assert!(out.records.is_empty());
        assert_eq!(out.ignored_columns, 1);
    }

    #[test]
    fn cleaning_rules() {
        let mut recs = series_rows("IND", "flat", 1, |_| Some(37.0));
        recs.extend(series_rows("IND", "gap", 2, |y| (y != 2013).then_some(y as f64 - 1990.0)));
        recs.extend(series_rows("IND", "up", 3, |y| Some(y as f64 - 1990.0)));
        recs.extend(series_rows("IND", "down", 3, |y| Some(2030.0 - y as f64)));
        let cleaned = clean_panel(&recs, YearWindow::default()).unwrap();
        let panel = cleaned.panel("IND").unwrap();
        assert_eq!(panel.retained_count, 2);
        let ids: Vec<_> = panel.series.iter().map(|s| s.indicator_id.as_str()).collect();
        assert_eq!(ids, ["up", "down"]);
        assert_eq!(
            cleaned.drop_log,
            vec![
                DropEntry { country_code: "IND".into(), indicator_id: "flat".into(), reason: DropReason::Constant },
                DropEntry { country_code: "IND".into(), indicator_id: "gap".into(), reason: DropReason::Missing },
            ]
        );
        assert!(cleaned.unusable_countries().is_empty());
    }

    #[test]
    fn short_country_is_unusable() {
        let recs = series_rows("TCD", "only", 1, |y| Some(y as f64 - 1990.0));
        let cleaned = clean_panel(&recs, YearWindow::default()).unwrap();
        assert_eq!(cleaned.unusable_countries(), ["TCD"]);
    }

    #[test]
    fn out_of_range_dropped() {
        let mut recs = series_rows("IND", "big", 1, |y| Some(y as f64 - 1900.0));
        recs.extend(series_rows("IND", "ok", 1, |y| Some(y as f64 - 1990.0)));
        let cleaned = clean_panel(&recs, YearWindow::default()).unwrap();
        assert_eq!(cleaned.drop_log[0].reason, DropReason::OutOfRange);
    }

    #[test]
    fn categorize_boundaries() {
        use PerformanceCategory::*;
        assert_eq!(categorize_country(45.0).unwrap(), Worst);
        assert_eq!(categorize_country(50.0).unwrap(), Moderate);
        assert_eq!(categorize_country(79.999).unwrap(), Moderate);
        assert_eq!(categorize_country(80.0).unwrap(), Best);
        assert_eq!(categorize_country(0.0).unwrap(), Worst);
        assert_eq!(categorize_country(100.0).unwrap(), Best);
        assert!(categorize_country(-0.1).is_err());
        assert!(categorize_country(100.1).is_err());
        assert!(categorize_country(f64::NAN).is_err());
    }

    #[test]
    fn index_scores() {
        let s = read_index_scores("country_code,sdg_index_score\nIND,67.0\nFIN,86.4\n".as_bytes()).unwrap();
        assert_eq!(s["IND"], 67.0);
        assert!(read_index_scores("country_code,sdg_index_score\nIND,167.0\n".as_bytes()).is_err());
    }
}
