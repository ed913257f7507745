//! Per-country classification reports and figure exports.
//!
//! CSV outputs are canonical; the SVG renderings are minimal hand-written
//! markup for quick inspection.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::features::NodeFeatures;
use crate::model::{classify_at, predict_probability, DEFAULT_PROBABILITY_THRESHOLD};
use crate::network::{format_weight, IndicatorNetwork};

pub const GOALS: std::ops::RangeInclusive<u8> = 1..=17;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReportRow {
    pub indicator_id: String,
    pub sdg_goal: u8,
    pub x_d: f64,
    pub x_h: f64,
    pub probability: f64,
    pub predicted_label: u8,
    pub y_label: u8,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CountryReport {
    pub country_code: String,
    pub rows: Vec<ReportRow>,
    /// goal → (synergy, trade-off) counts of predicted labels; goals with no
    /// indicators are absent.
    pub per_goal_counts: BTreeMap<u8, (usize, usize)>,
    pub totals: (usize, usize),
}

impl CountryReport {
    /// Counts for every goal 1–17, zero-filled.
    pub fn goal_counts_filled(&self) -> Vec<(u8, usize, usize)> {
        GOALS
            .map(|g| {
                let (s, t) = self.per_goal_counts.get(&g).copied().unwrap_or((0, 0));
                (g, s, t)
            })
            .collect()
    }

    /// Share (percent) of synergy-dominated indicators per goal, for goals
    /// with at least one. `None` when nothing is synergy-dominated.
    pub fn synergy_shares(&self) -> Option<Vec<(u8, f64)>> {
        let total = self.totals.0;
        if total == 0 {
            return None;
        }
        Some(
            self.per_goal_counts
                .iter()
                .filter(|(_, &(s, _))| s > 0)
                .map(|(&g, &(s, _))| (g, s as f64 / total as f64 * 100.0))
                .collect(),
        )
    }
}

pub fn country_report(beta: &[f64; 3], features: &[NodeFeatures]) -> Result<CountryReport> {
    country_report_at(beta, features, DEFAULT_PROBABILITY_THRESHOLD)
}

pub fn country_report_at(beta: &[f64; 3], features: &[NodeFeatures], threshold: f64) -> Result<CountryReport> {
    let first = features
        .first()
        .ok_or_else(|| Error::domain("country report needs at least one indicator"))?;
    if let Some(other) = features.iter().find(|f| f.country_code != first.country_code) {
        return Err(Error::domain(format!(
            "features mix countries {} and {}",
            first.country_code, other.country_code
        )));
    }
    let mut per_goal_counts: BTreeMap<u8, (usize, usize)> = BTreeMap::new();
    let mut totals = (0, 0);
    let rows = features
        .iter()
        .map(|f| {
            let probability = predict_probability(beta, f.x_d, f.x_h);
            let predicted_label = classify_at(probability, threshold);
            let e = per_goal_counts.entry(f.sdg_goal).or_default();
            if predicted_label == 1 {
                e.0 += 1;
                totals.0 += 1;
            } else {
                e.1 += 1;
                totals.1 += 1;
            }
            ReportRow {
                indicator_id: f.indicator_id.clone(),
                sdg_goal: f.sdg_goal,
                x_d: f.x_d,
                x_h: f.x_h,
                probability,
                predicted_label,
                y_label: f.y_label,
            }
        })
        .collect();
    Ok(CountryReport {
        country_code: first.country_code.clone(),
        rows,
        per_goal_counts,
        totals,
    })
}

/// `indicator_id,sdg_goal,x_d,x_h,probability,predicted_label,y_label`,
/// probabilities with 4 decimals.
pub fn report_csv(report: &CountryReport) -> String {
    let mut s = String::from("indicator_id,sdg_goal,x_d,x_h,probability,predicted_label,y_label\n");
    for r in &report.rows {
        let _ = writeln!(
            s,
            "{},{},{},{},{:.4},{},{}",
            csv_field(&r.indicator_id),
            r.sdg_goal,
            r.x_d,
            r.x_h,
            r.probability,
            r.predicted_label,
            r.y_label
        );
    }
    s
}

/// Counts for goals that have indicators.
pub fn per_goal_csv(report: &CountryReport) -> String {
    let mut s = String::from("goal,synergy_count,tradeoff_count\n");
    for (g, (syn, tr)) in &report.per_goal_counts {
        let _ = writeln!(s, "{g},{syn},{tr}");
    }
    s
}

/// Grouped-bar data, one row per goal 1–17.
pub fn bars_csv(report: &CountryReport) -> String {
    let mut s = String::from("goal,synergy_count,tradeoff_count\n");
    for (g, syn, tr) in report.goal_counts_filled() {
        let _ = writeln!(s, "{g},{syn},{tr}");
    }
    s
}

pub fn pie_csv(report: &CountryReport) -> Option<String> {
    let shares = report.synergy_shares()?;
    let mut s = String::from("goal,percent\n");
    for (g, pct) in shares {
        let _ = writeln!(s, "{g},{pct:.4}");
    }
    Some(s)
}

pub fn heatmap_csv(network: &IndicatorNetwork) -> String {
    let mut s = String::new();
    for i in 0..network.len() {
        let row: Vec<String> = network.row(i).iter().map(|&w| format_weight(w)).collect();
        s.push_str(&row.join(","));
        s.push('\n');
    }
    s
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

fn xml_escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;").replace('"', "&quot;")
}

pub const NEGATIVE_RGB: (u8, u8, u8) = (165, 0, 38);
pub const NEUTRAL_RGB: (u8, u8, u8) = (255, 255, 255);
pub const POSITIVE_RGB: (u8, u8, u8) = (0, 104, 55);

/// Diverging red→white→green color for a correlation in [−1, 1].
pub fn diverging_color(w: f64) -> (u8, u8, u8) {
    let w = w.clamp(-1.0, 1.0);
    let (end, t) = if w < 0.0 { (NEGATIVE_RGB, -w) } else { (POSITIVE_RGB, w) };
    let mix = |a: u8, b: u8| (a as f64 + (b as f64 - a as f64) * t).round() as u8;
    (
        mix(NEUTRAL_RGB.0, end.0),
        mix(NEUTRAL_RGB.1, end.1),
        mix(NEUTRAL_RGB.2, end.2),
    )
}

fn hex((r, g, b): (u8, u8, u8)) -> String {
    format!("#{r:02x}{g:02x}{b:02x}")
}

pub fn heatmap_svg(network: &IndicatorNetwork) -> String {
    let n = network.len();
    let cell = 8usize;
    let margin = 150usize;
    let size = margin + n * cell + 10;
    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{size}" height="{size}" font-family="sans-serif" font-size="7">"#
    );
    let _ = writeln!(
        s,
        r#"<title>Spearman correlation heatmap: {}</title>"#,
        xml_escape(&network.country_code)
    );
    for (i, node) in network.nodes.iter().enumerate() {
        let y = margin + i * cell + cell - 1;
        let _ = writeln!(
            s,
            r#"<text x="{}" y="{y}" text-anchor="end">{}</text>"#,
            margin - 3,
            xml_escape(&node.indicator_id)
        );
        let x = margin + i * cell + cell - 1;
        let _ = writeln!(
            s,
            r#"<text x="{x}" y="{}" transform="rotate(-90 {x} {})">{}</text>"#,
            margin - 3,
            margin - 3,
            xml_escape(&node.indicator_id)
        );
    }
    for i in 0..n {
        for j in 0..n {
            let w = network.weight(i, j);
            let _ = writeln!(
                s,
                r#"<rect x="{}" y="{}" width="{cell}" height="{cell}" fill="{}"><title>{}</title></rect>"#,
                margin + j * cell,
                margin + i * cell,
                hex(diverging_color(w)),
                format_weight(w)
            );
        }
    }
    s.push_str("</svg>\n");
    s
}

pub fn bars_svg(report: &CountryReport) -> String {
    let counts = report.goal_counts_filled();
    let max = counts.iter().map(|&(_, a, b)| a.max(b)).max().unwrap_or(0).max(1);
    let (left, top, plot_h, group_w, bar_w) = (40.0, 30.0, 220.0, 40.0, 16.0);
    let width = left + group_w * 17.0 + 20.0;
    let height = top + plot_h + 40.0;
    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" font-family="sans-serif" font-size="10">"#
    );
    let _ = writeln!(
        s,
        r#"<text x="{left}" y="18">Synergy (green) vs trade-off (red) indicators per SDG: {}</text>"#,
        xml_escape(&report.country_code)
    );
    let base = top + plot_h;
    let _ = writeln!(
        s,
        r#"<line x1="{left}" y1="{base}" x2="{}" y2="{base}" stroke="black"/>"#,
        left + group_w * 17.0
    );
    for (k, &(goal, syn, tr)) in counts.iter().enumerate() {
        let x0 = left + k as f64 * group_w + 4.0;
        for (off, count, rgb) in [(0.0, syn, POSITIVE_RGB), (bar_w, tr, NEGATIVE_RGB)] {
            let h = plot_h * count as f64 / max as f64;
            let _ = writeln!(
                s,
                r#"<rect x="{:.2}" y="{:.2}" width="{bar_w}" height="{h:.2}" fill="{}"><title>{count}</title></rect>"#,
                x0 + off,
                base - h,
                hex(rgb)
            );
        }
        let _ = writeln!(
            s,
            r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">{goal}</text>"#,
            x0 + bar_w,
            base + 14.0
        );
    }
    s.push_str("</svg>\n");
    s
}

fn goal_color(goal: u8) -> String {
    // evenly spaced hues
    let h = (goal as f64 - 1.0) / 17.0 * 360.0;
    format!("hsl({h:.0},65%,50%)")
}

pub fn pie_svg(report: &CountryReport) -> Option<String> {
    let shares = report.synergy_shares()?;
    let (cx, cy, r) = (160.0f64, 160.0f64, 120.0f64);
    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="420" height="320" font-family="sans-serif" font-size="10">"#
    );
    let _ = writeln!(
        s,
        r#"<title>Synergy-dominated indicators by SDG: {}</title>"#,
        xml_escape(&report.country_code)
    );
    let mut angle = -std::f64::consts::FRAC_PI_2;
    for (k, &(goal, pct)) in shares.iter().enumerate() {
        let sweep = pct / 100.0 * std::f64::consts::TAU;
        if shares.len() == 1 {
            let _ = writeln!(s, r#"<circle cx="{cx}" cy="{cy}" r="{r}" fill="{}"/>"#, goal_color(goal));
        } else {
            let (x0, y0) = (cx + r * angle.cos(), cy + r * angle.sin());
            let end = angle + sweep;
            let (x1, y1) = (cx + r * end.cos(), cy + r * end.sin());
            let large = u8::from(sweep > std::f64::consts::PI);
            let _ = writeln!(
                s,
                r#"<path d="M{cx},{cy} L{x0:.3},{y0:.3} A{r},{r} 0 {large} 1 {x1:.3},{y1:.3} Z" fill="{}" stroke="white"/>"#,
                goal_color(goal)
            );
        }
        angle += sweep;
        let ly = 20.0 + k as f64 * 16.0;
        let _ = writeln!(
            s,
            r#"<rect x="300" y="{:.1}" width="10" height="10" fill="{}"/><text x="315" y="{:.1}">SDG {goal}: {pct:.1}%</text>"#,
            ly - 9.0,
            goal_color(goal),
            ly
        );
    }
    s.push_str("</svg>\n");
    Some(s)
}

/// Write `heatmap_<country>.csv` (and `.svg`) into `dir`.
pub fn heatmap_export(network: &IndicatorNetwork, dir: &Path, svg: bool) -> Result<Vec<PathBuf>> {
    let mut written = Vec::new();
    let csv_path = dir.join(format!("heatmap_{}.csv", network.country_code));
    fs::write(&csv_path, heatmap_csv(network))?;
    written.push(csv_path);
    if svg {
        let p = dir.join(format!("heatmap_{}.svg", network.country_code));
        fs::write(&p, heatmap_svg(network))?;
        written.push(p);
    }
    Ok(written)
}

/// Write bar and pie data (and SVGs) into `dir`. The pie is skipped when no
/// indicator is synergy-dominated.
pub fn distribution_export(report: &CountryReport, dir: &Path, svg: bool) -> Result<Vec<PathBuf>> {
    let c = &report.country_code;
    let mut written = Vec::new();
    let p = dir.join(format!("bars_{c}.csv"));
    fs::write(&p, bars_csv(report))?;
    written.push(p);
    if svg {
        let p = dir.join(format!("bars_{c}.svg"));
        fs::write(&p, bars_svg(report))?;
        written.push(p);
    }
    match (pie_csv(report), pie_svg(report)) {
        (Some(data), Some(fig)) => {
            let p = dir.join(format!("pie_{c}.csv"));
            fs::write(&p, data)?;
            written.push(p);
            if svg {
                let p = dir.join(format!("pie_{c}.svg"));
                fs::write(&p, fig)?;
                written.push(p);
            }
        }
        _ => log::info!("{c}: no synergy-dominated indicators, pie chart skipped"),
    }
    Ok(written)
}
