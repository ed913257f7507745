//! Seeded synthetic indicator panels with latent-factor structure, for
//! tests, benchmarks and demos. Not a model of any real country.

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use crate::ingest::{RawRecord, YearWindow};

#[derive(Debug, Clone)]
pub struct SyntheticSpec {
    pub countries: usize,
    pub indicators: usize,
    pub window: YearWindow,
    pub seed: u64,
    /// Fraction of indicators emitted as constant series.
    pub constant_share: f64,
    /// Fraction of indicators with one missing year.
    pub missing_share: f64,
    /// SDG Index scores are drawn uniformly from this range.
    pub score_range: (f64, f64),
}

impl Default for SyntheticSpec {
    fn default() -> Self {
        SyntheticSpec {
            countries: 12,
            indicators: 40,
            window: YearWindow::default(),
            seed: 1,
            constant_share: 0.05,
            missing_share: 0.05,
            score_range: (35.0, 90.0),
        }
    }
}

#[derive(Debug, Clone)]
pub struct SyntheticPanel {
    pub records: Vec<RawRecord>,
    pub scores: BTreeMap<String, f64>,
}

impl SyntheticPanel {
    pub fn long_csv(&self) -> String {
        let mut buf = Vec::new();
        crate::ingest::write_long_csv(&mut buf, &self.records).expect("in-memory write");
        String::from_utf8(buf).expect("utf-8")
    }

    pub fn scores_csv(&self) -> String {
        let mut s = String::from("country_code,sdg_index_score\n");
        for (c, v) in &self.scores {
            s.push_str(&format!("{c},{v}\n"));
        }
        s
    }
}

pub fn country_code(k: usize) -> String {
    format!("C{k:03}")
}

fn random_walk(rng: &mut ChaCha8Rng, len: usize) -> Vec<f64> {
    let step = Normal::new(0.0, 1.0).expect("valid normal");
    let mut v = Vec::with_capacity(len);
    let mut x = 0.0;
    for _ in 0..len {
        x += step.sample(rng);
        v.push(x);
    }
    v
}

fn standardize(v: &mut [f64]) {
    let n = v.len() as f64;
    let m = v.iter().sum::<f64>() / n;
    let sd = (v.iter().map(|x| (x - m).powi(2)).sum::<f64>() / n).sqrt().max(1e-9);
    for x in v {
        *x = (*x - m) / sd;
    }
}

/// Generate a panel: each indicator is a noisy mixture of a shared
/// development trend and two country-specific random walks, mapped into
/// [0, 100] and rounded to one decimal (which produces ties).
pub fn generate(spec: &SyntheticSpec) -> SyntheticPanel {
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let years: Vec<i32> = spec.window.years().collect();
    let t = years.len();
    let noise = Normal::new(0.0, 0.35).expect("valid normal");

    let mut records = Vec::new();
    let mut scores = BTreeMap::new();
    for c in 0..spec.countries {
        let code = country_code(c);
        let score = rng.random_range(spec.score_range.0..spec.score_range.1);
        scores.insert(code.clone(), (score * 100.0).round() / 100.0);

        let mut trend: Vec<f64> = (0..t).map(|k| k as f64).collect();
        let mut walk_a = random_walk(&mut rng, t);
        let mut walk_b = random_walk(&mut rng, t);
        standardize(&mut trend);
        standardize(&mut walk_a);
        standardize(&mut walk_b);
        // better-performing countries have more aligned indicators
        let alignment = 0.3 + 0.6 * (score - spec.score_range.0) / (spec.score_range.1 - spec.score_range.0);

        for i in 0..spec.indicators {
            let goal = (i % 17) as u8 + 1;
            let id = format!("sdg{goal}_i{i:03}");
            let kind: f64 = rng.random();
            let sign = if rng.random::<f64>() < alignment { 1.0 } else { -1.0 };
            let (a, b, d) = (
                sign * rng.random_range(0.3..1.5),
                rng.random_range(-1.0..1.0),
                rng.random_range(-1.0..1.0),
            );
            let level = rng.random_range(25.0..75.0);
            let scale = rng.random_range(3.0..12.0);
            let missing_year = years[rng.random_range(0..t)];
            let constant = kind < spec.constant_share;
            let missing = !constant && kind < spec.constant_share + spec.missing_share;
            for (k, &year) in years.iter().enumerate() {
                let raw = a * trend[k] + b * walk_a[k] + d * walk_b[k] + noise.sample(&mut rng);
                let v = if constant {
                    level
                } else {
                    ((level + scale * raw).clamp(0.0, 100.0) * 10.0).round() / 10.0
                };
                records.push(RawRecord {
                    country_code: code.clone(),
                    indicator_id: id.clone(),
                    sdg_goal: goal,
                    year,
                    value: (!(missing && year == missing_year)).then_some(v),
                });
            }
        }
    }
    SyntheticPanel { records, scores }
}
