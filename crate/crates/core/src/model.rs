//! Pooled logistic regression of synergy dominance on the direct and
//! indirect network effects.
//!
//! Fitting is Newton's method on the Bernoulli log-likelihood (which for
//! the canonical logit link is the same iteration as IRLS). The covariance
//! of the estimate is the inverse observed information at the optimum,
//! from which Wald standard errors, 95% intervals and two-sided p-values
//! follow.

use std::collections::{BTreeMap, BTreeSet};

use nalgebra::{DMatrix, DVector};
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use statrs::function::erf::erfc;

use crate::error::{Error, Result};
use crate::ingest::PerformanceCategory;

/// Coefficients (intercept, direct effect, indirect effect) of the
/// published pooled model.
pub const PUBLISHED_BETA: [f64; 3] = [-19.2031, 39.0684, 2.1742];

/// 0.975 quantile of the standard normal.
pub const Z_975: f64 = 1.959964;

pub const LL_TOLERANCE: f64 = 1e-10;
pub const MAX_ITERATIONS: usize = 100;
/// Any coefficient larger than this in magnitude is taken as separation.
pub const SEPARATION_LIMIT: f64 = 1e3;

pub const DEFAULT_PROBABILITY_THRESHOLD: f64 = 0.5;

/// Numerically stable logistic function.
pub fn sigmoid(z: f64) -> f64 {
    if z >= 0.0 {
        1.0 / (1.0 + (-z).exp())
    } else {
        let e = z.exp();
        e / (1.0 + e)
    }
}

/// ln(1 + e^z) without overflow.
fn softplus(z: f64) -> f64 {
    if z > 0.0 {
        z + (-z).exp().ln_1p()
    } else {
        z.exp().ln_1p()
    }
}

fn linear(row: &[f64], beta: &[f64]) -> f64 {
    row.iter().zip(beta).map(|(x, b)| x * b).sum()
}

/// Bernoulli log-likelihood of `beta` for design rows `x` (intercept
/// column included by the caller) and 0/1 labels `y`.
pub fn log_likelihood(x: &[Vec<f64>], y: &[u8], beta: &[f64]) -> f64 {
    x.iter()
        .zip(y)
        .map(|(row, &yi)| {
            let z = linear(row, beta);
            f64::from(yi) * z - softplus(z)
        })
        .sum()
}

/// Score vector Xᵀ(y − p).
pub fn gradient(x: &[Vec<f64>], y: &[u8], beta: &[f64]) -> Vec<f64> {
    let mut g = vec![0.0; beta.len()];
    for (row, &yi) in x.iter().zip(y) {
        let r = f64::from(yi) - sigmoid(linear(row, beta));
        for (gj, xj) in g.iter_mut().zip(row) {
            *gj += r * xj;
        }
    }
    g
}

/// Observed information XᵀWX with W = diag(p(1−p)).
fn information(x: &[Vec<f64>], beta: &[f64]) -> DMatrix<f64> {
    let k = beta.len();
    let mut h = DMatrix::zeros(k, k);
    for row in x {
        let p = sigmoid(linear(row, beta));
        let w = p * (1.0 - p);
        for a in 0..k {
            for b in 0..=a {
                h[(a, b)] += w * row[a] * row[b];
            }
        }
    }
    for a in 0..k {
        for b in 0..a {
            h[(b, a)] = h[(a, b)];
        }
    }
    h
}

/// Raw result of a logistic fit on an arbitrary design.
#[derive(Debug, Clone, PartialEq)]
pub struct LogisticFit {
    pub beta: Vec<f64>,
    pub covariance: Vec<Vec<f64>>,
    pub log_likelihood: f64,
    pub iterations: usize,
    pub converged: bool,
}

fn validate_labels(y: &[u8]) -> Result<()> {
    if let Some(bad) = y.iter().find(|&&v| v > 1) {
        return Err(Error::domain(format!("label {bad} is not 0/1")));
    }
    let ones = y.iter().filter(|&&v| v == 1).count();
    if ones == 0 || ones == y.len() {
        return Err(Error::SingleClass);
    }
    Ok(())
}

/// Maximum-likelihood logistic fit by Newton/IRLS on design rows `x`.
pub fn fit_irls(x: &[Vec<f64>], y: &[u8]) -> Result<LogisticFit> {
    if x.len() != y.len() {
        return Err(Error::domain(format!("{} rows but {} labels", x.len(), y.len())));
    }
    let k = x.first().map(Vec::len).unwrap_or(0);
    if k == 0 || x.iter().any(|r| r.len() != k) {
        return Err(Error::domain("design rows must share a non-zero width"));
    }
    if x.len() < k.max(3) {
        return Err(Error::domain(format!("need at least {} observations, got {}", k.max(3), x.len())));
    }
    if x.iter().flatten().any(|v| !v.is_finite()) {
        return Err(Error::domain("design contains non-finite values"));
    }
    validate_labels(y)?;

    let mut beta = vec![0.0; k];
    let mut ll = log_likelihood(x, y, &beta);
    let mut converged = false;
    let mut iterations = 0;

    while iterations < MAX_ITERATIONS {
        iterations += 1;
        let g = DVector::from_vec(gradient(x, y, &beta));
        let h = information(x, &beta);
        let step = match h.cholesky() {
            Some(ch) => ch.solve(&g),
            None if iterations == 1 => return Err(Error::Collinearity),
            None => return Err(Error::Separation { beta, iterations }),
        };

        // Step halving keeps the likelihood monotone.
        let mut scale = 1.0;
        let (mut candidate, mut cand_ll);
        loop {
            candidate = beta.iter().zip(step.iter()).map(|(b, s)| b + scale * s).collect::<Vec<_>>();
            cand_ll = log_likelihood(x, y, &candidate);
            if cand_ll >= ll - 1e-12 || scale < 1e-10 {
                break;
            }
            scale *= 0.5;
        }

        let change = (cand_ll - ll).abs();
        beta = candidate;
        ll = cand_ll;
        if beta.iter().any(|b| !b.is_finite() || b.abs() > SEPARATION_LIMIT) {
            return Err(Error::Separation { beta, iterations });
        }
        if change < LL_TOLERANCE {
            let gmax = gradient(x, y, &beta).iter().fold(0.0f64, |m, v| m.max(v.abs()));
            if gmax < 1e-7 || change == 0.0 {
                converged = true;
                break;
            }
        }
    }
    if !converged {
        return Err(Error::Separation { beta, iterations });
    }

    // Every observation fitted (numerically) perfectly: complete separation.
    let perfect = x
        .iter()
        .zip(y)
        .all(|(row, &yi)| (f64::from(yi) - sigmoid(linear(row, &beta))).abs() < 1e-6);
    if perfect {
        return Err(Error::Separation { beta, iterations });
    }

    let cov = information(x, &beta)
        .try_inverse()
        .ok_or_else(|| Error::Separation { beta: beta.clone(), iterations })?;
    let covariance = (0..k).map(|a| (0..k).map(|b| 0.5 * (cov[(a, b)] + cov[(b, a)])).collect()).collect();

    Ok(LogisticFit {
        beta,
        covariance,
        log_likelihood: ll,
        iterations,
        converged,
    })
}

/// Wald quantities for a coefficient vector.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WaldInference {
    pub standard_errors: Vec<f64>,
    pub ci95: Vec<(f64, f64)>,
    pub p_values: Vec<f64>,
    /// Zero standard error with a non-zero coefficient.
    pub unstable: Vec<bool>,
}

/// Two-sided standard-normal tail probability at `|z|`.
pub fn two_sided_p(z: f64) -> f64 {
    erfc(z.abs() / std::f64::consts::SQRT_2)
}

pub fn wald_inference(beta: &[f64], covariance: &[Vec<f64>]) -> Result<WaldInference> {
    let k = beta.len();
    if covariance.len() != k || covariance.iter().any(|r| r.len() != k) {
        return Err(Error::domain(format!("covariance is not {k}x{k}")));
    }
    let mut out = WaldInference {
        standard_errors: Vec::with_capacity(k),
        ci95: Vec::with_capacity(k),
        p_values: Vec::with_capacity(k),
        unstable: Vec::with_capacity(k),
    };
    for i in 0..k {
        let var = covariance[i][i];
        if !(var >= 0.0) {
            return Err(Error::domain(format!("covariance diagonal {i} is {var}")));
        }
        for j in 0..i {
            if (covariance[i][j] - covariance[j][i]).abs() > 1e-9 * (1.0 + covariance[i][j].abs()) {
                return Err(Error::domain("covariance is not symmetric"));
            }
        }
        let se = var.sqrt();
        let b = beta[i];
        let (p, unstable) = if se == 0.0 {
            if b == 0.0 {
                (1.0, false)
            } else {
                (0.0, true)
            }
        } else {
            (two_sided_p(b / se), false)
        };
        out.standard_errors.push(se);
        out.ci95.push((b - Z_975 * se, b + Z_975 * se));
        out.p_values.push(p);
        out.unstable.push(unstable);
    }
    Ok(out)
}

/// Variance inflation factors: VIF_j = 1/(1−R²_j) with R²_j from an OLS
/// regression (with intercept) of column j on the remaining columns.
pub fn variance_inflation(columns: &[Vec<f64>]) -> Result<Vec<f64>> {
    let p = columns.len();
    if p < 2 {
        return Err(Error::domain("VIF needs at least two predictors"));
    }
    let n = columns[0].len();
    if columns.iter().any(|c| c.len() != n) {
        return Err(Error::domain("predictor columns differ in length"));
    }
    if n < p + 1 {
        return Err(Error::domain(format!("VIF needs more than {p} observations")));
    }
    for (j, c) in columns.iter().enumerate() {
        if c.iter().any(|v| !v.is_finite()) {
            return Err(Error::domain(format!("predictor {j} has non-finite values")));
        }
        if c.iter().all(|&v| v == c[0]) {
            return Err(Error::domain(format!("predictor {j} is constant")));
        }
    }

    (0..p)
        .map(|j| {
            let target = &columns[j];
            let mean = target.iter().sum::<f64>() / n as f64;
            let x = DMatrix::from_fn(n, p, |r, c| match c {
                0 => 1.0,
                c => columns[if c <= j { c - 1 } else { c }][r],
            });
            let yv = DVector::from_column_slice(target);
            let xtx = x.transpose() * &x;
            let coef = xtx
                .cholesky()
                .ok_or(Error::Collinearity)?
                .solve(&(x.transpose() * &yv));
            let resid = &yv - &x * coef;
            let ss_res = resid.norm_squared();
            let ss_tot: f64 = target.iter().map(|v| (v - mean).powi(2)).sum();
            let r2 = 1.0 - ss_res / ss_tot;
            if r2 >= 1.0 - 1e-12 {
                Err(Error::Collinearity)
            } else {
                Ok(1.0 / (1.0 - r2))
            }
        })
        .collect()
}

/// VIFs for the two model predictors.
pub fn vif(x_d: &[f64], x_h: &[f64]) -> Result<[f64; 2]> {
    if x_d.len() != x_h.len() || x_d.len() < 3 {
        return Err(Error::domain("VIF needs two equal-length columns of at least 3 values"));
    }
    let v = variance_inflation(&[x_d.to_vec(), x_h.to_vec()])?;
    Ok([v[0], v[1]])
}

/// Fitted pooled model as persisted to `model.json`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FittedModel {
    pub beta: [f64; 3],
    pub covariance: [[f64; 3]; 3],
    pub standard_errors: [f64; 3],
    pub ci95: [(f64, f64); 3],
    pub p_values: [f64; 3],
    pub vif: [f64; 2],
    pub log_likelihood: f64,
    pub iterations: usize,
    pub converged: bool,
    pub n_obs: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub train_fraction: Option<f64>,
}

impl FittedModel {
    pub fn probability(&self, x_d: f64, x_h: f64) -> f64 {
        predict_probability(&self.beta, x_d, x_h)
    }
}

/// Fit `Pr(Y=1) = logistic(β₀ + β₁ x_d + β₂ x_h)` by maximum likelihood.
pub fn fit_logistic(features: &[(f64, f64)], labels: &[u8]) -> Result<FittedModel> {
    if features.len() != labels.len() {
        return Err(Error::domain(format!(
            "{} feature rows but {} labels",
            features.len(),
            labels.len()
        )));
    }
    if features.len() < 3 {
        return Err(Error::domain("need at least 3 observations"));
    }
    validate_labels(labels)?;
    let design: Vec<Vec<f64>> = features.iter().map(|&(d, h)| vec![1.0, d, h]).collect();
    let x_d: Vec<f64> = features.iter().map(|f| f.0).collect();
    let x_h: Vec<f64> = features.iter().map(|f| f.1).collect();
    let vif = vif(&x_d, &x_h)?;

    let fit = fit_irls(&design, labels)?;
    let wald = wald_inference(&fit.beta, &fit.covariance)?;

    let arr3 = |v: &[f64]| [v[0], v[1], v[2]];
    Ok(FittedModel {
        beta: arr3(&fit.beta),
        covariance: [arr3(&fit.covariance[0]), arr3(&fit.covariance[1]), arr3(&fit.covariance[2])],
        standard_errors: arr3(&wald.standard_errors),
        ci95: [wald.ci95[0], wald.ci95[1], wald.ci95[2]],
        p_values: arr3(&wald.p_values),
        vif,
        log_likelihood: fit.log_likelihood,
        iterations: fit.iterations,
        converged: fit.converged,
        n_obs: labels.len(),
        seed: None,
        train_fraction: None,
    })
}

pub fn predict_probability(beta: &[f64; 3], x_d: f64, x_h: f64) -> f64 {
    sigmoid(beta[0] + beta[1] * x_d + beta[2] * x_h)
}

/// 1 (synergy-dominated) iff `p >= 0.5`.
pub fn classify(p: f64) -> u8 {
    classify_at(p, DEFAULT_PROBABILITY_THRESHOLD)
}

pub fn classify_at(p: f64, threshold: f64) -> u8 {
    u8::from(p >= threshold)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Side {
    Train,
    Test,
}

pub type PointKey = (String, String);

/// Assignment of (country, indicator) points to train/test, stratified by
/// country performance category.
#[derive(Debug, Clone, PartialEq)]
pub struct SplitPlan {
    pub seed: u64,
    pub train_fraction: f64,
    pub assignment: BTreeMap<PointKey, Side>,
    pub strata: BTreeMap<String, PerformanceCategory>,
    pub warnings: Vec<String>,
}

impl SplitPlan {
    pub fn side(&self, country: &str, indicator: &str) -> Option<Side> {
        self.assignment.get(&(country.to_string(), indicator.to_string())).copied()
    }

    /// (train, test) counts per category.
    pub fn category_counts(&self) -> BTreeMap<PerformanceCategory, (usize, usize)> {
        let mut out = BTreeMap::new();
        for ((country, _), side) in &self.assignment {
            let e = out.entry(self.strata[country]).or_insert((0, 0));
            match side {
                Side::Train => e.0 += 1,
                Side::Test => e.1 += 1,
            }
        }
        out
    }
}

/// Within each performance category, a seeded uniform random subset of
/// `round(train_fraction · size)` points goes to the training side.
/// Input order does not matter: points are sorted before shuffling.
pub fn stratified_split(
    points: &[PointKey],
    strata: &BTreeMap<String, PerformanceCategory>,
    train_fraction: f64,
    seed: u64,
) -> Result<SplitPlan> {
    if !(train_fraction > 0.0 && train_fraction < 1.0) {
        return Err(Error::Config(format!("train fraction {train_fraction} outside (0, 1)")));
    }
    let mut by_category: BTreeMap<PerformanceCategory, BTreeSet<&PointKey>> = BTreeMap::new();
    for pt in points {
        let cat = strata
            .get(&pt.0)
            .ok_or_else(|| Error::domain(format!("country {} has no performance category", pt.0)))?;
        if !by_category.entry(*cat).or_default().insert(pt) {
            return Err(Error::domain(format!("duplicate point ({}, {})", pt.0, pt.1)));
        }
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut plan = SplitPlan {
        seed,
        train_fraction,
        assignment: BTreeMap::new(),
        strata: BTreeMap::new(),
        warnings: Vec::new(),
    };
    for cat in PerformanceCategory::ALL {
        let Some(set) = by_category.get(&cat) else {
            let msg = format!("category {cat} has no points; skipped");
            log::warn!("{msg}");
            plan.warnings.push(msg);
            continue;
        };
        let mut members: Vec<&PointKey> = set.iter().copied().collect();
        members.shuffle(&mut rng);
        let n_train = (train_fraction * members.len() as f64).round() as usize;
        for (k, pt) in members.into_iter().enumerate() {
            let side = if k < n_train { Side::Train } else { Side::Test };
            plan.assignment.insert(pt.clone(), side);
        }
    }
    for (country, _) in plan.assignment.keys() {
        plan.strata.insert(country.clone(), strata[country]);
    }
    Ok(plan)
}

/// Confusion matrix with synergy-dominated (label 1) as the positive class.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub tp: usize,
    #[serde(rename = "fn")]
    pub fn_: usize,
    pub fp: usize,
    pub tn: usize,
    pub accuracy: f64,
}

impl EvalReport {
    pub fn from_counts(tp: usize, fn_: usize, fp: usize, tn: usize) -> Self {
        let total = tp + fn_ + fp + tn;
        let accuracy = if total == 0 { 0.0 } else { (tp + tn) as f64 / total as f64 };
        EvalReport { tp, fn_, fp, tn, accuracy }
    }

    pub fn total(&self) -> usize {
        self.tp + self.fn_ + self.fp + self.tn
    }
}

pub fn evaluate(beta: &[f64; 3], test: &[((f64, f64), u8)]) -> Result<EvalReport> {
    evaluate_at(beta, test, DEFAULT_PROBABILITY_THRESHOLD)
}

pub fn evaluate_at(beta: &[f64; 3], test: &[((f64, f64), u8)], threshold: f64) -> Result<EvalReport> {
    if test.is_empty() {
        return Err(Error::domain("evaluation set is empty"));
    }
    let (mut tp, mut fn_, mut fp, mut tn) = (0, 0, 0, 0);
    for &((d, h), y) in test {
        let pred = classify_at(predict_probability(beta, d, h), threshold);
        match (y, pred) {
            (1, 1) => tp += 1,
            (1, _) => fn_ += 1,
            (_, 1) => fp += 1,
            _ => tn += 1,
        }
    }
    Ok(EvalReport::from_counts(tp, fn_, fp, tn))
}
