//! End-to-end driver: ingest → networks → features → model → evaluation →
//! per-country reports, with a content-digest manifest of every output.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::features::{feature_table, write_features_csv, NodeFeatures};
use crate::ingest::{
    categorize_with, clean_panel, normalize_wide, parse_long_csv, read_index_scores, write_drop_log,
    write_long_csv, CategoryCutoffs, CleanedPanels, PerformanceCategory, YearWindow,
};
use crate::model::{evaluate_at, fit_logistic, stratified_split, EvalReport, FittedModel, Side, PUBLISHED_BETA};
use crate::network::{build_network, write_nodes_csv, IndicatorNetwork, DEFAULT_STRONG_THRESHOLD};
use crate::report::{
    bars_csv, bars_svg, country_report_at, heatmap_csv, heatmap_svg, per_goal_csv, pie_csv, pie_svg, report_csv,
    CountryReport,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum PanelFormat {
    #[default]
    Long,
    Wide,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum ModelSource {
    /// Pooled stratified fit on the input data.
    #[default]
    Fit,
    /// Built-in published coefficients.
    #[serde(alias = "paper")]
    Published,
    /// A previously written `model.json`.
    File,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PipelineConfig {
    pub panel: PathBuf,
    pub panel_format: PanelFormat,
    /// `country_code,sdg_index_score`; required for a pooled fit.
    pub scores: Option<PathBuf>,
    pub year_start: i32,
    pub year_end: i32,
    pub strong_threshold: f64,
    pub train_fraction: f64,
    pub seed: u64,
    pub probability_threshold: f64,
    pub category_cutoffs: CategoryCutoffs,
    pub model_source: ModelSource,
    pub model_file: Option<PathBuf>,
    /// Restrict per-country outputs to these codes; empty means all.
    pub countries: Vec<String>,
    pub out_dir: PathBuf,
    pub svg: bool,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        let window = YearWindow::default();
        PipelineConfig {
            panel: PathBuf::from("panel.csv"),
            panel_format: PanelFormat::Long,
            scores: None,
            year_start: window.start,
            year_end: window.end,
            strong_threshold: DEFAULT_STRONG_THRESHOLD,
            train_fraction: 0.8,
            seed: 42,
            probability_threshold: 0.5,
            category_cutoffs: CategoryCutoffs::default(),
            model_source: ModelSource::Fit,
            model_file: None,
            countries: Vec::new(),
            out_dir: PathBuf::from("out"),
            svg: true,
        }
    }
}

impl PipelineConfig {
    /// Load a JSON config. Relative input/output paths are resolved against
    /// the config file's directory.
    pub fn from_file(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path)?;
        let mut cfg: PipelineConfig =
            serde_json::from_str(&text).map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        let base = path.parent().unwrap_or(Path::new("."));
        let resolve = |p: &mut PathBuf| {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        };
        resolve(&mut cfg.panel);
        resolve(&mut cfg.out_dir);
        if let Some(p) = cfg.scores.as_mut() {
            resolve(p);
        }
        if let Some(p) = cfg.model_file.as_mut() {
            resolve(p);
        }
        Ok(cfg)
    }

    pub fn window(&self) -> Result<YearWindow> {
        YearWindow::new(self.year_start, self.year_end)
    }

    pub fn validate(&self) -> Result<()> {
        self.window()?;
        let bad = |msg: String| Err(Error::Config(msg));
        if !(self.strong_threshold > 0.0 && self.strong_threshold <= 1.0) {
            return bad(format!("strong_threshold {} outside (0, 1]", self.strong_threshold));
        }
        if !(self.train_fraction > 0.0 && self.train_fraction < 1.0) {
            return bad(format!(
                "train_fraction {} outside (0, 1); a test stratum is required",
                self.train_fraction
            ));
        }
        if !(0.0..=1.0).contains(&self.probability_threshold) {
            return bad(format!("probability_threshold {} outside [0, 1]", self.probability_threshold));
        }
        self.category_cutoffs.validate()?;
        match self.model_source {
            ModelSource::Fit if self.scores.is_none() => {
                return bad("model_source `fit` needs an SDG Index `scores` file".into())
            }
            ModelSource::File if self.model_file.is_none() => {
                return bad("model_source `file` needs `model_file`".into())
            }
            _ => {}
        }
        for c in &self.countries {
            if !is_safe_code(c) {
                return bad(format!("country code `{c}` is not a plain identifier"));
            }
        }
        Ok(())
    }
}

fn is_safe_code(c: &str) -> bool {
    !c.is_empty() && c.chars().all(|ch| ch.is_ascii_alphanumeric() || ch == '_' || ch == '-')
}

/// Pipeline verbs; each writes a subset of the artifacts.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Stage {
    Ingest,
    Network,
    Features,
    Fit,
    Evaluate,
    Classify,
    Report,
    Run,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ManifestEntry {
    pub path: String,
    pub sha256: String,
    pub bytes: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize, Default)]
pub struct Manifest {
    pub files: Vec<ManifestEntry>,
    pub warnings: Vec<String>,
}

/// Evaluation output (`eval.json`).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalFile {
    #[serde(flatten)]
    pub report: EvalReport,
    /// `test` for the held-out split, `all` when a fixed model is scored on
    /// every processed indicator.
    pub evaluation_set: String,
}

/// Tracks written files; removes them all if the run fails.
struct OutputWriter {
    dir: PathBuf,
    entries: Vec<ManifestEntry>,
    written: Vec<PathBuf>,
    warnings: Vec<String>,
}

impl OutputWriter {
    fn new(dir: &Path) -> Self {
        OutputWriter {
            dir: dir.to_path_buf(),
            entries: Vec::new(),
            written: Vec::new(),
            warnings: Vec::new(),
        }
    }

    fn write(&mut self, name: &str, bytes: &[u8]) -> Result<()> {
        let path = self.dir.join(name);
        self.written.push(path.clone());
        fs::write(&path, bytes)?;
        self.entries.push(ManifestEntry {
            path: name.to_string(),
            sha256: hex::encode(Sha256::digest(bytes)),
            bytes: bytes.len() as u64,
        });
        Ok(())
    }

    fn warn(&mut self, msg: String) {
        log::warn!("{msg}");
        self.warnings.push(msg);
    }

    fn manifest(&self) -> Manifest {
        let mut files = self.entries.clone();
        files.sort_by(|a, b| a.path.cmp(&b.path));
        Manifest {
            files,
            warnings: self.warnings.clone(),
        }
    }

    fn discard(&self) {
        for p in &self.written {
            let _ = fs::remove_file(p);
        }
    }
}

/// Cleaned input plus the SDG Index categories of scored countries.
pub struct Prepared {
    pub cleaned: CleanedPanels,
    pub categories: BTreeMap<String, PerformanceCategory>,
}

pub fn load_inputs(cfg: &PipelineConfig) -> Result<(Prepared, Vec<String>)> {
    let window = cfg.window()?;
    let mut warnings = Vec::new();
    let file = fs::File::open(&cfg.panel)
        .map_err(|e| Error::Domain(format!("cannot open panel {}: {e}", cfg.panel.display())))?;
    let records = match cfg.panel_format {
        PanelFormat::Long => parse_long_csv(file)?,
        PanelFormat::Wide => {
            let wide = normalize_wide(file, window)?;
            if wide.ignored_columns > 0 {
                warnings.push(format!("wide panel: {} column(s) outside the year window ignored", wide.ignored_columns));
            }
            wide.records
        }
    };
    let cleaned = clean_panel(&records, window)?;
    for c in cleaned.unusable_countries() {
        warnings.push(format!("{c}: fewer than 2 indicators retained; skipped"));
    }
    let mut categories = BTreeMap::new();
    if let Some(path) = &cfg.scores {
        let file = fs::File::open(path)
            .map_err(|e| Error::Domain(format!("cannot open scores {}: {e}", path.display())))?;
        for (country, score) in read_index_scores(file)? {
            categories.insert(country, categorize_with(score, cfg.category_cutoffs)?);
        }
    }
    Ok((Prepared { cleaned, categories }, warnings))
}

/// Network and feature table of one country.
pub struct CountryAnalysis {
    pub network: IndicatorNetwork,
    pub features: Vec<NodeFeatures>,
}

pub fn analyse_countries(cleaned: &CleanedPanels, countries: &[String], threshold: f64) -> Result<Vec<CountryAnalysis>> {
    countries
        .par_iter()
        .map(|c| {
            let panel = cleaned
                .panel(c)
                .ok_or_else(|| Error::domain(format!("country {c} not in panel")))?;
            let network = build_network(panel)?;
            let features = feature_table(&network, threshold)?;
            Ok(CountryAnalysis { network, features })
        })
        .collect()
}

/// Result of the pooled stratified fit.
pub struct PooledFit {
    pub model: FittedModel,
    pub eval: EvalReport,
    pub train_size: usize,
    pub test_size: usize,
}

/// Fit on the stratified training share of every scored country and score
/// the held-out share.
pub fn pooled_fit(
    analyses: &[CountryAnalysis],
    categories: &BTreeMap<String, PerformanceCategory>,
    cfg: &PipelineConfig,
) -> Result<PooledFit> {
    let rows: Vec<&NodeFeatures> = analyses
        .iter()
        .flat_map(|a| a.features.iter())
        .filter(|f| categories.contains_key(&f.country_code))
        .collect();
    let points: Vec<(String, String)> = rows
        .iter()
        .map(|f| (f.country_code.clone(), f.indicator_id.clone()))
        .collect();
    let plan = stratified_split(&points, categories, cfg.train_fraction, cfg.seed)?;

    let mut train_x = Vec::new();
    let mut train_y = Vec::new();
    let mut test = Vec::new();
    for f in &rows {
        match plan.side(&f.country_code, &f.indicator_id) {
            Some(Side::Train) => {
                train_x.push((f.x_d, f.x_h));
                train_y.push(f.y_label);
            }
            Some(Side::Test) => test.push(((f.x_d, f.x_h), f.y_label)),
            None => unreachable!("every point is assigned"),
        }
    }
    let mut model = fit_logistic(&train_x, &train_y)?;
    model.seed = Some(cfg.seed);
    model.train_fraction = Some(cfg.train_fraction);
    let eval = evaluate_at(&model.beta, &test, cfg.probability_threshold)?;
    Ok(PooledFit {
        model,
        eval,
        train_size: train_y.len(),
        test_size: test.len(),
    })
}

fn csv_bytes(f: impl FnOnce(&mut Vec<u8>) -> Result<()>) -> Result<Vec<u8>> {
    let mut buf = Vec::new();
    f(&mut buf)?;
    Ok(buf)
}

fn json_bytes<T: Serialize>(v: &T) -> Result<Vec<u8>> {
    let mut s = serde_json::to_vec_pretty(v)?;
    s.push(b'\n');
    Ok(s)
}

pub fn read_model_file(path: &Path) -> Result<FittedModel> {
    let text = fs::read_to_string(path)?;
    Ok(serde_json::from_str(&text)?)
}

/// Run one stage. Returns the manifest of files written; only
/// [`Stage::Run`] also writes `manifest.json`. On error every file written
/// by this call is removed.
pub fn run_stage(cfg: &PipelineConfig, stage: Stage) -> Result<Manifest> {
    cfg.validate()?;
    fs::create_dir_all(&cfg.out_dir)?;
    let mut out = OutputWriter::new(&cfg.out_dir);
    match execute(cfg, stage, &mut out) {
        Ok(()) => {
            let manifest = out.manifest();
            if stage == Stage::Run {
                let bytes = json_bytes(&manifest)?;
                let path = cfg.out_dir.join("manifest.json");
                if let Err(e) = fs::write(&path, bytes) {
                    out.discard();
                    return Err(e.into());
                }
            }
            Ok(manifest)
        }
        Err(e) => {
            out.discard();
            Err(e)
        }
    }
}

/// Full pipeline.
pub fn run_pipeline(cfg: &PipelineConfig) -> Result<Manifest> {
    run_stage(cfg, Stage::Run)
}

fn execute(cfg: &PipelineConfig, stage: Stage, out: &mut OutputWriter) -> Result<()> {
    let (prepared, warnings) = load_inputs(cfg).map_err(|e| e.in_stage("ingest"))?;
    for w in warnings {
        out.warn(w);
    }
    let cleaned = &prepared.cleaned;

    if matches!(stage, Stage::Ingest | Stage::Run) {
        out.write("drop_log.csv", &csv_bytes(|b| write_drop_log(b, &cleaned.drop_log))?)?;
    }
    if stage == Stage::Ingest {
        out.write("clean_panel.csv", &csv_bytes(|b| write_long_csv(b, &cleaned.to_records()))?)?;
        return Ok(());
    }

    let usable: Vec<String> = cleaned
        .panels
        .iter()
        .filter(|p| p.is_usable())
        .map(|p| p.country_code.clone())
        .collect();
    let selected: Vec<String> = if cfg.countries.is_empty() {
        usable.clone()
    } else {
        for c in &cfg.countries {
            if !usable.contains(c) {
                return Err(Error::domain(format!("country {c} has no usable panel")).in_stage("select"));
            }
        }
        let mut v = cfg.countries.clone();
        v.sort();
        v.dedup();
        v
    };
    for c in &selected {
        if !is_safe_code(c) {
            return Err(Error::domain(format!("country code `{c}` cannot name an output file")).in_stage("select"));
        }
    }

    let needs_model = matches!(stage, Stage::Fit | Stage::Evaluate | Stage::Classify | Stage::Report | Stage::Run);
    let pooled = needs_model && cfg.model_source == ModelSource::Fit;
    let analysed: Vec<String> = if pooled {
        let mut scored: Vec<String> = Vec::new();
        for c in &usable {
            if prepared.categories.contains_key(c) {
                scored.push(c.clone());
            } else {
                out.warn(format!("{c}: no SDG Index score; excluded from the pooled fit"));
            }
        }
        let mut all = scored;
        all.extend(selected.iter().cloned());
        all.sort();
        all.dedup();
        all
    } else {
        selected.clone()
    };

    let analyses = analyse_countries(cleaned, &analysed, cfg.strong_threshold).map_err(|e| e.in_stage("network"))?;
    let by_country: BTreeMap<&str, &CountryAnalysis> =
        analyses.iter().map(|a| (a.network.country_code.as_str(), a)).collect();

    if matches!(stage, Stage::Network | Stage::Report | Stage::Run) {
        for c in &selected {
            let a = by_country[c.as_str()];
            if matches!(stage, Stage::Network | Stage::Run) {
                out.write(&format!("nodes_{c}.csv"), &csv_bytes(|b| write_nodes_csv(b, &a.network))?)?;
            }
            out.write(&format!("heatmap_{c}.csv"), heatmap_csv(&a.network).as_bytes())?;
            if cfg.svg {
                out.write(&format!("heatmap_{c}.svg"), heatmap_svg(&a.network).as_bytes())?;
            }
        }
    }
    if matches!(stage, Stage::Features | Stage::Run) {
        for c in &selected {
            let a = by_country[c.as_str()];
            out.write(&format!("features_{c}.csv"), &csv_bytes(|b| write_features_csv(b, &a.features))?)?;
        }
    }
    if !needs_model {
        return Ok(());
    }

    let (beta, eval) = match cfg.model_source {
        ModelSource::Fit => {
            let fit = pooled_fit(&analyses, &prepared.categories, cfg).map_err(|e| e.in_stage("fit"))?;
            log::info!(
                "pooled fit: {} train / {} test points, accuracy {:.4}",
                fit.train_size,
                fit.test_size,
                fit.eval.accuracy
            );
            if matches!(stage, Stage::Fit | Stage::Evaluate | Stage::Run) {
                out.write("model.json", &json_bytes(&fit.model)?)?;
            }
            (
                fit.model.beta,
                EvalFile {
                    report: fit.eval,
                    evaluation_set: "test".into(),
                },
            )
        }
        source => {
            let beta = if source == ModelSource::File {
                let path = cfg.model_file.as_ref().expect("validated");
                read_model_file(path).map_err(|e| e.in_stage("model"))?.beta
            } else {
                PUBLISHED_BETA
            };
            let all: Vec<((f64, f64), u8)> = analyses
                .iter()
                .flat_map(|a| a.features.iter().map(|f| ((f.x_d, f.x_h), f.y_label)))
                .collect();
            let report = evaluate_at(&beta, &all, cfg.probability_threshold).map_err(|e| e.in_stage("evaluate"))?;
            (
                beta,
                EvalFile {
                    report,
                    evaluation_set: "all".into(),
                },
            )
        }
    };
    if matches!(stage, Stage::Evaluate | Stage::Run) {
        out.write("eval.json", &json_bytes(&eval)?)?;
    }
    if stage == Stage::Fit || stage == Stage::Evaluate {
        return Ok(());
    }

    for c in &selected {
        let a = by_country[c.as_str()];
        let report = country_report_at(&beta, &a.features, cfg.probability_threshold).map_err(|e| e.in_stage("report"))?;
        out.write(&format!("report_{c}.csv"), report_csv(&report).as_bytes())?;
        if stage == Stage::Classify {
            continue;
        }
        write_distribution(out, &report, cfg.svg)?;
    }
    Ok(())
}

fn write_distribution(out: &mut OutputWriter, report: &CountryReport, svg: bool) -> Result<()> {
    let c = &report.country_code;
    out.write(&format!("per_goal_{c}.csv"), per_goal_csv(report).as_bytes())?;
    out.write(&format!("bars_{c}.csv"), bars_csv(report).as_bytes())?;
    if svg {
        out.write(&format!("bars_{c}.svg"), bars_svg(report).as_bytes())?;
    }
    match (pie_csv(report), pie_svg(report)) {
        (Some(data), Some(fig)) => {
            out.write(&format!("pie_{c}.csv"), data.as_bytes())?;
            if svg {
                out.write(&format!("pie_{c}.svg"), fig.as_bytes())?;
            }
        }
        _ => out.warn(format!("{c}: no synergy-dominated indicators; pie chart skipped")),
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn config_validation() {
        let mut cfg = PipelineConfig {
            scores: Some("s.csv".into()),
            ..Default::default()
        };
        assert!(cfg.validate().is_ok());
        cfg.train_fraction = 1.0;
        assert!(matches!(cfg.validate(), Err(Error::Config(_))));
        cfg.train_fraction = 0.8;
        cfg.strong_threshold = 0.0;
        assert!(cfg.validate().is_err());
        cfg.strong_threshold = 0.8;
        cfg.category_cutoffs = CategoryCutoffs { moderate: 80.0, best: 50.0 };
        assert!(cfg.validate().is_err());
        cfg.category_cutoffs = CategoryCutoffs::default();
        cfg.scores = None;
        assert!(cfg.validate().is_err());
        cfg.model_source = ModelSource::Published;
        assert!(cfg.validate().is_ok());
        cfg.countries = vec!["../etc".into()];
        assert!(cfg.validate().is_err());
    }

    #[test]
    fn config_json_aliases() {
        let cfg: PipelineConfig = serde_json::from_str(r#"{"panel":"p.csv","model_source":"paper"}"#).unwrap();
        assert_eq!(cfg.model_source, ModelSource::Published);
        assert_eq!(cfg.strong_threshold, 0.8);
        assert!(serde_json::from_str::<PipelineConfig>(r#"{"bogus":1}"#).is_err());
    }
}
