//! Complete signed correlation networks over indicator series.

use std::io::{Read, Write};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ingest::CountryPanel;

/// Default cutoff for the strong-synergy subgraph.
pub const DEFAULT_STRONG_THRESHOLD: f64 = 0.8;

/// Average (fractional) ranks, 1-based. Tied values share the mean of the
/// ranks they span.
pub fn average_ranks(values: &[f64]) -> Vec<f64> {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
    let mut ranks = vec![0.0; values.len()];
    let mut i = 0;
    while i < order.len() {
        let mut j = i + 1;
        while j < order.len() && values[order[j]] == values[order[i]] {
            j += 1;
        }
        // positions i..j (0-based) hold ranks i+1..=j
        let rank = (i + 1 + j) as f64 / 2.0;
        for &k in &order[i..j] {
            ranks[k] = rank;
        }
        i = j;
    }
    ranks
}

fn pearson_unchecked(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (a, b) in x.iter().zip(y) {
        let (dx, dy) = (a - mx, b - my);
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    (sxy / (sxx * syy).sqrt()).clamp(-1.0, 1.0)
}

fn check_pair(x: &[f64], y: &[f64]) -> Result<()> {
    if x.len() != y.len() {
        return Err(Error::domain(format!(
            "length mismatch: {} vs {}",
            x.len(),
            y.len()
        )));
    }
    if x.len() < 2 {
        return Err(Error::domain("correlation needs at least two observations"));
    }
    Ok(())
}

fn is_constant(v: &[f64]) -> bool {
    v.iter().all(|&a| a == v[0])
}

/// Spearman rank correlation: Pearson correlation of average ranks.
pub fn spearman(x: &[f64], y: &[f64]) -> Result<f64> {
    check_pair(x, y)?;
    if is_constant(x) || is_constant(y) {
        return Err(Error::domain("spearman is undefined for a constant sequence"));
    }
    Ok(pearson_unchecked(&average_ranks(x), &average_ranks(y)))
}

/// Pearson correlation; used for VIF with two predictors.
pub fn pearson(x: &[f64], y: &[f64]) -> Result<f64> {
    check_pair(x, y)?;
    if is_constant(x) || is_constant(y) {
        return Err(Error::domain("pearson is undefined for a constant sequence"));
    }
    Ok(pearson_unchecked(x, y))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct NodeMeta {
    pub indicator_id: String,
    pub sdg_goal: u8,
}

/// Complete weighted network of one country. Weights are stored as a dense
/// row-major n×n matrix with 1.0 on the (unused) diagonal.
#[derive(Debug, Clone, PartialEq)]
pub struct IndicatorNetwork {
    pub country_code: String,
    pub nodes: Vec<NodeMeta>,
    weights: Vec<f64>,
}

impl IndicatorNetwork {
    /// Build from an explicit weight matrix. The matrix must be square,
    /// symmetric, and bounded by 1 in absolute value off the diagonal.
    pub fn from_weights(
        country_code: impl Into<String>,
        nodes: Vec<NodeMeta>,
        matrix: Vec<Vec<f64>>,
    ) -> Result<Self> {
        let n = nodes.len();
        if matrix.len() != n || matrix.iter().any(|r| r.len() != n) {
            return Err(Error::domain(format!("weight matrix is not {n}x{n}")));
        }
        let mut weights = vec![1.0; n * n];
        for i in 0..n {
            for j in 0..n {
                if i == j {
                    continue;
                }
                let w = matrix[i][j];
                if !w.is_finite() || w.abs() > 1.0 {
                    return Err(Error::domain(format!("weight ({i},{j}) = {w} outside [-1, 1]")));
                }
                if w != matrix[j][i] {
                    return Err(Error::domain(format!("weight matrix asymmetric at ({i},{j})")));
                }
                weights[i * n + j] = w;
            }
        }
        Ok(IndicatorNetwork {
            country_code: country_code.into(),
            nodes,
            weights,
        })
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn weight(&self, i: usize, j: usize) -> f64 {
        self.weights[i * self.len() + j]
    }

    /// Row `i` of the matrix, diagonal included.
    pub fn row(&self, i: usize) -> &[f64] {
        let n = self.len();
        &self.weights[i * n..(i + 1) * n]
    }

    /// Weights on the star of `node`, i.e. every edge incident on it.
    pub fn incident_weights(&self, node: usize) -> Result<impl Iterator<Item = f64> + '_> {
        self.check_node(node)?;
        Ok(self
            .row(node)
            .iter()
            .enumerate()
            .filter(move |&(j, _)| j != node)
            .map(|(_, &w)| w))
    }

    pub(crate) fn check_node(&self, node: usize) -> Result<()> {
        if node < self.len() {
            Ok(())
        } else {
            Err(Error::domain(format!(
                "node index {node} out of range for {} nodes",
                self.len()
            )))
        }
    }

    /// Matrix as nested rows (diagonal 1.0).
    pub fn matrix(&self) -> Vec<Vec<f64>> {
        (0..self.len()).map(|i| self.row(i).to_vec()).collect()
    }
}

/// Spearman-weighted complete network over every retained series.
pub fn build_network(panel: &CountryPanel) -> Result<IndicatorNetwork> {
    let n = panel.series.len();
    if n < 2 {
        return Err(Error::domain(format!(
            "{}: a network needs at least 2 indicators, found {n}",
            panel.country_code
        )));
    }
    let series: Vec<Vec<f64>> = panel.series.iter().map(|s| s.scores()).collect();
    for (s, v) in panel.series.iter().zip(&series) {
        check_pair(v, &series[0])?;
        if is_constant(v) {
            return Err(Error::domain(format!(
                "{}/{} is constant",
                panel.country_code, s.indicator_id
            )));
        }
    }
    let ranks: Vec<Vec<f64>> = series.iter().map(|v| average_ranks(v)).collect();

    let rows: Vec<Vec<f64>> = (0..n)
        .into_par_iter()
        .map(|i| {
            (0..n)
                .map(|j| match i.cmp(&j) {
                    std::cmp::Ordering::Equal => 1.0,
                    // computed once per unordered pair with i < j, mirrored below
                    std::cmp::Ordering::Less => pearson_unchecked(&ranks[i], &ranks[j]),
                    std::cmp::Ordering::Greater => 0.0,
                })
                .collect()
        })
        .collect();
    let mut weights = vec![1.0; n * n];
    for i in 0..n {
        for j in (i + 1)..n {
            weights[i * n + j] = rows[i][j];
            weights[j * n + i] = rows[i][j];
        }
    }
    Ok(IndicatorNetwork {
        country_code: panel.country_code.clone(),
        nodes: panel
            .series
            .iter()
            .map(|s| NodeMeta {
                indicator_id: s.indicator_id.clone(),
                sdg_goal: s.sdg_goal,
            })
            .collect(),
        weights,
    })
}

/// Positive/negative strength of one node.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StrengthRecord {
    pub indicator_id: String,
    pub s_plus: f64,
    pub s_minus: f64,
    pub y_label: u8,
    /// All incident weights are zero; strengths are set to 0.5 each.
    pub degenerate: bool,
}

/// Signed strengths computed directly from a list of incident weights.
/// Returns `(s_plus, s_minus, degenerate)`.
pub fn star_strengths(incident: impl IntoIterator<Item = f64>) -> (f64, f64, bool) {
    let (mut pos, mut neg) = (0.0, 0.0);
    for w in incident {
        if w > 0.0 {
            pos += w;
        } else if w < 0.0 {
            neg -= w;
        }
    }
    let total = pos + neg;
    if total == 0.0 {
        (0.5, 0.5, true)
    } else {
        (pos / total, neg / total, false)
    }
}

pub fn strengths(network: &IndicatorNetwork, node: usize) -> Result<StrengthRecord> {
    let (s_plus, s_minus, degenerate) = star_strengths(network.incident_weights(node)?);
    Ok(StrengthRecord {
        indicator_id: network.nodes[node].indicator_id.clone(),
        s_plus,
        s_minus,
        y_label: label(s_plus, s_minus),
        degenerate,
    })
}

/// 1 (synergy-dominated) iff `s_plus >= s_minus`.
pub fn label(s_plus: f64, s_minus: f64) -> u8 {
    u8::from(s_plus >= s_minus)
}

/// Unweighted subgraph keeping edges with weight at or above a threshold.
#[derive(Debug, Clone, PartialEq)]
pub struct StrongGraph {
    pub threshold: f64,
    adjacency: Vec<Vec<usize>>,
}

impl StrongGraph {
    /// Build from an explicit undirected edge list on `n` nodes.
    pub fn from_edges(n: usize, edges: impl IntoIterator<Item = (usize, usize)>, threshold: f64) -> Result<Self> {
        let mut adjacency = vec![Vec::new(); n];
        for (a, b) in edges {
            if a >= n || b >= n {
                return Err(Error::domain(format!("edge ({a},{b}) out of range for {n} nodes")));
            }
            if a == b {
                return Err(Error::domain(format!("self-loop on node {a}")));
            }
            if !adjacency[a].contains(&b) {
                adjacency[a].push(b);
                adjacency[b].push(a);
            }
        }
        for list in &mut adjacency {
            list.sort_unstable();
        }
        Ok(StrongGraph { threshold, adjacency })
    }

    pub fn node_count(&self) -> usize {
        self.adjacency.len()
    }

    pub fn neighbors(&self, node: usize) -> &[usize] {
        &self.adjacency[node]
    }

    pub fn edge_count(&self) -> usize {
        self.adjacency.iter().map(Vec::len).sum::<usize>() / 2
    }

    pub fn has_edge(&self, a: usize, b: usize) -> bool {
        self.adjacency[a].binary_search(&b).is_ok()
    }

    /// Edges as `(a, b)` with `a < b`, sorted.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        self.adjacency
            .iter()
            .enumerate()
            .flat_map(|(a, list)| list.iter().filter(move |&&b| a < b).map(move |&b| (a, b)))
            .collect()
    }
}

pub fn strong_subgraph(network: &IndicatorNetwork, threshold: f64) -> Result<StrongGraph> {
    if !(threshold > 0.0 && threshold <= 1.0) {
        return Err(Error::domain(format!("strong threshold {threshold} outside (0, 1]")));
    }
    let n = network.len();
    let adjacency = (0..n)
        .map(|i| {
            (0..n)
                .filter(|&j| j != i && network.weight(i, j) >= threshold)
                .collect()
        })
        .collect();
    Ok(StrongGraph { threshold, adjacency })
}

/// Fixed 6-decimal formatting used for correlations on disk.
pub fn format_weight(w: f64) -> String {
    let s = format!("{w:.6}");
    if s == "-0.000000" {
        "0.000000".to_string()
    } else {
        s
    }
}

pub fn write_nodes_csv<W: Write>(writer: W, network: &IndicatorNetwork) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(["index", "indicator_id", "sdg_goal"])?;
    for (i, n) in network.nodes.iter().enumerate() {
        w.write_record([i.to_string(), n.indicator_id.clone(), n.sdg_goal.to_string()])?;
    }
    w.flush()?;
    Ok(())
}

/// Bare n×n matrix, no header, diagonal written as 1.0.
pub fn write_matrix_csv<W: Write>(writer: W, network: &IndicatorNetwork) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    for i in 0..network.len() {
        w.write_record(network.row(i).iter().map(|&x| format_weight(x)))?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_nodes_csv<R: Read>(reader: R) -> Result<Vec<NodeMeta>> {
    let mut rdr = csv::Reader::from_reader(reader);
    let mut out = Vec::new();
    for (k, row) in rdr.records().enumerate() {
        let row = row?;
        let line = row.position().map(|p| p.line()).unwrap_or(0);
        if row.len() != 3 || row[0].parse::<usize>().ok() != Some(k) {
            return Err(Error::parse(line, "expected `index,indicator_id,sdg_goal` in index order"));
        }
        let sdg_goal = row[2]
            .parse()
            .map_err(|_| Error::parse(line, format!("bad sdg_goal `{}`", &row[2])))?;
        out.push(NodeMeta {
            indicator_id: row[1].to_string(),
            sdg_goal,
        });
    }
    Ok(out)
}

pub fn read_matrix_csv<R: Read>(reader: R) -> Result<Vec<Vec<f64>>> {
    let mut rdr = csv::ReaderBuilder::new().has_headers(false).from_reader(reader);
    let mut out = Vec::new();
    for row in rdr.records() {
        let row = row?;
        let line = row.position().map(|p| p.line()).unwrap_or(0);
        let vals = row
            .iter()
            .map(|c| c.trim().parse::<f64>().map_err(|_| Error::parse(line, format!("bad weight `{c}`"))))
            .collect::<Result<Vec<_>>>()?;
        out.push(vals);
    }
    Ok(out)
}
