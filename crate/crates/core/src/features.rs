//! Per-node predictors: normalized positive degree (direct effect) and
//! harmonic centrality on the strong subgraph (indirect effect).

use std::collections::VecDeque;
use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::network::{strengths, strong_subgraph, IndicatorNetwork, StrongGraph};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NodeFeatures {
    pub country_code: String,
    pub indicator_id: String,
    pub sdg_goal: u8,
    pub x_d: f64,
    pub x_h: f64,
    pub s_plus: f64,
    pub s_minus: f64,
    pub y_label: u8,
    pub degenerate: bool,
}

/// Share of the node's n−1 possible edges that carry a strictly positive weight.
pub fn direct_effect(network: &IndicatorNetwork, node: usize) -> Result<f64> {
    let n = network.len();
    if n < 2 {
        return Err(Error::domain("direct effect needs at least 2 nodes"));
    }
    let positive = network.incident_weights(node)?.filter(|&w| w > 0.0).count();
    Ok(positive as f64 / (n - 1) as f64)
}

/// Breadth-first hop distances from `source`; `None` for unreachable nodes.
pub fn bfs_distances(graph: &StrongGraph, source: usize) -> Vec<Option<usize>> {
    let mut dist = vec![None; graph.node_count()];
    dist[source] = Some(0);
    let mut queue = VecDeque::from([source]);
    while let Some(u) = queue.pop_front() {
        let du = dist[u].expect("queued nodes have a distance");
        for &v in graph.neighbors(u) {
            if dist[v].is_none() {
                dist[v] = Some(du + 1);
                queue.push_back(v);
            }
        }
    }
    dist
}

/// `(1/(n−1)) Σ_{j≠i} 1/d(i,j)`, with unreachable nodes contributing 0.
pub fn harmonic_centrality(graph: &StrongGraph, node: usize) -> Result<f64> {
    let n = graph.node_count();
    if n < 2 {
        return Err(Error::domain("harmonic centrality needs at least 2 nodes"));
    }
    if node >= n {
        return Err(Error::domain(format!("node index {node} out of range for {n} nodes")));
    }
    let sum: f64 = bfs_distances(graph, node)
        .into_iter()
        .flatten()
        .filter(|&d| d > 0)
        .map(|d| 1.0 / d as f64)
        .sum();
    Ok(sum / (n - 1) as f64)
}

/// One feature row per node, in node order.
pub fn feature_table(network: &IndicatorNetwork, threshold: f64) -> Result<Vec<NodeFeatures>> {
    let strong = strong_subgraph(network, threshold)?;
    (0..network.len())
        .map(|i| {
            let s = strengths(network, i)?;
            Ok(NodeFeatures {
                country_code: network.country_code.clone(),
                indicator_id: s.indicator_id,
                sdg_goal: network.nodes[i].sdg_goal,
                x_d: direct_effect(network, i)?,
                x_h: harmonic_centrality(&strong, i)?,
                s_plus: s.s_plus,
                s_minus: s.s_minus,
                y_label: s.y_label,
                degenerate: s.degenerate,
            })
        })
        .collect()
}

pub const FEATURE_HEADER: [&str; 9] = [
    "country_code",
    "indicator_id",
    "sdg_goal",
    "x_d",
    "x_h",
    "s_plus",
    "s_minus",
    "y_label",
    "degenerate",
];

/// Floats are written in shortest round-trip form so a re-read table
/// reproduces the same fit.
pub fn write_features_csv<W: Write>(writer: W, rows: &[NodeFeatures]) -> Result<()> {
    let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(writer);
    w.write_record(FEATURE_HEADER)?;
    for r in rows {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_features_csv<R: Read>(reader: R) -> Result<Vec<NodeFeatures>> {
    let mut rdr = csv::Reader::from_reader(reader);
    let mut out = Vec::new();
    for row in rdr.deserialize() {
        out.push(row?);
    }
    Ok(out)
}
