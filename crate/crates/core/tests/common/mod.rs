//! Brute-force reference implementations used as test oracles. None of
//! these share code with the library paths they check.
#![allow(dead_code)]

/// Rank of each element: 1 + (#smaller) + (#equal − 1)/2.
pub fn brute_ranks(v: &[f64]) -> Vec<f64> {
    v.iter()
        .map(|&a| {
            let less = v.iter().filter(|&&b| b < a).count() as f64;
            let equal = v.iter().filter(|&&b| b == a).count() as f64;
            1.0 + less + (equal - 1.0) / 2.0
        })
        .collect()
}

/// Textbook single-pass Pearson formula.
pub fn brute_pearson(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len() as f64;
    let sx: f64 = x.iter().sum();
    let sy: f64 = y.iter().sum();
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| a * b).sum();
    let sxx: f64 = x.iter().map(|a| a * a).sum();
    let syy: f64 = y.iter().map(|b| b * b).sum();
    (n * sxy - sx * sy) / ((n * sxx - sx * sx) * (n * syy - sy * sy)).sqrt()
}

pub fn brute_spearman(x: &[f64], y: &[f64]) -> f64 {
    brute_pearson(&brute_ranks(x), &brute_ranks(y))
}

/// Floyd–Warshall hop distances; `None` when unreachable.
pub fn all_pairs_hops(n: usize, edges: &[(usize, usize)]) -> Vec<Vec<Option<usize>>> {
    const INF: usize = usize::MAX / 4;
    let mut d = vec![vec![INF; n]; n];
    for (i, row) in d.iter_mut().enumerate() {
        row[i] = 0;
    }
    for &(a, b) in edges {
        d[a][b] = 1;
        d[b][a] = 1;
    }
    for k in 0..n {
        for i in 0..n {
            for j in 0..n {
                if d[i][k] + d[k][j] < d[i][j] {
                    d[i][j] = d[i][k] + d[k][j];
                }
            }
        }
    }
    d.into_iter()
        .map(|row| row.into_iter().map(|x| (x < INF).then_some(x)).collect())
        .collect()
}

/// Harmonic centrality from an all-pairs distance table, summed in node order.
pub fn harmonic_from_table(table: &[Vec<Option<usize>>], node: usize) -> f64 {
    let n = table.len();
    let mut sum = 0.0;
    for j in 0..n {
        if j == node {
            continue;
        }
        if let Some(d) = table[node][j] {
            sum += 1.0 / d as f64;
        }
    }
    sum / (n - 1) as f64
}

/// Bernoulli log-likelihood written out directly from the definition.
pub fn naive_log_likelihood(x: &[(f64, f64)], y: &[u8], beta: [f64; 3]) -> f64 {
    x.iter()
        .zip(y)
        .map(|(&(d, h), &yi)| {
            let p = 1.0 / (1.0 + (-(beta[0] + beta[1] * d + beta[2] * h)).exp());
            if yi == 1 {
                p.ln()
            } else {
                (1.0 - p).ln()
            }
        })
        .sum()
}

/// Best log-likelihood over a regular grid on [lo, hi]^3.
pub fn grid_search_mle(x: &[(f64, f64)], y: &[u8], lo: f64, hi: f64, step: f64) -> (f64, [f64; 3]) {
    let n = ((hi - lo) / step).round() as usize + 1;
    let mut best = (f64::NEG_INFINITY, [0.0; 3]);
    for a in 0..n {
        for b in 0..n {
            for c in 0..n {
                let beta = [lo + a as f64 * step, lo + b as f64 * step, lo + c as f64 * step];
                let ll = naive_log_likelihood(x, y, beta);
                if ll > best.0 {
                    best = (ll, beta);
                }
            }
        }
    }
    best
}

/// Central finite-difference gradient of the naive log-likelihood.
pub fn fd_gradient(x: &[(f64, f64)], y: &[u8], beta: [f64; 3], h: f64) -> [f64; 3] {
    let mut g = [0.0; 3];
    for k in 0..3 {
        let mut up = beta;
        let mut dn = beta;
        up[k] += h;
        dn[k] -= h;
        g[k] = (naive_log_likelihood(x, y, up) - naive_log_likelihood(x, y, dn)) / (2.0 * h);
    }
    g
}
