//! Natural visibility graphs from value windows, degree statistics, and the
//! synthetic reference generators (regular, Erdos-Renyi, Watts-Strogatz).

use std::collections::BTreeMap;
use std::fmt::Write as _;

use ndarray::Array2;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum VisGraphError {
    #[error("invalid node pair ({i}, {j}): need i < j")]
    BadPair { i: usize, j: usize },
    #[error("series too short: {0} points (need at least 2)")]
    TooShort(usize),
    #[error("non-finite value {value} at index {index}")]
    NonFinite { index: usize, value: f64 },
    #[error("infeasible generator arguments: {0}")]
    BadGeneratorArgs(String),
}

/// Binary adjacency over time-indexed nodes. Node `u` is window offset `u`
/// (oldest observation first).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VisibilityGraph {
    n: usize,
    directed: bool,
    adj: Array2<u8>,
}

impl VisibilityGraph {
    /// Edgeless graph on `n` nodes.
    pub fn empty(n: usize, directed: bool) -> Self {
        Self {
            n,
            directed,
            adj: Array2::zeros((n, n)),
        }
    }

    pub fn node_count(&self) -> usize {
        self.n
    }

    pub fn is_directed(&self) -> bool {
        self.directed
    }

    pub fn adjacency(&self) -> &Array2<u8> {
        &self.adj
    }

    /// Dense adjacency as f64, for feeding the GCN normalization.
    pub fn adjacency_f64(&self) -> Array2<f64> {
        self.adj.mapv(f64::from)
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.adj[[u, v]] == 1
    }

    /// Adds the edge `u -> v` (and `v -> u` when undirected).
    pub fn insert(&mut self, u: usize, v: usize) {
        self.adj[[u, v]] = 1;
        if !self.directed {
            self.adj[[v, u]] = 1;
        }
    }

    /// Edges as `(src, dst)` pairs: one pair per undirected edge (`src < dst`),
    /// one per arc when directed.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for u in 0..self.n {
            for v in (u + 1)..self.n {
                if self.adj[[u, v]] == 1 {
                    out.push((u, v));
                }
                if self.directed && self.adj[[v, u]] == 1 {
                    out.push((v, u));
                }
            }
        }
        out
    }

    pub fn edge_count(&self) -> usize {
        self.edges().len()
    }

    /// Undirected copy: symmetric closure for directed graphs.
    pub fn symmetrized(&self) -> VisibilityGraph {
        let mut g = VisibilityGraph::empty(self.n, false);
        for u in 0..self.n {
            for v in 0..self.n {
                if u != v && self.adj[[u, v]] == 1 {
                    g.insert(u.min(v), u.max(v));
                }
            }
        }
        g
    }

    /// Breadth-first reachability from node 0, ignoring arc direction.
    pub fn is_connected(&self) -> bool {
        if self.n == 0 {
            return true;
        }
        let mut seen = vec![false; self.n];
        let mut queue = std::collections::VecDeque::from([0usize]);
        seen[0] = true;
        while let Some(u) = queue.pop_front() {
            for v in 0..self.n {
                if !seen[v] && (self.adj[[u, v]] == 1 || self.adj[[v, u]] == 1) {
                    seen[v] = true;
                    queue.push_back(v);
                }
            }
        }
        seen.into_iter().all(|s| s)
    }

    /// Edge-list CSV (`src,dst` header, one row per edge/arc).
    pub fn to_edge_list_csv(&self) -> String {
        let mut out = String::from("src,dst\n");
        for (u, v) in self.edges() {
            let _ = writeln!(out, "{u},{v}");
        }
        out
    }

    /// Dense 0/1 matrix, one comma-separated row per node.
    pub fn to_matrix_csv(&self) -> String {
        let mut out = String::new();
        for u in 0..self.n {
            for v in 0..self.n {
                if v > 0 {
                    out.push(',');
                }
                let _ = write!(out, "{}", self.adj[[u, v]]);
            }
            out.push('\n');
        }
        out
    }
}

/// Per-node degrees with summary statistics.
#[derive(Debug, Clone)]
pub struct DegreeStats {
    pub degrees: Vec<usize>,
    pub mean: f64,
    pub variance: f64,
    pub histogram: BTreeMap<usize, usize>,
}

/// Line-of-sight test: `i` and `j` see each other iff every intermediate
/// point lies strictly below the chord between them.
pub fn is_visible(values: &[f64], i: usize, j: usize) -> Result<bool, VisGraphError> {
    if i >= j {
        return Err(VisGraphError::BadPair { i, j });
    }
    if j == i + 1 {
        return Ok(true);
    }
    let (vi, vj) = (values[i], values[j]);
    for k in (i + 1)..j {
        let chord = vi + (vj - vi) * (k - i) as f64 / (j - i) as f64;
        if values[k] >= chord {
            return Ok(false);
        }
    }
    Ok(true)
}

fn validate_series(values: &[f64]) -> Result<(), VisGraphError> {
    if values.len() < 2 {
        return Err(VisGraphError::TooShort(values.len()));
    }
    for (index, &value) in values.iter().enumerate() {
        if !value.is_finite() {
            return Err(VisGraphError::NonFinite { index, value });
        }
    }
    Ok(())
}

/// Targets visible from `src`, via the per-source maximum-slope scan:
/// edge `(i, j)` exists iff `slope(i, j)` strictly exceeds every
/// `slope(i, k)` with `i < k < j`.
fn visible_from(values: &[f64], src: usize) -> Vec<usize> {
    let mut out = Vec::new();
    let mut max_slope = f64::NEG_INFINITY;
    for j in (src + 1)..values.len() {
        let slope = (values[j] - values[src]) / (j - src) as f64;
        if j == src + 1 || slope > max_slope {
            out.push(j);
        }
        if slope > max_slope {
            max_slope = slope;
        }
    }
    out
}

fn assemble(values: &[f64], directed: bool, rows: Vec<Vec<usize>>) -> VisibilityGraph {
    let mut g = VisibilityGraph::empty(values.len(), directed);
    for (src, targets) in rows.into_iter().enumerate() {
        for dst in targets {
            g.insert(src, dst);
        }
    }
    g
}

/// Build the natural visibility graph of `values` with the sequential scan.
pub fn build_vg_sequential(
    values: &[f64],
    directed: bool,
) -> Result<VisibilityGraph, VisGraphError> {
    validate_series(values)?;
    let rows = (0..values.len()).map(|src| visible_from(values, src)).collect();
    Ok(assemble(values, directed, rows))
}

/// Build the natural visibility graph of `values`. With the `parallel`
/// feature the per-source scans fan out across threads; the result is
/// identical to [`build_vg_sequential`].
pub fn build_vg(values: &[f64], directed: bool) -> Result<VisibilityGraph, VisGraphError> {
    validate_series(values)?;
    #[cfg(feature = "parallel")]
    let rows: Vec<Vec<usize>> = {
        use rayon::prelude::*;
        (0..values.len())
            .into_par_iter()
            .map(|src| visible_from(values, src))
            .collect()
    };
    #[cfg(not(feature = "parallel"))]
    let rows: Vec<Vec<usize>> = (0..values.len()).map(|src| visible_from(values, src)).collect();
    Ok(assemble(values, directed, rows))
}

/// Total degree per node (in + out for directed graphs), with mean,
/// population variance, and a histogram keyed by degree.
pub fn degree_stats(g: &VisibilityGraph) -> DegreeStats {
    let n = g.node_count();
    let mut degrees = Vec::with_capacity(n);
    for u in 0..n {
        let mut d = 0usize;
        for v in 0..n {
            d += g.adj[[u, v]] as usize;
            if g.directed {
                d += g.adj[[v, u]] as usize;
            }
        }
        degrees.push(d);
    }
    let mean = degrees.iter().sum::<usize>() as f64 / n as f64;
    let variance = degrees
        .iter()
        .map(|&d| (d as f64 - mean).powi(2))
        .sum::<f64>()
        / n as f64;
    let mut histogram = BTreeMap::new();
    for &d in &degrees {
        *histogram.entry(d).or_insert(0) += 1;
    }
    DegreeStats {
        degrees,
        mean,
        variance,
        histogram,
    }
}

/// Circulant regular graph: every node connects to its `k/2` nearest
/// neighbors on each side (plus the antipode when `k` is odd and `n` even).
pub fn gen_regular(n: usize, k: usize) -> Result<VisibilityGraph, VisGraphError> {
    if n == 0 || k >= n || (n * k) % 2 != 0 {
        return Err(VisGraphError::BadGeneratorArgs(format!(
            "regular graph needs k < n and n*k even, got n={n}, k={k}"
        )));
    }
    let mut g = VisibilityGraph::empty(n, false);
    for u in 0..n {
        for d in 1..=(k / 2) {
            g.insert(u, (u + d) % n);
        }
        if k % 2 == 1 {
            g.insert(u, (u + n / 2) % n);
        }
    }
    Ok(g)
}

/// Erdos-Renyi G(n, p): each unordered pair is an edge independently with
/// probability `p`.
pub fn gen_random(n: usize, p: f64, seed: u64) -> Result<VisibilityGraph, VisGraphError> {
    if !(0.0..=1.0).contains(&p) {
        return Err(VisGraphError::BadGeneratorArgs(format!(
            "edge probability {p} outside [0, 1]"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut g = VisibilityGraph::empty(n, false);
    for u in 0..n {
        for v in (u + 1)..n {
            if rng.random::<f64>() < p {
                g.insert(u, v);
            }
        }
    }
    Ok(g)
}

/// Watts-Strogatz small world: ring lattice of degree `k`, each lattice edge
/// rewired with probability `p_rewire` to a uniform non-duplicate, non-self
/// target. An edge is kept unchanged when no valid target exists, so the
/// edge count (and mean degree) is preserved.
pub fn gen_small_world(
    n: usize,
    k: usize,
    p_rewire: f64,
    seed: u64,
) -> Result<VisibilityGraph, VisGraphError> {
    if n == 0 || k % 2 != 0 || k >= n {
        return Err(VisGraphError::BadGeneratorArgs(format!(
            "small-world graph needs even k < n, got n={n}, k={k}"
        )));
    }
    if !(0.0..=1.0).contains(&p_rewire) {
        return Err(VisGraphError::BadGeneratorArgs(format!(
            "rewiring probability {p_rewire} outside [0, 1]"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut g = VisibilityGraph::empty(n, false);
    for u in 0..n {
        for d in 1..=(k / 2) {
            g.insert(u, (u + d) % n);
        }
    }
    for u in 0..n {
        for d in 1..=(k / 2) {
            let v = (u + d) % n;
            if rng.random::<f64>() >= p_rewire {
                continue;
            }
            // degree(u) == n-1 means every other node is already a neighbor
            let taken: usize = (0..n).filter(|&w| w != u && g.has_edge(u, w)).count();
            if taken >= n - 1 {
                continue;
            }
            let w = loop {
                let cand = rng.random_range(0..n);
                if cand != u && !g.has_edge(u, cand) {
                    break cand;
                }
            };
            g.adj[[u, v]] = 0;
            g.adj[[v, u]] = 0;
            g.insert(u.min(w), u.max(w));
        }
    }
    Ok(g)
}
