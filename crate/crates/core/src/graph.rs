//! Undirected simple graphs, the synthetic families used in the experiments,
//! and the degree statistics that govern sample complexity.
//!
//! Vertices are `0..p`. The local maximum degree of `i` is the largest degree
//! in its closed neighborhood `N(i) ∪ {i}`, and `dbar_max` is the mean of the
//! local maxima over all vertices.

use std::collections::BTreeSet;
use std::fmt::Write as _;

use num_rational::Ratio;
use rand::Rng;

use crate::error::{invalid, Error, Result};
use crate::rng::stream_rng;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Graph {
    adj: Vec<BTreeSet<usize>>,
}

impl Graph {
    /// Edgeless graph on `p` vertices.
    pub fn empty(p: usize) -> Self {
        Self {
            adj: vec![BTreeSet::new(); p],
        }
    }

    pub fn from_edges(p: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Result<Self> {
        let mut g = Self::empty(p);
        for (i, j) in edges {
            g.add_edge(i, j)?;
        }
        Ok(g)
    }

    pub fn complete(p: usize) -> Self {
        let mut g = Self::empty(p);
        for i in 0..p {
            for j in (i + 1)..p {
                g.insert(i, j);
            }
        }
        g
    }

    /// Star with center 0.
    pub fn star(p: usize) -> Self {
        let mut g = Self::empty(p);
        for j in 1..p {
            g.insert(0, j);
        }
        g
    }

    /// Path `0 - 1 - ... - (p-1)`.
    pub fn path(p: usize) -> Self {
        let mut g = Self::empty(p);
        for i in 1..p {
            g.insert(i - 1, i);
        }
        g
    }

    /// Adds `{i, j}`; re-adding an existing edge is a no-op.
    pub fn add_edge(&mut self, i: usize, j: usize) -> Result<()> {
        let p = self.p();
        if i == j {
            return invalid(format!("self-loop at vertex {i}"));
        }
        if i >= p || j >= p {
            return invalid(format!("edge {{{i}, {j}}} out of range for p = {p}"));
        }
        self.insert(i, j);
        Ok(())
    }

    fn insert(&mut self, i: usize, j: usize) {
        self.adj[i].insert(j);
        self.adj[j].insert(i);
    }

    pub fn p(&self) -> usize {
        self.adj.len()
    }

    pub fn neighbors(&self, i: usize) -> &BTreeSet<usize> {
        &self.adj[i]
    }

    pub fn degree(&self, i: usize) -> usize {
        self.adj[i].len()
    }

    pub fn has_edge(&self, i: usize, j: usize) -> bool {
        i < self.p() && self.adj[i].contains(&j)
    }

    pub fn edge_count(&self) -> usize {
        self.adj.iter().map(BTreeSet::len).sum::<usize>() / 2
    }

    /// Edges as `(i, j)` with `i < j`, ascending.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.adj
            .iter()
            .enumerate()
            .flat_map(|(i, nb)| nb.range((i + 1)..).map(move |&j| (i, j)))
    }

    /// Whether every path from `i` to `j` passes through `sep`.
    pub fn separates(&self, i: usize, j: usize, sep: &[usize]) -> bool {
        let blocked: BTreeSet<usize> = sep.iter().copied().collect();
        if blocked.contains(&i) || blocked.contains(&j) {
            return true;
        }
        let mut seen = vec![false; self.p()];
        let mut stack = vec![i];
        seen[i] = true;
        while let Some(v) = stack.pop() {
            if v == j {
                return false;
            }
            for &w in &self.adj[v] {
                if !seen[w] && !blocked.contains(&w) {
                    seen[w] = true;
                    stack.push(w);
                }
            }
        }
        true
    }

    /// Edge-list text: a `p <count>` header, then one `i j` line per edge with
    /// `i < j`, sorted by `i` then `j`. Indices are 0-based.
    pub fn to_edge_list(&self) -> String {
        let mut out = format!("p {}\n", self.p());
        for (i, j) in self.edges() {
            let _ = writeln!(out, "{i} {j}");
        }
        out
    }

    pub fn parse_edge_list(text: &str) -> Result<Self> {
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(n, l)| (n + 1, l.trim()))
            .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));
        let (hline, header) = lines.next().ok_or(Error::Parse {
            line: 1,
            message: "missing `p <count>` header".into(),
        })?;
        let p = match header.split_whitespace().collect::<Vec<_>>().as_slice() {
            ["p", n] => n.parse::<usize>().map_err(|e| Error::Parse {
                line: hline,
                message: e.to_string(),
            })?,
            _ => {
                return Err(Error::Parse {
                    line: hline,
                    message: format!("expected `p <count>`, got `{header}`"),
                })
            }
        };
        let mut g = Self::empty(p);
        for (line, l) in lines {
            let nums: Vec<usize> = l
                .split_whitespace()
                .map(str::parse)
                .collect::<std::result::Result<_, _>>()
                .map_err(|e: std::num::ParseIntError| Error::Parse {
                    line,
                    message: e.to_string(),
                })?;
            let [i, j] = nums[..] else {
                return Err(Error::Parse {
                    line,
                    message: format!("expected `i j`, got `{l}`"),
                });
            };
            g.add_edge(i, j).map_err(|e| Error::Parse {
                line,
                message: e.to_string(),
            })?;
        }
        Ok(g)
    }
}

/// Degree statistics of a graph.
#[derive(Clone, Debug, PartialEq)]
pub struct DegreeStats {
    pub degrees: Vec<usize>,
    pub d_max: usize,
    /// `local_max[i]` is the largest degree over `N(i) ∪ {i}`.
    pub local_max: Vec<usize>,
    /// Mean of `local_max`, exact.
    pub dbar_max: Ratio<usize>,
}

impl DegreeStats {
    pub fn dbar_max_f64(&self) -> f64 {
        *self.dbar_max.numer() as f64 / *self.dbar_max.denom() as f64
    }
}

pub fn degree_stats(g: &Graph) -> DegreeStats {
    let p = g.p();
    let degrees: Vec<usize> = (0..p).map(|i| g.degree(i)).collect();
    let local_max: Vec<usize> = (0..p)
        .map(|i| {
            g.neighbors(i)
                .iter()
                .map(|&j| degrees[j])
                .fold(degrees[i], usize::max)
        })
        .collect();
    let d_max = degrees.iter().copied().max().unwrap_or(0);
    let dbar_max = if p == 0 {
        Ratio::from_integer(0)
    } else {
        Ratio::new(local_max.iter().sum(), p)
    };
    DegreeStats {
        degrees,
        d_max,
        local_max,
        dbar_max,
    }
}

/// Number of vertex pairs that are edges in exactly one of the two graphs.
pub fn hamming_distance(a: &Graph, b: &Graph) -> Result<usize> {
    if a.p() != b.p() {
        return Err(Error::DimensionMismatch(format!(
            "graphs on {} and {} vertices",
            a.p(),
            b.p()
        )));
    }
    let twice: usize = (0..a.p())
        .map(|i| a.neighbors(i).symmetric_difference(b.neighbors(i)).count())
        .sum();
    Ok(twice / 2)
}

/// A clique on `0..clique_size` plus a disjoint path on the remaining vertices.
pub fn gen_single_clique_chain(p: usize, clique_size: usize) -> Result<Graph> {
    if p == 0 || clique_size == 0 {
        return invalid("single clique chain needs p > 0 and clique_size > 0");
    }
    if clique_size > p {
        return invalid(format!("clique of size {clique_size} does not fit in p = {p}"));
    }
    gen_multi_clique_chain(p, &[clique_size])
}

/// Disjoint cliques laid out consecutively from vertex 0, then a disjoint path
/// over whatever vertices are left.
pub fn gen_multi_clique_chain(p: usize, clique_sizes: &[usize]) -> Result<Graph> {
    if p == 0 {
        return invalid("p must be positive");
    }
    let used: usize = clique_sizes.iter().sum();
    if used > p {
        return invalid(format!("clique sizes sum to {used} > p = {p}"));
    }
    let mut g = Graph::empty(p);
    let mut start = 0;
    for &size in clique_sizes {
        for i in start..start + size {
            for j in (i + 1)..start + size {
                g.insert(i, j);
            }
        }
        start += size;
    }
    for i in (start + 1)..p {
        g.insert(i - 1, i);
    }
    Ok(g)
}

/// Preferential-attachment parameters. The seed graph is Erdős–Rényi on
/// `seed_size` vertices with edge probability `seed_edge_prob`, redrawn until
/// it has at least one edge. Each later vertex attaches to
/// `min(edges_per_step, existing vertices)` distinct earlier vertices chosen
/// with probability proportional to `degree + 1`.
#[derive(Clone, Debug)]
pub struct PowerLawConfig {
    pub p: usize,
    pub seed_size: usize,
    pub edges_per_step: usize,
    pub seed_edge_prob: f64,
}

impl PowerLawConfig {
    pub fn new(p: usize, seed_size: usize, edges_per_step: usize) -> Self {
        Self {
            p,
            seed_size,
            edges_per_step,
            seed_edge_prob: 0.5,
        }
    }
}

pub fn gen_power_law(p: usize, seed_size: usize, edges_per_step: usize, rng_seed: u64) -> Result<Graph> {
    PowerLawConfig::new(p, seed_size, edges_per_step).generate(rng_seed)
}

impl PowerLawConfig {
    pub fn generate(&self, rng_seed: u64) -> Result<Graph> {
        let Self {
            p,
            seed_size,
            edges_per_step,
            seed_edge_prob,
        } = *self;
        if seed_size == 0 || seed_size >= p {
            return invalid(format!("need 0 < seed_size < p, got seed_size = {seed_size}, p = {p}"));
        }
        if edges_per_step == 0 {
            return invalid("edges_per_step must be at least 1");
        }
        if !(0.0..=1.0).contains(&seed_edge_prob) || (seed_size >= 2 && seed_edge_prob == 0.0) {
            return invalid(format!("seed edge probability {seed_edge_prob} cannot produce an edge"));
        }
        let mut rng = stream_rng(rng_seed, 0);
        let mut g = Graph::empty(p);
        if seed_size >= 2 {
            loop {
                for i in 0..seed_size {
                    for j in (i + 1)..seed_size {
                        if rng.random_bool(seed_edge_prob) {
                            g.insert(i, j);
                        }
                    }
                }
                if g.edge_count() > 0 {
                    break;
                }
            }
        }
        for v in seed_size..p {
            let mut weights: Vec<f64> = (0..v).map(|u| (g.degree(u) + 1) as f64).collect();
            for _ in 0..edges_per_step.min(v) {
                let total: f64 = weights.iter().sum();
                let mut x = rng.random::<f64>() * total;
                let mut pick = v - 1;
                for (u, &w) in weights.iter().enumerate() {
                    if w > 0.0 && x < w {
                        pick = u;
                        break;
                    }
                    x -= w;
                }
                while weights[pick] == 0.0 {
                    pick -= 1;
                }
                weights[pick] = 0.0;
                g.insert(pick, v);
            }
        }
        Ok(g)
    }
}
