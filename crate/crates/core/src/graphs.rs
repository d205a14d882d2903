//! Closed index walks of length `k` up to relabelling, and the Gaussian
//! trace moments they decompose.
//!
//! A walk `(i_1, .., i_k, i_1)` over `{1..n}` is identified with the
//! restricted-growth string (RGS) `g` obtained by numbering vertices in
//! order of first visit: `g(1) = 1` and `g(i) <= max(g(1..i-1)) + 1`.
//! Every RGS of length `k` is one isomorphism class of walks, and the class
//! with `t` vertices contains `n (n-1) .. (n-t+1)` walks.
//!
//! Each class falls into exactly one category:
//!
//! 1. every edge is traversed exactly twice, once in each direction, there
//!    are no loops, and the distinct edges form a tree (`t = k/2 + 1`);
//! 2. some edge (or loop) has odd multiplicity;
//! 3. everything else.
//!
//! For independent centered Gaussian entries category 2 contributes nothing
//! and `E (1/n) Tr (Y/sqrt n)^k = S1 + S3`.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{ensure, Result};
use crate::exec::Exec;
use crate::matrix::VarianceProfile;

/// Longest walk [`enumerate_canonical`] accepts.
pub const MAX_ENUMERATION_K: usize = 12;
/// Limits of [`gaussian_moment_exact`].
pub const MAX_EXACT_K: usize = 8;
pub const MAX_EXACT_N: usize = 16;
/// Largest `n^k` accepted by [`wick_moment_oracle`].
pub const MAX_ORACLE_WALKS: u64 = 10_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Category {
    /// Doubled tree.
    One,
    /// Some odd multiplicity.
    Two,
    /// All other.
    Three,
}

impl Category {
    pub fn number(self) -> u8 {
        match self {
            Category::One => 1,
            Category::Two => 2,
            Category::Three => 3,
        }
    }
}

impl fmt::Display for Category {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.number())
    }
}

/// A distinct undirected edge `{a, b}` (`a <= b`, one-based) of a walk.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Edge {
    pub a: usize,
    pub b: usize,
    /// Traversals `a -> b` (all traversals for a loop).
    pub forward: usize,
    /// Traversals `b -> a` (zero for a loop).
    pub backward: usize,
}

impl Edge {
    pub fn multiplicity(&self) -> usize {
        self.forward + self.backward
    }

    pub fn is_loop(&self) -> bool {
        self.a == self.b
    }
}

/// Canonical representative of a class of closed walks.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CanonicalGraph {
    pub g: Vec<usize>,
    pub t: usize,
    pub edges: Vec<Edge>,
    pub category: Category,
}

impl CanonicalGraph {
    pub fn from_rgs(g: &[usize]) -> Result<Self> {
        validate_rgs(g)?;
        let edges = walk_edges(g);
        let t = *g.iter().max().unwrap();
        let category = categorize(t, &edges);
        Ok(Self {
            g: g.to_vec(),
            t,
            edges,
            category,
        })
    }

    pub fn k(&self) -> usize {
        self.g.len()
    }

    /// `g` joined with dashes, e.g. `1-2-1`.
    pub fn label(&self) -> String {
        self.g.iter().map(|v| v.to_string()).collect::<Vec<_>>().join("-")
    }
}

fn validate_rgs(g: &[usize]) -> Result<()> {
    ensure!(!g.is_empty(), Validation, "restricted-growth string must be nonempty");
    ensure!(g[0] == 1, Validation, "restricted-growth string must start at 1");
    let mut max = 1;
    for (i, &v) in g.iter().enumerate().skip(1) {
        ensure!(
            v >= 1 && v <= max + 1,
            Validation,
            "position {}: value {v} exceeds running maximum {max} + 1",
            i + 1
        );
        max = max.max(v);
    }
    Ok(())
}

/// Distinct edges of the closed walk `g(1) -> g(2) -> .. -> g(k) -> g(1)`,
/// in order of first traversal.
fn walk_edges(g: &[usize]) -> Vec<Edge> {
    let k = g.len();
    let mut edges: Vec<Edge> = Vec::new();
    for i in 0..k {
        let (from, to) = (g[i], g[(i + 1) % k]);
        let (a, b) = (from.min(to), from.max(to));
        let idx = match edges.iter().position(|e| e.a == a && e.b == b) {
            Some(p) => p,
            None => {
                edges.push(Edge {
                    a,
                    b,
                    forward: 0,
                    backward: 0,
                });
                edges.len() - 1
            }
        };
        if from <= to {
            edges[idx].forward += 1;
        } else {
            edges[idx].backward += 1;
        }
    }
    edges
}

fn is_tree(t: usize, edges: &[Edge]) -> bool {
    if edges.len() + 1 != t {
        return false;
    }
    let mut parent: Vec<usize> = (0..=t).collect();
    fn find(p: &mut [usize], mut x: usize) -> usize {
        while p[x] != x {
            p[x] = p[p[x]];
            x = p[x];
        }
        x
    }
    for e in edges {
        let (ra, rb) = (find(&mut parent, e.a), find(&mut parent, e.b));
        if ra == rb {
            return false;
        }
        parent[ra] = rb;
    }
    true
}

fn categorize(t: usize, edges: &[Edge]) -> Category {
    let doubled = edges.iter().all(|e| !e.is_loop() && e.forward == 1 && e.backward == 1);
    if doubled && is_tree(t, edges) {
        Category::One
    } else if edges.iter().any(|e| e.multiplicity() % 2 == 1) {
        Category::Two
    } else {
        Category::Three
    }
}

/// Category of the walk class given by the restricted-growth string `g`.
pub fn classify(g: &[usize]) -> Result<Category> {
    Ok(CanonicalGraph::from_rgs(g)?.category)
}

/// All restricted-growth strings of length `k`, in lexicographic order.
pub fn restricted_growth_strings(k: usize) -> Result<Vec<Vec<usize>>> {
    ensure!(
        (1..=MAX_ENUMERATION_K).contains(&k),
        Domain,
        "k must lie in 1..={MAX_ENUMERATION_K}, got {k}"
    );
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(k);
    fn extend(cur: &mut Vec<usize>, max: usize, k: usize, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for v in 1..=max + 1 {
            cur.push(v);
            extend(cur, max.max(v), k, out);
            cur.pop();
        }
    }
    cur.push(1);
    extend(&mut cur, 1, k, &mut out);
    Ok(out)
}

/// Every canonical graph with `k` edges; there are `Bell(k)` of them.
pub fn enumerate_canonical(k: usize) -> Result<Vec<CanonicalGraph>> {
    restricted_growth_strings(k)?
        .iter()
        .map(|g| CanonicalGraph::from_rgs(g))
        .collect()
}

/// Number of canonical graphs in categories 1, 2 and 3.
pub fn category_counts(k: usize) -> Result<(usize, usize, usize)> {
    let mut c = (0, 0, 0);
    for graph in enumerate_canonical(k)? {
        match graph.category {
            Category::One => c.0 += 1,
            Category::Two => c.1 += 1,
            Category::Three => c.2 += 1,
        }
    }
    Ok(c)
}

/// `n (n-1) .. (n-t+1)`: walks per class with `t` vertices.
pub fn class_size(t: usize, n: usize) -> u128 {
    if t > n {
        return 0;
    }
    (0..t).map(|j| (n - j) as u128).product()
}

/// `E Y^m / sigma^m` for a centered Gaussian: `(m-1)!!` for even `m`, else 0.
pub fn gaussian_moment_factor(m: usize) -> f64 {
    if m % 2 == 1 {
        return 0.0;
    }
    (1..m).step_by(2).map(|j| j as f64).product()
}

/// `E Y^m` for a centered Gaussian with variance `sigma2`.
pub fn gaussian_moment(m: usize, sigma2: f64) -> f64 {
    if m % 2 == 1 {
        0.0
    } else {
        gaussian_moment_factor(m) * sigma2.powi((m / 2) as i32)
    }
}

/// `n^-(k/2+1) sum over injective labellings of prod_e E Y_e^{mult(e)}`.
pub fn graph_contribution(graph: &CanonicalGraph, p: &VarianceProfile) -> f64 {
    graph_contribution_with(graph, p, Exec::default())
}

pub fn graph_contribution_with(graph: &CanonicalGraph, p: &VarianceProfile, exec: Exec) -> f64 {
    let n = p.n();
    let t = graph.t;
    if t > n || graph.edges.iter().any(|e| e.multiplicity() % 2 == 1) {
        return 0.0;
    }
    let edges: Vec<(usize, usize, i32, f64)> = graph
        .edges
        .iter()
        .map(|e| {
            let m = e.multiplicity();
            (e.a - 1, e.b - 1, (m / 2) as i32, gaussian_moment_factor(m))
        })
        .collect();

    fn walk(
        depth: usize,
        labels: &mut Vec<usize>,
        used: &mut [bool],
        t: usize,
        p: &VarianceProfile,
        edges: &[(usize, usize, i32, f64)],
    ) -> f64 {
        if depth == t {
            return edges
                .iter()
                .map(|&(a, b, half, c)| c * p.sigma2(labels[a], labels[b]).powi(half))
                .product();
        }
        let mut acc = 0.0;
        for v in 0..used.len() {
            if used[v] {
                continue;
            }
            used[v] = true;
            labels.push(v);
            acc += walk(depth + 1, labels, used, t, p, edges);
            labels.pop();
            used[v] = false;
        }
        acc
    }

    // The first vertex's label fans out; partial sums are added in label order.
    let partial = exec.map_range(n, |first| {
        let mut used = vec![false; n];
        used[first] = true;
        let mut labels = vec![first];
        walk(1, &mut labels, &mut used, t, p, &edges)
    });
    let sum: f64 = partial.iter().sum();
    sum / (n as f64).powf(graph.k() as f64 / 2.0 + 1.0)
}

/// One row of a [`MomentBreakdown`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GraphContribution {
    pub g: String,
    pub t: usize,
    pub category: Category,
    pub contribution: f64,
}

/// `E (1/n) Tr (Y/sqrt n)^k = S1 + S3` (the category-2 sum vanishes).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MomentBreakdown {
    pub k: usize,
    pub s1: f64,
    pub s3: f64,
    pub total: f64,
    pub graphs: Vec<GraphContribution>,
}

/// Exact Gaussian trace moment by summing [`graph_contribution`] over all
/// canonical graphs.
pub fn gaussian_moment_exact(p: &VarianceProfile, k: usize) -> Result<MomentBreakdown> {
    ensure!(
        (1..=MAX_EXACT_K).contains(&k),
        Domain,
        "k must lie in 1..={MAX_EXACT_K}, got {k}"
    );
    ensure!(
        p.n() <= MAX_EXACT_N,
        Domain,
        "n must be at most {MAX_EXACT_N}, got {}",
        p.n()
    );
    let mut s1 = 0.0;
    let mut s3 = 0.0;
    let mut graphs = Vec::new();
    for graph in enumerate_canonical(k)? {
        let c = graph_contribution(&graph, p);
        match graph.category {
            Category::One => s1 += c,
            Category::Three => s3 += c,
            Category::Two => debug_assert_eq!(c, 0.0),
        }
        graphs.push(GraphContribution {
            g: graph.label(),
            t: graph.t,
            category: graph.category,
            contribution: c,
        });
    }
    Ok(MomentBreakdown {
        k,
        s1,
        s3,
        total: s1 + s3,
        graphs,
    })
}

/// Brute-force `n^-(k/2+1) sum_{i in [n]^k} E Y_{i1 i2} .. Y_{ik i1}` with
/// independent Gaussian entries, grouping factors by unordered index pair.
pub fn wick_moment_oracle(p: &VarianceProfile, k: usize) -> Result<f64> {
    let n = p.n();
    ensure!(k >= 1, Domain, "k must be positive");
    let walks = (n as u64).checked_pow(k as u32);
    ensure!(
        walks.is_some_and(|w| w <= MAX_ORACLE_WALKS),
        Domain,
        "n^k = {n}^{k} exceeds {MAX_ORACLE_WALKS}"
    );
    if k % 2 == 1 {
        return Ok(0.0);
    }
    let mut idx = vec![0usize; k];
    let mut pairs: Vec<((usize, usize), usize)> = Vec::with_capacity(k);
    let mut total = 0.0;
    'outer: loop {
        pairs.clear();
        for s in 0..k {
            let (a, b) = (idx[s], idx[(s + 1) % k]);
            let key = (a.min(b), a.max(b));
            match pairs.iter_mut().find(|(p, _)| *p == key) {
                Some((_, c)) => *c += 1,
                None => pairs.push((key, 1)),
            }
        }
        total += pairs
            .iter()
            .map(|&((a, b), m)| gaussian_moment(m, p.sigma2(a, b)))
            .product::<f64>();
        // odometer
        for pos in (0..k).rev() {
            idx[pos] += 1;
            if idx[pos] < n {
                continue 'outer;
            }
            idx[pos] = 0;
        }
        break;
    }
    Ok(total / (n as f64).powf(k as f64 / 2.0 + 1.0))
}
