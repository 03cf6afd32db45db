//! Weighted collaboration graphs, vertex sets, cut/induced weights and graph families.

use crate::error::{input, Error, Result};
use crate::scalar::{approximate_fraction, parse_ratio, ratio, Scalar};
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};
use std::collections::BTreeSet;

#[derive(Debug, Clone, PartialEq)]
pub struct Edge {
    pub u: usize,
    pub v: usize,
    pub w: BigRational,
}

/// Undirected graph with edge weights in (0, 1] and an implicit unit diagonal.
///
/// Immutable once built. Edges are stored with `u < v`, sorted.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightedGraph {
    n: usize,
    edges: Vec<Edge>,
    adj: Vec<Vec<(usize, usize)>>,
}

impl WeightedGraph {
    pub fn new(n: usize, edges: Vec<(usize, usize, BigRational)>) -> Result<Self> {
        if n == 0 {
            return input("graph must have at least one vertex");
        }
        let mut seen = BTreeSet::new();
        let mut list = Vec::with_capacity(edges.len());
        for (a, b, w) in edges {
            if a >= n || b >= n {
                return input(format!("edge ({a}, {b}) out of range for n = {n}"));
            }
            if a == b {
                return input(format!("self-loop at vertex {a}"));
            }
            if w <= BigRational::zero() || w > BigRational::one() {
                return input(format!("edge ({a}, {b}) weight {w} outside (0, 1]"));
            }
            let (u, v) = if a < b { (a, b) } else { (b, a) };
            if !seen.insert((u, v)) {
                return input(format!("duplicate edge ({u}, {v})"));
            }
            list.push(Edge { u, v, w });
        }
        list.sort_by_key(|e| (e.u, e.v));
        let mut adj = vec![Vec::new(); n];
        for (i, e) in list.iter().enumerate() {
            adj[e.u].push((e.v, i));
            adj[e.v].push((e.u, i));
        }
        for row in adj.iter_mut() {
            row.sort_unstable();
        }
        Ok(Self { n, edges: list, adj })
    }

    /// Builds a graph whose every edge has weight 1.
    pub fn unit(n: usize, edges: &[(usize, usize)]) -> Result<Self> {
        Self::new(n, edges.iter().map(|&(u, v)| (u, v, BigRational::one())).collect())
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    /// Neighbors of `v` as `(neighbor, edge index)` pairs, sorted by neighbor.
    pub fn neighbors(&self, v: usize) -> &[(usize, usize)] {
        &self.adj[v]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adj[v].len()
    }

    pub fn weight(&self, u: usize, v: usize) -> Option<&BigRational> {
        self.adj
            .get(u)?
            .binary_search_by_key(&v, |&(x, _)| x)
            .ok()
            .map(|i| &self.edges[self.adj[u][i].1].w)
    }

    pub fn edge_weights<T: Scalar>(&self) -> Vec<T> {
        self.edges.iter().map(|e| T::from_ratio(&e.w)).collect()
    }

    /// Total edge weight `m`.
    pub fn total_weight<T: Scalar>(&self) -> T {
        self.edges.iter().fold(T::zero(), |acc, e| acc + T::from_ratio(&e.w))
    }

    pub fn weighted_degree<T: Scalar>(&self, v: usize) -> T {
        self.adj[v]
            .iter()
            .fold(T::zero(), |acc, &(_, e)| acc + T::from_ratio(&self.edges[e].w))
    }

    pub fn min_weight(&self) -> Option<BigRational> {
        self.edges.iter().map(|e| e.w.clone()).min()
    }

    pub fn is_unit(&self) -> bool {
        self.edges.iter().all(|e| e.w.is_one())
    }

    /// Dense `W` with unit diagonal.
    pub fn dense<T: Scalar>(&self) -> Vec<Vec<T>> {
        let mut w = vec![vec![T::zero(); self.n]; self.n];
        for (v, row) in w.iter_mut().enumerate() {
            row[v] = T::one();
        }
        for e in &self.edges {
            let x = T::from_ratio(&e.w);
            w[e.u][e.v] = x.clone();
            w[e.v][e.u] = x;
        }
        w
    }

    /// `(Wθ)_v` for every vertex.
    pub fn apply<T: Scalar>(&self, theta: &[T]) -> Vec<T> {
        let mut out: Vec<T> = theta.to_vec();
        for e in &self.edges {
            let w = T::from_ratio(&e.w);
            out[e.u] = out[e.u].clone() + w.clone() * theta[e.v].clone();
            out[e.v] = out[e.v].clone() + w * theta[e.u].clone();
        }
        out
    }

    pub fn to_json(&self, exact: bool) -> GraphJson {
        let edges = self
            .edges
            .iter()
            .map(|e| {
                let w = if exact {
                    NumJson::Text(e.w.to_string())
                } else {
                    NumJson::Number(f64::from_ratio(&e.w))
                };
                (e.u, e.v, w)
            })
            .collect();
        GraphJson { n: self.n, edges }
    }

    pub fn from_json(doc: &GraphJson) -> Result<Self> {
        let mut edges = Vec::with_capacity(doc.edges.len());
        for (u, v, w) in &doc.edges {
            edges.push((*u, *v, w.to_ratio()?));
        }
        Self::new(doc.n, edges)
    }
}

/// Serialized graph: `{"n": 3, "edges": [[0, 1, "1/2"], [1, 2, 1.0]]}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GraphJson {
    pub n: usize,
    pub edges: Vec<(usize, usize, NumJson)>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum NumJson {
    Number(f64),
    Text(String),
}

impl NumJson {
    pub fn from_scalar<T: Scalar>(x: &T) -> Self {
        if T::EXACT {
            NumJson::Text(x.to_string())
        } else {
            NumJson::Number(x.to_f64())
        }
    }

    pub fn to_scalar<T: Scalar>(&self) -> Result<T> {
        match self {
            NumJson::Number(x) if !T::EXACT => Ok(T::from_f64(*x)),
            _ => Ok(T::from_ratio(&self.to_ratio()?)),
        }
    }

    pub fn to_ratio(&self) -> Result<BigRational> {
        match self {
            NumJson::Number(x) => {
                let snapped = approximate_fraction(*x, 1_000_000);
                if (f64::from_ratio(&snapped) - x).abs() <= 1e-12 {
                    Ok(snapped)
                } else {
                    BigRational::from_float(*x).ok_or_else(|| Error::Input(format!("bad weight {x}")))
                }
            }
            NumJson::Text(s) => parse_ratio(s).ok_or_else(|| Error::Input(format!("bad weight {s:?}"))),
        }
    }
}

/// Membership vector over the vertices `0..n`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct VertexSet {
    members: Vec<bool>,
}

impl VertexSet {
    pub fn empty(n: usize) -> Self {
        Self { members: vec![false; n] }
    }

    pub fn full(n: usize) -> Self {
        Self { members: vec![true; n] }
    }

    pub fn from_ids(n: usize, ids: impl IntoIterator<Item = usize>) -> Result<Self> {
        let mut s = Self::empty(n);
        for v in ids {
            if v >= n {
                return input(format!("vertex {v} out of range for n = {n}"));
            }
            s.members[v] = true;
        }
        Ok(s)
    }

    pub fn from_mask(members: Vec<bool>) -> Self {
        Self { members }
    }

    pub fn n(&self) -> usize {
        self.members.len()
    }

    pub fn contains(&self, v: usize) -> bool {
        self.members.get(v).copied().unwrap_or(false)
    }

    pub fn insert(&mut self, v: usize) {
        self.members[v] = true;
    }

    pub fn remove(&mut self, v: usize) {
        self.members[v] = false;
    }

    pub fn len(&self) -> usize {
        self.members.iter().filter(|&&b| b).count()
    }

    pub fn is_empty(&self) -> bool {
        !self.members.iter().any(|&b| b)
    }

    pub fn ids(&self) -> Vec<usize> {
        (0..self.members.len()).filter(|&v| self.members[v]).collect()
    }

    pub fn mask(&self) -> &[bool] {
        &self.members
    }

    pub fn complement(&self) -> Self {
        Self { members: self.members.iter().map(|b| !b).collect() }
    }

    pub fn union(&self, other: &Self) -> Self {
        Self { members: self.members.iter().zip(&other.members).map(|(a, b)| *a || *b).collect() }
    }
}

fn check_set(g: &WeightedGraph, s: &VertexSet) -> Result<()> {
    if s.n() != g.n() {
        return input(format!("vertex set over {} vertices used with graph of {}", s.n(), g.n()));
    }
    Ok(())
}

/// `|S| + 2·Σ_{u,v ∈ S} W_uv`.
pub fn induced_weight<T: Scalar>(g: &WeightedGraph, s: &VertexSet) -> Result<T> {
    check_set(g, s)?;
    let two = T::from_i64(2);
    let internal = g
        .edges()
        .iter()
        .filter(|e| s.contains(e.u) && s.contains(e.v))
        .fold(T::zero(), |acc, e| acc + T::from_ratio(&e.w));
    Ok(T::from_usize(s.len()) + two * internal)
}

/// Total weight of edges with exactly one endpoint in `S`.
pub fn cut_weight<T: Scalar>(g: &WeightedGraph, s: &VertexSet) -> Result<T> {
    check_set(g, s)?;
    Ok(g.edges()
        .iter()
        .filter(|e| s.contains(e.u) != s.contains(e.v))
        .fold(T::zero(), |acc, e| acc + T::from_ratio(&e.w)))
}

/// Whether every vertex outside `s` has a neighbor in `s`.
pub fn is_dominating(g: &WeightedGraph, s: &VertexSet) -> bool {
    (0..g.n()).all(|v| s.contains(v) || g.neighbors(v).iter().any(|&(u, _)| s.contains(u)))
}

/// Whether no edge has both endpoints in `s`.
pub fn is_independent(g: &WeightedGraph, s: &VertexSet) -> bool {
    g.edges().iter().all(|e| !(s.contains(e.u) && s.contains(e.v)))
}

/// Two centers `x0 = 0`, `y0 = 1` joined by a unit edge; leaves of `x0` are `2..k+2`, of `y0` are `k+2..2k+2`.
pub fn gen_double_star(k: usize) -> Result<WeightedGraph> {
    if k == 0 {
        return input("double star needs k >= 1");
    }
    let mut edges = vec![(0, 1)];
    for i in 0..k {
        edges.push((0, 2 + i));
        edges.push((1, 2 + k + i));
    }
    WeightedGraph::unit(2 * k + 2, &edges)
}

/// `k` stars whose centers (`0..k`) form a clique; star `i` owns leaves `k + i·l .. k + (i+1)·l`
/// with `l = ⌊n/k⌋ − 1`.
pub fn gen_k_star_clique(k: usize, n: usize) -> Result<WeightedGraph> {
    if k < 2 {
        return input("k-star clique needs k >= 2");
    }
    if n < 2 * k {
        return input(format!("k-star clique needs n >= 2k, got n = {n}, k = {k}"));
    }
    let l = n / k - 1;
    let mut edges = Vec::new();
    for a in 0..k {
        for b in a + 1..k {
            edges.push((a, b));
        }
    }
    for i in 0..k {
        for j in 0..l {
            edges.push((i, k + i * l + j));
        }
    }
    WeightedGraph::unit(k + k * l, &edges)
}

/// Centers `0, 1` adjacent to each other and to everything; triangle `t` is `2+3t .. 2+3t+3`.
/// Every edge has weight 1/2.
pub fn gen_triangle_centers(k: usize) -> Result<WeightedGraph> {
    if k == 0 {
        return input("triangle centers needs k >= 1");
    }
    centers_with_cliques(k, 3, ratio(1, 2), ratio(1, 2), ratio(1, 2))
}

/// Centers `0, 1` plus `k²` disjoint `k`-cliques (clique `c` is `2+c·k .. 2+(c+1)·k`); all weights 1/2.
pub fn gen_clique_leaves(k: usize) -> Result<WeightedGraph> {
    if k < 2 {
        return input("clique leaves needs k >= 2");
    }
    centers_with_cliques(k * k, k, ratio(1, 2), ratio(1, 2), ratio(1, 2))
}

/// Centers joined by a unit edge, each adjacent to every leaf with weight 1/2, and the
/// `n − 2` leaves forming one clique of weight `n^{-3/4}` (snapped to a fraction).
pub fn gen_centers_light_clique(n: usize) -> Result<WeightedGraph> {
    if n < 3 {
        return input("light clique instance needs n >= 3");
    }
    let w = approximate_fraction((n as f64).powf(-0.75), 1_000_000);
    centers_with_cliques(1, n - 2, BigRational::one(), ratio(1, 2), w)
}

fn centers_with_cliques(
    cliques: usize,
    size: usize,
    center_edge: BigRational,
    spoke: BigRational,
    inner: BigRational,
) -> Result<WeightedGraph> {
    let n = 2 + cliques * size;
    let mut edges = vec![(0, 1, center_edge)];
    for v in 2..n {
        edges.push((0, v, spoke.clone()));
        edges.push((1, v, spoke.clone()));
    }
    for c in 0..cliques {
        let base = 2 + c * size;
        for a in 0..size {
            for b in a + 1..size {
                edges.push((base + a, base + b, inner.clone()));
            }
        }
    }
    WeightedGraph::new(n, edges)
}

/// A connected piece of a disjoint-union graph.
#[derive(Debug, Clone, PartialEq)]
pub enum Component {
    /// Unit-weight path on the given number of vertices.
    Path(usize),
    Edge(BigRational),
    Triangle(BigRational, BigRational, BigRational),
    Clique(usize, BigRational),
    /// Unit-weight star with the given number of leaves; center first.
    Star(usize),
    Isolated,
}

impl Component {
    fn size(&self) -> usize {
        match self {
            Component::Path(k) => *k,
            Component::Edge(_) => 2,
            Component::Triangle(..) => 3,
            Component::Clique(k, _) => *k,
            Component::Star(l) => l + 1,
            Component::Isolated => 1,
        }
    }

    fn edges(&self) -> Vec<(usize, usize, BigRational)> {
        let one = BigRational::one;
        match self {
            Component::Path(k) => (1..*k).map(|i| (i - 1, i, one())).collect(),
            Component::Edge(w) => vec![(0, 1, w.clone())],
            Component::Triangle(a, b, c) => vec![(0, 1, a.clone()), (1, 2, b.clone()), (0, 2, c.clone())],
            Component::Clique(k, w) => {
                let mut out = Vec::new();
                for a in 0..*k {
                    for b in a + 1..*k {
                        out.push((a, b, w.clone()));
                    }
                }
                out
            }
            Component::Star(l) => (1..=*l).map(|i| (0, i, one())).collect(),
            Component::Isolated => Vec::new(),
        }
    }

    /// Parses `path3`, `edge(1/2)`, `triangle(1/2,3/4,3/4)`, `clique4(1/2)`, `star5`, `isolated`.
    pub fn parse(text: &str) -> Result<Self> {
        let t = text.trim().to_ascii_lowercase();
        let (head, args) = match t.split_once('(') {
            Some((h, rest)) => {
                let inner = rest
                    .strip_suffix(')')
                    .ok_or_else(|| Error::Input(format!("unbalanced parentheses in {text:?}")))?;
                let parsed: Option<Vec<BigRational>> = inner.split(',').map(parse_ratio).collect();
                (h.to_string(), parsed.ok_or_else(|| Error::Input(format!("bad weights in {text:?}")))?)
            }
            None => (t.clone(), Vec::new()),
        };
        let count = |prefix: &str| -> Result<usize> {
            head[prefix.len()..]
                .parse()
                .map_err(|_| Error::Input(format!("bad size in {text:?}")))
        };
        let c = match (head.as_str(), args.len()) {
            ("edge", 1) => Component::Edge(args[0].clone()),
            ("edge", 0) => Component::Edge(BigRational::one()),
            ("triangle", 3) => Component::Triangle(args[0].clone(), args[1].clone(), args[2].clone()),
            ("triangle", 0) => Component::Triangle(BigRational::one(), BigRational::one(), BigRational::one()),
            ("isolated", 0) => Component::Isolated,
            (h, 0) if h.starts_with("path") => Component::Path(count("path")?),
            (h, 0) if h.starts_with("star") => Component::Star(count("star")?),
            (h, 1) if h.starts_with("clique") => Component::Clique(count("clique")?, args[0].clone()),
            _ => return input(format!("unknown component {text:?}")),
        };
        if c.size() == 0 {
            return input(format!("component {text:?} has no vertices"));
        }
        Ok(c)
    }
}

/// Disjoint union of components, laid out in list order.
pub fn gen_component_mix(parts: &[Component]) -> Result<WeightedGraph> {
    if parts.is_empty() {
        return input("component list is empty");
    }
    let mut offset = 0;
    let mut edges = Vec::new();
    for c in parts {
        if c.size() == 0 {
            return input("component with no vertices");
        }
        edges.extend(c.edges().into_iter().map(|(u, v, w)| (u + offset, v + offset, w)));
        offset += c.size();
    }
    WeightedGraph::new(offset, edges)
}

/// `copies` disjoint copies of `g`, copy `i` occupying ids `i·n .. (i+1)·n`.
pub fn disjoint_copies(g: &WeightedGraph, copies: usize) -> Result<WeightedGraph> {
    if copies == 0 {
        return input("need at least one copy");
    }
    let n = g.n();
    let mut edges = Vec::new();
    for i in 0..copies {
        edges.extend(g.edges().iter().map(|e| (e.u + i * n, e.v + i * n, e.w.clone())));
    }
    WeightedGraph::new(n * copies, edges)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_components() {
        assert_eq!(Component::parse("path3").unwrap(), Component::Path(3));
        assert_eq!(Component::parse("edge(1/2)").unwrap(), Component::Edge(ratio(1, 2)));
        assert_eq!(
            Component::parse("triangle(1/2, 0.75, 3/4)").unwrap(),
            Component::Triangle(ratio(1, 2), ratio(3, 4), ratio(3, 4))
        );
        assert!(Component::parse("path0").is_err());
        assert!(Component::parse("hexagon").is_err());
    }

    #[test]
    fn rejects_bad_edges() {
        assert!(WeightedGraph::unit(2, &[(0, 0)]).is_err());
        assert!(WeightedGraph::unit(2, &[(0, 2)]).is_err());
        assert!(WeightedGraph::unit(2, &[(0, 1), (1, 0)]).is_err());
        assert!(WeightedGraph::new(2, vec![(0, 1, ratio(3, 2))]).is_err());
        assert!(WeightedGraph::new(2, vec![(0, 1, ratio(0, 1))]).is_err());
    }

    #[test]
    fn json_round_trip() {
        let g = gen_triangle_centers(2).unwrap();
        for exact in [true, false] {
            let text = serde_json::to_string(&g.to_json(exact)).unwrap();
            let back: GraphJson = serde_json::from_str(&text).unwrap();
            assert_eq!(WeightedGraph::from_json(&back).unwrap(), g);
        }
    }
}
