//! Weighted undirected communication topology and its Laplacian.
//!
//! Agents are numbered `1..=n` at every public boundary (constructors, file
//! formats, error messages) and `0..n` internally.

use std::collections::VecDeque;

use nalgebra::DMatrix;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GraphError {
    #[error("a topology needs at least 2 agents, got {0}")]
    TooFewAgents(usize),
    #[error("self-loop at agent {0}")]
    SelfLoop(usize),
    #[error("edge ({i}, {j}) has non-positive weight {weight}")]
    NonpositiveWeight { i: usize, j: usize, weight: f64 },
    #[error("edge ({i}, {j}) listed more than once")]
    DuplicateEdge { i: usize, j: usize },
    #[error("agent index {index} outside 1..={n}")]
    IndexOutOfRange { index: usize, n: usize },
    #[error("graph is disconnected")]
    Disconnected,
}

/// One undirected edge, stored once with `a < b` (0-based).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Edge {
    pub a: usize,
    pub b: usize,
    pub weight: f64,
}

/// Fixed undirected graph with strictly positive symmetric weights.
#[derive(Debug, Clone, PartialEq)]
pub struct Topology {
    n: usize,
    edges: Vec<Edge>,
    /// Sorted `(neighbor, weight)` lists, 0-based.
    neighbors: Vec<Vec<(usize, f64)>>,
}

impl Topology {
    /// Builds a topology from 1-based `(i, j, weight)` triples.
    pub fn new(n: usize, weighted_edges: &[(usize, usize, f64)]) -> Result<Self, GraphError> {
        if n < 2 {
            return Err(GraphError::TooFewAgents(n));
        }
        let mut edges: Vec<Edge> = Vec::with_capacity(weighted_edges.len());
        for &(i, j, weight) in weighted_edges {
            for index in [i, j] {
                if index == 0 || index > n {
                    return Err(GraphError::IndexOutOfRange { index, n });
                }
            }
            if i == j {
                return Err(GraphError::SelfLoop(i));
            }
            if !(weight > 0.0) || !weight.is_finite() {
                return Err(GraphError::NonpositiveWeight { i, j, weight });
            }
            let (a, b) = if i < j { (i - 1, j - 1) } else { (j - 1, i - 1) };
            if edges.iter().any(|e| e.a == a && e.b == b) {
                return Err(GraphError::DuplicateEdge { i, j });
            }
            edges.push(Edge { a, b, weight });
        }
        let mut neighbors = vec![Vec::new(); n];
        for e in &edges {
            neighbors[e.a].push((e.b, e.weight));
            neighbors[e.b].push((e.a, e.weight));
        }
        for list in &mut neighbors {
            list.sort_by_key(|&(j, _)| j);
        }
        Ok(Self { n, edges, neighbors })
    }

    /// Unit-weight topology from 1-based pairs.
    pub fn unweighted(n: usize, pairs: &[(usize, usize)]) -> Result<Self, GraphError> {
        let triples: Vec<_> = pairs.iter().map(|&(i, j)| (i, j, 1.0)).collect();
        Self::new(n, &triples)
    }

    /// The four-agent graph used by the built-in scenarios:
    /// edges 1–2, 2–3, 2–4, 1–4 with unit weights.
    pub fn four_agent_reference() -> Self {
        Self::unweighted(4, &[(1, 2), (2, 3), (2, 4), (1, 4)]).expect("static topology is valid")
    }

    pub fn complete(n: usize) -> Result<Self, GraphError> {
        let mut pairs = Vec::new();
        for i in 1..=n {
            for j in (i + 1)..=n {
                pairs.push((i, j));
            }
        }
        Self::unweighted(n, &pairs)
    }

    pub fn path(n: usize) -> Result<Self, GraphError> {
        let pairs: Vec<_> = (1..n).map(|i| (i, i + 1)).collect();
        Self::unweighted(n, &pairs)
    }

    pub fn agent_count(&self) -> usize {
        self.n
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    /// 1-based `(i, j, weight)` triples in insertion order.
    pub fn weighted_edges(&self) -> Vec<(usize, usize, f64)> {
        self.edges.iter().map(|e| (e.a + 1, e.b + 1, e.weight)).collect()
    }

    /// Neighbors of 0-based agent `i` as `(j, p_ij)`, sorted by `j`.
    pub fn neighbors(&self, i: usize) -> &[(usize, f64)] {
        &self.neighbors[i]
    }

    /// Weight `p_ij`, zero when `i` and `j` are not adjacent (0-based).
    pub fn weight(&self, i: usize, j: usize) -> f64 {
        self.neighbors[i]
            .iter()
            .find(|&&(k, _)| k == j)
            .map_or(0.0, |&(_, w)| w)
    }

    pub fn is_edge(&self, i: usize, j: usize) -> bool {
        self.neighbors[i].iter().any(|&(k, _)| k == j)
    }

    /// Weighted degree `p_i` of 0-based agent `i`.
    pub fn degree(&self, i: usize) -> f64 {
        self.neighbors[i].iter().map(|&(_, w)| w).sum()
    }

    /// All ordered observer/observed pairs `(i, j)` with `j` a neighbor of `i`,
    /// 0-based, in lexicographic order.
    pub fn directed_pairs(&self) -> Vec<(usize, usize)> {
        (0..self.n)
            .flat_map(|i| self.neighbors[i].iter().map(move |&(j, _)| (i, j)))
            .collect()
    }

    pub fn laplacian(&self) -> LaplacianView {
        let n = self.n;
        let mut adjacency = DMatrix::zeros(n, n);
        for e in &self.edges {
            adjacency[(e.a, e.b)] = e.weight;
            adjacency[(e.b, e.a)] = e.weight;
        }
        let degree = DMatrix::from_diagonal(&nalgebra::DVector::from_iterator(
            n,
            (0..n).map(|i| self.degree(i)),
        ));
        let laplacian = &degree - &adjacency;
        LaplacianView {
            adjacency,
            degree,
            laplacian,
        }
    }

    /// Hop counts from 0-based `source`; `None` for unreachable agents.
    pub fn hop_distances(&self, source: usize) -> Vec<Option<usize>> {
        let mut dist = vec![None; self.n];
        dist[source] = Some(0);
        let mut queue = VecDeque::from([source]);
        while let Some(v) = queue.pop_front() {
            let d = dist[v].unwrap_or(0);
            for &(w, _) in &self.neighbors[v] {
                if dist[w].is_none() {
                    dist[w] = Some(d + 1);
                    queue.push_back(w);
                }
            }
        }
        dist
    }

    pub fn is_connected(&self) -> bool {
        self.hop_distances(0).iter().all(Option::is_some)
    }

    /// Largest shortest-path hop count over all agent pairs. Weights are ignored.
    pub fn diameter(&self) -> Result<usize, GraphError> {
        let mut best = 0;
        for source in 0..self.n {
            for d in self.hop_distances(source) {
                best = best.max(d.ok_or(GraphError::Disconnected)?);
            }
        }
        Ok(best)
    }
}

/// Adjacency `P`, degree `D` and Laplacian `L = D - P` of a topology.
#[derive(Debug, Clone, PartialEq)]
pub struct LaplacianView {
    pub adjacency: DMatrix<f64>,
    pub degree: DMatrix<f64>,
    pub laplacian: DMatrix<f64>,
}

impl LaplacianView {
    pub fn dim(&self) -> usize {
        self.laplacian.nrows()
    }

    /// `L * x`.
    pub fn apply(&self, x: &[f64]) -> Vec<f64> {
        let n = self.dim();
        (0..n)
            .map(|i| (0..n).map(|j| self.laplacian[(i, j)] * x[j]).sum())
            .collect()
    }

    /// `yᵀ L y`.
    pub fn quadratic_form(&self, y: &[f64]) -> f64 {
        self.apply(y).iter().zip(y).map(|(a, b)| a * b).sum()
    }

    /// `½ Σ_{i,j} p_ij (y_i - y_j)²`, the edge-sum form of the quadratic form.
    pub fn disagreement(&self, y: &[f64]) -> f64 {
        let n = self.dim();
        let mut total = 0.0;
        for i in 0..n {
            for j in 0..n {
                let d = y[i] - y[j];
                total += self.adjacency[(i, j)] * d * d;
            }
        }
        0.5 * total
    }

    /// Eigenvalues of the symmetric Laplacian in ascending order.
    pub fn spectrum(&self) -> Vec<f64> {
        let mut ev: Vec<f64> = self
            .laplacian
            .clone()
            .symmetric_eigen()
            .eigenvalues
            .iter()
            .copied()
            .collect();
        ev.sort_by(f64::total_cmp);
        ev
    }

    /// Second-smallest eigenvalue (algebraic connectivity).
    pub fn algebraic_connectivity(&self) -> f64 {
        self.spectrum()[1]
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn reference_graph_degrees_and_laplacian() {
        let t = Topology::four_agent_reference();
        let degrees: Vec<f64> = (0..4).map(|i| t.degree(i)).collect();
        assert_eq!(degrees, vec![2.0, 3.0, 1.0, 2.0]);
        let l = t.laplacian().laplacian;
        let expected = [
            [2.0, -1.0, 0.0, -1.0],
            [-1.0, 3.0, -1.0, -1.0],
            [0.0, -1.0, 1.0, 0.0],
            [-1.0, -1.0, 0.0, 2.0],
        ];
        for i in 0..4 {
            for j in 0..4 {
                assert_eq!(l[(i, j)], expected[i][j]);
            }
        }
    }

    #[test]
    fn single_edge() {
        let t = Topology::new(2, &[(1, 2, 2.5)]).unwrap();
        assert_eq!(t.degree(0), 2.5);
        assert_eq!(t.degree(1), 2.5);
        let l = t.laplacian().laplacian;
        assert_eq!(l[(0, 0)], 2.5);
        assert_eq!(l[(0, 1)], -2.5);
        assert_eq!(l[(1, 0)], -2.5);
        assert_eq!(l[(1, 1)], 2.5);
        assert!(t.is_connected());
        assert_eq!(t.diameter().unwrap(), 1);
    }

    #[test]
    fn construction_errors() {
        assert_eq!(
            Topology::new(3, &[(1, 1, 1.0)]),
            Err(GraphError::SelfLoop(1))
        );
        assert!(matches!(
            Topology::new(3, &[(1, 2, 0.0)]),
            Err(GraphError::NonpositiveWeight { .. })
        ));
        assert!(matches!(
            Topology::new(3, &[(1, 2, -1.0)]),
            Err(GraphError::NonpositiveWeight { .. })
        ));
        assert_eq!(
            Topology::new(3, &[(1, 2, 1.0), (2, 1, 1.0)]),
            Err(GraphError::DuplicateEdge { i: 2, j: 1 })
        );
        assert_eq!(
            Topology::new(3, &[(1, 4, 1.0)]),
            Err(GraphError::IndexOutOfRange { index: 4, n: 3 })
        );
        assert_eq!(
            Topology::new(3, &[(0, 2, 1.0)]),
            Err(GraphError::IndexOutOfRange { index: 0, n: 3 })
        );
        assert_eq!(Topology::new(1, &[]), Err(GraphError::TooFewAgents(1)));
    }

    #[test]
    fn quadratic_form_on_unit_vector() {
        let lv = Topology::four_agent_reference().laplacian();
        let y = [1.0, 0.0, 0.0, 0.0];
        assert_eq!(lv.quadratic_form(&y), 2.0);
        assert_eq!(lv.disagreement(&y), 2.0);
    }

    #[test]
    fn diameters() {
        assert_eq!(Topology::four_agent_reference().diameter().unwrap(), 2);
        assert_eq!(Topology::complete(3).unwrap().diameter().unwrap(), 1);
        assert_eq!(Topology::path(3).unwrap().diameter().unwrap(), 2);
        let t = Topology::unweighted(4, &[(1, 2)]).unwrap();
        assert!(!t.is_connected());
        assert_eq!(t.diameter(), Err(GraphError::Disconnected));
    }

    #[test]
    fn directed_pairs_cover_both_directions() {
        let t = Topology::four_agent_reference();
        let pairs = t.directed_pairs();
        assert_eq!(pairs.len(), 8);
        for &(i, j) in &pairs {
            assert!(pairs.contains(&(j, i)));
        }
    }

    fn arb_connected() -> impl Strategy<Value = Topology> {
        (2usize..8).prop_flat_map(|n| {
            let tree = proptest::collection::vec((0usize..1000, 0.1f64..5.0), n - 1);
            let extra = proptest::collection::vec((0..n, 0..n, 0.1f64..5.0), 0..n * 2);
            (Just(n), tree, extra).prop_map(|(n, tree, extra)| {
                let mut triples = Vec::new();
                for (k, (parent, w)) in tree.into_iter().enumerate() {
                    let child = k + 2;
                    triples.push((parent % (child - 1) + 1, child, w));
                }
                for (a, b, w) in extra {
                    let (i, j) = (a.min(b) + 1, a.max(b) + 1);
                    if i != j && !triples.iter().any(|&(x, y, _)| (x.min(y), x.max(y)) == (i, j)) {
                        triples.push((i, j, w));
                    }
                }
                Topology::new(n, &triples).unwrap()
            })
        })
    }

    proptest! {
        #[test]
        fn quadratic_form_matches_edge_sum(
            t in arb_connected(),
            seed in proptest::collection::vec(-10.0f64..10.0, 8),
        ) {
            let lv = t.laplacian();
            let y = &seed[..t.agent_count()];
            let lhs = lv.quadratic_form(y);
            let rhs = lv.disagreement(y);
            prop_assert!((lhs - rhs).abs() <= 1e-10 * (1.0 + rhs.abs()));
        }

        #[test]
        fn laplacian_rows_sum_to_zero(t in arb_connected()) {
            let ones = vec![1.0; t.agent_count()];
            for r in t.laplacian().apply(&ones) {
                prop_assert!(r.abs() <= 1e-12);
            }
        }

        #[test]
        fn connected_graphs_have_positive_fiedler_value(t in arb_connected()) {
            let spectrum = t.laplacian().spectrum();
            prop_assert!(spectrum[0].abs() < 1e-9);
            prop_assert!(spectrum[1] > 1e-9);
        }

        #[test]
        fn diameter_is_within_bounds(t in arb_connected()) {
            let d = t.diameter().unwrap();
            prop_assert!(d >= 1 && d < t.agent_count());
        }
    }
}
