//! Undirected simple graphs with node features and sDNA subscriptions.

mod bits;
pub mod io;

use std::collections::{BTreeSet, VecDeque};

use ndarray::Array2;

pub use bits::BitMatrix;

use crate::error::{Error, Result};

/// Social network state: topology, node features and sDNA subscriptions.
///
/// The edge set and a packed dense adjacency view are kept in sync; both are
/// only changed through [`SocialGraph::add_edge`].
#[derive(Debug, Clone, PartialEq)]
pub struct SocialGraph {
    n: usize,
    edges: BTreeSet<(usize, usize)>,
    adjacency: BitMatrix,
    features: Array2<f64>,
    sdna_of: Vec<usize>,
    snapshot_index: usize,
}

impl SocialGraph {
    pub fn new(features: Array2<f64>, sdna_of: Vec<usize>) -> Result<Self> {
        let n = features.nrows();
        if sdna_of.len() != n {
            return Err(Error::invalid(format!(
                "{} sDNA assignments for {} feature rows",
                sdna_of.len(),
                n
            )));
        }
        Ok(SocialGraph {
            n,
            edges: BTreeSet::new(),
            adjacency: BitMatrix::new(n),
            features,
            sdna_of,
            snapshot_index: 0,
        })
    }

    /// Edgeless graph with no features, every node on sDNA 0.
    pub fn empty(n: usize) -> Self {
        SocialGraph::new(Array2::zeros((n, 0)), vec![0; n]).expect("consistent shapes")
    }

    pub fn from_edges(n: usize, edges: &[(usize, usize)]) -> Result<Self> {
        let mut g = SocialGraph::empty(n);
        for &(i, j) in edges {
            g.add_edge(i, j)?;
        }
        Ok(g)
    }

    pub fn node_count(&self) -> usize {
        self.n
    }

    pub fn feature_count(&self) -> usize {
        self.features.ncols()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    /// Edges as `(i, j)` with `i < j`, in lexicographic order.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.edges.iter().copied()
    }

    pub fn features(&self) -> &Array2<f64> {
        &self.features
    }

    pub fn sdna_of(&self) -> &[usize] {
        &self.sdna_of
    }

    pub fn snapshot_index(&self) -> usize {
        self.snapshot_index
    }

    pub fn set_snapshot_index(&mut self, index: usize) {
        self.snapshot_index = index;
    }

    pub fn adjacency(&self) -> &BitMatrix {
        &self.adjacency
    }

    pub fn has_edge(&self, i: usize, j: usize) -> bool {
        i < self.n && j < self.n && self.adjacency.get(i, j)
    }

    /// Inserts the undirected edge `{i, j}`. Returns `false` if it already existed.
    pub fn add_edge(&mut self, i: usize, j: usize) -> Result<bool> {
        self.check_node(i)?;
        self.check_node(j)?;
        if i == j {
            return Err(Error::invalid(format!("self-loop on node {i}")));
        }
        let key = (i.min(j), i.max(j));
        if !self.edges.insert(key) {
            return Ok(false);
        }
        self.adjacency.set(i, j, true);
        self.adjacency.set(j, i, true);
        Ok(true)
    }

    pub fn neighbors(&self, i: usize) -> impl Iterator<Item = usize> + '_ {
        self.adjacency.row_ones(i)
    }

    pub fn degree(&self, i: usize) -> Result<usize> {
        self.check_node(i)?;
        Ok(self.adjacency.row_count(i))
    }

    pub fn degrees(&self) -> Vec<usize> {
        (0..self.n).map(|i| self.adjacency.row_count(i)).collect()
    }

    /// Dense 0/1 adjacency matrix.
    pub fn adjacency_matrix(&self) -> Array2<f64> {
        let mut a = Array2::zeros((self.n, self.n));
        for &(i, j) in &self.edges {
            a[[i, j]] = 1.0;
            a[[j, i]] = 1.0;
        }
        a
    }

    /// Whether a walk of exactly `length` steps joins `i` and `j`.
    pub fn path_exists(&self, i: usize, j: usize, length: usize) -> Result<bool> {
        self.check_node(i)?;
        self.check_node(j)?;
        if length < 2 {
            return Err(Error::invalid(format!("walk length {length} < 2")));
        }
        if i == j {
            return Err(Error::invalid("path_exists needs distinct endpoints"));
        }
        let walks = WalkIndicators::new(&self.adjacency, length);
        Ok(walks.exists(i, j, length))
    }

    /// All-pairs hop distances by breadth-first search from every node.
    pub fn shortest_path_matrix(&self) -> HopMatrix {
        let n = self.n;
        let mut data = vec![HopMatrix::UNREACHABLE; n * n];
        let mut queue = VecDeque::with_capacity(n);
        for src in 0..n {
            let row = &mut data[src * n..(src + 1) * n];
            row[src] = 0;
            queue.clear();
            queue.push_back(src);
            while let Some(u) = queue.pop_front() {
                let next = row[u] + 1;
                for v in self.adjacency.row_ones(u) {
                    if row[v] == HopMatrix::UNREACHABLE {
                        row[v] = next;
                        queue.push_back(v);
                    }
                }
            }
        }
        HopMatrix { n, data }
    }

    /// Every node pair not joined by an edge, lexicographically ordered.
    pub fn unconnected_pairs(&self) -> PairUniverse {
        let n = self.n;
        let mut pairs = Vec::with_capacity((n * n.saturating_sub(1) / 2).saturating_sub(self.edges.len()));
        for i in 0..n {
            for j in i + 1..n {
                if !self.adjacency.get(i, j) {
                    pairs.push((i, j));
                }
            }
        }
        PairUniverse { pairs }
    }

    fn check_node(&self, i: usize) -> Result<()> {
        if i >= self.n {
            Err(Error::invalid(format!(
                "node {i} out of range for graph of {} nodes",
                self.n
            )))
        } else {
            Ok(())
        }
    }
}

/// Node pairs that are not yet connected, in lexicographic order.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct PairUniverse {
    pub pairs: Vec<(usize, usize)>,
}

impl PairUniverse {
    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }
}

/// Hop counts between every pair of nodes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HopMatrix {
    n: usize,
    data: Vec<u32>,
}

impl HopMatrix {
    pub const UNREACHABLE: u32 = u32::MAX;

    pub fn dim(&self) -> usize {
        self.n
    }

    /// `None` when `j` cannot be reached from `i`.
    pub fn get(&self, i: usize, j: usize) -> Option<u32> {
        match self.data[i * self.n + j] {
            Self::UNREACHABLE => None,
            d => Some(d),
        }
    }

    pub fn raw(&self, i: usize, j: usize) -> u32 {
        self.data[i * self.n + j]
    }
}

/// Boolean walk-existence matrices `[A^x]` for `x = 2..=max_length`.
#[derive(Debug, Clone)]
pub struct WalkIndicators {
    max_length: usize,
    powers: Vec<BitMatrix>,
}

impl WalkIndicators {
    pub fn new(adjacency: &BitMatrix, max_length: usize) -> Self {
        let mut powers = Vec::with_capacity(max_length.saturating_sub(1));
        if max_length >= 2 {
            let mut current = adjacency.bool_mul(adjacency);
            for _ in 3..=max_length {
                let next = adjacency.bool_mul(&current);
                powers.push(current);
                current = next;
            }
            powers.push(current);
        }
        WalkIndicators { max_length, powers }
    }

    pub fn max_length(&self) -> usize {
        self.max_length
    }

    #[inline]
    pub fn exists(&self, i: usize, j: usize, length: usize) -> bool {
        debug_assert!((2..=self.max_length).contains(&length));
        self.powers[length - 2].get(i, j)
    }
}
