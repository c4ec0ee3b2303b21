//! Hypergraph model, validation and dependency analysis.
//!
//! The hypergraph `H = (V, E)` encodes which column sets of an array must be
//! covered. Everything the bound calculators consume comes from here: the
//! rank `t`, the dependency degree `d` (the largest number of edges meeting a
//! single edge) and the class-to-class dependency counts for the classed
//! local-lemma solvers.

use std::collections::HashMap;
use std::fmt;
use std::path::Path;

use thiserror::Error;

use crate::parallel;

#[derive(Debug, Error)]
pub enum HypergraphError {
    #[error("edge {edge_index}: vertex {vertex} out of range (k = {k})")]
    VertexOutOfRange {
        edge_index: usize,
        vertex: usize,
        k: usize,
    },
    #[error("edge {edge_index} is empty")]
    EmptyEdge { edge_index: usize },
    #[error("edge {edge_index}: vertex {vertex} repeated within the edge")]
    RepeatedVertex { edge_index: usize, vertex: usize },
    #[error("edges {first} and {second} are duplicates")]
    DuplicateEdge { first: usize, second: usize },
    #[error("edge index {index} out of range ({len} edges)")]
    EdgeIndexOutOfRange { index: usize, len: usize },
    #[error("hypergraph has no edges")]
    NoEdges,
    #[error("partition does not match hypergraph: {0}")]
    PartitionMismatch(String),
    #[error("{path}:{line}: {msg}")]
    Parse {
        path: String,
        line: usize,
        msg: String,
    },
    #[error("io error on {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
}

impl HypergraphError {
    fn parse(path: &Path, line: usize, msg: impl Into<String>) -> Self {
        HypergraphError::Parse {
            path: path.display().to_string(),
            line,
            msg: msg.into(),
        }
    }
}

/// A hypergraph on vertices `0..k` with an ordered list of edges.
///
/// Edges are kept as sorted vertex lists, so set equality is list equality
/// and the file representation is canonical.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Hypergraph {
    k: usize,
    edges: Vec<Vec<usize>>,
}

impl Hypergraph {
    /// Builds a hypergraph, canonicalizing each edge (sorted vertex order)
    /// and checking all invariants.
    pub fn new(k: usize, edges: Vec<Vec<usize>>) -> Result<Self, HypergraphError> {
        let mut canonical: Vec<Vec<usize>> = Vec::with_capacity(edges.len());
        for mut edge in edges {
            edge.sort_unstable();
            canonical.push(edge);
        }
        let h = Hypergraph { k, edges: canonical };
        h.validate()?;
        Ok(h)
    }

    /// Checks every invariant, reporting the first violation:
    /// in-range vertices, nonempty edges, vertices distinct within an edge,
    /// no duplicate edges (set equality).
    pub fn validate(&self) -> Result<(), HypergraphError> {
        let mut seen: HashMap<&[usize], usize> = HashMap::with_capacity(self.edges.len());
        for (idx, edge) in self.edges.iter().enumerate() {
            if edge.is_empty() {
                return Err(HypergraphError::EmptyEdge { edge_index: idx });
            }
            for window in edge.windows(2) {
                if window[0] == window[1] {
                    return Err(HypergraphError::RepeatedVertex {
                        edge_index: idx,
                        vertex: window[0],
                    });
                }
            }
            if let Some(&last) = edge.last() {
                if last >= self.k {
                    return Err(HypergraphError::VertexOutOfRange {
                        edge_index: idx,
                        vertex: last,
                        k: self.k,
                    });
                }
            }
            if let Some(&first) = seen.get(edge.as_slice()) {
                return Err(HypergraphError::DuplicateEdge {
                    first,
                    second: idx,
                });
            }
            seen.insert(edge.as_slice(), idx);
        }
        Ok(())
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn edges(&self) -> &[Vec<usize>] {
        &self.edges
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn edge(&self, index: usize) -> Result<&[usize], HypergraphError> {
        self.edges
            .get(index)
            .map(Vec::as_slice)
            .ok_or(HypergraphError::EdgeIndexOutOfRange {
                index,
                len: self.edges.len(),
            })
    }

    /// Largest edge cardinality `t = rank(H)`.
    pub fn rank(&self) -> Result<usize, HypergraphError> {
        self.edges
            .iter()
            .map(Vec::len)
            .max()
            .ok_or(HypergraphError::NoEdges)
    }

    /// Vertex-to-edge incidence lists.
    pub fn incidence(&self) -> Vec<Vec<usize>> {
        let mut inc = vec![Vec::new(); self.k];
        for (idx, edge) in self.edges.iter().enumerate() {
            for &v in edge {
                inc[v].push(idx);
            }
        }
        inc
    }

    /// Indices of all edges sharing at least one vertex with `edge_index`
    /// (excluding the edge itself), in increasing order.
    pub fn intersecting_edges(&self, edge_index: usize) -> Result<Vec<usize>, HypergraphError> {
        self.edge(edge_index)?;
        let inc = self.incidence();
        Ok(self.neighbors_via(&inc, edge_index))
    }

    fn neighbors_via(&self, incidence: &[Vec<usize>], edge_index: usize) -> Vec<usize> {
        let mut neighbors: Vec<usize> = self.edges[edge_index]
            .iter()
            .flat_map(|&v| incidence[v].iter().copied())
            .filter(|&j| j != edge_index)
            .collect();
        neighbors.sort_unstable();
        neighbors.dedup();
        neighbors
    }

    /// Dependency degree `d`: the maximum, over edges, of the number of other
    /// edges intersecting that edge.
    pub fn dependency_degree(&self) -> Result<usize, HypergraphError> {
        if self.edges.is_empty() {
            return Err(HypergraphError::NoEdges);
        }
        let inc = self.incidence();
        let per_edge = parallel::map_indexed(self.edges.len(), |i| self.neighbors_via(&inc, i).len());
        Ok(per_edge.into_iter().max().unwrap_or(0))
    }

    /// Per-class dependency counts: entry `[i][j]` is the maximum, over edges
    /// in class `i`, of the number of class-`j` edges intersecting that edge.
    /// Taking the maximum keeps the matrix sound for local-lemma use on every
    /// edge of the class, uniform neighbor counts or not.
    pub fn classify_edges(
        &self,
        classes: &EdgeClassPartition,
    ) -> Result<DependencyMatrix, HypergraphError> {
        classes.check_against(self)?;
        let c = classes.class_count();
        let inc = self.incidence();
        let per_edge: Vec<Vec<usize>> = parallel::map_indexed(self.edges.len(), |i| {
            let mut row = vec![0usize; c];
            for j in self.neighbors_via(&inc, i) {
                row[classes.class_of(j)] += 1;
            }
            row
        });
        let mut counts = vec![vec![0usize; c]; c];
        for (i, row) in per_edge.iter().enumerate() {
            let ci = classes.class_of(i);
            for (j, &n) in row.iter().enumerate() {
                counts[ci][j] = counts[ci][j].max(n);
            }
        }
        Ok(DependencyMatrix { counts })
    }

    /// Refines a partition until every class has a uniform per-class neighbor
    /// count signature. Starting from the rank partition this recovers, e.g.,
    /// the letter-letter / letter-digit / digit-triple classes of the
    /// 15-vertex example from its bare edge list. Class order follows first
    /// edge occurrence, so the result is deterministic.
    pub fn refine_partition(
        &self,
        initial: &EdgeClassPartition,
    ) -> Result<EdgeClassPartition, HypergraphError> {
        initial.check_against(self)?;
        let inc = self.incidence();
        let mut class_of: Vec<usize> = (0..self.edges.len())
            .map(|i| initial.class_of(i))
            .collect();
        loop {
            let count = class_of.iter().copied().max().map_or(0, |m| m + 1);
            let signatures: Vec<Vec<usize>> = parallel::map_indexed(self.edges.len(), |i| {
                let mut sig = vec![0usize; count];
                for j in self.neighbors_via(&inc, i) {
                    sig[class_of[j]] += 1;
                }
                sig
            });
            let mut next = vec![usize::MAX; self.edges.len()];
            let mut keys: HashMap<(usize, &[usize]), usize> = HashMap::new();
            let mut next_count = 0;
            for i in 0..self.edges.len() {
                let key = (class_of[i], signatures[i].as_slice());
                let class = *keys.entry(key).or_insert_with(|| {
                    let c = next_count;
                    next_count += 1;
                    c
                });
                next[i] = class;
            }
            if next_count == count {
                let class_rank = (0..next_count)
                    .map(|c| {
                        let i = next.iter().position(|&x| x == c).expect("nonempty class");
                        self.edges[i].len()
                    })
                    .collect();
                return Ok(EdgeClassPartition {
                    class_of: next,
                    class_rank,
                });
            }
            class_of = next;
        }
    }

    /// The single-class partition (one class holding every edge); only valid
    /// when every edge has the same cardinality.
    pub fn trivial_partition(&self) -> Result<EdgeClassPartition, HypergraphError> {
        let t = self.rank()?;
        let partition = EdgeClassPartition {
            class_of: vec![0; self.edges.len()],
            class_rank: vec![t],
        };
        partition.check_against(self)?;
        Ok(partition)
    }

    /// Partition by edge cardinality, classes ordered by increasing rank.
    pub fn rank_partition(&self) -> Result<EdgeClassPartition, HypergraphError> {
        self.rank()?;
        let mut ranks: Vec<usize> = self.edges.iter().map(Vec::len).collect();
        ranks.sort_unstable();
        ranks.dedup();
        let class_of = self
            .edges
            .iter()
            .map(|e| ranks.binary_search(&e.len()).expect("rank present"))
            .collect();
        Ok(EdgeClassPartition {
            class_of,
            class_rank: ranks,
        })
    }

    /// Parses the `.hg` text format: line 1 is `k`, each following nonempty
    /// line is one edge as space-separated 0-based vertex indices, `#` lines
    /// are comments.
    pub fn from_hg_str(input: &str, path: &Path) -> Result<Self, HypergraphError> {
        let mut k: Option<usize> = None;
        let mut edges = Vec::new();
        for (lineno, raw) in input.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            if k.is_none() {
                k = Some(line.parse().map_err(|_| {
                    HypergraphError::parse(path, lineno + 1, format!("expected vertex count, got {line:?}"))
                })?);
                continue;
            }
            let edge = line
                .split_whitespace()
                .map(|tok| {
                    tok.parse().map_err(|_| {
                        HypergraphError::parse(path, lineno + 1, format!("bad vertex index {tok:?}"))
                    })
                })
                .collect::<Result<Vec<usize>, _>>()?;
            edges.push(edge);
        }
        let k = k.ok_or_else(|| HypergraphError::parse(path, 1, "missing vertex count line"))?;
        Hypergraph::new(k, edges)
    }

    /// Canonical `.hg` text: sorted vertices within edges, edge order kept.
    pub fn to_hg_string(&self) -> String {
        let mut out = String::new();
        out.push_str(&self.k.to_string());
        out.push('\n');
        for edge in &self.edges {
            let words: Vec<String> = edge.iter().map(|v| v.to_string()).collect();
            out.push_str(&words.join(" "));
            out.push('\n');
        }
        out
    }

    pub fn load_hg(path: impl AsRef<Path>) -> Result<Self, HypergraphError> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|source| HypergraphError::Io {
            path: path.display().to_string(),
            source,
        })?;
        Self::from_hg_str(&text, path)
    }

    pub fn write_hg(&self, path: impl AsRef<Path>) -> Result<(), HypergraphError> {
        let path = path.as_ref();
        std::fs::write(path, self.to_hg_string()).map_err(|source| HypergraphError::Io {
            path: path.display().to_string(),
            source,
        })
    }
}

/// Assignment of every edge to a class, with the common rank per class.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EdgeClassPartition {
    class_of: Vec<usize>,
    class_rank: Vec<usize>,
}

impl EdgeClassPartition {
    pub fn new(class_of: Vec<usize>, class_rank: Vec<usize>) -> Self {
        EdgeClassPartition {
            class_of,
            class_rank,
        }
    }

    pub fn class_count(&self) -> usize {
        self.class_rank.len()
    }

    pub fn class_of(&self, edge_index: usize) -> usize {
        self.class_of[edge_index]
    }

    pub fn class_ranks(&self) -> &[usize] {
        &self.class_rank
    }

    /// Consistency with a hypergraph: one class per edge, class indices in
    /// range, and every edge's cardinality equal to its class rank.
    pub fn check_against(&self, h: &Hypergraph) -> Result<(), HypergraphError> {
        if self.class_of.len() != h.edge_count() {
            return Err(HypergraphError::PartitionMismatch(format!(
                "partition covers {} edges, hypergraph has {}",
                self.class_of.len(),
                h.edge_count()
            )));
        }
        for (i, &c) in self.class_of.iter().enumerate() {
            if c >= self.class_rank.len() {
                return Err(HypergraphError::PartitionMismatch(format!(
                    "edge {i} assigned to class {c}, only {} classes",
                    self.class_rank.len()
                )));
            }
            if h.edges()[i].len() != self.class_rank[c] {
                return Err(HypergraphError::PartitionMismatch(format!(
                    "edge {i} has cardinality {}, class {c} has rank {}",
                    h.edges()[i].len(),
                    self.class_rank[c]
                )));
            }
        }
        for c in 0..self.class_rank.len() {
            if !self.class_of.contains(&c) {
                return Err(HypergraphError::PartitionMismatch(format!(
                    "class {c} is empty"
                )));
            }
        }
        Ok(())
    }
}

/// Square matrix of per-class maximum dependency counts.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DependencyMatrix {
    counts: Vec<Vec<usize>>,
}

impl DependencyMatrix {
    pub fn new(counts: Vec<Vec<usize>>) -> Self {
        let dim = counts.len();
        assert!(
            counts.iter().all(|row| row.len() == dim),
            "dependency matrix must be square"
        );
        DependencyMatrix { counts }
    }

    pub fn dim(&self) -> usize {
        self.counts.len()
    }

    pub fn get(&self, i: usize, j: usize) -> usize {
        self.counts[i][j]
    }

    pub fn rows(&self) -> &[Vec<usize>] {
        &self.counts
    }

    /// Row sum: the neighborhood-size bound for class-`i` events.
    pub fn row_total(&self, i: usize) -> usize {
        self.counts[i].iter().sum()
    }

    pub fn max_row_total(&self) -> usize {
        (0..self.dim()).map(|i| self.row_total(i)).max().unwrap_or(0)
    }
}

impl fmt::Display for DependencyMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for row in &self.counts {
            let words: Vec<String> = row.iter().map(|x| x.to_string()).collect();
            writeln!(f, "{}", words.join(" "))?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators;
    use proptest::prelude::*;

    fn h(k: usize, edges: &[&[usize]]) -> Hypergraph {
        Hypergraph::new(k, edges.iter().map(|e| e.to_vec()).collect()).unwrap()
    }

    #[test]
    fn validate_rejects_out_of_range_vertex() {
        let err = Hypergraph::new(3, vec![vec![0, 5]]).unwrap_err();
        assert!(matches!(
            err,
            HypergraphError::VertexOutOfRange {
                edge_index: 0,
                vertex: 5,
                k: 3
            }
        ));
    }

    #[test]
    fn validate_rejects_duplicate_edge_as_set() {
        let err = Hypergraph::new(3, vec![vec![0, 1], vec![1, 0]]).unwrap_err();
        assert!(matches!(
            err,
            HypergraphError::DuplicateEdge { first: 0, second: 1 }
        ));
    }

    #[test]
    fn validate_rejects_empty_edge_and_repeated_vertex() {
        assert!(matches!(
            Hypergraph::new(3, vec![vec![]]).unwrap_err(),
            HypergraphError::EmptyEdge { edge_index: 0 }
        ));
        assert!(matches!(
            Hypergraph::new(3, vec![vec![1, 1]]).unwrap_err(),
            HypergraphError::RepeatedVertex {
                edge_index: 0,
                vertex: 1
            }
        ));
    }

    #[test]
    fn h15_validates() {
        let (h, _) = generators::h15();
        assert!(h.validate().is_ok());
        assert_eq!(h.edge_count(), 103);
    }

    #[test]
    fn rank_examples() {
        let (h15, _) = generators::h15();
        assert_eq!(h15.rank().unwrap(), 3);
        let cyc = generators::cyclic_consecutive(10, 4).unwrap();
        assert_eq!(cyc.rank().unwrap(), 4);
        let mixed = h(2, &[&[0], &[0, 1]]);
        assert_eq!(mixed.rank().unwrap(), 2);
        let empty = Hypergraph::new(2, vec![]).unwrap();
        assert!(matches!(empty.rank(), Err(HypergraphError::NoEdges)));
    }

    #[test]
    fn intersecting_edges_single_edge_is_empty() {
        let single = h(4, &[&[0, 1, 2]]);
        assert!(single.intersecting_edges(0).unwrap().is_empty());
        assert_eq!(single.dependency_degree().unwrap(), 0);
        assert!(matches!(
            single.intersecting_edges(3),
            Err(HypergraphError::EdgeIndexOutOfRange { index: 3, len: 1 })
        ));
    }

    #[test]
    fn intersecting_edges_cyclic() {
        let cyc = generators::cyclic_consecutive(10, 3).unwrap();
        assert_eq!(cyc.intersecting_edges(0).unwrap(), vec![1, 2, 8, 9]);
        assert_eq!(cyc.dependency_degree().unwrap(), 4);
    }

    #[test]
    fn h15_neighborhood_sizes() {
        let (h, classes) = generators::h15();
        // letter-letter pairs see 26 neighbors, digit triples 36
        assert_eq!(h.intersecting_edges(0).unwrap().len(), 26);
        assert_eq!(h.intersecting_edges(102).unwrap().len(), 36);
        assert_eq!(h.dependency_degree().unwrap(), 36);
        let d = h.classify_edges(&classes).unwrap();
        assert_eq!(
            d.rows(),
            &[vec![18, 8, 0], vec![10, 13, 3], vec![0, 33, 3]]
        );
    }

    #[test]
    fn h15_per_edge_counts_are_class_uniform() {
        let (h, classes) = generators::h15();
        let expected = [[18, 8, 0], [10, 13, 3], [0, 33, 3]];
        for i in 0..h.edge_count() {
            let mut row = [0usize; 3];
            for j in h.intersecting_edges(i).unwrap() {
                row[classes.class_of(j)] += 1;
            }
            assert_eq!(row, expected[classes.class_of(i)], "edge {i}");
        }
    }

    #[test]
    fn classify_one_class_collapses_to_dependency_degree() {
        let cyc = generators::cyclic_consecutive(10, 3).unwrap();
        let trivial = cyc.trivial_partition().unwrap();
        let d = cyc.classify_edges(&trivial).unwrap();
        assert_eq!(d.rows(), &[vec![cyc.dependency_degree().unwrap()]]);
        // mixed-rank hypergraphs admit no single class: ranks would clash
        let (h15, _) = generators::h15();
        assert!(h15.trivial_partition().is_err());
    }

    #[test]
    fn classify_disjoint_edges_all_zero() {
        let hg = h(4, &[&[0, 1], &[2, 3]]);
        let classes = EdgeClassPartition::new(vec![0, 1], vec![2, 2]);
        let d = hg.classify_edges(&classes).unwrap();
        assert_eq!(d.rows(), &[vec![0, 0], vec![0, 0]]);
    }

    #[test]
    fn classify_rejects_mismatched_partition() {
        let hg = h(4, &[&[0, 1], &[2, 3]]);
        let classes = EdgeClassPartition::new(vec![0], vec![2]);
        assert!(matches!(
            hg.classify_edges(&classes),
            Err(HypergraphError::PartitionMismatch(_))
        ));
        let wrong_rank = EdgeClassPartition::new(vec![0, 0], vec![3]);
        assert!(hg.classify_edges(&wrong_rank).is_err());
    }

    #[test]
    fn refine_partition_recovers_h15_classes() {
        let (h, classes) = generators::h15();
        let refined = h.refine_partition(&h.rank_partition().unwrap()).unwrap();
        assert_eq!(refined, classes);
    }

    #[test]
    fn hg_round_trip_is_bit_exact() {
        let (h15, _) = generators::h15();
        let text = h15.to_hg_string();
        let reread = Hypergraph::from_hg_str(&text, Path::new("h15.hg")).unwrap();
        assert_eq!(reread, h15);
        assert_eq!(reread.to_hg_string(), text);
    }

    #[test]
    fn hg_parser_handles_comments_and_errors() {
        let text = "# comment\n4\n0 1 2\n\n1 2 3\n";
        let h = Hypergraph::from_hg_str(text, Path::new("t.hg")).unwrap();
        assert_eq!(h.edge_count(), 2);
        assert!(Hypergraph::from_hg_str("", Path::new("t.hg")).is_err());
        assert!(Hypergraph::from_hg_str("3\n0 x\n", Path::new("t.hg")).is_err());
    }

    fn arb_hypergraph() -> impl Strategy<Value = Hypergraph> {
        (2usize..8).prop_flat_map(|k| {
            proptest::collection::vec(
                proptest::collection::btree_set(0..k, 1..=3.min(k)),
                1..10,
            )
            .prop_filter_map("duplicate edges", move |sets| {
                let mut edges: Vec<Vec<usize>> =
                    sets.into_iter().map(|s| s.into_iter().collect()).collect();
                edges.sort();
                edges.dedup();
                Hypergraph::new(k, edges).ok()
            })
        })
    }

    proptest! {
        #[test]
        fn intersection_is_symmetric(h in arb_hypergraph()) {
            let all: Vec<Vec<usize>> = (0..h.edge_count())
                .map(|i| h.intersecting_edges(i).unwrap())
                .collect();
            for (i, neighbors) in all.iter().enumerate() {
                for &j in neighbors {
                    prop_assert!(all[j].contains(&i), "edge {} lists {} but not vice versa", i, j);
                }
            }
        }

        #[test]
        fn dependency_degree_below_edge_count(h in arb_hypergraph()) {
            prop_assert!(h.dependency_degree().unwrap() < h.edge_count());
        }

        #[test]
        fn hg_string_round_trips(h in arb_hypergraph()) {
            let text = h.to_hg_string();
            let reread = Hypergraph::from_hg_str(&text, Path::new("p.hg")).unwrap();
            prop_assert_eq!(&reread, &h);
            prop_assert_eq!(reread.to_hg_string(), text);
        }
    }
}
