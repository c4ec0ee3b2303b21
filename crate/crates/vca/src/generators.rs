//! Hypergraph families for bound comparison and experiments: complete
//! uniform hypergraphs, cyclic consecutive hypergraphs, random sphere
//! triangulations, Steiner triple systems (Bose and Skolem constructions),
//! and the 15-vertex mixed-strength hypergraph with its edge classes.

use std::path::Path;

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::bounds::DesignParams;
use crate::hypergraph::{EdgeClassPartition, Hypergraph, HypergraphError};

#[derive(Debug, Error)]
pub enum GeneratorError {
    #[error("strength t = {t} must satisfy 1 <= t <= k = {k}")]
    BadStrength { t: usize, k: usize },
    #[error("parameters produce duplicate edges (k = {k}, t = {t})")]
    DuplicateEdges { k: usize, t: usize },
    #[error("triangulation needs k >= 4, got {k}")]
    TriangulationTooSmall { k: usize },
    #[error("no Steiner triple system on {k} points (need k = 1 or 3 mod 6, k >= 7)")]
    StsInadmissible { k: usize },
    #[error("invalid design: {0}")]
    InvalidDesign(String),
    #[error(transparent)]
    Hypergraph(#[from] HypergraphError),
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

impl GeneratorError {
    fn parse(path: &Path, line: usize, msg: impl Into<String>) -> Self {
        GeneratorError::Parse {
            path: path.display().to_string(),
            line,
            msg: msg.into(),
        }
    }
}

/// The complete t-uniform hypergraph on k vertices: all C(k, t) t-subsets
/// as edges, in lexicographic order.
pub fn complete_uniform(k: usize, t: usize) -> Result<Hypergraph, GeneratorError> {
    if t < 1 || t > k {
        return Err(GeneratorError::BadStrength { t, k });
    }
    let mut edges = Vec::new();
    let mut current: Vec<usize> = (0..t).collect();
    loop {
        edges.push(current.clone());
        // advance to the next t-subset in lexicographic order
        let mut i = t;
        loop {
            if i == 0 {
                return Ok(Hypergraph::new(k, edges)?);
            }
            i -= 1;
            if current[i] != i + k - t {
                break;
            }
        }
        current[i] += 1;
        for j in i + 1..t {
            current[j] = current[j - 1] + 1;
        }
    }
}

/// The cyclic consecutive hypergraph: k edges, edge i covering the t
/// cyclically consecutive vertices starting at i. Parameter combinations
/// that would repeat an edge (k = t with k > 1) are rejected.
pub fn cyclic_consecutive(k: usize, t: usize) -> Result<Hypergraph, GeneratorError> {
    if t < 1 || t > k {
        return Err(GeneratorError::BadStrength { t, k });
    }
    if k == t && k > 1 {
        return Err(GeneratorError::DuplicateEdges { k, t });
    }
    let edges = (0..k)
        .map(|i| (0..t).map(|j| (i + j) % k).collect())
        .collect();
    Ok(Hypergraph::new(k, edges)?)
}

/// Seed specification for [`random_triangulation`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TriangulationSeedSpec {
    pub k: usize,
    pub rng_seed: u64,
}

/// Random triangulation of the sphere on k vertices, as a rank-3 hypergraph
/// whose edges are the 2k - 4 triangular faces.
///
/// Starts from the tetrahedron and repeatedly subdivides a uniformly random
/// face with a fresh vertex joined to its three corners, so the result is a
/// valid sphere triangulation for every seed and deterministic in the seed.
pub fn random_triangulation(spec: TriangulationSeedSpec) -> Result<Hypergraph, GeneratorError> {
    if spec.k < 4 {
        return Err(GeneratorError::TriangulationTooSmall { k: spec.k });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(spec.rng_seed);
    let mut faces: Vec<[usize; 3]> = vec![[0, 1, 2], [0, 1, 3], [0, 2, 3], [1, 2, 3]];
    for v in 4..spec.k {
        let i = rng.random_range(0..faces.len());
        let [a, b, c] = faces[i];
        faces[i] = [a, b, v];
        faces.push([b, c, v]);
        faces.push([a, c, v]);
    }
    let edges = faces.into_iter().map(|f| f.to_vec()).collect();
    Ok(Hypergraph::new(spec.k, edges)?)
}

/// Blocks of an s-(k, t, lambda) design.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DesignBlocks {
    pub params: DesignParams,
    pub blocks: Vec<Vec<usize>>,
}

/// Outcome of the lambda-regularity check in [`DesignBlocks::validate`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DesignCheck {
    /// Every s-subset was enumerated and appears in exactly lambda blocks.
    Verified,
    /// C(k, s) exceeds the enumeration budget; structure taken on trust.
    SkippedTooLarge,
}

impl DesignBlocks {
    /// Checks block shape always, and lambda-regularity by full enumeration
    /// when C(k, s) is at most 10^7 (larger point sets are trusted and
    /// flagged).
    pub fn validate(&self) -> Result<DesignCheck, GeneratorError> {
        let p = &self.params;
        p.check().map_err(|e| GeneratorError::InvalidDesign(e.to_string()))?;
        for (i, block) in self.blocks.iter().enumerate() {
            if block.len() != p.t {
                return Err(GeneratorError::InvalidDesign(format!(
                    "block {i} has {} points, expected t = {}",
                    block.len(),
                    p.t
                )));
            }
            let mut sorted = block.clone();
            sorted.sort_unstable();
            sorted.dedup();
            if sorted.len() != p.t {
                return Err(GeneratorError::InvalidDesign(format!(
                    "block {i} repeats a point"
                )));
            }
            if sorted.last().copied().unwrap_or(0) >= p.k {
                return Err(GeneratorError::InvalidDesign(format!(
                    "block {i} has a point outside 0..{}",
                    p.k
                )));
            }
        }
        if binomial_le(p.k, p.s, 10_000_000).is_none() {
            return Ok(DesignCheck::SkippedTooLarge);
        }
        let mut counts: std::collections::HashMap<Vec<usize>, usize> =
            std::collections::HashMap::new();
        for block in &self.blocks {
            let mut sorted = block.clone();
            sorted.sort_unstable();
            for subset in subsets_of(&sorted, p.s) {
                *counts.entry(subset).or_insert(0) += 1;
            }
        }
        let mut subset: Vec<usize> = (0..p.s).collect();
        loop {
            let got = counts.get(&subset).copied().unwrap_or(0);
            if got != p.lambda {
                return Err(GeneratorError::InvalidDesign(format!(
                    "{subset:?} covered {got} times, expected lambda = {}",
                    p.lambda
                )));
            }
            if !next_subset(&mut subset, p.k) {
                break;
            }
        }
        Ok(DesignCheck::Verified)
    }

    /// Hypergraph whose edges are the blocks, order preserved.
    pub fn to_hypergraph(&self) -> Result<Hypergraph, GeneratorError> {
        Ok(Hypergraph::new(self.params.k, self.blocks.clone())?)
    }

    /// Canonical design file: `s t lambda`, then `k`, then one sorted block
    /// per line.
    pub fn to_design_string(&self) -> String {
        let mut out = format!(
            "{} {} {}\n{}\n",
            self.params.s, self.params.t, self.params.lambda, self.params.k
        );
        for block in &self.blocks {
            let mut sorted = block.clone();
            sorted.sort_unstable();
            let words: Vec<String> = sorted.iter().map(|v| v.to_string()).collect();
            out.push_str(&words.join(" "));
            out.push('\n');
        }
        out
    }

    pub fn write_design(&self, path: impl AsRef<Path>) -> Result<(), GeneratorError> {
        let path = path.as_ref();
        std::fs::write(path, self.to_design_string()).map_err(|source| GeneratorError::Io {
            path: path.display().to_string(),
            source,
        })
    }
}

/// C(n, r) if it does not exceed `cap`.
fn binomial_le(n: usize, r: usize, cap: u64) -> Option<u64> {
    if r > n {
        return Some(0);
    }
    let r = r.min(n - r);
    let mut acc: u64 = 1;
    for i in 0..r {
        acc = acc.checked_mul((n - i) as u64)? / (i as u64 + 1);
        if acc > cap {
            return None;
        }
    }
    Some(acc)
}

fn subsets_of(sorted: &[usize], size: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut idx: Vec<usize> = (0..size).collect();
    if size > sorted.len() {
        return out;
    }
    loop {
        out.push(idx.iter().map(|&i| sorted[i]).collect());
        let mut i = size;
        loop {
            if i == 0 {
                return out;
            }
            i -= 1;
            if idx[i] != i + sorted.len() - size {
                break;
            }
        }
        idx[i] += 1;
        for j in i + 1..size {
            idx[j] = idx[j - 1] + 1;
        }
    }
}

/// Advances a sorted subset of 0..k to its lexicographic successor.
fn next_subset(subset: &mut [usize], k: usize) -> bool {
    let s = subset.len();
    let mut i = s;
    loop {
        if i == 0 {
            return false;
        }
        i -= 1;
        if subset[i] != i + k - s {
            break;
        }
    }
    subset[i] += 1;
    for j in i + 1..s {
        subset[j] = subset[j - 1] + 1;
    }
    true
}

/// Loads a design file (`s t lambda` header, `k` line, one block per line)
/// and validates it per [`DesignBlocks::validate`].
pub fn load_design(path: impl AsRef<Path>) -> Result<(DesignBlocks, DesignCheck), GeneratorError> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|source| GeneratorError::Io {
        path: path.display().to_string(),
        source,
    })?;
    let mut header: Option<(usize, usize, usize)> = None;
    let mut k: Option<usize> = None;
    let mut blocks = Vec::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let numbers = line
            .split_whitespace()
            .map(|tok| {
                tok.parse::<usize>().map_err(|_| {
                    GeneratorError::parse(path, lineno + 1, format!("bad integer {tok:?}"))
                })
            })
            .collect::<Result<Vec<usize>, _>>()?;
        if header.is_none() {
            if numbers.len() != 3 {
                return Err(GeneratorError::parse(path, lineno + 1, "expected `s t lambda`"));
            }
            header = Some((numbers[0], numbers[1], numbers[2]));
        } else if k.is_none() {
            if numbers.len() != 1 {
                return Err(GeneratorError::parse(path, lineno + 1, "expected point count k"));
            }
            k = Some(numbers[0]);
        } else {
            blocks.push(numbers);
        }
    }
    let (s, t, lambda) =
        header.ok_or_else(|| GeneratorError::parse(path, 1, "missing `s t lambda` header"))?;
    let k = k.ok_or_else(|| GeneratorError::parse(path, 2, "missing point count line"))?;
    let design = DesignBlocks {
        params: DesignParams { s, k, t, lambda },
        blocks,
    };
    let check = design.validate()?;
    Ok((design, check))
}

/// Steiner triple system on k points: a 2-(k, 3, 1) design, built with the
/// Bose construction for k = 3 (mod 6) and the Skolem construction for
/// k = 1 (mod 6).
pub fn steiner_triple_system(k: usize) -> Result<DesignBlocks, GeneratorError> {
    if k < 7 || (k % 6 != 1 && k % 6 != 3) {
        return Err(GeneratorError::StsInadmissible { k });
    }
    let mut blocks = if k % 6 == 3 {
        bose_blocks(k)
    } else {
        skolem_blocks(k)
    };
    for block in &mut blocks {
        block.sort_unstable();
    }
    Ok(DesignBlocks {
        params: DesignParams {
            s: 2,
            k,
            t: 3,
            lambda: 1,
        },
        blocks,
    })
}

/// Bose construction for k = 6n + 3. Points are Z_{2n+1} x {0,1,2}, encoded
/// as 3i + r, with the idempotent quasigroup i*j = (i + j)(n + 1) mod 2n+1.
fn bose_blocks(k: usize) -> Vec<Vec<usize>> {
    let m = k / 3; // 2n + 1
    let n = (m - 1) / 2;
    let point = |i: usize, r: usize| 3 * i + r;
    let mut blocks = Vec::new();
    for i in 0..m {
        blocks.push(vec![point(i, 0), point(i, 1), point(i, 2)]);
    }
    for i in 0..m {
        for j in i + 1..m {
            let third = ((i + j) * (n + 1)) % m;
            for r in 0..3 {
                blocks.push(vec![point(i, r), point(j, r), point(third, (r + 1) % 3)]);
            }
        }
    }
    blocks
}

/// Skolem construction for k = 6n + 1. Points are (Z_{2n} x {0,1,2}) plus an
/// extra point, encoded as 3i + r and 6n. Uses the half-idempotent
/// commutative quasigroup i*j = half((i + j) mod 2n) where half maps even e
/// to e/2 and odd s to n + (s-1)/2.
fn skolem_blocks(k: usize) -> Vec<Vec<usize>> {
    let m = (k - 1) / 3; // 2n
    let n = m / 2;
    let infinity = k - 1;
    let point = |i: usize, r: usize| 3 * i + r;
    let half = |x: usize| if x.is_multiple_of(2) { x / 2 } else { n + (x - 1) / 2 };
    let mut blocks = Vec::new();
    for i in 0..n {
        blocks.push(vec![point(i, 0), point(i, 1), point(i, 2)]);
    }
    for i in 0..n {
        for r in 0..3 {
            blocks.push(vec![infinity, point(n + i, r), point(i, (r + 1) % 3)]);
        }
    }
    for i in 0..m {
        for j in i + 1..m {
            let third = half((i + j) % m);
            for r in 0..3 {
                blocks.push(vec![point(i, r), point(j, r), point(third, (r + 1) % 3)]);
            }
        }
    }
    blocks
}

/// The 15-vertex mixed-strength hypergraph: 11 "letter" vertices 0..=10 and
/// 4 "digit" vertices 11..=14; the four digit triples as rank-3 edges, plus
/// every pair not inside a digit triple (55 letter-letter pairs, then 44
/// letter-digit pairs) as rank-2 edges. Returns the hypergraph together with
/// the three-class partition (letter-letter, letter-digit, digit-triples).
pub fn h15() -> (Hypergraph, EdgeClassPartition) {
    let mut edges: Vec<Vec<usize>> = Vec::with_capacity(103);
    for a in 0..11 {
        for b in a + 1..11 {
            edges.push(vec![a, b]);
        }
    }
    for a in 0..11 {
        for d in 11..15 {
            edges.push(vec![a, d]);
        }
    }
    for t in [[11, 12, 13], [11, 12, 14], [11, 13, 14], [12, 13, 14]] {
        edges.push(t.to_vec());
    }
    let mut class_of = vec![0usize; 55];
    class_of.extend(std::iter::repeat_n(1, 44));
    class_of.extend(std::iter::repeat_n(2, 4));
    let partition = EdgeClassPartition::new(class_of, vec![2, 2, 3]);
    let h = Hypergraph::new(15, edges).expect("h15 is valid by construction");
    (h, partition)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::collections::HashMap;

    #[test]
    fn complete_uniform_small_cases() {
        let h = complete_uniform(4, 3).unwrap();
        assert_eq!(
            h.edges(),
            &[vec![0, 1, 2], vec![0, 1, 3], vec![0, 2, 3], vec![1, 2, 3]]
        );
        assert_eq!(complete_uniform(5, 2).unwrap().edge_count(), 10);
        assert_eq!(complete_uniform(3, 3).unwrap().edge_count(), 1);
        assert!(complete_uniform(3, 4).is_err());
        assert!(complete_uniform(3, 0).is_err());
    }

    #[test]
    fn cyclic_consecutive_cases() {
        let h = cyclic_consecutive(5, 3).unwrap();
        assert_eq!(
            h.edges(),
            &[
                vec![0, 1, 2],
                vec![1, 2, 3],
                vec![2, 3, 4],
                vec![0, 3, 4],
                vec![0, 1, 4]
            ]
        );
        let h10 = cyclic_consecutive(10, 3).unwrap();
        for i in 0..10 {
            assert_eq!(h10.intersecting_edges(i).unwrap().len(), 4, "edge {i}");
        }
        assert!(matches!(
            cyclic_consecutive(4, 4),
            Err(GeneratorError::DuplicateEdges { .. })
        ));
    }

    #[test]
    fn triangulation_on_four_vertices_is_tetrahedron() {
        for seed in [0, 1, 99] {
            let h = random_triangulation(TriangulationSeedSpec { k: 4, rng_seed: seed }).unwrap();
            assert_eq!(h.edges(), complete_uniform(4, 3).unwrap().edges());
        }
    }

    #[test]
    fn triangulation_edge_counts() {
        let h = random_triangulation(TriangulationSeedSpec { k: 11, rng_seed: 7 }).unwrap();
        assert_eq!(h.edge_count(), 2 * 11 - 4);
        let big = random_triangulation(TriangulationSeedSpec { k: 100, rng_seed: 3 }).unwrap();
        assert_eq!(big.edge_count(), 196);
        assert!(random_triangulation(TriangulationSeedSpec { k: 3, rng_seed: 0 }).is_err());
    }

    #[test]
    fn triangulation_is_deterministic() {
        let spec = TriangulationSeedSpec { k: 30, rng_seed: 42 };
        assert_eq!(
            random_triangulation(spec).unwrap(),
            random_triangulation(spec).unwrap()
        );
    }

    #[test]
    fn triangulation_degree_bound_matches_dependency_degree() {
        let h = random_triangulation(TriangulationSeedSpec { k: 100, rng_seed: 5 }).unwrap();
        let mut degree = vec![0usize; h.k()];
        let mut pair_faces: HashMap<(usize, usize), usize> = HashMap::new();
        for edge in h.edges() {
            for i in 0..3 {
                for j in i + 1..3 {
                    *pair_faces.entry((edge[i], edge[j])).or_insert(0) += 1;
                }
            }
        }
        for (&(a, b), &faces) in &pair_faces {
            assert_eq!(faces, 2, "pair ({a},{b}) must lie on exactly 2 faces");
            degree[a] += 1;
            degree[b] += 1;
        }
        // pair_faces counted each incident pair once; vertex degree counts pairs
        assert_eq!(pair_faces.len(), 3 * h.k() - 6);
        let max_degree = degree.iter().copied().max().unwrap();
        assert!(h.dependency_degree().unwrap() <= 3 * (max_degree - 2));
    }

    /// Every pair of points must be covered exactly once.
    fn assert_is_sts(design: &DesignBlocks) {
        let k = design.params.k;
        let mut covered = vec![false; k * k];
        for block in &design.blocks {
            for i in 0..3 {
                for j in i + 1..3 {
                    let (a, b) = (block[i].min(block[j]), block[i].max(block[j]));
                    assert!(!covered[a * k + b], "pair ({a},{b}) covered twice");
                    covered[a * k + b] = true;
                }
            }
        }
        for a in 0..k {
            for b in a + 1..k {
                assert!(covered[a * k + b], "pair ({a},{b}) never covered");
            }
        }
        assert_eq!(design.blocks.len(), k * (k - 1) / 6);
    }

    #[test]
    fn sts_fano_and_nine_points() {
        let fano = steiner_triple_system(7).unwrap();
        assert_eq!(fano.blocks.len(), 7);
        assert_is_sts(&fano);
        let nine = steiner_triple_system(9).unwrap();
        assert_eq!(nine.blocks.len(), 12);
        assert_is_sts(&nine);
        assert!(matches!(
            steiner_triple_system(8),
            Err(GeneratorError::StsInadmissible { k: 8 })
        ));
    }

    #[test]
    fn sts_all_admissible_orders_up_to_99() {
        for k in (7..=99).filter(|k| k % 6 == 1 || k % 6 == 3) {
            let design = steiner_triple_system(k).unwrap();
            assert_is_sts(&design);
            assert_eq!(design.validate().unwrap(), DesignCheck::Verified);
        }
    }

    #[test]
    fn h15_census() {
        let (h, classes) = h15();
        assert_eq!(h.k(), 15);
        assert_eq!(h.edge_count(), 103);
        let mut per_class = [0usize; 3];
        for i in 0..h.edge_count() {
            per_class[classes.class_of(i)] += 1;
        }
        assert_eq!(per_class, [55, 44, 4]);
        assert_eq!(h.rank().unwrap(), 3);
        // no digit-digit pair appears as an edge; all other pairs exactly once
        let mut pair_seen = vec![0usize; 15 * 15];
        for edge in h.edges().iter().filter(|e| e.len() == 2) {
            pair_seen[edge[0] * 15 + edge[1]] += 1;
        }
        for a in 0..15 {
            for b in a + 1..15 {
                let expected = usize::from(a < 11);
                assert_eq!(pair_seen[a * 15 + b], expected, "pair ({a},{b})");
            }
        }
    }

    #[test]
    fn design_file_round_trip() {
        let dir = std::env::temp_dir().join(format!("vca-design-{}", std::process::id()));
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("sts9.design");
        let design = steiner_triple_system(9).unwrap();
        design.write_design(&path).unwrap();
        let (loaded, check) = load_design(&path).unwrap();
        assert_eq!(loaded, design);
        assert_eq!(check, DesignCheck::Verified);
        assert_eq!(loaded.to_hypergraph().unwrap().edge_count(), 12);
        std::fs::remove_dir_all(&dir).ok();
    }

    #[test]
    fn fano_file_loads_and_validates() {
        let dir = std::env::temp_dir().join(format!("vca-fano-{}", std::process::id()));
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("fano.design");
        std::fs::write(
            &path,
            "2 3 1\n7\n0 1 2\n1 3 6\n2 4 6\n0 5 6\n0 3 4\n1 4 5\n2 3 5\n",
        )
        .unwrap();
        let (fano, check) = load_design(&path).unwrap();
        assert_eq!(fano.blocks.len(), 7);
        assert_eq!(check, DesignCheck::Verified);
        std::fs::remove_dir_all(&dir).ok();
    }

    #[test]
    fn load_design_rejects_bad_coverage() {
        let dir = std::env::temp_dir().join(format!("vca-design-bad-{}", std::process::id()));
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("bad.design");
        // pair (0,1) covered twice, others missing
        std::fs::write(&path, "2 3 1\n7\n0 1 2\n0 1 3\n").unwrap();
        assert!(matches!(
            load_design(&path),
            Err(GeneratorError::InvalidDesign(_))
        ));
        std::fs::write(&path, "2 3\n7\n").unwrap();
        assert!(matches!(load_design(&path), Err(GeneratorError::Parse { .. })));
        std::fs::remove_dir_all(&dir).ok();
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(16))]

        #[test]
        fn triangulation_euler_invariants(k in 4usize..40, seed in 0u64..1000) {
            let h = random_triangulation(TriangulationSeedSpec { k, rng_seed: seed }).unwrap();
            prop_assert_eq!(h.edge_count(), 2 * k - 4);
            let mut pair_faces: HashMap<(usize, usize), usize> = HashMap::new();
            for edge in h.edges() {
                for i in 0..3 {
                    for j in i + 1..3 {
                        *pair_faces.entry((edge[i], edge[j])).or_insert(0) += 1;
                    }
                }
            }
            prop_assert_eq!(pair_faces.len(), 3 * k - 6);
            prop_assert!(pair_faces.values().all(|&c| c == 2));
        }
    }
}
