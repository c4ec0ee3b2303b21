//! Construction and verification of variable-strength covering arrays.
//!
//! Three constructors with different guarantees:
//! - [`random_fill`]: the plain uniform array behind the probabilistic bound;
//! - [`moser_tardos`]: resamples the columns of an uncovered edge until no
//!   edge is uncovered, the constructive counterpart of the local lemma;
//! - [`vardens`]: derandomized density greedy. Each row fixes columns one at
//!   a time, always taking the symbol that maximizes the expected number of
//!   newly covered tuples; conditional expectations then force every row to
//!   cover at least the pre-row expectation, which yields the logarithmic
//!   row-count guarantee. Both the per-row certificate and the final row
//!   bound are asserted (in exact integer arithmetic, no float comparisons).
//!
//! Per-edge coverage is tracked in bitmaps over the tuple space `v^|e|`;
//! instances with a tuple space above 2^24 are rejected up front.

use std::path::Path;

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::bounds::ln_rate;
use crate::hypergraph::{Hypergraph, HypergraphError};
use crate::parallel;

/// Largest admitted per-edge tuple space, `v^|e| <= 2^24`.
const TUPLE_SPACE_LIMIT: u64 = 1 << 24;

#[derive(Debug, Error)]
pub enum ConstructError {
    #[error("array has {array_k} columns, hypergraph has {hypergraph_k}")]
    DimensionMismatch { array_k: usize, hypergraph_k: usize },
    #[error("tuple space v^{rank} = {v}^{rank} exceeds the 2^24 limit")]
    TupleSpaceTooLarge { rank: usize, v: u32 },
    #[error("no covered array within {rounds} resampling rounds")]
    ResampleCapExceeded { rounds: u64 },
    #[error("cell ({row}, {col}) holds {value}, outside the alphabet 0..{v}")]
    SymbolOutOfRange {
        row: usize,
        col: usize,
        value: u32,
        v: u32,
    },
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

impl ConstructError {
    fn parse(path: &Path, line: usize, msg: impl Into<String>) -> Self {
        ConstructError::Parse {
            path: path.display().to_string(),
            line,
            msg: msg.into(),
        }
    }
}

/// An n x k array over `Z_v`, row-major.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VcaArray {
    n: usize,
    k: usize,
    v: u32,
    cells: Vec<u32>,
}

impl VcaArray {
    pub fn new(n: usize, k: usize, v: u32, cells: Vec<u32>) -> Result<Self, ConstructError> {
        assert_eq!(cells.len(), n * k, "cell count must be n * k");
        for (i, &value) in cells.iter().enumerate() {
            if value >= v {
                return Err(ConstructError::SymbolOutOfRange {
                    row: i / k,
                    col: i % k,
                    value,
                    v,
                });
            }
        }
        Ok(VcaArray { n, k, v, cells })
    }

    pub fn from_rows(k: usize, v: u32, rows: Vec<Vec<u32>>) -> Result<Self, ConstructError> {
        let n = rows.len();
        let mut cells = Vec::with_capacity(n * k);
        for row in rows {
            assert_eq!(row.len(), k, "row width must be k");
            cells.extend(row);
        }
        VcaArray::new(n, k, v, cells)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn v(&self) -> u32 {
        self.v
    }

    pub fn get(&self, row: usize, col: usize) -> u32 {
        self.cells[row * self.k + col]
    }

    pub fn row(&self, row: usize) -> &[u32] {
        &self.cells[row * self.k..(row + 1) * self.k]
    }

    /// Array file text: header `n k v seed algorithm`, then one row per line.
    pub fn to_array_string(&self, seed: u64, algorithm: &str) -> String {
        let mut out = format!("{} {} {} {} {}\n", self.n, self.k, self.v, seed, algorithm);
        for r in 0..self.n {
            let words: Vec<String> = self.row(r).iter().map(|x| x.to_string()).collect();
            out.push_str(&words.join(" "));
            out.push('\n');
        }
        out
    }

    pub fn write_array(
        &self,
        path: impl AsRef<Path>,
        seed: u64,
        algorithm: &str,
    ) -> Result<(), ConstructError> {
        let path = path.as_ref();
        std::fs::write(path, self.to_array_string(seed, algorithm)).map_err(|source| {
            ConstructError::Io {
                path: path.display().to_string(),
                source,
            }
        })
    }

    pub fn from_array_str(input: &str, path: &Path) -> Result<(Self, u64, String), ConstructError> {
        let mut lines = input.lines().enumerate();
        let (_, header) = lines
            .next()
            .ok_or_else(|| ConstructError::parse(path, 1, "empty file"))?;
        let fields: Vec<&str> = header.split_whitespace().collect();
        if fields.len() != 5 {
            return Err(ConstructError::parse(
                path,
                1,
                "header must be `n k v seed algorithm`",
            ));
        }
        let bad = |what: &str| ConstructError::parse(path, 1, format!("bad {what} in header"));
        let n: usize = fields[0].parse().map_err(|_| bad("n"))?;
        let k: usize = fields[1].parse().map_err(|_| bad("k"))?;
        let v: u32 = fields[2].parse().map_err(|_| bad("v"))?;
        let seed: u64 = fields[3].parse().map_err(|_| bad("seed"))?;
        let algorithm = fields[4].to_string();
        let mut cells = Vec::with_capacity(n * k);
        for (lineno, raw) in lines {
            let line = raw.trim();
            if line.is_empty() {
                continue;
            }
            let row = line
                .split_whitespace()
                .map(|tok| {
                    tok.parse::<u32>().map_err(|_| {
                        ConstructError::parse(path, lineno + 1, format!("bad symbol {tok:?}"))
                    })
                })
                .collect::<Result<Vec<u32>, _>>()?;
            if row.len() != k {
                return Err(ConstructError::parse(
                    path,
                    lineno + 1,
                    format!("row has {} symbols, expected {k}", row.len()),
                ));
            }
            cells.extend(row);
        }
        if cells.len() != n * k {
            return Err(ConstructError::parse(
                path,
                1,
                format!("expected {n} rows, found {}", cells.len() / k.max(1)),
            ));
        }
        Ok((VcaArray::new(n, k, v, cells)?, seed, algorithm))
    }

    pub fn load_array(path: impl AsRef<Path>) -> Result<(Self, u64, String), ConstructError> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|source| ConstructError::Io {
            path: path.display().to_string(),
            source,
        })?;
        Self::from_array_str(&text, path)
    }
}

fn tuple_space(len: usize, v: u32) -> Result<u64, ConstructError> {
    let mut space: u64 = 1;
    for _ in 0..len {
        space = space.saturating_mul(u64::from(v));
        if space > TUPLE_SPACE_LIMIT {
            return Err(ConstructError::TupleSpaceTooLarge { rank: len, v });
        }
    }
    Ok(space)
}

/// Per-edge coverage bookkeeping: a bitmap over the tuple space of each edge
/// plus the count of still-uncovered tuples.
#[derive(Debug, Clone)]
pub struct CoverageState {
    v: u32,
    edges: Vec<Vec<usize>>,
    bitmaps: Vec<Vec<u64>>,
    uncovered: Vec<u64>,
    spaces: Vec<u64>,
}

impl CoverageState {
    pub fn new(h: &Hypergraph, v: u32) -> Result<Self, ConstructError> {
        assert!(v >= 2, "alphabet size must be at least 2");
        let mut bitmaps = Vec::with_capacity(h.edge_count());
        let mut spaces = Vec::with_capacity(h.edge_count());
        for edge in h.edges() {
            let space = tuple_space(edge.len(), v)?;
            spaces.push(space);
            bitmaps.push(vec![0u64; space.div_ceil(64) as usize]);
        }
        Ok(CoverageState {
            v,
            edges: h.edges().to_vec(),
            uncovered: spaces.clone(),
            bitmaps,
            spaces,
        })
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn uncovered(&self, edge: usize) -> u64 {
        self.uncovered[edge]
    }

    pub fn uncovered_total(&self) -> u64 {
        self.uncovered.iter().sum()
    }

    pub fn is_fully_covered(&self) -> bool {
        self.uncovered.iter().all(|&u| u == 0)
    }

    pub fn is_tuple_covered(&self, edge: usize, tuple: u64) -> bool {
        self.bitmaps[edge][(tuple / 64) as usize] & (1 << (tuple % 64)) != 0
    }

    /// Big-endian tuple index of a full row restricted to an edge; tuple
    /// lexicographic order equals index order.
    fn row_tuple(&self, edge: usize, row: &[u32]) -> u64 {
        self.edges[edge]
            .iter()
            .fold(0u64, |acc, &col| acc * u64::from(self.v) + u64::from(row[col]))
    }

    /// Marks the tuples of `row` covered, returning how many were new.
    pub fn record_row(&mut self, row: &[u32]) -> u64 {
        let mut newly = 0;
        for e in 0..self.edges.len() {
            let tuple = self.row_tuple(e, row);
            let (word, bit) = ((tuple / 64) as usize, tuple % 64);
            if self.bitmaps[e][word] & (1 << bit) == 0 {
                self.bitmaps[e][word] |= 1 << bit;
                self.uncovered[e] -= 1;
                newly += 1;
            }
        }
        newly
    }

    /// Uncovered tuple indices of an edge, in lexicographic order.
    pub fn uncovered_tuples(&self, edge: usize) -> Vec<u64> {
        let mut out = Vec::with_capacity(self.uncovered[edge] as usize);
        for tuple in 0..self.spaces[edge] {
            if !self.is_tuple_covered(edge, tuple) {
                out.push(tuple);
            }
        }
        out
    }

    /// Expected number of tuples a uniformly completed row would newly
    /// cover, given the fixed coordinates of `partial`: the sum over
    /// not-fully-covered edges of (uncovered tuples consistent with the
    /// fixed coordinates) / v^(unfixed coordinates of the edge).
    pub fn density(&self, partial: &[Option<u32>]) -> f64 {
        let mut total = 0.0;
        for e in 0..self.edges.len() {
            if self.uncovered[e] == 0 {
                continue;
            }
            let edge = &self.edges[e];
            let unfixed = edge.iter().filter(|&&c| partial[c].is_none()).count();
            let consistent = self
                .uncovered_tuples(e)
                .into_iter()
                .filter(|&tuple| self.tuple_consistent(e, tuple, partial))
                .count();
            total += consistent as f64 / f64::from(self.v).powi(unfixed as i32);
        }
        total
    }

    fn tuple_consistent(&self, edge: usize, tuple: u64, partial: &[Option<u32>]) -> bool {
        let cols = &self.edges[edge];
        let mut rest = tuple;
        for &col in cols.iter().rev() {
            let coord = (rest % u64::from(self.v)) as u32;
            rest /= u64::from(self.v);
            if let Some(fixed) = partial[col] {
                if fixed != coord {
                    return false;
                }
            }
        }
        true
    }
}

/// Result of [`verify`]: either fully covered, or the lexicographically
/// first missing tuple of the lowest-index uncovered edge.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum VerifyOutcome {
    Covered,
    Uncovered { edge: usize, missing: Vec<u32> },
}

impl VerifyOutcome {
    pub fn is_covered(&self) -> bool {
        matches!(self, VerifyOutcome::Covered)
    }
}

/// Exhaustively checks that every edge of `h` is covered by `a`.
///
/// Edges are checked independently (in parallel when enabled); the reported
/// witness is always the lowest-index uncovered edge with its first missing
/// tuple, identical to a sequential scan.
pub fn verify(a: &VcaArray, h: &Hypergraph) -> Result<VerifyOutcome, ConstructError> {
    if a.k() != h.k() {
        return Err(ConstructError::DimensionMismatch {
            array_k: a.k(),
            hypergraph_k: h.k(),
        });
    }
    for edge in h.edges() {
        tuple_space(edge.len(), a.v())?;
    }
    let v = u64::from(a.v());
    let first_missing: Vec<Option<u64>> = parallel::map_indexed(h.edge_count(), |e| {
        let edge = &h.edges()[e];
        let space = edge.iter().fold(1u64, |acc, _| acc * v);
        let mut bitmap = vec![0u64; space.div_ceil(64) as usize];
        let mut seen = 0u64;
        for r in 0..a.n() {
            let tuple = edge
                .iter()
                .fold(0u64, |acc, &col| acc * v + u64::from(a.get(r, col)));
            let (word, bit) = ((tuple / 64) as usize, tuple % 64);
            if bitmap[word] & (1 << bit) == 0 {
                bitmap[word] |= 1 << bit;
                seen += 1;
                if seen == space {
                    return None;
                }
            }
        }
        (0..space).find(|&tuple| bitmap[(tuple / 64) as usize] & (1 << (tuple % 64)) == 0)
    });
    for (e, missing) in first_missing.into_iter().enumerate() {
        if let Some(tuple) = missing {
            let m = h.edges()[e].len();
            let mut symbols = vec![0u32; m];
            let mut rest = tuple;
            for i in (0..m).rev() {
                symbols[i] = (rest % v) as u32;
                rest /= v;
            }
            return Ok(VerifyOutcome::Uncovered {
                edge: e,
                missing: symbols,
            });
        }
    }
    Ok(VerifyOutcome::Covered)
}

/// Uniformly random n x k array over `Z_v`, deterministic in the seed.
pub fn random_fill(h: &Hypergraph, v: u32, n: usize, seed: u64) -> VcaArray {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let cells = (0..n * h.k()).map(|_| rng.random_range(0..v)).collect();
    VcaArray {
        n,
        k: h.k(),
        v,
        cells,
    }
}

/// Resampling constructor: starting from a uniform array, repeatedly picks
/// the lowest-index uncovered edge and resamples every entry of its columns,
/// until all edges are covered or the round cap is hit.
pub fn moser_tardos(
    h: &Hypergraph,
    v: u32,
    n: usize,
    seed: u64,
    max_rounds: u64,
) -> Result<VcaArray, ConstructError> {
    for edge in h.edges() {
        tuple_space(edge.len(), v)?;
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut array = VcaArray {
        n,
        k: h.k(),
        v,
        cells: (0..n * h.k()).map(|_| rng.random_range(0..v)).collect(),
    };
    let incidence = h.incidence();
    // covered-status cache, invalidated for edges sharing a resampled column
    let mut status: Vec<Option<bool>> = vec![None; h.edge_count()];
    let mut rounds = 0u64;
    loop {
        let mut violated = None;
        for (e, slot) in status.iter_mut().enumerate() {
            let covered = match *slot {
                Some(c) => c,
                None => {
                    let c = edge_covered(&array, h.edges()[e].as_slice());
                    *slot = Some(c);
                    c
                }
            };
            if !covered {
                violated = Some(e);
                break;
            }
        }
        let Some(e) = violated else {
            return Ok(array);
        };
        if rounds == max_rounds {
            return Err(ConstructError::ResampleCapExceeded { rounds });
        }
        rounds += 1;
        for &col in &h.edges()[e] {
            for r in 0..n {
                array.cells[r * array.k + col] = rng.random_range(0..v);
            }
            for &other in &incidence[col] {
                status[other] = None;
            }
        }
    }
}

fn edge_covered(a: &VcaArray, edge: &[usize]) -> bool {
    let v = u64::from(a.v());
    let space = edge.iter().fold(1u64, |acc, _| acc * v);
    if (a.n() as u64) < space {
        return false;
    }
    let mut bitmap = vec![0u64; space.div_ceil(64) as usize];
    let mut seen = 0u64;
    for r in 0..a.n() {
        let tuple = edge
            .iter()
            .fold(0u64, |acc, &col| acc * v + u64::from(a.get(r, col)));
        let (word, bit) = ((tuple / 64) as usize, tuple % 64);
        if bitmap[word] & (1 << bit) == 0 {
            bitmap[word] |= 1 << bit;
            seen += 1;
            if seen == space {
                return true;
            }
        }
    }
    false
}

/// Density-greedy constructor. Deterministic: within each row, columns are
/// processed in descending order of incident uncovered edges (ties by
/// index) and each column takes the smallest symbol among those maximizing
/// the density of the extended assignment.
///
/// Panics if a row ever covers less than the pre-row expectation or if the
/// final row count exceeds the greedy guarantee; neither can happen unless
/// the bookkeeping is wrong.
pub fn vardens(h: &Hypergraph, v: u32) -> Result<VcaArray, ConstructError> {
    let mut state = CoverageState::new(h, v)?;
    let k = h.k();
    let edges = h.edges();
    let incidence = h.incidence();
    let t_max = edges.iter().map(Vec::len).max().unwrap_or(0);
    // v^i lookup for exact integer density comparisons
    let vpow: Vec<u128> = (0..=t_max)
        .map(|i| (0..i).fold(1u128, |acc, _| acc * u128::from(v)))
        .collect();
    let mut rows: Vec<Vec<u32>> = Vec::new();

    while !state.is_fully_covered() {
        // expected coverage of a uniform row, scaled by v^t_max
        let target: u128 = (0..edges.len())
            .map(|e| u128::from(state.uncovered(e)) * vpow[t_max - edges[e].len()])
            .sum();

        let mut order: Vec<usize> = (0..k).collect();
        let busy: Vec<usize> = (0..k)
            .map(|c| {
                incidence[c]
                    .iter()
                    .filter(|&&e| state.uncovered(e) > 0)
                    .count()
            })
            .collect();
        order.sort_by_key(|&c| (std::cmp::Reverse(busy[c]), c));

        // per-edge list of uncovered tuples still consistent with the row
        let mut consistent: Vec<Vec<u64>> = (0..edges.len())
            .map(|e| {
                if state.uncovered(e) > 0 {
                    state.uncovered_tuples(e)
                } else {
                    Vec::new()
                }
            })
            .collect();
        let mut unfixed: Vec<usize> = edges.iter().map(Vec::len).collect();
        let mut row: Vec<Option<u32>> = vec![None; k];

        for &c in &order {
            let live: Vec<usize> = incidence[c]
                .iter()
                .copied()
                .filter(|&e| !consistent[e].is_empty())
                .collect();
            let mut symbol = 0u32;
            if !live.is_empty() {
                let u_top = live.iter().map(|&e| unfixed[e] - 1).max().unwrap();
                let mut scores = vec![0u128; v as usize];
                for &e in &live {
                    let pos = edges[e].iter().position(|&x| x == c).expect("c in edge");
                    let divisor = vpow[edges[e].len() - 1 - pos] as u64;
                    let weight = vpow[u_top - (unfixed[e] - 1)];
                    for &tuple in &consistent[e] {
                        let coord = (tuple / divisor) % u64::from(v);
                        scores[coord as usize] += weight;
                    }
                }
                // first maximum = smallest symbol among ties
                let mut best = 0usize;
                for (s, &score) in scores.iter().enumerate() {
                    if score > scores[best] {
                        best = s;
                    }
                }
                symbol = best as u32;
            }
            row[c] = Some(symbol);
            for &e in &incidence[c] {
                if consistent[e].is_empty() && state.uncovered(e) == 0 {
                    continue;
                }
                let pos = edges[e].iter().position(|&x| x == c).expect("c in edge");
                let shift = edges[e].len() - 1 - pos;
                let divisor = vpow[shift] as u64;
                consistent[e].retain(|&tuple| (tuple / divisor) % u64::from(v) == u64::from(symbol));
                unfixed[e] -= 1;
            }
        }

        let full: Vec<u32> = row.into_iter().map(|s| s.expect("all columns fixed")).collect();
        let newly = state.record_row(&full);
        assert!(
            u128::from(newly) * vpow[t_max] >= target,
            "row {} covered {} tuples, below the expectation {}/{}",
            rows.len(),
            newly,
            target,
            vpow[t_max]
        );
        rows.push(full);
    }

    if !edges.is_empty() {
        let t = t_max as u32;
        let guarantee = ((edges.len() as f64).ln() + f64::from(t) * f64::from(v).ln())
            / ln_rate(t, v);
        assert!(
            (rows.len() as f64) <= guarantee.floor() + 1.0,
            "greedy produced {} rows, guarantee allows {}",
            rows.len(),
            guarantee
        );
    }
    VcaArray::from_rows(k, v, rows)
}
