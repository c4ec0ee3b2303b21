//! Numeric solvers for the general and asymmetric local lemmas on a system
//! of event classes.
//!
//! A class system holds, per class i, the event rank t_i (so the event
//! probability at n rows is `v^t_i ((v^t_i - 1)/v^t_i)^n`) and the matrix of
//! maximum dependency counts between classes. The general lemma asks for
//! per-class weights x in (0,1) with
//! `p_i <= x_i prod_j (1 - x_j)^D[i][j]`; no closed form exists, so the
//! smallest feasible n is located by bisection, with feasibility at fixed n
//! decided by a multi-start derivative-free search maximizing the minimum
//! log slack. The asymmetric lemma needs `p_i <= 1/8` and neighborhood sums
//! `sum_j D[i][j] p_j <= 1/4`; both are monotone in n, so plain bisection
//! suffices.

use std::path::Path;

use thiserror::Error;

use super::{ln_rate, n_prob_symmetric, BoundInputs, BoundReport, BoundsError};
use crate::hypergraph::{DependencyMatrix, EdgeClassPartition, Hypergraph};
use crate::parallel;

#[derive(Debug, Error)]
enum SystemShape {
    #[error("class ranks and dependency matrix disagree: {ranks} ranks, {dim}x{dim} matrix")]
    DimensionMismatch { ranks: usize, dim: usize },
    #[error("alphabet size v must be at least 2, got {v}")]
    BadAlphabet { v: u32 },
    #[error("class {class} has rank 0")]
    ZeroRank { class: usize },
}

/// Event classes for the classed local-lemma solvers: per-class rank, the
/// class-to-class dependency matrix, and the alphabet size.
#[derive(Debug, Clone, PartialEq)]
pub struct EventClassSystem {
    class_ranks: Vec<u32>,
    dep: DependencyMatrix,
    v: u32,
}

impl EventClassSystem {
    pub fn new(
        class_ranks: Vec<u32>,
        dep: DependencyMatrix,
        v: u32,
    ) -> Result<Self, BoundsError> {
        let shape = |e: SystemShape| BoundsError::BadParams(e.to_string());
        if class_ranks.len() != dep.dim() {
            return Err(shape(SystemShape::DimensionMismatch {
                ranks: class_ranks.len(),
                dim: dep.dim(),
            }));
        }
        if v < 2 {
            return Err(shape(SystemShape::BadAlphabet { v }));
        }
        if let Some(class) = class_ranks.iter().position(|&t| t == 0) {
            return Err(shape(SystemShape::ZeroRank { class }));
        }
        Ok(EventClassSystem {
            class_ranks,
            dep,
            v,
        })
    }

    /// Builds the system from a classed hypergraph.
    pub fn from_hypergraph(
        h: &Hypergraph,
        classes: &EdgeClassPartition,
        v: u32,
    ) -> Result<Self, BoundsError> {
        let dep = h.classify_edges(classes)?;
        let ranks = classes.class_ranks().iter().map(|&r| r as u32).collect();
        EventClassSystem::new(ranks, dep, v)
    }

    /// Same classes and dependency counts over a different alphabet.
    pub fn with_alphabet(&self, v: u32) -> Result<Self, BoundsError> {
        EventClassSystem::new(self.class_ranks.clone(), self.dep.clone(), v)
    }

    pub fn class_count(&self) -> usize {
        self.class_ranks.len()
    }

    pub fn class_ranks(&self) -> &[u32] {
        &self.class_ranks
    }

    pub fn dependency(&self) -> &DependencyMatrix {
        &self.dep
    }

    pub fn v(&self) -> u32 {
        self.v
    }

    /// `ln p_i(n)` where `p_i(n) = v^t_i ((v^t_i - 1)/v^t_i)^n`.
    pub fn ln_event_probability(&self, class: usize, n: f64) -> f64 {
        let t = self.class_ranks[class];
        f64::from(t) * f64::from(self.v).ln() - n * ln_rate(t, self.v)
    }

    /// Symmetric local-lemma bound for the system: worst rank and worst
    /// neighborhood size over the classes.
    pub fn n_symmetric(&self) -> BoundReport {
        let d = self.dep.max_row_total() as u64;
        let t = self.class_ranks.iter().copied().max().unwrap_or(1);
        n_prob_symmetric(d, t, self.v)
    }

    /// Parses the system text format: line 1 the alphabet size, line 2 the
    /// class ranks, then one dependency-matrix row per line.
    pub fn from_system_str(input: &str, path: &Path) -> Result<Self, BoundsError> {
        let parse_err = |line: usize, msg: String| BoundsError::Parse {
            path: path.display().to_string(),
            line,
            msg,
        };
        let mut v: Option<u32> = None;
        let mut ranks: Option<Vec<u32>> = None;
        let mut rows: Vec<Vec<usize>> = Vec::new();
        for (lineno, raw) in input.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            if v.is_none() {
                v = Some(
                    line.parse()
                        .map_err(|_| parse_err(lineno + 1, format!("bad alphabet size {line:?}")))?,
                );
            } else if ranks.is_none() {
                let parsed = line
                    .split_whitespace()
                    .map(|tok| {
                        tok.parse()
                            .map_err(|_| parse_err(lineno + 1, format!("bad rank {tok:?}")))
                    })
                    .collect::<Result<Vec<u32>, _>>()?;
                ranks = Some(parsed);
            } else {
                let parsed = line
                    .split_whitespace()
                    .map(|tok| {
                        tok.parse()
                            .map_err(|_| parse_err(lineno + 1, format!("bad count {tok:?}")))
                    })
                    .collect::<Result<Vec<usize>, _>>()?;
                rows.push(parsed);
            }
        }
        let v = v.ok_or_else(|| parse_err(1, "missing alphabet size".into()))?;
        let ranks = ranks.ok_or_else(|| parse_err(2, "missing class ranks".into()))?;
        if rows.len() != ranks.len() || rows.iter().any(|r| r.len() != ranks.len()) {
            return Err(parse_err(
                3,
                format!("dependency matrix must be {0}x{0}", ranks.len()),
            ));
        }
        EventClassSystem::new(ranks, DependencyMatrix::new(rows), v)
    }

    pub fn to_system_string(&self) -> String {
        let ranks: Vec<String> = self.class_ranks.iter().map(|t| t.to_string()).collect();
        format!("{}\n{}\n{}", self.v, ranks.join(" "), self.dep)
    }

    pub fn load_system(path: impl AsRef<Path>) -> Result<Self, BoundsError> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|source| BoundsError::Io {
            path: path.display().to_string(),
            source,
        })?;
        Self::from_system_str(&text, path)
    }

    pub fn write_system(&self, path: impl AsRef<Path>) -> Result<(), BoundsError> {
        let path = path.as_ref();
        std::fs::write(path, self.to_system_string()).map_err(|source| BoundsError::Io {
            path: path.display().to_string(),
            source,
        })
    }
}

const X_MIN: f64 = 1e-12;
const X_MAX: f64 = 1.0 - 1e-9;

/// Minimum log slack of the general-lemma system at weights `x`:
/// `min_i [ln x_i + sum_j D[i][j] ln(1 - x_j) - ln p_i(n)]`.
/// Nonnegative exactly when `x` witnesses feasibility at `n`.
fn margin(sys: &EventClassSystem, n: f64, x: &[f64]) -> f64 {
    let ln_one_minus: Vec<f64> = x.iter().map(|&xj| (-xj).ln_1p()).collect();
    let mut worst = f64::INFINITY;
    for (i, &xi) in x.iter().enumerate() {
        let mut rhs = xi.ln();
        for (j, &lom) in ln_one_minus.iter().enumerate() {
            let count = sys.dep.get(i, j);
            if count > 0 {
                rhs += count as f64 * lom;
            }
        }
        worst = worst.min(rhs - sys.ln_event_probability(i, n));
    }
    worst
}

/// General local-lemma feasibility check: does `x` witness
/// `p_i(n) <= x_i prod_j (1 - x_j)^D[i][j]` for every class?
pub fn lll_feasible_general(
    sys: &EventClassSystem,
    n: f64,
    x: &[f64],
) -> Result<bool, BoundsError> {
    if x.len() != sys.class_count() {
        return Err(BoundsError::BadParams(format!(
            "witness has {} entries for {} classes",
            x.len(),
            sys.class_count()
        )));
    }
    for (index, &value) in x.iter().enumerate() {
        if !(value > 0.0 && value < 1.0) {
            return Err(BoundsError::WitnessOutOfRange { index, value });
        }
    }
    Ok(margin(sys, n, x) >= 0.0)
}

/// Nelder-Mead maximizing the margin, clamped into (0,1)^c.
fn search_from(sys: &EventClassSystem, n: f64, start: &[f64], iterations: usize) -> (Vec<f64>, f64) {
    let c = start.len();
    let clamp = |x: &mut Vec<f64>| {
        for xi in x.iter_mut() {
            *xi = xi.clamp(X_MIN, X_MAX);
        }
    };
    let eval = |x: &Vec<f64>| -margin(sys, n, x);

    let mut simplex: Vec<Vec<f64>> = Vec::with_capacity(c + 1);
    let mut base = start.to_vec();
    clamp(&mut base);
    simplex.push(base.clone());
    for i in 0..c {
        let mut p = base.clone();
        p[i] = (p[i] * 1.6).clamp(X_MIN, X_MAX);
        if (p[i] - base[i]).abs() < 1e-12 {
            p[i] = (base[i] * 0.5).clamp(X_MIN, X_MAX);
        }
        simplex.push(p);
    }
    let mut values: Vec<f64> = simplex.iter().map(eval).collect();

    for _ in 0..iterations {
        let mut order: Vec<usize> = (0..simplex.len()).collect();
        order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
        let best = order[0];
        let worst = order[c];
        let second_worst = order[c - 1];
        if values[worst] - values[best] < 1e-13 {
            break;
        }
        let mut centroid = vec![0.0; c];
        for &i in order.iter().take(c) {
            for (cj, xj) in centroid.iter_mut().zip(&simplex[i]) {
                *cj += xj / c as f64;
            }
        }
        let blend = |a: f64, b: f64, t: f64| a + t * (b - a);
        let mut reflected: Vec<f64> = centroid
            .iter()
            .zip(&simplex[worst])
            .map(|(&cj, &wj)| blend(cj, wj, -1.0))
            .collect();
        clamp(&mut reflected);
        let f_reflected = eval(&reflected);
        if f_reflected < values[best] {
            let mut expanded: Vec<f64> = centroid
                .iter()
                .zip(&simplex[worst])
                .map(|(&cj, &wj)| blend(cj, wj, -2.0))
                .collect();
            clamp(&mut expanded);
            let f_expanded = eval(&expanded);
            if f_expanded < f_reflected {
                simplex[worst] = expanded;
                values[worst] = f_expanded;
            } else {
                simplex[worst] = reflected;
                values[worst] = f_reflected;
            }
        } else if f_reflected < values[second_worst] {
            simplex[worst] = reflected;
            values[worst] = f_reflected;
        } else {
            let mut contracted: Vec<f64> = centroid
                .iter()
                .zip(&simplex[worst])
                .map(|(&cj, &wj)| blend(cj, wj, 0.5))
                .collect();
            clamp(&mut contracted);
            let f_contracted = eval(&contracted);
            if f_contracted < values[worst] {
                simplex[worst] = contracted;
                values[worst] = f_contracted;
            } else {
                let best_point = simplex[best].clone();
                for i in 0..simplex.len() {
                    if i == best {
                        continue;
                    }
                    for (xj, &bj) in simplex[i].iter_mut().zip(&best_point) {
                        *xj = bj + 0.5 * (*xj - bj);
                    }
                    clamp(&mut simplex[i]);
                    values[i] = eval(&simplex[i]);
                }
            }
        }
    }

    let best = values
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.total_cmp(b.1))
        .map(|(i, _)| i)
        .unwrap_or(0);
    (simplex[best].clone(), -values[best])
}

/// Search configuration for [`n_general_lll`].
#[derive(Debug, Clone)]
pub struct GeneralLllOptions {
    /// Refuse to report any n above this; `None` searches up to the
    /// symmetric bound, which is always feasible.
    pub n_cap: Option<f64>,
    /// Bisection width at which the outer search stops, in rows.
    pub tolerance: f64,
    /// Lower bound on the number of multi-start grid points.
    pub min_starts: usize,
    /// Local-search iterations per start.
    pub search_iterations: usize,
}

impl Default for GeneralLllOptions {
    fn default() -> Self {
        GeneralLllOptions {
            n_cap: None,
            tolerance: 0.01,
            min_starts: 32,
            search_iterations: 400,
        }
    }
}

/// Outcome of the general-lemma search: the bound and the verifying weights.
#[derive(Debug, Clone)]
pub struct GeneralLllSolution {
    pub report: BoundReport,
    pub witness: Vec<f64>,
    /// Margin of the witness at the reported n (nonnegative).
    pub margin: f64,
}

/// Grid of start points: per-class values geometrically spaced in
/// (1e-6, 0.5), full cartesian product, plus the two symmetric-style seeds.
/// Systems with many classes get a capped deterministic spread instead of
/// the full product.
fn start_points(sys: &EventClassSystem, min_starts: usize) -> Vec<Vec<f64>> {
    const MAX_GRID: usize = 4096;
    let c = sys.class_count();
    let mut levels = 2usize;
    while levels.checked_pow(c as u32).is_some_and(|t| t < min_starts) {
        levels += 1;
    }
    if c == 1 {
        levels = min_starts.max(2);
    }
    let (lo, hi) = (1e-6f64.ln(), 0.5f64.ln());
    let grid: Vec<f64> = (0..levels)
        .map(|m| (lo + (hi - lo) * m as f64 / (levels - 1) as f64).exp())
        .collect();
    let mut starts = Vec::new();
    match levels.checked_pow(c as u32).filter(|&t| t <= MAX_GRID) {
        Some(total) => {
            for idx in 0..total {
                let mut x = vec![0.0; c];
                let mut rest = idx;
                for xi in x.iter_mut() {
                    *xi = grid[rest % levels];
                    rest /= levels;
                }
                starts.push(x);
            }
        }
        None => {
            // fixed 64-bit mixing sequence; same starts on every run
            let mut state = 0x9E37_79B9_7F4A_7C15u64;
            for _ in 0..MAX_GRID {
                let x = (0..c)
                    .map(|_| {
                        state = state
                            .wrapping_mul(6_364_136_223_846_793_005)
                            .wrapping_add(1_442_695_040_888_963_407);
                        grid[(state >> 33) as usize % levels]
                    })
                    .collect();
                starts.push(x);
            }
        }
    }
    let d_max = sys.dep.max_row_total();
    starts.push(vec![1.0 / (d_max + 1) as f64; c]);
    starts.push(
        (0..c)
            .map(|i| 1.0 / (sys.dep.row_total(i) + 1) as f64)
            .collect(),
    );
    starts
}

/// Best verified witness at fixed n over the full start set, or None when no
/// start reaches a nonnegative margin. The winner is the maximum margin with
/// ties broken by start index, so the result does not depend on scheduling.
fn best_witness(
    sys: &EventClassSystem,
    n: f64,
    starts: &[Vec<f64>],
    iterations: usize,
) -> Option<(Vec<f64>, f64)> {
    let results = parallel::map_indexed(starts.len(), |i| {
        search_from(sys, n, &starts[i], iterations)
    });
    let mut best: Option<(Vec<f64>, f64)> = None;
    for (x, m) in results {
        if best.as_ref().is_none_or(|(_, bm)| m > *bm) {
            best = Some((x, m));
        }
    }
    match best {
        Some((x, m)) if m >= 0.0 && matches!(lll_feasible_general(sys, n, &x), Ok(true)) => {
            Some((x, m))
        }
        _ => None,
    }
}

/// Smallest n (to the configured tolerance) at which some weight vector
/// makes the general local lemma feasible, located by bisection below the
/// symmetric bound.
pub fn n_general_lll(
    sys: &EventClassSystem,
    opts: &GeneralLllOptions,
) -> Result<GeneralLllSolution, BoundsError> {
    let starts = start_points(sys, opts.min_starts);
    let n_upper = match opts.n_cap {
        Some(cap) => cap,
        None => sys.n_symmetric().n_real,
    };
    let mut hi = n_upper;
    let mut witness = best_witness(sys, hi, &starts, opts.search_iterations)
        .ok_or(BoundsError::NoBoundUnderCap { cap: n_upper })?;
    let mut lo = 1.0f64.min(hi);
    while hi - lo > opts.tolerance {
        let mid = 0.5 * (lo + hi);
        match best_witness(sys, mid, &starts, opts.search_iterations) {
            Some(found) => {
                hi = mid;
                witness = found;
            }
            None => lo = mid,
        }
    }
    let inputs = BoundInputs::System {
        class_ranks: sys.class_ranks.clone(),
        v: sys.v,
    };
    Ok(GeneralLllSolution {
        report: BoundReport::new("n_general", hi, inputs),
        witness: witness.0,
        margin: witness.1,
    })
}

/// Smallest n at which the asymmetric local lemma applies: every class
/// probability at most 1/8 and every neighborhood probability sum at most
/// 1/4. Both families of constraints decrease monotonically in n, so the
/// threshold is found by doubling then bisection.
pub fn n_asymmetric_lll(sys: &EventClassSystem) -> BoundReport {
    let feasible = |n: f64| {
        let p: Vec<f64> = (0..sys.class_count())
            .map(|i| sys.ln_event_probability(i, n).exp())
            .collect();
        let events_ok = p.iter().all(|&pi| pi <= 0.125);
        let sums_ok = (0..sys.class_count()).all(|i| {
            let total: f64 = (0..sys.class_count())
                .map(|j| sys.dep.get(i, j) as f64 * p[j])
                .sum();
            total <= 0.25
        });
        events_ok && sums_ok
    };
    let mut hi = 1.0;
    while !feasible(hi) {
        hi *= 2.0;
        assert!(hi < 1e30, "asymmetric bound did not converge");
    }
    let mut lo = 0.0;
    for _ in 0..200 {
        if hi - lo <= 1e-9 * hi.max(1.0) {
            break;
        }
        let mid = 0.5 * (lo + hi);
        if feasible(mid) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    BoundReport::new(
        "n_asymmetric",
        hi,
        BoundInputs::System {
            class_ranks: sys.class_ranks.clone(),
            v: sys.v,
        },
    )
}
