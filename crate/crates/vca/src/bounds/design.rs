//! Dependency-degree bounds for hypergraphs that are combinatorial designs.
//!
//! For an s-(k, t, lambda) design the number of blocks meeting a fixed block
//! follows from inclusion-exclusion over the subsets of the block. Up to
//! subset size s the count is determined by the parameters alone; truncating
//! the alternating sum after a positive term yields an upper bound, and for
//! s = t - 1 with no repeated blocks the full sum is exact. Everything is
//! evaluated in exact rational arithmetic so the polynomial forms match
//! symbolic evaluation.

use num_bigint::BigInt;
pub use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::{ln_rate, BoundInputs, BoundReport, BoundsError};
use crate::generators::DesignBlocks;

/// Parameters of an s-(k, t, lambda) design.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DesignParams {
    pub s: usize,
    pub k: usize,
    pub t: usize,
    pub lambda: usize,
}

impl DesignParams {
    pub fn check(&self) -> Result<(), BoundsError> {
        if !(1 <= self.s && self.s <= self.t && self.t <= self.k) {
            return Err(BoundsError::BadParams(format!(
                "need 1 <= s <= t <= k, got s = {}, t = {}, k = {}",
                self.s, self.t, self.k
            )));
        }
        if self.lambda < 1 {
            return Err(BoundsError::BadParams("lambda must be at least 1".into()));
        }
        Ok(())
    }

    /// Block count `lambda * C(k, s) / C(t, s)` as an exact rational.
    pub fn block_count(&self) -> BigRational {
        BigRational::from_integer(BigInt::from(self.lambda)) * ratio(self.k, self.t, self.s, self.s)
    }
}

fn binomial(n: usize, r: usize) -> BigInt {
    if r > n {
        return BigInt::zero();
    }
    let r = r.min(n - r);
    let mut acc = BigInt::one();
    for i in 0..r {
        acc = acc * BigInt::from(n - i) / BigInt::from(i + 1);
    }
    acc
}

/// `C(n1, r1) / C(n2, r2)` exactly.
fn ratio(n1: usize, n2: usize, r1: usize, r2: usize) -> BigRational {
    BigRational::new(binomial(n1, r1), binomial(n2, r2))
}

pub fn rational_to_f64(x: &BigRational) -> f64 {
    x.to_f64().expect("rational fits in f64")
}

/// Upper bound (exact when `exact` is set) on the number of blocks meeting a
/// fixed block of an s-(k, t, lambda) design.
#[derive(Debug, Clone, PartialEq)]
pub struct DesignDegreeBound {
    /// The bound on d as an exact rational (integral for admissible
    /// parameters).
    pub d: BigRational,
    /// Set when s = t - 1: the inclusion-exclusion sum is then fully
    /// determined by the parameters, so the value is the true degree for
    /// designs without repeated blocks.
    pub exact: bool,
}

impl DesignDegreeBound {
    pub fn d_f64(&self) -> f64 {
        self.d.to_f64().expect("degree bound fits in f64")
    }

    /// `d + 1`, the argument of the logarithm in the probabilistic bound.
    pub fn ln_argument(&self) -> BigRational {
        &self.d + BigRational::one()
    }
}

/// Inclusion-exclusion bound on the dependency degree of a design.
///
/// The alternating sum runs over subset sizes `i` of a fixed block, each
/// contributing `(-1)^(i+1) C(t, i) (lambda C(k-i, s-i)/C(t-i, s-i) - 1)`.
/// For s = t - 1 the full sum to s is exact; otherwise it stops at the
/// largest odd index no larger than s, which ends on a positive term and so
/// bounds the degree from above.
pub fn design_dependency_bound(p: &DesignParams) -> Result<DesignDegreeBound, BoundsError> {
    p.check()?;
    let exact = p.s == p.t - 1;
    let upper = if exact { p.s } else { 2 * ((p.s - 1) / 2) + 1 };
    let lambda = BigRational::from_integer(BigInt::from(p.lambda));
    let mut sum = BigRational::zero();
    for i in 1..=upper {
        let lambda_u = &lambda * ratio(p.k - i, p.t - i, p.s - i, p.s - i);
        let term = BigRational::from_integer(binomial(p.t, i)) * (lambda_u - BigRational::one());
        if i % 2 == 1 {
            sum += term;
        } else {
            sum -= term;
        }
    }
    Ok(DesignDegreeBound { d: sum, exact })
}

/// Maximum, over blocks, of the number of other blocks sharing a point;
/// computed directly from the block list (repeated blocks allowed).
pub fn design_dependency_exact(design: &DesignBlocks) -> usize {
    let mut incidence: Vec<Vec<usize>> = vec![Vec::new(); design.params.k];
    for (i, block) in design.blocks.iter().enumerate() {
        for &p in block {
            incidence[p].push(i);
        }
    }
    let mut worst = 0;
    let mut stamp = vec![usize::MAX; design.blocks.len()];
    for (i, block) in design.blocks.iter().enumerate() {
        let mut meets = 0;
        for &p in block {
            for &j in &incidence[p] {
                if j != i && stamp[j] != i {
                    stamp[j] = i;
                    meets += 1;
                }
            }
        }
        worst = worst.max(meets);
    }
    worst
}

/// Probabilistic bound for a design: the symmetric local lemma with the
/// inclusion-exclusion degree bound substituted for d.
pub fn n_prob_design(p: &DesignParams, v: u32) -> Result<BoundReport, BoundsError> {
    let bound = design_dependency_bound(p)?;
    let arg = bound.ln_argument();
    if !arg.is_positive() {
        return Err(BoundsError::BadParams(format!(
            "degree bound {} gives a nonpositive log argument",
            bound.d
        )));
    }
    let t = p.t as u32;
    let numer = arg.to_f64().expect("ln argument fits in f64").ln()
        + f64::from(t) * f64::from(v).ln()
        + 1.0;
    Ok(BoundReport::new(
        "n_prob_design",
        numer / ln_rate(t, v),
        BoundInputs::Symmetric {
            d: bound.d_f64().round() as u64,
            t,
            v,
        },
    ))
}

/// Density bound for a design: `n_dens` with the block count as edge count.
pub fn n_dens_design(p: &DesignParams, v: u32, blocks: u64) -> Result<BoundReport, BoundsError> {
    p.check()?;
    Ok(super::n_dens(blocks, p.t as u32, v))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators::{steiner_triple_system, DesignBlocks};

    fn rational(num: i64, den: i64) -> BigRational {
        BigRational::new(BigInt::from(num), BigInt::from(den))
    }

    #[test]
    fn sts_degree_bound_is_exact_linear_form() {
        // 2-(k,3,1): d + 1 = (3/2)k - 7/2
        for k in [7usize, 9, 13, 25, 99] {
            let p = DesignParams { s: 2, k, t: 3, lambda: 1 };
            let bound = design_dependency_bound(&p).unwrap();
            assert!(bound.exact);
            assert_eq!(
                bound.ln_argument(),
                rational(3 * k as i64 - 7, 2),
                "k = {k}"
            );
        }
        let fano = design_dependency_bound(&DesignParams { s: 2, k: 7, t: 3, lambda: 1 }).unwrap();
        assert_eq!(fano.d, rational(6, 1));
    }

    #[test]
    fn quadruple_system_degree_matches_direct_count() {
        // the 3-(8,4,1) design: 4-subsets of Z_2^3 with zero XOR; every block
        // meets all others except its complement, so d = 12
        let mut blocks = Vec::new();
        for a in 0u8..8 {
            for b in a + 1..8 {
                for c in b + 1..8 {
                    let d = a ^ b ^ c;
                    if d > c {
                        blocks.push(vec![a as usize, b as usize, c as usize, d as usize]);
                    }
                }
            }
        }
        assert_eq!(blocks.len(), 14);
        let design = DesignBlocks {
            params: DesignParams { s: 3, k: 8, t: 4, lambda: 1 },
            blocks,
        };
        design.validate().unwrap();
        assert_eq!(design_dependency_exact(&design), 12);
        let bound = design_dependency_bound(&design.params).unwrap();
        assert!(bound.exact);
        assert_eq!(bound.d, rational(12, 1));
    }

    #[test]
    fn quintuple_and_sextuple_system_polynomials() {
        // 4-(k,5,1): d + 1 = (5/24)k^3 - (35/12)k^2 + (125/8)k - 121/4.
        // In the 4-(11,5,1) design any two of the 66 blocks share a point
        // (two disjoint 5-sets would need 10 of 11 points and the derived
        // counts forbid it), so d = 65.
        let p = DesignParams { s: 4, k: 11, t: 5, lambda: 1 };
        let bound = design_dependency_bound(&p).unwrap();
        assert!(bound.exact);
        assert_eq!(bound.d, rational(65, 1));
        // 5-(12,6,1): every block is disjoint from exactly one other (its
        // complement), so d = 132 - 2 = 130.
        let p = DesignParams { s: 5, k: 12, t: 6, lambda: 1 };
        let bound = design_dependency_bound(&p).unwrap();
        assert!(bound.exact);
        assert_eq!(bound.d, rational(130, 1));
    }

    #[test]
    fn repeated_lambda_design_uses_the_full_exact_sum() {
        // all four triples of a 4-set form a 2-(4,3,2) design; each block
        // meets the other three, and with lambda > 1 the final term of the
        // exact sum is nonzero (truncation alone would give 6, not 3)
        let blocks = vec![vec![0, 1, 2], vec![0, 1, 3], vec![0, 2, 3], vec![1, 2, 3]];
        let design = DesignBlocks {
            params: DesignParams { s: 2, k: 4, t: 3, lambda: 2 },
            blocks,
        };
        design.validate().unwrap();
        assert_eq!(design_dependency_exact(&design), 3);
        let bound = design_dependency_bound(&design.params).unwrap();
        assert!(bound.exact);
        assert_eq!(bound.d, rational(3, 1));
    }

    #[test]
    fn exact_degree_matches_formula_on_sts_instances() {
        for k in [7usize, 9, 13, 15, 19, 21] {
            let design = steiner_triple_system(k).unwrap();
            let formula = design_dependency_bound(&design.params).unwrap();
            let direct = design_dependency_exact(&design);
            assert_eq!(
                BigRational::from_integer(BigInt::from(direct)),
                formula.d,
                "k = {k}"
            );
        }
    }

    #[test]
    fn degenerate_disjoint_blocks_have_degree_zero() {
        let design = DesignBlocks {
            params: DesignParams { s: 1, k: 6, t: 3, lambda: 1 },
            blocks: vec![vec![0, 1, 2], vec![3, 4, 5]],
        };
        assert_eq!(design_dependency_exact(&design), 0);
    }

    #[test]
    fn design_bounds_for_fano() {
        let p = DesignParams { s: 2, k: 7, t: 3, lambda: 1 };
        let prob = n_prob_design(&p, 2).unwrap();
        let expected = (7f64.ln() + 3.0 * 2f64.ln() + 1.0) / (8f64 / 7.0).ln();
        assert!((prob.n_real - expected).abs() < 1e-9);
        assert!((prob.n_real - 37.63).abs() < 0.01, "got {}", prob.n_real);
        assert_eq!(prob.n_int, 38);
        let b = p.block_count();
        assert_eq!(b, BigRational::from_integer(BigInt::from(7)));
        let dens = n_dens_design(&p, 2, 7).unwrap();
        let expected_dens = (7f64.ln() + 3.0 * 2f64.ln()) / (8f64 / 7.0).ln();
        assert!((dens.n_real - expected_dens).abs() < 1e-9);
        assert!((dens.n_real - 30.15).abs() < 0.01, "got {}", dens.n_real);
    }

    #[test]
    fn bad_params_rejected() {
        assert!(design_dependency_bound(&DesignParams { s: 4, k: 7, t: 3, lambda: 1 }).is_err());
        assert!(design_dependency_bound(&DesignParams { s: 1, k: 7, t: 3, lambda: 0 }).is_err());
    }
}
