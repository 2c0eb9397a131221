//! Seedable random instances.
//!
//! Everything here takes the caller's RNG, so a seeded generator such as
//! `ChaCha8Rng` gives reproducible instances.

use std::sync::Arc;

use num_bigint::{BigUint, RandBigInt};
use num_traits::Zero;
use rand::seq::SliceRandom;
use rand::Rng;

use crate::arith;
use crate::error::Result;
use crate::extraction::{verify_basis, BasisCandidate, ExtractionProblem};
use crate::group::{Element, GroupStructure, Multipliers, PrimePower};

/// Chance that a generated multiplier is forced to zero.
pub const ZERO_MULTIPLIER_ODDS: (u32, u32) = (1, 4);

/// Shape limits for [`random_structure`].
#[derive(Debug, Clone)]
pub struct StructureShape {
    pub primes: Vec<u64>,
    pub max_rank: usize,
    pub max_exponent: u32,
    pub max_distinct_primes: usize,
}

impl Default for StructureShape {
    fn default() -> Self {
        Self {
            primes: vec![2, 3, 5, 7, 11],
            max_rank: 6,
            max_exponent: 5,
            max_distinct_primes: 3,
        }
    }
}

pub fn random_structure<R: Rng + ?Sized>(
    shape: &StructureShape,
    rng: &mut R,
) -> Result<Arc<GroupStructure>> {
    let distinct = rng.gen_range(1..=shape.max_distinct_primes.min(shape.primes.len()));
    let rank = rng.gen_range(distinct..=shape.max_rank.max(distinct));
    let primes: Vec<u64> = shape
        .primes
        .choose_multiple(rng, distinct)
        .copied()
        .collect();
    let mut factors = Vec::with_capacity(rank);
    for i in 0..rank {
        // every chosen prime appears at least once
        let p = if i < distinct {
            primes[i]
        } else {
            *primes.choose(rng).unwrap()
        };
        let e = rng.gen_range(1..=shape.max_exponent);
        factors.push(PrimePower::new(BigUint::from(p), e)?);
    }
    factors.sort();
    GroupStructure::new(factors)
}

pub fn random_element<R: Rng + ?Sized>(group: &Arc<GroupStructure>, rng: &mut R) -> Element {
    let coords = (0..group.rank())
        .map(|i| rng.gen_biguint_below(group.modulus(i)))
        .collect();
    Element::new(group, coords).expect("one reduced coordinate per slot")
}

/// Uniform multipliers, except that each slot is zero with probability
/// [`ZERO_MULTIPLIER_ODDS`].
pub fn random_multipliers<R: Rng + ?Sized>(
    group: &Arc<GroupStructure>,
    rng: &mut R,
) -> Multipliers {
    let (num, den) = ZERO_MULTIPLIER_ODDS;
    let coeffs = (0..group.rank())
        .map(|i| {
            if rng.gen_ratio(num, den) {
                BigUint::zero()
            } else {
                rng.gen_biguint_below(group.modulus(i))
            }
        })
        .collect();
    Multipliers::new(group, coeffs).expect("one reduced coefficient per slot")
}

/// A random basis, upper triangular inside each prime block: `P_i` has a
/// unit in slot `i` and random entries in the later slots of its block,
/// scaled by `p^(e_j - e_i)` so that `P_i` keeps the order of `Q_i`.
pub fn random_basis<R: Rng + ?Sized>(group: &Arc<GroupStructure>, rng: &mut R) -> BasisCandidate {
    loop {
        let mut rows = Vec::with_capacity(group.rank());
        for block in group.prime_blocks() {
            for i in block.clone() {
                let p = group.factor(i).prime();
                let e_i = group.factor(i).exponent();
                let mut coords = vec![BigUint::zero(); group.rank()];
                coords[i] = loop {
                    let u = rng.gen_biguint_below(group.modulus(i));
                    if !(&u % p).is_zero() {
                        break u;
                    }
                };
                for (j, c) in coords.iter_mut().enumerate().take(block.end).skip(i + 1) {
                    let scale = arith::pow(p, group.factor(j).exponent() - e_i);
                    *c = rng.gen_biguint_below(group.modulus(i)) * scale;
                }
                rows.push(Element::new_reduced(group, coords).expect("one coordinate per slot"));
            }
        }
        let cand = BasisCandidate::new(group, rows).expect("rows built over the group");
        if verify_basis(&cand) {
            return cand;
        }
    }
}

/// An instance solvable by construction, with the hidden basis used to build
/// it.
pub fn random_solvable<R: Rng + ?Sized>(
    group: &Arc<GroupStructure>,
    rng: &mut R,
) -> (ExtractionProblem, BasisCandidate) {
    let basis = random_basis(group, rng);
    let m = random_multipliers(group, rng);
    let k = basis.evaluate(&m).expect("multipliers over the group");
    let prob = ExtractionProblem::new(group, k, m).expect("parts over the group");
    (prob, basis)
}

/// `K` and the multipliers drawn independently and uniformly.
pub fn random_instance<R: Rng + ?Sized>(
    group: &Arc<GroupStructure>,
    rng: &mut R,
) -> ExtractionProblem {
    let k = random_element(group, rng);
    let coeffs = random_element(group, rng).into_coords();
    let m = Multipliers::new(group, coeffs).expect("one reduced coefficient per slot");
    ExtractionProblem::new(group, k, m).expect("parts over the group")
}
