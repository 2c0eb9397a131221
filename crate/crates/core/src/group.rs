//! Finite Abelian groups in explicit coordinates.
//!
//! A group is stored as an ordered product of cyclic prime-power factors
//! `Z/p_1^{e_1} x ... x Z/p_N^{e_N}`, sorted by prime and then by exponent.
//! Elements are coordinate vectors relative to the canonical basis, where the
//! i-th canonical basis element is the unit vector at index i. Coordinates are
//! always kept as canonical representatives in `[0, p_i^{e_i})`.

use std::cmp::Ordering;
use std::fmt;
use std::hash::{Hash, Hasher};
use std::ops::Range;
use std::sync::Arc;

use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_traits::{One, Zero};

use crate::arith;
use crate::error::{Error, Result};

/// One cyclic factor `Z/p^e`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PrimePower {
    prime: BigUint,
    exponent: u32,
    modulus: BigUint,
}

impl PrimePower {
    pub fn new(prime: BigUint, exponent: u32) -> Result<Self> {
        if exponent == 0 {
            return Err(Error::ZeroExponent);
        }
        if !arith::is_prime(&prime)? {
            return Err(Error::NotPrime(prime));
        }
        let modulus = arith::pow(&prime, exponent);
        Ok(PrimePower {
            prime,
            exponent,
            modulus,
        })
    }

    pub fn prime(&self) -> &BigUint {
        &self.prime
    }

    pub fn exponent(&self) -> u32 {
        self.exponent
    }

    /// `p^e`, the order of the factor.
    pub fn modulus(&self) -> &BigUint {
        &self.modulus
    }
}

impl PartialOrd for PrimePower {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for PrimePower {
    fn cmp(&self, other: &Self) -> Ordering {
        (&self.prime, self.exponent).cmp(&(&other.prime, other.exponent))
    }
}

impl fmt::Display for PrimePower {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}^{}", self.prime, self.exponent)
    }
}

/// The shape of `G = Z/p_1^{e_1} x ... x Z/p_N^{e_N}`.
///
/// Factors are sorted by `(p, e)`, so the factors sharing a prime form a
/// contiguous block: the coordinates of that block are the Sylow subgroup for
/// the prime.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct GroupStructure {
    factors: Vec<PrimePower>,
    blocks: Vec<Range<usize>>,
}

impl GroupStructure {
    /// Builds a structure from factors that are already in canonical order.
    pub fn new(factors: Vec<PrimePower>) -> Result<Arc<Self>> {
        if factors.is_empty() {
            return Err(Error::EmptyStructure);
        }
        if factors.windows(2).any(|w| w[0] > w[1]) {
            return Err(Error::UnsortedFactors);
        }
        let mut blocks = Vec::new();
        let mut start = 0;
        for i in 1..=factors.len() {
            if i == factors.len() || factors[i].prime != factors[start].prime {
                blocks.push(start..i);
                start = i;
            }
        }
        Ok(Arc::new(GroupStructure { factors, blocks }))
    }

    /// Sorts `factors` into canonical order. The returned permutation maps each
    /// input position to its index in the canonical structure.
    pub fn from_unsorted(factors: Vec<PrimePower>) -> Result<(Arc<Self>, Vec<usize>)> {
        let mut order: Vec<usize> = (0..factors.len()).collect();
        order.sort_by(|&a, &b| factors[a].cmp(&factors[b]));
        let mut permutation = vec![0; factors.len()];
        for (canonical, &original) in order.iter().enumerate() {
            permutation[original] = canonical;
        }
        let sorted = order.iter().map(|&i| factors[i].clone()).collect();
        Ok((Self::new(sorted)?, permutation))
    }

    /// Shorthand for small structures: `&[(2, 1), (2, 3), (2, 4)]` is
    /// `Z/2 x Z/8 x Z/16`.
    pub fn from_pairs(pairs: &[(u64, u32)]) -> Result<Arc<Self>> {
        let factors = pairs
            .iter()
            .map(|&(p, e)| PrimePower::new(BigUint::from(p), e))
            .collect::<Result<Vec<_>>>()?;
        Self::new(factors)
    }

    pub fn rank(&self) -> usize {
        self.factors.len()
    }

    pub fn factors(&self) -> &[PrimePower] {
        &self.factors
    }

    pub fn factor(&self, i: usize) -> &PrimePower {
        &self.factors[i]
    }

    pub fn modulus(&self, i: usize) -> &BigUint {
        &self.factors[i].modulus
    }

    /// Index ranges of the prime blocks, in ascending prime order.
    pub fn prime_blocks(&self) -> &[Range<usize>] {
        &self.blocks
    }

    /// Number of distinct primes.
    pub fn prime_count(&self) -> usize {
        self.blocks.len()
    }

    /// `|G|`.
    pub fn order(&self) -> BigUint {
        self.factors.iter().map(|f| &f.modulus).product()
    }

    /// The prime of a p-group, or `None` when several primes occur.
    pub fn single_prime(&self) -> Option<&BigUint> {
        (self.blocks.len() == 1).then(|| &self.factors[0].prime)
    }

    pub fn require_p_group(&self, p: &BigUint) -> Result<()> {
        match self.single_prime() {
            Some(q) if q == p => Ok(()),
            Some(_) => Err(Error::NotAPGroup(p.clone())),
            None => Err(Error::MixedPrimeGroup(self.prime_count())),
        }
    }

    pub fn max_exponent(&self) -> u32 {
        self.factors.iter().map(|f| f.exponent).max().unwrap_or(0)
    }

    pub fn max_prime(&self) -> &BigUint {
        &self.factors[self.factors.len() - 1].prime
    }

    /// The substructure made of the factors in `range`.
    pub fn slice(&self, range: Range<usize>) -> Result<Arc<Self>> {
        Self::new(self.factors[range].to_vec())
    }
}

impl fmt::Display for GroupStructure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, factor) in self.factors.iter().enumerate() {
            if i > 0 {
                f.write_str(" x ")?;
            }
            write!(f, "Z/{}", factor.modulus)?;
        }
        Ok(())
    }
}

fn same_group(a: &Arc<GroupStructure>, b: &Arc<GroupStructure>) -> bool {
    Arc::ptr_eq(a, b) || a == b
}

fn check_coords(group: &GroupStructure, coords: &[BigUint]) -> Result<()> {
    if coords.len() != group.rank() {
        return Err(Error::LengthMismatch {
            expected: group.rank(),
            found: coords.len(),
        });
    }
    for (i, c) in coords.iter().enumerate() {
        if c >= group.modulus(i) {
            return Err(Error::CoordinateOutOfRange {
                index: i,
                value: c.clone(),
                modulus: group.modulus(i).clone(),
            });
        }
    }
    Ok(())
}

fn vector_valuation(coords: &[BigUint], p: &BigUint) -> Valuation {
    coords
        .iter()
        .filter_map(|c| arith::padic_valuation(c, p))
        .min()
        .map_or(Valuation::Infinite, Valuation::Finite)
}

/// Group valuation: the largest `r` with `p^r` dividing every coordinate,
/// or infinity for the identity.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Valuation {
    Finite(u32),
    Infinite,
}

impl Valuation {
    pub fn is_infinite(self) -> bool {
        matches!(self, Valuation::Infinite)
    }

    pub fn finite(self) -> Option<u32> {
        match self {
            Valuation::Finite(v) => Some(v),
            Valuation::Infinite => None,
        }
    }
}

impl fmt::Display for Valuation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Valuation::Finite(v) => write!(f, "{v}"),
            Valuation::Infinite => f.write_str("inf"),
        }
    }
}

/// A group element in canonical coordinates.
#[derive(Debug, Clone)]
pub struct Element {
    group: Arc<GroupStructure>,
    coords: Vec<BigUint>,
}

impl PartialEq for Element {
    fn eq(&self, other: &Self) -> bool {
        self.coords == other.coords && same_group(&self.group, &other.group)
    }
}

impl Eq for Element {}

impl Hash for Element {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.coords.hash(state);
    }
}

impl Element {
    /// Builds an element from canonical coordinates; out-of-range coordinates
    /// are rejected.
    pub fn new(group: &Arc<GroupStructure>, coords: Vec<BigUint>) -> Result<Self> {
        check_coords(group, &coords)?;
        Ok(Element {
            group: Arc::clone(group),
            coords,
        })
    }

    /// Builds an element, reducing each coordinate modulo its factor.
    pub fn new_reduced(group: &Arc<GroupStructure>, coords: Vec<BigUint>) -> Result<Self> {
        if coords.len() != group.rank() {
            return Err(Error::LengthMismatch {
                expected: group.rank(),
                found: coords.len(),
            });
        }
        let coords = coords
            .into_iter()
            .enumerate()
            .map(|(i, c)| c % group.modulus(i))
            .collect();
        Ok(Element {
            group: Arc::clone(group),
            coords,
        })
    }

    pub fn from_u64s(group: &Arc<GroupStructure>, coords: &[u64]) -> Result<Self> {
        Self::new(group, coords.iter().map(|&c| BigUint::from(c)).collect())
    }

    pub fn identity(group: &Arc<GroupStructure>) -> Self {
        Element {
            group: Arc::clone(group),
            coords: vec![BigUint::zero(); group.rank()],
        }
    }

    /// The canonical basis element `Q_i`, produced on demand.
    pub fn unit(group: &Arc<GroupStructure>, i: usize) -> Self {
        let mut e = Self::identity(group);
        e.coords[i] = BigUint::one();
        e
    }

    /// All canonical basis elements `Q_1..Q_N`.
    pub fn canonical_basis(group: &Arc<GroupStructure>) -> Vec<Self> {
        (0..group.rank()).map(|i| Self::unit(group, i)).collect()
    }

    pub fn group(&self) -> &Arc<GroupStructure> {
        &self.group
    }

    pub fn coords(&self) -> &[BigUint] {
        &self.coords
    }

    pub fn into_coords(self) -> Vec<BigUint> {
        self.coords
    }

    pub fn is_identity(&self) -> bool {
        self.coords.iter().all(Zero::is_zero)
    }

    fn ensure_same_group(&self, other: &Element) -> Result<()> {
        if same_group(&self.group, &other.group) {
            Ok(())
        } else {
            Err(Error::StructureMismatch)
        }
    }

    pub fn add(&self, other: &Element) -> Result<Element> {
        self.ensure_same_group(other)?;
        let coords = self
            .coords
            .iter()
            .zip(&other.coords)
            .enumerate()
            .map(|(i, (a, b))| (a + b) % self.group.modulus(i))
            .collect();
        Ok(Element {
            group: Arc::clone(&self.group),
            coords,
        })
    }

    pub fn negate(&self) -> Element {
        let coords = self
            .coords
            .iter()
            .enumerate()
            .map(|(i, c)| {
                if c.is_zero() {
                    BigUint::zero()
                } else {
                    self.group.modulus(i) - c
                }
            })
            .collect();
        Element {
            group: Arc::clone(&self.group),
            coords,
        }
    }

    pub fn sub(&self, other: &Element) -> Result<Element> {
        self.add(&other.negate())
    }

    /// `n·a`, computed coordinate-wise.
    pub fn scalar_mul(&self, n: &BigUint) -> Element {
        let coords = self
            .coords
            .iter()
            .enumerate()
            .map(|(i, c)| (c * n) % self.group.modulus(i))
            .collect();
        Element {
            group: Arc::clone(&self.group),
            coords,
        }
    }

    /// `n·a` for signed `n`; negative multiples go through [`Element::negate`].
    pub fn scalar_mul_signed(&self, n: &BigInt) -> Element {
        let product = self.scalar_mul(n.magnitude());
        if n.sign() == Sign::Minus {
            product.negate()
        } else {
            product
        }
    }

    /// Smallest `n >= 1` with `n·a = 0`: the lcm of `p_i^{e_i} / gcd(p_i^{e_i}, a_i)`.
    pub fn order(&self) -> BigUint {
        self.coords
            .iter()
            .enumerate()
            .fold(BigUint::one(), |acc, (i, c)| {
                let m = self.group.modulus(i);
                acc.lcm(&(m / m.gcd(c)))
            })
    }

    /// The group valuation `ν_p`. Zero coordinates do not constrain it.
    pub fn valuation(&self, p: &BigUint) -> Result<Valuation> {
        self.group.require_p_group(p)?;
        Ok(vector_valuation(&self.coords, p))
    }

    pub fn is_primitive(&self, p: &BigUint) -> Result<bool> {
        Ok(self.valuation(p)? == Valuation::Finite(0))
    }

    /// Largest index whose coordinate is a unit modulo `p`.
    pub fn last_unit_index(&self, p: &BigUint) -> Option<usize> {
        self.coords.iter().rposition(|c| !(c % p).is_zero())
    }

    /// Whether `a` is part of some basis: it must be primitive, and its order
    /// must equal `p^{e_k}` for the largest index `k` with `p ∤ a_k`.
    pub fn can_extend_to_basis(&self, p: &BigUint) -> Result<bool> {
        self.group.require_p_group(p)?;
        if self.is_identity() {
            return Err(Error::IdentityElement);
        }
        let Some(k) = self.last_unit_index(p) else {
            return Ok(false);
        };
        Ok(self.order() == *self.group.modulus(k))
    }

    /// The basis `{Q_1, .., Q_{k-1}, a, Q_{k+1}, .., Q_N}` obtained by putting
    /// `a` in slot `k`. Fails when `a` does not satisfy
    /// [`Element::can_extend_to_basis`].
    pub fn extend_to_basis(&self, p: &BigUint) -> Result<Vec<Element>> {
        if !self.can_extend_to_basis(p)? {
            return Err(Error::PreconditionViolated(format!(
                "{self} cannot be extended to a basis"
            )));
        }
        let k = self
            .last_unit_index(p)
            .ok_or_else(|| Error::Internal("primitive element without unit".into()))?;
        let mut basis = Element::canonical_basis(&self.group);
        basis[k] = self.clone();
        Ok(basis)
    }

    /// Coordinates restricted to `range`, as an element of `sub`.
    pub fn restrict(&self, range: Range<usize>, sub: &Arc<GroupStructure>) -> Result<Element> {
        Element::new(sub, self.coords[range].to_vec())
    }
}

impl fmt::Display for Element {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("(")?;
        for (i, c) in self.coords.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{c}")?;
        }
        f.write_str(")")
    }
}

/// The multiplier vector `(m_1, .., m_N)` of a root extraction instance,
/// with `m_i` in `Z/p_i^{e_i}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Multipliers {
    inner: Element,
}

impl Multipliers {
    pub fn new(group: &Arc<GroupStructure>, coeffs: Vec<BigUint>) -> Result<Self> {
        Ok(Multipliers {
            inner: Element::new(group, coeffs)?,
        })
    }

    pub fn from_u64s(group: &Arc<GroupStructure>, coeffs: &[u64]) -> Result<Self> {
        Ok(Multipliers {
            inner: Element::from_u64s(group, coeffs)?,
        })
    }

    pub fn zero(group: &Arc<GroupStructure>) -> Self {
        Multipliers {
            inner: Element::identity(group),
        }
    }

    pub fn group(&self) -> &Arc<GroupStructure> {
        self.inner.group()
    }

    pub fn coeffs(&self) -> &[BigUint] {
        self.inner.coords()
    }

    pub fn is_zero(&self) -> bool {
        self.inner.is_identity()
    }

    /// `Σ m_i Q_i` over the canonical basis.
    pub fn to_element(&self) -> Element {
        self.inner.clone()
    }

    pub fn restrict(&self, range: Range<usize>, sub: &Arc<GroupStructure>) -> Result<Self> {
        Ok(Multipliers {
            inner: self.inner.restrict(range, sub)?,
        })
    }
}

impl fmt::Display for Multipliers {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for (i, c) in self.coeffs().iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, "]")
    }
}

/// One Sylow block of a split instance.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SylowBlock {
    pub prime: BigUint,
    /// Position of the block's factors in the full structure.
    pub range: Range<usize>,
    pub group: Arc<GroupStructure>,
    pub element: Element,
    pub multipliers: Multipliers,
}

/// Splits `(G, K, M)` into one instance per prime, in ascending prime order.
pub fn sylow_split(
    group: &Arc<GroupStructure>,
    element: &Element,
    multipliers: &Multipliers,
) -> Result<Vec<SylowBlock>> {
    if !same_group(group, element.group()) || !same_group(group, multipliers.group()) {
        return Err(Error::StructureMismatch);
    }
    group
        .prime_blocks()
        .iter()
        .map(|range| {
            let sub = if group.prime_count() == 1 {
                Arc::clone(group)
            } else {
                group.slice(range.clone())?
            };
            Ok(SylowBlock {
                prime: group.factor(range.start).prime().clone(),
                range: range.clone(),
                element: element.restrict(range.clone(), &sub)?,
                multipliers: multipliers.restrict(range.clone(), &sub)?,
                group: sub,
            })
        })
        .collect()
}
