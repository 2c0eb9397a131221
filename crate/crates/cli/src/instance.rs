//! The instance file format.
//!
//! ```json
//! {"factors": [{"p": "2", "e": 1}, {"p": "2", "e": 3}, {"p": "2", "e": 4}],
//!  "element": ["0", "2", "8"],
//!  "multipliers": ["0", "6", "4"],
//!  "claimed_basis": [["1", "0", "0"], ["0", "3", "6"], ["0", "0", "1"]]}
//! ```
//!
//! Integers are written as decimal strings so that values of any size
//! survive; plain JSON integers are accepted on input. An empty `element` or
//! `multipliers` list stands for the zero vector.

use std::sync::Arc;

use anyhow::{anyhow, bail, Context, Result};
use num_bigint::{BigInt, BigUint, Sign};
use num_traits::Zero;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use rootex_core::{
    BasisCandidate, Element, ExtractionProblem, GroupStructure, Multipliers, PrimePower,
};

/// An integer that reads from a JSON string or number and writes as a
/// decimal string.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Int(pub BigInt);

impl Serialize for Int {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.0.to_string())
    }
}

impl<'de> Deserialize<'de> for Int {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Text(String),
            Signed(i64),
            Unsigned(u64),
        }
        let text = match Raw::deserialize(d)? {
            Raw::Text(s) => s,
            Raw::Signed(n) => n.to_string(),
            Raw::Unsigned(n) => n.to_string(),
        };
        text.trim()
            .parse()
            .map(Int)
            .map_err(|_| serde::de::Error::custom(format!("not an integer: {text:?}")))
    }
}

impl From<&BigUint> for Int {
    fn from(n: &BigUint) -> Self {
        Int(BigInt::from(n.clone()))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FactorEntry {
    pub p: Int,
    pub e: u32,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InstanceFile {
    pub factors: Vec<FactorEntry>,
    #[serde(default)]
    pub element: Vec<Int>,
    #[serde(default)]
    pub multipliers: Vec<Int>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub claimed_basis: Option<Vec<Vec<Int>>>,
}

/// An instance checked and moved into canonical factor order.
#[derive(Debug, Clone)]
pub struct Instance {
    pub problem: ExtractionProblem,
    pub claimed_basis: Option<BasisCandidate>,
    /// `permutation[i]` is the canonical slot of the `i`-th factor as
    /// written in the file.
    pub permutation: Vec<usize>,
    pub warnings: Vec<String>,
}

impl Instance {
    pub fn group(&self) -> &Arc<GroupStructure> {
        self.problem.group()
    }

    pub fn is_reordered(&self) -> bool {
        self.permutation.iter().enumerate().any(|(i, &c)| i != c)
    }

    /// A canonical-order element as a coordinate row in the file's order.
    pub fn to_user_row(&self, e: &Element) -> Vec<Int> {
        self.permutation
            .iter()
            .map(|&c| Int::from(&e.coords()[c]))
            .collect()
    }

    /// A canonical basis as rows in the file's order: row `i` is the
    /// element for the file's `i`-th factor.
    pub fn to_user_basis(&self, basis: &BasisCandidate) -> Vec<Vec<Int>> {
        self.permutation
            .iter()
            .map(|&c| self.to_user_row(&basis.elements()[c]))
            .collect()
    }
}

impl InstanceFile {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).context("malformed instance file")
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("instances always serialize")
    }

    /// Builds an instance file for a canonical-order problem.
    pub fn from_problem(prob: &ExtractionProblem, claimed: Option<&BasisCandidate>) -> Self {
        let row = |e: &Element| e.coords().iter().map(Int::from).collect::<Vec<_>>();
        InstanceFile {
            factors: prob
                .group()
                .factors()
                .iter()
                .map(|f| FactorEntry {
                    p: Int::from(f.prime()),
                    e: f.exponent(),
                })
                .collect(),
            element: row(prob.element()),
            multipliers: row(&prob.multipliers().to_element()),
            claimed_basis: claimed.map(|b| b.elements().iter().map(row).collect()),
        }
    }

    /// Validates the file, reduces coordinates into range and sorts the
    /// factors into canonical order.
    pub fn normalize(&self) -> Result<Instance> {
        let n = self.factors.len();
        if n == 0 {
            bail!("no factors given");
        }
        let factors = self
            .factors
            .iter()
            .enumerate()
            .map(|(i, f)| {
                let p =
                    f.p.0
                        .to_biguint()
                        .ok_or_else(|| anyhow!("factor {}: negative prime {}", i + 1, f.p.0))?;
                PrimePower::new(p, f.e).with_context(|| format!("factor {}", i + 1))
            })
            .collect::<Result<Vec<_>>>()?;
        let moduli: Vec<BigUint> = factors.iter().map(|f| f.modulus().clone()).collect();
        let (group, permutation) = GroupStructure::from_unsorted(factors)?;

        let mut warnings = Vec::new();
        let mut canonical = |what: &str, values: &[Int]| -> Result<Vec<BigUint>> {
            if values.is_empty() {
                return Ok(vec![BigUint::zero(); n]);
            }
            if values.len() != n {
                bail!("{what} has {} entries, expected {n}", values.len());
            }
            let mut out = vec![BigUint::zero(); n];
            for (i, v) in values.iter().enumerate() {
                let reduced = reduce_mod(&v.0, &moduli[i]);
                if v.0.sign() == Sign::Minus || v.0.magnitude() >= &moduli[i] {
                    warnings.push(format!(
                        "{what}[{}] = {} reduced to {reduced} modulo {}",
                        i + 1,
                        v.0,
                        moduli[i]
                    ));
                }
                out[permutation[i]] = reduced;
            }
            Ok(out)
        };

        let element = canonical("element", &self.element)?;
        let multipliers = canonical("multipliers", &self.multipliers)?;
        let claimed = match &self.claimed_basis {
            None => None,
            Some(rows) => {
                if rows.len() != n {
                    bail!("claimed_basis has {} rows, expected {n}", rows.len());
                }
                let mut slots = vec![Vec::new(); n];
                for (i, row) in rows.iter().enumerate() {
                    if row.is_empty() {
                        bail!("claimed_basis row {} is empty", i + 1);
                    }
                    slots[permutation[i]] = canonical(&format!("claimed_basis[{}]", i + 1), row)?;
                }
                Some(slots)
            }
        };

        let problem = ExtractionProblem::new(
            &group,
            Element::new(&group, element)?,
            Multipliers::new(&group, multipliers)?,
        )?;
        let claimed_basis = claimed
            .map(|rows| {
                let elements = rows
                    .into_iter()
                    .map(|r| Element::new(&group, r))
                    .collect::<rootex_core::Result<Vec<_>>>()?;
                BasisCandidate::new(&group, elements)
            })
            .transpose()?;
        Ok(Instance {
            problem,
            claimed_basis,
            permutation,
            warnings,
        })
    }
}

fn reduce_mod(v: &BigInt, m: &BigUint) -> BigUint {
    let m = BigInt::from(m.clone());
    let r = ((v % &m) + &m) % &m;
    r.to_biguint().expect("non-negative after reduction")
}
