#![allow(dead_code)]

use std::sync::Arc;

use rootex_core::{oracle, Element, EnumerationBudget, GroupStructure};

/// Groups of the exhaustive agreement grid.
pub const GRID: &[&[(u64, u32)]] = &[
    &[(2, 1), (2, 1)],
    &[(2, 2)],
    &[(2, 1), (2, 2)],
    &[(2, 3)],
    &[(2, 1), (2, 1), (2, 1)],
    &[(3, 2)],
    &[(3, 1), (3, 2)],
    &[(2, 1), (2, 3)],
    &[(2, 2), (2, 2)],
    &[(2, 1), (3, 1)],
    &[(2, 2), (3, 1)],
];

pub fn grid_groups() -> Vec<Arc<GroupStructure>> {
    GRID.iter()
        .map(|pairs| GroupStructure::from_pairs(pairs).unwrap())
        .collect()
}

pub fn all_elements(g: &Arc<GroupStructure>) -> Vec<Element> {
    oracle::enumerate_elements(g, &EnumerationBudget::default())
        .unwrap()
        .collect()
}

#[allow(unused_imports)]
pub use rootex_core::gen::{random_basis, random_element, random_multipliers, random_solvable};
