//! Shared inputs for the benchmarks.

use qbar_core::{QPoly, Tower};

pub fn schedule(polys: &[&str]) -> Vec<QPoly> {
    polys.iter().map(|p| p.parse().expect("valid polynomial")).collect()
}

pub fn quadratic_tower() -> Tower {
    Tower::from_schedule(&schedule(&["x^2-2", "x^2-3", "x^2-5"])).expect("tower")
}

pub fn dihedral_tower() -> Tower {
    Tower::from_schedule(&schedule(&["x^2-2", "x^4-2", "x^2-3"])).expect("tower")
}
