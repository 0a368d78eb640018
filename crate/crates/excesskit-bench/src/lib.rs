//! Shared fixtures for the benchmark targets.

use excesskit_core::{DegreeVector, IdealSpec, VariableSet};

pub fn twisted_cubic() -> IdealSpec {
    let vars = VariableSet::new(vec!["x", "y", "z", "w"]).unwrap();
    IdealSpec::parse(&["z^2 - y*w", "y*z - x*w", "y^2 - x*z"], vars).unwrap()
}

pub fn initial_degeneration() -> IdealSpec {
    let vars = VariableSet::new(vec!["x", "y", "z", "w"]).unwrap();
    IdealSpec::parse(&["z^2", "y*z", "y^2"], vars).unwrap()
}

pub fn degrees(d: &[u32]) -> DegreeVector {
    DegreeVector::new(d.to_vec()).unwrap()
}
