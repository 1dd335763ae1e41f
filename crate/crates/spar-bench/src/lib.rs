//! Shared fixtures for the pipeline benchmarks.

use ndarray::{Array1, Array2};
use spar_core::simgen::example_one;
use spar_core::{generate, Dataset};

/// The compound-symmetry testbed at a given scale.
pub fn testbed(n: usize, p: usize, a: usize, seed: u64) -> (Dataset, Dataset) {
    let (setting, coef) = example_one(p, a);
    generate(&setting, &coef, n, 100, 10.0, 1.0, seed).expect("testbed generation")
}

/// Standardized design and response for primitive benchmarks.
pub fn standardized(n: usize, p: usize, a: usize, seed: u64) -> (Array2<f64>, Array1<f64>) {
    let (train, _) = testbed(n, p, a, seed);
    let (std_data, _) = spar_core::standardize(&train).expect("standardize");
    (std_data.x, std_data.y)
}
