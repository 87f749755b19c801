//! Random generators shared by unit tests.

use rand::Rng;

use crate::clifford::{CliffordNum, Paravector};
use crate::module::{CliffordOperator, ModuleVector};

pub fn random_clifford<R: Rng>(rng: &mut R, n: usize) -> CliffordNum {
    let coeffs = (0..1 << n).map(|_| rng.gen_range(-1.0..1.0)).collect();
    CliffordNum::from_coeffs(n, coeffs).unwrap()
}

pub fn random_paravector<R: Rng>(rng: &mut R, n: usize) -> Paravector {
    Paravector::new(rng.gen_range(-1.0..1.0), (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect()).unwrap()
}

pub fn random_vector<R: Rng>(rng: &mut R, n: usize, m: usize) -> ModuleVector {
    ModuleVector::new((0..m).map(|_| random_clifford(rng, n)).collect()).unwrap()
}

pub fn random_operator<R: Rng>(rng: &mut R, n: usize, m: usize) -> CliffordOperator {
    CliffordOperator::new(n, m, (0..m * m).map(|_| random_clifford(rng, n)).collect()).unwrap()
}
