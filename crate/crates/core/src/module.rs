//! The Clifford module `V = R^m ⊗ R_n`, right-linear operators given as
//! Clifford matrices acting from the left, and their real representation.
//!
//! Flattening order is module index major, basis mask minor: coefficient
//! `v_{i,A}` sits at position `i * 2^n + A`.

use nalgebra::{DMatrix, DVector};

use crate::clifford::{basis_product_sign, CliffordNum, Paravector};
use crate::error::{Error, Result};
use crate::linalg;

/// A vector of the Clifford module.
#[derive(Debug, Clone, PartialEq)]
pub struct ModuleVector {
    n: usize,
    entries: Vec<CliffordNum>,
}

impl ModuleVector {
    pub fn new(entries: Vec<CliffordNum>) -> Result<Self> {
        let n = entries
            .first()
            .map(|e| e.n())
            .ok_or_else(|| Error::Argument("module vector needs at least one entry".into()))?;
        if let Some((i, e)) = entries.iter().enumerate().find(|(_, e)| e.n() != n) {
            return Err(Error::Dimension(format!("entry {i} lives in R_{} instead of R_{n}", e.n())));
        }
        Ok(ModuleVector { n, entries })
    }

    pub fn zeros(n: usize, m: usize) -> Self {
        ModuleVector { n, entries: vec![CliffordNum::zero(n); m] }
    }

    pub fn from_flat(n: usize, m: usize, flat: &[f64]) -> Result<Self> {
        let d = 1 << n;
        if flat.len() != m * d {
            return Err(Error::Dimension(format!("expected {} coefficients, got {}", m * d, flat.len())));
        }
        let entries = flat
            .chunks(d)
            .map(|c| CliffordNum::from_coeffs(n, c.to_vec()))
            .collect::<Result<Vec<_>>>()?;
        Ok(ModuleVector { n, entries })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.entries.len()
    }

    pub fn entries(&self) -> &[CliffordNum] {
        &self.entries
    }

    pub fn flatten(&self) -> DVector<f64> {
        DVector::from_iterator(
            self.m() << self.n,
            self.entries.iter().flat_map(|e| e.coeffs().iter().cloned()),
        )
    }

    pub fn norm(&self) -> f64 {
        self.entries.iter().map(|e| e.abs_squared()).sum::<f64>().sqrt()
    }

    fn check_same_shape(&self, other: &ModuleVector) -> Result<()> {
        if self.n != other.n || self.m() != other.m() {
            return Err(Error::Dimension(format!(
                "vectors of shape (n={}, m={}) and (n={}, m={})",
                self.n,
                self.m(),
                other.n,
                other.m()
            )));
        }
        Ok(())
    }

    /// The module inner product `sum_i conj(v_i) w_i`, which equals
    /// `sum_{A,B} <v_A, w_B> conj(e_A) e_B`.
    pub fn inner(&self, w: &ModuleVector) -> Result<CliffordNum> {
        self.check_same_shape(w)?;
        let mut acc = CliffordNum::zero(self.n);
        for (a, b) in self.entries.iter().zip(&w.entries) {
            acc = &acc + &(&a.conjugate() * b);
        }
        Ok(acc)
    }

    pub fn left_mul(&self, s: &CliffordNum) -> Result<ModuleVector> {
        if s.n() != self.n {
            return Err(Error::Dimension("scalar and vector live over different algebras".into()));
        }
        Ok(ModuleVector { n: self.n, entries: self.entries.iter().map(|e| s * e).collect() })
    }

    pub fn right_mul(&self, s: &CliffordNum) -> Result<ModuleVector> {
        if s.n() != self.n {
            return Err(Error::Dimension("scalar and vector live over different algebras".into()));
        }
        Ok(ModuleVector { n: self.n, entries: self.entries.iter().map(|e| e * s).collect() })
    }

    pub fn sub(&self, other: &ModuleVector) -> Result<ModuleVector> {
        self.check_same_shape(other)?;
        Ok(ModuleVector {
            n: self.n,
            entries: self.entries.iter().zip(&other.entries).map(|(a, b)| a - b).collect(),
        })
    }

    pub fn add(&self, other: &ModuleVector) -> Result<ModuleVector> {
        self.check_same_shape(other)?;
        Ok(ModuleVector {
            n: self.n,
            entries: self.entries.iter().zip(&other.entries).map(|(a, b)| a + b).collect(),
        })
    }
}

/// Matrix of `x -> c x` on the coefficient vector of `R_n`.
pub fn left_mul_matrix(c: &CliffordNum) -> DMatrix<f64> {
    let d = c.coeffs().len();
    let mut l = DMatrix::zeros(d, d);
    for col in 0..d {
        for (a, &ca) in c.coeffs().iter().enumerate() {
            if ca != 0.0 {
                l[(a ^ col, col)] += basis_product_sign(a as u32, col as u32) * ca;
            }
        }
    }
    l
}

/// Left multiplication by `c` on every module component, `L(c) ⊗ I_m`.
pub fn scalar_action_matrix(c: &CliffordNum, m: usize) -> DMatrix<f64> {
    let l = left_mul_matrix(c);
    let d = l.nrows();
    let mut out = DMatrix::zeros(m * d, m * d);
    for i in 0..m {
        out.view_mut((i * d, i * d), (d, d)).copy_from(&l);
    }
    out
}

/// A right-linear operator `(Tv)_i = sum_j T_ij v_j` with Clifford entries.
#[derive(Debug, Clone, PartialEq)]
pub struct CliffordOperator {
    n: usize,
    m: usize,
    /// Row-major `m x m`.
    entries: Vec<CliffordNum>,
}

impl CliffordOperator {
    pub fn new(n: usize, m: usize, entries: Vec<CliffordNum>) -> Result<Self> {
        if m == 0 {
            return Err(Error::Argument("operator dimension must be positive".into()));
        }
        if entries.len() != m * m {
            return Err(Error::Dimension(format!("{m}x{m} operator needs {} entries, got {}", m * m, entries.len())));
        }
        if let Some((k, e)) = entries.iter().enumerate().find(|(_, e)| e.n() != n) {
            return Err(Error::Dimension(format!(
                "entry ({}, {}) lives in R_{} instead of R_{n}",
                k / m,
                k % m,
                e.n()
            )));
        }
        Ok(CliffordOperator { n, m, entries })
    }

    pub fn identity(n: usize, m: usize) -> Self {
        Self::diagonal(n, &vec![1.0; m])
    }

    pub fn zero(n: usize, m: usize) -> Self {
        CliffordOperator { n, m, entries: vec![CliffordNum::zero(n); m * m] }
    }

    pub fn diagonal(n: usize, diag: &[f64]) -> Self {
        let m = diag.len();
        let mut op = Self::zero(n, m);
        for (i, &d) in diag.iter().enumerate() {
            op.entries[i * m + i] = CliffordNum::scalar(n, d);
        }
        op
    }

    /// Embeds a real `m x m` matrix.
    pub fn from_real_matrix(n: usize, a: &DMatrix<f64>) -> Result<Self> {
        if !a.is_square() {
            return Err(Error::Dimension("operator matrix must be square".into()));
        }
        let m = a.nrows();
        let mut op = Self::zero(n, m);
        for i in 0..m {
            for j in 0..m {
                op.entries[i * m + j] = CliffordNum::scalar(n, a[(i, j)]);
            }
        }
        Ok(op)
    }

    /// `c · Id_m`.
    pub fn scalar_identity(c: &CliffordNum, m: usize) -> Self {
        let n = c.n();
        let mut op = Self::zero(n, m);
        for i in 0..m {
            op.entries[i * m + i] = c.clone();
        }
        op
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.m
    }

    /// Size of the real representation, `m * 2^n`.
    pub fn real_dim(&self) -> usize {
        self.m << self.n
    }

    pub fn entry(&self, i: usize, j: usize) -> &CliffordNum {
        &self.entries[i * self.m + j]
    }

    pub fn entries(&self) -> &[CliffordNum] {
        &self.entries
    }

    /// True when every entry is a real scalar.
    pub fn is_real(&self) -> bool {
        self.entries.iter().all(|e| e.coeffs()[1..].iter().all(|&c| c == 0.0))
    }

    pub fn apply(&self, v: &ModuleVector) -> Result<ModuleVector> {
        if v.n() != self.n || v.m() != self.m {
            return Err(Error::Dimension(format!(
                "operator of shape (n={}, m={}) applied to vector of shape (n={}, m={})",
                self.n,
                self.m,
                v.n(),
                v.m()
            )));
        }
        let entries = (0..self.m)
            .map(|i| {
                (0..self.m).fold(CliffordNum::zero(self.n), |acc, j| {
                    &acc + &(self.entry(i, j) * &v.entries()[j])
                })
            })
            .collect();
        Ok(ModuleVector { n: self.n, entries })
    }

    /// The real matrix `rho(T)` acting on flattened coefficient vectors.
    pub fn real_rep(&self) -> DMatrix<f64> {
        let d = 1 << self.n;
        let mut r = DMatrix::zeros(self.m * d, self.m * d);
        for i in 0..self.m {
            for j in 0..self.m {
                let block = left_mul_matrix(self.entry(i, j));
                r.view_mut((i * d, j * d), (d, d)).copy_from(&block);
            }
        }
        r
    }

    /// Reads a Clifford matrix back from a real matrix that commutes with
    /// right multiplication. Block `(i, j)` is `L(c)`, so `c = L(c) e_∅` is
    /// its first column.
    pub fn from_real_rep(n: usize, m: usize, r: &DMatrix<f64>) -> Result<Self> {
        let d = 1 << n;
        if r.nrows() != m * d || r.ncols() != m * d {
            return Err(Error::Dimension(format!(
                "real representation must be {0}x{0}, got {1}x{2}",
                m * d,
                r.nrows(),
                r.ncols()
            )));
        }
        let mut entries = Vec::with_capacity(m * m);
        for i in 0..m {
            for j in 0..m {
                let coeffs = (0..d).map(|a| r[(i * d + a, j * d)]).collect();
                entries.push(CliffordNum::from_coeffs(n, coeffs)?);
            }
        }
        Ok(CliffordOperator { n, m, entries })
    }

    /// Bar-transpose: `(T*)_ij = conj(T_ji)`.
    pub fn adjoint(&self) -> Self {
        let m = self.m;
        let entries = (0..m * m).map(|k| self.entry(k % m, k / m).conjugate()).collect();
        CliffordOperator { n: self.n, m, entries }
    }

    pub fn compose(&self, other: &CliffordOperator) -> Result<Self> {
        self.check_same_shape(other)?;
        let m = self.m;
        let entries = (0..m * m)
            .map(|k| {
                let (i, j) = (k / m, k % m);
                (0..m).fold(CliffordNum::zero(self.n), |acc, l| &acc + &(self.entry(i, l) * other.entry(l, j)))
            })
            .collect();
        Ok(CliffordOperator { n: self.n, m, entries })
    }

    pub fn add(&self, other: &CliffordOperator) -> Result<Self> {
        self.check_same_shape(other)?;
        let entries = self.entries.iter().zip(&other.entries).map(|(a, b)| a + b).collect();
        Ok(CliffordOperator { n: self.n, m: self.m, entries })
    }

    pub fn sub(&self, other: &CliffordOperator) -> Result<Self> {
        self.check_same_shape(other)?;
        let entries = self.entries.iter().zip(&other.entries).map(|(a, b)| a - b).collect();
        Ok(CliffordOperator { n: self.n, m: self.m, entries })
    }

    pub fn scale(&self, t: f64) -> Self {
        CliffordOperator { n: self.n, m: self.m, entries: self.entries.iter().map(|e| e.scale(t)).collect() }
    }

    /// Composition with left scalar multiplication, `v -> T(c v)`.
    pub fn then_scalar(&self, c: &CliffordNum) -> Self {
        let m = self.m;
        CliffordOperator { n: self.n, m, entries: self.entries.iter().map(|e| e * c).collect() }
    }

    fn check_same_shape(&self, other: &CliffordOperator) -> Result<()> {
        if self.n != other.n || self.m != other.m {
            return Err(Error::Dimension(format!(
                "operators of shape (n={}, m={}) and (n={}, m={})",
                self.n, self.m, other.n, other.m
            )));
        }
        Ok(())
    }

    /// Largest singular value of the real representation.
    pub fn norm(&self) -> f64 {
        linalg::spectral_norm(&self.real_rep())
    }

    /// Solves `T v = w` in the real representation with iterative refinement.
    pub fn solve(&self, w: &ModuleVector) -> Result<ModuleVector> {
        if w.n() != self.n || w.m() != self.m {
            return Err(Error::Dimension("right-hand side does not match operator shape".into()));
        }
        let x = linalg::solve_vector(&self.real_rep(), &w.flatten())?;
        ModuleVector::from_flat(self.n, self.m, x.as_slice())
    }

    pub fn max_abs_diff(&self, other: &CliffordOperator) -> f64 {
        self.entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| a.max_abs_diff(b))
            .fold(0.0, f64::max)
    }

    /// Operator norm of `self - other`.
    pub fn distance(&self, other: &CliffordOperator) -> Result<f64> {
        Ok(self.sub(other)?.norm())
    }

    /// `1x1` operator acting as left multiplication by a paravector.
    pub fn from_paravector(s: &Paravector) -> Self {
        Self::scalar_identity(&s.to_clifford(), 1)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::clifford::BasisIndex;
    use crate::testutil::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn inner_product_properties() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..50 {
            let n = 2;
            let v = random_vector(&mut rng, n, 3);
            let w = random_vector(&mut rng, n, 3);
            let s = random_clifford(&mut rng, n);
            let vv = v.inner(&v).unwrap();
            assert!((vv.scalar_part() - v.norm().powi(2)).abs() < 1e-12);
            let lhs = v.inner(&w.right_mul(&s).unwrap()).unwrap();
            let rhs = &v.inner(&w).unwrap() * &s;
            assert!(lhs.max_abs_diff(&rhs) < 1e-12);
            let lhs = v.right_mul(&s).unwrap().inner(&w).unwrap();
            let rhs = &s.conjugate() * &v.inner(&w).unwrap();
            assert!(lhs.max_abs_diff(&rhs) < 1e-12);
            // Sc<v,w> is the Euclidean pairing of the flattenings
            let sc = v.inner(&w).unwrap().scalar_part();
            assert!((sc - v.flatten().dot(&w.flatten())).abs() < 1e-12);
        }
    }

    #[test]
    fn scalar_multiplication_norms() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for _ in 0..50 {
            let n = 3;
            let v = random_vector(&mut rng, n, 2);
            let p = random_paravector(&mut rng, n).to_clifford();
            let lhs = v.left_mul(&p).unwrap().norm();
            assert!((lhs - p.abs() * v.norm()).abs() < 1e-12 * (1.0 + lhs));
            let s = random_clifford(&mut rng, n);
            let bound = 2f64.powf(n as f64 / 2.0) * s.abs() * v.norm();
            assert!(v.left_mul(&s).unwrap().norm() <= bound * (1.0 + 1e-12));
            assert!(v.right_mul(&s).unwrap().norm() <= bound * (1.0 + 1e-12));
        }
        let v = random_vector(&mut rng, 2, 2);
        assert_eq!(v.left_mul(&CliffordNum::one(2)).unwrap(), v);
    }

    #[test]
    fn real_rep_examples() {
        let id = CliffordOperator::identity(2, 3);
        assert_eq!(id.real_rep(), DMatrix::identity(12, 12));
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let s = random_operator(&mut rng, 2, 2);
        let t = random_operator(&mut rng, 2, 2);
        let st = s.compose(&t).unwrap();
        let diff = &st.real_rep() - &s.real_rep() * &t.real_rep();
        assert!(diff.amax() < 1e-12);
        let v = random_vector(&mut rng, 2, 2);
        let tv = t.apply(&v).unwrap();
        assert!((&t.real_rep() * v.flatten() - tv.flatten()).amax() < 1e-12);
        assert!(((&t.real_rep() * v.flatten()).norm() - tv.norm()).abs() < 1e-12);
        let back = CliffordOperator::from_real_rep(2, 2, &t.real_rep()).unwrap();
        assert_eq!(back, t);
    }

    #[test]
    fn adjoint_examples() {
        let a = DMatrix::from_row_slice(2, 2, &[1.0, 2.0, 2.0, 5.0]);
        let t = CliffordOperator::from_real_matrix(1, &a).unwrap();
        assert_eq!(t.adjoint(), t);
        let e1 = CliffordOperator::scalar_identity(&CliffordNum::generator(1, 1), 1);
        let e1s = e1.adjoint();
        assert_eq!(e1s.entry(0, 0), &(-&CliffordNum::generator(1, 1)));
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        for _ in 0..10 {
            let v = random_vector(&mut rng, 1, 1);
            let w = random_vector(&mut rng, 1, 1);
            let lhs = e1s.apply(&w).unwrap().inner(&v).unwrap();
            let rhs = w.inner(&e1.apply(&v).unwrap()).unwrap();
            assert!(lhs.max_abs_diff(&rhs) < 1e-12);
        }
        let t = random_operator(&mut rng, 3, 2);
        assert_eq!(t.adjoint().adjoint(), t);
        assert!((&t.adjoint().real_rep() - t.real_rep().transpose()).amax() < 1e-12);
    }

    #[test]
    fn right_linearity() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let t = random_operator(&mut rng, 2, 3);
        for _ in 0..100 {
            let v = random_vector(&mut rng, 2, 3);
            let s = random_clifford(&mut rng, 2);
            let lhs = t.apply(&v.right_mul(&s).unwrap()).unwrap();
            let rhs = t.apply(&v).unwrap().right_mul(&s).unwrap();
            assert!(lhs.sub(&rhs).unwrap().norm() < 1e-10);
        }
    }

    #[test]
    fn norm_examples() {
        assert!((CliffordOperator::identity(2, 2).norm() - 1.0).abs() < 1e-14);
        assert!((CliffordOperator::diagonal(1, &[1.0, 2.0]).norm() - 2.0).abs() < 1e-14);
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let t = random_operator(&mut rng, 2, 2);
        let norm = t.norm();
        let mut best: f64 = 0.0;
        for _ in 0..10_000 {
            let v = random_vector(&mut rng, 2, 2);
            best = best.max(t.apply(&v).unwrap().norm() / v.norm());
        }
        assert!(best <= norm * (1.0 + 1e-12));
        assert!(best >= 0.99 * norm, "sampled {best} vs {norm}");
    }

    #[test]
    fn solve_examples() {
        let id = CliffordOperator::identity(1, 2);
        let w = ModuleVector::from_flat(1, 2, &[1.0, 2.0, 3.0, 4.0]).unwrap();
        assert!(id.solve(&w).unwrap().sub(&w).unwrap().norm() < 1e-15);
        let d = CliffordOperator::diagonal(1, &[2.0, 4.0]);
        let w = ModuleVector::new(vec![CliffordNum::one(1), CliffordNum::one(1)]).unwrap();
        let x = d.solve(&w).unwrap();
        assert_eq!(x.entries()[0].get(BasisIndex::SCALAR), 0.5);
        assert_eq!(x.entries()[1].get(BasisIndex::SCALAR), 0.25);
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let t = CliffordOperator::identity(2, 3)
            .scale(3.0)
            .add(&random_operator(&mut rng, 2, 3))
            .unwrap();
        let w = random_vector(&mut rng, 2, 3);
        let x = t.solve(&w).unwrap();
        assert!(t.apply(&x).unwrap().sub(&w).unwrap().norm() <= 1e-10 * w.norm());
        let singular = CliffordOperator::diagonal(1, &[0.0, 1.0]);
        match singular.solve(&w_for(1, 2)) {
            Err(Error::NotInvertible { sigma_min, .. }) => assert!(sigma_min < 1e-12),
            other => panic!("expected NotInvertible, got {other:?}"),
        }
    }

    fn w_for(n: usize, m: usize) -> ModuleVector {
        ModuleVector::from_flat(n, m, &vec![1.0; m << n]).unwrap()
    }
}
