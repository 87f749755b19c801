//! Arithmetic in the real Clifford algebra `R_n` (all generators square to `-1`)
//! together with paravectors and double sectors.
//!
//! A Clifford number is stored as its `2^n` coefficients indexed by basis
//! masks: bit `i-1` of the mask is set when `e_i` occurs in the basis blade.
//! The canonical ordering is ascending mask value, so `coeffs[0]` is the
//! scalar part and `coeffs[1 << (i-1)]` the coefficient of `e_i`.

use std::f64::consts::PI;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest supported number of generators.
pub const MAX_GENERATORS: usize = 6;

/// A basis blade `e_A`, encoded as a subset mask of `{1, .., n}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct BasisIndex(pub u32);

impl BasisIndex {
    pub const SCALAR: BasisIndex = BasisIndex(0);

    /// The generator `e_i`, 1-based.
    pub fn generator(i: usize) -> Self {
        assert!((1..=MAX_GENERATORS).contains(&i), "generator index out of range");
        BasisIndex(1 << (i - 1))
    }

    pub fn grade(self) -> u32 {
        self.0.count_ones()
    }

    /// `(-1)^{|A|(|A|+1)/2}`, the sign picked up under conjugation.
    pub fn conjugation_sign(self) -> f64 {
        let k = self.grade();
        if (k * (k + 1) / 2) % 2 == 0 {
            1.0
        } else {
            -1.0
        }
    }
}

/// Sign of `e_A e_B = sign * e_{A xor B}` with `e_i^2 = -1`.
///
/// Reordering the concatenated generator string costs one sign flip per
/// transposition; every generator shared by `A` and `B` then squares to `-1`.
#[inline]
pub fn basis_product_sign(a: u32, b: u32) -> f64 {
    let mut swaps = 0u32;
    let mut rest = b;
    while rest != 0 {
        let i = rest.trailing_zeros();
        // generators of A with index greater than i must hop over e_i
        swaps += (a >> (i + 1)).count_ones();
        rest &= rest - 1;
    }
    swaps += (a & b).count_ones();
    if swaps % 2 == 0 {
        1.0
    } else {
        -1.0
    }
}

/// An element of `R_n`.
#[derive(Debug, Clone, PartialEq)]
pub struct CliffordNum {
    n: usize,
    coeffs: Vec<f64>,
}

fn check_n(n: usize) -> Result<()> {
    if n == 0 || n > MAX_GENERATORS {
        return Err(Error::Argument(format!(
            "number of generators must lie in 1..={MAX_GENERATORS}, got {n}"
        )));
    }
    Ok(())
}

impl CliffordNum {
    pub fn zero(n: usize) -> Self {
        check_n(n).expect("invalid algebra dimension");
        CliffordNum { n, coeffs: vec![0.0; 1 << n] }
    }

    pub fn scalar(n: usize, value: f64) -> Self {
        let mut c = Self::zero(n);
        c.coeffs[0] = value;
        c
    }

    pub fn one(n: usize) -> Self {
        Self::scalar(n, 1.0)
    }

    pub fn basis(n: usize, index: BasisIndex) -> Self {
        let mut c = Self::zero(n);
        assert!((index.0 as usize) < (1 << n), "basis mask exceeds algebra dimension");
        c.coeffs[index.0 as usize] = 1.0;
        c
    }

    /// The generator `e_i` (1-based).
    pub fn generator(n: usize, i: usize) -> Self {
        assert!(i >= 1 && i <= n, "generator e_{i} not in R_{n}");
        Self::basis(n, BasisIndex::generator(i))
    }

    pub fn from_coeffs(n: usize, coeffs: Vec<f64>) -> Result<Self> {
        check_n(n)?;
        if coeffs.len() != 1 << n {
            return Err(Error::Dimension(format!(
                "R_{n} needs {} coefficients, got {}",
                1 << n,
                coeffs.len()
            )));
        }
        Ok(CliffordNum { n, coeffs })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn coeffs_mut(&mut self) -> &mut [f64] {
        &mut self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<f64> {
        self.coeffs
    }

    pub fn get(&self, index: BasisIndex) -> f64 {
        self.coeffs[index.0 as usize]
    }

    pub fn scalar_part(&self) -> f64 {
        self.coeffs[0]
    }

    pub fn product(&self, other: &CliffordNum) -> Result<CliffordNum> {
        if self.n != other.n {
            return Err(Error::Dimension(format!(
                "cannot multiply elements of R_{} and R_{}",
                self.n, other.n
            )));
        }
        let dim = self.coeffs.len();
        let mut out = vec![0.0; dim];
        for (a, &ca) in self.coeffs.iter().enumerate() {
            if ca == 0.0 {
                continue;
            }
            for (b, &cb) in other.coeffs.iter().enumerate() {
                if cb == 0.0 {
                    continue;
                }
                out[a ^ b] += basis_product_sign(a as u32, b as u32) * ca * cb;
            }
        }
        Ok(CliffordNum { n: self.n, coeffs: out })
    }

    pub fn conjugate(&self) -> CliffordNum {
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .map(|(a, &c)| BasisIndex(a as u32).conjugation_sign() * c)
            .collect();
        CliffordNum { n: self.n, coeffs }
    }

    pub fn abs_squared(&self) -> f64 {
        self.coeffs.iter().map(|c| c * c).sum()
    }

    pub fn abs(&self) -> f64 {
        self.abs_squared().sqrt()
    }

    pub fn scale(&self, factor: f64) -> CliffordNum {
        CliffordNum { n: self.n, coeffs: self.coeffs.iter().map(|c| c * factor).collect() }
    }

    pub fn is_paravector(&self) -> bool {
        self.coeffs
            .iter()
            .enumerate()
            .all(|(a, &c)| (a as u32).count_ones() <= 1 || c == 0.0)
    }

    /// Largest absolute coefficient difference.
    pub fn max_abs_diff(&self, other: &CliffordNum) -> f64 {
        self.coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }
}

impl fmt::Display for CliffordNum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (a, &c) in self.coeffs.iter().enumerate() {
            if c == 0.0 {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            if a == 0 {
                write!(f, "{c}")?;
            } else {
                write!(f, "{c}e")?;
                for i in 0..self.n {
                    if a & (1 << i) != 0 {
                        write!(f, "{}", i + 1)?;
                    }
                }
            }
        }
        if first {
            write!(f, "0")?;
        }
        Ok(())
    }
}

impl Add for &CliffordNum {
    type Output = CliffordNum;
    fn add(self, rhs: &CliffordNum) -> CliffordNum {
        assert_eq!(self.n, rhs.n, "algebra dimension mismatch");
        CliffordNum {
            n: self.n,
            coeffs: self.coeffs.iter().zip(&rhs.coeffs).map(|(a, b)| a + b).collect(),
        }
    }
}

impl Sub for &CliffordNum {
    type Output = CliffordNum;
    fn sub(self, rhs: &CliffordNum) -> CliffordNum {
        assert_eq!(self.n, rhs.n, "algebra dimension mismatch");
        CliffordNum {
            n: self.n,
            coeffs: self.coeffs.iter().zip(&rhs.coeffs).map(|(a, b)| a - b).collect(),
        }
    }
}

impl Neg for &CliffordNum {
    type Output = CliffordNum;
    fn neg(self) -> CliffordNum {
        self.scale(-1.0)
    }
}

impl Mul for &CliffordNum {
    type Output = CliffordNum;
    /// Panics on mismatched dimensions; use [`CliffordNum::product`] for a
    /// fallible version.
    fn mul(self, rhs: &CliffordNum) -> CliffordNum {
        self.product(rhs).expect("algebra dimension mismatch")
    }
}

impl Serialize for CliffordNum {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.coeffs.serialize(s)
    }
}

/// A paravector `s0 + s1 e_1 + ... + sn e_n`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Paravector {
    pub s0: f64,
    pub svec: Vec<f64>,
}

impl Paravector {
    pub fn new(s0: f64, svec: Vec<f64>) -> Result<Self> {
        check_n(svec.len())?;
        Ok(Paravector { s0, svec })
    }

    pub fn real(n: usize, s0: f64) -> Self {
        Paravector { s0, svec: vec![0.0; n] }
    }

    /// Unit `e_i` as an element of the imaginary sphere.
    pub fn unit(n: usize, i: usize) -> Self {
        assert!(i >= 1 && i <= n);
        let mut svec = vec![0.0; n];
        svec[i - 1] = 1.0;
        Paravector { s0: 0.0, svec }
    }

    /// `x + J y` for a unit `J` of the imaginary sphere.
    pub fn from_slice(x: f64, y: f64, j: &Paravector) -> Self {
        Paravector { s0: x, svec: j.svec.iter().map(|c| c * y).collect() }
    }

    pub fn n(&self) -> usize {
        self.svec.len()
    }

    /// Squares are summed in ascending order, so the value is invariant
    /// under signed permutations of the imaginary part.
    pub fn imag_norm(&self) -> f64 {
        let mut sq: Vec<f64> = self.svec.iter().map(|c| c * c).collect();
        sq.sort_by(f64::total_cmp);
        sq.iter().sum::<f64>().sqrt()
    }

    pub fn abs_squared(&self) -> f64 {
        self.s0 * self.s0 + self.svec.iter().map(|c| c * c).sum::<f64>()
    }

    pub fn abs(&self) -> f64 {
        self.abs_squared().sqrt()
    }

    pub fn conjugate(&self) -> Paravector {
        Paravector { s0: self.s0, svec: self.svec.iter().map(|c| -c).collect() }
    }

    pub fn scale(&self, t: f64) -> Paravector {
        Paravector { s0: self.s0 * t, svec: self.svec.iter().map(|c| c * t).collect() }
    }

    pub fn is_zero(&self) -> bool {
        self.s0 == 0.0 && self.svec.iter().all(|&c| c == 0.0)
    }

    /// Whether this is a unit of the imaginary sphere, to `tol`.
    pub fn is_imaginary_unit(&self, tol: f64) -> bool {
        self.s0 == 0.0 && (self.imag_norm() - 1.0).abs() <= tol
    }

    pub fn to_clifford(&self) -> CliffordNum {
        let n = self.n();
        let mut c = CliffordNum::zero(n);
        c.coeffs[0] = self.s0;
        for (i, &v) in self.svec.iter().enumerate() {
            c.coeffs[1 << i] = v;
        }
        c
    }

    /// Reads a paravector back out of a Clifford number, rejecting higher grades.
    pub fn from_clifford(c: &CliffordNum) -> Result<Self> {
        if !c.is_paravector() {
            return Err(Error::Argument("Clifford number has components of grade >= 2".into()));
        }
        Ok(Paravector {
            s0: c.coeffs[0],
            svec: (0..c.n).map(|i| c.coeffs[1 << i]).collect(),
        })
    }

    /// Polar form `r (cos phi + J sin phi)` with `phi` in `[0, pi]`.
    ///
    /// On the real axis `J` is not determined by `s`; `default_j` is returned.
    pub fn polar(&self, default_j: &Paravector) -> Result<PolarForm> {
        if self.is_zero() {
            return Err(Error::Degenerate("polar decomposition of the zero paravector".into()));
        }
        let y = self.imag_norm();
        let r = self.abs();
        let phi = y.atan2(self.s0);
        let j = if y > 0.0 {
            Paravector { s0: 0.0, svec: self.svec.iter().map(|c| c / y).collect() }
        } else {
            if default_j.n() != self.n() || !default_j.is_imaginary_unit(1e-12) {
                return Err(Error::Argument("default J must be a unit of the imaginary sphere".into()));
            }
            default_j.clone()
        };
        Ok(PolarForm { r, j, phi })
    }

    /// Polar form using `e_1` as the default unit on the real axis.
    pub fn polar_default(&self) -> Result<PolarForm> {
        self.polar(&Paravector::unit(self.n(), 1))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PolarForm {
    pub r: f64,
    pub j: Paravector,
    pub phi: f64,
}

impl PolarForm {
    pub fn reconstruct(&self) -> Paravector {
        Paravector::from_slice(self.r * self.phi.cos(), self.r * self.phi.sin(), &self.j)
    }
}

/// The open double sector `D_omega` around the real axis.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DoubleSector {
    omega: f64,
}

impl DoubleSector {
    pub fn new(omega: f64) -> Result<Self> {
        if !(omega > 0.0 && omega < PI / 2.0) {
            return Err(Error::Argument(format!("sector angle must lie in (0, pi/2), got {omega}")));
        }
        Ok(DoubleSector { omega })
    }

    pub fn omega(&self) -> f64 {
        self.omega
    }

    /// Membership in terms of the slice coordinates `(x, |y|)`.
    pub fn contains_xy(&self, x: f64, y: f64) -> bool {
        if x == 0.0 && y == 0.0 {
            return false;
        }
        let phi = y.abs().atan2(x);
        phi < self.omega || phi > PI - self.omega
    }

    /// Membership in the closure (the origin included).
    pub fn closure_contains_xy(&self, x: f64, y: f64, slack: f64) -> bool {
        if x == 0.0 && y == 0.0 {
            return true;
        }
        let phi = y.abs().atan2(x);
        phi <= self.omega + slack || phi >= PI - self.omega - slack
    }

    pub fn contains(&self, s: &Paravector) -> bool {
        self.contains_xy(s.s0, s.imag_norm())
    }
}
