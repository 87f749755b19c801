//! Intrinsic slice functions on double sectors.
//!
//! An intrinsic function is stored as a complex profile `phi` with
//! `phi(conj z) = conj phi(z)`; on the slice `C_J` it acts by
//! `f(x + J y) = Re phi(x + i y) + J Im phi(x + i y)`.

use std::f64::consts::{FRAC_PI_2, PI};
use std::sync::OnceLock;

use num_complex::Complex64;
use serde::Serialize;

use crate::clifford::Paravector;
use crate::error::{Error, Result};

/// Evaluation rule of an intrinsic function.
#[derive(Debug, Clone, PartialEq)]
pub enum Profile {
    /// `z / (1 + z^2)`.
    Regularizer,
    /// `z^alpha / (1 + z^2)^alpha` on `Re z > 0`, `(-z)^alpha / (1 + z^2)^alpha` on `Re z < 0`.
    EAlpha(f64),
    /// Real coefficients in ascending powers.
    Rational { num: Vec<f64>, den: Vec<f64> },
    /// `z -> f(t z)`.
    Scaled { f: Box<IntrinsicFunction>, t: f64 },
    /// `z -> int_{(-b,-a) ∪ (a,b)} f(t z) dt / t`.
    FAb { f: Box<IntrinsicFunction>, a: f64, b: f64 },
    Product(Vec<IntrinsicFunction>),
    Sum(Vec<IntrinsicFunction>),
}

/// `|f(s)| <= c_alpha (lambda|s|)^alpha / (1 + (lambda|s|)^(2 alpha))` on the sector.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DecayCertificate {
    pub alpha: f64,
    pub c_alpha: f64,
    pub lambda: f64,
    /// Number of samples behind a fitted certificate, 0 for analytic ones.
    pub samples: usize,
}

impl DecayCertificate {
    pub fn new(alpha: f64, c_alpha: f64) -> Self {
        DecayCertificate { alpha, c_alpha, lambda: 1.0, samples: 0 }
    }

    pub fn bound(&self, r: f64) -> f64 {
        let x = (self.lambda * r).powf(self.alpha);
        self.c_alpha * x / (1.0 + x * x)
    }

    /// The same bound rewritten with `lambda = 1`, using
    /// `(l r)^a / (1 + (l r)^{2a}) <= max(l, 1/l)^a r^a / (1 + r^{2a})`.
    pub fn standard(&self) -> Self {
        let l = self.lambda.max(1.0 / self.lambda);
        DecayCertificate { c_alpha: self.c_alpha * l.powf(self.alpha), lambda: 1.0, ..*self }
    }

    /// `int |bound(r)| dr / |r|` over both half-lines, `c_alpha pi / alpha`.
    pub fn integral(&self) -> f64 {
        self.c_alpha * PI / self.alpha
    }

    /// Bound on `int_{|r| <= lo} + int_{|r| >= hi}` of the bound against `dr/|r|`.
    pub fn tail(&self, lo: f64, hi: f64) -> f64 {
        let a = (self.lambda * lo).powf(self.alpha);
        let b = (self.lambda * hi).powf(self.alpha);
        2.0 * self.c_alpha / self.alpha * (a.atan() + FRAC_PI_2 - b.atan())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BoundedCertificate {
    pub sup_norm: f64,
    pub samples: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct IntrinsicFunction {
    profile: Profile,
    theta: f64,
    name: String,
    decay: Option<DecayCertificate>,
}

fn check_theta(theta: f64) -> Result<()> {
    if !(theta > 0.0 && theta < FRAC_PI_2) {
        return Err(Error::Argument(format!("domain angle must lie in (0, pi/2), got {theta}")));
    }
    Ok(())
}

fn horner(coeffs: &[f64], z: Complex64) -> Complex64 {
    coeffs.iter().rev().fold(Complex64::new(0.0, 0.0), |acc, &c| acc * z + c)
}

impl IntrinsicFunction {
    /// `e(s) = s / (1 + s^2)` with its certificate `alpha = 1`, `C = 1/cos(theta)`.
    pub fn regularizer(theta: f64) -> Result<Self> {
        check_theta(theta)?;
        Ok(IntrinsicFunction {
            profile: Profile::Regularizer,
            theta,
            name: "e".into(),
            decay: Some(DecayCertificate::new(1.0, 1.0 / theta.cos())),
        })
    }

    /// `e_alpha` with `C = 2^(1-alpha) / cos(theta)^alpha`.
    pub fn e_alpha(alpha: f64, theta: f64) -> Result<Self> {
        check_theta(theta)?;
        if !(alpha > 0.0 && alpha <= 1.0) {
            return Err(Error::Argument(format!("e_alpha needs alpha in (0, 1], got {alpha}")));
        }
        Ok(IntrinsicFunction {
            profile: Profile::EAlpha(alpha),
            theta,
            name: format!("e_{alpha}"),
            decay: Some(DecayCertificate::new(alpha, 2f64.powf(1.0 - alpha) / theta.cos().powf(alpha))),
        })
    }

    /// Rational function with real coefficients in ascending powers; no
    /// certificate is attached.
    pub fn rational(num: Vec<f64>, den: Vec<f64>, theta: f64) -> Result<Self> {
        check_theta(theta)?;
        if num.is_empty() || den.is_empty() || den.iter().all(|&c| c == 0.0) {
            return Err(Error::Argument("rational function needs nonempty coefficients and a nonzero denominator".into()));
        }
        if num.iter().chain(&den).any(|c| !c.is_finite()) {
            return Err(Error::Argument("rational coefficients must be finite".into()));
        }
        Ok(IntrinsicFunction { profile: Profile::Rational { num, den }, theta, name: "rational".into(), decay: None })
    }

    pub fn constant(c: f64, theta: f64) -> Result<Self> {
        let mut f = Self::rational(vec![c], vec![1.0], theta)?;
        f.name = format!("const({c})");
        Ok(f)
    }

    /// `s -> f(t s)`.
    pub fn scaled(f: &IntrinsicFunction, t: f64) -> Result<Self> {
        if t == 0.0 || !t.is_finite() {
            return Err(Error::Argument("scaling factor must be finite and nonzero".into()));
        }
        let decay = f.decay.map(|d| DecayCertificate { lambda: d.lambda * t.abs(), ..d });
        Ok(IntrinsicFunction {
            profile: Profile::Scaled { f: Box::new(f.clone()), t },
            theta: f.theta,
            name: format!("scaled({}, {t})", f.name),
            decay,
        })
    }

    /// `f_{a,b}(s) = int_{(-b,-a) ∪ (a,b)} f(t s) dt / t`, with the
    /// certificate `C' = 2C/alpha (a^-alpha - b^-alpha + b^alpha - a^alpha)`.
    pub fn f_ab(f: &IntrinsicFunction, a: f64, b: f64) -> Result<Self> {
        if !(a > 0.0 && a <= b && b.is_finite()) {
            return Err(Error::Argument(format!("f_ab needs 0 < a <= b < inf, got a = {a}, b = {b}")));
        }
        let decay = f.decay.map(|d| {
            let d = d.standard();
            let al = d.alpha;
            let c = 2.0 * d.c_alpha / al * (a.powf(-al) - b.powf(-al) + b.powf(al) - a.powf(al));
            DecayCertificate { c_alpha: c, ..d }
        });
        Ok(IntrinsicFunction {
            profile: Profile::FAb { f: Box::new(f.clone()), a, b },
            theta: f.theta,
            name: format!("f_ab({}, {a}, {b})", f.name),
            decay,
        })
    }

    /// Pointwise product; certificates multiply and exponents add.
    pub fn product(factors: Vec<IntrinsicFunction>) -> Result<Self> {
        if factors.is_empty() {
            return Err(Error::Argument("product of no functions".into()));
        }
        let theta = factors.iter().map(|f| f.theta).fold(FRAC_PI_2, f64::min);
        let decay = if factors.iter().all(|f| f.decay.is_some()) {
            let certs: Vec<DecayCertificate> = factors.iter().map(|f| f.decay.unwrap()).collect();
            let lambda = certs[0].lambda;
            let certs: Vec<DecayCertificate> = if certs.iter().all(|c| c.lambda == lambda) {
                certs
            } else {
                certs.iter().map(|c| c.standard()).collect()
            };
            Some(DecayCertificate {
                alpha: certs.iter().map(|c| c.alpha).sum(),
                c_alpha: certs.iter().map(|c| c.c_alpha).product(),
                lambda: certs[0].lambda,
                samples: certs.iter().map(|c| c.samples).max().unwrap_or(0),
            })
        } else {
            None
        };
        let name = factors.iter().map(|f| f.name.as_str()).collect::<Vec<_>>().join("*");
        Ok(IntrinsicFunction { profile: Profile::Product(factors), theta, name, decay })
    }

    /// Pointwise sum; the certificate uses the smallest exponent.
    pub fn sum(terms: Vec<IntrinsicFunction>) -> Result<Self> {
        if terms.is_empty() {
            return Err(Error::Argument("sum of no functions".into()));
        }
        let theta = terms.iter().map(|f| f.theta).fold(FRAC_PI_2, f64::min);
        let decay = if terms.iter().all(|f| f.decay.is_some()) {
            let certs: Vec<DecayCertificate> = terms.iter().map(|f| f.decay.unwrap().standard()).collect();
            Some(DecayCertificate {
                alpha: certs.iter().map(|c| c.alpha).fold(f64::INFINITY, f64::min),
                c_alpha: certs.iter().map(|c| c.c_alpha).sum(),
                lambda: 1.0,
                samples: certs.iter().map(|c| c.samples).max().unwrap_or(0),
            })
        } else {
            None
        };
        let name = terms.iter().map(|f| f.name.as_str()).collect::<Vec<_>>().join("+");
        Ok(IntrinsicFunction { profile: Profile::Sum(terms), theta, name, decay })
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    pub fn with_decay(mut self, cert: DecayCertificate) -> Self {
        self.decay = Some(cert);
        self
    }

    pub fn with_theta(mut self, theta: f64) -> Result<Self> {
        check_theta(theta)?;
        self.theta = theta;
        Ok(self)
    }

    pub fn profile(&self) -> &Profile {
        &self.profile
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn decay(&self) -> Option<&DecayCertificate> {
        self.decay.as_ref()
    }

    /// Whether `z` lies in the open double sector of angle `theta`.
    pub fn in_domain(&self, z: Complex64) -> bool {
        if z.re == 0.0 && z.im == 0.0 {
            return false;
        }
        let a = z.im.abs().atan2(z.re);
        a < self.theta || a > PI - self.theta
    }

    /// The profile at a complex point of the sector.
    pub fn eval_complex(&self, z: Complex64) -> Result<Complex64> {
        if !self.in_domain(z) {
            return Err(Error::Domain(format!("{z} is outside the double sector of angle {}", self.theta)));
        }
        self.value(z)
    }

    /// The profile without the domain check; used on sector boundaries and
    /// by compositions whose arguments stay in the closed sector.
    pub fn value(&self, z: Complex64) -> Result<Complex64> {
        let v = match &self.profile {
            Profile::Regularizer => {
                let d = 1.0 + z * z;
                if d == Complex64::new(0.0, 0.0) {
                    return Err(Error::Domain(format!("pole of e at {z}")));
                }
                z / d
            }
            Profile::EAlpha(alpha) => {
                let w = if z.re >= 0.0 { z } else { -z };
                w.powf(*alpha) / (1.0 + z * z).powf(*alpha)
            }
            Profile::Rational { num, den } => {
                let d = horner(den, z);
                if d.norm() == 0.0 {
                    return Err(Error::Domain(format!("denominator vanishes at {z}")));
                }
                horner(num, z) / d
            }
            Profile::Scaled { f, t } => f.value(z * *t)?,
            Profile::FAb { f, a, b } => {
                let mut err = None;
                let v = log_panel_integral(a.ln(), b.ln(), |u| {
                    let tau = u.exp();
                    match (f.value(z * tau), f.value(-z * tau)) {
                        (Ok(p), Ok(m)) => p - m,
                        (Err(e), _) | (_, Err(e)) => {
                            err.get_or_insert(e);
                            Complex64::new(0.0, 0.0)
                        }
                    }
                });
                if let Some(e) = err {
                    return Err(e);
                }
                v
            }
            Profile::Product(fs) => {
                let mut acc = Complex64::new(1.0, 0.0);
                for f in fs {
                    acc *= f.value(z)?;
                }
                acc
            }
            Profile::Sum(fs) => {
                let mut acc = Complex64::new(0.0, 0.0);
                for f in fs {
                    acc += f.value(z)?;
                }
                acc
            }
        };
        if !(v.re.is_finite() && v.im.is_finite()) {
            return Err(Error::Numerical { what: format!("non-finite value of {}", self.name), location: format!("z = {z}") });
        }
        Ok(v)
    }

    /// `(f0, f1)` at slice coordinates `(x, y)`.
    pub fn eval_xy(&self, x: f64, y: f64) -> Result<(f64, f64)> {
        let v = self.eval_complex(Complex64::new(x, y))?;
        Ok((v.re, v.im))
    }

    /// `f(s) = f0 + J f1` with `J = Im s / |Im s|` (`e_1` on the real axis).
    pub fn eval(&self, s: &Paravector) -> Result<Paravector> {
        let y = s.imag_norm();
        let (f0, f1) = self.eval_xy(s.s0, y)?;
        if y > 0.0 {
            let j = Paravector::new(0.0, s.svec.iter().map(|c| c / y).collect())?;
            Ok(Paravector::from_slice(f0, f1, &j))
        } else {
            Ok(Paravector::real(s.n(), f0))
        }
    }
}

/// Gauss-Legendre nodes and weights on `[-1, 1]` by Newton iteration on the
/// three-term recurrence.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            let p = if n == 0 { 1.0 } else if n == 1 { x } else { p1 };
            let pm1 = if n == 1 { 1.0 } else { p0 };
            dp = n as f64 * (x * p - pm1) / (x * x - 1.0);
            let dx = p / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    (nodes, weights)
}

fn gl10() -> &'static (Vec<f64>, Vec<f64>) {
    static RULE: OnceLock<(Vec<f64>, Vec<f64>)> = OnceLock::new();
    RULE.get_or_init(|| gauss_legendre(10))
}

/// Largest panel width in log scale.
const PANEL_WIDTH: f64 = 0.5;

/// `int_lo^hi g(u) du` with 10-point Gauss-Legendre panels of width at most 0.5.
pub fn log_panel_integral<F: FnMut(f64) -> Complex64>(lo: f64, hi: f64, mut g: F) -> Complex64 {
    if hi <= lo {
        return Complex64::new(0.0, 0.0);
    }
    let panels = ((hi - lo) / PANEL_WIDTH).ceil().max(1.0) as usize;
    let h = (hi - lo) / panels as f64;
    let (x, w) = gl10();
    let mut total = Complex64::new(0.0, 0.0);
    for p in 0..panels {
        let mid = lo + h * (p as f64 + 0.5);
        let mut s = Complex64::new(0.0, 0.0);
        for (xi, wi) in x.iter().zip(w) {
            s += g(mid + 0.5 * h * xi) * *wi;
        }
        total += s * (0.5 * h);
    }
    total
}

/// Internal accuracy target for [`f0_infty`].
pub const F0_INFTY_TARGET: f64 = 1e-10;

/// Truncation `[a, b]` for `int f(t z) dt/t` so both tails stay below
/// `eps / 2` under the certificate.
pub fn truncation_interval(cert: &DecayCertificate, eps: f64) -> (f64, f64) {
    let d = cert.standard();
    let a = (eps * d.alpha / (4.0 * d.c_alpha)).powf(1.0 / d.alpha).min(1.0);
    (a, 1.0 / a)
}

/// `int_R f(t z) dt / t` along the line through `z`.
pub fn line_integral(f: &IntrinsicFunction, z: Complex64) -> Result<Complex64> {
    let cert = f
        .decay()
        .ok_or_else(|| Error::Precondition(format!("{} has no decay certificate", f.name())))?;
    let (a, b) = truncation_interval(cert, F0_INFTY_TARGET);
    let r = z.norm();
    let mut err = None;
    let v = log_panel_integral((a / r).ln(), (b / r).ln(), |u| {
        let t = u.exp();
        match (f.value(z * t), f.value(-z * t)) {
            (Ok(p), Ok(m)) => p - m,
            (Err(e), _) | (_, Err(e)) => {
                err.get_or_insert(e);
                Complex64::new(0.0, 0.0)
            }
        }
    });
    match err {
        Some(e) => Err(e),
        None => Ok(v),
    }
}

/// `f_{0,inf} = int_R f(t) dt / t`.
pub fn f0_infty(f: &IntrinsicFunction) -> Result<f64> {
    Ok(line_integral(f, Complex64::new(1.0, 0.0))?.re)
}

/// Sampling plan for certificates: rays at angles `theta k / rays` for
/// `k = 0..=rays` together with their mirror images, log-spaced radii.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SamplePlan {
    pub rays: usize,
    pub radii: usize,
    pub r_min: f64,
    pub r_max: f64,
}

impl Default for SamplePlan {
    fn default() -> Self {
        SamplePlan { rays: 8, radii: 1000, r_min: 1e-6, r_max: 1e6 }
    }
}

impl SamplePlan {
    fn radius(&self, k: usize) -> f64 {
        let u = k as f64 / (self.radii - 1).max(1) as f64;
        self.r_min * (self.r_max / self.r_min).powf(u)
    }

    fn angles(&self, theta: f64) -> Vec<f64> {
        let mut a: Vec<f64> = (0..=self.rays).map(|k| theta * k as f64 / self.rays.max(1) as f64).collect();
        let mirrored: Vec<f64> = a.iter().map(|p| PI - p).collect();
        a.extend(mirrored);
        a
    }

    pub fn count(&self) -> usize {
        2 * (self.rays + 1) * self.radii
    }
}

/// Fits the smallest `C_alpha` over the sample set. Fails when the ratio
/// `|f| / bound` is still growing at either end of the radius range.
pub fn certify_decay(f: &IntrinsicFunction, alpha: f64, plan: &SamplePlan) -> Result<DecayCertificate> {
    if !(alpha > 0.0) {
        return Err(Error::Argument("decay exponent must be positive".into()));
    }
    let unit = DecayCertificate::new(alpha, 1.0);
    let per_decade = ((plan.radii - 1) as f64 / (plan.r_max / plan.r_min).log10()).round() as usize;
    let mut c: f64 = 0.0;
    for psi in plan.angles(f.theta()) {
        let ratios: Vec<f64> = (0..plan.radii)
            .map(|k| {
                let r = plan.radius(k);
                let v = f.value(Complex64::from_polar(r, psi))?;
                Ok(v.norm() / unit.bound(r))
            })
            .collect::<Result<_>>()?;
        let last = ratios.len() - 1;
        if per_decade > 0 && per_decade <= last {
            let grows_high = ratios[last] > ratios[last - per_decade] * (1.0 + 1e-6) && ratios[last] > 1e-300;
            let grows_low = ratios[0] > ratios[per_decade] * (1.0 + 1e-6) && ratios[0] > 1e-300;
            if grows_high || grows_low {
                return Err(Error::Precondition(format!(
                    "{} does not decay with exponent {alpha} on the ray at angle {psi:.4}",
                    f.name()
                )));
            }
        }
        c = ratios.iter().cloned().fold(c, f64::max);
    }
    Ok(DecayCertificate { alpha, c_alpha: c, lambda: 1.0, samples: plan.count() })
}

/// `sup |f|` over the sample set.
pub fn certify_bounded(f: &IntrinsicFunction, plan: &SamplePlan) -> Result<BoundedCertificate> {
    let mut sup: f64 = 0.0;
    for psi in plan.angles(f.theta()) {
        for k in 0..plan.radii {
            sup = sup.max(f.value(Complex64::from_polar(plan.radius(k), psi))?.norm());
        }
    }
    Ok(BoundedCertificate { sup_norm: sup, samples: plan.count() })
}

/// Largest relative Cauchy-Riemann residual of `(f0, f1)` at `(x, y)`,
/// by central differences.
pub fn cauchy_riemann_residual(f: &IntrinsicFunction, x: f64, y: f64) -> Result<f64> {
    let h = 1e-5 * (x * x + y * y).sqrt().max(1e-3);
    let at = |dx: f64, dy: f64| f.eval_xy(x + dx, y + dy);
    let (xp, xm, yp, ym) = (at(h, 0.0)?, at(-h, 0.0)?, at(0.0, h)?, at(0.0, -h)?);
    let f0x = (xp.0 - xm.0) / (2.0 * h);
    let f1x = (xp.1 - xm.1) / (2.0 * h);
    let f0y = (yp.0 - ym.0) / (2.0 * h);
    let f1y = (yp.1 - ym.1) / (2.0 * h);
    let scale = f0x.abs().max(f1x.abs()).max(f0y.abs()).max(f1y.abs()).max(1e-300);
    Ok(((f0x - f1y).abs().max((f0y + f1x).abs())) / scale)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    const THETA: f64 = 1.0;

    fn e() -> IntrinsicFunction {
        IntrinsicFunction::regularizer(THETA).unwrap()
    }

    fn e2() -> IntrinsicFunction {
        IntrinsicFunction::product(vec![e(), e()]).unwrap()
    }

    #[test]
    fn gauss_legendre_is_exact_for_polynomials() {
        let (x, w) = gauss_legendre(10);
        assert!((w.iter().sum::<f64>() - 2.0).abs() < 1e-14);
        for deg in 0..20 {
            let q: f64 = x.iter().zip(&w).map(|(xi, wi)| wi * xi.powi(deg)).sum();
            let exact = if deg % 2 == 1 { 0.0 } else { 2.0 / (deg as f64 + 1.0) };
            assert!((q - exact).abs() < 1e-14, "degree {deg}");
        }
        let (x3, w3) = gauss_legendre(3);
        assert!((x3[2] - (0.6f64).sqrt()).abs() < 1e-15);
        assert!((w3[1] - 8.0 / 9.0).abs() < 1e-15);
    }

    #[test]
    fn regularizer_values() {
        let v = e().eval(&Paravector::real(2, 1.0)).unwrap();
        assert_eq!(v, Paravector::real(2, 0.5));
        assert!(matches!(e().eval(&Paravector::new(0.0, vec![2.0, 0.0]).unwrap()), Err(Error::Domain(_))));
        let s = Paravector::new(1.0, vec![0.0, 1.0]).unwrap();
        let z = Complex64::new(1.0, 1.0);
        let w = z / (1.0 + z * z);
        let v = e().eval(&s).unwrap();
        assert!((v.s0 - w.re).abs() < 1e-15 && (v.svec[1] - w.im).abs() < 1e-15 && v.svec[0] == 0.0);
    }

    #[test]
    fn regularizer_certificate_holds() {
        let f = e();
        let cert = *f.decay().unwrap();
        assert_eq!(cert.c_alpha, 1.0 / THETA.cos());
        let plan = SamplePlan::default();
        for psi in plan.angles(THETA) {
            for k in 0..plan.radii {
                let r = plan.radius(k);
                let v = f.value(Complex64::from_polar(r, psi)).unwrap().norm();
                assert!(v <= cert.bound(r) * (1.0 + 1e-12));
            }
        }
        let fitted = certify_decay(&f, 1.0, &plan).unwrap();
        assert!(fitted.c_alpha <= 1.0 / THETA.cos() + 1e-9);
    }

    #[test]
    fn e_alpha_family() {
        let e1 = IntrinsicFunction::e_alpha(1.0, THETA).unwrap();
        for z in [Complex64::new(0.5, 0.2), Complex64::new(3.0, -1.0)] {
            assert!((e1.eval_complex(z).unwrap() - e().eval_complex(z).unwrap()).norm() < 1e-14);
        }
        assert!(IntrinsicFunction::e_alpha(0.0, THETA).is_err());
        assert!(IntrinsicFunction::e_alpha(1.5, THETA).is_err());
        let ea = IntrinsicFunction::e_alpha(0.5, THETA).unwrap();
        let cert = *ea.decay().unwrap();
        let plan = SamplePlan { radii: 200, ..Default::default() };
        for psi in plan.angles(THETA) {
            for k in 0..plan.radii {
                let r = plan.radius(k);
                let z = Complex64::from_polar(r, psi);
                let v = ea.value(z).unwrap();
                assert!(v.norm() <= cert.bound(r) * (1.0 + 1e-12));
                // Schwarz symmetry
                assert!((ea.value(z.conj()).unwrap() - v.conj()).norm() <= 1e-14 * (1.0 + v.norm()));
            }
        }
    }

    #[test]
    fn e_alpha_times_bounded_function() {
        // |e_alpha f| <= ||f||_inf / cos(theta)
        let ea = IntrinsicFunction::e_alpha(0.5, THETA).unwrap();
        let f = IntrinsicFunction::rational(vec![0.0, 0.0, 1.0], vec![1.0, 0.0, 1.0], THETA).unwrap();
        let sup = certify_bounded(&f, &SamplePlan::default()).unwrap().sup_norm;
        let prod = IntrinsicFunction::product(vec![ea, f]).unwrap();
        let sup_prod = certify_bounded(&prod, &SamplePlan::default()).unwrap().sup_norm;
        assert!(sup_prod <= sup / THETA.cos());
    }

    #[test]
    fn scaling() {
        let z = Complex64::new(0.7, 0.3);
        let s1 = IntrinsicFunction::scaled(&e(), 1.0).unwrap();
        assert_eq!(s1.eval_complex(z).unwrap(), e().eval_complex(z).unwrap());
        let sm = IntrinsicFunction::scaled(&e(), -1.0).unwrap();
        assert!((sm.eval_complex(z).unwrap() + e().eval_complex(z).unwrap()).norm() < 1e-15);
        assert!(IntrinsicFunction::scaled(&e(), 0.0).is_err());
        for t in [0.01, 0.5, 3.0, -40.0] {
            let st = IntrinsicFunction::scaled(&e(), t).unwrap();
            let cert = st.decay().unwrap().standard();
            let plan = SamplePlan { radii: 300, ..Default::default() };
            for psi in plan.angles(THETA) {
                for k in 0..plan.radii {
                    let r = plan.radius(k);
                    let v = st.value(Complex64::from_polar(r, psi)).unwrap().norm();
                    assert!(v <= cert.bound(r) * (1.0 + 1e-12));
                    assert!(v <= st.decay().unwrap().bound(r) * (1.0 + 1e-12));
                }
            }
        }
    }

    #[test]
    fn f0_infty_values() {
        assert!((f0_infty(&e()).unwrap() - PI).abs() < 1e-8);
        let eg2 = IntrinsicFunction::product(vec![e(), e(), e()]).unwrap();
        assert!((f0_infty(&eg2).unwrap() - PI / 8.0).abs() < 1e-8);
        let along = line_integral(&e(), Complex64::from_polar(1.0, PI / 8.0)).unwrap();
        assert!((along - PI).norm() < 1e-6);
        // even functions integrate to zero against dt/t
        assert!(f0_infty(&e2()).unwrap().abs() < 1e-12);
    }

    #[test]
    fn f_ab_function() {
        let z = Complex64::new(1.0, 0.4);
        let zero = IntrinsicFunction::f_ab(&e(), 2.0, 2.0).unwrap();
        assert_eq!(zero.eval_complex(z).unwrap(), Complex64::new(0.0, 0.0));
        assert!(IntrinsicFunction::f_ab(&e(), 2.0, 1.0).is_err());
        assert!(IntrinsicFunction::f_ab(&e(), 0.0, 1.0).is_err());
        // at s = 1 the gap to pi is exactly the arctan tail
        for k in 1..=4 {
            let (a, b) = (10f64.powi(-k), 10f64.powi(k));
            let fab = IntrinsicFunction::f_ab(&e(), a, b).unwrap();
            let v = fab.eval_xy(1.0, 0.0).unwrap().0;
            let tail = 2.0 * (a.atan() + FRAC_PI_2 - b.atan());
            assert!(((PI - v) - tail).abs() < 1e-12, "k={k}");
        }
        let fab = IntrinsicFunction::f_ab(&e(), 1e-3, 1e3).unwrap();
        let cert = e().decay().unwrap().c_alpha;
        let sup = certify_bounded(&fab, &SamplePlan { radii: 100, ..Default::default() }).unwrap().sup_norm;
        assert!(sup <= cert * PI);
    }

    #[test]
    fn f_ab_certificate_holds() {
        let fab = IntrinsicFunction::f_ab(&e(), 0.1, 10.0).unwrap();
        let cert = *fab.decay().unwrap();
        let plan = SamplePlan { radii: 120, ..Default::default() };
        for psi in plan.angles(THETA) {
            for k in 0..plan.radii {
                let r = plan.radius(k);
                let v = fab.value(Complex64::from_polar(r, psi)).unwrap().norm();
                assert!(v <= cert.bound(r) * (1.0 + 1e-9));
            }
        }
    }

    #[test]
    fn certification_examples() {
        let one = IntrinsicFunction::constant(1.0, THETA).unwrap();
        for alpha in [0.1, 0.5, 1.0, 2.0] {
            assert!(certify_decay(&one, alpha, &SamplePlan::default()).is_err());
        }
        assert!(certify_decay(&e2(), 2.0, &SamplePlan::default()).is_ok());
        assert!(certify_decay(&e(), 2.0, &SamplePlan::default()).is_err());
        let b = certify_bounded(&one, &SamplePlan::default()).unwrap();
        assert_eq!(b.sup_norm, 1.0);
    }

    #[test]
    fn product_certificates_multiply() {
        let p = e2();
        let c = p.decay().unwrap();
        assert_eq!(c.alpha, 2.0);
        assert!((c.c_alpha - 1.0 / THETA.cos().powi(2)).abs() < 1e-15);
        let fitted = certify_decay(&p, 2.0, &SamplePlan::default()).unwrap();
        assert!(fitted.c_alpha <= c.c_alpha * (1.0 + 1e-12));
    }

    fn builtins() -> Vec<IntrinsicFunction> {
        vec![
            e(),
            e2(),
            IntrinsicFunction::e_alpha(0.5, THETA).unwrap(),
            IntrinsicFunction::scaled(&e(), 2.5).unwrap(),
            IntrinsicFunction::rational(vec![0.0, 0.0, 1.0], vec![1.0, 0.0, 1.0], THETA).unwrap(),
            IntrinsicFunction::f_ab(&e(), 0.1, 10.0).unwrap(),
            IntrinsicFunction::sum(vec![e(), e2()]).unwrap(),
        ]
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(100))]
        #[test]
        fn cauchy_riemann_holds(r in 0.05f64..20.0, frac in 0.0f64..0.95, left in any::<bool>()) {
            let psi = frac * THETA;
            let z = Complex64::from_polar(r, if left { PI - psi } else { psi });
            for f in builtins() {
                let res = cauchy_riemann_residual(&f, z.re, z.im).unwrap();
                prop_assert!(res <= 1e-6, "{}: {res}", f.name());
            }
        }

        #[test]
        fn slice_transport_is_exact(x in -3.0f64..3.0, y in 0.01f64..1.0, a in -1.0f64..1.0, b in -1.0f64..1.0) {
            prop_assume!(a.abs() + b.abs() > 0.1);
            let nrm = (a * a + b * b).sqrt();
            let j1 = Paravector::unit(2, 1);
            let j2 = Paravector::new(0.0, vec![a / nrm, b / nrm]).unwrap();
            let f = e();
            prop_assume!(f.in_domain(Complex64::new(x, y)));
            let v1 = f.eval_xy(x, y).unwrap();
            let v2 = f.eval_xy(x, y).unwrap();
            prop_assert_eq!(v1, v2);
            let p1 = f.eval(&Paravector::from_slice(x, y, &j1)).unwrap();
            let p2 = f.eval(&Paravector::from_slice(x, y, &j2)).unwrap();
            prop_assert!((p1.s0 - p2.s0).abs() < 1e-14);
            prop_assert!((p1.imag_norm() - p2.imag_norm()).abs() < 1e-14);
        }

        #[test]
        fn real_axis_values_are_real(x in 0.01f64..50.0, neg in any::<bool>()) {
            let x = if neg { -x } else { x };
            for f in builtins() {
                let (_, f1) = f.eval_xy(x, 0.0).unwrap();
                prop_assert!(f1.abs() <= 1e-14, "{}", f.name());
            }
        }
    }
}
