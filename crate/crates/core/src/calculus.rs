//! The ω-functional calculus by contour quadrature, the rational calculus,
//! the H∞-calculus through the regularizer `e`, scaled calculi and `f_{a,b}(T)`.
//!
//! The contour `∂D_φ ∩ C_J` is parametrized by `s = ε e^u e^{σ J φ}` for
//! `σ, ε = ±1`; after substituting `r = ε e^u` the kernel becomes
//! `σ ε J e^{σ J φ} e^u du`, which is integrated in `u` on `[u_min, u_max]`.

use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::clifford::Paravector;
use crate::error::{Error, Result};
use crate::linalg::{self, pairwise_sum};
use crate::module::{scalar_action_matrix, CliffordOperator};
use crate::slice::{certify_bounded, gauss_legendre, BoundedCertificate, IntrinsicFunction, Profile, SamplePlan};
use crate::spectrum::{check_bisectorial, BisectorReport, RayPlan, ResolventKernel};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum QuadratureRule {
    Trapezoid,
    /// 10-point Gauss-Legendre panels.
    GaussLegendre,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ContourConfig {
    pub j: Paravector,
    pub phi: f64,
    pub u_min: f64,
    pub u_max: f64,
    /// Nodes per ray.
    pub nodes: usize,
    pub rule: QuadratureRule,
}

/// Relative floor added to quadrature error estimates for rounding.
pub const ROUNDOFF_FLOOR: f64 = 1e-10;

impl ContourConfig {
    /// Trapezoid rule on `u ∈ [-30, 30]` with 2001 nodes per ray and `J = e_1`.
    pub fn new(n: usize, phi: f64) -> Self {
        ContourConfig { j: Paravector::unit(n, 1), phi, u_min: -30.0, u_max: 30.0, nodes: 2001, rule: QuadratureRule::Trapezoid }
    }

    pub fn with_j(mut self, j: Paravector) -> Self {
        self.j = j;
        self
    }

    pub fn with_nodes(mut self, nodes: usize) -> Self {
        self.nodes = nodes;
        self
    }

    pub fn with_rule(mut self, rule: QuadratureRule) -> Self {
        self.rule = rule;
        self
    }

    /// Checks `omega < phi < theta`, the grid, and the slice unit.
    pub fn validate(&self, omega: f64, theta: f64) -> Result<()> {
        if !(omega < self.phi && self.phi < theta) {
            return Err(Error::Precondition(format!(
                "contour angle {} must lie strictly between omega = {omega} and theta = {theta}",
                self.phi
            )));
        }
        if !(self.u_min < self.u_max) {
            return Err(Error::Argument("u_min must be below u_max".into()));
        }
        if self.nodes < 16 {
            return Err(Error::Argument(format!("at least 16 nodes per ray required, got {}", self.nodes)));
        }
        if !self.j.is_imaginary_unit(1e-12) {
            return Err(Error::Argument("J must be a unit of the imaginary sphere".into()));
        }
        Ok(())
    }

    /// `(u, fine weight, coarse weight)` on one ray.
    fn ray_rule(&self) -> Vec<(f64, f64, f64)> {
        let (lo, hi) = (self.u_min, self.u_max);
        match self.rule {
            QuadratureRule::Trapezoid => {
                // an odd count makes every other node a trapezoid grid of step 2h
                let n = if self.nodes % 2 == 0 { self.nodes + 1 } else { self.nodes };
                let h = (hi - lo) / (n - 1) as f64;
                (0..n)
                    .map(|k| {
                        let end = k == 0 || k == n - 1;
                        let fine = if end { 0.5 * h } else { h };
                        let coarse = if k % 2 == 1 { 0.0 } else if end { h } else { 2.0 * h };
                        (lo + k as f64 * h, fine, coarse)
                    })
                    .collect()
            }
            QuadratureRule::GaussLegendre => {
                let panels = self.nodes.div_ceil(10).max(2);
                let (x, w) = gauss_legendre(10);
                let mut out = Vec::new();
                for (count, fine) in [(panels, true), (panels / 2, false)] {
                    let h = (hi - lo) / count as f64;
                    for p in 0..count {
                        let mid = lo + h * (p as f64 + 0.5);
                        for (xi, wi) in x.iter().zip(&w) {
                            let wt = 0.5 * h * wi;
                            out.push((mid + 0.5 * h * xi, if fine { wt } else { 0.0 }, if fine { 0.0 } else { wt }));
                        }
                    }
                }
                out
            }
        }
    }
}

/// Operator value with nonnegative error estimates.
#[derive(Debug, Clone, PartialEq)]
pub struct CalculusResult {
    pub op: CliffordOperator,
    pub trunc_err: f64,
    pub disc_err: f64,
}

impl CalculusResult {
    pub fn exact(op: CliffordOperator) -> Self {
        CalculusResult { op, trunc_err: 0.0, disc_err: 0.0 }
    }

    /// Truncation plus discretization estimate plus a rounding floor.
    pub fn combined_error(&self) -> f64 {
        self.trunc_err + self.disc_err + ROUNDOFF_FLOOR * self.op.norm().max(1.0)
    }
}

#[derive(Debug, Clone, Copy)]
struct Node {
    x: f64,
    y: f64,
    fine: Complex64,
    coarse: Complex64,
}

/// Contour nodes with cached `Q_s[T]^{-1}` and `T Q_s[T]^{-1}` in the real
/// representation.
pub struct ContourEngine {
    t: CliffordOperator,
    kernel: ResolventKernel,
    cfg: ContourConfig,
    c_phi: f64,
    omega: f64,
    l_j: DMatrix<f64>,
    nodes: Vec<Node>,
    /// Column `k` holds `Q^{-1}` (resp. `T Q^{-1}`) at node `k`, column-major.
    cache: Option<(DMatrix<f64>, DMatrix<f64>)>,
}

/// Largest cache for the resolvent factors, in bytes.
const CACHE_LIMIT: usize = 256 << 20;

struct Partial {
    m1: DMatrix<f64>,
    m2: DMatrix<f64>,
    c1: DMatrix<f64>,
    c2: DMatrix<f64>,
}

impl std::ops::Add for Partial {
    type Output = Partial;
    fn add(self, o: Partial) -> Partial {
        Partial { m1: self.m1 + o.m1, m2: self.m2 + o.m2, c1: self.c1 + o.c1, c2: self.c2 + o.c2 }
    }
}

impl ContourEngine {
    /// Requires a passing bisectoriality report of angle below `cfg.phi`.
    pub fn new(t: &CliffordOperator, report: &BisectorReport, cfg: &ContourConfig) -> Result<Self> {
        if !report.passed() {
            return Err(Error::Precondition(format!(
                "operator is not certified bisectorial: {}",
                report.reason.clone().unwrap_or_else(|| "no reason recorded".into())
            )));
        }
        if cfg.j.n() != t.n() {
            return Err(Error::Dimension("slice unit and operator live over different algebras".into()));
        }
        cfg.validate(report.omega, std::f64::consts::FRAC_PI_2)?;
        let c_phi = report
            .c_phi(cfg.phi)
            .ok_or_else(|| Error::Precondition(format!("no resolvent constant tabulated at or below phi = {}", cfg.phi)))?;
        let kernel = ResolventKernel::new(t);
        let mut nodes = Vec::new();
        let rule = cfg.ray_rule();
        for sigma in [1.0, -1.0] {
            for eps in [1.0, -1.0] {
                let rot = Complex64::from_polar(1.0, sigma * cfg.phi);
                for &(u, wf, wc) in &rule {
                    let z = rot * (eps * u.exp());
                    let kappa = Complex64::i() * (sigma * eps) * rot * (u.exp() / (2.0 * PI));
                    nodes.push(Node { x: z.re, y: z.im, fine: kappa * wf, coarse: kappa * wc });
                }
            }
        }
        let d = kernel.dim();
        let cache = if 2 * d * d * 8 * nodes.len() <= CACHE_LIMIT {
            let mats: Vec<Result<(DMatrix<f64>, DMatrix<f64>)>> = nodes
                .par_iter()
                .map(|nd| {
                    let qinv = kernel.q_inverse(nd.x, nd.y.abs()).map_err(|e| node_error(e, nd))?;
                    let tq = kernel.rho() * &qinv;
                    Ok((qinv, tq))
                })
                .collect();
            let mats = mats.into_iter().collect::<Result<Vec<_>>>()?;
            let mut q = DMatrix::zeros(d * d, nodes.len());
            let mut tq = DMatrix::zeros(d * d, nodes.len());
            for (k, (a, b)) in mats.iter().enumerate() {
                q.column_mut(k).copy_from_slice(a.as_slice());
                tq.column_mut(k).copy_from_slice(b.as_slice());
            }
            Some((q, tq))
        } else {
            None
        };
        let l_j = scalar_action_matrix(&cfg.j.to_clifford(), t.m());
        Ok(ContourEngine { t: t.clone(), kernel, cfg: cfg.clone(), c_phi, omega: report.omega, l_j, nodes, cache })
    }

    pub fn operator(&self) -> &CliffordOperator {
        &self.t
    }

    pub fn config(&self) -> &ContourConfig {
        &self.cfg
    }

    pub fn c_phi(&self) -> f64 {
        self.c_phi
    }

    /// Angle of the bisectoriality certificate.
    pub fn certified_omega(&self) -> f64 {
        self.omega
    }

    /// Number of contour nodes over all four rays.
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// The contour point `x + i y` of node `k` in complex slice coordinates.
    pub fn node_point(&self, k: usize) -> Complex64 {
        Complex64::new(self.nodes[k].x, self.nodes[k].y)
    }

    fn factors(&self, k: usize) -> Result<(DMatrix<f64>, DMatrix<f64>)> {
        let nd = &self.nodes[k];
        let qinv = self.kernel.q_inverse(nd.x, nd.y.abs()).map_err(|e| node_error(e, nd))?;
        let tq = self.kernel.rho() * &qinv;
        Ok((qinv, tq))
    }

    /// Integrates `(1/2π) ∫ S_L^{-1}(s,T) ds_J F(s)` where `values[k]` is the
    /// complex profile of `F` at node `k`. Returns the fine and coarse rules
    /// in the real representation.
    pub fn integrate_values(&self, values: &[Complex64]) -> Result<(DMatrix<f64>, DMatrix<f64>)> {
        if values.len() != self.nodes.len() {
            return Err(Error::Dimension("one value per contour node required".into()));
        }
        if let Some(k) = values.iter().position(|v| !(v.re.is_finite() && v.im.is_finite())) {
            return Err(node_error(
                Error::Numerical { what: "non-finite function value".into(), location: String::new() },
                &self.nodes[k],
            ));
        }
        let d = self.kernel.dim();
        if let Some((q, tq)) = &self.cache {
            // S_L^{-1}(s) L(a + bJ) = [(xa + yb) Q^{-1} - a T Q^{-1}] + [(xb - ya) Q^{-1} - b T Q^{-1}] L_J
            let coeffs = |w: fn(&Node) -> Complex64| {
                let mut out: [DVector<f64>; 4] = std::array::from_fn(|_| DVector::zeros(self.nodes.len()));
                for (k, (nd, v)) in self.nodes.iter().zip(values).enumerate() {
                    let c = w(nd) * v;
                    let (a, b) = (c.re, c.im);
                    out[0][k] = nd.x * a + nd.y * b;
                    out[1][k] = -a;
                    out[2][k] = nd.x * b - nd.y * a;
                    out[3][k] = -b;
                }
                let m1 = q * &out[0] + tq * &out[1];
                let m2 = q * &out[2] + tq * &out[3];
                let m1 = DMatrix::from_column_slice(d, d, m1.as_slice());
                let m2 = DMatrix::from_column_slice(d, d, m2.as_slice());
                &m1 + &m2 * &self.l_j
            };
            return Ok((coeffs(|nd| nd.fine), coeffs(|nd| nd.coarse)));
        }
        let term = |k: usize| -> Result<Partial> {
            let nd = &self.nodes[k];
            let zero = || DMatrix::zeros(d, d);
            let v = values[k];
            if v == Complex64::new(0.0, 0.0) || (nd.fine == Complex64::new(0.0, 0.0) && nd.coarse == Complex64::new(0.0, 0.0)) {
                return Ok(Partial { m1: zero(), m2: zero(), c1: zero(), c2: zero() });
            }
            let (qinv, tq) = self.factors(k)?;
            // S_L^{-1}(s) L(a + bJ) = [(xa + yb) Q^{-1} - a T Q^{-1}] + [(xb - ya) Q^{-1} - b T Q^{-1}] L_J
            let split = |w: Complex64| {
                let c = w * v;
                let (a, b) = (c.re, c.im);
                (&qinv * (nd.x * a + nd.y * b) - &tq * a, &qinv * (nd.x * b - nd.y * a) - &tq * b)
            };
            let (m1, m2) = split(nd.fine);
            let (c1, c2) = split(nd.coarse);
            Ok(Partial { m1, m2, c1, c2 })
        };
        let p = pairwise_sum(self.nodes.len(), &|k| Acc(term(k)))
            .ok_or_else(|| Error::Argument("empty contour".into()))?
            .0?;
        Ok((&p.m1 + &p.m2 * &self.l_j, &p.c1 + &p.c2 * &self.l_j))
    }

    fn values_of(&self, f: &IntrinsicFunction, scale: f64) -> Result<Vec<Complex64>> {
        self.nodes
            .par_iter()
            .map(|nd| {
                let z = Complex64::new(nd.x, nd.y) * scale;
                f.eval_complex(z).map_err(|e| node_error(e, nd))
            })
            .collect()
    }

    fn finish(&self, fine: DMatrix<f64>, coarse: DMatrix<f64>, trunc_err: f64) -> Result<CalculusResult> {
        let disc_err = linalg::spectral_norm(&(&fine - &coarse));
        let op = CliffordOperator::from_real_rep(self.t.n(), self.t.m(), &fine)?;
        Ok(CalculusResult { op, trunc_err, disc_err })
    }

    fn check_function(&self, f: &IntrinsicFunction) -> Result<()> {
        if f.decay().is_none() {
            return Err(Error::Precondition(format!("{} has no decay certificate", f.name())));
        }
        if !(f.theta() > self.cfg.phi) {
            return Err(Error::Precondition(format!(
                "contour angle {} must lie below the domain angle {} of {}",
                self.cfg.phi,
                f.theta(),
                f.name()
            )));
        }
        Ok(())
    }

    /// Truncation bound `(C_φ / 2π) Σ_± ∫_{|r| ∉ [e^{u_min}, e^{u_max}]} bound(|r|) dr/|r|`.
    fn truncation(&self, f: &IntrinsicFunction, scale: f64) -> f64 {
        let cert = f.decay().expect("checked");
        let cert = crate::slice::DecayCertificate { lambda: cert.lambda * scale.abs(), ..*cert };
        self.c_phi / (2.0 * PI) * 2.0 * cert.tail(self.cfg.u_min.exp(), self.cfg.u_max.exp())
    }

    /// `f(T)` for `f` with a decay certificate.
    pub fn omega(&self, f: &IntrinsicFunction) -> Result<CalculusResult> {
        self.check_function(f)?;
        let values = self.values_of(f, 1.0)?;
        let (fine, coarse) = self.integrate_values(&values)?;
        self.finish(fine, coarse, self.truncation(f, 1.0))
    }

    /// `f(tT)`, integrated as `f(t ·)(T)` on the contour of `T`.
    pub fn scaled(&self, f: &IntrinsicFunction, t: f64) -> Result<CalculusResult> {
        if t == 0.0 || !t.is_finite() {
            return Err(Error::Argument("scaling factor must be finite and nonzero".into()));
        }
        self.check_function(f)?;
        let values = self.values_of(f, t)?;
        let (fine, coarse) = self.integrate_values(&values)?;
        self.finish(fine, coarse, self.truncation(f, t))
    }

    /// `f(T) = e(T)^{-1} (ef)(T)` for bounded `f`.
    pub fn h_inf(&self, f: &IntrinsicFunction, bounded: Option<BoundedCertificate>) -> Result<CalculusResult> {
        let sup = match bounded {
            Some(b) => b.sup_norm,
            None => certify_bounded(f, &SamplePlan::default())?.sup_norm,
        };
        let e = IntrinsicFunction::regularizer(f.theta())?;
        let cert = *e.decay().expect("regularizer is certified");
        let ef = IntrinsicFunction::product(vec![e.clone(), f.clone()])?
            .with_decay(crate::slice::DecayCertificate { c_alpha: cert.c_alpha * sup, ..cert });
        let efr = self.omega(&ef)?;
        let e_t = rational_calculus(&e, &self.t)?;
        let e_rep = e_t.real_rep();
        let (smin, _) = linalg::check_invertible(&e_rep).map_err(|err| match err {
            Error::NotInvertible { sigma_min, sigma_max } => Error::NotInvertible { sigma_min, sigma_max },
            other => other,
        })?;
        let x = linalg::solve_refined(&e_rep, &efr.op.real_rep())?;
        let op = CliffordOperator::from_real_rep(self.t.n(), self.t.m(), &x)?;
        Ok(CalculusResult { op, trunc_err: efr.trunc_err / smin, disc_err: efr.disc_err / smin })
    }

    /// `f_{a,b}(T) = ∫_{(-b,-a) ∪ (a,b)} f(tT) dt/t`, summing scaled calculi
    /// over 8-point Gauss-Legendre panels of width at most 0.25 in `ln t`.
    pub fn f_ab(&self, f: &IntrinsicFunction, a: f64, b: f64) -> Result<CalculusResult> {
        if !(a > 0.0 && a <= b && b.is_finite()) {
            return Err(Error::Argument(format!("f_ab needs 0 < a <= b < inf, got a = {a}, b = {b}")));
        }
        self.check_function(f)?;
        let (lo, hi) = (a.ln(), b.ln());
        let d = self.kernel.dim();
        if hi == lo {
            let op = CliffordOperator::zero(self.t.n(), self.t.m());
            return Ok(CalculusResult::exact(op));
        }
        let panels = ((hi - lo) / 0.25).ceil() as usize;
        let h = (hi - lo) / panels as f64;
        let (x, w) = gauss_legendre(8);
        let mut taus = Vec::new();
        for p in 0..panels {
            let mid = lo + h * (p as f64 + 0.5);
            for (xi, wi) in x.iter().zip(&w) {
                taus.push(((mid + 0.5 * h * xi).exp(), 0.5 * h * wi));
            }
        }
        let parts: Vec<Result<(DMatrix<f64>, f64, f64)>> = taus
            .par_iter()
            .map(|&(tau, wt)| {
                let p = self.scaled(f, tau)?;
                let m = self.scaled(f, -tau)?;
                let diff = (p.op.real_rep() - m.op.real_rep()) * wt;
                Ok((diff, wt * (p.trunc_err + m.trunc_err), wt * (p.disc_err + m.disc_err)))
            })
            .collect();
        let parts = parts.into_iter().collect::<Result<Vec<_>>>()?;
        let sum = pairwise_sum(parts.len(), &|k| parts[k].0.clone()).unwrap_or_else(|| DMatrix::zeros(d, d));
        let trunc = parts.iter().map(|p| p.1).sum();
        let disc = parts.iter().map(|p| p.2).sum();
        let op = CliffordOperator::from_real_rep(self.t.n(), self.t.m(), &sum)?;
        Ok(CalculusResult { op, trunc_err: trunc, disc_err: disc })
    }
}

/// Partial sums that keep the first error in index order.
struct Acc(Result<Partial>);

impl std::ops::Add for Acc {
    type Output = Acc;
    fn add(self, o: Acc) -> Acc {
        match (self.0, o.0) {
            (Ok(a), Ok(b)) => Acc(Ok(a + b)),
            (Err(e), _) | (_, Err(e)) => Acc(Err(e)),
        }
    }
}

fn node_error(e: Error, nd: &Node) -> Error {
    let location = format!("contour node s = {} + J({})", nd.x, nd.y);
    match e {
        Error::Numerical { what, .. } => Error::Numerical { what, location },
        Error::NotInvertible { sigma_min, sigma_max } => Error::Numerical {
            what: format!("Q_s[T] not invertible (sigma_min = {sigma_min:e}, sigma_max = {sigma_max:e})"),
            location,
        },
        Error::Domain(msg) => Error::Numerical { what: msg, location },
        other => other,
    }
}

/// Real-coefficient numerator and denominator when `f` is a rational
/// combination of built-in rational pieces.
pub fn as_rational(f: &IntrinsicFunction) -> Option<(Vec<f64>, Vec<f64>)> {
    fn mul(p: &[f64], q: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; p.len() + q.len() - 1];
        for (i, a) in p.iter().enumerate() {
            for (j, b) in q.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        out
    }
    fn add(p: &[f64], q: &[f64]) -> Vec<f64> {
        (0..p.len().max(q.len())).map(|k| p.get(k).unwrap_or(&0.0) + q.get(k).unwrap_or(&0.0)).collect()
    }
    match f.profile() {
        Profile::Regularizer => Some((vec![0.0, 1.0], vec![1.0, 0.0, 1.0])),
        Profile::EAlpha(a) if *a == 1.0 => Some((vec![0.0, 1.0], vec![1.0, 0.0, 1.0])),
        Profile::Rational { num, den } => Some((num.clone(), den.clone())),
        Profile::Scaled { f, t } => {
            let (n, d) = as_rational(f)?;
            let sc = |c: &[f64]| c.iter().enumerate().map(|(k, v)| v * t.powi(k as i32)).collect::<Vec<_>>();
            Some((sc(&n), sc(&d)))
        }
        Profile::Product(fs) => fs.iter().try_fold((vec![1.0], vec![1.0]), |(n, d), g| {
            let (gn, gd) = as_rational(g)?;
            Some((mul(&n, &gn), mul(&d, &gd)))
        }),
        Profile::Sum(fs) => fs.iter().try_fold((vec![0.0], vec![1.0]), |(n, d), g| {
            let (gn, gd) = as_rational(g)?;
            Some((add(&mul(&n, &gd), &mul(&gn, &d)), mul(&d, &gd)))
        }),
        _ => None,
    }
}

fn poly_real(coeffs: &[f64], rho: &DMatrix<f64>) -> DMatrix<f64> {
    let d = rho.nrows();
    coeffs.iter().rev().fold(DMatrix::zeros(d, d), |acc, &c| {
        let mut next = &acc * rho;
        for i in 0..d {
            next[(i, i)] += c;
        }
        next
    })
}

/// `p(T) q(T)^{-1}` for rational `f = p/q`.
pub fn rational_calculus(f: &IntrinsicFunction, t: &CliffordOperator) -> Result<CliffordOperator> {
    let (num, den) = as_rational(f)
        .ok_or_else(|| Error::Argument(format!("{} is not a rational function", f.name())))?;
    let rho = t.real_rep();
    let p = poly_real(&num, &rho);
    let q = poly_real(&den, &rho);
    let x = linalg::solve_refined(&q, &p)?;
    CliffordOperator::from_real_rep(t.n(), t.m(), &x)
}

pub fn omega_calculus(f: &IntrinsicFunction, t: &CliffordOperator, report: &BisectorReport, cfg: &ContourConfig) -> Result<CalculusResult> {
    ContourEngine::new(t, report, cfg)?.omega(f)
}

pub fn h_inf_calculus(f: &IntrinsicFunction, t: &CliffordOperator, report: &BisectorReport, cfg: &ContourConfig) -> Result<CalculusResult> {
    ContourEngine::new(t, report, cfg)?.h_inf(f, None)
}

pub fn scaled_calculus(f: &IntrinsicFunction, s: f64, t: &CliffordOperator, report: &BisectorReport, cfg: &ContourConfig) -> Result<CalculusResult> {
    ContourEngine::new(t, report, cfg)?.scaled(f, s)
}

pub fn f_ab_operator(f: &IntrinsicFunction, a: f64, b: f64, t: &CliffordOperator, report: &BisectorReport, cfg: &ContourConfig) -> Result<CalculusResult> {
    ContourEngine::new(t, report, cfg)?.f_ab(f, a, b)
}

/// Evaluates `f(T)` on either calculus: the ω-calculus when `f` decays,
/// the H∞-calculus otherwise.
pub fn evaluate(engine: &ContourEngine, f: &IntrinsicFunction) -> Result<CalculusResult> {
    if f.decay().is_some() {
        engine.omega(f)
    } else {
        engine.h_inf(f, None)
    }
}

/// `sgn(T)` by the Newton iteration `X <- (X + X^{-1}) / 2` on the real
/// representation; requires no spectrum on the imaginary axis.
pub fn sign_operator(t: &CliffordOperator) -> Result<CliffordOperator> {
    let mut x = t.real_rep();
    for _ in 0..100 {
        let inv = linalg::lu_inverse(&x).ok_or_else(|| Error::NotInvertible { sigma_min: 0.0, sigma_max: linalg::spectral_norm(&x) })?;
        let next = (&x + inv) * 0.5;
        let step = (&next - &x).amax();
        x = next;
        if step <= 1e-15 * x.amax().max(1.0) {
            return CliffordOperator::from_real_rep(t.n(), t.m(), &x);
        }
    }
    Err(Error::Numerical { what: "sign iteration did not converge".into(), location: "sgn(T)".into() })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AdjointGap {
    /// `||f(T*) - f(T)*||`.
    pub gap: f64,
    /// Combined error estimate of both evaluations.
    pub tolerance: f64,
}

/// Computes `f(T*)` and `f(T)*` independently and returns their distance.
pub fn adjoint_calculus_check(f: &IntrinsicFunction, t: &CliffordOperator, omega: f64, cfg: &ContourConfig) -> Result<AdjointGap> {
    let plan = RayPlan::for_angles(omega, &[cfg.phi]);
    let ts = t.adjoint();
    let r = check_bisectorial(t, omega, &plan)?;
    let rs = check_bisectorial(&ts, omega, &plan)?;
    let a = evaluate(&ContourEngine::new(t, &r, cfg)?, f)?;
    let b = evaluate(&ContourEngine::new(&ts, &rs, cfg)?, f)?;
    let gap = b.op.distance(&a.op.adjoint())?;
    Ok(AdjointGap { gap, tolerance: a.combined_error() + b.combined_error() })
}

/// The a priori bound `||f(T)|| <= C_φ C_α / α` for `f` with a decay certificate.
pub fn omega_norm_bound(f: &IntrinsicFunction, c_phi: f64) -> Option<f64> {
    f.decay().map(|c| c_phi * c.integral() / PI)
}
