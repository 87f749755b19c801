//! Quadratic norms `(∫ ||g(tT)v||² dt/|t|)^{1/2}`, the frame operator and its
//! extreme eigenvalues, the dyadic random-sign identity and discrete dual
//! selection.
//!
//! All `t`-integrals use the trapezoid rule in `ln|t|` on both half-lines.
//! Each `g(tT)` is integrated on the contour of `T` as `g(t ·)(T)`.

use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;
use serde::Serialize;

use crate::calculus::ContourEngine;
use crate::error::{Error, Result};
use crate::linalg::{self, pairwise_sum, pairwise_sum_f64};
use crate::module::ModuleVector;
use crate::slice::IntrinsicFunction;

/// Log-spaced grid for `|t| ∈ [t_min, t_max]`, `nodes` per sign.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct QuadGridConfig {
    pub t_min: f64,
    pub t_max: f64,
    pub nodes: usize,
}

impl QuadGridConfig {
    pub fn new(t_min: f64, t_max: f64, nodes: usize) -> Result<Self> {
        if !(t_min > 0.0 && t_min < t_max && t_max.is_finite()) {
            return Err(Error::Argument(format!("need 0 < t_min < t_max < inf, got [{t_min}, {t_max}]")));
        }
        if nodes < 32 {
            return Err(Error::Argument(format!("at least 32 nodes per sign required, got {nodes}")));
        }
        Ok(QuadGridConfig { t_min, t_max, nodes })
    }

    /// `|t| ∈ [1e-5, 1e5] / ||T||` with 401 nodes per sign.
    pub fn for_norm(norm: f64) -> Self {
        let s = if norm > 0.0 { 1.0 / norm } else { 1.0 };
        QuadGridConfig { t_min: 1e-5 * s, t_max: 1e5 * s, nodes: 401 }
    }

    /// `(t, fine weight, coarse weight)` for the measure `dt/|t|`; the node
    /// count is made odd so every other node forms the halved rule.
    pub fn nodes(&self) -> Vec<(f64, f64, f64)> {
        let n = if self.nodes % 2 == 0 { self.nodes + 1 } else { self.nodes };
        let (lo, hi) = (self.t_min.ln(), self.t_max.ln());
        let h = (hi - lo) / (n - 1) as f64;
        let mut out = Vec::with_capacity(2 * n);
        for sign in [1.0, -1.0] {
            for k in 0..n {
                let end = k == 0 || k == n - 1;
                let fine = if end { 0.5 * h } else { h };
                let coarse = if k % 2 == 1 { 0.0 } else if end { h } else { 2.0 * h };
                out.push((sign * (lo + k as f64 * h).exp(), fine, coarse));
            }
        }
        out
    }
}

/// `g(tT)` on a `t`-grid with quadrature weights and per-node errors.
pub struct FrameSampler {
    g: IntrinsicFunction,
    grid: QuadGridConfig,
    times: Vec<f64>,
    fine: Vec<f64>,
    coarse: Vec<f64>,
    ops: Vec<DMatrix<f64>>,
    op_norms: Vec<f64>,
    op_errs: Vec<f64>,
    /// Indices of the four grid ends: `(+t_min, +t_max, -t_min, -t_max)`.
    ends: [usize; 4],
    beta: f64,
    n: usize,
    m: usize,
}

impl FrameSampler {
    pub fn new(g: &IntrinsicFunction, engine: &ContourEngine, grid: &QuadGridConfig) -> Result<Self> {
        let beta = g
            .decay()
            .ok_or_else(|| Error::Precondition(format!("{} has no decay certificate", g.name())))?
            .alpha;
        let nodes = grid.nodes();
        let evals: Vec<Result<(DMatrix<f64>, f64)>> = nodes
            .par_iter()
            .map(|&(t, _, _)| {
                let r = engine.scaled(g, t)?;
                let err = r.combined_error();
                Ok((r.op.real_rep(), err))
            })
            .collect();
        let evals = evals.into_iter().collect::<Result<Vec<_>>>()?;
        let per = nodes.len() / 2;
        let ops: Vec<DMatrix<f64>> = evals.iter().map(|e| e.0.clone()).collect();
        let op_norms = ops.par_iter().map(linalg::spectral_norm).collect();
        let t = engine.operator();
        Ok(FrameSampler {
            g: g.clone(),
            grid: *grid,
            times: nodes.iter().map(|n| n.0).collect(),
            fine: nodes.iter().map(|n| n.1).collect(),
            coarse: nodes.iter().map(|n| n.2).collect(),
            op_errs: evals.iter().map(|e| e.1).collect(),
            ops,
            op_norms,
            ends: [0, per - 1, per, 2 * per - 1],
            beta,
            n: t.n(),
            m: t.m(),
        })
    }

    pub fn function(&self) -> &IntrinsicFunction {
        &self.g
    }

    pub fn grid(&self) -> &QuadGridConfig {
        &self.grid
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn weights(&self) -> &[f64] {
        &self.fine
    }

    /// Real representation of `g(t_k T)`.
    pub fn op(&self, k: usize) -> &DMatrix<f64> {
        &self.ops[k]
    }

    pub fn op_error(&self, k: usize) -> f64 {
        self.op_errs[k]
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    /// Tail estimate for `∫ h(t) dt/|t|` outside the grid, assuming `h`
    /// decays like `|t|^p` beyond each end (`t^{-p}` at large `|t|`), given the
    /// boundary values.
    fn tails(&self, boundary: impl Fn(usize) -> f64, p: f64) -> f64 {
        self.ends.iter().map(|&k| boundary(k) / p).sum()
    }

    /// `Θ = Σ_k w_k ρ(g(t_k T))ᵀ ρ(g(t_k T))` with its error estimate.
    pub fn frame_operator(&self) -> FrameOperator {
        let d = self.ops[0].nrows();
        let gram = |w: &[f64]| {
            pairwise_sum(self.ops.len(), &|k| {
                if w[k] == 0.0 {
                    DMatrix::zeros(d, d)
                } else {
                    self.ops[k].tr_mul(&self.ops[k]) * w[k]
                }
            })
            .expect("nonempty grid")
        };
        let theta = gram(&self.fine);
        let half = gram(&self.coarse);
        let disc = linalg::spectral_norm(&(&theta - &half));
        let contour = pairwise_sum_f64(
            &(0..self.ops.len())
                .map(|k| self.fine[k] * (2.0 * self.op_norms[k] * self.op_errs[k] + self.op_errs[k].powi(2)))
                .collect::<Vec<_>>(),
        );
        let tail = self.tails(|k| self.op_norms[k].powi(2), 2.0 * self.beta);
        FrameOperator { theta: (&theta + theta.transpose()) * 0.5, disc, contour, tail }
    }

    /// `(∫ ||g(tT)v||² dt/|t|)^{1/2}` with an error estimate on the value.
    pub fn quadratic_norm(&self, v: &ModuleVector) -> Result<QuadraticNorm> {
        if v.n() != self.n || v.m() != self.m {
            return Err(Error::Dimension("vector does not match the operator".into()));
        }
        let x = v.flatten();
        let sq: Vec<f64> = self.ops.iter().map(|g| (g * &x).norm_squared()).collect();
        let fine = pairwise_sum_f64(&sq.iter().zip(&self.fine).map(|(s, w)| s * w).collect::<Vec<_>>());
        let coarse = pairwise_sum_f64(&sq.iter().zip(&self.coarse).map(|(s, w)| s * w).collect::<Vec<_>>());
        let xn = x.norm();
        let contour: f64 = (0..sq.len())
            .map(|k| self.fine[k] * (2.0 * sq[k].sqrt() * self.op_errs[k] * xn + (self.op_errs[k] * xn).powi(2)))
            .sum();
        let tail = self.tails(|k| sq[k], 2.0 * self.beta);
        let err_sq = (fine - coarse).abs() + contour + tail;
        let value = fine.sqrt();
        let error = if value > 0.0 { err_sq / (2.0 * value) } else { err_sq.sqrt() };
        Ok(QuadraticNorm { value, error: error.min(err_sq.sqrt()).max(0.0) })
    }

    /// Frame bounds from the extreme eigenvalues of the frame operator.
    pub fn frame_bounds(&self) -> FrameBounds {
        let f = self.frame_operator();
        let ev = linalg::symmetric_eigenvalues(&f.theta);
        let lo = ev[0];
        let hi = ev[ev.len() - 1];
        FrameBounds {
            c_lower: lo.max(0.0).sqrt(),
            d_upper: hi.max(0.0).sqrt(),
            theta_eigenvalues: ev,
            grid: self.grid,
            error: f.error(),
            theta: f.theta,
        }
    }
}

/// Assembled frame operator with the three error contributions in operator norm.
#[derive(Debug, Clone)]
pub struct FrameOperator {
    pub theta: DMatrix<f64>,
    /// Difference to the halved `t`-rule.
    pub disc: f64,
    /// Propagated contour errors of the `g(tT)`.
    pub contour: f64,
    /// Estimate of the integral outside the `t`-grid.
    pub tail: f64,
}

impl FrameOperator {
    pub fn error(&self) -> FrameError {
        FrameError { disc: self.disc, contour: self.contour, tail: self.tail }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FrameError {
    pub disc: f64,
    pub contour: f64,
    pub tail: f64,
}

impl FrameError {
    /// Error bound on the frame operator in operator norm.
    pub fn total(&self) -> f64 {
        self.disc + self.contour + self.tail
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct QuadraticNorm {
    pub value: f64,
    pub error: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct FrameBounds {
    pub c_lower: f64,
    pub d_upper: f64,
    pub theta_eigenvalues: Vec<f64>,
    pub grid: QuadGridConfig,
    pub error: FrameError,
    #[serde(skip)]
    pub theta: DMatrix<f64>,
}

impl FrameBounds {
    /// Error estimate of `c_lower` and `d_upper` propagated through the square root.
    pub fn bound_error(&self) -> (f64, f64) {
        let e = self.error.total();
        let prop = |b: f64| if b > 0.0 { (e / (2.0 * b)).min(e.sqrt()) } else { e.sqrt() };
        (prop(self.c_lower), prop(self.d_upper))
    }
}

/// Frame bounds of `g` for the operator of `engine` on the given grid.
pub fn frame_bounds(g: &IntrinsicFunction, engine: &ContourEngine, grid: &QuadGridConfig) -> Result<FrameBounds> {
    Ok(FrameSampler::new(g, engine, grid)?.frame_bounds())
}

/// Quadratic norm of `v` for `g` and the operator of `engine`.
pub fn quadratic_norm(g: &IntrinsicFunction, engine: &ContourEngine, v: &ModuleVector, grid: &QuadGridConfig) -> Result<QuadraticNorm> {
    FrameSampler::new(g, engine, grid)?.quadratic_norm(v)
}

/// Largest supported sign window, `2n <= 20`.
pub const MAX_SIGN_WINDOW: usize = 10;

/// Signs `a_k ∈ {-1, 1}` for `k ∈ {-n, .., n-1}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SignVector {
    n: usize,
    signs: Vec<i8>,
}

impl SignVector {
    /// Bit `k + n` of `mask` set means `a_k = -1`.
    pub fn from_mask(n: usize, mask: u32) -> Self {
        SignVector { n, signs: (0..2 * n).map(|i| if mask >> i & 1 == 1 { -1 } else { 1 }).collect() }
    }

    pub fn len(&self) -> usize {
        self.signs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.signs.is_empty()
    }

    /// The coordinate projection `p_k(a) = a_k`.
    pub fn p(&self, k: i64) -> f64 {
        self.signs[(k + self.n as i64) as usize] as f64
    }
}

fn check_window(n: usize) -> Result<()> {
    if n == 0 || n > MAX_SIGN_WINDOW {
        return Err(Error::Argument(format!("sign window n must lie in 1..={MAX_SIGN_WINDOW}, got {n}")));
    }
    Ok(())
}

/// Average of `p_k p_l` over all `2^{2n}` sign vectors, indexed by `k + n`.
pub fn sign_projector_gram(n: usize) -> Result<DMatrix<f64>> {
    check_window(n)?;
    let count = 1u32 << (2 * n);
    let mut g = DMatrix::zeros(2 * n, 2 * n);
    for k in 0..2 * n {
        for l in 0..2 * n {
            let mut acc: i64 = 0;
            for mask in 0..count {
                let a = SignVector::from_mask(n, mask);
                acc += (a.signs[k] * a.signs[l]) as i64;
            }
            g[(k, l)] = acc as f64 / count as f64;
        }
    }
    Ok(g)
}

/// `Σ_k ||w_k||²` and the average of `||Σ_k a_k w_k||²` over all sign vectors.
pub fn sign_average(vectors: &[DVector<f64>]) -> (f64, f64) {
    let lhs = pairwise_sum_f64(&vectors.iter().map(|w| w.norm_squared()).collect::<Vec<_>>());
    let count = 1usize << vectors.len();
    let rhs = pairwise_sum(count, &|mask| {
        let mut s = DVector::zeros(vectors[0].len());
        for (i, w) in vectors.iter().enumerate() {
            if mask >> i & 1 == 1 {
                s -= w;
            } else {
                s += w;
            }
        }
        s.norm_squared()
    })
    .unwrap_or(0.0)
        / count as f64;
    (lhs, rhs)
}

/// `lhs = Σ_{k=-n}^{n-1} ||g(t 2^k T) v||²` against the exact average over
/// sign vectors of `||Σ_k a_k g(t 2^k T) v||²`.
pub fn dyadic_sign_identity(g: &IntrinsicFunction, engine: &ContourEngine, v: &ModuleVector, t: f64, n: usize) -> Result<(f64, f64)> {
    check_window(n)?;
    let x = v.flatten();
    let vectors: Vec<DVector<f64>> = (-(n as i32)..n as i32)
        .map(|k| Ok(engine.scaled(g, t * 2f64.powi(k))?.op.real_rep() * &x))
        .collect::<Result<_>>()?;
    Ok(sign_average(&vectors))
}

/// Samples `Ψ(t)` with their selected duals.
#[derive(Debug, Clone, PartialEq)]
pub struct DualSamples {
    pub times: Vec<f64>,
    pub psi: Vec<ModuleVector>,
    pub psi_eps: Vec<ModuleVector>,
}

/// Exact maximizer of `Sc⟨Ψ(t), w⟩` over `||w|| = ||Ψ(t)||`, which is `Ψ(t)`
/// itself, and `0` where `Ψ(t) = 0`.
pub fn dual_select(samples: &[(f64, ModuleVector)]) -> DualSamples {
    let psi_eps = samples
        .iter()
        .map(|(_, p)| if p.norm() > 0.0 { p.clone() } else { ModuleVector::zeros(p.n(), p.m()) })
        .collect();
    DualSamples {
        times: samples.iter().map(|s| s.0).collect(),
        psi: samples.iter().map(|s| s.1.clone()).collect(),
        psi_eps,
    }
}

/// Constants entering the product estimates.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ProductConstants {
    pub c_theta: f64,
    pub alpha: f64,
    pub c_alpha: f64,
    pub beta: f64,
    pub c_beta: f64,
}

impl ProductConstants {
    pub fn pointwise(&self, g_sup: f64) -> f64 {
        self.c_theta * self.c_alpha / self.alpha * g_sup
    }

    pub fn integrated(&self) -> f64 {
        self.c_theta * self.c_alpha * self.c_beta * std::f64::consts::PI / (2.0 * self.alpha * self.beta)
    }
}

/// One sampled inequality `lhs <= rhs`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundSample {
    pub label: String,
    pub lhs: f64,
    pub rhs: f64,
}

impl BoundSample {
    pub fn holds(&self, tol: f64) -> bool {
        self.lhs <= self.rhs + tol
    }
}

/// `||f(tT) g(τT)||` at the given index pairs of two samplers on the same
/// operator.
pub fn pointwise_products(f: &FrameSampler, g: &FrameSampler, pairs: &[(usize, usize)], bound: f64) -> Vec<BoundSample> {
    pairs
        .par_iter()
        .map(|&(i, j)| BoundSample {
            label: format!("t = {:e}, tau = {:e}", f.times[i], g.times[j]),
            lhs: linalg::spectral_norm(&(&f.ops[i] * &g.ops[j])),
            rhs: bound,
        })
        .collect()
}

/// `∫ ||f(tT) g(τT)|| dt/|t|` at the given `τ` indices, including the tail estimate.
pub fn integrated_products(f: &FrameSampler, g: &FrameSampler, taus: &[usize], bound: f64, alpha: f64) -> Vec<BoundSample> {
    taus.par_iter()
        .map(|&j| {
            let vals: Vec<f64> = (0..f.len()).map(|i| linalg::spectral_norm(&(&f.ops[i] * &g.ops[j]))).collect();
            let quad = pairwise_sum_f64(&vals.iter().zip(&f.fine).map(|(v, w)| v * w).collect::<Vec<_>>());
            let tail = f.tails(|k| vals[k], alpha);
            BoundSample { label: format!("tau = {:e}", g.times[j]), lhs: quad + tail, rhs: bound }
        })
        .collect()
}

/// `∫ (∫ ||f(tT) g(τT)|| |Ψ(t)| dt/|t|)² dτ/|τ|` against `K² ∫ |Ψ|² dt/|t|`
/// for a weight `Ψ` on the nodes of `f`.
pub fn weighted_products(f: &FrameSampler, g: &FrameSampler, psi: &[f64], bound: f64) -> Result<BoundSample> {
    if psi.len() != f.len() {
        return Err(Error::Dimension("one weight per t-node required".into()));
    }
    let inner: Vec<f64> = (0..g.len())
        .into_par_iter()
        .map(|j| {
            let terms: Vec<f64> = (0..f.len())
                .map(|i| if psi[i] == 0.0 { 0.0 } else { f.fine[i] * psi[i].abs() * linalg::spectral_norm(&(&f.ops[i] * &g.ops[j])) })
                .collect();
            pairwise_sum_f64(&terms)
        })
        .collect();
    let sq: Vec<f64> = inner.iter().map(|v| v * v).collect();
    let quad = pairwise_sum_f64(&sq.iter().zip(&g.fine).map(|(v, w)| v * w).collect::<Vec<_>>());
    let tail = g.tails(|k| sq[k], 2.0 * g.beta);
    let rhs_int = pairwise_sum_f64(&psi.iter().zip(&f.fine).map(|(p, w)| p * p * w).collect::<Vec<_>>());
    Ok(BoundSample { label: "weighted".into(), lhs: quad + tail, rhs: bound * bound * rhs_int })
}

/// `∫ ||g(tT) X v||² dt/|t|` for a fixed operator `X` in the real
/// representation, with the error of the quadrature.
pub fn transferred_square(g: &FrameSampler, x: &DMatrix<f64>, v: &ModuleVector) -> Result<QuadraticNorm> {
    let w = x * v.flatten();
    let wv = ModuleVector::from_flat(g.n, g.m, w.as_slice())?;
    g.quadratic_norm(&wv)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::calculus::ContourConfig;
    use crate::module::CliffordOperator;
    use crate::spectrum::{check_bisectorial, RayPlan};
    use crate::testutil::random_vector;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    const OMEGA: f64 = 0.4;
    const THETA: f64 = 1.0;
    const PHI: f64 = 0.7;

    fn e() -> IntrinsicFunction {
        IntrinsicFunction::regularizer(THETA).unwrap()
    }

    fn engine(t: &CliffordOperator) -> ContourEngine {
        let report = check_bisectorial(t, OMEGA, &RayPlan::for_angles(OMEGA, &[PHI, THETA])).unwrap();
        ContourEngine::new(t, &report, &ContourConfig::new(t.n(), PHI)).unwrap()
    }

    fn sampler(t: &CliffordOperator) -> FrameSampler {
        FrameSampler::new(&e(), &engine(t), &QuadGridConfig::for_norm(t.norm())).unwrap()
    }

    #[test]
    fn identity_has_unit_quadratic_norm() {
        let t = CliffordOperator::identity(1, 2);
        let s = sampler(&t);
        let v = ModuleVector::from_flat(1, 2, &[1.0, 0.0, 0.0, 0.0]).unwrap();
        let q = s.quadratic_norm(&v).unwrap();
        assert!((q.value - 1.0).abs() < 1e-6, "{q:?}");
        let f = s.frame_operator();
        assert!((&f.theta - DMatrix::<f64>::identity(4, 4)).amax() < 1e-6);
    }

    #[test]
    fn self_adjoint_frames_are_tight() {
        let t = CliffordOperator::diagonal(1, &[1.0, -2.0]);
        let s = sampler(&t);
        let b = s.frame_bounds();
        assert!((b.c_lower - 1.0).abs() < 1e-5 && (b.d_upper - 1.0).abs() < 1e-5, "{b:?}");
        assert!(b.theta_eigenvalues[0] >= -1e-10);
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let v = random_vector(&mut rng, 1, 2);
        let q = s.quadratic_norm(&v).unwrap();
        assert!((q.value - v.norm()).abs() < 1e-6);
    }

    #[test]
    fn scale_invariance() {
        let t = CliffordOperator::from_real_matrix(1, &DMatrix::from_row_slice(2, 2, &[1.0, 1.0, 0.0, 1.0])).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        let v = random_vector(&mut rng, 1, 2);
        let a = sampler(&t).quadratic_norm(&v).unwrap();
        let ct = t.scale(3.0);
        let grid = QuadGridConfig::for_norm(t.norm());
        let b = quadratic_norm(&e(), &engine(&ct), &v, &grid).unwrap();
        assert!((a.value - b.value).abs() <= a.error + b.error + 1e-6, "{a:?} {b:?}");
    }

    #[test]
    fn jordan_frame_bounds_match_fixture() {
        // Θ = diag(1, 4/3) in the eigenbasis of the symmetrized problem, so
        // the bounds are 1 and 2/√3
        let t = CliffordOperator::from_real_matrix(1, &DMatrix::from_row_slice(2, 2, &[1.0, 1.0, 0.0, 1.0])).unwrap();
        let b = sampler(&t).frame_bounds();
        assert!(0.0 < b.c_lower && b.c_lower < b.d_upper);
        assert!((b.c_lower - 1.0).abs() < 1e-5, "{b:?}");
        assert!((b.d_upper - 2.0 / 3f64.sqrt()).abs() < 1e-5, "{b:?}");
    }

    #[test]
    fn sign_identity_and_projectors() {
        for n in 1..=5 {
            let g = sign_projector_gram(n).unwrap();
            assert_eq!(g, DMatrix::identity(2 * n, 2 * n));
        }
        assert!(sign_projector_gram(11).is_err());
        let t = CliffordOperator::from_real_matrix(1, &DMatrix::from_row_slice(2, 2, &[1.0, 1.0, 0.0, 1.0])).unwrap();
        let eng = engine(&t);
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        let v = random_vector(&mut rng, 1, 2);
        for n in 1..=5 {
            let (l, r) = dyadic_sign_identity(&e(), &eng, &v, 0.7, n).unwrap();
            assert!((l - r).abs() <= 1e-10 * l.max(1.0), "n={n}: {l} vs {r}");
        }
        let single = [DVector::from_vec(vec![1.0, -2.0])];
        let (l, r) = sign_average(&single);
        assert_eq!(l, r);
    }

    #[test]
    fn dual_selection() {
        let z = ModuleVector::zeros(1, 2);
        let d = dual_select(&[(1.0, z.clone()), (2.0, z.clone())]);
        assert!(d.psi_eps.iter().all(|p| p.norm() == 0.0));
        let mut rng = ChaCha8Rng::seed_from_u64(14);
        let samples: Vec<(f64, ModuleVector)> = (0..10).map(|k| (k as f64, random_vector(&mut rng, 2, 2))).collect();
        let d = dual_select(&samples);
        for (p, q) in d.psi.iter().zip(&d.psi_eps) {
            assert_eq!(p.norm(), q.norm());
            let sc = p.inner(q).unwrap().scalar_part();
            assert!(p.norm().powi(2) <= sc * (1.0 + 1e-15));
        }
    }

    #[test]
    fn product_bounds_hold_for_regularizer() {
        let t = CliffordOperator::from_real_matrix(1, &DMatrix::from_row_slice(2, 2, &[1.0, 1.0, 0.0, 1.0])).unwrap();
        let report = check_bisectorial(&t, OMEGA, &RayPlan::for_angles(OMEGA, &[PHI, THETA])).unwrap();
        let c_theta = report.c_phi(THETA).unwrap();
        let s = sampler(&t);
        let c = ProductConstants { c_theta, alpha: 1.0, c_alpha: 1.0 / THETA.cos(), beta: 1.0, c_beta: 1.0 / THETA.cos() };
        let sup = 0.5 / THETA.cos();
        let pairs: Vec<(usize, usize)> = (0..25).map(|k| (k * 31 % s.len(), k * 57 % s.len())).collect();
        assert!(pointwise_products(&s, &s, &pairs, c.pointwise(sup)).iter().all(|b| b.holds(0.0)));
        assert!(integrated_products(&s, &s, &[10, 200, 400, 600], c.integrated(), 1.0).iter().all(|b| b.holds(0.0)));
        let psi: Vec<f64> = (0..s.len()).map(|k| if k % 3 == 0 { 1.0 } else { 0.0 }).collect();
        assert!(weighted_products(&s, &s, &psi, c.integrated()).unwrap().holds(0.0));
    }
}
