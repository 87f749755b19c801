//! The full inequality suite on one operator, collected into a
//! self-contained report.

use std::f64::consts::{LN_2, PI};

use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::Value;

use crate::calculus::{evaluate, sign_operator, CalculusResult, ContourConfig, ContourEngine};
use crate::error::{Error, Result};
use crate::io::{registry_entry, FrameReport, OperatorFile};
use crate::module::{CliffordOperator, ModuleVector};
use crate::quadratic::{
    dyadic_sign_identity, integrated_products, pointwise_products, sign_projector_gram, transferred_square, weighted_products,
    FrameBounds, FrameSampler, ProductConstants, QuadGridConfig,
};
use crate::slice::{certify_bounded, f0_infty, IntrinsicFunction, SamplePlan};
use crate::spectrum::{check_bisectorial, BisectorReport, RayPlan};

pub const REPORT_VERSION: u32 = 1;

/// Angles, grids and sampling sizes of a suite run.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SuiteConfig {
    pub omega: f64,
    pub theta: f64,
    pub phi: f64,
    pub seed: u64,
    /// Contour nodes per ray.
    pub contour_nodes: usize,
    /// `t`-nodes per sign for the frame operator.
    pub t_nodes: usize,
    /// `t`-nodes per sign for the Ψ-weighted product check.
    pub weighted_t_nodes: usize,
    pub random_vectors: usize,
    /// Largest half-window `n` for the dyadic sign identity.
    pub sign_window: usize,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        SuiteConfig {
            omega: 0.4,
            theta: 1.0,
            phi: 0.7,
            seed: 0,
            contour_nodes: 2001,
            t_nodes: 401,
            weighted_t_nodes: 101,
            random_vectors: 100,
            sign_window: 5,
        }
    }
}

impl SuiteConfig {
    pub fn contour(&self, n: usize) -> ContourConfig {
        ContourConfig::new(n, self.phi).with_nodes(self.contour_nodes)
    }

    pub fn ray_plan(&self) -> RayPlan {
        RayPlan::for_angles(self.omega, &[self.phi, self.theta])
    }

    pub fn t_grid(&self, t: &CliffordOperator, nodes: usize) -> QuadGridConfig {
        QuadGridConfig { nodes, ..QuadGridConfig::for_norm(t.norm()) }
    }
}

/// `pass = lhs <= rhs + tolerance`, except for strict positivity records.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InequalityRecord {
    pub name: String,
    pub lhs: f64,
    pub rhs: f64,
    pub tolerance: f64,
    pub margin: f64,
    pub pass: bool,
}

impl InequalityRecord {
    pub fn new(name: impl Into<String>, lhs: f64, rhs: f64, tolerance: f64) -> Self {
        let margin = rhs + tolerance - lhs;
        InequalityRecord { name: name.into(), lhs, rhs, tolerance, margin, pass: margin >= 0.0 }
    }

    /// `0 < rhs`.
    pub fn positive(name: impl Into<String>, value: f64) -> Self {
        InequalityRecord { name: name.into(), lhs: 0.0, rhs: value, tolerance: 0.0, margin: value, pass: value > 0.0 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StageFailure {
    pub stage: String,
    pub reason: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct FrameEntry {
    pub g: String,
    pub operator: FrameReport,
    pub adjoint: FrameReport,
}

#[derive(Debug, Clone, Serialize)]
pub struct CalculusEntry {
    pub f: String,
    pub sup_norm: f64,
    pub norm: f64,
    pub trunc_err: f64,
    pub disc_err: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct ConfigEcho {
    pub suite: SuiteConfig,
    pub operator: OperatorFile,
    pub g: Vec<Value>,
    pub functions: Vec<Value>,
}

#[derive(Debug, Clone, Serialize)]
pub struct VerificationReport {
    pub report_version: u32,
    pub operator_id: String,
    pub seed: u64,
    pub config: ConfigEcho,
    pub bisector: Option<BisectorReport>,
    pub bisector_adjoint: Option<BisectorReport>,
    pub frames: Vec<FrameEntry>,
    pub calculus: Vec<CalculusEntry>,
    pub records: Vec<InequalityRecord>,
    pub failures: Vec<StageFailure>,
    /// Set when the calculus stages were skipped.
    pub short_circuit: Option<String>,
}

impl VerificationReport {
    pub fn all_pass(&self) -> bool {
        self.failures.is_empty() && self.short_circuit.is_none() && self.records.iter().all(|r| r.pass)
    }

    /// `0` all pass, `1` an inequality fails, `2` a stage could not run.
    pub fn exit_code(&self) -> i32 {
        if self.short_circuit.is_some() || !self.failures.is_empty() {
            2
        } else if self.records.iter().any(|r| !r.pass) {
            1
        } else {
            0
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("serializable report")
    }
}

/// Default `g` list: `e`, `e²` and `e + e²`.
pub fn default_g_list(theta: f64) -> Result<Vec<IntrinsicFunction>> {
    let e = IntrinsicFunction::regularizer(theta)?;
    let e2 = IntrinsicFunction::product(vec![e.clone(), e.clone()])?.with_name("e^2");
    let mixed = IntrinsicFunction::sum(vec![e.clone(), e2.clone()])?.with_name("e+e^2");
    Ok(vec![e, e2, mixed])
}

/// Default function registry with decaying and merely bounded members.
pub fn default_f_list(theta: f64) -> Result<Vec<IntrinsicFunction>> {
    let e = IntrinsicFunction::regularizer(theta)?;
    let e2 = IntrinsicFunction::product(vec![e.clone(), e.clone()])?.with_name("e^2");
    Ok(vec![
        e.clone(),
        e2.clone(),
        IntrinsicFunction::e_alpha(0.5, theta)?,
        IntrinsicFunction::scaled(&e, 3.0)?,
        IntrinsicFunction::sum(vec![e.clone(), e2])?.with_name("e+e^2"),
        IntrinsicFunction::rational(vec![0.0, 0.0, 1.0], vec![1.0, 0.0, 1.0], theta)?.with_name("s^2/(1+s^2)"),
        IntrinsicFunction::rational(vec![1.0, 0.0, -1.0], vec![1.0, 0.0, 1.0], theta)?.with_name("(1-s^2)/(1+s^2)"),
        IntrinsicFunction::constant(1.0, theta)?.with_name("one"),
    ])
}

/// `√(8 ln 2) c C_β / (1 - 2^{-β})`.
pub fn upper_frame_constant(c: f64, beta: f64, c_beta: f64) -> f64 {
    (8.0 * LN_2).sqrt() * c * c_beta / (1.0 - 2f64.powf(-beta))
}

/// `C_g = C_θ² C_β² π / (2 cos θ β² (e g²)_{0,∞})`.
pub fn transfer_constant(c_theta: f64, theta: f64, beta: f64, c_beta: f64, eg2: f64) -> f64 {
    c_theta * c_theta * c_beta * c_beta * PI / (2.0 * theta.cos() * beta * beta * eg2)
}

/// `(e g²)_{0,∞}` and `(g²)_{0,∞}`.
pub fn g_integrals(g: &IntrinsicFunction) -> Result<(f64, f64)> {
    let e = IntrinsicFunction::regularizer(g.theta())?;
    let eg2 = f0_infty(&IntrinsicFunction::product(vec![e, g.clone(), g.clone()])?)?;
    let g2 = f0_infty(&IntrinsicFunction::product(vec![g.clone(), g.clone()])?)?;
    Ok((eg2, g2))
}

fn is_self_adjoint(t: &CliffordOperator) -> bool {
    t.max_abs_diff(&t.adjoint()) == 0.0
}

struct Suite<'a> {
    t: &'a CliffordOperator,
    cfg: &'a SuiteConfig,
    rng: ChaCha8Rng,
    report: VerificationReport,
}

struct Evaluated {
    f: IntrinsicFunction,
    sup: f64,
    op: CalculusResult,
}

impl Suite<'_> {
    fn record(&mut self, r: InequalityRecord) {
        self.report.records.push(r);
    }

    fn fail(&mut self, stage: &str, e: Error) {
        self.report.failures.push(StageFailure { stage: stage.into(), reason: e.to_string() });
    }

    fn random_vector(&mut self) -> ModuleVector {
        let (n, m) = (self.t.n(), self.t.m());
        let flat: Vec<f64> = (0..m << n).map(|_| self.rng.gen_range(-1.0..1.0)).collect();
        ModuleVector::from_flat(n, m, &flat).expect("matching dimensions")
    }

    fn frames(&mut self, g: &IntrinsicFunction, s: &FrameSampler, s_adj: &FrameSampler) -> (FrameBounds, FrameBounds) {
        let b = s.frame_bounds();
        let ba = s_adj.frame_bounds();
        self.report.frames.push(FrameEntry { g: g.name().into(), operator: (&b).into(), adjoint: (&ba).into() });
        (b, ba)
    }

    fn sandwich(&mut self, g: &IntrinsicFunction, s: &FrameSampler, b: &FrameBounds) -> Result<()> {
        let (ec, ed) = b.bound_error();
        let mut lower: Option<InequalityRecord> = None;
        let mut upper: Option<InequalityRecord> = None;
        for _ in 0..self.cfg.random_vectors {
            let v = self.random_vector();
            let q = s.quadratic_norm(&v)?;
            let nv = v.norm();
            let lo = InequalityRecord::new(format!("frame sandwich lower [{}]", g.name()), b.c_lower * nv, q.value, q.error + ec * nv);
            let hi = InequalityRecord::new(format!("frame sandwich upper [{}]", g.name()), q.value, b.d_upper * nv, q.error + ed * nv);
            if lower.as_ref().is_none_or(|r| lo.margin < r.margin) {
                lower = Some(lo);
            }
            if upper.as_ref().is_none_or(|r| hi.margin < r.margin) {
                upper = Some(hi);
            }
        }
        self.report.records.extend(lower.into_iter().chain(upper));
        Ok(())
    }

    fn evaluate_functions(&mut self, engine: &ContourEngine, fs: &[IntrinsicFunction]) -> Vec<Evaluated> {
        let mut out = Vec::new();
        for f in fs {
            let step = || -> Result<Evaluated> {
                let sup = certify_bounded(f, &SamplePlan::default())?.sup_norm;
                let op = evaluate(engine, f)?;
                Ok(Evaluated { f: f.clone(), sup, op })
            };
            match step() {
                Ok(ev) => {
                    self.report.calculus.push(CalculusEntry {
                        f: f.name().into(),
                        sup_norm: ev.sup,
                        norm: ev.op.op.norm(),
                        trunc_err: ev.op.trunc_err,
                        disc_err: ev.op.disc_err,
                    });
                    out.push(ev);
                }
                Err(e) => self.fail(&format!("calculus [{}]", f.name()), e),
            }
        }
        out
    }

    /// Constant `c` of the upper frame estimate and whether it is exact.
    fn registry_c(&self, fs: &[Evaluated]) -> (f64, bool) {
        if is_self_adjoint(self.t) {
            return (1.0, true);
        }
        let c = fs
            .iter()
            .filter(|e| e.sup > 0.0)
            .map(|e| (e.op.op.norm() + e.op.combined_error()) / e.sup)
            .fold(0.0, f64::max);
        (c, false)
    }

    #[allow(clippy::too_many_arguments)]
    fn theorem_constants(
        &mut self,
        g: &IntrinsicFunction,
        sampler: &FrameSampler,
        b: &FrameBounds,
        ba: &FrameBounds,
        fs: &[Evaluated],
        c_theta: f64,
    ) -> Result<()> {
        let cert = g.decay().ok_or_else(|| Error::Precondition(format!("{} has no decay certificate", g.name())))?.standard();
        let (beta, c_beta) = (cert.alpha, cert.c_alpha);
        let (eg2, g2) = g_integrals(g)?;
        self.record(InequalityRecord::positive(format!("(e g^2)_(0,inf) positive [{}]", g.name()), eg2));
        let (c, exact) = self.registry_c(fs);
        let (ec, ed) = b.bound_error();
        let (eca, eda) = ba.bound_error();
        let kind = if exact { "exact c" } else { "one-sided, registry c" };
        self.record(InequalityRecord::new(
            format!("upper frame constant ({kind}) [{}]", g.name()),
            b.d_upper,
            upper_frame_constant(c, beta, c_beta),
            ed,
        ));
        let cg = transfer_constant(c_theta, g.theta(), beta, c_beta, eg2);
        for ev in fs {
            let rhs = cg * b.d_upper / (b.c_lower * g.theta().cos()) * ev.sup;
            self.record(InequalityRecord::new(
                format!("bounded calculus [{}; f = {}]", g.name(), ev.f.name()),
                ev.op.op.norm(),
                rhs,
                ev.op.combined_error(),
            ));
        }
        for (label, lo, elo, up, eup) in [("T", b.c_lower, ec, ba.d_upper, eda), ("T*", ba.c_lower, eca, b.d_upper, ed)] {
            let rhs = g2 / up;
            let tol = 1e-3 * rhs.abs() + elo + rhs.abs() * eup / up.max(f64::MIN_POSITIVE);
            self.record(InequalityRecord::new(format!("lower frame constant [{}; {label}]", g.name()), rhs, lo, tol));
        }
        for ev in fs.iter().filter(|e| e.f.decay().is_some()) {
            for _ in 0..3 {
                let v = self.random_vector();
                let x = ev.op.op.real_rep();
                let lhs = transferred_square(sampler, &x, &v)?;
                let base = sampler.quadratic_norm(&v)?;
                let k = cg * cg * ev.sup * ev.sup;
                let tol = 2.0 * lhs.value * (lhs.error + b.d_upper * ev.op.combined_error() * v.norm()) + k * 2.0 * base.value * base.error;
                self.record(InequalityRecord::new(
                    format!("square function transfer [{}; f = {}]", g.name(), ev.f.name()),
                    lhs.value * lhs.value,
                    k * base.value * base.value,
                    tol,
                ));
            }
        }
        Ok(())
    }

    fn products(&mut self, engine: &ContourEngine, c_theta: f64, e_sampler: &FrameSampler) -> Result<()> {
        let e = IntrinsicFunction::regularizer(self.cfg.theta)?;
        let cert = e.decay().expect("certified").standard();
        let c = ProductConstants { c_theta, alpha: cert.alpha, c_alpha: cert.c_alpha, beta: cert.alpha, c_beta: cert.c_alpha };
        let sup = certify_bounded(&e, &SamplePlan::default())?.sup_norm;
        let len = e_sampler.len();
        let pairs: Vec<(usize, usize)> = (0..25).map(|_| (self.rng.gen_range(0..len), self.rng.gen_range(0..len))).collect();
        let worst = |v: Vec<crate::quadratic::BoundSample>| v.into_iter().max_by(|a, b| (a.lhs - a.rhs).total_cmp(&(b.lhs - b.rhs)));
        if let Some(b) = worst(pointwise_products(e_sampler, e_sampler, &pairs, c.pointwise(sup))) {
            self.record(InequalityRecord::new(format!("pointwise product bound ({})", b.label), b.lhs, b.rhs, 0.0));
        }
        let taus: Vec<usize> = sample(&mut self.rng, len, 5).into_vec();
        if let Some(b) = worst(integrated_products(e_sampler, e_sampler, &taus, c.integrated(), c.alpha)) {
            self.record(InequalityRecord::new(format!("integrated product bound ({})", b.label), b.lhs, b.rhs, 0.0));
        }
        let coarse = FrameSampler::new(&e, engine, &self.cfg.t_grid(self.t, self.cfg.weighted_t_nodes))?;
        let psi: Vec<f64> = (0..coarse.len())
            .map(|_| if self.rng.gen_bool(0.25) { self.rng.gen_range(0.0..1.0) } else { 0.0 })
            .collect();
        let b = weighted_products(&coarse, &coarse, &psi, c.integrated())?;
        self.record(InequalityRecord::new("weighted product bound", b.lhs, b.rhs, 0.0));
        Ok(())
    }

    /// `f_{a,b}(T)` against its limit `f_{0,∞} sgn(T)` along `(10^{-k}, 10^k)`.
    fn convergence(&mut self, engine: &ContourEngine) -> Result<()> {
        let e = IntrinsicFunction::regularizer(self.cfg.theta)?;
        let limit = f0_infty(&e)?;
        let target = sign_operator(self.t)?.scale(limit);
        let mut prev: Option<(f64, f64)> = None;
        for k in 1..=4 {
            let a = 10f64.powi(-k);
            let r = engine.f_ab(&e, a, 1.0 / a)?;
            let dist = r.op.distance(&target)?;
            if let Some((d, err)) = prev {
                self.record(InequalityRecord::new(
                    format!("truncated integral convergence (k = {k})"),
                    dist,
                    d,
                    err + r.combined_error(),
                ));
            }
            prev = Some((dist, r.combined_error()));
        }
        Ok(())
    }

    fn signs(&mut self, engine: &ContourEngine) -> Result<()> {
        let e = IntrinsicFunction::regularizer(self.cfg.theta)?;
        let t0 = 1.0 / self.t.norm().max(f64::MIN_POSITIVE);
        let v = self.random_vector();
        for n in 1..=self.cfg.sign_window {
            let (l, r) = dyadic_sign_identity(&e, engine, &v, t0, n)?;
            self.record(InequalityRecord::new(format!("dyadic sign identity (n = {n})"), (l - r).abs(), 0.0, 1e-10 * l.max(1.0)));
            let g = sign_projector_gram(n)?;
            let dev = (g - nalgebra::DMatrix::<f64>::identity(2 * n, 2 * n)).amax();
            self.record(InequalityRecord::new(format!("sign projector orthonormality (n = {n})"), dev, 0.0, 0.0));
        }
        Ok(())
    }

    fn adjoint(&mut self, engine_adj: &ContourEngine, fs: &[Evaluated]) {
        for ev in fs {
            let res = evaluate(engine_adj, &ev.f).and_then(|b| {
                let gap = b.op.distance(&ev.op.op.adjoint())?;
                Ok((gap, b.combined_error() + ev.op.combined_error()))
            });
            match res {
                Ok((gap, tol)) => self.record(InequalityRecord::new(format!("adjoint calculus [{}]", ev.f.name()), gap, 0.0, tol)),
                Err(e) => self.fail(&format!("adjoint calculus [{}]", ev.f.name()), e),
            }
        }
    }
}

/// Runs every stage on `t`; stage failures are recorded and later stages
/// still run, except that a failed bisectoriality check skips all calculus
/// stages.
pub fn run_theorem_suite(
    operator_id: &str,
    t: &CliffordOperator,
    gs: &[IntrinsicFunction],
    fs: &[IntrinsicFunction],
    cfg: &SuiteConfig,
) -> VerificationReport {
    let report = VerificationReport {
        report_version: REPORT_VERSION,
        operator_id: operator_id.into(),
        seed: cfg.seed,
        config: ConfigEcho {
            suite: cfg.clone(),
            operator: OperatorFile::from_operator(t),
            g: gs.iter().map(registry_entry).collect(),
            functions: fs.iter().map(registry_entry).collect(),
        },
        bisector: None,
        bisector_adjoint: None,
        frames: Vec::new(),
        calculus: Vec::new(),
        records: Vec::new(),
        failures: Vec::new(),
        short_circuit: None,
    };
    let mut s = Suite { t, cfg, rng: ChaCha8Rng::seed_from_u64(cfg.seed), report };
    let ta = t.adjoint();
    let plan = cfg.ray_plan();
    let reports = check_bisectorial(t, cfg.omega, &plan).and_then(|r| Ok((r, check_bisectorial(&ta, cfg.omega, &plan)?)));
    let (r, ra) = match reports {
        Ok(pair) => pair,
        Err(e) => {
            s.report.short_circuit = Some(e.to_string());
            return s.report;
        }
    };
    s.report.bisector = Some(r.clone());
    s.report.bisector_adjoint = Some(ra.clone());
    for rep in [&r, &ra] {
        if !rep.passed() {
            s.report.short_circuit = Some(rep.reason.clone().unwrap_or_else(|| "bisectoriality not certified".into()));
            return s.report;
        }
    }
    let contour = cfg.contour(t.n());
    let engines = ContourEngine::new(t, &r, &contour).and_then(|a| Ok((a, ContourEngine::new(&ta, &ra, &contour)?)));
    let (engine, engine_adj) = match engines {
        Ok(pair) => pair,
        Err(e) => {
            s.report.short_circuit = Some(e.to_string());
            return s.report;
        }
    };
    let c_theta = match r.c_phi(cfg.theta) {
        Some(c) => c,
        None => {
            s.report.short_circuit = Some(format!("no resolvent constant tabulated at theta = {}", cfg.theta));
            return s.report;
        }
    };
    let grid = cfg.t_grid(t, cfg.t_nodes);
    let grid_adj = cfg.t_grid(&ta, cfg.t_nodes);

    let mut samplers = Vec::new();
    for g in gs {
        match FrameSampler::new(g, &engine, &grid).and_then(|a| Ok((a, FrameSampler::new(g, &engine_adj, &grid_adj)?))) {
            Ok((a, b)) => {
                let (fb, fba) = s.frames(g, &a, &b);
                if let Err(e) = s.sandwich(g, &a, &fb) {
                    s.fail(&format!("frame sandwich [{}]", g.name()), e);
                }
                samplers.push((g.clone(), a, fb, fba));
            }
            Err(e) => s.fail(&format!("frame bounds [{}]", g.name()), e),
        }
    }
    let evaluated = s.evaluate_functions(&engine, fs);
    for (g, sampler, fb, fba) in &samplers {
        if let Err(e) = s.theorem_constants(g, sampler, fb, fba, &evaluated, c_theta) {
            s.fail(&format!("theorem constants [{}]", g.name()), e);
        }
    }
    if let Err(e) = s.convergence(&engine) {
        s.fail("truncated integral convergence", e);
    }
    let e_sampler = samplers.iter().find(|x| x.0.profile() == &crate::slice::Profile::Regularizer).map(|x| &x.1);
    let owned;
    let e_sampler = match e_sampler {
        Some(x) => Some(x),
        None => {
            owned = IntrinsicFunction::regularizer(cfg.theta).and_then(|e| FrameSampler::new(&e, &engine, &grid));
            match &owned {
                Ok(x) => Some(x),
                Err(e) => {
                    s.fail("product bounds", e.clone());
                    None
                }
            }
        }
    };
    if let Some(es) = e_sampler {
        if let Err(e) = s.products(&engine, c_theta, es) {
            s.fail("product bounds", e);
        }
    }
    if let Err(e) = s.signs(&engine) {
        s.fail("dyadic sign identity", e);
    }
    s.adjoint(&engine_adj, &evaluated);
    s.report
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::DMatrix;

    fn quick() -> SuiteConfig {
        SuiteConfig { contour_nodes: 1001, t_nodes: 201, weighted_t_nodes: 41, random_vectors: 10, sign_window: 3, ..Default::default() }
    }

    #[test]
    fn constants() {
        assert!((upper_frame_constant(1.0, 1.0, 1.0) - 4.7096).abs() < 1e-4);
        let (eg2, g2) = g_integrals(&IntrinsicFunction::regularizer(1.0).unwrap()).unwrap();
        assert!((eg2 - PI / 8.0).abs() < 1e-8);
        assert!(g2.abs() < 1e-12);
        let mixed = &default_g_list(1.0).unwrap()[2];
        let (_, g2) = g_integrals(mixed).unwrap();
        assert!((g2 - PI / 4.0).abs() < 1e-8);
    }

    #[test]
    fn sphere_operator_short_circuits() {
        let t = CliffordOperator::scalar_identity(&crate::CliffordNum::generator(2, 1), 2);
        let cfg = quick();
        let r = run_theorem_suite("e1", &t, &default_g_list(1.0).unwrap(), &default_f_list(1.0).unwrap(), &cfg);
        assert!(r.short_circuit.is_some());
        assert!(r.records.is_empty());
        assert_eq!(r.exit_code(), 2);
    }

    #[test]
    fn diagonal_passes_and_is_deterministic() {
        let t = CliffordOperator::diagonal(1, &[1.0, -2.0]);
        let cfg = quick();
        let gs = default_g_list(1.0).unwrap();
        let fs = default_f_list(1.0).unwrap();
        let r = run_theorem_suite("diag", &t, &gs, &fs, &cfg);
        let failing: Vec<_> = r.records.iter().filter(|x| !x.pass).collect();
        assert!(failing.is_empty() && r.failures.is_empty(), "{failing:#?} {:#?}", r.failures);
        assert_eq!(r.exit_code(), 0);
        let again = run_theorem_suite("diag", &t, &gs, &fs, &cfg);
        assert_eq!(r.to_json(), again.to_json());
    }

    #[test]
    fn jordan_passes_with_distinct_bounds() {
        let t = CliffordOperator::from_real_matrix(1, &DMatrix::from_row_slice(2, 2, &[1.0, 1.0, 0.0, 1.0])).unwrap();
        let cfg = quick();
        let r = run_theorem_suite("jordan", &t, &default_g_list(1.0).unwrap()[..1], &default_f_list(1.0).unwrap(), &cfg);
        let failing: Vec<_> = r.records.iter().filter(|x| !x.pass).collect();
        assert!(failing.is_empty() && r.failures.is_empty(), "{failing:#?} {:#?}", r.failures);
        let f = &r.frames[0].operator;
        assert!(f.c_lower < f.d_upper);
        assert!(r.records.iter().any(|x| x.name.contains("one-sided")));
    }
}
