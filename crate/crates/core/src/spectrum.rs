//! Pseudo-resolvent, S-resolvents, S-spectrum scans on a slice and
//! bisectoriality certificates.
//!
//! Everything is computed in the real representation. Since
//! `Q_s[T] = T^2 - 2 s0 T + |s|^2` only depends on `x = s0` and `y = |Im s|`,
//! the half-plane `y >= 0` of one slice determines the whole S-spectrum.

use std::f64::consts::{FRAC_PI_2, PI};

use nalgebra::{Complex, DMatrix};
use rayon::prelude::*;
use serde::Serialize;

use crate::clifford::{CliffordNum, DoubleSector, Paravector};
use crate::error::{Error, Result};
use crate::linalg::{self, INVERTIBILITY_TOL};
use crate::module::{scalar_action_matrix, CliffordOperator};

/// `Q_s[T]` evaluated from the slice coordinates of `s`.
pub fn q_operator_xy(t: &CliffordOperator, x: f64, y: f64) -> CliffordOperator {
    let t2 = t.compose(t).expect("operator composed with itself");
    let shift = CliffordOperator::identity(t.n(), t.m()).scale(x * x + y * y);
    t2.sub(&t.scale(2.0 * x)).and_then(|q| q.add(&shift)).expect("matching shapes")
}

pub fn q_operator(s: &Paravector, t: &CliffordOperator) -> Result<CliffordOperator> {
    check_param(s, t)?;
    Ok(q_operator_xy(t, s.s0, s.imag_norm()))
}

fn check_param(s: &Paravector, t: &CliffordOperator) -> Result<()> {
    if s.n() != t.n() {
        return Err(Error::Dimension(format!("paravector in R^{} but operator over R_{}", s.n() + 1, t.n())));
    }
    Ok(())
}

/// Cached real representation of `T` and `T^2`, used for repeated
/// evaluation of `Q_s[T]` and the S-resolvents.
#[derive(Debug, Clone)]
pub struct ResolventKernel {
    n: usize,
    m: usize,
    rho: DMatrix<f64>,
    rho2: DMatrix<f64>,
}

impl ResolventKernel {
    pub fn new(t: &CliffordOperator) -> Self {
        let rho = t.real_rep();
        let rho2 = &rho * &rho;
        ResolventKernel { n: t.n(), m: t.m(), rho, rho2 }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn dim(&self) -> usize {
        self.rho.nrows()
    }

    pub fn rho(&self) -> &DMatrix<f64> {
        &self.rho
    }

    pub fn q_real(&self, x: f64, y: f64) -> DMatrix<f64> {
        let mut q = &self.rho2 - &self.rho * (2.0 * x);
        let shift = x * x + y * y;
        for i in 0..q.nrows() {
            q[(i, i)] += shift;
        }
        q
    }

    /// `(sigma_min, sigma_max)` of `rho(Q_s)`.
    pub fn q_singular_values(&self, x: f64, y: f64) -> (f64, f64) {
        linalg::extreme_singular_values(&self.q_real(x, y))
    }

    pub fn q_inverse(&self, x: f64, y: f64) -> Result<DMatrix<f64>> {
        let q = self.q_real(x, y);
        linalg::solve_refined(&q, &DMatrix::identity(q.nrows(), q.ncols()))
    }

    /// Real representation of `S_L^{-1}(s, T)` for `s = x + J y` with signed `y`.
    pub fn left_resolvent_real(&self, x: f64, y: f64, j: &Paravector) -> Result<DMatrix<f64>> {
        let qinv = self.q_inverse(x, y)?;
        let sbar = Paravector::from_slice(x, -y, j).to_clifford();
        Ok(&qinv * scalar_action_matrix(&sbar, self.m) - &self.rho * &qinv)
    }

    /// Real representation of `S_R^{-1}(s, T)` for `s = x + J y` with signed `y`.
    pub fn right_resolvent_real(&self, x: f64, y: f64, j: &Paravector) -> Result<DMatrix<f64>> {
        let qinv = self.q_inverse(x, y)?;
        let sbar = Paravector::from_slice(x, -y, j).to_clifford();
        Ok(scalar_action_matrix(&sbar, self.m) * &qinv - &self.rho * &qinv)
    }
}

/// `Q_s[T]` at one spectral parameter together with its smallest singular value.
#[derive(Debug, Clone)]
pub struct PseudoResolventPoint {
    pub s: Paravector,
    pub q: CliffordOperator,
    pub sigma_min: f64,
    pub sigma_max: f64,
    /// `(||T|| + |s|)^2`, an upper bound for every term of `Q_s[T]`.
    pub scale: f64,
}

impl PseudoResolventPoint {
    pub fn new(s: &Paravector, t: &CliffordOperator) -> Result<Self> {
        let q = q_operator(s, t)?;
        let (sigma_min, sigma_max) = linalg::extreme_singular_values(&q.real_rep());
        let scale = (t.norm() + s.abs()).powi(2);
        Ok(PseudoResolventPoint { s: s.clone(), q, sigma_min, sigma_max, scale })
    }

    /// Whether `s` lies in the numerical S-spectrum. Measured against the
    /// size of the terms of `Q_s[T]`, so cancellation to a rounding-level
    /// multiple of the identity still counts as singular.
    pub fn is_singular(&self) -> bool {
        !(self.sigma_min > INVERTIBILITY_TOL * self.sigma_max.max(self.scale))
    }
}

fn slice_of(s: &Paravector) -> (f64, f64, Paravector) {
    let y = s.imag_norm();
    let j = if y > 0.0 {
        Paravector::new(0.0, s.svec.iter().map(|c| c / y).collect()).expect("nonempty")
    } else {
        Paravector::unit(s.n(), 1)
    };
    (s.s0, y, j)
}

/// `S_L^{-1}(s,T) = Q_s[T]^{-1} s̄ - T Q_s[T]^{-1}`, where `s̄` acts by left
/// multiplication before `Q_s[T]^{-1}`.
pub fn left_s_resolvent(s: &Paravector, t: &CliffordOperator) -> Result<CliffordOperator> {
    check_param(s, t)?;
    let (x, y, j) = slice_of(s);
    let r = ResolventKernel::new(t).left_resolvent_real(x, y, &j)?;
    CliffordOperator::from_real_rep(t.n(), t.m(), &r)
}

/// `S_R^{-1}(s,T) = (s̄ - T) Q_s[T]^{-1}`.
pub fn right_s_resolvent(s: &Paravector, t: &CliffordOperator) -> Result<CliffordOperator> {
    check_param(s, t)?;
    let (x, y, j) = slice_of(s);
    let r = ResolventKernel::new(t).right_resolvent_real(x, y, &j)?;
    CliffordOperator::from_real_rep(t.n(), t.m(), &r)
}

/// Rectangle `[x_min, x_max] x [y_min, y_max]` in the upper half of a slice.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SliceGrid {
    pub x_min: f64,
    pub x_max: f64,
    pub nx: usize,
    pub y_min: f64,
    pub y_max: f64,
    pub ny: usize,
}

impl SliceGrid {
    pub fn new(x_min: f64, x_max: f64, nx: usize, y_min: f64, y_max: f64, ny: usize) -> Result<Self> {
        if nx == 0 || ny == 0 {
            return Err(Error::Argument("scan grid has no nodes".into()));
        }
        if !(x_min <= x_max && y_min <= y_max) || ![x_min, x_max, y_min, y_max].iter().all(|v| v.is_finite()) {
            return Err(Error::Argument("scan grid bounds must be finite and ordered".into()));
        }
        if y_min < 0.0 {
            return Err(Error::Argument("scan grid must lie in the half-plane y >= 0".into()));
        }
        if (nx == 1 && x_min != x_max) || (ny == 1 && y_min != y_max) {
            return Err(Error::Argument("a single-node axis needs equal bounds".into()));
        }
        Ok(SliceGrid { x_min, x_max, nx, y_min, y_max, ny })
    }

    /// `[-1.25 r, 1.25 r] × [0, 1.25 r]` with 101 × 51 nodes for `r = ||T||`.
    pub fn around(norm: f64) -> SliceGrid {
        let r = 1.25 * norm.max(1e-300);
        SliceGrid { x_min: -r, x_max: r, nx: 101, y_min: 0.0, y_max: r, ny: 51 }
    }

    pub fn x_step(&self) -> f64 {
        if self.nx > 1 { (self.x_max - self.x_min) / (self.nx - 1) as f64 } else { 0.0 }
    }

    pub fn y_step(&self) -> f64 {
        if self.ny > 1 { (self.y_max - self.y_min) / (self.ny - 1) as f64 } else { 0.0 }
    }

    pub fn x(&self, i: usize) -> f64 {
        if self.nx == 1 { self.x_min } else { self.x_min + (self.x_max - self.x_min) * i as f64 / (self.nx - 1) as f64 }
    }

    pub fn y(&self, k: usize) -> f64 {
        if self.ny == 1 { self.y_min } else { self.y_min + (self.y_max - self.y_min) * k as f64 / (self.ny - 1) as f64 }
    }

    pub fn len(&self) -> usize {
        self.nx * self.ny
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// A detected sphere `[x + S y]`, reported at its grid node.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Detection {
    pub x: f64,
    pub y: f64,
    /// Location of the refined minimum of `sigma_min / sigma_max`.
    pub refined_x: f64,
    pub refined_y: f64,
    pub relative_sigma_min: f64,
}

impl Detection {
    pub fn is_real(&self) -> bool {
        self.y == 0.0
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct SpectrumScan {
    pub grid: SliceGrid,
    /// Row-major over `(x index, y index)`.
    pub values: Vec<f64>,
    pub detections: Vec<Detection>,
}

impl SpectrumScan {
    pub fn value(&self, i: usize, k: usize) -> f64 {
        self.values[i * self.grid.ny + k]
    }
}

fn relative_sigma(kernel: &ResolventKernel, x: f64, y: f64) -> f64 {
    let (smin, smax) = kernel.q_singular_values(x, y);
    if smax > 0.0 { smin / smax } else { 0.0 }
}

/// Nelder-Mead minimisation of `f` in the plane.
fn nelder_mead(f: &dyn Fn(f64, f64) -> f64, start: (f64, f64), step: (f64, f64), iters: usize) -> ((f64, f64), f64) {
    let mut simplex = [start, (start.0 + step.0, start.1), (start.0, start.1 + step.1)];
    let mut vals = simplex.map(|p| f(p.0, p.1));
    for _ in 0..iters {
        let mut order = [0, 1, 2];
        order.sort_by(|&a, &b| vals[a].total_cmp(&vals[b]));
        simplex = order.map(|i| simplex[i]);
        vals = order.map(|i| vals[i]);
        if vals[0] == 0.0 {
            break;
        }
        let c = ((simplex[0].0 + simplex[1].0) / 2.0, (simplex[0].1 + simplex[1].1) / 2.0);
        let along = |t: f64| (c.0 + t * (simplex[2].0 - c.0), c.1 + t * (simplex[2].1 - c.1));
        let r = along(-1.0);
        let fr = f(r.0, r.1);
        if fr < vals[0] {
            let e = along(-2.0);
            let fe = f(e.0, e.1);
            if fe < fr {
                simplex[2] = e;
                vals[2] = fe;
            } else {
                simplex[2] = r;
                vals[2] = fr;
            }
        } else if fr < vals[1] {
            simplex[2] = r;
            vals[2] = fr;
        } else {
            let k = if fr < vals[2] { along(-0.5) } else { along(0.5) };
            let fk = f(k.0, k.1);
            if fk < vals[2].min(fr) {
                simplex[2] = k;
                vals[2] = fk;
            } else {
                for i in 1..3 {
                    simplex[i] = ((simplex[0].0 + simplex[i].0) / 2.0, (simplex[0].1 + simplex[i].1) / 2.0);
                    vals[i] = f(simplex[i].0, simplex[i].1);
                }
            }
        }
    }
    let best = (0..3).min_by(|&a, &b| vals[a].total_cmp(&vals[b])).unwrap();
    (simplex[best], vals[best])
}

/// `sigma_min(rho(Q_s))` over a slice grid. Every local minimum of the grid
/// values is refined by a simplex search; it counts as a detection when the
/// refined relative singular value drops to the invertibility tolerance.
pub fn scan_spectrum_slice(t: &CliffordOperator, grid: &SliceGrid) -> Result<SpectrumScan> {
    if grid.is_empty() {
        return Err(Error::Argument("scan grid has no nodes".into()));
    }
    let kernel = ResolventKernel::new(t);
    let (nx, ny) = (grid.nx, grid.ny);
    let rel: Vec<(f64, f64)> = (0..nx * ny)
        .into_par_iter()
        .map(|idx| {
            let (smin, smax) = kernel.q_singular_values(grid.x(idx / ny), grid.y(idx % ny));
            (smin, if smax > 0.0 { smin / smax } else { 0.0 })
        })
        .collect();
    let values: Vec<f64> = rel.iter().map(|r| r.0).collect();

    let mut candidates = Vec::new();
    for i in 0..nx {
        for k in 0..ny {
            let v = rel[i * ny + k].1;
            let mut is_min = true;
            for di in -1i64..=1 {
                for dk in -1i64..=1 {
                    let (ii, kk) = (i as i64 + di, k as i64 + dk);
                    if (di, dk) == (0, 0) || ii < 0 || kk < 0 || ii >= nx as i64 || kk >= ny as i64 {
                        continue;
                    }
                    let w = rel[ii as usize * ny + kk as usize].1;
                    // ties are broken towards the lower index so plateaus report once
                    let earlier = (ii as usize, kk as usize) < (i, k);
                    if w < v || (w == v && earlier) {
                        is_min = false;
                    }
                }
            }
            if is_min {
                candidates.push((i, k));
            }
        }
    }

    let scale = t.norm().max(grid.x_min.abs()).max(grid.x_max.abs()).max(grid.y_max).max(1.0);
    let hx = if grid.x_step() > 0.0 { grid.x_step() } else { 1e-3 * scale };
    let hy = if grid.y_step() > 0.0 { grid.y_step() } else { 1e-3 * scale };
    let objective = |x: f64, y: f64| relative_sigma(&kernel, x, y.abs());
    let refined: Vec<Option<Detection>> = candidates
        .par_iter()
        .map(|&(i, k)| {
            let (x, y) = (grid.x(i), grid.y(k));
            let start_val = rel[i * ny + k].1;
            let ((rx, ry), val) = if start_val <= INVERTIBILITY_TOL {
                ((x, y), start_val)
            } else {
                nelder_mead(&objective, (x, y), (0.5 * hx, 0.5 * hy), 400)
            };
            let (rx, ry) = (rx, ry.abs());
            // the refined point must stay within one grid cell of its node
            let near = (rx - x).abs() <= hx * (1.0 + 1e-12) && (ry - y).abs() <= hy * (1.0 + 1e-12);
            (val <= INVERTIBILITY_TOL && near).then_some(Detection {
                x,
                y,
                refined_x: rx,
                refined_y: ry,
                relative_sigma_min: val,
            })
        })
        .collect();
    Ok(SpectrumScan { grid: *grid, values, detections: refined.into_iter().flatten().collect() })
}

/// Points `(x, y)` with `y >= 0` such that `x + i y` is an eigenvalue of
/// `rho(T)`. Since `rho(Q_s) = (rho(T) - z)(rho(T) - conj z)` with `z = x + i y`,
/// these are exactly the slice coordinates of the S-spectrum.
pub fn eigen_spectrum(t: &CliffordOperator) -> Vec<(f64, f64)> {
    let ev: Vec<Complex<f64>> = t.real_rep().complex_eigenvalues().iter().cloned().collect();
    let mut pts: Vec<(f64, f64)> = ev.iter().map(|z| (z.re, z.im.abs())).collect();
    pts.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.total_cmp(&b.1)));
    pts.dedup_by(|a, b| (a.0 - b.0).abs() <= 1e-12 * (1.0 + b.0.abs()) && (a.1 - b.1).abs() <= 1e-12 * (1.0 + b.1));
    pts
}

/// Sampling plan for the resolvent bound.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RayPlan {
    /// Angles at which `C_phi` is reported.
    pub phis: Vec<f64>,
    /// Log-spaced radii per ray.
    pub radii: usize,
    /// Radii range relative to `||T||`.
    pub r_min_factor: f64,
    pub r_max_factor: f64,
    /// Extra ray angles between the reported ones and `pi/2`.
    pub interior_rays: usize,
    /// Slice grid for the containment scan; chosen from `||T||` when absent.
    pub scan: Option<SliceGrid>,
}

impl RayPlan {
    /// Reports `C_phi` on a uniform set of angles in `(omega, pi/2]` and at `extra`.
    pub fn for_angles(omega: f64, extra: &[f64]) -> Self {
        let mut phis: Vec<f64> = (1..=8).map(|k| omega + (FRAC_PI_2 - omega) * k as f64 / 8.0).collect();
        phis.extend(extra.iter().cloned().filter(|&p| p > omega && p <= FRAC_PI_2));
        phis.sort_by(f64::total_cmp);
        phis.dedup();
        RayPlan { phis, radii: 161, r_min_factor: 1e-4, r_max_factor: 1e4, interior_rays: 16, scan: None }
    }

}

#[derive(Debug, Clone, Serialize)]
pub struct BisectorReport {
    pub omega: f64,
    pub injective: bool,
    pub sigma_min_t: f64,
    pub spectrum_in_sector: bool,
    /// Slice coordinates of the S-spectrum from the eigenvalue route.
    pub spectrum: Vec<(f64, f64)>,
    pub detections: Vec<Detection>,
    /// `(phi, C_phi)`, nonincreasing in `phi`.
    pub c_phi_table: Vec<(f64, f64)>,
    pub reason: Option<String>,
}

impl BisectorReport {
    pub fn passed(&self) -> bool {
        self.injective && self.spectrum_in_sector && self.c_phi_table.iter().all(|c| c.1.is_finite())
    }

    /// A valid resolvent constant at `phi`: the entry at the largest tabulated
    /// angle not exceeding `phi`.
    pub fn c_phi(&self, phi: f64) -> Option<f64> {
        self.c_phi_table
            .iter()
            .filter(|(p, _)| *p <= phi + 1e-15)
            .max_by(|a, b| a.0.total_cmp(&b.0))
            .map(|e| e.1)
    }
}

/// Largest `|s| ||S_L^{-1}(s,T)||` over the four rays `±r e^{±J psi}`.
fn ray_bound(kernel: &ResolventKernel, psi: f64, radii: &[f64], j: &Paravector) -> f64 {
    radii
        .par_iter()
        .map(|&r| {
            let mut best: f64 = 0.0;
            for (sx, sy) in [(1.0, 1.0), (1.0, -1.0), (-1.0, 1.0), (-1.0, -1.0)] {
                let (x, y) = (sx * r * psi.cos(), sy * r * psi.sin());
                let v = match kernel.left_resolvent_real(x, y, j) {
                    Ok(res) => r * linalg::spectral_norm(&res),
                    Err(_) => f64::INFINITY,
                };
                best = best.max(v);
            }
            best
        })
        .reduce(|| 0.0, f64::max)
}

/// Certifies `T` as bisectorial of angle `omega`: injectivity, S-spectrum in
/// the closed double sector, and finite resolvent constants `C_phi`.
pub fn check_bisectorial(t: &CliffordOperator, omega: f64, plan: &RayPlan) -> Result<BisectorReport> {
    let sector = DoubleSector::new(omega)?;
    let kernel = ResolventKernel::new(t);
    let (smin, smax) = linalg::extreme_singular_values(kernel.rho());
    let injective = smin > INVERTIBILITY_TOL * smax && smax > 0.0;
    let norm = smax;

    let spectrum = eigen_spectrum(t);
    let grid = plan.scan.unwrap_or_else(|| SliceGrid::around(norm));
    let scan = scan_spectrum_slice(t, &grid)?;
    let slack = 1e-9;
    let in_sector = |&(x, y): &(f64, f64)| {
        let tiny = 1e-10 * norm.max(1e-300);
        (x.abs() <= tiny && y <= tiny) || sector.closure_contains_xy(x, y, slack)
    };
    let eig_ok = spectrum.iter().all(in_sector);
    let scan_ok = scan.detections.iter().all(|d| in_sector(&(d.refined_x, d.refined_y)));
    let spectrum_in_sector = eig_ok && scan_ok;

    let mut reason = None;
    if !injective {
        reason = Some(format!("T is not injective (sigma_min = {smin:e}, sigma_max = {smax:e})"));
    } else if !spectrum_in_sector {
        let off: Vec<String> = spectrum
            .iter()
            .filter(|p| !in_sector(p))
            .map(|(x, y)| format!("[{x:.6} + S*{y:.6}]"))
            .collect();
        reason = Some(format!("S-spectrum leaves the closed double sector of angle {omega}: {}", off.join(", ")));
    }

    let mut c_phi_table = Vec::new();
    if injective && spectrum_in_sector {
        let j = Paravector::unit(t.n(), 1);
        let radii: Vec<f64> = (0..plan.radii)
            .map(|k| {
                let u = if plan.radii > 1 { k as f64 / (plan.radii - 1) as f64 } else { 0.5 };
                norm * plan.r_min_factor * (plan.r_max_factor / plan.r_min_factor).powf(u)
            })
            .collect();
        let lowest = plan.phis.iter().cloned().fold(FRAC_PI_2, f64::min);
        let mut angles: Vec<f64> = plan.phis.clone();
        angles.extend((0..=plan.interior_rays).map(|k| lowest + (FRAC_PI_2 - lowest) * k as f64 / plan.interior_rays.max(1) as f64));
        angles.sort_by(f64::total_cmp);
        angles.dedup();
        let raw: Vec<f64> = angles.iter().map(|&psi| ray_bound(&kernel, psi, &radii, &j)).collect();
        // the constant for D_phi is a supremum over every ray at angle >= phi
        for &phi in &plan.phis {
            let c = angles
                .iter()
                .zip(&raw)
                .filter(|(a, _)| **a >= phi)
                .map(|(_, v)| *v)
                .fold(0.0, f64::max);
            c_phi_table.push((phi, c));
        }
        if let Some((phi, _)) = c_phi_table.iter().find(|c| !c.1.is_finite()) {
            reason = Some(format!("resolvent bound is not finite on the rays at angle {phi}"));
        }
    }
    Ok(BisectorReport {
        omega,
        injective,
        sigma_min_t: smin,
        spectrum_in_sector,
        spectrum,
        detections: scan.detections,
        c_phi_table,
        reason,
    })
}

/// `|s| ||S_L^{-1}(s,T)||` at a single parameter, for diagnostics.
pub fn resolvent_bound_at(t: &CliffordOperator, s: &Paravector) -> Result<f64> {
    let r = left_s_resolvent(s, t)?;
    Ok(s.abs() * r.norm())
}

/// Angle of the closed sector containing `(x, y)`.
pub fn sector_angle(x: f64, y: f64) -> f64 {
    let a = y.abs().atan2(x);
    a.min(PI - a)
}

/// Left S-resolvent of a scalar multiple of the identity, `(s̄ - λ) / |s - λ|^2`.
pub fn scalar_resolvent(s: &Paravector, lambda: f64) -> CliffordNum {
    let denom = (s.s0 - lambda).powi(2) + s.imag_norm().powi(2);
    let mut c = s.conjugate().to_clifford();
    c.coeffs_mut()[0] -= lambda;
    c.scale(1.0 / denom)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::testutil::*;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn diag(n: usize, d: &[f64]) -> CliffordOperator {
        CliffordOperator::diagonal(n, d)
    }

    #[test]
    fn q_of_scalar_operator() {
        let t = diag(2, &[1.5, 1.5]);
        let s = Paravector::new(0.3, vec![0.4, -1.2]).unwrap();
        let q = q_operator(&s, &t).unwrap();
        let expect = (0.3f64 - 1.5).powi(2) + 0.16 + 1.44;
        let target = CliffordOperator::identity(2, 2).scale(expect);
        assert!(q.max_abs_diff(&target) < 1e-14);
    }

    #[test]
    fn q_for_real_parameter() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let t = random_operator(&mut rng, 2, 2);
        let q = q_operator(&Paravector::real(2, 0.7), &t).unwrap();
        let direct = t.compose(&t).unwrap().sub(&t.scale(1.4)).unwrap().add(&CliffordOperator::identity(2, 2).scale(0.49)).unwrap();
        assert!(q.max_abs_diff(&direct) < 1e-14);
    }

    #[test]
    fn q_ignores_rotation_bitwise() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let t = random_operator(&mut rng, 2, 2);
        let kernel = ResolventKernel::new(&t);
        let (x, y) = (0.3, 0.9);
        let base = kernel.q_singular_values(x, y);
        for _ in 0..20 {
            let j = random_unit(&mut rng, 2);
            let s = Paravector::from_slice(x, y, &j);
            let (sx, _, _) = slice_of(&s);
            assert_eq!(sx, x);
            // slice coordinates fix Q exactly
            assert_eq!(kernel.q_singular_values(x, y), base);
        }
    }

    fn random_unit<R: Rng>(rng: &mut R, n: usize) -> Paravector {
        let v: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let nrm = v.iter().map(|c| c * c).sum::<f64>().sqrt();
        Paravector::new(0.0, v.iter().map(|c| c / nrm).collect()).unwrap()
    }

    #[test]
    fn resolvent_of_scalar_operator() {
        let t = diag(2, &[0.5, 0.5]);
        let s = Paravector::new(-0.2, vec![0.3, 0.7]).unwrap();
        let r = left_s_resolvent(&s, &t).unwrap();
        let target = CliffordOperator::scalar_identity(&scalar_resolvent(&s, 0.5), 2);
        assert!(r.max_abs_diff(&target) < 1e-13);
    }

    #[test]
    fn left_equals_right_for_real_operators() {
        let a = nalgebra::DMatrix::from_row_slice(2, 2, &[1.0, 2.0, -0.5, 3.0]);
        let t = CliffordOperator::from_real_matrix(2, &a).unwrap();
        let s = Paravector::new(0.4, vec![1.0, -0.3]).unwrap();
        let l = left_s_resolvent(&s, &t).unwrap();
        let r = right_s_resolvent(&s, &t).unwrap();
        assert!(l.max_abs_diff(&r) < 1e-10);
    }

    #[test]
    fn resolvent_scaling_identity() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let t = random_operator(&mut rng, 2, 2);
        for _ in 0..10 {
            let s = random_paravector(&mut rng, 2).scale(3.0);
            let tt: f64 = rng.gen_range(0.2..3.0) * if rng.gen_bool(0.5) { 1.0 } else { -1.0 };
            let lhs = left_s_resolvent(&s.scale(1.0 / tt), &t).unwrap().scale(1.0 / tt);
            let rhs = left_s_resolvent(&s, &t.scale(tt)).unwrap();
            let scale = 1.0 + rhs.norm();
            assert!(lhs.max_abs_diff(&rhs) < 1e-9 * scale);
        }
    }

    #[test]
    fn scan_finds_real_eigenvalues() {
        let t = diag(1, &[1.0, -2.0]);
        let grid = SliceGrid::new(-3.0, 3.0, 61, 0.0, 2.0, 21).unwrap();
        let scan = scan_spectrum_slice(&t, &grid).unwrap();
        let mut found: Vec<f64> = scan.detections.iter().map(|d| d.x).collect();
        found.sort_by(f64::total_cmp);
        assert_eq!(found.len(), 2, "{:?}", scan.detections);
        assert!((found[0] + 2.0).abs() <= grid.x_step() && (found[1] - 1.0).abs() <= grid.x_step());
        assert!(scan.detections.iter().all(|d| d.is_real()));
        assert!(scan.values.iter().all(|v| *v >= 0.0));
    }

    #[test]
    fn scan_finds_sphere_of_e1() {
        let t = CliffordOperator::scalar_identity(&CliffordNum::generator(1, 1), 1);
        let grid = SliceGrid::new(-2.0, 2.0, 41, 0.0, 2.0, 21).unwrap();
        let scan = scan_spectrum_slice(&t, &grid).unwrap();
        assert_eq!(scan.detections.len(), 1);
        let d = &scan.detections[0];
        assert!(d.x.abs() <= grid.x_step() && (d.y - 1.0).abs() <= grid.y_step());
    }

    #[test]
    fn empty_region_has_no_detections() {
        let t = diag(1, &[1.0]);
        let grid = SliceGrid::new(2.0, 3.0, 11, 0.0, 1.0, 11).unwrap();
        assert!(scan_spectrum_slice(&t, &grid).unwrap().detections.is_empty());
        assert!(SliceGrid::new(0.0, 1.0, 0, 0.0, 1.0, 3).is_err());
    }

    #[test]
    fn eigen_route_matches_closed_form() {
        let t = CliffordOperator::scalar_identity(&CliffordNum::generator(2, 1), 1);
        let pts = eigen_spectrum(&t);
        assert_eq!(pts.len(), 1);
        assert!(pts[0].0.abs() < 1e-14 && (pts[0].1 - 1.0).abs() < 1e-14);
    }

    #[test]
    fn bisectorial_real_diagonal() {
        let t = diag(1, &[1.0, -2.0]);
        let report = check_bisectorial(&t, 0.1, &RayPlan::for_angles(0.1, &[])).unwrap();
        assert!(report.passed(), "{:?}", report.reason);
        // for real spectra the supremum over the ray at angle phi is 1/sin(phi)
        for &(phi, c) in &report.c_phi_table {
            let oracle = 1.0 / phi.sin();
            assert!(c <= oracle * (1.0 + 1e-9) && c >= 0.95 * oracle, "phi={phi} c={c} oracle={oracle}");
        }
        for w in report.c_phi_table.windows(2) {
            assert!(w[1].1 <= w[0].1);
        }
    }

    #[test]
    fn bisectorial_fails_for_e1() {
        let t = CliffordOperator::scalar_identity(&CliffordNum::generator(1, 1), 1);
        for omega in [0.1, 0.7, 1.5] {
            let report = check_bisectorial(&t, omega, &RayPlan::for_angles(omega, &[])).unwrap();
            assert!(!report.passed());
            assert!(!report.spectrum_in_sector);
        }
    }

    #[test]
    fn bisectorial_flags_non_injective() {
        let t = diag(1, &[0.0, 1.0]);
        let report = check_bisectorial(&t, 0.3, &RayPlan::for_angles(0.3, &[])).unwrap();
        assert!(!report.injective && !report.passed());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(32))]
        #[test]
        fn sigma_min_rotation_invariant(x in -3.0f64..3.0, y in 0.0f64..3.0, seed in 0u64..1000) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let t = random_operator(&mut rng, 2, 2);
            let j1 = random_unit(&mut rng, 2);
            let j2 = random_unit(&mut rng, 2);
            let a = PseudoResolventPoint::new(&Paravector::from_slice(x, y, &j1), &t).unwrap();
            let b = PseudoResolventPoint::new(&Paravector::from_slice(x, y, &j2), &t).unwrap();
            let kernel = ResolventKernel::new(&t);
            prop_assert!((a.sigma_min - b.sigma_min).abs() <= 1e-12 * (1.0 + a.sigma_max));
            prop_assert_eq!(kernel.q_singular_values(x, y), kernel.q_singular_values(x, y));
        }

        #[test]
        fn real_symmetric_spectrum_found(a in -2.0f64..2.0, b in -2.0f64..2.0, c in -2.0f64..2.0) {
            let m = nalgebra::DMatrix::from_row_slice(2, 2, &[a, b, b, c]);
            let t = CliffordOperator::from_real_matrix(1, &m).unwrap();
            let ev = linalg::symmetric_eigenvalues(&m);
            let grid = SliceGrid::new(-5.0, 5.0, 101, 0.0, 1.0, 11).unwrap();
            let scan = scan_spectrum_slice(&t, &grid).unwrap();
            for d in &scan.detections {
                prop_assert!(ev.iter().any(|e| (d.x - e).abs() <= grid.x_step() + 1e-12));
            }
            if (ev[0] - ev[1]).abs() > 3.0 * grid.x_step() {
                for e in &ev {
                    prop_assert!(scan.detections.iter().any(|d| (d.x - e).abs() <= grid.x_step() + 1e-12));
                }
            }
        }
    }
}
