//! Reconstruction of interior values from a boundary trace.
//!
//! The full-boundary functional is
//! `Σ_j w_j ∫_{t*-τ_j}^{t*+τ_j} V_h(x_j - x*, y_j - y*, t - t*)·∂_ν u(x_j, t) dt`
//! with `τ_j` the distance from sample `j` to the target. It equals the
//! interior convolution of `u(·, t*)` with the source density for every `h`,
//! and tends to `u(x*, y*, t*)` as `h → 0`.
//!
//! The partial-boundary functional integrates the rotated cone kernel over
//! an arc and a time window only; its kernel grows like `e^{y'²/h}`.

use alloc::vec::Vec;
use core::f64::consts::{FRAC_PI_2, PI};

use crate::domain::{BoundarySample, Domain};
use crate::kernel::{averaged_value, rotated_cone_kernel, KernelError, KernelParams, SpaceTimePoint};
use crate::synth::{BoundaryTrace, TimeGrid};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TargetPoint {
    pub x: f64,
    pub y: f64,
    pub t: f64,
}

impl TargetPoint {
    pub const fn new(x: f64, y: f64, t: f64) -> Self {
        Self { x, y, t }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadDiagnostics {
    pub boundary_nodes: usize,
    pub time_nodes: usize,
    /// Largest change when the time or the boundary sampling is halved.
    pub est_quad_error: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReconstructionResult {
    pub value: f64,
    pub h: f64,
    pub quad: QuadDiagnostics,
    pub truth: Option<f64>,
    pub abs_error: Option<f64>,
}

impl ReconstructionResult {
    pub fn with_truth(mut self, truth: f64) -> Self {
        self.truth = Some(truth);
        self.abs_error = Some((self.value - truth).abs());
        self
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ReconstructError {
    #[error(transparent)]
    Kernel(#[from] KernelError),
    #[error("trace covers t in [{have_min}, {have_max}] but the target needs [{need_min}, {need_max}]")]
    WindowCoverage { need_min: f64, need_max: f64, have_min: f64, have_max: f64 },
    #[error("target ({x}, {y}) is not inside the domain by at least one boundary spacing ({margin})")]
    TargetOutside { x: f64, y: f64, margin: f64 },
    #[error("boundary sample at s = {s} lies in the cone but not in the arc")]
    ArcCoverage { s: f64 },
    #[error("invalid partial-boundary configuration: {0}")]
    BadConfig(&'static str),
}

/// Distance between a boundary point and the target.
pub fn tau(x: f64, y: f64, tp: &TargetPoint) -> f64 {
    libm::hypot(x - tp.x, y - tp.y)
}

fn check_target(trace: &BoundaryTrace, tp: &TargetPoint) -> Result<(), ReconstructError> {
    let margin = trace.domain.perimeter() / trace.n_boundary() as f64;
    if !(trace.domain.depth(tp.x, tp.y) >= margin) {
        return Err(ReconstructError::TargetOutside { x: tp.x, y: tp.y, margin });
    }
    Ok(())
}

fn check_window(times: &TimeGrid, need_min: f64, need_max: f64) -> Result<(), ReconstructError> {
    let slack = 1e-12 * (times.t_max - times.t_min);
    if need_min < times.t_min - slack || need_max > times.t_max + slack {
        return Err(ReconstructError::WindowCoverage {
            need_min,
            need_max,
            have_min: times.t_min,
            have_max: times.t_max,
        });
    }
    Ok(())
}

/// Trace value at an arbitrary time by linear interpolation.
fn interpolate(times: &TimeGrid, row: &[f64], t: f64) -> f64 {
    let pos = ((t - times.t_min) / times.step()).clamp(0.0, (times.n - 1) as f64);
    let k = (libm::floor(pos) as usize).min(times.n - 2);
    let frac = pos - k as f64;
    row[k] * (1.0 - frac) + row[k + 1] * frac
}

/// Time integral for one boundary sample on the fine nodes and with every
/// other interior node dropped.
struct RowIntegral {
    fine: f64,
    coarse: f64,
    nodes: usize,
}

/// `∫ g` over the interval between `edge` and `other`, where `g` has a
/// square-root edge at `edge`: `t = edge ± u²` makes the integrand smooth
/// in `u`. Four Gauss–Legendre panels in `u`.
fn edge_segment(edge: f64, other: f64, g: impl Fn(f64) -> f64) -> f64 {
    let len = other - edge;
    let rule = crate::quad::gauss_legendre(16);
    let sign = len.signum();
    let top = libm::sqrt(len.abs());
    (0..4)
        .map(|i| {
            let (a, b) = (top * i as f64 / 4.0, top * (i + 1) as f64 / 4.0);
            rule.integrate(a, b, |u| 2.0 * u * g(edge + sign * u * u))
        })
        .sum()
}

/// The integrand `V·∂_ν u` behaves like `√(τ - |t - t*|)` at both ends of
/// the window, which holds the trapezoid rule to order 1.5. The outer
/// quarters of the window (snapped to grid nodes) are integrated in the
/// square-root variable with linearly interpolated data; the middle uses
/// the trapezoid rule on the grid.
fn row_integral(times: &TimeGrid, row: &[f64], t_star: f64, tau: f64, kp: &KernelParams, shape: fn(f64) -> f64) -> RowIntegral {
    let (lo, hi) = (t_star - tau, t_star + tau);
    let kernel_at = |dt: f64| shape(averaged_value(tau, dt, kp));
    let g = |t: f64| kernel_at(t - t_star) * interpolate(times, row, t);
    let dt = times.step();
    let node = |t: f64| libm::round((t - times.t_min) / dt) as i64;
    let first = node(lo + 0.5 * tau).max(node(lo) + 1).max(0);
    let last = node(hi - 0.5 * tau).min(node(hi) - 1).min(times.n as i64 - 1);
    if last - first < 2 {
        let whole = edge_segment(lo, t_star, &g) + edge_segment(hi, t_star, &g);
        return RowIntegral { fine: whole, coarse: whole, nodes: 128 };
    }
    let (first, last) = (first as usize, last as usize);
    let centre = (t_star - times.t_min) / dt;
    let kernel: Vec<f64> = if (centre - libm::round(centre)).abs() < 1e-9 {
        // t* on the grid: the kernel is even in t - t*, evaluate half
        let c = libm::round(centre) as i64;
        let span = (first as i64 - c).abs().max(last as i64 - c) as usize;
        let half: Vec<f64> = (0..=span).map(|m| kernel_at(m as f64 * dt)).collect();
        (first..=last).map(|k| half[(k as i64 - c).unsigned_abs() as usize]).collect()
    } else {
        (first..=last).map(|k| kernel_at(times.time(k) - t_star)).collect()
    };
    let ts: Vec<f64> = (first..=last).map(|k| times.time(k)).collect();
    let fs: Vec<f64> = (first..=last).zip(kernel).map(|(k, v)| v * row[k]).collect();
    let ends = edge_segment(lo, ts[0], &g) + edge_segment(hi, ts[ts.len() - 1], &g);
    let fine = ends + crate::quad::trapezoid(&ts, &fs);
    let n = ts.len();
    let keep = |i: &usize| i % 2 == 0 || *i + 1 == n;
    let cts: Vec<f64> = (0..n).filter(keep).map(|i| ts[i]).collect();
    let cfs: Vec<f64> = (0..n).filter(keep).map(|i| fs[i]).collect();
    let coarse = ends + crate::quad::trapezoid(&cts, &cfs);
    RowIntegral { fine, coarse, nodes: n + 128 }
}

/// Full-boundary reconstruction at one target with regularization `kp.h`.
pub fn reconstruct_point(trace: &BoundaryTrace, tp: &TargetPoint, kp: &KernelParams) -> Result<ReconstructionResult, ReconstructError> {
    kp.validate()?;
    check_target(trace, tp)?;
    let reach = trace.samples.iter().fold(0.0f64, |m, p| m.max(tau(p.x, p.y, tp)));
    check_window(&trace.times, tp.t - reach, tp.t + reach)?;
    let mut fine = 0.0;
    let mut coarse_time = 0.0;
    let mut even = 0.0;
    let mut time_nodes = 0;
    let mut used = 0;
    for (j, p) in trace.samples.iter().enumerate() {
        if p.weight == 0.0 {
            continue;
        }
        used += 1;
        let row = row_integral(&trace.times, trace.row(j), tp.t, tau(p.x, p.y, tp), kp, core::convert::identity);
        fine += p.weight * row.fine;
        coarse_time += p.weight * row.coarse;
        if j % 2 == 0 {
            even += 2.0 * p.weight * row.fine;
        }
        time_nodes += row.nodes;
    }
    let est = (fine - coarse_time).abs().max((fine - even).abs());
    Ok(ReconstructionResult {
        value: fine,
        h: kp.h,
        quad: QuadDiagnostics { boundary_nodes: used, time_nodes, est_quad_error: est },
        truth: None,
        abs_error: None,
    })
}

/// `Σ_j w_j ∫ |V_h| dt` over the windows used by [`reconstruct_point`]: a
/// trace perturbation bounded by `δ` moves the reconstruction by at most
/// `δ` times this.
pub fn kernel_mass(trace: &BoundaryTrace, tp: &TargetPoint, kp: &KernelParams) -> Result<f64, ReconstructError> {
    kp.validate()?;
    check_target(trace, tp)?;
    let reach = trace.samples.iter().fold(0.0f64, |m, p| m.max(tau(p.x, p.y, tp)));
    check_window(&trace.times, tp.t - reach, tp.t + reach)?;
    let ones = alloc::vec![1.0; trace.times.n];
    Ok(trace
        .samples
        .iter()
        .filter(|p| p.weight > 0.0)
        .map(|p| p.weight * row_integral(&trace.times, &ones, tp.t, tau(p.x, p.y, tp), kp, f64::abs).fine)
        .sum())
}

/// [`reconstruct_point`] over many targets; failures stay per target.
pub fn reconstruct_grid(
    trace: &BoundaryTrace,
    targets: &[TargetPoint],
    kp: &KernelParams,
) -> Vec<Result<ReconstructionResult, ReconstructError>> {
    targets.iter().map(|tp| reconstruct_point(trace, tp, kp)).collect()
}

/// One reconstruction per `h`, in the given order.
pub fn h_sweep(
    trace: &BoundaryTrace,
    tp: &TargetPoint,
    hs: &[f64],
    kp: &KernelParams,
    truth: Option<f64>,
) -> Result<Vec<ReconstructionResult>, ReconstructError> {
    hs.iter()
        .map(|&h| {
            let params = KernelParams { h, ..*kp };
            let r = reconstruct_point(trace, tp, &params)?;
            Ok(match truth {
                Some(v) => r.with_truth(v),
                None => r,
            })
        })
        .collect()
}

/// Index of the first entry that is larger than its predecessor, if any.
/// On a sweep ordered by decreasing `h` this marks the onset of the noise
/// floor.
pub fn first_increase(errors: &[f64]) -> Option<usize> {
    errors.windows(2).position(|w| w[1] > w[0]).map(|i| i + 1)
}

/// Default regularization width `max(σ^{2/3}, (2Δt)²)`, balancing an
/// `O(h)` bias against `O(σ h^{-1/2})` noise, floored by the time sampling.
pub fn suggest_h(noise_rel: f64, dt: f64) -> f64 {
    libm::pow(noise_rel.max(0.0), 2.0 / 3.0).max(4.0 * dt * dt)
}

/// Data region and cone orientation for the partial-boundary functional.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PartialBoundaryConfig {
    /// Arc-length interval `[s0, s1]`; wraps through `s = 0` when `s1 < s0`.
    pub arc: (f64, f64),
    /// Time window `[t0, t1]`.
    pub window: (f64, f64),
    /// Rotation angle of the cone kernel; the cone axis points along
    /// `(-sin α, cos α)`.
    pub alpha: f64,
}

impl PartialBoundaryConfig {
    fn contains(&self, s: f64) -> bool {
        let (s0, s1) = self.arc;
        if s0 <= s1 {
            (s0..=s1).contains(&s)
        } else {
            s >= s0 || s <= s1
        }
    }

    /// Cone aimed at the nearest part of the boundary; see [`Self::along`].
    pub fn facing(trace: &BoundaryTrace, tp: &TargetPoint, h: f64) -> Result<Self, ReconstructError> {
        let theta = nearest_direction(trace.domain, tp.x, tp.y);
        Self::along(trace, tp, wrap_angle(theta - FRAC_PI_2), h)
    }

    /// Cone rotated by `alpha`, arc covering every sample where the kernel
    /// exceeds `e^{-36}` of its on-axis size, and the window covering the
    /// kernel's time support there, clipped to the trace.
    pub fn along(trace: &BoundaryTrace, tp: &TargetPoint, alpha: f64, h: f64) -> Result<Self, ReconstructError> {
        check_target(trace, tp)?;
        if !(-PI..=PI).contains(&alpha) {
            return Err(ReconstructError::BadConfig("alpha must lie in [-π, π]"));
        }
        let kept: Vec<(f64, f64)> = trace
            .samples
            .iter()
            .filter_map(|p| {
                let (xr, yr) = rotate(p.x - tp.x, p.y - tp.y, alpha);
                (yr > 0.0 && yr * yr - xr * xr > -36.0 * h).then_some((p.s, yr))
            })
            .collect();
        if kept.is_empty() {
            return Err(ReconstructError::BadConfig("no boundary sample faces the cone"));
        }
        let arc = circular_hull(&kept.iter().map(|k| k.0).collect::<Vec<_>>(), trace.domain.perimeter());
        let reach = kept.iter().fold(0.0f64, |m, k| m.max(k.1));
        let window = ((tp.t - reach).max(trace.times.t_min), (tp.t + reach).min(trace.times.t_max));
        Ok(Self { arc, window, alpha })
    }
}

fn rotate(x: f64, y: f64, alpha: f64) -> (f64, f64) {
    let (sa, ca) = (libm::sin(alpha), libm::cos(alpha));
    (x * ca + y * sa, -x * sa + y * ca)
}

fn wrap_angle(a: f64) -> f64 {
    let mut a = a;
    while a > PI {
        a -= 2.0 * PI;
    }
    while a < -PI {
        a += 2.0 * PI;
    }
    a
}

/// Direction from an interior point to the closest boundary point.
fn nearest_direction(domain: Domain, x: f64, y: f64) -> f64 {
    match domain {
        Domain::Disk { .. } => {
            if x == 0.0 && y == 0.0 {
                FRAC_PI_2
            } else {
                libm::atan2(y, x)
            }
        }
        Domain::Rectangle { a, b } => {
            let sides = [(y, -FRAC_PI_2), (a - x, 0.0), (b - y, FRAC_PI_2), (x, PI)];
            sides.iter().fold((f64::INFINITY, 0.0), |best, &(d, th)| if d < best.0 { (d, th) } else { best }).1
        }
    }
}

/// Smallest arc of the boundary loop containing all given positions.
fn circular_hull(s: &[f64], perimeter: f64) -> (f64, f64) {
    let mut sorted = s.to_vec();
    sorted.sort_by(|a, b| a.total_cmp(b));
    let n = sorted.len();
    // the arc is the complement of the largest gap between neighbours
    let mut gap = sorted[0] + perimeter - sorted[n - 1];
    let mut arc = (sorted[0], sorted[n - 1]);
    for i in 1..n {
        let g = sorted[i] - sorted[i - 1];
        if g > gap {
            gap = g;
            arc = (sorted[i], sorted[i - 1]);
        }
    }
    arc
}

/// Partial-boundary reconstruction with the rotated cone kernel, using
/// trace data on `cfg.arc × cfg.window` only. Under the Dirichlet condition
/// the term with `∂_ν v` drops out.
pub fn reconstruct_partial(
    trace: &BoundaryTrace,
    tp: &TargetPoint,
    cfg: &PartialBoundaryConfig,
    kp: &KernelParams,
) -> Result<ReconstructionResult, ReconstructError> {
    kp.validate()?;
    check_target(trace, tp)?;
    if !(-PI..=PI).contains(&cfg.alpha) {
        return Err(ReconstructError::BadConfig("alpha must lie in [-π, π]"));
    }
    let (t0, t1) = cfg.window;
    if !(t0 < t1) {
        return Err(ReconstructError::BadConfig("empty time window"));
    }
    check_window(&trace.times, t0, t1)?;
    let mut reach = 0.0f64;
    for p in &trace.samples {
        let (xr, yr) = rotate(p.x - tp.x, p.y - tp.y, cfg.alpha);
        let in_cone = yr >= xr.abs();
        let inside = cfg.contains(p.s);
        if in_cone && !inside {
            return Err(ReconstructError::ArcCoverage { s: p.s });
        }
        if in_cone {
            reach = reach.max(libm::sqrt(yr * yr - xr * xr));
        }
    }
    if t0 > tp.t - reach || t1 < tp.t + reach {
        return Err(ReconstructError::BadConfig("time window misses part of the cone's support"));
    }
    let mut fine = 0.0;
    let mut coarse = 0.0;
    let mut used = 0;
    let mut time_nodes = 0;
    for (j, p) in trace.samples.iter().enumerate() {
        if p.weight == 0.0 || !cfg.contains(p.s) {
            continue;
        }
        used += 1;
        let Some((ts, fs)) = partial_row(p, trace.row(j), &trace.times, cfg, tp, kp)? else {
            continue;
        };
        time_nodes += ts.len();
        fine += p.weight * crate::quad::trapezoid(&ts, &fs);
        let n = ts.len();
        let keep = |i: &usize| i % 2 == 0 || *i + 1 == n;
        let cts: Vec<f64> = (0..n).filter(keep).map(|i| ts[i]).collect();
        let cfs: Vec<f64> = (0..n).filter(keep).map(|i| fs[i]).collect();
        coarse += p.weight * crate::quad::trapezoid(&cts, &cfs);
    }
    Ok(ReconstructionResult {
        value: fine,
        h: kp.h,
        quad: QuadDiagnostics { boundary_nodes: used, time_nodes, est_quad_error: (fine - coarse).abs() },
        truth: None,
        abs_error: None,
    })
}

/// Trapezoid nodes for one sample over the part of the window where the
/// cone kernel is supported, `|t - t*| ≤ y'`. The kernel jumps at the ends,
/// so they are nodes of their own with interpolated data.
fn partial_row(
    p: &BoundarySample,
    row: &[f64],
    times: &TimeGrid,
    cfg: &PartialBoundaryConfig,
    tp: &TargetPoint,
    kp: &KernelParams,
) -> Result<Option<(Vec<f64>, Vec<f64>)>, ReconstructError> {
    let (_, yr) = rotate(p.x - tp.x, p.y - tp.y, cfg.alpha);
    let lo = (tp.t - yr).max(cfg.window.0);
    let hi = (tp.t + yr).min(cfg.window.1);
    if !(lo < hi) {
        return Ok(None);
    }
    let dt = times.step();
    let first = (libm::floor((lo - times.t_min) / dt) as i64 + 1).max(0) as usize;
    let last = libm::ceil((hi - times.t_min) / dt) as i64 - 1;
    let mut ts = alloc::vec![lo];
    if last >= first as i64 {
        ts.extend((first..=last as usize).map(|k| times.time(k)));
    }
    ts.push(hi);
    let mut fs = Vec::with_capacity(ts.len());
    for (i, &t) in ts.iter().enumerate() {
        // keep the end nodes on the closed cone despite roundoff
        let rel = SpaceTimePoint::new(p.x - tp.x, p.y - tp.y, (t - tp.t).clamp(-yr, yr));
        let data = if i == 0 || i + 1 == ts.len() {
            interpolate(times, row, t)
        } else {
            row[first + i - 1]
        };
        fs.push(rotated_cone_kernel(&rel, cfg.alpha, kp)? * data);
    }
    Ok(Some((ts, fs)))
}

/// Interior convolution `∫_Ω u(x, y, t*)·ρ_h(x - x*, y - y*) dx dy` in polar
/// coordinates about the target, where the `1/r` of the density cancels
/// the Jacobian. Trapezoid in angle, Gauss–Legendre panels in radius up to
/// the boundary (or where the Gaussian is below `e^{-144}`).
#[cfg(any(test, feature = "oracle"))]
pub fn interior_convolution(
    u: impl Fn(f64, f64) -> f64,
    domain: Domain,
    tp: &TargetPoint,
    h: f64,
    n_theta: usize,
) -> f64 {
    let rule = crate::quad::gauss_legendre(32);
    let sh = libm::sqrt(h);
    let norm = 1.0 / (PI * libm::sqrt(PI * h));
    let mut total = 0.0;
    for k in 0..n_theta {
        let theta = 2.0 * PI * k as f64 / n_theta as f64;
        let (st, ct) = (libm::sin(theta), libm::cos(theta));
        let top = domain.ray_exit(tp.x, tp.y, theta).min(12.0 * sh);
        let panels = libm::ceil(top / (0.5 * sh)).max(1.0) as usize;
        let width = top / panels as f64;
        for i in 0..panels {
            let a = i as f64 * width;
            total += rule.integrate(a, a + width, |r| u(tp.x + r * ct, tp.y + r * st) * libm::exp(-r * r / h));
        }
    }
    total * norm * 2.0 * PI / n_theta as f64
}
