//! Kernels for recovering a wave field from boundary data.
//!
//! * the base kernel `w_h` (three integral representations, [`base`]),
//! * the cone kernel `v_h = -θ(y - |t|)·w_h` and its rotations,
//! * the rotation-averaged kernel `V_h`, evaluated either directly from the
//!   average (exponentially growing integrands, moderate `h` only) or through
//!   a representation whose exponents are all nonpositive,
//! * the source density `ρ_h` that `V_h` emits at `t = 0`,
//! * the Gaussian time mollifier and the mollified averaged kernel.
//!
//! Everything is nondimensional with unit wave speed.

pub mod base;
mod wide;

use core::f64::consts::{FRAC_PI_2, PI};

use crate::quad::{gauss_legendre, ladder_size};
use crate::special::bessel_i0_scaled;

/// `1 / (4π^{3/2})`, the prefactor of the base kernel (before `1/√h`).
pub const BASE_NORM: f64 = 0.044_896_780_531_291_64;

/// Default cap on real exponents before a growing kernel reports the
/// unstable regime (`e^700` is near the top of the `f64` range).
pub const DEFAULT_MAX_EXPONENT: f64 = 700.0;

/// Below `exp(-CORRECTION_CUTOFF)` the near-cone correction is dropped.
const CORRECTION_CUTOFF: f64 = 42.0;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum KernelError {
    #[error("invalid kernel parameters: {0}")]
    InvalidParams(&'static str),
    #[error("non-finite kernel argument")]
    NonFinite,
    #[error("{0}")]
    Domain(&'static str),
    #[error("exponent {exponent:.1} exceeds the cap {cap}: unstable regime, use the stable averaged kernel")]
    UnstableRegime { exponent: f64, cap: f64 },
    #[error("source density is singular at the origin")]
    SingularOrigin,
}

/// Regularization and quadrature settings shared by every kernel.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KernelParams {
    /// Regularization width (length² units).
    pub h: f64,
    /// Base node count in the `s` variable.
    pub n_s: usize,
    /// Base node count per panel in the angular (`α`, `φ`) variables.
    pub n_alpha: usize,
    /// Mollifier width in time² units; zero disables mollification.
    pub eps: f64,
    /// Largest real exponent a growing kernel may produce.
    pub max_exponent: f64,
}

impl KernelParams {
    pub fn new(h: f64) -> Result<Self, KernelError> {
        let kp = Self { h, n_s: 16, n_alpha: 16, eps: 0.0, max_exponent: DEFAULT_MAX_EXPONENT };
        kp.validate()?;
        Ok(kp)
    }

    pub fn with_eps(mut self, eps: f64) -> Result<Self, KernelError> {
        self.eps = eps;
        self.validate()?;
        Ok(self)
    }

    pub fn with_nodes(mut self, n_s: usize, n_alpha: usize) -> Result<Self, KernelError> {
        self.n_s = n_s;
        self.n_alpha = n_alpha;
        self.validate()?;
        Ok(self)
    }

    pub fn validate(&self) -> Result<(), KernelError> {
        if !(self.h.is_finite() && self.h > 0.0) {
            return Err(KernelError::InvalidParams("h must be positive and finite"));
        }
        if self.n_s < 8 {
            return Err(KernelError::InvalidParams("n_s must be at least 8"));
        }
        if self.n_alpha < 8 {
            return Err(KernelError::InvalidParams("n_alpha must be at least 8"));
        }
        if !(self.eps.is_finite() && self.eps >= 0.0) {
            return Err(KernelError::InvalidParams("eps must be nonnegative and finite"));
        }
        if !(self.max_exponent > 0.0) {
            return Err(KernelError::InvalidParams("max_exponent must be positive"));
        }
        Ok(())
    }

    fn refined(&self, factor: usize) -> Self {
        Self { n_s: self.n_s * factor, n_alpha: self.n_alpha * factor, ..*self }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpaceTimePoint {
    pub x: f64,
    pub y: f64,
    pub t: f64,
}

impl SpaceTimePoint {
    pub const fn new(x: f64, y: f64, t: f64) -> Self {
        Self { x, y, t }
    }

    pub fn radius(&self) -> f64 {
        libm::hypot(self.x, self.y)
    }

    fn check(&self) -> Result<(), KernelError> {
        if self.x.is_finite() && self.y.is_finite() && self.t.is_finite() {
            Ok(())
        } else {
            Err(KernelError::NonFinite)
        }
    }
}

/// A point in `(r, t)` with `r = √(x² + y²)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RadialPoint {
    pub r: f64,
    pub t: f64,
}

impl RadialPoint {
    pub fn new(r: f64, t: f64) -> Result<Self, KernelError> {
        if !(r.is_finite() && t.is_finite()) {
            return Err(KernelError::NonFinite);
        }
        if r < 0.0 {
            return Err(KernelError::Domain("radial coordinate must be nonnegative"));
        }
        Ok(Self { r, t })
    }
}

/// A kernel value with a node-doubling estimate of its quadrature error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KernelValue {
    pub value: f64,
    pub est_quad_error: f64,
}

/// Cone kernel `v_h(x, y, t) = -θ(y - |t|)·w_h(x, y, t)` with `θ(0) = 1`.
pub fn cone_kernel(p: &SpaceTimePoint, kp: &KernelParams) -> Result<f64, KernelError> {
    p.check()?;
    if p.y < p.t.abs() {
        return Ok(0.0);
    }
    Ok(-base::inside(p, kp)?)
}

/// Cone kernel evaluated at the point rotated by `alpha`:
/// `(x, y) ↦ (x cos α + y sin α, -x sin α + y cos α)`.
pub fn rotated_cone_kernel(p: &SpaceTimePoint, alpha: f64, kp: &KernelParams) -> Result<f64, KernelError> {
    if !(-PI..=PI).contains(&alpha) {
        return Err(KernelError::Domain("rotation angle must lie in [-π, π]"));
    }
    let (sa, ca) = (libm::sin(alpha), libm::cos(alpha));
    let rotated = SpaceTimePoint::new(p.x * ca + p.y * sa, -p.x * sa + p.y * ca, p.t);
    cone_kernel(&rotated, kp)
}

/// Averaged kernel straight from its definition: the mean of the rotated
/// cone kernel over all angles. Only the angles where the rotated point lies
/// inside the cone contribute, so the average is a Gauss–Legendre integral
/// over that arc. The integrand grows like `exp(r²/h)`; use it as a
/// reference for moderate `h` only.
pub fn averaged_direct(p: &SpaceTimePoint, kp: &KernelParams) -> Result<f64, KernelError> {
    p.check()?;
    kp.validate()?;
    let r = p.radius();
    let at = p.t.abs();
    if r < at {
        return Ok(0.0);
    }
    let half_arc = libm::acos((at / r).min(1.0));
    if half_arc == 0.0 {
        return Ok(0.0);
    }
    // rotated y' = r·cos(α - centre)
    let centre = libm::atan2(-p.x, p.y);
    let wanted = libm::ceil(8.0 * r * r / kp.h) as usize;
    let rule = gauss_legendre((4 * kp.n_alpha).max(wanted));
    let mut failure = None;
    let integral = rule.integrate(centre - half_arc, centre + half_arc, |alpha| {
        match rotated_cone_kernel(p, wrap_angle(alpha), kp) {
            Ok(v) => v,
            Err(e) => {
                failure.get_or_insert(e);
                0.0
            }
        }
    });
    match failure {
        Some(e) => Err(e),
        None => Ok(integral / (2.0 * PI)),
    }
}

fn wrap_angle(alpha: f64) -> f64 {
    let mut a = alpha;
    while a > PI {
        a -= 2.0 * PI;
    }
    while a < -PI {
        a += 2.0 * PI;
    }
    a
}

/// Averaged kernel through the representation without growing terms.
///
/// Zero for `r < |t|`. Otherwise the sum of
/// * the half-plane average `-(1/(4π^{3/2}√h)) ∫_{-π/2}^{π/2} e^{-q/2} I_0(q/2) dφ`
///   with `q = (r sin φ + t)²/h` (the inner `s` integral of the double
///   representation done in closed form), and
/// * the near-cone correction `(1/π) ∫_{α₀}^{π/2} w_h(r sin α, r cos α, t) dα`,
///   `α₀ = arccos(|t|/r)`, with `w_h` in its outside-cone form.
///
/// The error estimate is the change under doubling every node count.
pub fn averaged_stable(q: &RadialPoint, kp: &KernelParams) -> Result<KernelValue, KernelError> {
    kp.validate()?;
    if q.r < q.t.abs() {
        return Ok(KernelValue { value: 0.0, est_quad_error: 0.0 });
    }
    let coarse = stable_value(q.r, q.t, kp);
    let fine = stable_value(q.r, q.t, &kp.refined(2));
    Ok(KernelValue { value: coarse, est_quad_error: (coarse - fine).abs() })
}

/// Averaged kernel at a space-time point (radially symmetric in `(x, y)`).
pub fn averaged(p: &SpaceTimePoint, kp: &KernelParams) -> Result<KernelValue, KernelError> {
    p.check()?;
    averaged_stable(&RadialPoint::new(p.radius(), p.t)?, kp)
}

/// Value of [`averaged_stable`] without the error estimate; the
/// reconstruction hot path. `kp` is assumed valid.
#[inline]
pub fn averaged_value(r: f64, t: f64, kp: &KernelParams) -> f64 {
    if r < t.abs() {
        return 0.0;
    }
    stable_value(r, t, kp)
}

fn stable_value(r: f64, t: f64, kp: &KernelParams) -> f64 {
    half_plane_average(r, t, kp) + near_cone_correction(r, t, kp)
}

/// `-(1/2π) ∫_{-π/2}^{π/2} w_h(r sin α, r cos α, t) dα`.
pub fn half_plane_average(r: f64, t: f64, kp: &KernelParams) -> f64 {
    let h = kp.h;
    let rule = gauss_legendre(kp.n_alpha);
    let integrand = |phi: f64| {
        let z = r * libm::sin(phi) + t;
        bessel_i0_scaled(0.5 * z * z / h)
    };
    let peak = if r > 0.0 { libm::asin((-t / r).clamp(-1.0, 1.0)) } else { 0.0 };
    let first = 0.5 * libm::sqrt(h) / r.max(1e-300);
    let integral = graded(rule, -FRAC_PI_2, peak, first, integrand) + graded(rule, FRAC_PI_2, peak, first, integrand);
    -BASE_NORM / libm::sqrt(h) * integral
}

/// `(1/π) ∫_{α₀}^{π/2} w_h(r sin α, r cos α, t) dα` for `r ≥ |t|`.
pub fn near_cone_correction(r: f64, t: f64, kp: &KernelParams) -> f64 {
    let at = t.abs();
    let gap = r - at;
    if gap * gap / kp.h > CORRECTION_CUTOFF {
        return 0.0;
    }
    // r = |t| = 0 takes the branch limit α₀ = 0 (NaN.min(1) = 1)
    let lower = libm::acos((at / r).min(1.0));
    if lower >= FRAC_PI_2 {
        return 0.0;
    }
    // next to the cone the integrand varies on the scale √h/r near α₀
    let rule = gauss_legendre(kp.n_alpha);
    let integrand = |alpha: f64| {
        let (sa, ca) = (libm::sin(alpha), libm::cos(alpha));
        let y = r * ca;
        let b = libm::sqrt((t * t - y * y).max(0.0));
        let x = r * sa;
        // x ≥ b here, and the integrand never exceeds exp(-(x - b)²/h)
        if (x - b) * (x - b) / kp.h > CORRECTION_CUTOFF {
            return 0.0;
        }
        base::outside_by_halfwidth(x, b, kp)
    };
    graded(rule, FRAC_PI_2, lower, 2.0 * libm::sqrt(kp.h) / r, integrand) / PI
}

/// Integral over the segment between `peak` and `end`, with Gauss–Legendre
/// panels whose lengths double away from the peak, starting at `first`.
fn graded<F: Fn(f64) -> f64>(rule: &crate::quad::GaussLegendre, end: f64, peak: f64, first: f64, f: F) -> f64 {
    let length = (end - peak).abs();
    if length == 0.0 {
        return 0.0;
    }
    let sign = if end >= peak { 1.0 } else { -1.0 };
    let mut near = 0.0;
    let mut far = first.min(length);
    let mut total = 0.0;
    loop {
        total += rule.integrate(peak + sign * near, peak + sign * far, &f);
        if far >= length {
            break;
        }
        near = far;
        far = (2.0 * far).min(length);
    }
    total * sign
}

/// Source density `ρ_h(x, y) = e^{-(x²+y²)/h} / (π√(πh)·√(x²+y²))`.
pub fn source_density(x: f64, y: f64, kp: &KernelParams) -> Result<f64, KernelError> {
    let r = libm::hypot(x, y);
    if r == 0.0 {
        return Err(KernelError::SingularOrigin);
    }
    if !r.is_finite() {
        return Err(KernelError::NonFinite);
    }
    Ok(libm::exp(-r * r / kp.h) / (PI * libm::sqrt(PI * kp.h) * r))
}

/// Gaussian mollifier `ψ^ε(t) = e^{-t²/ε} / √(πε)`.
pub fn mollifier(t: f64, eps: f64) -> f64 {
    libm::exp(-t * t / eps) / libm::sqrt(PI * eps)
}

/// Time convolution of the mollifier with the averaged kernel,
/// `∫_{-r}^{r} ψ^ε(t - t₁)·V_h(x, y, t₁) dt₁`. With `eps = 0` this is the
/// averaged kernel itself.
///
/// The substitution `t₁ = r cos θ` removes the square-root behaviour of the
/// kernel at the cone; panels are graded around the mollifier's peak.
pub fn mollified_averaged(p: &SpaceTimePoint, kp: &KernelParams) -> Result<f64, KernelError> {
    p.check()?;
    kp.validate()?;
    if kp.eps == 0.0 {
        return averaged(p, kp).map(|v| v.value);
    }
    let r = p.radius();
    if r == 0.0 {
        return Ok(0.0);
    }
    let eps = kp.eps;
    let t = p.t;
    let rule = gauss_legendre(ladder_size(2 * kp.n_alpha));
    let integrand = |theta: f64| {
        let (st, ct) = (libm::sin(theta), libm::cos(theta));
        let t1 = r * ct;
        mollifier(t - t1, eps) * averaged_value(r, t1, kp) * r * st
    };
    let peak = libm::acos((t / r).clamp(-1.0, 1.0));
    let first = 0.5 * libm::sqrt(eps) / r;
    Ok(graded(rule, 0.0, peak, first, integrand) + graded(rule, PI, peak, first, integrand))
}

#[cfg(test)]
mod tests;
