//! The base kernel in its three representations.
//!
//! All three are integrals over one period of `s` of
//! `exp(-(X(s))^2 / h)` with a complex `X`; the imaginary parts cancel under
//! `s ↔ -s`, so only real, even integrands over `[0, π]` are summed. The
//! periodic trapezoid rule is spectrally accurate for these.

use super::wide::{self, Wide};
use super::{KernelError, KernelParams, SpaceTimePoint, BASE_NORM};
use crate::quad::even_periodic;

/// Relative accuracy the unified representation is evaluated to.
const UNIFIED_RTOL: f64 = 1e-12;

/// Half-period panel count for the oscillatory representations:
/// `max(n_s, ⌈8·(|x|+|y|+|t|)·max(|x|,|y|,|t|)/h⌉)`.
pub fn oscillatory_nodes(p: &SpaceTimePoint, kp: &KernelParams) -> usize {
    let (ax, ay, at) = (p.x.abs(), p.y.abs(), p.t.abs());
    let sum = ax + ay + at;
    let top = ax.max(ay).max(at);
    let wanted = libm::ceil(8.0 * sum * top / kp.h);
    kp.n_s.max(clamp_count(wanted))
}

/// Half-period panel count for the Gaussian (non-oscillatory) outside form,
/// with half-width `b` and shift `x`.
pub fn gaussian_nodes(x: f64, b: f64, kp: &KernelParams) -> usize {
    let wanted = libm::ceil(4.0 * libm::sqrt(b * (b + x.abs()) / kp.h)) + 8.0;
    kp.n_s.max(clamp_count(wanted))
}

fn clamp_count(n: f64) -> usize {
    if n.is_finite() {
        (n as usize).min(1 << 24)
    } else {
        1 << 24
    }
}

fn check_exponent(exponent: f64, kp: &KernelParams) -> Result<(), KernelError> {
    if exponent > kp.max_exponent {
        Err(KernelError::UnstableRegime { exponent, cap: kp.max_exponent })
    } else {
        Ok(())
    }
}

/// Unified representation, valid at every `(x, y, t)`:
/// `(1/(4π^{3/2}√h)) ∫_{-π}^{π} exp(-(x - i·y·sin s + t·cos s)²/h) ds`.
///
/// The integrand's real part is `exp(((y sin s)² - (x + t cos s)²)/h)`
/// times `cos(2·y sin s·(x + t cos s)/h)`. For large `y²/h` the terms are
/// many orders of magnitude larger than their sum; when the running bound
/// on the `f64` rounding error exceeds the target accuracy the same rule is
/// re-evaluated in 256-bit fixed point.
pub fn unified(p: &SpaceTimePoint, kp: &KernelParams) -> Result<f64, KernelError> {
    p.check()?;
    check_exponent(p.y * p.y / kp.h, kp)?;
    let n = oscillatory_nodes(p, kp);
    let (value, magnitude) = unified_f64(p, kp.h, n);
    if 64.0 * f64::EPSILON * magnitude <= UNIFIED_RTOL * value.abs() {
        return Ok(value * BASE_NORM / libm::sqrt(kp.h));
    }
    Ok(unified_wide(p, kp.h, n) * BASE_NORM / libm::sqrt(kp.h))
}

fn unified_f64(p: &SpaceTimePoint, h: f64, n: usize) -> (f64, f64) {
    let mut magnitude = 0.0;
    let value = even_periodic(n, |s| {
        let (sn, cs) = (libm::sin(s), libm::cos(s));
        let a = p.x + p.t * cs;
        let b = p.y * sn;
        let envelope = libm::exp((b * b - a * a) / h);
        magnitude += envelope;
        envelope * libm::cos(2.0 * a * b / h)
    });
    (value, magnitude * core::f64::consts::PI / n as f64)
}

fn unified_wide(p: &SpaceTimePoint, h: f64, n: usize) -> f64 {
    let x = Wide::from_f64(p.x);
    let y = Wide::from_f64(p.y);
    let t = Wide::from_f64(p.t);
    let inv_h = wide::from_int(1).div(&Wide::from_f64(h));
    let mut acc = Wide::zero();
    // nodes k·π/n by repeated rotation; the rounding drift stays near 2^-256·n
    let (step_cos, step_sin) = wide::pi_fraction(1, n as i64).cos_sin();
    let (mut cs, mut sn) = (wide::from_int(1), Wide::zero());
    for k in 0..=n {
        let a = &x + &(&t * &cs);
        let b = &y * &sn;
        let exponent = &(&(&b * &b) - &(&a * &a)) * &inv_h;
        let phase = &(&(&a * &b) * &inv_h) + &(&(&a * &b) * &inv_h);
        let (cos_phase, _) = phase.cos_sin();
        let mut term = &exponent.exp() * &cos_phase;
        if k == 0 || k == n {
            term = &term * &Wide::from_f64(0.5);
        }
        acc = &acc + &term;
        (cs, sn) = (&(&cs * &step_cos) - &(&sn * &step_sin), &(&cs * &step_sin) + &(&sn * &step_cos));
    }
    // 2·(π/n)·Σ
    let scale = &wide::pi_fraction(2, n as i64) * &acc;
    scale.to_f64()
}

/// Inside-cone representation (`|y| ≥ |t|`):
/// `(1/(4π^{3/2}√h)) ∫ exp(-(x - i·√(y²-t²)·sin s)²/h) ds`.
pub fn inside(p: &SpaceTimePoint, kp: &KernelParams) -> Result<f64, KernelError> {
    p.check()?;
    if p.y.abs() < p.t.abs() {
        return Err(KernelError::Domain("inside-cone form needs |y| >= |t|"));
    }
    let a2 = p.y * p.y - p.t * p.t;
    check_exponent(a2 / kp.h, kp)?;
    let a = libm::sqrt(a2);
    let n = oscillatory_nodes(p, kp);
    let x = p.x;
    let h = kp.h;
    let value = even_periodic(n, |s| {
        let b = a * libm::sin(s);
        libm::exp((b * b - x * x) / h) * libm::cos(2.0 * x * b / h)
    });
    Ok(value * BASE_NORM / libm::sqrt(h))
}

/// Outside-cone representation (`|y| < |t|`):
/// `(1/(4π^{3/2}√h)) ∫ exp(-(x + √(t²-y²)·sin s)²/h) ds`. Positive and at
/// most `1/(2√(πh))`.
pub fn outside(p: &SpaceTimePoint, kp: &KernelParams) -> Result<f64, KernelError> {
    p.check()?;
    if p.y.abs() >= p.t.abs() {
        return Err(KernelError::Domain("outside-cone form needs |y| < |t|"));
    }
    let b = libm::sqrt(p.t * p.t - p.y * p.y);
    Ok(outside_by_halfwidth(p.x, b, kp))
}

/// Outside form parametrized directly by the shift `x` and half-width
/// `b = √(t² - y²)`; the stable averaged kernel calls this on its hot path.
#[inline]
pub(crate) fn outside_by_halfwidth(x: f64, b: f64, kp: &KernelParams) -> f64 {
    let n = gaussian_nodes(x, b, kp);
    outside_with_nodes(x, b, kp.h, n)
}

#[inline]
pub(crate) fn outside_with_nodes(x: f64, b: f64, h: f64, n: usize) -> f64 {
    // sin s -> cos s (a quarter-period shift) makes the integrand even
    let value = even_periodic(n, |s| {
        let z = x + b * libm::cos(s);
        libm::exp(-z * z / h)
    });
    value * BASE_NORM / libm::sqrt(h)
}
