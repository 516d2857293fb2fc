//! Disk and rectangle domains with arc-length boundary sampling.
//!
//! The disk is centred at the origin. The rectangle is `[0, a] × [0, b]`,
//! traversed counterclockwise from the corner at the origin.

use alloc::vec::Vec;
use core::f64::consts::PI;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Domain {
    Disk { radius: f64 },
    Rectangle { a: f64, b: f64 },
}

/// One boundary sample: arc-length position, point, outward unit normal and
/// the arc-length quadrature weight attached to it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundarySample {
    pub s: f64,
    pub x: f64,
    pub y: f64,
    pub nu_x: f64,
    pub nu_y: f64,
    pub weight: f64,
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum DomainError {
    #[error("domain sizes must be positive and finite")]
    InvalidSize,
    #[error("need at least 4 boundary samples, got {0}")]
    TooFewSamples(usize),
}

impl Domain {
    pub fn disk(radius: f64) -> Result<Self, DomainError> {
        let d = Domain::Disk { radius };
        d.validate()?;
        Ok(d)
    }

    pub fn rectangle(a: f64, b: f64) -> Result<Self, DomainError> {
        let d = Domain::Rectangle { a, b };
        d.validate()?;
        Ok(d)
    }

    pub fn validate(&self) -> Result<(), DomainError> {
        let ok = |v: f64| v.is_finite() && v > 0.0;
        let valid = match *self {
            Domain::Disk { radius } => ok(radius),
            Domain::Rectangle { a, b } => ok(a) && ok(b),
        };
        if valid {
            Ok(())
        } else {
            Err(DomainError::InvalidSize)
        }
    }

    pub fn perimeter(&self) -> f64 {
        match *self {
            Domain::Disk { radius } => 2.0 * PI * radius,
            Domain::Rectangle { a, b } => 2.0 * (a + b),
        }
    }

    /// Largest distance between two points of the closure.
    pub fn diameter(&self) -> f64 {
        match *self {
            Domain::Disk { radius } => 2.0 * radius,
            Domain::Rectangle { a, b } => libm::hypot(a, b),
        }
    }

    /// Signed distance to the boundary, positive inside.
    pub fn depth(&self, x: f64, y: f64) -> f64 {
        match *self {
            Domain::Disk { radius } => radius - libm::hypot(x, y),
            Domain::Rectangle { a, b } => x.min(a - x).min(y).min(b - y),
        }
    }

    pub fn contains(&self, x: f64, y: f64) -> bool {
        self.depth(x, y) > 0.0
    }

    /// Boundary point and outward normal at arc length `s` (taken mod the
    /// perimeter). At a rectangle corner the normal is the diagonal bisector.
    pub fn point_at(&self, s: f64) -> (f64, f64, f64, f64) {
        let perimeter = self.perimeter();
        let s = s.rem_euclid(perimeter);
        match *self {
            Domain::Disk { radius } => {
                let phi = s / radius;
                let (sp, cp) = (libm::sin(phi), libm::cos(phi));
                (radius * cp, radius * sp, cp, sp)
            }
            Domain::Rectangle { a, b } => {
                let tol = 1e-12 * perimeter;
                let corners = [0.0, a, a + b, 2.0 * a + b, perimeter];
                if corners.iter().any(|c| (s - c).abs() <= tol) {
                    let (x, y) = if (s - a).abs() <= tol {
                        (a, 0.0)
                    } else if (s - a - b).abs() <= tol {
                        (a, b)
                    } else if (s - 2.0 * a - b).abs() <= tol {
                        (0.0, b)
                    } else {
                        (0.0, 0.0)
                    };
                    let h = core::f64::consts::FRAC_1_SQRT_2;
                    let nx = if x > 0.0 { h } else { -h };
                    let ny = if y > 0.0 { h } else { -h };
                    return (x, y, nx, ny);
                }
                if s < a {
                    (s, 0.0, 0.0, -1.0)
                } else if s < a + b {
                    (a, s - a, 1.0, 0.0)
                } else if s < 2.0 * a + b {
                    (a - (s - a - b), b, 0.0, 1.0)
                } else {
                    (0.0, b - (s - 2.0 * a - b), -1.0, 0.0)
                }
            }
        }
    }

    fn is_corner(&self, s: f64) -> bool {
        match *self {
            Domain::Disk { .. } => false,
            Domain::Rectangle { a, b } => {
                let perimeter = self.perimeter();
                let tol = 1e-12 * perimeter;
                let s = s.rem_euclid(perimeter);
                [0.0, a, a + b, 2.0 * a + b, perimeter].iter().any(|c| (s - c).abs() <= tol)
            }
        }
    }

    /// `n` samples at uniform arc-length spacing `P/n`, starting at `s = 0`.
    /// Each carries weight `P/n` except rectangle corners, which carry zero.
    pub fn boundary_samples(&self, n: usize) -> Result<Vec<BoundarySample>, DomainError> {
        self.validate()?;
        if n < 4 {
            return Err(DomainError::TooFewSamples(n));
        }
        let spacing = self.perimeter() / n as f64;
        Ok((0..n)
            .map(|j| {
                let s = spacing * j as f64;
                let (x, y, nu_x, nu_y) = self.point_at(s);
                let weight = if self.is_corner(s) { 0.0 } else { spacing };
                BoundarySample { s, x, y, nu_x, nu_y, weight }
            })
            .collect())
    }

    /// Distance from an interior point to the boundary along direction
    /// `theta`.
    pub fn ray_exit(&self, x: f64, y: f64, theta: f64) -> f64 {
        let (dy, dx) = (libm::sin(theta), libm::cos(theta));
        match *self {
            Domain::Disk { radius } => {
                // |p + ρ d|² = R²
                let pd = x * dx + y * dy;
                let c = x * x + y * y - radius * radius;
                -pd + libm::sqrt((pd * pd - c).max(0.0))
            }
            Domain::Rectangle { a, b } => {
                let mut best = f64::INFINITY;
                if dx > 0.0 {
                    best = best.min((a - x) / dx);
                } else if dx < 0.0 {
                    best = best.min(-x / dx);
                }
                if dy > 0.0 {
                    best = best.min((b - y) / dy);
                } else if dy < 0.0 {
                    best = best.min(-y / dy);
                }
                best
            }
        }
    }
}
