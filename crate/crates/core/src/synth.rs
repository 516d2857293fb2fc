//! Exact Dirichlet eigenmode solutions, their boundary traces and noise.

use alloc::string::String;
use alloc::vec::Vec;
use core::f64::consts::PI;

use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::domain::{BoundarySample, Domain, DomainError};
use crate::special::{bessel_j, bessel_j_derivative, bessel_zero};

/// Name of the noise generator, recorded in trace provenance.
pub const NOISE_RNG: &str = "chacha20";

/// Largest Bessel order and zero index accepted for disk modes.
pub const MAX_DISK_INDEX: u32 = 20;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Azimuth {
    Cos,
    Sin,
}

/// One standing wave.
///
/// Disk: `A·J_m(λ r/R)·{cos|sin}(mφ)·cos(λ t/R + phase)` with `λ` the `k`-th
/// zero of `J_m`. Rectangle: `A·sin(nπx/a)·sin(mπy/b)·cos(ωt + phase)` with
/// `ω = π√(n²/a² + m²/b²)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ModeSpec {
    Disk { m: u32, k: u32, azimuth: Azimuth, amplitude: f64, phase: f64 },
    Rectangle { n: u32, m: u32, amplitude: f64, phase: f64 },
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum SynthError {
    #[error("at least one mode is required")]
    NoModes,
    #[error("mode {0}: {1}")]
    BadMode(usize, &'static str),
    #[error("time grid needs t_max > t_min and at least 2 samples")]
    BadTimeGrid,
    #[error("noise level must be nonnegative and finite")]
    BadNoise,
    #[error(transparent)]
    Domain(#[from] DomainError),
}

#[derive(Debug, Clone, Copy, PartialEq)]
struct Resolved {
    spec: ModeSpec,
    /// Spatial wavenumber (`λ/R`, or `ω` for the rectangle); also the
    /// angular frequency.
    omega: f64,
}

/// Closed-form solution: a finite sum of eigenmodes of one domain.
#[derive(Debug, Clone, PartialEq)]
pub struct GroundTruth {
    domain: Domain,
    modes: Vec<Resolved>,
}

impl GroundTruth {
    pub fn new(domain: Domain, modes: &[ModeSpec]) -> Result<Self, SynthError> {
        domain.validate()?;
        if modes.is_empty() {
            return Err(SynthError::NoModes);
        }
        let resolved = modes
            .iter()
            .enumerate()
            .map(|(i, &spec)| resolve(domain, i, spec))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Self { domain, modes: resolved })
    }

    pub fn domain(&self) -> Domain {
        self.domain
    }

    /// Angular frequencies of the modes, in order.
    pub fn frequencies(&self) -> Vec<f64> {
        self.modes.iter().map(|m| m.omega).collect()
    }

    pub fn u(&self, x: f64, y: f64, t: f64) -> f64 {
        self.modes.iter().map(|m| m.spatial(self.domain, x, y) * m.temporal(t)).sum()
    }

    pub fn u_t(&self, x: f64, y: f64, t: f64) -> f64 {
        self.modes.iter().map(|m| m.spatial(self.domain, x, y) * m.temporal_derivative(t)).sum()
    }

    /// `Δu`; each mode is an eigenfunction, `Δu = -ω²u` per term.
    pub fn laplacian(&self, x: f64, y: f64, t: f64) -> f64 {
        self.modes
            .iter()
            .map(|m| -m.omega * m.omega * m.spatial(self.domain, x, y) * m.temporal(t))
            .sum()
    }

    pub fn gradient(&self, x: f64, y: f64, t: f64) -> (f64, f64) {
        self.modes.iter().fold((0.0, 0.0), |(gx, gy), m| {
            let (sx, sy) = m.spatial_gradient(self.domain, x, y);
            let c = m.temporal(t);
            (gx + sx * c, gy + sy * c)
        })
    }

    /// `∂_ν u` at a boundary sample.
    pub fn normal_derivative(&self, p: &BoundarySample, t: f64) -> f64 {
        let (gx, gy) = self.gradient(p.x, p.y, t);
        gx * p.nu_x + gy * p.nu_y
    }
}

fn resolve(domain: Domain, index: usize, spec: ModeSpec) -> Result<Resolved, SynthError> {
    match (domain, spec) {
        (Domain::Disk { radius }, ModeSpec::Disk { m, k, amplitude, phase, .. }) => {
            if m > MAX_DISK_INDEX || k == 0 || k > MAX_DISK_INDEX {
                return Err(SynthError::BadMode(index, "disk mode needs m <= 20 and 1 <= k <= 20"));
            }
            if !amplitude.is_finite() || !phase.is_finite() {
                return Err(SynthError::BadMode(index, "amplitude and phase must be finite"));
            }
            Ok(Resolved { spec, omega: bessel_zero(m, k) / radius })
        }
        (Domain::Rectangle { a, b }, ModeSpec::Rectangle { n, m, amplitude, phase }) => {
            if n == 0 || m == 0 {
                return Err(SynthError::BadMode(index, "rectangle mode indices start at 1"));
            }
            if !amplitude.is_finite() || !phase.is_finite() {
                return Err(SynthError::BadMode(index, "amplitude and phase must be finite"));
            }
            let (kx, ky) = (n as f64 / a, m as f64 / b);
            Ok(Resolved { spec, omega: PI * libm::sqrt(kx * kx + ky * ky) })
        }
        _ => Err(SynthError::BadMode(index, "mode kind does not match the domain")),
    }
}

impl Resolved {
    fn phase(&self) -> f64 {
        match self.spec {
            ModeSpec::Disk { phase, .. } | ModeSpec::Rectangle { phase, .. } => phase,
        }
    }

    fn temporal(&self, t: f64) -> f64 {
        libm::cos(self.omega * t + self.phase())
    }

    fn temporal_derivative(&self, t: f64) -> f64 {
        -self.omega * libm::sin(self.omega * t + self.phase())
    }

    fn spatial(&self, domain: Domain, x: f64, y: f64) -> f64 {
        match (self.spec, domain) {
            (ModeSpec::Disk { m, azimuth, amplitude, .. }, _) => {
                let r = libm::hypot(x, y);
                let angular = angular_factor(azimuth, m, libm::atan2(y, x));
                amplitude * bessel_j(m, self.omega * r) * angular
            }
            (ModeSpec::Rectangle { n, m, amplitude, .. }, Domain::Rectangle { a, b }) => {
                amplitude * libm::sin(n as f64 * PI * x / a) * libm::sin(m as f64 * PI * y / b)
            }
            _ => unreachable!("modes are matched to the domain on construction"),
        }
    }

    fn spatial_gradient(&self, domain: Domain, x: f64, y: f64) -> (f64, f64) {
        match (self.spec, domain) {
            (ModeSpec::Disk { m, azimuth, amplitude, .. }, _) => {
                let r = libm::hypot(x, y);
                let k = self.omega;
                if r == 0.0 {
                    // only m = 1 has a nonzero gradient at the centre: J_1'(0) = 1/2
                    if m != 1 {
                        return (0.0, 0.0);
                    }
                    let g = 0.5 * amplitude * k;
                    return match azimuth {
                        Azimuth::Cos => (g, 0.0),
                        Azimuth::Sin => (0.0, g),
                    };
                }
                let phi = libm::atan2(y, x);
                let d_r = amplitude * k * bessel_j_derivative(m, k * r) * angular_factor(azimuth, m, phi);
                let d_phi = amplitude * bessel_j(m, k * r) * angular_derivative(azimuth, m, phi) / r;
                let (c, s) = (x / r, y / r);
                (d_r * c - d_phi * s, d_r * s + d_phi * c)
            }
            (ModeSpec::Rectangle { n, m, amplitude, .. }, Domain::Rectangle { a, b }) => {
                let (kx, ky) = (n as f64 * PI / a, m as f64 * PI / b);
                let (sx, cx) = (libm::sin(kx * x), libm::cos(kx * x));
                let (sy, cy) = (libm::sin(ky * y), libm::cos(ky * y));
                (amplitude * kx * cx * sy, amplitude * ky * sx * cy)
            }
            _ => unreachable!("modes are matched to the domain on construction"),
        }
    }
}

fn angular_factor(azimuth: Azimuth, m: u32, phi: f64) -> f64 {
    let arg = m as f64 * phi;
    match azimuth {
        Azimuth::Cos => libm::cos(arg),
        Azimuth::Sin => libm::sin(arg),
    }
}

fn angular_derivative(azimuth: Azimuth, m: u32, phi: f64) -> f64 {
    let arg = m as f64 * phi;
    match azimuth {
        Azimuth::Cos => -(m as f64) * libm::sin(arg),
        Azimuth::Sin => m as f64 * libm::cos(arg),
    }
}

/// Uniform time grid with `n` samples from `t_min` to `t_max` inclusive.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TimeGrid {
    pub t_min: f64,
    pub t_max: f64,
    pub n: usize,
}

impl TimeGrid {
    pub fn new(t_min: f64, t_max: f64, n: usize) -> Result<Self, SynthError> {
        if !(t_min.is_finite() && t_max.is_finite() && t_max > t_min && n >= 2) {
            return Err(SynthError::BadTimeGrid);
        }
        Ok(Self { t_min, t_max, n })
    }

    /// Grid symmetric about zero.
    pub fn symmetric(half_width: f64, n: usize) -> Result<Self, SynthError> {
        Self::new(-half_width, half_width, n)
    }

    pub fn step(&self) -> f64 {
        (self.t_max - self.t_min) / (self.n - 1) as f64
    }

    pub fn time(&self, k: usize) -> f64 {
        if k + 1 == self.n {
            self.t_max
        } else {
            self.t_min + self.step() * k as f64
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Provenance {
    Exact,
    Fd,
    Noisy { rel_level: f64, sigma: f64, seed: u64, rng: String },
}

/// Sampled `∂_ν u` on the boundary: `values[j * times.n + k]` belongs to
/// boundary sample `j` at time `times.time(k)`.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundaryTrace {
    pub domain: Domain,
    pub samples: Vec<BoundarySample>,
    pub times: TimeGrid,
    pub values: Vec<f64>,
    pub provenance: Provenance,
}

impl BoundaryTrace {
    pub fn n_boundary(&self) -> usize {
        self.samples.len()
    }

    pub fn row(&self, j: usize) -> &[f64] {
        let n = self.times.n;
        &self.values[j * n..(j + 1) * n]
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// `a·self + b·other` on identical geometry.
    pub fn combine(&self, a: f64, other: &BoundaryTrace, b: f64) -> Option<BoundaryTrace> {
        if self.samples != other.samples || self.times != other.times {
            return None;
        }
        let values = self.values.iter().zip(&other.values).map(|(x, y)| a * x + b * y).collect();
        Some(BoundaryTrace { values, ..self.clone() })
    }
}

/// Trace of the closed-form normal derivative on `n_b` boundary samples.
pub fn exact_trace(gt: &GroundTruth, n_b: usize, times: TimeGrid) -> Result<BoundaryTrace, SynthError> {
    let samples = gt.domain().boundary_samples(n_b)?;
    let mut values = Vec::with_capacity(n_b * times.n);
    for p in &samples {
        values.extend((0..times.n).map(|k| gt.normal_derivative(p, times.time(k))));
    }
    Ok(BoundaryTrace { domain: gt.domain(), samples, times, values, provenance: Provenance::Exact })
}

/// Adds i.i.d. Gaussian noise with standard deviation
/// `rel_level·max|values|`, drawn in row-major order from ChaCha20 seeded
/// with `seed`.
pub fn add_noise(trace: &BoundaryTrace, rel_level: f64, seed: u64) -> Result<BoundaryTrace, SynthError> {
    if !(rel_level.is_finite() && rel_level >= 0.0) {
        return Err(SynthError::BadNoise);
    }
    if rel_level == 0.0 {
        return Ok(trace.clone());
    }
    let sigma = rel_level * trace.max_abs();
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    let values = trace
        .values
        .iter()
        .map(|v| {
            let z: f64 = StandardNormal.sample(&mut rng);
            v + sigma * z
        })
        .collect();
    Ok(BoundaryTrace {
        values,
        provenance: Provenance::Noisy { rel_level, sigma, seed, rng: String::from(NOISE_RNG) },
        ..trace.clone()
    })
}
