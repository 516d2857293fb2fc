//! Leapfrog solver for the wave equation on a rectangle with homogeneous
//! Dirichlet data.
//!
//! The solution is advanced forward from the initial slice and, separately,
//! backward (the scheme is time-reversible), so the recorded window is
//! symmetric about `t = 0`. Boundary normal derivatives come from one-sided
//! three-point differences.

use alloc::vec;
use alloc::vec::Vec;

use crate::domain::{BoundarySample, Domain, DomainError};
use crate::synth::{BoundaryTrace, Provenance, TimeGrid};

/// Courant number bound `dt·√2 / min(dx, dy)`.
pub const MAX_COURANT: f64 = 0.9;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum FdError {
    #[error("the finite-difference solver only handles rectangles")]
    NotRectangle,
    #[error("grid does not tile the rectangle: {0}")]
    GridMismatch(&'static str),
    #[error("CFL violated: dt = {dt} exceeds {limit}")]
    Cfl { dt: f64, limit: f64 },
    #[error("initial data must vanish on the boundary")]
    BoundaryData,
    #[error("non-finite value after step {step}")]
    NonFinite { step: i64 },
    #[error(transparent)]
    Domain(#[from] DomainError),
}

/// Uniform grid: `nx × ny` cells of size `dx × dy`, step `dt`, and
/// `t_steps` steps in each time direction.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FdGrid {
    pub nx: usize,
    pub ny: usize,
    pub dx: f64,
    pub dy: f64,
    pub dt: f64,
    pub t_steps: usize,
}

impl FdGrid {
    /// Square cells fitted to the rectangle, `dt` from the Courant number,
    /// and enough steps to reach `|t| ≥ half_window`.
    pub fn for_rectangle(domain: Domain, cells_per_unit: usize, courant: f64, half_window: f64) -> Result<Self, FdError> {
        let Domain::Rectangle { a, b } = domain else {
            return Err(FdError::NotRectangle);
        };
        let nx = libm::round(a * cells_per_unit as f64) as usize;
        let ny = libm::round(b * cells_per_unit as f64) as usize;
        if nx < 2 || ny < 2 {
            return Err(FdError::GridMismatch("fewer than two cells per side"));
        }
        let dx = a / nx as f64;
        let dy = b / ny as f64;
        let dt_max = courant * dx.min(dy) / core::f64::consts::SQRT_2;
        let t_steps = libm::ceil(half_window / dt_max) as usize;
        let dt = half_window / t_steps as f64;
        let grid = Self { nx, ny, dx, dy, dt, t_steps };
        grid.check(domain)?;
        Ok(grid)
    }

    pub fn check(&self, domain: Domain) -> Result<(), FdError> {
        let Domain::Rectangle { a, b } = domain else {
            return Err(FdError::NotRectangle);
        };
        if self.nx < 2 || self.ny < 2 || self.t_steps == 0 {
            return Err(FdError::GridMismatch("need at least 2 cells per side and one step"));
        }
        if (self.nx as f64 * self.dx - a).abs() > 1e-12 * a || (self.ny as f64 * self.dy - b).abs() > 1e-12 * b {
            return Err(FdError::GridMismatch("nx·dx and ny·dy must equal the side lengths"));
        }
        if (self.dx - self.dy).abs() > 1e-12 * self.dx {
            return Err(FdError::GridMismatch("boundary traces need square cells (dx = dy)"));
        }
        let limit = MAX_COURANT * self.dx.min(self.dy) / core::f64::consts::SQRT_2;
        if !(self.dt > 0.0 && self.dt <= limit) {
            return Err(FdError::Cfl { dt: self.dt, limit });
        }
        Ok(())
    }

    fn width(&self) -> usize {
        self.nx + 1
    }
}

/// Nodal values, row-major with `x` fastest: `data[j·(nx+1) + i]` at
/// `(i·dx, j·dy)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Field {
    pub nx: usize,
    pub ny: usize,
    pub data: Vec<f64>,
}

impl Field {
    pub fn from_fn(grid: &FdGrid, f: impl Fn(f64, f64) -> f64) -> Self {
        let mut data = Vec::with_capacity((grid.nx + 1) * (grid.ny + 1));
        for j in 0..=grid.ny {
            for i in 0..=grid.nx {
                data.push(f(i as f64 * grid.dx, j as f64 * grid.dy));
            }
        }
        Self { nx: grid.nx, ny: grid.ny, data }
    }

    pub fn zeros(grid: &FdGrid) -> Self {
        Self { nx: grid.nx, ny: grid.ny, data: vec![0.0; (grid.nx + 1) * (grid.ny + 1)] }
    }

    #[inline]
    pub fn at(&self, i: usize, j: usize) -> f64 {
        self.data[j * (self.nx + 1) + i]
    }

    fn boundary_max(&self) -> f64 {
        let mut m: f64 = 0.0;
        for i in 0..=self.nx {
            m = m.max(self.at(i, 0).abs()).max(self.at(i, self.ny).abs());
        }
        for j in 0..=self.ny {
            m = m.max(self.at(0, j).abs()).max(self.at(self.nx, j).abs());
        }
        m
    }

    fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, v| m.max(v.abs()))
    }
}

/// Two consecutive time levels of the leapfrog scheme.
#[derive(Debug, Clone)]
pub struct Leapfrog {
    grid: FdGrid,
    pub previous: Field,
    pub current: Field,
}

impl Leapfrog {
    /// Starts from `u(0) = u0`, `∂_t u(0) = u1` with the Taylor step
    /// `u(±dt) = u0 ± dt·u1 + dt²/2·Δ_h u0`; `direction` is `+1` or `-1`.
    pub fn start(grid: FdGrid, u0: &Field, u1: &Field, direction: f64) -> Self {
        let mut next = u0.clone();
        let lap = laplacian(&grid, u0);
        let dt = grid.dt;
        for idx in interior(&grid) {
            next.data[idx] = u0.data[idx] + direction * dt * u1.data[idx] + 0.5 * dt * dt * lap[idx];
        }
        Self { grid, previous: u0.clone(), current: next }
    }

    /// `u^{n+1} = 2u^n - u^{n-1} + dt²·Δ_h u^n`.
    pub fn step(&mut self) {
        let lap = laplacian(&self.grid, &self.current);
        let dt2 = self.grid.dt * self.grid.dt;
        for idx in interior(&self.grid) {
            self.previous.data[idx] = 2.0 * self.current.data[idx] - self.previous.data[idx] + dt2 * lap[idx];
        }
        core::mem::swap(&mut self.previous, &mut self.current);
    }

    /// Swaps the two levels, so further steps run the other way in time.
    pub fn reverse(&mut self) {
        core::mem::swap(&mut self.previous, &mut self.current);
    }

    /// Energy between the two stored levels,
    /// `Σ ((u^{n+1} - u^n)/dt)² + ∇u^{n+1}·∇u^n` (times `dx·dy`), which the
    /// scheme conserves exactly.
    pub fn energy(&self) -> f64 {
        staggered_energy(&self.grid, &self.previous, &self.current)
    }
}

fn interior(grid: &FdGrid) -> impl Iterator<Item = usize> + '_ {
    let w = grid.width();
    (1..grid.ny).flat_map(move |j| (1..grid.nx).map(move |i| j * w + i))
}

fn laplacian(grid: &FdGrid, u: &Field) -> Vec<f64> {
    let w = grid.width();
    let (ix2, iy2) = (1.0 / (grid.dx * grid.dx), 1.0 / (grid.dy * grid.dy));
    let mut out = vec![0.0; u.data.len()];
    for j in 1..grid.ny {
        for i in 1..grid.nx {
            let c = j * w + i;
            let d = &u.data;
            out[c] = (d[c - 1] - 2.0 * d[c] + d[c + 1]) * ix2 + (d[c - w] - 2.0 * d[c] + d[c + w]) * iy2;
        }
    }
    out
}

fn staggered_energy(grid: &FdGrid, a: &Field, b: &Field) -> f64 {
    let w = grid.width();
    let mut kinetic = 0.0;
    for idx in interior(grid) {
        let v = (b.data[idx] - a.data[idx]) / grid.dt;
        kinetic += v * v;
    }
    let mut potential = 0.0;
    for j in 0..=grid.ny {
        for i in 0..grid.nx {
            let c = j * w + i;
            potential += (a.data[c + 1] - a.data[c]) * (b.data[c + 1] - b.data[c]) / (grid.dx * grid.dx);
        }
    }
    for j in 0..grid.ny {
        for i in 0..=grid.nx {
            let c = j * w + i;
            potential += (a.data[c + w] - a.data[c]) * (b.data[c + w] - b.data[c]) / (grid.dy * grid.dy);
        }
    }
    (kinetic + potential) * grid.dx * grid.dy
}

/// Outward normal derivative at a boundary node from one-sided three-point
/// differences. Corners return zero (they carry zero weight).
fn normal_derivative(grid: &FdGrid, u: &Field, p: &BoundarySample) -> f64 {
    let i = libm::round(p.x / grid.dx) as usize;
    let j = libm::round(p.y / grid.dy) as usize;
    let (nx, ny) = (grid.nx, grid.ny);
    let on_x = i == 0 || i == nx;
    let on_y = j == 0 || j == ny;
    if on_x && on_y {
        return 0.0;
    }
    // (3u_0 - 4u_1 + u_2) / (2h) along the inward direction, with u_0 = 0
    if i == 0 {
        (3.0 * u.at(0, j) - 4.0 * u.at(1, j) + u.at(2, j)) / (2.0 * grid.dx)
    } else if i == nx {
        (3.0 * u.at(nx, j) - 4.0 * u.at(nx - 1, j) + u.at(nx - 2, j)) / (2.0 * grid.dx)
    } else if j == 0 {
        (3.0 * u.at(i, 0) - 4.0 * u.at(i, 1) + u.at(i, 2)) / (2.0 * grid.dy)
    } else {
        (3.0 * u.at(i, ny) - 4.0 * u.at(i, ny - 1) + u.at(i, ny - 2)) / (2.0 * grid.dy)
    }
}

/// A stored time level.
#[derive(Debug, Clone, PartialEq)]
pub struct Snapshot {
    pub t: f64,
    pub field: Field,
}

#[derive(Debug, Clone)]
pub struct FdSolution {
    /// Every `snapshot_stride`-th level, ordered by time.
    pub snapshots: Vec<Snapshot>,
    pub trace: BoundaryTrace,
    /// Staggered energy after each forward step.
    pub energy: Vec<f64>,
}

/// Solves on `[-t_steps·dt, t_steps·dt]` and records `∂_ν u` at every
/// boundary node. `snapshot_stride = 0` stores no snapshots.
pub fn solve_rectangle(domain: Domain, u0: &Field, u1: &Field, grid: FdGrid, snapshot_stride: usize) -> Result<FdSolution, FdError> {
    grid.check(domain)?;
    let scale = u0.max_abs().max(1e-300);
    if u0.boundary_max() > 1e-12 * scale || u1.boundary_max() > 1e-12 * u1.max_abs().max(1e-300) {
        return Err(FdError::BoundaryData);
    }
    let n_b = 2 * (grid.nx + grid.ny);
    let samples = domain.boundary_samples(n_b)?;
    let steps = grid.t_steps;
    let n_t = 2 * steps + 1;
    let mut values = vec![0.0; n_b * n_t];
    let record = |values: &mut Vec<f64>, u: &Field, k: usize| {
        for (j, p) in samples.iter().enumerate() {
            values[j * n_t + k] = normal_derivative(&grid, u, p);
        }
    };
    let mut snapshots = Vec::new();
    let keep = |n: usize| snapshot_stride > 0 && n % snapshot_stride == 0;
    record(&mut values, u0, steps);
    if keep(0) {
        snapshots.push(Snapshot { t: 0.0, field: u0.clone() });
    }
    let mut energy = Vec::with_capacity(steps);
    let mut backward_snapshots = Vec::new();
    for direction in [1.0, -1.0] {
        let mut lf = Leapfrog::start(grid, u0, u1, direction);
        for n in 1..=steps {
            if n > 1 {
                lf.step();
            }
            if !lf.current.data.iter().all(|v| v.is_finite()) {
                return Err(FdError::NonFinite { step: n as i64 * direction as i64 });
            }
            let k = if direction > 0.0 { steps + n } else { steps - n };
            record(&mut values, &lf.current, k);
            if direction > 0.0 {
                energy.push(lf.energy());
            }
            if keep(n) {
                let snap = Snapshot { t: direction * n as f64 * grid.dt, field: lf.current.clone() };
                if direction > 0.0 {
                    snapshots.push(snap);
                } else {
                    backward_snapshots.push(snap);
                }
            }
        }
    }
    backward_snapshots.reverse();
    backward_snapshots.append(&mut snapshots);
    let half = steps as f64 * grid.dt;
    let times = TimeGrid { t_min: -half, t_max: half, n: n_t };
    Ok(FdSolution {
        snapshots: backward_snapshots,
        trace: BoundaryTrace { domain, samples, times, values, provenance: Provenance::Fd },
        energy,
    })
}
