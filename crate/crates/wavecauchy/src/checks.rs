//! Kernel invariant suite behind `validate-kernel`.
//!
//! Every check reports a measured value against a tolerance; it passes
//! when `value <= tolerance`. Sample points are fixed lattices so reports
//! are reproducible.

use std::f64::consts::PI;

use wavecauchy_core::kernel::{self, base, KernelParams, SpaceTimePoint};
use wavecauchy_core::quad::GaussLegendre;

#[derive(Debug, Clone, PartialEq)]
pub struct CheckReport {
    pub name: &'static str,
    pub value: f64,
    pub tolerance: f64,
}

impl CheckReport {
    pub fn passed(&self) -> bool {
        self.value <= self.tolerance
    }

    pub fn margin(&self) -> f64 {
        self.tolerance - self.value
    }
}

pub struct Check {
    pub name: &'static str,
    pub tolerance: f64,
    run: fn(&KernelParams) -> f64,
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs()).max(1e-300)
}

fn lattice(n: usize, lo: f64, hi: f64) -> impl Iterator<Item = f64> + Clone {
    (0..n).map(move |i| lo + (hi - lo) * (i as f64 + 0.5) / n as f64)
}

/// Points `(r, t)` with `r > |t|` and `r ≤ 1`.
fn inside_cone() -> Vec<(f64, f64)> {
    lattice(6, 0.1, 1.0).flat_map(|r| lattice(5, -0.95, 0.95).map(move |f| (r, f * r))).collect()
}

fn support(kp: &KernelParams) -> f64 {
    lattice(10, 0.0, 1.5)
        .flat_map(|r| lattice(10, 0.0, 1.0).map(move |f| (r, r + 1e-9 + f)))
        .flat_map(|(r, t)| [kernel::averaged_value(r, t, kp).abs(), kernel::averaged_value(r, -t, kp).abs()])
        .fold(0.0, f64::max)
}

fn time_evenness(kp: &KernelParams) -> f64 {
    inside_cone()
        .into_iter()
        .map(|(r, t)| rel(kernel::averaged_value(r, t, kp), kernel::averaged_value(r, -t, kp)))
        .fold(0.0, f64::max)
}

fn radial_symmetry(kp: &KernelParams) -> f64 {
    inside_cone()
        .into_iter()
        .step_by(3)
        .enumerate()
        .map(|(i, (r, t))| {
            let angle = 0.7 + 1.3 * i as f64;
            let reference = kernel::averaged_direct(&SpaceTimePoint::new(0.0, r, t), kp).unwrap();
            let turned = kernel::averaged_direct(&SpaceTimePoint::new(r * angle.cos(), r * angle.sin(), t), kp).unwrap();
            rel(reference, turned)
        })
        .fold(0.0, f64::max)
}

fn representations(kp: &KernelParams) -> f64 {
    let axis = lattice(8, -1.5, 1.5);
    let mut worst: f64 = 0.0;
    for x in axis.clone() {
        for y in axis.clone() {
            for t in axis.clone() {
                let p = SpaceTimePoint::new(x, y, t);
                let split = if y.abs() >= t.abs() { base::inside(&p, kp) } else { base::outside(&p, kp) };
                if let (Ok(a), Ok(b)) = (base::unified(&p, kp), split) {
                    worst = worst.max(rel(a, b));
                } else {
                    return f64::INFINITY;
                }
            }
        }
    }
    worst
}

fn stable_vs_direct(kp: &KernelParams) -> f64 {
    inside_cone()
        .into_iter()
        .step_by(2)
        .map(|(r, t)| {
            let direct = kernel::averaged_direct(&SpaceTimePoint::new(0.0, r, t), kp).unwrap();
            rel(kernel::averaged_value(r, t, kp), direct)
        })
        .fold(0.0, f64::max)
}

/// `max √h·|V| · 2√π`; the bound is one.
fn growth_bound(kp: &KernelParams) -> f64 {
    let top = lattice(24, 0.0, 2.0)
        .flat_map(|r| lattice(24, -1.5, 1.5).map(move |t| (r, t)))
        .map(|(r, t)| kernel::averaged_value(r, t, kp).abs())
        .fold(0.0, f64::max);
    top * kp.h.sqrt() * 2.0 * PI.sqrt()
}

fn radial_moment(kp: &KernelParams, power: i32) -> f64 {
    let rule = GaussLegendre::new(128);
    let top = 12.0 * kp.h.sqrt();
    rule.integrate(0.0, top, |r| 2.0 * PI * r * r.powi(power) * kernel::source_density(r, 0.0, kp).unwrap())
}

fn source_mass(kp: &KernelParams) -> f64 {
    (radial_moment(kp, 0) - 1.0).abs()
}

fn source_moment(kp: &KernelParams) -> f64 {
    (radial_moment(kp, 2) - 0.5 * kp.h).abs()
}

fn mollifier_semigroup(_: &KernelParams) -> f64 {
    let eps: f64 = 0.02;
    let half = 0.5 * eps;
    let rule = GaussLegendre::new(128);
    (0..10)
        .map(|j| {
            let t = -0.3 + 0.07 * j as f64;
            let width = 12.0 * half.sqrt();
            let conv = rule.integrate(t - width, t + width, |s| kernel::mollifier(t - s, half) * kernel::mollifier(s, half));
            (conv - kernel::mollifier(t, eps)).abs()
        })
        .fold(0.0, f64::max)
}

pub fn registry() -> Vec<Check> {
    vec![
        Check { name: "support_outside_cone", tolerance: 0.0, run: support },
        Check { name: "time_evenness", tolerance: 1e-8, run: time_evenness },
        Check { name: "radial_symmetry", tolerance: 1e-8, run: radial_symmetry },
        Check { name: "unified_vs_split_forms", tolerance: 1e-8, run: representations },
        Check { name: "stable_vs_direct", tolerance: 1e-6, run: stable_vs_direct },
        Check { name: "growth_bound", tolerance: 1.0, run: growth_bound },
        Check { name: "source_mass", tolerance: 1e-8, run: source_mass },
        Check { name: "source_second_moment", tolerance: 1e-6, run: source_moment },
        Check { name: "mollifier_semigroup", tolerance: 1e-10, run: mollifier_semigroup },
    ]
}

pub fn run_all(kp: &KernelParams) -> Vec<CheckReport> {
    use rayon::prelude::*;
    registry()
        .par_iter()
        .map(|c| CheckReport { name: c.name, value: (c.run)(kp), tolerance: c.tolerance })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_suite_passes() {
        let reports = run_all(&KernelParams::new(0.1).unwrap());
        assert_eq!(reports.len(), registry().len());
        for r in &reports {
            assert!(r.passed(), "{r:?}");
        }
    }
}
