//! Full- versus partial-boundary comparison across noise levels.
//!
//! Both functionals are linear, so the noise-induced error of a noisy
//! trace is the reconstruction of `noisy - clean`. The table reports the
//! error against the truth for one realization and the RMS noise-induced
//! error over several seeds.

use rayon::prelude::*;
use wavecauchy_core::kernel::KernelParams;
use wavecauchy_core::reconstruct::{reconstruct_partial, reconstruct_point, PartialBoundaryConfig, ReconstructError, TargetPoint};
use wavecauchy_core::synth::{add_noise, BoundaryTrace};

pub const COLUMNS: &str = "noise,h,x_star,y_star,t_star,truth,full_value,full_abs_error,partial_value,partial_abs_error,full_noise_rms,partial_noise_rms,noise_ratio";

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BenchRow {
    pub noise: f64,
    pub h: f64,
    pub target: TargetPoint,
    pub truth: f64,
    pub full_value: f64,
    pub partial_value: f64,
    pub full_noise_rms: f64,
    pub partial_noise_rms: f64,
}

impl BenchRow {
    pub fn full_abs_error(&self) -> f64 {
        (self.full_value - self.truth).abs()
    }

    pub fn partial_abs_error(&self) -> f64 {
        (self.partial_value - self.truth).abs()
    }

    /// Partial over full RMS noise-induced error; NaN without noise.
    pub fn noise_ratio(&self) -> f64 {
        if self.full_noise_rms > 0.0 {
            self.partial_noise_rms / self.full_noise_rms
        } else {
            f64::NAN
        }
    }
}

#[derive(Debug, Clone)]
pub struct BenchSetup {
    pub kp: KernelParams,
    pub levels: Vec<f64>,
    /// Seeds `base_seed .. base_seed + seeds`.
    pub seeds: u64,
    pub base_seed: u64,
    /// Cone rotation; `None` faces the nearest boundary.
    pub alpha: Option<f64>,
}

fn pair(trace: &BoundaryTrace, tp: &TargetPoint, cfg: &PartialBoundaryConfig, kp: &KernelParams) -> Result<(f64, f64), ReconstructError> {
    Ok((reconstruct_point(trace, tp, kp)?.value, reconstruct_partial(trace, tp, cfg, kp)?.value))
}

pub fn stability_bench(
    clean: &BoundaryTrace,
    targets: &[TargetPoint],
    truth: impl Fn(&TargetPoint) -> f64 + Sync,
    setup: &BenchSetup,
) -> Result<Vec<BenchRow>, ReconstructError> {
    let kp = &setup.kp;
    let seeds = setup.seeds.max(1);
    let mut rows = Vec::new();
    for tp in targets {
        let cfg = match setup.alpha {
            Some(alpha) => PartialBoundaryConfig::along(clean, tp, alpha, kp.h)?,
            None => PartialBoundaryConfig::facing(clean, tp, kp.h)?,
        };
        let base = pair(clean, tp, &cfg, kp)?;
        let jobs: Vec<(usize, u64)> = (0..setup.levels.len())
            .filter(|&i| setup.levels[i] > 0.0)
            .flat_map(|i| (0..seeds).map(move |s| (i, setup.base_seed + s)))
            .collect();
        let deltas = jobs
            .par_iter()
            .map(|&(i, seed)| {
                let noisy = add_noise(clean, setup.levels[i], seed).expect("levels validated by caller");
                let diff = noisy.combine(1.0, clean, -1.0).expect("same geometry");
                pair(&diff, tp, &cfg, kp)
            })
            .collect::<Result<Vec<_>, _>>()?;
        let truth = truth(tp);
        for (i, &noise) in setup.levels.iter().enumerate() {
            let mine: Vec<(f64, f64)> = jobs.iter().zip(&deltas).filter(|(j, _)| j.0 == i).map(|(_, d)| *d).collect();
            let rms = |pick: fn(&(f64, f64)) -> f64| {
                if mine.is_empty() {
                    0.0
                } else {
                    (mine.iter().map(|d| pick(d).powi(2)).sum::<f64>() / mine.len() as f64).sqrt()
                }
            };
            let first = mine.first().copied().unwrap_or((0.0, 0.0));
            rows.push(BenchRow {
                noise,
                h: kp.h,
                target: *tp,
                truth,
                full_value: base.0 + first.0,
                partial_value: base.1 + first.1,
                full_noise_rms: rms(|d| d.0),
                partial_noise_rms: rms(|d| d.1),
            });
        }
    }
    Ok(rows)
}

pub fn write_bench<W: std::io::Write>(rows: &[BenchRow], out: W) -> std::io::Result<()> {
    use crate::results::num;
    use std::io::Write;
    let mut out = std::io::BufWriter::new(out);
    writeln!(out, "{COLUMNS}")?;
    for r in rows {
        let ratio = r.noise_ratio();
        writeln!(
            out,
            "{},{},{},{},{},{},{},{},{},{},{},{},{}",
            r.noise,
            num(r.h),
            num(r.target.x),
            num(r.target.y),
            num(r.target.t),
            num(r.truth),
            num(r.full_value),
            num(r.full_abs_error()),
            num(r.partial_value),
            num(r.partial_abs_error()),
            num(r.full_noise_rms),
            num(r.partial_noise_rms),
            if ratio.is_nan() { String::new() } else { num(ratio) }
        )?;
    }
    out.flush()
}
