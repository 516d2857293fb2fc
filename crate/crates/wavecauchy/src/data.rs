//! Trace generation: closed-form modes in parallel, and the FD solver.

use rayon::prelude::*;
use wavecauchy_core::domain::Domain;
use wavecauchy_core::fd::{solve_rectangle, FdError, FdGrid, FdSolution, Field};
use wavecauchy_core::synth::{BoundaryTrace, GroundTruth, Provenance, SynthError, TimeGrid};

/// Same values as the sequential `exact_trace`, one boundary sample per task.
pub fn par_exact_trace(gt: &GroundTruth, n_b: usize, times: TimeGrid) -> Result<BoundaryTrace, SynthError> {
    let samples = gt.domain().boundary_samples(n_b)?;
    let values = samples
        .par_iter()
        .flat_map_iter(|p| (0..times.n).map(move |k| gt.normal_derivative(p, times.time(k))))
        .collect();
    Ok(BoundaryTrace { domain: gt.domain(), samples, times, values, provenance: Provenance::Exact })
}

/// FD solution started from the mode sum's state at `t = 0`.
pub fn fd_trace(gt: &GroundTruth, cells_per_unit: usize, courant: f64, half_window: f64) -> Result<FdSolution, FdError> {
    let domain: Domain = gt.domain();
    let grid = FdGrid::for_rectangle(domain, cells_per_unit, courant, half_window)?;
    let u0 = Field::from_fn(&grid, |x, y| gt.u(x, y, 0.0));
    let u1 = Field::from_fn(&grid, |x, y| gt.u_t(x, y, 0.0));
    solve_rectangle(domain, &u0, &u1, grid, 0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use wavecauchy_core::synth::{exact_trace, Azimuth, ModeSpec};

    #[test]
    fn parallel_trace_matches_sequential() {
        let disk = Domain::disk(1.0).unwrap();
        let gt = GroundTruth::new(disk, &[ModeSpec::Disk { m: 3, k: 2, azimuth: Azimuth::Cos, amplitude: 2.0, phase: 0.5 }]).unwrap();
        let times = TimeGrid::symmetric(1.0, 17).unwrap();
        assert_eq!(par_exact_trace(&gt, 32, times).unwrap(), exact_trace(&gt, 32, times).unwrap());
    }
}
