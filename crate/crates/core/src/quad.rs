//! Quadrature rules shared by the kernel and reconstruction code.
//!
//! Gauss–Legendre rules come from a process-wide ladder of sizes `8·2^k`,
//! built lazily on first use. Rounding a requested node count up to the next
//! rung means "double the nodes" is always the next rung, which is how the
//! kernels estimate their own quadrature error.

use alloc::boxed::Box;
use alloc::vec::Vec;
use core::f64::consts::PI;

use once_cell::race::OnceBox;

const LADDER_BASE: usize = 8;
const LADDER_RUNGS: usize = 12;

static LADDER: [OnceBox<GaussLegendre>; LADDER_RUNGS] = [const { OnceBox::new() }; LADDER_RUNGS];

/// Largest Gauss–Legendre rule the ladder will hand out.
pub const MAX_RULE_NODES: usize = LADDER_BASE << (LADDER_RUNGS - 1);

/// A Gauss–Legendre rule on `[-1, 1]`.
#[derive(Debug, Clone)]
pub struct GaussLegendre {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl GaussLegendre {
    /// Computes the `n`-point rule by Newton iteration on the three-term
    /// recurrence.
    pub fn new(n: usize) -> Self {
        assert!(n >= 1, "Gauss-Legendre rule needs at least one node");
        let mut nodes = alloc::vec![0.0; n];
        let mut weights = alloc::vec![0.0; n];
        let nf = n as f64;
        for k in 0..n.div_ceil(2) {
            let mut x = libm::cos(PI * (k as f64 + 0.75) / (nf + 0.5));
            let mut dp = 0.0;
            for _ in 0..100 {
                let (p, d) = legendre_with_derivative(n, x);
                dp = d;
                let dx = p / d;
                x -= dx;
                if dx.abs() <= 1e-16 * x.abs().max(1.0) {
                    let (_, d) = legendre_with_derivative(n, x);
                    dp = d;
                    break;
                }
            }
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            nodes[k] = -x;
            weights[k] = w;
            nodes[n - 1 - k] = x;
            weights[n - 1 - k] = w;
        }
        if n % 2 == 1 {
            nodes[n / 2] = 0.0;
        }
        Self { nodes, weights }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Integrates `f` over `[a, b]`.
    #[inline]
    pub fn integrate<F: FnMut(f64) -> f64>(&self, a: f64, b: f64, mut f: F) -> f64 {
        let half = 0.5 * (b - a);
        let mid = 0.5 * (a + b);
        let mut acc = 0.0;
        for (x, w) in self.nodes.iter().zip(&self.weights) {
            acc += w * f(mid + half * x);
        }
        acc * half
    }
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// Smallest ladder size that is at least `n` (capped at [`MAX_RULE_NODES`]).
pub fn ladder_size(n: usize) -> usize {
    let mut size = LADDER_BASE;
    while size < n && size < MAX_RULE_NODES {
        size *= 2;
    }
    size
}

/// Shared Gauss–Legendre rule with at least `n` nodes.
pub fn gauss_legendre(n: usize) -> &'static GaussLegendre {
    let size = ladder_size(n);
    let rung = (size / LADDER_BASE).trailing_zeros() as usize;
    LADDER[rung].get_or_init(|| Box::new(GaussLegendre::new(size)))
}

/// `∫_{-π}^{π} f(s) ds` for an even, 2π-periodic `f`, by the trapezoid rule
/// on `[0, π]` with `n` panels. Equivalent to the periodic rule with `2n`
/// nodes, so the error decays geometrically for analytic integrands.
#[inline]
pub fn even_periodic<F: FnMut(f64) -> f64>(n: usize, mut f: F) -> f64 {
    let step = PI / n as f64;
    let mut acc = 0.5 * (f(0.0) + f(PI));
    for k in 1..n {
        acc += f(step * k as f64);
    }
    2.0 * step * acc
}

/// Composite trapezoid over sorted abscissae.
pub fn trapezoid(xs: &[f64], ys: &[f64]) -> f64 {
    debug_assert_eq!(xs.len(), ys.len());
    xs.windows(2)
        .zip(ys.windows(2))
        .map(|(x, y)| 0.5 * (x[1] - x[0]) * (y[0] + y[1]))
        .sum()
}
