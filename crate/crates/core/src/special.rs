//! Bessel functions needed by the disk eigenmodes and the stable kernel.

use core::f64::consts::PI;

/// Below this argument `J_m` is summed from its ascending series.
const SERIES_LIMIT: f64 = 8.0;

/// Bessel function of the first kind `J_m(x)` for `x ≥ 0`.
///
/// Ascending power series for small `x`; otherwise Miller's backward
/// recurrence normalized with `1 = J_0 + 2 Σ J_{2k}`. Absolute accuracy is
/// around `1e-15` for the orders and arguments used by the eigenmodes.
pub fn bessel_j(m: u32, x: f64) -> f64 {
    debug_assert!(x >= 0.0, "bessel_j expects x >= 0");
    if x == 0.0 {
        return if m == 0 { 1.0 } else { 0.0 };
    }
    if x <= SERIES_LIMIT {
        series_j(m, x)
    } else {
        miller_j(m, x)
    }
}

fn series_j(m: u32, x: f64) -> f64 {
    let half = 0.5 * x;
    let q = -half * half;
    // (x/2)^m / m!
    let mut term = 1.0;
    for k in 1..=m {
        term *= half / k as f64;
    }
    let mut sum = term;
    let mut k = 1.0;
    loop {
        term *= q / (k * (k + m as f64));
        sum += term;
        if term.abs() <= 1e-17 * sum.abs().max(1e-300) {
            break;
        }
        k += 1.0;
        if k > 500.0 {
            break;
        }
    }
    sum
}

fn miller_j(m: u32, x: f64) -> f64 {
    let top = (m as f64).max(x);
    let mut start = (top + 20.0 + 10.0 * libm::sqrt(top)) as u32;
    start += start % 2;
    let mut next = 0.0; // J_{k+1}
    let mut current = 1e-300; // J_k
    let mut norm = 0.0;
    let mut wanted = 0.0;
    let mut k = start;
    while k > 0 {
        let prev = 2.0 * k as f64 / x * current - next;
        next = current;
        current = prev;
        k -= 1;
        if k == m {
            wanted = current;
        }
        if k % 2 == 0 && k > 0 {
            norm += 2.0 * current;
        }
        if current.abs() > 1e250 {
            current *= 1e-250;
            next *= 1e-250;
            norm *= 1e-250;
            wanted *= 1e-250;
        }
    }
    norm += current;
    wanted / norm
}

/// `J_m'(x)` from `(J_{m-1} - J_{m+1}) / 2`, with `J_0' = -J_1`.
pub fn bessel_j_derivative(m: u32, x: f64) -> f64 {
    if m == 0 {
        -bessel_j(1, x)
    } else {
        0.5 * (bessel_j(m - 1, x) - bessel_j(m + 1, x))
    }
}

/// `k`-th positive zero of `J_m` (`k ≥ 1`).
///
/// Zeros are bracketed by scanning sign changes upward from `max(m, 0.5)`
/// (every zero of `J_m` exceeds `m`), then polished by bisection followed by
/// Newton steps. The McMahon expansion is used only to size the scan.
pub fn bessel_zero(m: u32, k: u32) -> f64 {
    assert!(k >= 1, "zero index starts at 1");
    let step = 0.25;
    let mut a = (m as f64).max(0.5);
    let mut fa = bessel_j(m, a);
    let mut found = 0;
    let limit = 4.0 * mcmahon(m, k) + 50.0;
    while a < limit {
        let b = a + step;
        let fb = bessel_j(m, b);
        if fa == 0.0 || fa.signum() != fb.signum() {
            found += 1;
            if found == k {
                return refine_zero(m, a, b);
            }
        }
        a = b;
        fa = fb;
    }
    panic!("zero {k} of J_{m} not bracketed");
}

fn refine_zero(m: u32, mut a: f64, mut b: f64) -> f64 {
    let mut fa = bessel_j(m, a);
    for _ in 0..60 {
        let mid = 0.5 * (a + b);
        let fm = bessel_j(m, mid);
        if fm == 0.0 {
            return mid;
        }
        if fa.signum() == fm.signum() {
            a = mid;
            fa = fm;
        } else {
            b = mid;
        }
        if b - a < 1e-9 {
            break;
        }
    }
    let mut x = 0.5 * (a + b);
    for _ in 0..8 {
        let dx = bessel_j(m, x) / bessel_j_derivative(m, x);
        x -= dx;
        if dx.abs() < 1e-15 * x {
            break;
        }
    }
    x
}

/// McMahon's large-zero expansion, an estimate of the `k`-th zero of `J_m`.
pub fn mcmahon(m: u32, k: u32) -> f64 {
    let mu = 4.0 * (m as f64) * (m as f64);
    let beta = (k as f64 + 0.5 * m as f64 - 0.25) * PI;
    let e = 8.0 * beta;
    beta - (mu - 1.0) / e - 4.0 * (mu - 1.0) * (7.0 * mu - 31.0) / (3.0 * e * e * e)
}

/// Exponentially scaled modified Bessel function `e^{-x} I_0(x)` for `x ≥ 0`.
///
/// Series with positive terms up to 20, asymptotic expansion beyond. Both are
/// free of cancellation, so relative accuracy stays near machine precision.
pub fn bessel_i0_scaled(x: f64) -> f64 {
    debug_assert!(x >= 0.0);
    if x <= 20.0 {
        let q = 0.25 * x * x;
        let mut term = 1.0;
        let mut sum = 1.0;
        let mut k = 1.0;
        while term > 1e-17 * sum {
            term *= q / (k * k);
            sum += term;
            k += 1.0;
        }
        sum * libm::exp(-x)
    } else {
        let mut term = 1.0;
        let mut sum = 1.0;
        let mut k = 1.0;
        loop {
            let ratio = (2.0 * k - 1.0) * (2.0 * k - 1.0) / (8.0 * k * x);
            if ratio >= 1.0 {
                break;
            }
            term *= ratio;
            sum += term;
            if term < 1e-17 * sum {
                break;
            }
            k += 1.0;
        }
        sum / libm::sqrt(2.0 * PI * x)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    // Reference values from 30-digit evaluations.
    const J_TABLE: [(u32, f64, f64); 8] = [
        (0, 1.0, 0.7651976865579666),
        (1, 2.5, 0.49709410246427405),
        (5, 3.0, 0.043028434877047585),
        (0, 15.0, -0.014224472826780772),
        (3, 27.5, -0.1503881340969615),
        (20, 30.0, 0.0048310199934040645),
        (20, 5.0, 2.7703300521289416e-11),
        (7, 60.0, -0.00712663514743271),
    ];

    #[test]
    fn j_matches_reference_values() {
        for (m, x, want) in J_TABLE {
            let got = bessel_j(m, x);
            assert!((got - want).abs() < 1e-13, "J_{m}({x}) = {got}, want {want}");
        }
    }

    #[test]
    fn j_at_origin() {
        assert_eq!(bessel_j(0, 0.0), 1.0);
        for m in 1..=20 {
            assert_eq!(bessel_j(m, 0.0), 0.0);
        }
    }

    #[test]
    fn series_and_recurrence_agree_at_the_switch() {
        for m in 0..=20 {
            let a = series_j(m, SERIES_LIMIT);
            let b = miller_j(m, SERIES_LIMIT);
            assert!((a - b).abs() < 1e-13, "m={m}: {a} vs {b}");
        }
    }

    #[test]
    fn three_term_recurrence_holds() {
        for m in 1..20 {
            let mut x = 0.5;
            while x <= 30.0 {
                let lhs = bessel_j(m - 1, x) + bessel_j(m + 1, x);
                let rhs = 2.0 * m as f64 / x * bessel_j(m, x);
                assert!((lhs - rhs).abs() < 1e-10, "m={m} x={x}");
                x += 0.37;
            }
        }
    }

    #[test]
    fn zeros_match_reference_values() {
        let table = [
            (0, 1, 2.404825557695773),
            (0, 2, 5.520078110286311),
            (1, 1, 3.8317059702075125),
            (5, 3, 15.70017407971167),
            (20, 1, 25.417140814072525),
            (20, 20, 91.26354816250439),
            (0, 20, 62.048469190227166),
        ];
        for (m, k, want) in table {
            let got = bessel_zero(m, k);
            assert!((got - want).abs() < 1e-12, "j_{m},{k} = {got}, want {want}");
        }
    }

    #[test]
    fn first_zero_of_j0_is_a_root() {
        let z = bessel_zero(0, 1);
        assert!(bessel_j(0, z).abs() <= 1e-12);
    }

    #[test]
    fn zeros_increase_and_interlace() {
        for m in 0..=20 {
            let mut prev = 0.0;
            for k in 1..=20 {
                let z = bessel_zero(m, k);
                assert!(z > prev);
                assert!(bessel_j(m, z).abs() < 1e-12);
                prev = z;
            }
            if m > 0 {
                assert!(bessel_zero(m, 1) > bessel_zero(m - 1, 1));
            }
        }
    }

    #[test]
    fn scaled_i0_matches_reference_values() {
        let table = [
            (0.0, 1.0),
            (0.5, 0.6450352704491501),
            (5.0, 0.18354081260932836),
            (19.9, 0.0900085888643896),
            (20.1, 0.08955376362061344),
            (100.0, 0.03994437929909668),
            (1e4, 0.003989472674604732),
        ];
        for (x, want) in table {
            let got = bessel_i0_scaled(x);
            assert!(((got - want) / want).abs() < 1e-14, "i0e({x}) = {got}, want {want}");
        }
    }
}
