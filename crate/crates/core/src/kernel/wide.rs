//! 256-bit binary fixed point, used only when the unified representation of
//! the base kernel cancels too badly for `f64`.
//!
//! The integrand there is `exp(E)·cos(θ)` with `E` up to a few tens and a
//! result that can be 28 orders of magnitude below the largest term. Every
//! value here is `m / 2^FRAC_BITS` with an unbounded integer `m`, so only the
//! fractional resolution is fixed.

use core::f64::consts::{LN_2, PI};
use core::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_traits::{ToPrimitive, Zero};
use once_cell::race::OnceBox;

use alloc::boxed::Box;

const FRAC_BITS: u32 = 256;
/// Arguments are divided by `2^HALVINGS` before a Taylor series.
const HALVINGS: u32 = 10;

#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) struct Wide(BigInt);

impl Wide {
    pub(crate) fn zero() -> Self {
        Wide(BigInt::zero())
    }

    fn one() -> Self {
        Wide(BigInt::from(1u8) << FRAC_BITS)
    }

    /// Exact conversion of a finite `f64`.
    pub(crate) fn from_f64(x: f64) -> Self {
        assert!(x.is_finite());
        if x == 0.0 {
            return Self::zero();
        }
        let bits = x.to_bits();
        let negative = bits >> 63 == 1;
        let exponent = ((bits >> 52) & 0x7ff) as i32;
        let fraction = bits & ((1u64 << 52) - 1);
        let (mantissa, exp2) = if exponent == 0 {
            (fraction, -1074)
        } else {
            (fraction | (1u64 << 52), exponent - 1075)
        };
        let shift = FRAC_BITS as i32 + exp2;
        let mut m = BigInt::from(mantissa);
        if shift >= 0 {
            m <<= shift as u32;
        } else {
            m >>= (-shift) as u32;
        }
        Wide(if negative { -m } else { m })
    }

    pub(crate) fn to_f64(&self) -> f64 {
        let m = self.0.to_f64().unwrap_or(f64::NAN);
        libm::ldexp(m, -(FRAC_BITS as i32))
    }

    fn from_int(k: i64) -> Self {
        Wide(BigInt::from(k) << FRAC_BITS)
    }

    fn div_int(&self, k: i64) -> Self {
        Wide(&self.0 / k)
    }

    pub(crate) fn div(&self, other: &Wide) -> Self {
        Wide((&self.0 << FRAC_BITS) / &other.0)
    }

    fn shl(&self, bits: u32) -> Self {
        Wide(&self.0 << bits)
    }

    fn shr(&self, bits: u32) -> Self {
        Wide(&self.0 >> bits)
    }

    fn is_negligible(&self) -> bool {
        self.0.bits() < 2
    }

    /// `e^x`.
    pub(crate) fn exp(&self) -> Self {
        let k = libm::round(self.to_f64() / LN_2) as i64;
        let r = self - &ln2().mul_int(k);
        let small = r.shr(HALVINGS);
        let mut term = Wide::one();
        let mut sum = Wide::one();
        let mut n = 1;
        loop {
            term = (&term * &small).div_int(n);
            if term.is_negligible() {
                break;
            }
            sum = &sum + &term;
            n += 1;
        }
        for _ in 0..HALVINGS {
            sum = &sum * &sum;
        }
        if k >= 0 {
            sum.shl(k as u32)
        } else {
            sum.shr((-k) as u32)
        }
    }

    /// `(cos x, sin x)`.
    pub(crate) fn cos_sin(&self) -> (Self, Self) {
        let turns = libm::round(self.to_f64() / (2.0 * PI)) as i64;
        let r = self - &two_pi().mul_int(turns);
        let small = r.shr(HALVINGS);
        // Taylor series of e^{i·small}.
        let mut re = Wide::one();
        let mut im = Wide::zero();
        let mut term = Wide::one();
        let mut n = 1i64;
        loop {
            term = (&term * &small).div_int(n);
            if term.is_negligible() {
                break;
            }
            match n % 4 {
                1 => im = &im + &term,
                2 => re = &re - &term,
                3 => im = &im - &term,
                _ => re = &re + &term,
            }
            n += 1;
        }
        for _ in 0..HALVINGS {
            let c = &(&re * &re) - &(&im * &im);
            let s = (&re * &im).shl(1);
            re = c;
            im = s;
        }
        (re, im)
    }

    fn mul_int(&self, k: i64) -> Self {
        Wide(&self.0 * k)
    }
}

impl Add for &Wide {
    type Output = Wide;
    fn add(self, rhs: &Wide) -> Wide {
        Wide(&self.0 + &rhs.0)
    }
}

impl Sub for &Wide {
    type Output = Wide;
    fn sub(self, rhs: &Wide) -> Wide {
        Wide(&self.0 - &rhs.0)
    }
}

impl Mul for &Wide {
    type Output = Wide;
    fn mul(self, rhs: &Wide) -> Wide {
        Wide((&self.0 * &rhs.0) >> FRAC_BITS)
    }
}

impl Neg for &Wide {
    type Output = Wide;
    fn neg(self) -> Wide {
        Wide(-&self.0)
    }
}

/// `atan(1/k)` for integer `k > 1`.
fn atan_inv(k: i64) -> Wide {
    let k2 = k * k;
    let mut power = Wide::one().div_int(k);
    let mut sum = power.clone();
    let mut n = 1i64;
    loop {
        power = power.div_int(k2);
        if power.is_negligible() {
            break;
        }
        let term = power.div_int(2 * n + 1);
        if n % 2 == 1 {
            sum = &sum - &term;
        } else {
            sum = &sum + &term;
        }
        n += 1;
    }
    sum
}

pub(crate) fn pi() -> &'static Wide {
    static PI_WIDE: OnceBox<Wide> = OnceBox::new();
    // Machin: π = 16·atan(1/5) − 4·atan(1/239)
    PI_WIDE.get_or_init(|| Box::new(&atan_inv(5).mul_int(16) - &atan_inv(239).mul_int(4)))
}

fn two_pi() -> &'static Wide {
    static TWO_PI: OnceBox<Wide> = OnceBox::new();
    TWO_PI.get_or_init(|| Box::new(pi().shl(1)))
}

fn ln2() -> &'static Wide {
    static LN2: OnceBox<Wide> = OnceBox::new();
    // ln 2 = Σ_{k≥1} 1 / (k·2^k)
    LN2.get_or_init(|| {
        let mut sum = Wide::zero();
        let mut k = 1;
        loop {
            let term = Wide::one().shr(k).div_int(k as i64);
            if term.is_negligible() {
                break;
            }
            sum = &sum + &term;
            k += 1;
        }
        Box::new(sum)
    })
}

/// `k·π / n` in full precision.
pub(crate) fn pi_fraction(k: i64, n: i64) -> Wide {
    pi().mul_int(k).div_int(n)
}

pub(crate) fn from_int(k: i64) -> Wide {
    Wide::from_int(k)
}
