//! Complex numbers carrying a separate binary exponent.
//!
//! Amplitudes of long chains drop far below the smallest normal `f64`; keeping
//! the exponent apart lets `log2 |z|` stay exact where `|z|` itself would
//! underflow.

use num_complex::Complex64;

/// `2^k` as an `f64`, exact for `-1022 <= k <= 1023`.
pub(crate) fn pow2(k: i64) -> f64 {
    if (-1022..=1023).contains(&k) {
        f64::from_bits(((k + 1023) as u64) << 52)
    } else {
        2f64.powi(k.clamp(i32::MIN as i64, i32::MAX as i64) as i32)
    }
}

/// Binary exponent `e` with `2^e <= x < 2^(e+1)`, for finite `x > 0`.
pub(crate) fn exponent_of(x: f64) -> i64 {
    debug_assert!(x > 0.0 && x.is_finite());
    let biased = ((x.to_bits() >> 52) & 0x7ff) as i64;
    if biased == 0 {
        x.log2().floor() as i64
    } else {
        biased - 1023
    }
}

/// `mantissa * 2^exp2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScaledComplex {
    pub mantissa: Complex64,
    pub exp2: i64,
}

impl ScaledComplex {
    pub const ZERO: ScaledComplex = ScaledComplex {
        mantissa: Complex64 { re: 0.0, im: 0.0 },
        exp2: 0,
    };

    pub fn new(mantissa: Complex64, exp2: i64) -> Self {
        ScaledComplex { mantissa, exp2 }.normalized()
    }

    pub fn from_complex(z: Complex64) -> Self {
        Self::new(z, 0)
    }

    /// Moves the magnitude of the mantissa into the exponent (exactly).
    pub fn normalized(self) -> Self {
        let m = self.mantissa.re.abs().max(self.mantissa.im.abs());
        if m == 0.0 || !m.is_finite() {
            return if m == 0.0 { Self::ZERO } else { self };
        }
        let e = exponent_of(m);
        ScaledComplex {
            mantissa: self.mantissa * pow2(-e),
            exp2: self.exp2 + e,
        }
    }

    pub fn is_zero(&self) -> bool {
        self.mantissa.re == 0.0 && self.mantissa.im == 0.0
    }

    /// `log2 |z|`; `-inf` for zero.
    pub fn log2_norm(&self) -> f64 {
        if self.is_zero() {
            f64::NEG_INFINITY
        } else {
            self.mantissa.norm().log2() + self.exp2 as f64
        }
    }

    pub fn norm_sqr(&self) -> f64 {
        if self.is_zero() {
            0.0
        } else {
            2f64.powf(2.0 * self.log2_norm())
        }
    }

    /// Plain complex value; underflows to zero for tiny magnitudes.
    pub fn to_complex(&self) -> Complex64 {
        let mut z = self.mantissa;
        let mut e = self.exp2;
        while e > 1000 {
            z *= pow2(1000);
            e -= 1000;
        }
        while e < -1000 {
            z *= pow2(-1000);
            e += 1000;
        }
        z * pow2(e)
    }
}
