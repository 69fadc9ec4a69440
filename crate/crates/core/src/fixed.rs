//! Binary fixed-point complex arithmetic on big integers.
//!
//! A value `x` is stored as the integer `round(x * 2^bits)`. Used where a sum
//! of O(1) terms cancels down to far below `f64` resolution.

use num_bigint::{BigInt, Sign};
use num_complex::Complex64;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::scaled::{pow2, ScaledComplex};

#[derive(Debug, Clone, PartialEq)]
pub(crate) struct FixedComplex {
    pub re: BigInt,
    pub im: BigInt,
}

/// Exact `x * 2^bits`, truncated toward -inf.
pub(crate) fn fixed_from_f64(x: f64, bits: u64) -> BigInt {
    if x == 0.0 {
        return BigInt::zero();
    }
    let raw = x.abs().to_bits();
    let biased = ((raw >> 52) & 0x7ff) as i64;
    let (mantissa, exp) = if biased == 0 {
        (raw & ((1 << 52) - 1), -1074)
    } else {
        ((raw & ((1 << 52) - 1)) | (1 << 52), biased - 1075)
    };
    let mut v = BigInt::from(mantissa);
    let shift = exp + bits as i64;
    if shift >= 0 {
        v <<= shift as usize;
    } else {
        v >>= (-shift) as usize;
    }
    if x < 0.0 {
        -v
    } else {
        v
    }
}

fn mul_fixed(a: &BigInt, b: &BigInt, bits: u64) -> BigInt {
    (a * b) >> bits as usize
}

/// `atan(1/x)` for integer `x >= 2`.
fn atan_inv(x: u64, bits: u64) -> BigInt {
    let one = BigInt::one() << bits as usize;
    let x2 = BigInt::from(x * x);
    let mut power = &one / BigInt::from(x);
    let mut sum = BigInt::zero();
    let mut k: u64 = 0;
    while !power.is_zero() {
        let term = &power / BigInt::from(2 * k + 1);
        if k.is_multiple_of(2) {
            sum += term;
        } else {
            sum -= term;
        }
        power /= &x2;
        k += 1;
    }
    sum
}

/// π via Machin's formula.
pub(crate) fn pi_fixed(bits: u64) -> BigInt {
    let guard = 16;
    let b = bits + guard;
    let pi = atan_inv(5, b) * 16 - atan_inv(239, b) * 4;
    pi >> guard as usize
}

impl FixedComplex {
    pub fn zero() -> Self {
        FixedComplex {
            re: BigInt::zero(),
            im: BigInt::zero(),
        }
    }

    pub fn one(bits: u64) -> Self {
        FixedComplex {
            re: BigInt::one() << bits as usize,
            im: BigInt::zero(),
        }
    }

    /// `e^{iθ}` at `bits` fractional bits.
    pub fn cis(theta: f64, bits: u64) -> Self {
        if theta == 0.0 {
            return Self::one(bits);
        }
        let guard = 64;
        let b = bits + guard;
        let mut t = fixed_from_f64(theta, b);
        let two_pi = pi_fixed(b + 8) >> 7usize;
        let turns = (theta / std::f64::consts::TAU).round();
        if turns != 0.0 {
            t -= &two_pi * BigInt::from(turns as i64);
        }
        let t2 = mul_fixed(&t, &t, b);

        // cos: Σ (-1)^k t^{2k}/(2k)!, sin: Σ (-1)^k t^{2k+1}/(2k+1)!
        let mut cos = BigInt::zero();
        let mut term = BigInt::one() << b as usize;
        let mut k: u64 = 0;
        while !term.is_zero() {
            cos += &term;
            term = -mul_fixed(&term, &t2, b) / BigInt::from((2 * k + 1) * (2 * k + 2));
            k += 1;
        }
        let mut sin = BigInt::zero();
        let mut term = t;
        let mut k: u64 = 0;
        while !term.is_zero() {
            sin += &term;
            term = -mul_fixed(&term, &t2, b) / BigInt::from((2 * k + 2) * (2 * k + 3));
            k += 1;
        }
        FixedComplex {
            re: cos >> guard as usize,
            im: sin >> guard as usize,
        }
    }

    pub fn mul(&self, other: &Self, bits: u64) -> Self {
        let re = &self.re * &other.re - &self.im * &other.im;
        let im = &self.re * &other.im + &self.im * &other.re;
        FixedComplex {
            re: re >> bits as usize,
            im: im >> bits as usize,
        }
    }

    pub fn conj(&self) -> Self {
        FixedComplex {
            re: self.re.clone(),
            im: -&self.im,
        }
    }

    /// Integer power of a unit-modulus value; negative exponents conjugate.
    pub fn unit_pow(&self, exp: i64, bits: u64) -> Self {
        let mut base = if exp < 0 { self.conj() } else { self.clone() };
        let mut e = exp.unsigned_abs();
        let mut acc = Self::one(bits);
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base, bits);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base, bits);
            }
        }
        acc
    }

    pub fn scale_int(&self, k: &BigInt) -> Self {
        FixedComplex {
            re: &self.re * k,
            im: &self.im * k,
        }
    }

    pub fn add_assign(&mut self, other: &Self) {
        self.re += &other.re;
        self.im += &other.im;
    }

    pub fn sub_assign(&mut self, other: &Self) {
        self.re -= &other.re;
        self.im -= &other.im;
    }

    /// Number of significant bits in the larger component.
    pub fn magnitude_bits(&self) -> u64 {
        self.re.bits().max(self.im.bits())
    }

    /// Converts `self * 2^-bits` into a scaled complex without underflow.
    pub fn to_scaled(&self, bits: u64) -> ScaledComplex {
        let top = self.magnitude_bits();
        if top == 0 {
            return ScaledComplex::ZERO;
        }
        // keep 60 leading bits of the larger component
        let drop = top.saturating_sub(60);
        let part = |v: &BigInt| -> f64 {
            let shifted: BigInt = if v.sign() == Sign::Minus {
                -((-v) >> drop as usize)
            } else {
                v >> drop as usize
            };
            shifted.to_f64().unwrap_or(0.0)
        };
        let mantissa = Complex64::new(part(&self.re), part(&self.im));
        ScaledComplex::new(mantissa, drop as i64 - bits as i64)
    }
}

/// Checks `2^-bits`-scaled magnitude against `f64` for tests and asserts.
#[allow(dead_code)]
pub(crate) fn fixed_to_f64(v: &BigInt, bits: u64) -> f64 {
    let top = v.bits();
    let drop = top.saturating_sub(60);
    let shifted: BigInt = if v.is_negative() {
        -((-v) >> drop as usize)
    } else {
        v >> drop as usize
    };
    let e = drop as i64 - bits as i64;
    shifted.to_f64().unwrap_or(0.0) * pow2(e / 2) * pow2(e - e / 2)
}
