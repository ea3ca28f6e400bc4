//! Exact binary rationals (`mant * 2^exp`) with directed rounding.
//!
//! Every interval endpoint in this crate is a [`Dyadic`]. Addition,
//! subtraction and multiplication are exact; only rounding to a bit budget,
//! division, and square roots are directed, and the direction is always
//! explicit. No native floating point is involved anywhere.

use std::cmp::Ordering;
use std::fmt;

use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

/// Rounding direction: `Down` is toward negative infinity, `Up` toward
/// positive infinity.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Round {
    Down,
    Up,
}

impl Round {
    pub fn flip(self) -> Round {
        match self {
            Round::Down => Round::Up,
            Round::Up => Round::Down,
        }
    }
}

/// An exact binary rational `mant * 2^exp`.
///
/// Normalized so the mantissa is odd (or zero with `exp == 0`), which makes
/// equality structural.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Dyadic {
    mant: BigInt,
    exp: i64,
}

impl Dyadic {
    pub fn new(mant: BigInt, exp: i64) -> Dyadic {
        let mut d = Dyadic { mant, exp };
        d.normalize();
        d
    }

    pub fn zero() -> Dyadic {
        Dyadic { mant: BigInt::zero(), exp: 0 }
    }

    pub fn one() -> Dyadic {
        Dyadic { mant: BigInt::one(), exp: 0 }
    }

    /// `2^k`, exactly.
    pub fn pow2(k: i64) -> Dyadic {
        Dyadic { mant: BigInt::one(), exp: k }
    }

    pub fn from_bigint(n: BigInt) -> Dyadic {
        Dyadic::new(n, 0)
    }

    pub fn from_i64(n: i64) -> Dyadic {
        Dyadic::new(BigInt::from(n), 0)
    }

    pub fn from_u64(n: u64) -> Dyadic {
        Dyadic::new(BigInt::from(n), 0)
    }

    fn normalize(&mut self) {
        if self.mant.is_zero() {
            self.exp = 0;
            return;
        }
        let tz = self.mant.trailing_zeros().unwrap_or(0);
        if tz > 0 {
            self.mant >>= tz;
            self.exp += tz as i64;
        }
    }

    pub fn is_zero(&self) -> bool {
        self.mant.is_zero()
    }

    pub fn is_positive(&self) -> bool {
        self.mant.is_positive()
    }

    pub fn is_negative(&self) -> bool {
        self.mant.is_negative()
    }

    pub fn mantissa(&self) -> &BigInt {
        &self.mant
    }

    pub fn exponent(&self) -> i64 {
        self.exp
    }

    /// Number of significant bits in the mantissa.
    pub fn mant_bits(&self) -> u64 {
        self.mant.bits()
    }

    pub fn neg(&self) -> Dyadic {
        Dyadic { mant: -&self.mant, exp: self.exp }
    }

    pub fn abs(&self) -> Dyadic {
        Dyadic { mant: self.mant.abs(), exp: self.exp }
    }

    /// Exact addition.
    pub fn add(&self, rhs: &Dyadic) -> Dyadic {
        if self.is_zero() {
            return rhs.clone();
        }
        if rhs.is_zero() {
            return self.clone();
        }
        let e = self.exp.min(rhs.exp);
        let a = &self.mant << (self.exp - e) as u64;
        let b = &rhs.mant << (rhs.exp - e) as u64;
        Dyadic::new(a + b, e)
    }

    pub fn sub(&self, rhs: &Dyadic) -> Dyadic {
        self.add(&rhs.neg())
    }

    /// Exact multiplication.
    pub fn mul(&self, rhs: &Dyadic) -> Dyadic {
        Dyadic::new(&self.mant * &rhs.mant, self.exp + rhs.exp)
    }

    /// Exact multiplication by `2^k`.
    pub fn mul_pow2(&self, k: i64) -> Dyadic {
        if self.is_zero() {
            return Dyadic::zero();
        }
        Dyadic { mant: self.mant.clone(), exp: self.exp + k }
    }

    /// Round to at most `bits` significant bits, in direction `dir`.
    pub fn round(&self, bits: u32, dir: Round) -> Dyadic {
        let nb = self.mant.bits();
        if nb <= bits as u64 {
            return self.clone();
        }
        let shift = nb - bits as u64;
        let div = BigInt::one() << shift;
        let q = match dir {
            Round::Down => self.mant.div_floor(&div),
            Round::Up => self.mant.div_ceil(&div),
        };
        Dyadic::new(q, self.exp + shift as i64)
    }

    /// Directed division `self / rhs` with roughly `bits` significant bits.
    /// `rhs` must be nonzero.
    pub fn div(&self, rhs: &Dyadic, bits: u32, dir: Round) -> Dyadic {
        assert!(!rhs.is_zero(), "dyadic division by zero");
        if self.is_zero() {
            return Dyadic::zero();
        }
        // Scale the numerator so the quotient keeps `bits + 2` bits.
        let want = bits as i64 + 2;
        let shift = (want + rhs.mant.bits() as i64 - self.mant.bits() as i64).max(0) as u64;
        let num = &self.mant << shift;
        let q = match (dir, rhs.mant.is_negative()) {
            (Round::Down, false) | (Round::Up, true) => num.div_floor(&rhs.mant),
            _ => num.div_ceil(&rhs.mant),
        };
        Dyadic::new(q, self.exp - rhs.exp - shift as i64)
    }

    /// Directed conversion of an exact fraction `num / den` (`den > 0`).
    pub fn from_ratio(num: &BigInt, den: &BigInt, bits: u32, dir: Round) -> Dyadic {
        assert!(den.is_positive(), "denominator must be positive");
        Dyadic::from_bigint(num.clone()).div(&Dyadic::from_bigint(den.clone()), bits, dir)
    }

    pub fn from_rational(r: &BigRational, bits: u32, dir: Round) -> Dyadic {
        Dyadic::from_ratio(r.numer(), r.denom(), bits, dir)
    }

    /// One-sided square root: returns `(lo, hi)` with `lo <= sqrt(self) <= hi`,
    /// both with roughly `bits` significant bits. Requires `self >= 0`.
    pub fn sqrt_enclosure(&self, bits: u32) -> (Dyadic, Dyadic) {
        assert!(!self.is_negative(), "sqrt of negative dyadic");
        if self.is_zero() {
            return (Dyadic::zero(), Dyadic::zero());
        }
        let want = 2 * (bits as i64 + 2);
        let mut shift = (want - self.mant.bits() as i64).max(0) as u64;
        if (self.exp - shift as i64) % 2 != 0 {
            shift += 1;
        }
        let m = self.mant.magnitude() << shift;
        let half = (self.exp - shift as i64) / 2;
        let s = m.sqrt();
        let lo = Dyadic::new(BigInt::from_biguint(Sign::Plus, s.clone()), half);
        let hi = Dyadic::new(BigInt::from_biguint(Sign::Plus, s + BigUint::one()), half);
        (lo, hi)
    }

    /// Floor of the value as a big integer.
    pub fn floor_bigint(&self) -> BigInt {
        if self.exp >= 0 {
            &self.mant << self.exp as u64
        } else {
            self.mant.div_floor(&(BigInt::one() << (-self.exp) as u64))
        }
    }

    /// Exact value as a rational.
    pub fn to_rational(&self) -> BigRational {
        if self.exp >= 0 {
            BigRational::from_integer(&self.mant << self.exp as u64)
        } else {
            BigRational::new(self.mant.clone(), BigInt::one() << (-self.exp) as u64)
        }
    }

    /// Decimal rendering with `digits` fractional digits, rounded in `dir`.
    pub fn to_decimal(&self, digits: u32, dir: Round) -> String {
        let ten_pow = BigInt::from(10u32).pow(digits);
        let scaled_num = &self.mant * &ten_pow;
        let scaled = if self.exp >= 0 {
            scaled_num << self.exp as u64
        } else {
            let den = BigInt::one() << (-self.exp) as u64;
            match dir {
                Round::Down => scaled_num.div_floor(&den),
                Round::Up => scaled_num.div_ceil(&den),
            }
        };
        let negative = scaled.is_negative();
        let mag = scaled.magnitude().to_string();
        let (int_part, frac_part) = if mag.len() > digits as usize {
            let split = mag.len() - digits as usize;
            (mag[..split].to_string(), mag[split..].to_string())
        } else {
            ("0".to_string(), format!("{:0>width$}", mag, width = digits as usize))
        };
        let sign = if negative { "-" } else { "" };
        if digits == 0 {
            format!("{sign}{int_part}")
        } else {
            format!("{sign}{int_part}.{frac_part}")
        }
    }
}

impl PartialOrd for Dyadic {
    fn partial_cmp(&self, other: &Dyadic) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Dyadic {
    fn cmp(&self, other: &Dyadic) -> Ordering {
        let ls = self.mant.sign();
        let rs = other.mant.sign();
        if ls != rs {
            return match (ls, rs) {
                (Sign::Minus, _) => Ordering::Less,
                (_, Sign::Minus) => Ordering::Greater,
                (Sign::NoSign, Sign::Plus) => Ordering::Less,
                (Sign::Plus, Sign::NoSign) => Ordering::Greater,
                _ => Ordering::Equal,
            };
        }
        if ls == Sign::NoSign {
            return Ordering::Equal;
        }
        // Same nonzero sign: compare magnitudes via bit positions first.
        let lbits = self.mant.bits() as i64 + self.exp;
        let rbits = other.mant.bits() as i64 + other.exp;
        if lbits != rbits {
            let mag = lbits.cmp(&rbits);
            return if ls == Sign::Plus { mag } else { mag.reverse() };
        }
        let e = self.exp.min(other.exp);
        let a = &self.mant << (self.exp - e) as u64;
        let b = &other.mant << (other.exp - e) as u64;
        a.cmp(&b)
    }
}

impl fmt::Debug for Dyadic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}*2^{}", self.mant, self.exp)
    }
}

impl fmt::Display for Dyadic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_decimal(12, Round::Down))
    }
}
