//! Two-sided enclosures with exact dyadic endpoints, and the certified
//! evaluators for `log2` and `2^x` that everything else is built from.

use std::collections::HashMap;
use std::sync::{Arc, RwLock};

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Zero};
use once_cell::sync::Lazy;

use super::dyadic::{Dyadic, Round};
use super::CertError;

/// A real number known only up to an interval `[lo, hi]` with exact dyadic
/// endpoints, together with the working precision (in bits) it was computed
/// at.
///
/// Recomputing the same quantity at a higher precision yields an interval
/// contained in the previous one.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CertReal {
    lo: Dyadic,
    hi: Dyadic,
    prec: u32,
}

impl CertReal {
    pub fn new(lo: Dyadic, hi: Dyadic, prec: u32) -> CertReal {
        assert!(lo <= hi, "inverted interval: {lo:?} > {hi:?}");
        CertReal { lo, hi, prec }
    }

    pub fn point(value: Dyadic, prec: u32) -> CertReal {
        CertReal { lo: value.clone(), hi: value, prec }
    }

    pub fn from_bigint(n: &BigInt, prec: u32) -> CertReal {
        CertReal::point(Dyadic::from_bigint(n.clone()), prec)
    }

    pub fn from_u64(n: u64, prec: u32) -> CertReal {
        CertReal::point(Dyadic::from_u64(n), prec)
    }

    pub fn from_i64(n: i64, prec: u32) -> CertReal {
        CertReal::point(Dyadic::from_i64(n), prec)
    }

    /// Outward-rounded enclosure of an exact fraction.
    pub fn from_rational(r: &BigRational, prec: u32) -> CertReal {
        CertReal::new(
            Dyadic::from_rational(r, prec, Round::Down),
            Dyadic::from_rational(r, prec, Round::Up),
            prec,
        )
    }

    pub fn lo(&self) -> &Dyadic {
        &self.lo
    }

    pub fn hi(&self) -> &Dyadic {
        &self.hi
    }

    pub fn prec(&self) -> u32 {
        self.prec
    }

    pub fn width(&self) -> Dyadic {
        self.hi.sub(&self.lo)
    }

    pub fn is_point(&self) -> bool {
        self.lo == self.hi
    }

    pub fn contains(&self, v: &Dyadic) -> bool {
        &self.lo <= v && v <= &self.hi
    }

    pub fn contains_interval(&self, other: &CertReal) -> bool {
        self.lo <= other.lo && other.hi <= self.hi
    }

    /// Intersection; both must enclose the same true value for this to be
    /// meaningful. `None` when the intervals are disjoint.
    pub fn intersect(&self, other: &CertReal) -> Option<CertReal> {
        let lo = if self.lo >= other.lo { self.lo.clone() } else { other.lo.clone() };
        let hi = if self.hi <= other.hi { self.hi.clone() } else { other.hi.clone() };
        if lo <= hi {
            Some(CertReal::new(lo, hi, self.prec.max(other.prec)))
        } else {
            None
        }
    }

    fn out(lo: Dyadic, hi: Dyadic, prec: u32) -> CertReal {
        CertReal::new(lo.round(prec, Round::Down), hi.round(prec, Round::Up), prec)
    }

    pub fn neg(&self) -> CertReal {
        CertReal { lo: self.hi.neg(), hi: self.lo.neg(), prec: self.prec }
    }

    pub fn add(&self, rhs: &CertReal) -> CertReal {
        let prec = self.prec.max(rhs.prec);
        CertReal::out(self.lo.add(&rhs.lo), self.hi.add(&rhs.hi), prec)
    }

    pub fn sub(&self, rhs: &CertReal) -> CertReal {
        self.add(&rhs.neg())
    }

    pub fn mul(&self, rhs: &CertReal) -> CertReal {
        let prec = self.prec.max(rhs.prec);
        let cands = [
            self.lo.mul(&rhs.lo),
            self.lo.mul(&rhs.hi),
            self.hi.mul(&rhs.lo),
            self.hi.mul(&rhs.hi),
        ];
        let lo = cands.iter().min().unwrap().clone();
        let hi = cands.iter().max().unwrap().clone();
        CertReal::out(lo, hi, prec)
    }

    /// Interval division; the divisor must be strictly positive.
    pub fn div(&self, rhs: &CertReal) -> Result<CertReal, CertError> {
        if !rhs.lo.is_positive() {
            return Err(CertError::DivisorNotPositive);
        }
        let prec = self.prec.max(rhs.prec);
        let lo = [
            self.lo.div(&rhs.lo, prec, Round::Down),
            self.lo.div(&rhs.hi, prec, Round::Down),
        ]
        .into_iter()
        .min()
        .unwrap();
        let hi = [
            self.hi.div(&rhs.lo, prec, Round::Up),
            self.hi.div(&rhs.hi, prec, Round::Up),
        ]
        .into_iter()
        .max()
        .unwrap();
        Ok(CertReal::new(lo, hi, prec))
    }

    pub fn mul_pow2(&self, k: i64) -> CertReal {
        CertReal { lo: self.lo.mul_pow2(k), hi: self.hi.mul_pow2(k), prec: self.prec }
    }

    /// True when the whole interval is strictly below `rhs`.
    pub fn strictly_below(&self, rhs: &CertReal) -> bool {
        self.hi < rhs.lo
    }

    /// Decimal endpoints rounded outward (`lo` down, `hi` up).
    pub fn to_decimal_pair(&self, digits: u32) -> (String, String) {
        (self.lo.to_decimal(digits, Round::Down), self.hi.to_decimal(digits, Round::Up))
    }
}

/// Guard bits carried above the requested precision in iterative evaluators.
const GUARD: u32 = 32;

/// Certified enclosure of `log2(n)` for a positive integer, exact when `n` is
/// a power of two. Width is at most `2^(2 - prec)`.
pub fn log2_enclosure(n: &BigUint, prec: u32) -> Result<CertReal, CertError> {
    if n.is_zero() {
        return Err(CertError::Log2OfZero);
    }
    if n.count_ones() == 1 {
        let k = n.trailing_zeros().unwrap_or(0) as i64;
        return Ok(CertReal::point(Dyadic::from_i64(k), prec));
    }
    let int_part = n.bits() as i64 - 1;
    let start = Dyadic::new(BigInt::from_biguint(num_bigint::Sign::Plus, n.clone()), -int_part);
    let digits = prec as u64 + 2;
    let two = Dyadic::from_i64(2);
    let mut work = prec + GUARD;
    // Retry with more working precision if the digit extraction straddles a
    // boundary before producing the requested number of bits. log2 of a
    // non-power-of-two integer is irrational, so this always terminates.
    for _ in 0..8 {
        let mut xlo = start.clone();
        let mut xhi = start.clone();
        let mut acc = Dyadic::zero();
        let mut reached = 0u64;
        for i in 1..=digits {
            xlo = xlo.mul(&xlo).round(work, Round::Down);
            xhi = xhi.mul(&xhi).round(work, Round::Up);
            if xlo >= two {
                acc = acc.add(&Dyadic::pow2(-(i as i64)));
                xlo = xlo.mul_pow2(-1);
                xhi = xhi.mul_pow2(-1);
            } else if xhi <= two {
                // true value is strictly below 2 here (cannot equal 2)
            } else {
                break;
            }
            reached = i;
        }
        if reached == digits {
            let lo = Dyadic::from_i64(int_part).add(&acc);
            let hi = lo.add(&Dyadic::pow2(-(digits as i64)));
            return Ok(CertReal::new(lo, hi, prec));
        }
        work *= 2;
    }
    Err(CertError::PrecisionBudget("log2 digit extraction stalled".into()))
}

/// `log2` of a strictly positive dyadic: `log2(m * 2^k) = log2(m) + k`.
pub fn log2_dyadic(d: &Dyadic, prec: u32) -> Result<CertReal, CertError> {
    if !d.is_positive() {
        return Err(CertError::Log2OfZero);
    }
    let m = d.mantissa().magnitude().clone();
    Ok(log2_enclosure(&m, prec)?.add(&CertReal::from_i64(d.exponent(), prec)))
}

/// Enclosure of `log2` over a strictly positive interval.
pub fn log2_interval(x: &CertReal, prec: u32) -> Result<CertReal, CertError> {
    if x.is_point() {
        return log2_dyadic(x.lo(), prec);
    }
    let lo = log2_dyadic(x.lo(), prec)?;
    let hi = log2_dyadic(x.hi(), prec)?;
    Ok(CertReal::new(lo.lo().clone(), hi.hi().clone(), prec))
}

/// Cached enclosures of `2^(2^-i)`, the factors of the binary-exponent
/// product used by [`pow2_enclosure`]. Read-mostly; computed once per
/// working precision.
static SQRT2_TABLES: Lazy<RwLock<HashMap<u32, Arc<Vec<(Dyadic, Dyadic)>>>>> =
    Lazy::new(|| RwLock::new(HashMap::new()));

fn sqrt2_table(work: u32, depth: u32) -> Arc<Vec<(Dyadic, Dyadic)>> {
    if let Some(t) = SQRT2_TABLES.read().unwrap().get(&work) {
        if t.len() >= depth as usize {
            return Arc::clone(t);
        }
    }
    let mut table: Vec<(Dyadic, Dyadic)> = Vec::with_capacity(depth as usize);
    let mut lo = Dyadic::from_i64(2);
    let mut hi = Dyadic::from_i64(2);
    for _ in 0..depth {
        let (a, _) = lo.sqrt_enclosure(work);
        let (_, b) = hi.sqrt_enclosure(work);
        lo = a;
        hi = b;
        table.push((lo.clone(), hi.clone()));
    }
    let arc = Arc::new(table);
    SQRT2_TABLES.write().unwrap().insert(work, Arc::clone(&arc));
    arc
}

/// Exponent magnitude beyond which `2^x` is refused rather than silently
/// saturated.
const MAX_POW2_SHIFT: i64 = 1 << 24;

/// One-sided `2^d` for a dyadic exponent.
pub fn pow2_dyadic(d: &Dyadic, prec: u32, dir: Round) -> Result<Dyadic, CertError> {
    let floor = d.floor_bigint();
    let k = i64::try_from(&floor).map_err(|_| {
        CertError::PrecisionBudget(format!("2^x exponent out of range: {floor}"))
    })?;
    if k.abs() > MAX_POW2_SHIFT {
        return Err(CertError::PrecisionBudget(format!("2^x exponent out of range: {k}")));
    }
    let frac = d.sub(&Dyadic::from_i64(k));
    // Round the fractional part onto the table grid, in the result direction.
    let fbits = prec + 8;
    let scaled = frac.mul_pow2(fbits as i64);
    let grid = match dir {
        Round::Down => scaled.floor_bigint(),
        Round::Up => {
            let f = scaled.floor_bigint();
            if Dyadic::from_bigint(f.clone()) == scaled { f } else { f + BigInt::one() }
        }
    };
    if grid.is_zero() {
        return Ok(Dyadic::pow2(k));
    }
    if grid == BigInt::one() << fbits {
        // fractional part rounded up to a full unit
        return Ok(Dyadic::pow2(k + 1));
    }
    let work = prec + GUARD;
    let table = sqrt2_table(work, fbits);
    let mut acc = Dyadic::one();
    let grid = grid.magnitude();
    for i in 1..=fbits {
        if grid.bit((fbits - i) as u64) {
            let (flo, fhi) = &table[i as usize - 1];
            acc = match dir {
                Round::Down => acc.mul(flo).round(work, Round::Down),
                Round::Up => acc.mul(fhi).round(work, Round::Up),
            };
        }
    }
    Ok(acc.round(prec + 4, dir).mul_pow2(k))
}

/// Certified enclosure of `2^t` for every `t` in `x`. Monotone in `x` and
/// exact on integer points.
pub fn pow2_enclosure(x: &CertReal, prec: u32) -> Result<CertReal, CertError> {
    let lo = pow2_dyadic(x.lo(), prec, Round::Down)?;
    let hi = pow2_dyadic(x.hi(), prec, Round::Up)?;
    Ok(CertReal::new(lo, hi, prec))
}
