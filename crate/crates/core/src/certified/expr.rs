//! Expression trees for the quantities that get compared: integers,
//! rationals, `log2` of integers, sums, products, powers, and the Euler
//! product constant `C(p)`.
//!
//! An expression either reduces to an exact rational (syntactic reductions
//! only, e.g. `log2(2^k) = k`) or is evaluated to a [`CertReal`] enclosure at
//! a given precision.

use std::cmp::Ordering;
use std::fmt;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

use super::interval::{log2_enclosure, log2_interval, pow2_enclosure, CertReal};
use super::CertError;
use crate::sgbound::euler_c_interval;

#[derive(Clone, PartialEq, Eq)]
pub enum Expr {
    /// Exact rational constant. Integers are the `denom == 1` case.
    Ratio(BigRational),
    /// `log2(n)` for a positive integer `n`.
    Log2(BigUint),
    /// The Euler product `C(p) = prod_{i>=1} (1 - p^-i)^-1` for a prime `p`.
    EulerC(u64),
    Sum(Vec<Expr>),
    Prod(Vec<Expr>),
    /// `base ^ exponent`; the base must evaluate strictly positive.
    Pow(Box<Expr>, Box<Expr>),
    Neg(Box<Expr>),
}

impl Expr {
    pub fn int(n: impl Into<BigInt>) -> Expr {
        Expr::Ratio(BigRational::from_integer(n.into()))
    }

    pub fn ratio(num: impl Into<BigInt>, den: impl Into<BigInt>) -> Expr {
        Expr::Ratio(BigRational::new(num.into(), den.into()))
    }

    pub fn log2(n: impl Into<BigUint>) -> Expr {
        Expr::Log2(n.into())
    }

    pub fn sum(terms: impl IntoIterator<Item = Expr>) -> Expr {
        Expr::Sum(terms.into_iter().collect())
    }

    pub fn prod(factors: impl IntoIterator<Item = Expr>) -> Expr {
        Expr::Prod(factors.into_iter().collect())
    }

    pub fn pow(base: Expr, exponent: Expr) -> Expr {
        Expr::Pow(Box::new(base), Box::new(exponent))
    }

    pub fn neg(e: Expr) -> Expr {
        Expr::Neg(Box::new(e))
    }

    /// Exact rational value, when one is forced by syntactic reductions:
    /// rational leaves, `log2` of powers of two, sums/products of exact
    /// parts, and powers with exact base and integer exponent.
    pub fn exact(&self) -> Option<BigRational> {
        match self {
            Expr::Ratio(r) => Some(r.clone()),
            Expr::Log2(n) => {
                if !n.is_zero() && n.count_ones() == 1 {
                    Some(BigRational::from_integer(BigInt::from(
                        n.trailing_zeros().unwrap_or(0),
                    )))
                } else {
                    None
                }
            }
            Expr::EulerC(_) => None,
            Expr::Sum(terms) => {
                let mut acc = BigRational::zero();
                for t in terms {
                    acc += t.exact()?;
                }
                Some(acc)
            }
            Expr::Prod(factors) => {
                let mut acc = BigRational::one();
                for f in factors {
                    acc *= f.exact()?;
                }
                Some(acc)
            }
            Expr::Pow(base, exp) => {
                let b = base.exact()?;
                let e = exp.exact()?;
                if !e.denom().is_one() {
                    return None;
                }
                let k = e.numer().to_i32()?;
                if b.is_zero() && k < 0 {
                    return None;
                }
                Some(b.pow(k))
            }
            Expr::Neg(e) => Some(-e.exact()?),
        }
    }

    /// Flatten nested sums/products, fold rational constants, and sort
    /// operands into a canonical order, so that expressions equal up to
    /// commutativity compare equal structurally.
    pub fn normalize(&self) -> Expr {
        if let Some(r) = self.exact() {
            return Expr::Ratio(r);
        }
        match self {
            Expr::Ratio(_) | Expr::Log2(_) | Expr::EulerC(_) => self.clone(),
            Expr::Neg(e) => Expr::neg(e.normalize()),
            Expr::Pow(b, e) => Expr::pow(b.normalize(), e.normalize()),
            Expr::Sum(terms) => {
                let mut flat = Vec::new();
                let mut konst = BigRational::zero();
                for t in terms {
                    match t.normalize() {
                        Expr::Ratio(r) => konst += r,
                        Expr::Sum(inner) => {
                            for x in inner {
                                match x {
                                    Expr::Ratio(r) => konst += r,
                                    other => flat.push(other),
                                }
                            }
                        }
                        other => flat.push(other),
                    }
                }
                if !konst.is_zero() {
                    flat.push(Expr::Ratio(konst));
                }
                flat.sort_by(expr_order);
                if flat.len() == 1 {
                    flat.pop().unwrap()
                } else {
                    Expr::Sum(flat)
                }
            }
            Expr::Prod(factors) => {
                let mut flat = Vec::new();
                let mut konst = BigRational::one();
                for f in factors {
                    match f.normalize() {
                        Expr::Ratio(r) => konst *= r,
                        Expr::Prod(inner) => {
                            for x in inner {
                                match x {
                                    Expr::Ratio(r) => konst *= r,
                                    other => flat.push(other),
                                }
                            }
                        }
                        other => flat.push(other),
                    }
                }
                if konst.is_zero() {
                    return Expr::Ratio(BigRational::zero());
                }
                if !konst.is_one() {
                    flat.push(Expr::Ratio(konst));
                }
                flat.sort_by(expr_order);
                if flat.len() == 1 {
                    flat.pop().unwrap()
                } else {
                    Expr::Prod(flat)
                }
            }
        }
    }

    /// Evaluate to an enclosure at the given working precision.
    pub fn eval(&self, prec: u32) -> Result<CertReal, CertError> {
        match self {
            Expr::Ratio(r) => Ok(CertReal::from_rational(r, prec)),
            Expr::Log2(n) => log2_enclosure(n, prec),
            Expr::EulerC(p) => euler_c_interval(*p, prec),
            Expr::Sum(terms) => {
                let mut acc = CertReal::from_i64(0, prec);
                for t in terms {
                    acc = acc.add(&t.eval(prec)?);
                }
                Ok(acc)
            }
            Expr::Prod(factors) => {
                let mut acc = CertReal::from_i64(1, prec);
                for f in factors {
                    acc = acc.mul(&f.eval(prec)?);
                }
                Ok(acc)
            }
            Expr::Neg(e) => Ok(e.eval(prec)?.neg()),
            Expr::Pow(base, exponent) => {
                if let Some(r) = self.exact() {
                    return Ok(CertReal::from_rational(&r, prec));
                }
                let b = base.eval(prec)?;
                if !b.lo().is_positive() {
                    return Err(CertError::NonPositiveBase);
                }
                let e = exponent.eval(prec)?;
                let log_b = log2_interval(&b, prec)?;
                pow2_enclosure(&log_b.mul(&e), prec)
            }
        }
    }
}

/// Canonical ordering used by [`Expr::normalize`].
fn expr_order(a: &Expr, b: &Expr) -> Ordering {
    fn rank(e: &Expr) -> u8 {
        match e {
            Expr::Ratio(_) => 0,
            Expr::Log2(_) => 1,
            Expr::EulerC(_) => 2,
            Expr::Sum(_) => 3,
            Expr::Prod(_) => 4,
            Expr::Pow(..) => 5,
            Expr::Neg(_) => 6,
        }
    }
    match (a, b) {
        (Expr::Ratio(x), Expr::Ratio(y)) => x.cmp(y),
        (Expr::Log2(x), Expr::Log2(y)) => x.cmp(y),
        (Expr::EulerC(x), Expr::EulerC(y)) => x.cmp(y),
        (Expr::Sum(x), Expr::Sum(y)) | (Expr::Prod(x), Expr::Prod(y)) => {
            for (u, v) in x.iter().zip(y.iter()) {
                let o = expr_order(u, v);
                if o != Ordering::Equal {
                    return o;
                }
            }
            x.len().cmp(&y.len())
        }
        (Expr::Pow(xb, xe), Expr::Pow(yb, ye)) => {
            expr_order(xb, yb).then_with(|| expr_order(xe, ye))
        }
        (Expr::Neg(x), Expr::Neg(y)) => expr_order(x, y),
        _ => rank(a).cmp(&rank(b)),
    }
}

impl fmt::Debug for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Ratio(r) => {
                if r.denom().is_one() {
                    write!(f, "{}", r.numer())
                } else {
                    write!(f, "{}/{}", r.numer(), r.denom())
                }
            }
            Expr::Log2(n) => write!(f, "log2({n})"),
            Expr::EulerC(p) => write!(f, "C({p})"),
            Expr::Sum(terms) => {
                write!(f, "(")?;
                for (i, t) in terms.iter().enumerate() {
                    if i > 0 {
                        write!(f, " + ")?;
                    }
                    write!(f, "{t}")?;
                }
                write!(f, ")")
            }
            Expr::Prod(factors) => {
                for (i, x) in factors.iter().enumerate() {
                    if i > 0 {
                        write!(f, "*")?;
                    }
                    write!(f, "{x}")?;
                }
                Ok(())
            }
            Expr::Pow(b, e) => write!(f, "({b})^({e})"),
            Expr::Neg(e) => write!(f, "-({e})"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_reductions() {
        assert_eq!(Expr::log2(16u32).exact(), Some(BigRational::from_integer(4.into())));
        assert_eq!(Expr::log2(19u32).exact(), None);
        let e = Expr::prod([Expr::int(3), Expr::ratio(1, 6)]);
        assert_eq!(e.exact(), Some(BigRational::new(1.into(), 2.into())));
        let p = Expr::pow(Expr::int(2), Expr::int(10));
        assert_eq!(p.exact(), Some(BigRational::from_integer(1024.into())));
        let neg_pow = Expr::pow(Expr::ratio(1, 2), Expr::int(-2));
        assert_eq!(neg_pow.exact(), Some(BigRational::from_integer(4.into())));
        assert_eq!(Expr::pow(Expr::int(2), Expr::log2(3u32)).exact(), None);
    }

    #[test]
    fn normalization_is_commutative() {
        let a = Expr::prod([Expr::log2(7u32), Expr::log2(5u32)]);
        let b = Expr::prod([Expr::log2(5u32), Expr::log2(7u32)]);
        assert_eq!(a.normalize(), b.normalize());
        let nested = Expr::sum([Expr::sum([Expr::int(1), Expr::log2(3u32)]), Expr::int(2)]);
        let flat = Expr::sum([Expr::log2(3u32), Expr::int(3)]);
        assert_eq!(nested.normalize(), flat.normalize());
    }

    #[test]
    fn eval_power_contains_true_value() {
        // 3^2 through the transcendental path must still contain 9
        let e = Expr::pow(Expr::int(3), Expr::sum([Expr::int(1), Expr::int(1)]));
        let v = e.eval(64).unwrap();
        assert_eq!(v, CertReal::from_i64(9, 64));
        // 2^log2(3) contains 3
        let e = Expr::pow(Expr::int(2), Expr::log2(3u32));
        let v = e.eval(64).unwrap();
        assert!(v.contains(&super::super::dyadic::Dyadic::from_i64(3)));
    }

    #[test]
    fn eval_rejects_nonpositive_base() {
        let e = Expr::pow(Expr::int(-2), Expr::log2(3u32));
        assert!(matches!(e.eval(64), Err(CertError::NonPositiveBase)));
    }
}
