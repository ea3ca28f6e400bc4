//! Exact combinatorial quantities and bounds: Gaussian binomials, the
//! `S(p,a)` table, the constants `C(p)`, `c(p) = 2.129*C(p)`, the tail sums
//! behind `2.129` and `2.53175`, and the composite bounds `f(r)` and `B(r)`.

use std::collections::HashMap;
use std::sync::RwLock;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Zero};
use once_cell::sync::Lazy;

use crate::certified::{
    certify_le, CertError, CertReal, Dyadic, Expr, Outcome, Round, Verdict,
};

/// `7.3722`, the leading constant of the main bound, stored exactly.
pub fn bound_coefficient() -> BigRational {
    BigRational::new(BigInt::from(73722u32), BigInt::from(10_000u32))
}

/// `1.5315`, the exponent offset of the main bound, stored exactly.
pub fn bound_epsilon() -> BigRational {
    BigRational::new(BigInt::from(15315u32), BigInt::from(10_000u32))
}

/// `2.129`, the even-case tail constant.
pub fn theta_even_bound() -> BigRational {
    BigRational::new(BigInt::from(2129u32), BigInt::from(1000u32))
}

/// `2.53175`, the odd-case tail constant.
pub fn theta_odd_bound() -> BigRational {
    BigRational::new(BigInt::from(253175u32), BigInt::from(100_000u32))
}

/// Deterministic trial-division primality test; adequate for the prime
/// ranges this toolkit sweeps (below 10^14 after divisor removal).
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n % 2 == 0 {
        return n == 2;
    }
    let mut d = 3u64;
    while d.checked_mul(d).is_some_and(|sq| sq <= n) {
        if n % d == 0 {
            return false;
        }
        d += 2;
    }
    true
}

/// Primes up to `limit`, by trial division.
pub fn primes_up_to(limit: u64) -> Vec<u64> {
    (2..=limit).filter(|&n| is_prime(n)).collect()
}

/// An integer `r >= 2` as an ordered list of `(prime, exponent)` pairs.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Factorization {
    pairs: Vec<(u64, u32)>,
}

impl Factorization {
    /// Validates primality (trial division), strict ordering, and positive
    /// exponents.
    pub fn new(pairs: Vec<(u64, u32)>) -> Result<Factorization, CertError> {
        if pairs.is_empty() {
            return Err(CertError::Domain("factorization of an integer < 2".into()));
        }
        for window in pairs.windows(2) {
            if window[0].0 >= window[1].0 {
                return Err(CertError::Domain("primes must be strictly increasing".into()));
            }
        }
        for &(p, a) in &pairs {
            if !is_prime(p) {
                return Err(CertError::NotPrime(p));
            }
            if a == 0 {
                return Err(CertError::Domain(format!("exponent of {p} is zero")));
            }
        }
        Ok(Factorization { pairs })
    }

    pub fn pairs(&self) -> &[(u64, u32)] {
        &self.pairs
    }

    /// Number of distinct primes.
    pub fn ell(&self) -> usize {
        self.pairs.len()
    }

    /// The reconstructed integer.
    pub fn value(&self) -> BigUint {
        let mut v = BigUint::one();
        for &(p, a) in &self.pairs {
            v *= BigUint::from(p).pow(a);
        }
        v
    }

    pub fn value_u64(&self) -> Option<u64> {
        u64::try_from(&self.value()).ok()
    }
}

/// Exact Gaussian binomial `[a, k]_q` (number of `k`-dimensional subspaces
/// of an `a`-dimensional vector space over the field with `q` elements).
/// Accepts any base `q >= 2`; only primes are used downstream.
pub fn gaussian_binomial(a: u32, k: u32, q: u64) -> Result<BigInt, CertError> {
    if k > a {
        return Err(CertError::Domain(format!("gaussian binomial with k={k} > a={a}")));
    }
    if q < 2 {
        return Err(CertError::Domain(format!("gaussian binomial base {q} < 2")));
    }
    let k = k.min(a - k);
    let q = BigInt::from(q);
    let mut num = BigInt::one();
    let mut den = BigInt::one();
    for i in 0..k {
        num *= q.pow(a - i) - 1;
        den *= q.pow(i + 1) - 1;
    }
    let (quot, rem) = num.div_rem(&den);
    debug_assert!(rem.is_zero(), "gaussian binomial division must be exact");
    Ok(quot)
}

/// `sum_k [a, k]_q`: the subgroup-count sum an elementary abelian group
/// realizes exactly.
pub fn subgroup_sum(a: u32, q: u64) -> Result<BigInt, CertError> {
    let mut acc = BigInt::zero();
    for k in 0..=a {
        acc += gaussian_binomial(a, k, q)?;
    }
    Ok(acc)
}

/// Either an exact integer or a certified upper enclosure.
#[derive(Debug, Clone, PartialEq)]
pub enum Bound {
    Exact(BigInt),
    Enclosure(CertReal),
}

impl Bound {
    pub fn as_expr(&self) -> Expr {
        match self {
            Bound::Exact(n) => Expr::int(n.clone()),
            Bound::Enclosure(c) => {
                // stand-in expression: the exact dyadic upper endpoint
                Expr::Ratio(c.hi().to_rational())
            }
        }
    }
}

/// The per-prime-power subgroup bound `S(p, a)`.
#[derive(Debug, Clone, PartialEq)]
pub struct SBound {
    pub p: u64,
    pub a: u32,
    pub value: Bound,
}

/// Closed-form `S(p, a)` for `a <= 5`, as an exact integer.
fn s_polynomial(p: u64, a: u32) -> BigInt {
    let p = BigInt::from(p);
    match a {
        1 => BigInt::from(2),
        2 => &p + 3,
        3 => 2 * p.pow(2) + 2 * &p + 4,
        4 => p.pow(4) + 3 * p.pow(3) + 4 * p.pow(2) + 3 * &p + 5,
        5 => 2 * p.pow(6) + 2 * p.pow(5) + 6 * p.pow(4) + 6 * p.pow(3) + 6 * p.pow(2) + 4 * &p + 6,
        _ => unreachable!(),
    }
}

/// `S(p, a)` as an expression: the exact polynomial for `a <= 5`, and
/// `2.129 * C(p) * p^(a^2/4)` for `a >= 6`.
pub fn s_expr(p: u64, a: u32) -> Result<Expr, CertError> {
    if a == 0 {
        return Err(CertError::Domain("S(p, a) requires a >= 1".into()));
    }
    if !is_prime(p) {
        return Err(CertError::NotPrime(p));
    }
    if a <= 5 {
        return Ok(Expr::int(s_polynomial(p, a)));
    }
    Ok(Expr::prod([
        Expr::Ratio(theta_even_bound()),
        Expr::EulerC(p),
        Expr::pow(Expr::int(p), Expr::ratio(i64::from(a) * i64::from(a), 4)),
    ]))
}

/// `S(p, a)`: exact for `a <= 5`, a certified upper enclosure of
/// `c(p) * p^(a^2/4)` (never rounded down) for `a >= 6`.
pub fn s_bound(p: u64, a: u32, prec: u32) -> Result<SBound, CertError> {
    let expr = s_expr(p, a)?;
    let value = match expr.exact() {
        Some(r) => Bound::Exact(r.to_integer()),
        None => Bound::Enclosure(expr.eval(prec)?),
    };
    Ok(SBound { p, a, value })
}

/// A named certified constant.
#[derive(Debug, Clone, PartialEq)]
pub struct ConstantEnclosure {
    pub name: String,
    pub interval: CertReal,
}

static EULER_C_CACHE: Lazy<RwLock<HashMap<(u64, u32), CertReal>>> =
    Lazy::new(|| RwLock::new(HashMap::new()));

/// Enclosure of the Euler product `C(p) = prod_{i>=1} (1 - p^-i)^-1` with
/// width at most about `2^-prec`.
///
/// Truncates at `N` factors and bounds the tail by the certified geometric
/// majorant `prod_{i>N} (1 - p^-i)^-1 <= 1 / (1 - tau)` with
/// `tau = p^-N / ((p-1) (1 - p^-(N+1)))`.
pub fn euler_c_interval(p: u64, prec: u32) -> Result<CertReal, CertError> {
    if !is_prime(p) {
        return Err(CertError::NotPrime(p));
    }
    if let Some(hit) = EULER_C_CACHE.read().unwrap().get(&(p, prec)) {
        return Ok(hit.clone());
    }
    let work = prec + 16;
    // p^-N <= 2^-N for p >= 2, so N = prec + 8 factors suffice.
    let n_terms = prec + 8;
    let mut acc = CertReal::from_i64(1, work);
    let mut p_pow = BigInt::one();
    let p_big = BigInt::from(p);
    for _ in 1..=n_terms {
        p_pow *= &p_big;
        let factor = CertReal::new(
            Dyadic::from_ratio(&p_pow, &(&p_pow - 1), work, Round::Down),
            Dyadic::from_ratio(&p_pow, &(&p_pow - 1), work, Round::Up),
            work,
        );
        acc = acc.mul(&factor);
    }
    // tau = p^-N / ((p-1)(1 - p^-(N+1))), exactly; 1/(1-tau) bounds exp(tau).
    let p_n = BigRational::new(BigInt::one(), p_pow.clone());
    let p_n1 = BigRational::new(BigInt::one(), p_pow * &p_big);
    let tau = p_n / ((BigRational::from_integer(p_big) - BigRational::one())
        * (BigRational::one() - p_n1));
    let tail_hi = (BigRational::one() - tau).recip();
    let tail = CertReal::new(
        Dyadic::one(),
        Dyadic::from_rational(&tail_hi, work, Round::Up),
        work,
    );
    let out = acc.mul(&tail);
    let out = CertReal::new(out.lo().round(prec + 4, Round::Down), out.hi().round(prec + 4, Round::Up), prec);
    let mut cache = EULER_C_CACHE.write().unwrap();
    cache.insert((p, prec), out.clone());
    Ok(out)
}

fn bits_for_tol(tol: f64) -> u32 {
    assert!(tol > 0.0, "tolerance must be positive");
    let mut bits = 8u32;
    while 2f64.powi(-(bits as i32)) > tol && bits < 1 << 20 {
        bits += 8;
    }
    bits + 8
}

/// Certified two-sided enclosure of `C(p)` with width below `tol`.
pub fn euler_product_c(p: u64, tol: f64) -> Result<ConstantEnclosure, CertError> {
    let interval = euler_c_interval(p, bits_for_tol(tol))?;
    Ok(ConstantEnclosure { name: format!("C({p})"), interval })
}

/// Certified enclosure of `c(p) = 2.129 * C(p)` with width below `tol`.
pub fn growth_constant_c(p: u64, tol: f64) -> Result<ConstantEnclosure, CertError> {
    let bits = bits_for_tol(tol);
    let c = euler_c_interval(p, bits)?;
    let scale = CertReal::from_rational(&theta_even_bound(), bits);
    Ok(ConstantEnclosure { name: format!("c({p})"), interval: c.mul(&scale) })
}

/// Enclosure of one of the two base-2 theta-like tail sums, via exact dyadic
/// partial sums plus an exact geometric tail bound.
///
/// `exponent(k)` must be increasing with increments that are at least
/// `exponent(K+1) - exponent(K)` for all `k > K`.
fn theta_sum(exponent: impl Fn(u64) -> u64, prec: u32) -> CertReal {
    let mut partial = Dyadic::zero();
    let mut k = 0u64;
    while exponent(k) <= prec as u64 + 8 {
        partial = partial.add(&Dyadic::pow2(-(exponent(k) as i64)));
        k += 1;
    }
    // For k > K the exponent grows by at least step = e(K+1) - e(K) each
    // term, so the tail is at most 2^-e(K+1) / (1 - 2^-step).
    let e_next = exponent(k);
    let step = e_next - exponent(k - 1);
    let tail_num = BigRational::new(BigInt::one(), BigInt::one() << e_next);
    let tail = tail_num
        / (BigRational::one() - BigRational::new(BigInt::one(), BigInt::one() << step));
    let hi = partial.add(&Dyadic::from_rational(&tail, prec + 8, Round::Up));
    CertReal::new(partial, hi, prec)
}

/// Certificates for the two tail constants of the `a >= 6` bound:
/// `-1 + 2*sum 2^(-k^2) <= 2.129`, `2*sum 2^(-k(k+1)) <= 2.53175`, and the
/// odd-case reduction `2.53175 * 2^(-1/4) <= 2.129`.
#[derive(Debug, Clone)]
pub struct ThetaCertificates {
    pub even_sum: CertReal,
    pub even_verdict: Verdict,
    pub odd_sum: CertReal,
    pub odd_verdict: Verdict,
    pub odd_even_verdict: Verdict,
}

pub fn theta_constants(prec_cap: u32) -> Result<ThetaCertificates, CertError> {
    let prec = 96u32;
    let even = theta_sum(|k| k * k, prec)
        .mul(&CertReal::from_i64(2, prec))
        .add(&CertReal::from_i64(-1, prec));
    let odd = theta_sum(|k| k * (k + 1), prec).mul(&CertReal::from_i64(2, prec));

    let even_verdict = certify_le(
        &Expr::Ratio(even.hi().to_rational()),
        &Expr::Ratio(theta_even_bound()),
        prec_cap,
    )?;
    let odd_verdict = certify_le(
        &Expr::Ratio(odd.hi().to_rational()),
        &Expr::Ratio(theta_odd_bound()),
        prec_cap,
    )?;
    let odd_even_verdict = certify_le(
        &Expr::prod([
            Expr::Ratio(theta_odd_bound()),
            Expr::pow(Expr::int(2), Expr::ratio(-1, 4)),
        ]),
        &Expr::Ratio(theta_even_bound()),
        prec_cap,
    )?;
    Ok(ThetaCertificates { even_sum: even, even_verdict, odd_sum: odd, odd_verdict, odd_even_verdict })
}

/// The main bound `B(r) = 7.3722 * r^(log2(r)/4 + 1.5315)` as an expression.
pub fn bound_b_expr(r: u64) -> Expr {
    Expr::prod([
        Expr::Ratio(bound_coefficient()),
        Expr::pow(
            Expr::int(r),
            Expr::sum([
                Expr::prod([Expr::ratio(1, 4), Expr::log2(r)]),
                Expr::Ratio(bound_epsilon()),
            ]),
        ),
    ])
}

/// Certified enclosure of `B(r)` for `r >= 2`.
pub fn bound_b(r: u64, prec: u32) -> Result<CertReal, CertError> {
    if r < 2 {
        return Err(CertError::Domain(format!("B(r) requires r >= 2, got {r}")));
    }
    bound_b_expr(r).eval(prec)
}

/// `f(r) = r^(l-1) * prod_i S(p_i, a_i)` as an expression, exact whenever
/// every exponent is at most 5.
pub fn f_expr(fact: &Factorization) -> Result<Expr, CertError> {
    let ell = fact.ell() as i64;
    let r = BigInt::from(fact.value());
    let mut factors = vec![Expr::pow(Expr::int(r), Expr::int(ell - 1))];
    for &(p, a) in fact.pairs() {
        factors.push(s_expr(p, a)?);
    }
    Ok(Expr::prod(factors))
}

/// `f(r)`: exact integer when all `a_i <= 5`, otherwise an upper enclosure.
pub fn f_of_r(fact: &Factorization, prec: u32) -> Result<Bound, CertError> {
    let expr = f_expr(fact)?;
    match expr.exact() {
        Some(v) => Ok(Bound::Exact(v.to_integer())),
        None => Ok(Bound::Enclosure(expr.eval(prec)?)),
    }
}

/// The chain-length bound `r^floor(log2 r)`, exactly.
pub fn trivial_bound(r: u64) -> Result<BigInt, CertError> {
    if r < 2 {
        return Err(CertError::Domain(format!("trivial bound requires r >= 2, got {r}")));
    }
    let exp = 63 - r.leading_zeros();
    Ok(BigInt::from(r).pow(exp))
}

/// Certifies `[a, floor(a/2)]_2 >= 2^(a^2/4)`: by exact integer comparison
/// when `a^2/4` is integral, otherwise via fourth powers.
pub fn lower_bound_check(a: u32) -> Result<Verdict, CertError> {
    if a == 0 {
        return Err(CertError::Domain("lower bound check requires a >= 1".into()));
    }
    let g = gaussian_binomial(a, a / 2, 2)?;
    let (lhs, rhs) = if a % 2 == 0 {
        (g.clone(), BigInt::one() << (a * a / 4))
    } else {
        (g.pow(4), BigInt::one() << (a * a))
    };
    let outcome = if lhs >= rhs { Outcome::Verified } else { Outcome::Refuted };
    Ok(Verdict::new(
        outcome,
        0,
        Some(crate::certified::Witness { lhs: g.to_string(), rhs: format!("2^({}^2/4)", a) }),
    ))
}

/// Certifies the per-index subgroup-count bound `[a, k]_p <= C(p) * p^(k(a-k))`.
pub fn shalev_check(a: u32, k: u32, p: u64, prec_cap: u32) -> Result<Verdict, CertError> {
    if !is_prime(p) {
        return Err(CertError::NotPrime(p));
    }
    let lhs = Expr::int(gaussian_binomial(a, k, p)?);
    let rhs = Expr::prod([
        Expr::EulerC(p),
        Expr::pow(Expr::int(p), Expr::int(i64::from(k) * i64::from(a - k))),
    ]);
    certify_le(&lhs, &rhs, prec_cap)
}
