//! Scalar p-adic valuations and the classical sequence formulas: Legendre's
//! formula for `n!`, central binomial coefficients and Stirling numbers of
//! the second kind.

use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// A validated prime.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Prime(u64);

impl Prime {
    /// Trial division up to the square root.
    pub fn new(p: u64) -> Result<Self> {
        if p < 2 {
            return Err(Error::NotPrime(p));
        }
        let mut d = 2u64;
        while d.saturating_mul(d) <= p {
            if p.is_multiple_of(d) {
                return Err(Error::NotPrime(p));
            }
            d += 1;
        }
        Ok(Prime(p))
    }

    pub fn get(self) -> u64 {
        self.0
    }

    pub fn as_scalar<T: Scalar>(self) -> Result<T> {
        T::from_u64_exact(self.0)
    }

    pub fn pow<T: Scalar>(self, e: u32) -> Result<T> {
        self.as_scalar::<T>()?.pow_checked(e)
    }
}

impl fmt::Display for Prime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

/// `nu_p(n)`: finite for nonzero `n`, infinite for zero.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Valuation {
    Finite(u32),
    Infinite,
}

impl Valuation {
    pub fn finite(self) -> Option<u32> {
        match self {
            Valuation::Finite(v) => Some(v),
            Valuation::Infinite => None,
        }
    }

    pub fn is_infinite(self) -> bool {
        self == Valuation::Infinite
    }
}

impl fmt::Display for Valuation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Valuation::Finite(v) => v.fmt(f),
            Valuation::Infinite => f.write_str("inf"),
        }
    }
}

impl Serialize for Valuation {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Valuation::Finite(v) => s.serialize_u32(*v),
            Valuation::Infinite => s.serialize_str("inf"),
        }
    }
}

impl<'de> Deserialize<'de> for Valuation {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Repr {
            Num(u32),
            Text(String),
        }
        match Repr::deserialize(d)? {
            Repr::Num(v) => Ok(Valuation::Finite(v)),
            Repr::Text(t) if t == "inf" => Ok(Valuation::Infinite),
            Repr::Text(t) => Err(serde::de::Error::custom(format!("bad valuation {t:?}"))),
        }
    }
}

/// Exponent of the largest power of `p` dividing `n`; the sign of `n` is
/// ignored.
pub fn valuation<T: Scalar>(n: &T, p: Prime) -> Valuation {
    if n.is_zero() {
        return Valuation::Infinite;
    }
    let Ok(p) = p.as_scalar::<T>() else {
        // p does not fit T, so it cannot divide a nonzero n of type T
        return Valuation::Finite(0);
    };
    let mut m = n.clone();
    let mut v = 0;
    loop {
        let (q, r) = m.div_rem(&p);
        if !r.is_zero() {
            return Valuation::Finite(v);
        }
        m = q;
        v += 1;
    }
}

/// Sum of the base-`p` digits of a non-negative `n`.
pub fn digit_sum<T: Scalar>(n: &T, p: Prime) -> Result<u64> {
    if n.is_negative() {
        return Err(Error::Negative(n.to_string()));
    }
    let Ok(base) = p.as_scalar::<T>() else {
        return n.to_u64().ok_or(Error::Overflow);
    };
    let mut m = n.clone();
    let mut sum = 0u64;
    while !m.is_zero() {
        let (q, r) = m.div_rem(&base);
        sum += r.to_u64().ok_or(Error::Overflow)?;
        m = q;
    }
    Ok(sum)
}

/// `sum_{k>=1} floor(n / p^k)`, stopping at the first `p^k > n`.
pub fn legendre_floor_sum(n: u64, p: Prime) -> u64 {
    let p = p.get();
    let mut total = 0;
    let mut q = n / p;
    while q > 0 {
        total += q;
        q /= p;
    }
    total
}

/// `(n - s_p(n)) / (p - 1)`.
pub fn legendre_digit_form(n: u64, p: Prime) -> u64 {
    let s = digit_sum(&(n as i128), p).expect("non-negative input");
    (n - s) / (p.get() - 1)
}

/// `nu_p(n!)`, computed by both forms of Legendre's formula; disagreement
/// is reported as [`Error::Inconsistent`].
pub fn factorial_valuation(n: u64, p: Prime) -> Result<u64> {
    let floor_sum = legendre_floor_sum(n, p);
    let digit_form = legendre_digit_form(n, p);
    if floor_sum != digit_form {
        return Err(Error::Inconsistent(format!(
            "Legendre forms disagree for n={n}, p={p}: floor sum {floor_sum}, digit form {digit_form}"
        )));
    }
    Ok(floor_sum)
}

pub fn factorial(n: u64) -> BigInt {
    (1..=n).fold(BigInt::one(), |acc, i| acc * i)
}

pub fn binomial(n: u64, k: u64) -> BigInt {
    if k > n {
        return BigInt::zero();
    }
    let k = k.min(n - k);
    (0..k).fold(BigInt::one(), |acc, i| acc * (n - i) / (i + 1))
}

/// `nu_2(C(2n, n)) = s_2(n)`.
pub fn central_binomial_valuation(n: u64) -> u64 {
    let s = n.count_ones() as u64;
    debug_assert!(
        n > 64 || valuation(&binomial(2 * n, n), Prime(2)) == Valuation::Finite(s as u32),
        "central binomial valuation mismatch at n={n}"
    );
    s
}

pub fn is_power_of(mut n: u64, p: Prime) -> bool {
    if n == 0 {
        return false;
    }
    while n.is_multiple_of(p.get()) {
        n /= p.get();
    }
    n == 1
}

/// Stirling numbers of the second kind `S(n, k)` for `n <= n_max`,
/// `k <= k_max`, filled by `S(n,k) = S(n-1,k-1) + k S(n-1,k)`.
#[derive(Debug, Clone)]
pub struct StirlingTable {
    n_max: usize,
    k_max: usize,
    rows: Vec<Vec<BigInt>>,
}

impl StirlingTable {
    pub fn new(n_max: usize, k_max: usize) -> Self {
        let mut rows: Vec<Vec<BigInt>> = Vec::with_capacity(n_max + 1);
        let mut row = vec![BigInt::zero(); k_max + 1];
        row[0] = BigInt::one();
        rows.push(row);
        for n in 1..=n_max {
            let prev = &rows[n - 1];
            let mut row = vec![BigInt::zero(); k_max + 1];
            for k in 1..=k_max.min(n) {
                row[k] = &prev[k - 1] + &prev[k] * k;
            }
            rows.push(row);
        }
        StirlingTable { n_max, k_max, rows }
    }

    pub fn n_max(&self) -> usize {
        self.n_max
    }

    pub fn k_max(&self) -> usize {
        self.k_max
    }

    /// `S(n, k)`; zero outside the stored range's triangle.
    pub fn get(&self, n: usize, k: usize) -> BigInt {
        if n > self.n_max || k > self.k_max {
            panic!(
                "S({n},{k}) outside table bounds ({}, {})",
                self.n_max, self.k_max
            );
        }
        self.rows[n][k].clone()
    }
}

/// `S(n, k)` by the recurrence, keeping a single row of `k + 1` entries.
pub fn stirling(n: u64, k: u64) -> BigInt {
    stirling_column(n, k).pop().unwrap_or_else(BigInt::zero)
}

/// `S(0, k), S(1, k), ..., S(n_max, k)`.
pub fn stirling_column(n_max: u64, k: u64) -> Vec<BigInt> {
    let k = k as usize;
    let mut row = vec![BigInt::zero(); k + 1];
    row[0] = BigInt::one();
    let mut out = Vec::with_capacity(n_max as usize + 1);
    out.push(row[k].clone());
    for n in 1..=n_max as usize {
        for j in (1..=k.min(n)).rev() {
            let next = &row[j - 1] + &row[j] * j;
            row[j] = next;
        }
        row[0] = BigInt::zero();
        out.push(row[k].clone());
    }
    out
}

/// `S(n, k) = (1/k!) sum_{i=0}^{k} (-1)^i C(k, i) (k - i)^n`.
pub fn stirling_explicit(n: u64, k: u64) -> BigInt {
    let mut sum = BigInt::zero();
    for i in 0..=k {
        let term = binomial(k, i) * num_traits::pow(BigInt::from(k - i), n as usize);
        if i % 2 == 0 {
            sum += term;
        } else {
            sum -= term;
        }
    }
    sum / factorial(k)
}

/// Closed forms of `nu_2(S(n, k))` for `1 <= k <= 4`.
pub fn stirling_valuation_closed(n: u64, k: u64) -> Result<u64> {
    if !(1..=4).contains(&k) {
        return Err(Error::OutOfRange(format!(
            "no closed form for nu_2(S(n,{k})); k must be in 1..=4"
        )));
    }
    if n < k {
        return Err(Error::OutOfRange(format!("n={n} must be at least k={k}")));
    }
    Ok(match k {
        3 => u64::from(n.is_multiple_of(2)),
        4 => u64::from(n % 2 == 1),
        _ => 0,
    })
}
