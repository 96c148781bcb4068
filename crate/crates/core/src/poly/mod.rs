//! Sparse integer polynomials in the variables `x` and `y`.

mod parse;

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::scalar::Scalar;

pub use parse::parse;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Var {
    X,
    Y,
}

/// Exponent pair `x^l * y^m`.
///
/// Ordered graded-lexicographically with `x` before `y`, so iterating a
/// term map in reverse yields the canonical rendering order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Monomial {
    pub x: u32,
    pub y: u32,
}

impl Monomial {
    pub const ONE: Monomial = Monomial { x: 0, y: 0 };

    pub fn new(x: u32, y: u32) -> Self {
        Monomial { x, y }
    }

    pub fn total(&self) -> u32 {
        self.x + self.y
    }
}

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        self.total().cmp(&other.total()).then(self.x.cmp(&other.x))
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Total degree; the zero polynomial has degree minus infinity.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Degree {
    MinusInfinity,
    Finite(u32),
}

/// Polynomial with integer coefficients in canonical sparse form: no
/// stored coefficient is zero, so the zero polynomial is the empty map.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Polynomial<T> {
    terms: BTreeMap<Monomial, T>,
}

impl<T: Scalar> Default for Polynomial<T> {
    fn default() -> Self {
        Self::zero()
    }
}

impl<T: Scalar> Polynomial<T> {
    pub fn zero() -> Self {
        Polynomial {
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(c: T) -> Self {
        Self::monomial(c, 0, 0)
    }

    pub fn x() -> Self {
        Self::monomial(T::one(), 1, 0)
    }

    pub fn y() -> Self {
        Self::monomial(T::one(), 0, 1)
    }

    pub fn var(v: Var) -> Self {
        match v {
            Var::X => Self::x(),
            Var::Y => Self::y(),
        }
    }

    pub fn monomial(c: T, x: u32, y: u32) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(Monomial::new(x, y), c);
        }
        Polynomial { terms }
    }

    /// Builds a polynomial from `(x exponent, y exponent, coefficient)`
    /// triples, summing repeated exponents and dropping zeros.
    pub fn from_terms<I>(terms: I) -> Result<Self>
    where
        I: IntoIterator<Item = (u32, u32, T)>,
    {
        let mut out = Self::zero();
        for (x, y, c) in terms {
            out.add_term(Monomial::new(x, y), c)?;
        }
        Ok(out)
    }

    fn add_term(&mut self, m: Monomial, c: T) -> Result<()> {
        if c.is_zero() {
            return Ok(());
        }
        let sum = match self.terms.get(&m) {
            Some(old) => old.add_checked(&c)?,
            None => c,
        };
        if sum.is_zero() {
            self.terms.remove(&m);
        } else {
            self.terms.insert(m, sum);
        }
        Ok(())
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Terms in ascending graded-lex order.
    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (Monomial, &T)> + '_ {
        self.terms.iter().map(|(m, c)| (*m, c))
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn coeff(&self, x: u32, y: u32) -> T {
        self.terms
            .get(&Monomial::new(x, y))
            .cloned()
            .unwrap_or_else(T::zero)
    }

    pub fn total_degree(&self) -> Degree {
        self.terms
            .keys()
            .map(Monomial::total)
            .max()
            .map_or(Degree::MinusInfinity, Degree::Finite)
    }

    /// Degree in a single variable; 0 for the zero polynomial.
    pub fn degree_in(&self, v: Var) -> u32 {
        self.terms
            .keys()
            .map(|m| match v {
                Var::X => m.x,
                Var::Y => m.y,
            })
            .max()
            .unwrap_or(0)
    }

    pub fn depends_on(&self, v: Var) -> bool {
        self.degree_in(v) > 0
    }

    /// 2 if `y` occurs, else 1.
    pub fn natural_arity(&self) -> usize {
        if self.depends_on(Var::Y) {
            2
        } else {
            1
        }
    }

    pub fn try_neg(&self) -> Result<Self> {
        let zero = T::zero();
        let terms = self
            .terms
            .iter()
            .map(|(m, c)| Ok((*m, zero.sub_checked(c)?)))
            .collect::<Result<_>>()?;
        Ok(Polynomial { terms })
    }

    pub fn try_add(&self, other: &Self) -> Result<Self> {
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(*m, c.clone())?;
        }
        Ok(out)
    }

    pub fn try_sub(&self, other: &Self) -> Result<Self> {
        self.try_add(&other.try_neg()?)
    }

    pub fn try_mul(&self, other: &Self) -> Result<Self> {
        let mut out = Self::zero();
        for (ma, ca) in &self.terms {
            for (mb, cb) in &other.terms {
                let m = Monomial::new(
                    ma.x.checked_add(mb.x).ok_or(Error::Overflow)?,
                    ma.y.checked_add(mb.y).ok_or(Error::Overflow)?,
                );
                out.add_term(m, ca.mul_checked(cb)?)?;
            }
        }
        Ok(out)
    }

    pub fn try_scale(&self, k: &T) -> Result<Self> {
        if k.is_zero() {
            return Ok(Self::zero());
        }
        let terms = self
            .terms
            .iter()
            .map(|(m, c)| Ok((*m, c.mul_checked(k)?)))
            .collect::<Result<_>>()?;
        Ok(Polynomial { terms })
    }

    pub fn try_pow(&self, mut exp: u32) -> Result<Self> {
        let mut base = self.clone();
        let mut acc = Self::constant(T::one());
        while exp > 0 {
            if exp & 1 == 1 {
                acc = acc.try_mul(&base)?;
            }
            exp >>= 1;
            if exp > 0 {
                base = base.try_mul(&base)?;
            }
        }
        Ok(acc)
    }

    /// Exact value at `(x, y)`. Univariate polynomials ignore `y`.
    pub fn evaluate(&self, x: &T, y: &T) -> Result<T> {
        let mut acc = T::zero();
        for (m, c) in &self.terms {
            let mut t = c.clone();
            if m.x > 0 {
                t = t.mul_checked(&x.pow_checked(m.x)?)?;
            }
            if m.y > 0 {
                t = t.mul_checked(&y.pow_checked(m.y)?)?;
            }
            acc = acc.add_checked(&t)?;
        }
        Ok(acc)
    }

    /// Value at a point given as a slice of one or two coordinates.
    pub fn evaluate_at(&self, point: &[T]) -> Result<T> {
        let zero = T::zero();
        let x = point.first().unwrap_or(&zero);
        let y = point.get(1).unwrap_or(&zero);
        self.evaluate(x, y)
    }

    /// Formal partial derivative.
    pub fn partial_derivative(&self, v: Var) -> Result<Self> {
        let mut out = Self::zero();
        for (m, c) in &self.terms {
            let (e, dm) = match v {
                Var::X if m.x > 0 => (m.x, Monomial::new(m.x - 1, m.y)),
                Var::Y if m.y > 0 => (m.y, Monomial::new(m.x, m.y - 1)),
                _ => continue,
            };
            out.add_term(dm, c.mul_checked(&T::from_u64_exact(e as u64)?)?)?;
        }
        Ok(out)
    }

    /// Re-expresses the coefficients in another scalar type.
    pub fn convert<U: Scalar>(&self) -> Result<Polynomial<U>> {
        let terms = self
            .terms
            .iter()
            .map(|(m, c)| Ok((*m, U::from_bigint(&c.to_bigint())?)))
            .collect::<Result<_>>()?;
        Ok(Polynomial { terms })
    }
}

/// Dense nested Horner form of a polynomial, for repeated evaluation.
#[derive(Debug, Clone)]
pub struct Horner<T> {
    /// `rows[i][j]` is the coefficient of `x^i y^j`.
    rows: Vec<Vec<T>>,
}

impl<T: Scalar> Horner<T> {
    pub fn new(f: &Polynomial<T>) -> Self {
        let dx = if f.is_zero() {
            0
        } else {
            f.degree_in(Var::X) as usize + 1
        };
        let mut rows: Vec<Vec<T>> = vec![Vec::new(); dx];
        for (m, c) in &f.terms {
            let row = &mut rows[m.x as usize];
            if row.len() <= m.y as usize {
                row.resize(m.y as usize + 1, T::zero());
            }
            row[m.y as usize] = c.clone();
        }
        Horner { rows }
    }

    pub fn evaluate(&self, x: &T, y: &T) -> Result<T> {
        let mut acc = T::zero();
        for row in self.rows.iter().rev() {
            let mut inner = T::zero();
            for c in row.iter().rev() {
                inner = inner.mul_checked(y)?.add_checked(c)?;
            }
            acc = acc.mul_checked(x)?.add_checked(&inner)?;
        }
        Ok(acc)
    }

    pub fn evaluate_at(&self, point: &[T]) -> Result<T> {
        let zero = T::zero();
        let x = point.first().unwrap_or(&zero);
        let y = point.get(1).unwrap_or(&zero);
        self.evaluate(x, y)
    }
}

impl<T: Scalar> FromStr for Polynomial<T> {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        parse(s)
    }
}

/// Canonical text: graded-lex order, explicit `*` and `^`.
impl<T: Scalar> fmt::Display for Polynomial<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        for (i, (m, c)) in self.terms.iter().rev().enumerate() {
            let negative = c.is_negative();
            match (i, negative) {
                (0, true) => f.write_str("-")?,
                (0, false) => {}
                (_, true) => f.write_str(" - ")?,
                (_, false) => f.write_str(" + ")?,
            }
            let mag = c.abs();
            let mut factors = Vec::new();
            if !mag.is_one() || *m == Monomial::ONE {
                factors.push(mag.to_string());
            }
            for (name, e) in [("x", m.x), ("y", m.y)] {
                match e {
                    0 => {}
                    1 => factors.push(name.to_string()),
                    _ => factors.push(format!("{name}^{e}")),
                }
            }
            f.write_str(&factors.join("*"))?;
        }
        Ok(())
    }
}

macro_rules! panicking_op {
    ($tr:ident, $method:ident, $try:ident) => {
        impl<T: Scalar> $tr for &Polynomial<T> {
            type Output = Polynomial<T>;

            fn $method(self, rhs: Self) -> Polynomial<T> {
                self.$try(rhs).expect("polynomial coefficient overflow")
            }
        }

        impl<T: Scalar> $tr for Polynomial<T> {
            type Output = Polynomial<T>;

            fn $method(self, rhs: Self) -> Polynomial<T> {
                (&self).$method(&rhs)
            }
        }
    };
}

panicking_op!(Add, add, try_add);
panicking_op!(Sub, sub, try_sub);
panicking_op!(Mul, mul, try_mul);

impl<T: Scalar> Neg for &Polynomial<T> {
    type Output = Polynomial<T>;

    fn neg(self) -> Polynomial<T> {
        self.try_neg().expect("polynomial coefficient overflow")
    }
}

#[cfg(test)]
mod tests {
    #[test]
    fn horner_matches_term_evaluation() {
        let f: Polynomial<i64> = "3*x^3*y - x^2 + 5*x*y^2 - 7*y^3 + 2".parse().unwrap();
        let h = Horner::new(&f);
        for x in -4..=4 {
            for y in -4..=4 {
                assert_eq!(h.evaluate(&x, &y).unwrap(), f.evaluate(&x, &y).unwrap());
            }
        }
        let zero: Polynomial<i64> = Polynomial::zero();
        assert_eq!(Horner::new(&zero).evaluate(&3, &4).unwrap(), 0);
    }
    use super::*;
    use crate::Poly;
    use num_bigint::BigInt;

    fn p(s: &str) -> Poly {
        s.parse().unwrap()
    }

    fn big(v: i64) -> BigInt {
        BigInt::from(v)
    }

    #[test]
    fn example_polynomials_parse_to_expected_terms() {
        let f = p("x^2 + 5");
        assert_eq!(f.num_terms(), 2);
        assert_eq!(f.coeff(2, 0), big(1));
        assert_eq!(f.coeff(0, 0), big(5));

        let g = p("x^2 + y^2 + x*y + x + y + 1");
        assert_eq!(g.num_terms(), 6);
        for (l, m) in [(2, 0), (0, 2), (1, 1), (1, 0), (0, 1), (0, 0)] {
            assert_eq!(g.coeff(l, m), big(1));
        }
        assert!(p("0").is_zero());
        assert_eq!(
            p("(x - 1)*(x + 1)"),
            Poly::from_terms([(2, 0, big(1)), (0, 0, big(-1))]).unwrap()
        );
    }

    #[test]
    fn evaluation_examples() {
        let one = big(1);
        assert_eq!(p("x^2 + 5").evaluate(&one, &big(0)).unwrap(), big(6));
        assert_eq!(
            p("x^2 + y^2 + x*y + x + y + 1")
                .evaluate(&one, &one)
                .unwrap(),
            big(6)
        );
        assert_eq!(p("0").evaluate(&big(7), &big(9)).unwrap(), big(0));
    }

    #[test]
    fn derivatives() {
        assert_eq!(
            p("x^2 + x*y").partial_derivative(Var::X).unwrap(),
            p("2*x + y")
        );
        assert!(p("x^2 + 5").partial_derivative(Var::Y).unwrap().is_zero());
        assert_eq!(
            p("x^3*y^2 - 4*y").partial_derivative(Var::Y).unwrap(),
            p("2*x^3*y - 4")
        );
    }

    #[test]
    fn degrees() {
        assert_eq!(
            p("x^2 + y^2 + x*y + x + y + 1").total_degree(),
            Degree::Finite(2)
        );
        assert_eq!(p("0").total_degree(), Degree::MinusInfinity);
        assert_eq!(p("x*y^2 + 7").total_degree(), Degree::Finite(3));
        assert!(Degree::MinusInfinity < Degree::Finite(0));
        assert_eq!(p("x*y^2 + 7").degree_in(Var::Y), 2);
    }

    #[test]
    fn rendering_is_graded_lex() {
        assert_eq!(
            p("1 + y + x + x*y + y^2 + x^2").to_string(),
            "x^2 + x*y + y^2 + x + y + 1"
        );
        assert_eq!(p("-x^3 + 2*x*y^2 - 7").to_string(), "-x^3 + 2*x*y^2 - 7");
        assert_eq!(p("-1").to_string(), "-1");
        assert_eq!(p("y - y").to_string(), "0");
    }

    #[test]
    fn fixed_width_overflow_surfaces() {
        let f: Polynomial<i64> = "x^40".parse().unwrap();
        assert_eq!(f.evaluate(&3, &0), Err(Error::Overflow));
        assert!("(x + 3)^50".parse::<Polynomial<i64>>().is_err());
        assert!("(x + 3)^50".parse::<Poly>().is_ok());
    }
}
