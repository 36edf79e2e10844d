//! Sparse multivariate polynomials over the rationals and their fraction field.
//!
//! Monomials are exponent vectors with trailing zeros trimmed; comparing the
//! trimmed vectors lexicographically is the lex monomial order with
//! `u1 > u2 > ...`, so the leading term of a polynomial is its last map entry.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};



use super::scalar::{Field, Scalar};

type Monomial = Vec<u32>;

fn trim(mut m: Monomial) -> Monomial {
    while m.last() == Some(&0) {
        m.pop();
    }
    m
}

fn mono_mul(a: &[u32], b: &[u32]) -> Monomial {
    let n = a.len().max(b.len());
    (0..n)
        .map(|i| a.get(i).copied().unwrap_or(0) + b.get(i).copied().unwrap_or(0))
        .collect()
}

/// `a / b` if `b` divides `a`.
fn mono_div(a: &[u32], b: &[u32]) -> Option<Monomial> {
    if b.len() > a.len() {
        return None;
    }
    let mut out = Vec::with_capacity(a.len());
    for (i, &e) in a.iter().enumerate() {
        let d = b.get(i).copied().unwrap_or(0);
        if d > e {
            return None;
        }
        out.push(e - d);
    }
    Some(trim(out))
}

fn mono_gcd(a: &[u32], b: &[u32]) -> Monomial {
    trim(a.iter().zip(b).map(|(x, y)| *x.min(y)).collect())
}

/// Polynomial in the indeterminates `u1, u2, ...` with rational coefficients.
#[derive(Clone, PartialEq, Eq, Default)]
pub struct Poly {
    terms: BTreeMap<Monomial, Scalar>,
}

impl Poly {
    pub fn zero() -> Self {
        Poly::default()
    }

    pub fn constant(c: Scalar) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(Vec::new(), c);
        }
        Poly { terms }
    }

    /// The indeterminate `u_{index+1}` (zero-based index).
    pub fn var(index: usize) -> Self {
        let mut m = vec![0; index + 1];
        m[index] = 1;
        let mut terms = BTreeMap::new();
        terms.insert(m, Scalar::one());
        Poly { terms }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_constant(&self) -> bool {
        self.terms.keys().all(|m| m.is_empty())
    }

    pub fn constant_term(&self) -> Scalar {
        self.terms.get(&Vec::new()).cloned().unwrap_or_else(Scalar::zero)
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn total_degree(&self) -> u32 {
        self.terms.keys().map(|m| m.iter().sum()).max().unwrap_or(0)
    }

    fn leading(&self) -> Option<(&Monomial, &Scalar)> {
        self.terms.iter().next_back()
    }

    pub fn leading_coefficient(&self) -> Scalar {
        self.leading().map(|(_, c)| c.clone()).unwrap_or_else(Scalar::zero)
    }

    fn add_term(&mut self, m: Monomial, c: Scalar) {
        if c.is_zero() {
            return;
        }
        match self.terms.get_mut(&m) {
            Some(existing) => {
                let sum = existing.clone() + c;
                if sum.is_zero() {
                    self.terms.remove(&m);
                } else {
                    *existing = sum;
                }
            }
            None => {
                self.terms.insert(m, c);
            }
        }
    }

    pub fn scale(&self, c: &Scalar) -> Poly {
        if c.is_zero() {
            return Poly::zero();
        }
        Poly {
            terms: self
                .terms
                .iter()
                .map(|(m, a)| (m.clone(), a.clone() * c.clone()))
                .collect(),
        }
    }

    fn add_ref(&self, other: &Poly) -> Poly {
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), c.clone());
        }
        out
    }

    fn neg_ref(&self) -> Poly {
        self.scale(&-Scalar::one())
    }

    fn mul_ref(&self, other: &Poly) -> Poly {
        let mut out = Poly::zero();
        for (ma, ca) in &self.terms {
            for (mb, cb) in &other.terms {
                out.add_term(mono_mul(ma, mb), ca.clone() * cb.clone());
            }
        }
        out
    }

    fn mul_term(&self, m: &[u32], c: &Scalar) -> Poly {
        Poly {
            terms: self
                .terms
                .iter()
                .map(|(k, a)| (mono_mul(k, m), a.clone() * c.clone()))
                .collect(),
        }
    }

    /// Exact quotient `self / divisor`, or `None` when the division leaves a remainder.
    pub fn div_exact(&self, divisor: &Poly) -> Option<Poly> {
        let (lm, lc) = divisor.leading()?;
        let mut rem = self.clone();
        let mut quot = Poly::zero();
        while let Some((rm, rc)) = rem.leading() {
            let m = mono_div(rm, lm)?;
            let c = rc.clone() / lc.clone();
            rem = rem.add_ref(&divisor.mul_term(&m, &-c.clone()));
            quot.add_term(m, c);
        }
        Some(quot)
    }

    /// Largest monomial dividing every term.
    fn monomial_content(&self) -> Monomial {
        let mut iter = self.terms.keys();
        let Some(first) = iter.next() else {
            return Vec::new();
        };
        iter.fold(first.clone(), |acc, m| mono_gcd(&acc, m))
    }

    fn div_monomial(&self, m: &[u32]) -> Poly {
        Poly {
            terms: self
                .terms
                .iter()
                .map(|(k, c)| (mono_div(k, m).expect("monomial content divides"), c.clone()))
                .collect(),
        }
    }

    /// Evaluates at `point` (missing coordinates read as zero).
    pub fn evaluate(&self, point: &[Scalar]) -> Scalar {
        let mut acc = Scalar::zero();
        for (m, c) in &self.terms {
            let mut term = c.clone();
            for (i, &e) in m.iter().enumerate() {
                if e > 0 {
                    let x = point.get(i).cloned().unwrap_or_else(Scalar::zero);
                    term = term * x.pow(e);
                }
            }
            acc = acc + term;
        }
        acc
    }
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (k, (m, c)) in self.terms.iter().rev().enumerate() {
            let (sign, mag) = if c.is_negative() {
                ("-", c.abs())
            } else {
                ("+", c.clone())
            };
            if k == 0 {
                if sign == "-" {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {sign} ")?;
            }
            let vars: Vec<String> = m
                .iter()
                .enumerate()
                .filter(|(_, &e)| e > 0)
                .map(|(i, &e)| {
                    if e == 1 {
                        format!("u{}", i + 1)
                    } else {
                        format!("u{}^{}", i + 1, e)
                    }
                })
                .collect();
            if vars.is_empty() {
                write!(f, "{mag}")?;
            } else if mag.is_one() {
                write!(f, "{}", vars.join("*"))?;
            } else {
                write!(f, "{}*{}", mag, vars.join("*"))?;
            }
        }
        Ok(())
    }
}

impl fmt::Debug for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// Element of the fraction field `Q(u1, ..., um)`.
///
/// Kept as `num / den` with `den` monic in the lex order and the common
/// monomial factor removed. Exact quotients are detected and collapsed, which
/// is what keeps fraction-free elimination on polynomial entries.
#[derive(Clone)]
pub struct SymScalar {
    num: Poly,
    den: Poly,
}

impl SymScalar {
    pub fn from_poly(p: Poly) -> Self {
        SymScalar {
            num: p,
            den: Poly::constant(Scalar::one()),
        }
    }

    /// The generic dual coordinate `u_{index+1}`.
    pub fn var(index: usize) -> Self {
        SymScalar::from_poly(Poly::var(index))
    }

    pub fn new(num: Poly, den: Poly) -> Self {
        assert!(!den.is_zero(), "rational function with zero denominator");
        Self::normalized(num, den)
    }

    pub fn numer(&self) -> &Poly {
        &self.num
    }

    pub fn denom(&self) -> &Poly {
        &self.den
    }

    pub fn is_polynomial(&self) -> bool {
        self.den.is_constant()
    }

    fn normalized(num: Poly, den: Poly) -> Self {
        if num.is_zero() {
            return SymScalar::from_poly(Poly::zero());
        }
        if den.is_constant() {
            let c = den.constant_term();
            return SymScalar::from_poly(num.scale(&c.recip()));
        }
        if let Some(q) = num.div_exact(&den) {
            return SymScalar::from_poly(q);
        }
        let (num, den) = match den.div_exact(&num) {
            Some(q) => (Poly::constant(Scalar::one()), q),
            None => {
                let g = mono_gcd(&num.monomial_content(), &den.monomial_content());
                (num.div_monomial(&g), den.div_monomial(&g))
            }
        };
        let lc = den.leading_coefficient().recip();
        SymScalar {
            num: num.scale(&lc),
            den: den.scale(&lc),
        }
    }

    /// Value at a rational point, `None` where the denominator vanishes.
    pub fn evaluate(&self, point: &[Scalar]) -> Option<Scalar> {
        let d = self.den.evaluate(point);
        if d.is_zero() {
            None
        } else {
            Some(self.num.evaluate(point) / d)
        }
    }
}

impl Field for SymScalar {
    fn zero() -> Self {
        SymScalar::from_poly(Poly::zero())
    }

    fn one() -> Self {
        SymScalar::from_poly(Poly::constant(Scalar::one()))
    }

    fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    fn from_scalar(q: &Scalar) -> Self {
        SymScalar::from_poly(Poly::constant(q.clone()))
    }
}

impl PartialEq for SymScalar {
    fn eq(&self, other: &Self) -> bool {
        self.num.mul_ref(&other.den) == other.num.mul_ref(&self.den)
    }
}

impl Add for SymScalar {
    type Output = SymScalar;
    fn add(self, rhs: SymScalar) -> SymScalar {
        if self.den == rhs.den {
            return SymScalar::normalized(self.num.add_ref(&rhs.num), self.den);
        }
        let num = self.num.mul_ref(&rhs.den).add_ref(&rhs.num.mul_ref(&self.den));
        SymScalar::normalized(num, self.den.mul_ref(&rhs.den))
    }
}

impl Sub for SymScalar {
    type Output = SymScalar;
    fn sub(self, rhs: SymScalar) -> SymScalar {
        self + (-rhs)
    }
}

impl Mul for SymScalar {
    type Output = SymScalar;
    fn mul(self, rhs: SymScalar) -> SymScalar {
        if self.is_zero() || rhs.is_zero() {
            return SymScalar::zero();
        }
        SymScalar::normalized(self.num.mul_ref(&rhs.num), self.den.mul_ref(&rhs.den))
    }
}

impl Div for SymScalar {
    type Output = SymScalar;
    fn div(self, rhs: SymScalar) -> SymScalar {
        assert!(!rhs.is_zero(), "division by zero rational function");
        SymScalar::normalized(self.num.mul_ref(&rhs.den), self.den.mul_ref(&rhs.num))
    }
}

impl Neg for SymScalar {
    type Output = SymScalar;
    fn neg(self) -> SymScalar {
        SymScalar {
            num: self.num.neg_ref(),
            den: self.den,
        }
    }
}

impl fmt::Display for SymScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den.is_constant() && self.den.constant_term().is_one() {
            write!(f, "{}", self.num)
        } else {
            write!(f, "({}) / ({})", self.num, self.den)
        }
    }
}

impl fmt::Debug for SymScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn u(i: usize) -> SymScalar {
        SymScalar::var(i)
    }

    fn c(n: i64) -> SymScalar {
        SymScalar::from_scalar(&Scalar::from(n))
    }

    #[test]
    fn exact_division_collapses_to_polynomial() {
        // (u1^2 - u2^2) / (u1 - u2) = u1 + u2
        let num = u(0) * u(0) - u(1) * u(1);
        let q = num / (u(0) - u(1));
        assert!(q.is_polynomial());
        assert_eq!(q, u(0) + u(1));
    }

    #[test]
    fn non_exact_quotient_stays_fraction() {
        let q = (u(0) + c(1)) / (u(1) + c(2));
        assert!(!q.is_polynomial());
        assert_eq!(q.clone() * (u(1) + c(2)), u(0) + c(1));
    }

    #[test]
    fn cross_multiplied_equality() {
        let a = u(0) / u(1);
        let b = (u(0) * c(3)) / (u(1) * c(3));
        assert_eq!(a, b);
        assert_ne!(a, u(1) / u(0));
    }

    #[test]
    fn monomial_content_removed() {
        let q = (u(0) * u(1)) / (u(1) * u(1) + u(1) * u(2));
        assert_eq!(q.denom().total_degree(), 1);
        assert_eq!(q.numer().total_degree(), 1);
    }

    #[test]
    fn evaluate_matches_arithmetic() {
        let f = (u(0) * u(0) + c(3) * u(1)) / (u(2) - c(1));
        let pt = [Scalar::from(2), Scalar::new(1, 3), Scalar::from(5)];
        assert_eq!(f.evaluate(&pt), Some(Scalar::new(5, 4)));
        let bad = [Scalar::from(2), Scalar::from(1), Scalar::from(1)];
        assert_eq!(f.evaluate(&bad), None);
    }

    #[test]
    fn div_exact_detects_remainder() {
        let p = Poly::var(0).mul_ref(&Poly::var(0)).add_ref(&Poly::constant(Scalar::one()));
        assert!(p.div_exact(&Poly::var(0)).is_none());
        assert_eq!(Poly::zero().div_exact(&Poly::var(1)), Some(Poly::zero()));
    }

    #[test]
    fn display_is_readable() {
        let p = u(0) * u(0) * c(2) - u(1) + c(1);
        assert_eq!(p.to_string(), "2*u1^2 - u2 + 1");
    }
}
