//! Exact coefficient fields, polynomials and dense linear algebra.

mod binary;
mod extension;
mod funcfield;
mod matrix;
mod poly;
mod prime;
mod rational;

pub use binary::BinaryForm;
pub use extension::ExtensionField;
pub use funcfield::{FunctionField, RatFunc};
pub use matrix::Matrix;
pub use poly::{Poly, PolyRing, RootReport, SquarefreeReport};
pub use prime::PrimeField;
pub use rational::Rationals;

use std::fmt;
use std::hash::Hash;

use num_bigint::BigInt;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// An exact field, in "context" style: the field value carries the runtime
/// parameters (modulus, extension polynomial, ...) and elements are plain data.
pub trait Field: Clone + PartialEq + fmt::Debug + Send + Sync + 'static {
    type Elem: Clone + PartialEq + Eq + Hash + fmt::Debug + Send + Sync + 'static;

    fn descriptor(&self) -> FieldContext;
    fn characteristic(&self) -> u64;
    /// Number of elements for finite fields.
    fn order(&self) -> Option<u64> {
        None
    }

    fn zero(&self) -> Self::Elem;
    fn one(&self) -> Self::Elem;
    fn from_int(&self, n: i64) -> Self::Elem;
    fn from_bigint(&self, n: &BigInt) -> Self::Elem;

    fn add(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn sub(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn neg(&self, a: &Self::Elem) -> Self::Elem;
    fn mul(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn inv(&self, a: &Self::Elem) -> Option<Self::Elem>;

    fn is_zero(&self, a: &Self::Elem) -> bool {
        *a == self.zero()
    }
    fn is_one(&self, a: &Self::Elem) -> bool {
        *a == self.one()
    }
    fn div(&self, a: &Self::Elem, b: &Self::Elem) -> Option<Self::Elem> {
        self.inv(b).map(|bi| self.mul(a, &bi))
    }
    fn pow(&self, a: &Self::Elem, mut e: u64) -> Self::Elem {
        let mut base = a.clone();
        let mut acc = self.one();
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(&acc, &base);
            }
            base = self.mul(&base, &base);
            e >>= 1;
        }
        acc
    }

    /// Canonical representative of the square class `a·(k^×)²`; zero maps to zero.
    fn square_class(&self, a: &Self::Elem) -> Self::Elem;
    fn is_square(&self, a: &Self::Elem) -> bool {
        self.is_zero(a) || self.is_one(&self.square_class(a))
    }
    fn sqrt(&self, a: &Self::Elem) -> Option<Self::Elem>;
    /// Inverse Frobenius, for perfect fields of positive characteristic.
    fn pth_root(&self, _a: &Self::Elem) -> Option<Self::Elem> {
        None
    }

    /// All elements of a finite field, zero first, then one, in a fixed order.
    fn elements(&self) -> Option<Vec<Self::Elem>> {
        None
    }
    /// Coefficient pool for bounded searches: every element of a finite
    /// field, small integers otherwise.
    fn search_pool(&self) -> Vec<Self::Elem> {
        self.elements()
            .unwrap_or_else(|| (-1..=1).map(|n| self.from_int(n)).collect())
    }
    /// Roots in this field of a polynomial (coefficients lowest first), when
    /// the field supports root finding.
    fn roots(&self, _coeffs: &[Self::Elem]) -> Option<Vec<Self::Elem>> {
        None
    }

    /// The element as a rational number, for fields of characteristic 0
    /// whose elements are plain rationals.
    fn as_rational(&self, _a: &Self::Elem) -> Option<num_rational::BigRational> {
        None
    }

    /// Named generator used in literals (the function-field variable or the
    /// extension generator).
    fn generator(&self) -> Option<(String, Self::Elem)> {
        None
    }
    fn format(&self, a: &Self::Elem) -> String;
    fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Self::Elem;

    fn sum<'a, I: IntoIterator<Item = &'a Self::Elem>>(&self, it: I) -> Self::Elem {
        it.into_iter().fold(self.zero(), |acc, x| self.add(&acc, x))
    }
    fn dot(&self, a: &[Self::Elem], b: &[Self::Elem]) -> Self::Elem {
        let mut acc = self.zero();
        for (x, y) in a.iter().zip(b) {
            if !self.is_zero(x) && !self.is_zero(y) {
                acc = self.add(&acc, &self.mul(x, y));
            }
        }
        acc
    }
}

/// Serializable description of a coefficient field.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum FieldContext {
    Rationals,
    PrimeField { p: u64 },
    Extension { p: u64, degree: usize },
    FunctionField { base: Box<FieldContext>, var: String },
}

impl FieldContext {
    pub fn characteristic(&self) -> u64 {
        match self {
            FieldContext::Rationals => 0,
            FieldContext::PrimeField { p } | FieldContext::Extension { p, .. } => *p,
            FieldContext::FunctionField { base, .. } => base.characteristic(),
        }
    }

    pub fn depth(&self) -> usize {
        match self {
            FieldContext::FunctionField { base, .. } => 1 + base.depth(),
            _ => 1,
        }
    }

    /// Parse `Q`, `Fp:5`, `F5`, `F5^2`, `Q(t)`, `Fp:5(t)`.
    pub fn parse(s: &str) -> Result<Self> {
        let s = s.trim();
        let err = |msg: &str| Error::Parse {
            pos: 0,
            msg: format!("{msg}: `{s}`"),
        };
        if let Some(open) = s.rfind('(') {
            if !s.ends_with(')') {
                return Err(err("unterminated function-field variable"));
            }
            let var = s[open + 1..s.len() - 1].trim().to_string();
            if var.is_empty() || !var.chars().all(|c| c.is_ascii_alphabetic()) {
                return Err(err("function-field variable must be alphabetic"));
            }
            let base = Self::parse(&s[..open])?;
            if base.depth() >= 2 {
                return Err(Error::TowerTooDeep);
            }
            return Ok(FieldContext::FunctionField {
                base: Box::new(base),
                var,
            });
        }
        if s == "Q" || s == "QQ" {
            return Ok(FieldContext::Rationals);
        }
        let rest = s
            .strip_prefix("Fp:")
            .or_else(|| s.strip_prefix("GF"))
            .or_else(|| s.strip_prefix('F'))
            .ok_or_else(|| err("unknown field"))?;
        let (p, degree) = match rest.split_once('^') {
            Some((p, e)) => (p, e.parse::<usize>().map_err(|_| err("bad degree"))?),
            None => (rest, 1),
        };
        let p: u64 = p.trim().parse().map_err(|_| err("bad modulus"))?;
        if !prime::is_small_prime(p) {
            return Err(Error::NotPrime(p));
        }
        Ok(if degree == 1 {
            FieldContext::PrimeField { p }
        } else {
            FieldContext::Extension { p, degree }
        })
    }
}

impl fmt::Display for FieldContext {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FieldContext::Rationals => write!(f, "Q"),
            FieldContext::PrimeField { p } => write!(f, "Fp:{p}"),
            FieldContext::Extension { p, degree } => write!(f, "F{p}^{degree}"),
            FieldContext::FunctionField { base, var } => write!(f, "{base}({var})"),
        }
    }
}

/// Convenience: `vec![k.from_int(a), ...]`.
pub fn ints<K: Field>(k: &K, xs: &[i64]) -> Vec<K::Elem> {
    xs.iter().map(|&x| k.from_int(x)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn descriptor_parsing() {
        assert_eq!(FieldContext::parse("Q").unwrap(), FieldContext::Rationals);
        assert_eq!(
            FieldContext::parse("Fp:5").unwrap(),
            FieldContext::PrimeField { p: 5 }
        );
        assert_eq!(
            FieldContext::parse("F5^2").unwrap(),
            FieldContext::Extension { p: 5, degree: 2 }
        );
        let ff = FieldContext::parse("Fp:3(t)").unwrap();
        assert_eq!(ff.depth(), 2);
        assert_eq!(ff.to_string(), "Fp:3(t)");
        assert!(matches!(FieldContext::parse("Fp:6"), Err(Error::NotPrime(6))));
        assert!(matches!(
            FieldContext::parse("Q(t)(s)"),
            Err(Error::TowerTooDeep)
        ));
    }
}
