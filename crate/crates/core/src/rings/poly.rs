//! Dense univariate polynomials over an exact field.

use super::Field;
use crate::error::{Error, Result};

/// Coefficients lowest degree first; no trailing zeros (the zero polynomial
/// has no coefficients and degree `None`).
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Poly<E> {
    coeffs: Vec<E>,
}

impl<E> Poly<E> {
    pub fn coeffs(&self) -> &[E] {
        &self.coeffs
    }
    pub fn into_coeffs(self) -> Vec<E> {
        self.coeffs
    }
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }
    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }
    pub fn lc(&self) -> Option<&E> {
        self.coeffs.last()
    }
}

/// Result of a squarefree test: the flag and `f / gcd(f, f')`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SquarefreeReport<E> {
    pub is_squarefree: bool,
    pub radical: Poly<E>,
}

/// Roots found by exhaustive evaluation, with multiplicities, and the
/// cofactor left after dividing them out.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RootReport<E> {
    pub roots: Vec<(E, usize)>,
    pub cofactor: Poly<E>,
}

/// Polynomial ring K[var].
#[derive(Debug, Clone, PartialEq)]
pub struct PolyRing<K: Field> {
    field: K,
    var: String,
}

impl<K: Field> PolyRing<K> {
    pub fn new(field: K, var: impl Into<String>) -> Self {
        PolyRing {
            field,
            var: var.into(),
        }
    }

    pub fn field(&self) -> &K {
        &self.field
    }
    pub fn var(&self) -> &str {
        &self.var
    }

    pub fn from_coeffs(&self, mut coeffs: Vec<K::Elem>) -> Poly<K::Elem> {
        while coeffs.last().is_some_and(|c| self.field.is_zero(c)) {
            coeffs.pop();
        }
        Poly { coeffs }
    }

    pub fn zero(&self) -> Poly<K::Elem> {
        Poly { coeffs: Vec::new() }
    }
    pub fn one(&self) -> Poly<K::Elem> {
        self.constant(self.field.one())
    }
    pub fn constant(&self, c: K::Elem) -> Poly<K::Elem> {
        self.from_coeffs(vec![c])
    }
    pub fn x(&self) -> Poly<K::Elem> {
        self.monomial(self.field.one(), 1)
    }
    pub fn monomial(&self, c: K::Elem, d: usize) -> Poly<K::Elem> {
        let mut v = vec![self.field.zero(); d + 1];
        v[d] = c;
        self.from_coeffs(v)
    }
    /// Monic linear factor `x - r`.
    pub fn linear(&self, r: &K::Elem) -> Poly<K::Elem> {
        self.from_coeffs(vec![self.field.neg(r), self.field.one()])
    }

    pub fn is_one(&self, a: &Poly<K::Elem>) -> bool {
        a.coeffs.len() == 1 && self.field.is_one(&a.coeffs[0])
    }
    pub fn is_constant(&self, a: &Poly<K::Elem>) -> bool {
        a.coeffs.len() <= 1
    }

    pub fn add(&self, a: &Poly<K::Elem>, b: &Poly<K::Elem>) -> Poly<K::Elem> {
        let k = &self.field;
        let n = a.coeffs.len().max(b.coeffs.len());
        let z = k.zero();
        let v = (0..n)
            .map(|i| {
                k.add(
                    a.coeffs.get(i).unwrap_or(&z),
                    b.coeffs.get(i).unwrap_or(&z),
                )
            })
            .collect();
        self.from_coeffs(v)
    }
    pub fn neg(&self, a: &Poly<K::Elem>) -> Poly<K::Elem> {
        Poly {
            coeffs: a.coeffs.iter().map(|c| self.field.neg(c)).collect(),
        }
    }
    pub fn sub(&self, a: &Poly<K::Elem>, b: &Poly<K::Elem>) -> Poly<K::Elem> {
        self.add(a, &self.neg(b))
    }
    pub fn scale(&self, a: &Poly<K::Elem>, c: &K::Elem) -> Poly<K::Elem> {
        self.from_coeffs(a.coeffs.iter().map(|x| self.field.mul(x, c)).collect())
    }
    pub fn mul(&self, a: &Poly<K::Elem>, b: &Poly<K::Elem>) -> Poly<K::Elem> {
        if a.is_zero() || b.is_zero() {
            return self.zero();
        }
        let k = &self.field;
        let mut v = vec![k.zero(); a.coeffs.len() + b.coeffs.len() - 1];
        for (i, x) in a.coeffs.iter().enumerate() {
            if k.is_zero(x) {
                continue;
            }
            for (j, y) in b.coeffs.iter().enumerate() {
                v[i + j] = k.add(&v[i + j], &k.mul(x, y));
            }
        }
        self.from_coeffs(v)
    }
    pub fn pow(&self, a: &Poly<K::Elem>, e: usize) -> Poly<K::Elem> {
        (0..e).fold(self.one(), |acc, _| self.mul(&acc, a))
    }

    /// Euclidean division; `None` when dividing by zero.
    pub fn divrem(
        &self,
        a: &Poly<K::Elem>,
        b: &Poly<K::Elem>,
    ) -> Option<(Poly<K::Elem>, Poly<K::Elem>)> {
        let k = &self.field;
        let db = b.degree()?;
        let inv_lc = k.inv(b.lc()?)?;
        let mut rem = a.coeffs.clone();
        if rem.len() <= db {
            return Some((self.zero(), a.clone()));
        }
        let mut quot = vec![k.zero(); rem.len() - db];
        for i in (db..rem.len()).rev() {
            let c = k.mul(&rem[i], &inv_lc);
            if k.is_zero(&c) {
                continue;
            }
            for (j, bj) in b.coeffs.iter().enumerate() {
                rem[i - db + j] = k.sub(&rem[i - db + j], &k.mul(&c, bj));
            }
            quot[i - db] = c;
        }
        rem.truncate(db);
        Some((self.from_coeffs(quot), self.from_coeffs(rem)))
    }

    pub fn rem(&self, a: &Poly<K::Elem>, b: &Poly<K::Elem>) -> Poly<K::Elem> {
        self.divrem(a, b).expect("division by zero polynomial").1
    }

    /// Quotient of an exact division. Panics if `b` does not divide `a`.
    pub fn exact_div(&self, a: &Poly<K::Elem>, b: &Poly<K::Elem>) -> Poly<K::Elem> {
        let (q, r) = self.divrem(a, b).expect("division by zero polynomial");
        assert!(r.is_zero(), "inexact polynomial division");
        q
    }

    pub fn divides(&self, d: &Poly<K::Elem>, a: &Poly<K::Elem>) -> bool {
        match self.divrem(a, d) {
            Some((_, r)) => r.is_zero(),
            None => a.is_zero(),
        }
    }

    pub fn monic(&self, a: &Poly<K::Elem>) -> Poly<K::Elem> {
        match a.lc() {
            None => self.zero(),
            Some(lc) => self.scale(a, &self.field.inv(lc).unwrap()),
        }
    }

    /// Monic gcd; `gcd(0, 0) = 0`.
    pub fn gcd(&self, a: &Poly<K::Elem>, b: &Poly<K::Elem>) -> Poly<K::Elem> {
        let (mut a, mut b) = (a.clone(), b.clone());
        while !b.is_zero() {
            let r = self.rem(&a, &b);
            a = b;
            b = r;
        }
        self.monic(&a)
    }

    /// `poly_gcd` with an explicit compatibility check on the rings.
    pub fn gcd_checked(
        &self,
        other: &PolyRing<K>,
        a: &Poly<K::Elem>,
        b: &Poly<K::Elem>,
    ) -> Result<Poly<K::Elem>> {
        if self != other {
            return Err(Error::FieldMismatch(format!(
                "{}[{}] vs {}[{}]",
                self.field.descriptor(),
                self.var,
                other.field.descriptor(),
                other.var
            )));
        }
        Ok(self.gcd(a, b))
    }

    pub fn derivative(&self, a: &Poly<K::Elem>) -> Poly<K::Elem> {
        let k = &self.field;
        self.from_coeffs(
            a.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, c)| k.mul(c, &k.from_int(i as i64)))
                .collect(),
        )
    }

    pub fn eval(&self, a: &Poly<K::Elem>, x: &K::Elem) -> K::Elem {
        let k = &self.field;
        a.coeffs
            .iter()
            .rev()
            .fold(k.zero(), |acc, c| k.add(&k.mul(&acc, x), c))
    }

    pub fn powmod(&self, a: &Poly<K::Elem>, mut e: u64, m: &Poly<K::Elem>) -> Poly<K::Elem> {
        let mut base = self.rem(a, m);
        let mut acc = self.rem(&self.one(), m);
        while e > 0 {
            if e & 1 == 1 {
                acc = self.rem(&self.mul(&acc, &base), m);
            }
            base = self.rem(&self.mul(&base, &base), m);
            e >>= 1;
        }
        acc
    }

    /// Squarefree test via `gcd(f, f')`.
    pub fn squarefree_test(&self, f: &Poly<K::Elem>) -> Result<SquarefreeReport<K::Elem>> {
        let df = self.derivative(f);
        if df.is_zero() && !self.is_constant(f) {
            return Err(Error::Inseparable(self.field.characteristic()));
        }
        if f.is_zero() {
            return Ok(SquarefreeReport {
                is_squarefree: false,
                radical: self.zero(),
            });
        }
        let g = self.gcd(f, &df);
        Ok(SquarefreeReport {
            is_squarefree: self.is_constant(&g),
            radical: self.exact_div(f, &g),
        })
    }

    /// Inverse Frobenius on a polynomial in x^p.
    fn pth_root_poly(&self, f: &Poly<K::Elem>) -> Option<Poly<K::Elem>> {
        let p = self.field.characteristic() as usize;
        if p == 0 {
            return None;
        }
        let mut out = Vec::new();
        for (i, c) in f.coeffs.iter().enumerate() {
            if i % p == 0 {
                out.push(self.field.pth_root(c)?);
            } else if !self.field.is_zero(c) {
                return None;
            }
        }
        Some(self.from_coeffs(out))
    }

    /// Squarefree decomposition of a nonzero polynomial: pairwise coprime
    /// monic factors `g` with multiplicities, `f = lc · Π g^m`. Handles
    /// p-th powers in characteristic p when the coefficient field is perfect.
    pub fn squarefree_decomposition(&self, f: &Poly<K::Elem>) -> Option<Vec<(Poly<K::Elem>, usize)>> {
        let f = self.monic(f);
        let mut out = Vec::new();
        if self.is_constant(&f) {
            return Some(out);
        }
        let p = self.field.characteristic() as usize;
        let df = self.derivative(&f);
        if df.is_zero() {
            let root = self.pth_root_poly(&f)?;
            for (g, m) in self.squarefree_decomposition(&root)? {
                out.push((g, m * p));
            }
            return Some(out);
        }
        let mut c = self.gcd(&f, &df);
        let mut w = self.exact_div(&f, &c);
        let mut i = 1;
        while !self.is_one(&w) {
            let y = self.gcd(&w, &c);
            let z = self.exact_div(&w, &y);
            if !self.is_constant(&z) {
                out.push((z, i));
            }
            i += 1;
            w = y;
            c = self.exact_div(&c, &w);
        }
        if !self.is_constant(&c) {
            let root = self.pth_root_poly(&c)?;
            for (g, m) in self.squarefree_decomposition(&root)? {
                out.push((g, m * p));
            }
        }
        Some(out)
    }

    /// All roots in a finite field with multiplicities, by exhaustive
    /// evaluation, plus the root-free cofactor.
    pub fn factor_roots(&self, f: &Poly<K::Elem>) -> Result<RootReport<K::Elem>> {
        let elems = self
            .field
            .elements()
            .ok_or_else(|| Error::Unsupported("root enumeration needs a finite field".into()))?;
        let mut cofactor = f.clone();
        let mut roots = Vec::new();
        if f.is_zero() {
            return Ok(RootReport { roots, cofactor });
        }
        for x in elems {
            let lin = self.linear(&x);
            let mut mult = 0;
            while cofactor.degree().unwrap_or(0) > 0 && self.field.is_zero(&self.eval(&cofactor, &x)) {
                cofactor = self.exact_div(&cofactor, &lin);
                mult += 1;
            }
            if mult > 0 {
                roots.push((x, mult));
            }
        }
        Ok(RootReport { roots, cofactor })
    }

    /// Determinant of a square matrix of polynomials, by fraction-free
    /// (Bareiss) elimination.
    pub fn det(&self, m: &[Vec<Poly<K::Elem>>]) -> Poly<K::Elem> {
        let n = m.len();
        if n == 0 {
            return self.one();
        }
        let mut a: Vec<Vec<Poly<K::Elem>>> = m.to_vec();
        let mut prev = self.one();
        let mut sign_flip = false;
        for k in 0..n - 1 {
            if a[k][k].is_zero() {
                match (k + 1..n).find(|&i| !a[i][k].is_zero()) {
                    Some(i) => {
                        a.swap(i, k);
                        sign_flip = !sign_flip;
                    }
                    None => return self.zero(),
                }
            }
            for i in k + 1..n {
                for j in k + 1..n {
                    let num = self.sub(
                        &self.mul(&a[i][j], &a[k][k]),
                        &self.mul(&a[i][k], &a[k][j]),
                    );
                    a[i][j] = self.exact_div(&num, &prev);
                }
            }
            prev = a[k][k].clone();
        }
        let d = a[n - 1][n - 1].clone();
        if sign_flip {
            self.neg(&d)
        } else {
            d
        }
    }

    pub fn format(&self, a: &Poly<K::Elem>) -> String {
        if a.is_zero() {
            return "0".into();
        }
        let k = &self.field;
        let mut terms = Vec::new();
        for (i, c) in a.coeffs.iter().enumerate().rev() {
            if k.is_zero(c) {
                continue;
            }
            let cs = k.format(c);
            let coef = if i > 0 && k.is_one(c) {
                String::new()
            } else if i > 0 && cs.contains(['+', '-', '/']) && !(cs.starts_with('-') && !cs[1..].contains(['+', '-', '/'])) {
                format!("({cs})*")
            } else if i > 0 {
                format!("{cs}*")
            } else {
                cs.clone()
            };
            let mono = match i {
                0 => String::new(),
                1 => self.var.clone(),
                _ => format!("{}^{}", self.var, i),
            };
            terms.push(format!("{coef}{mono}"));
        }
        let mut s = String::new();
        for (idx, t) in terms.iter().enumerate() {
            if idx > 0 && !t.starts_with('-') {
                s.push('+');
            }
            s.push_str(t);
        }
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rings::{ints, PrimeField, Rationals};

    fn qpoly(r: &PolyRing<Rationals>, c: &[i64]) -> Poly<num_rational::BigRational> {
        r.from_coeffs(ints(&Rationals, c))
    }

    #[test]
    fn gcd_examples() {
        let r = PolyRing::new(Rationals, "t");
        // gcd(t^2 - 1, t - 1) = t - 1
        assert_eq!(r.gcd(&qpoly(&r, &[-1, 0, 1]), &qpoly(&r, &[-1, 1])), qpoly(&r, &[-1, 1]));
        // gcd(t, 1) = 1
        assert_eq!(r.gcd(&qpoly(&r, &[0, 1]), &qpoly(&r, &[1])), r.one());
        assert!(r.gcd(&r.zero(), &r.zero()).is_zero());

        let f5 = PrimeField::new(5).unwrap();
        let r5 = PolyRing::new(f5, "t");
        let lin = |c: i64| r5.from_coeffs(ints(&f5, &[c, 1]));
        let a = r5.mul(&r5.mul(&lin(1), &lin(1)), &lin(2));
        let b = r5.mul(&lin(1), &lin(3));
        assert_eq!(r5.gcd(&a, &b), lin(1));
    }

    #[test]
    fn gcd_rejects_mismatched_rings() {
        let r3 = PolyRing::new(PrimeField::new(3).unwrap(), "t");
        let r5 = PolyRing::new(PrimeField::new(5).unwrap(), "t");
        assert!(matches!(
            r3.gcd_checked(&r5, &r3.one(), &r3.one()),
            Err(Error::FieldMismatch(_))
        ));
    }

    #[test]
    fn squarefree_examples() {
        let r = PolyRing::new(Rationals, "t");
        // t^2 (t - 1)
        let f = qpoly(&r, &[0, 0, -1, 1]);
        let rep = r.squarefree_test(&f).unwrap();
        assert!(!rep.is_squarefree);
        assert_eq!(rep.radical, qpoly(&r, &[0, -1, 1]));

        // s^6 + t^6 over F_5, affine model x^6 + 1
        let f5 = PrimeField::new(5).unwrap();
        let r5 = PolyRing::new(f5, "x");
        let g = r5.from_coeffs(ints(&f5, &[1, 0, 0, 0, 0, 0, 1]));
        assert!(r5.squarefree_test(&g).unwrap().is_squarefree);

        // x^5 - 1 over F_5 is inseparable
        let h = r5.from_coeffs(ints(&f5, &[-1, 0, 0, 0, 0, 1]));
        assert!(matches!(r5.squarefree_test(&h), Err(Error::Inseparable(5))));
    }

    #[test]
    fn squarefree_decomposition_char_p() {
        let f3 = PrimeField::new(3).unwrap();
        let r = PolyRing::new(f3, "x");
        let x = r.x();
        let x1 = r.linear(&2); // x + 1
        // x * (x+1)^3 * (x^2+1)^2
        let x2p1 = r.from_coeffs(ints(&f3, &[1, 0, 1]));
        let f = r.mul(&r.mul(&x, &r.pow(&x1, 3)), &r.pow(&x2p1, 2));
        let mut dec = r.squarefree_decomposition(&f).unwrap();
        dec.sort_by_key(|(_, m)| *m);
        assert_eq!(dec, vec![(x, 1), (x2p1, 2), (x1, 3)]);
    }

    #[test]
    fn roots_over_prime_fields() {
        let f3 = PrimeField::new(3).unwrap();
        let r = PolyRing::new(f3, "t");
        let rep = r.factor_roots(&r.from_coeffs(ints(&f3, &[-1, 0, 1]))).unwrap();
        assert_eq!(rep.roots, vec![(1, 1), (2, 1)]);
        let rep = r.factor_roots(&r.from_coeffs(ints(&f3, &[1, 0, 1]))).unwrap();
        assert!(rep.roots.is_empty());
        assert_eq!(rep.cofactor, r.from_coeffs(ints(&f3, &[1, 0, 1])));
        let f5 = PrimeField::new(5).unwrap();
        let r5 = PolyRing::new(f5, "t");
        let rep = r5.factor_roots(&r5.monomial(1, 3)).unwrap();
        assert_eq!(rep.roots, vec![(0, 3)]);
        assert!(r5.is_one(&rep.cofactor));
    }

    #[test]
    fn polynomial_determinant() {
        // det(x*diag(2,4) + diag(2,2)) = (2x+2)(4x+2) = 8x^2 + 12x + 4
        let r = PolyRing::new(Rationals, "x");
        let m = vec![
            vec![qpoly(&r, &[2, 2]), r.zero()],
            vec![r.zero(), qpoly(&r, &[2, 4])],
        ];
        assert_eq!(r.det(&m), qpoly(&r, &[4, 12, 8]));
        let m = vec![
            vec![r.zero(), qpoly(&r, &[1])],
            vec![qpoly(&r, &[1]), qpoly(&r, &[0, 1])],
        ];
        assert_eq!(r.det(&m), qpoly(&r, &[-1]));
    }

    #[test]
    fn formatting() {
        let r = PolyRing::new(Rationals, "t");
        assert_eq!(r.format(&qpoly(&r, &[-1, 0, 1])), "t^2-1");
        assert_eq!(r.format(&qpoly(&r, &[0, 3, -2])), "-2*t^2+3*t");
    }
}
