use num_bigint::BigInt;
use rand::Rng;

use super::{Field, FieldContext, Poly, PolyRing};
use crate::error::{Error, Result};

/// A rational function num/den with den monic and gcd(num, den) = 1.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct RatFunc<E> {
    pub num: Poly<E>,
    pub den: Poly<E>,
}

/// The rational function field k(t) over a base field k of depth one.
#[derive(Debug, Clone, PartialEq)]
pub struct FunctionField<K: Field> {
    ring: PolyRing<K>,
}

impl<K: Field> FunctionField<K> {
    pub fn new(base: K, var: impl Into<String>) -> Result<Self> {
        if base.descriptor().depth() >= 2 {
            return Err(Error::TowerTooDeep);
        }
        Ok(FunctionField {
            ring: PolyRing::new(base, var),
        })
    }

    pub fn base(&self) -> &K {
        self.ring.field()
    }
    pub fn ring(&self) -> &PolyRing<K> {
        &self.ring
    }
    pub fn var(&self) -> &str {
        self.ring.var()
    }

    pub fn from_poly(&self, p: Poly<K::Elem>) -> RatFunc<K::Elem> {
        RatFunc {
            num: p,
            den: self.ring.one(),
        }
    }
    pub fn from_base(&self, c: K::Elem) -> RatFunc<K::Elem> {
        self.from_poly(self.ring.constant(c))
    }
    pub fn t(&self) -> RatFunc<K::Elem> {
        self.from_poly(self.ring.x())
    }

    /// Reduce num/den to canonical form. Panics on a zero denominator.
    pub fn fraction(&self, num: Poly<K::Elem>, den: Poly<K::Elem>) -> RatFunc<K::Elem> {
        let r = &self.ring;
        assert!(!den.is_zero(), "zero denominator");
        if num.is_zero() {
            return RatFunc {
                num,
                den: r.one(),
            };
        }
        let g = r.gcd(&num, &den);
        let (num, den) = (r.exact_div(&num, &g), r.exact_div(&den, &g));
        let lc = den.lc().unwrap().clone();
        let inv = self.base().inv(&lc).unwrap();
        RatFunc {
            num: r.scale(&num, &inv),
            den: r.scale(&den, &inv),
        }
    }

    /// The element as a polynomial, if its denominator is 1.
    pub fn as_poly<'a>(&self, a: &'a RatFunc<K::Elem>) -> Option<&'a Poly<K::Elem>> {
        self.ring.is_one(&a.den).then_some(&a.num)
    }

    /// Evaluate at t = x, or `None` at a pole.
    pub fn eval(&self, a: &RatFunc<K::Elem>, x: &K::Elem) -> Option<K::Elem> {
        let k = self.base();
        k.div(&self.ring.eval(&a.num, x), &self.ring.eval(&a.den, x))
    }

    /// Squarefree part of a nonzero polynomial together with the parity-reduced
    /// product; `None` if the decomposition is unavailable.
    fn odd_part(&self, f: &Poly<K::Elem>) -> Option<Poly<K::Elem>> {
        let r = &self.ring;
        let dec = r.squarefree_decomposition(f)?;
        Some(
            dec.iter()
                .filter(|(_, m)| m % 2 == 1)
                .fold(r.one(), |acc, (g, _)| r.mul(&acc, g)),
        )
    }

    fn half_power(&self, f: &Poly<K::Elem>) -> Option<Poly<K::Elem>> {
        let r = &self.ring;
        let dec = r.squarefree_decomposition(f)?;
        let mut out = r.one();
        for (g, m) in dec {
            if m % 2 == 1 {
                return None;
            }
            out = r.mul(&out, &r.pow(&g, m / 2));
        }
        Some(out)
    }
}

impl<K: Field> Field for FunctionField<K> {
    type Elem = RatFunc<K::Elem>;

    fn descriptor(&self) -> FieldContext {
        FieldContext::FunctionField {
            base: Box::new(self.base().descriptor()),
            var: self.var().to_string(),
        }
    }
    fn characteristic(&self) -> u64 {
        self.base().characteristic()
    }
    fn zero(&self) -> Self::Elem {
        self.from_poly(self.ring.zero())
    }
    fn one(&self) -> Self::Elem {
        self.from_poly(self.ring.one())
    }
    fn from_int(&self, n: i64) -> Self::Elem {
        self.from_base(self.base().from_int(n))
    }
    fn from_bigint(&self, n: &BigInt) -> Self::Elem {
        self.from_base(self.base().from_bigint(n))
    }
    fn add(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem {
        let r = &self.ring;
        if a.den == b.den {
            return self.fraction(r.add(&a.num, &b.num), a.den.clone());
        }
        self.fraction(
            r.add(&r.mul(&a.num, &b.den), &r.mul(&b.num, &a.den)),
            r.mul(&a.den, &b.den),
        )
    }
    fn sub(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem {
        self.add(a, &self.neg(b))
    }
    fn neg(&self, a: &Self::Elem) -> Self::Elem {
        RatFunc {
            num: self.ring.neg(&a.num),
            den: a.den.clone(),
        }
    }
    fn mul(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem {
        if a.num.is_zero() || b.num.is_zero() {
            return self.zero();
        }
        let r = &self.ring;
        self.fraction(r.mul(&a.num, &b.num), r.mul(&a.den, &b.den))
    }
    fn inv(&self, a: &Self::Elem) -> Option<Self::Elem> {
        if a.num.is_zero() {
            None
        } else {
            Some(self.fraction(a.den.clone(), a.num.clone()))
        }
    }
    fn is_zero(&self, a: &Self::Elem) -> bool {
        a.num.is_zero()
    }
    fn square_class(&self, a: &Self::Elem) -> Self::Elem {
        if a.num.is_zero() {
            return self.zero();
        }
        let r = &self.ring;
        let f = r.mul(&a.num, &a.den);
        let lc = self.base().square_class(f.lc().unwrap());
        let odd = self
            .odd_part(&f)
            .expect("squarefree decomposition over a perfect base");
        self.from_poly(r.scale(&odd, &lc))
    }
    fn sqrt(&self, a: &Self::Elem) -> Option<Self::Elem> {
        if a.num.is_zero() {
            return Some(self.zero());
        }
        let k = self.base();
        let c = k.sqrt(a.num.lc().unwrap())?;
        let n = self.half_power(&a.num)?;
        let d = self.half_power(&a.den)?;
        Some(self.fraction(self.ring.scale(&n, &c), d))
    }
    fn generator(&self) -> Option<(String, Self::Elem)> {
        Some((self.var().to_string(), self.t()))
    }
    fn format(&self, a: &Self::Elem) -> String {
        let r = &self.ring;
        let n = r.format(&a.num);
        if r.is_one(&a.den) {
            return n;
        }
        let wrap = |s: String, p: &Poly<K::Elem>| {
            if p.coeffs().iter().filter(|c| !self.base().is_zero(c)).count() > 1
                || s.contains('/')
            {
                format!("({s})")
            } else {
                s
            }
        };
        format!(
            "{}/{}",
            wrap(n, &a.num),
            wrap(r.format(&a.den), &a.den)
        )
    }
    fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Self::Elem {
        let k = self.base();
        let r = &self.ring;
        let deg = rng.gen_range(0..=2);
        let num = r.from_coeffs((0..=deg).map(|_| k.sample(rng)).collect());
        let den = if rng.gen_bool(0.3) {
            r.from_coeffs(vec![k.sample(rng), k.one()])
        } else {
            r.one()
        };
        self.fraction(num, den)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rings::{ints, PrimeField, Rationals};

    #[test]
    fn canonical_fractions() {
        let k = FunctionField::new(Rationals, "t").unwrap();
        let r = k.ring();
        // (t^2 - 1)/(2t - 2) = (t + 1)/2
        let a = k.fraction(
            r.from_coeffs(ints(&Rationals, &[-1, 0, 1])),
            r.from_coeffs(ints(&Rationals, &[-2, 2])),
        );
        assert!(r.is_one(&a.den));
        assert_eq!(k.format(&a), "(1/2)*t+1/2");
        let t = k.t();
        let inv = k.inv(&t).unwrap();
        assert!(k.is_one(&k.mul(&t, &inv)));
        assert_eq!(k.format(&k.add(&inv, &k.one())), "(t+1)/t");
    }

    #[test]
    fn square_classes_in_function_fields() {
        let f3 = PrimeField::new(3).unwrap();
        let k = FunctionField::new(f3, "t").unwrap();
        let r = k.ring();
        let t = k.t();
        let t2 = k.mul(&t, &t);
        assert!(k.is_square(&t2));
        assert_eq!(k.square_class(&k.mul(&t2, &t)), t);
        // 2 t^2 / (t+1)^2 has class 2 (a nonsquare constant)
        let tp1 = k.from_poly(r.from_coeffs(ints(&f3, &[1, 1])));
        let a = k.div(&k.mul(&k.from_int(2), &t2), &k.mul(&tp1, &tp1)).unwrap();
        assert_eq!(k.square_class(&a), k.from_int(2));
        assert!(k.sqrt(&a).is_none());
        let b = k.div(&t2, &k.mul(&tp1, &tp1)).unwrap();
        let s = k.sqrt(&b).unwrap();
        assert_eq!(k.mul(&s, &s), b);
        // t^3 is a cube-free but p-th power in char 3: class t
        let t3 = k.mul(&t2, &t);
        assert_eq!(k.square_class(&t3), t);
    }

    #[test]
    fn deep_towers_rejected() {
        let k = FunctionField::new(Rationals, "t").unwrap();
        assert!(matches!(
            FunctionField::new(k, "s"),
            Err(Error::TowerTooDeep)
        ));
    }
}
