use super::{Field, Poly, PolyRing, SquarefreeReport};
use crate::error::{Error, Result};

/// Homogeneous binary form of degree d: Σ coeffs[i] s^{d-i} t^i.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct BinaryForm<E> {
    pub degree: usize,
    pub coeffs: Vec<E>,
}

impl<E: Clone> BinaryForm<E> {
    /// Homogenize an affine polynomial f(x) = F(x, 1) to degree d.
    pub fn from_affine<K: Field<Elem = E>>(k: &K, degree: usize, f: &Poly<E>) -> Self {
        assert!(f.degree().is_none_or(|d| d <= degree), "degree too large");
        let coeffs = (0..=degree)
            .map(|i| f.coeffs().get(degree - i).cloned().unwrap_or_else(|| k.zero()))
            .collect();
        BinaryForm { degree, coeffs }
    }

    /// The affine chart t = 1: F(x, 1).
    pub fn affine<K: Field<Elem = E>>(&self, ring: &PolyRing<K>) -> Poly<E> {
        ring.from_coeffs(self.coeffs.iter().rev().cloned().collect())
    }

    pub fn eval<K: Field<Elem = E>>(&self, k: &K, s: &E, t: &E) -> E {
        let d = self.degree as u64;
        let mut acc = k.zero();
        for (i, c) in self.coeffs.iter().enumerate() {
            if k.is_zero(c) {
                continue;
            }
            let term = k.mul(c, &k.mul(&k.pow(s, d - i as u64), &k.pow(t, i as u64)));
            acc = k.add(&acc, &term);
        }
        acc
    }

    pub fn is_zero<K: Field<Elem = E>>(&self, k: &K) -> bool {
        self.coeffs.iter().all(|c| k.is_zero(c))
    }

    /// Order of vanishing at the point (1:0).
    pub fn multiplicity_at_infinity<K: Field<Elem = E>>(&self, k: &K) -> usize {
        self.coeffs.iter().take_while(|c| k.is_zero(c)).count()
    }

    /// Squarefree as a form on P^1: nonzero, affine part squarefree and at
    /// most a simple zero at (1:0). The radical is that of the affine part.
    pub fn squarefree_test<K: Field<Elem = E>>(
        &self,
        ring: &PolyRing<K>,
    ) -> Result<SquarefreeReport<E>> {
        let k = ring.field();
        if self.is_zero(k) {
            return Err(Error::NotSquarefree);
        }
        let mut rep = ring.squarefree_test(&self.affine(ring))?;
        rep.is_squarefree &= self.multiplicity_at_infinity(k) <= 1;
        Ok(rep)
    }

    pub fn format<K: Field<Elem = E>>(&self, k: &K) -> String {
        let d = self.degree;
        let mono = |v: &str, e: usize| match e {
            0 => String::new(),
            1 => v.to_string(),
            _ => format!("{v}^{e}"),
        };
        let mut s = String::new();
        for (i, c) in self.coeffs.iter().enumerate() {
            if k.is_zero(c) {
                continue;
            }
            let m = [mono("s", d - i), mono("t", i)]
                .into_iter()
                .filter(|x| !x.is_empty())
                .collect::<Vec<_>>()
                .join("*");
            let cs = k.format(c);
            let cs = if cs.contains(['+', '/']) || cs[1..].contains('-') {
                format!("({cs})")
            } else {
                cs
            };
            let term = if m.is_empty() {
                cs
            } else if k.is_one(c) {
                m
            } else {
                format!("{cs}*{m}")
            };
            if !s.is_empty() && !term.starts_with('-') {
                s.push('+');
            }
            s.push_str(&term);
        }
        if s.is_empty() {
            "0".into()
        } else {
            s
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rings::{ints, PrimeField, Rationals};

    #[test]
    fn distinct_linear_factors_are_squarefree() {
        // (s+t)(s+2t)(s+3t)(s+4t) over Q
        let ring = PolyRing::new(Rationals, "x");
        let f = [1, 2, 3, 4]
            .iter()
            .fold(ring.one(), |acc, &c| {
                ring.mul(&acc, &ring.from_coeffs(ints(&Rationals, &[c, 1])))
            });
        let b = BinaryForm::from_affine(&Rationals, 4, &f);
        assert!(b.squarefree_test(&ring).unwrap().is_squarefree);
        let one = Rationals.one();
        assert_eq!(b.eval(&Rationals, &one, &one), Rationals.from_int(120));
    }

    #[test]
    fn zeros_at_infinity() {
        let f5 = PrimeField::new(5).unwrap();
        let ring = PolyRing::new(f5, "x");
        // t^2 * s: degree 3, affine part x, double zero at (1:0)
        let b = BinaryForm::from_affine(&f5, 3, &ring.x());
        assert_eq!(b.multiplicity_at_infinity(&f5), 2);
        assert!(!b.squarefree_test(&ring).unwrap().is_squarefree);
        assert_eq!(b.format(&f5), "s*t^2");
        // s^6 + t^6
        let s6t6 = BinaryForm::from_affine(&f5, 6, &ring.from_coeffs(ints(&f5, &[1, 0, 0, 0, 0, 0, 1])));
        assert!(s6t6.squarefree_test(&ring).unwrap().is_squarefree);
    }
}
