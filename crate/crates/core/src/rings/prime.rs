use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::ToPrimitive;
use rand::Rng;

use super::{Field, FieldContext};
use crate::error::{Error, Result};

/// The prime field F_p for p < 2^16.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct PrimeField {
    p: u32,
    nonsquare: u32,
}

pub(crate) fn is_small_prime(p: u64) -> bool {
    if !(2..1 << 16).contains(&p) {
        return false;
    }
    let mut d = 2;
    while d * d <= p {
        if p.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

impl PrimeField {
    pub fn new(p: u64) -> Result<Self> {
        if !is_small_prime(p) {
            return Err(Error::NotPrime(p));
        }
        let p = p as u32;
        let nonsquare = if p == 2 {
            1
        } else {
            (2..p).find(|&a| pow_mod(a, (p - 1) / 2, p) != 1).unwrap()
        };
        Ok(PrimeField { p, nonsquare })
    }

    pub fn modulus(&self) -> u32 {
        self.p
    }

    /// The least quadratic non-residue (1 when p = 2).
    pub fn least_nonsquare(&self) -> u32 {
        self.nonsquare
    }

    #[inline]
    pub fn reduce(&self, n: i64) -> u32 {
        n.rem_euclid(self.p as i64) as u32
    }
}

fn pow_mod(a: u32, mut e: u32, p: u32) -> u32 {
    let (mut acc, mut base, p) = (1u64, a as u64 % p as u64, p as u64);
    while e > 0 {
        if e & 1 == 1 {
            acc = acc * base % p;
        }
        base = base * base % p;
        e >>= 1;
    }
    acc as u32
}

impl Field for PrimeField {
    type Elem = u32;

    fn descriptor(&self) -> FieldContext {
        FieldContext::PrimeField { p: self.p as u64 }
    }
    fn characteristic(&self) -> u64 {
        self.p as u64
    }
    fn order(&self) -> Option<u64> {
        Some(self.p as u64)
    }
    fn zero(&self) -> u32 {
        0
    }
    fn one(&self) -> u32 {
        1 % self.p
    }
    fn from_int(&self, n: i64) -> u32 {
        self.reduce(n)
    }
    fn from_bigint(&self, n: &BigInt) -> u32 {
        n.mod_floor(&BigInt::from(self.p)).to_u32().unwrap()
    }
    #[inline]
    fn add(&self, a: &u32, b: &u32) -> u32 {
        let s = a + b;
        if s >= self.p {
            s - self.p
        } else {
            s
        }
    }
    #[inline]
    fn sub(&self, a: &u32, b: &u32) -> u32 {
        if a >= b {
            a - b
        } else {
            a + self.p - b
        }
    }
    #[inline]
    fn neg(&self, a: &u32) -> u32 {
        if *a == 0 {
            0
        } else {
            self.p - a
        }
    }
    #[inline]
    fn mul(&self, a: &u32, b: &u32) -> u32 {
        ((*a as u64 * *b as u64) % self.p as u64) as u32
    }
    fn inv(&self, a: &u32) -> Option<u32> {
        if *a == 0 {
            None
        } else {
            Some(pow_mod(*a, self.p - 2, self.p))
        }
    }
    #[inline]
    fn is_zero(&self, a: &u32) -> bool {
        *a == 0
    }
    fn square_class(&self, a: &u32) -> u32 {
        if *a == 0 {
            0
        } else if self.p == 2 || pow_mod(*a, (self.p - 1) / 2, self.p) == 1 {
            1
        } else {
            self.nonsquare
        }
    }
    fn sqrt(&self, a: &u32) -> Option<u32> {
        let p = self.p;
        if *a == 0 || p == 2 {
            return Some(*a);
        }
        if pow_mod(*a, (p - 1) / 2, p) != 1 {
            return None;
        }
        // Tonelli–Shanks
        let (mut q, mut s) = (p - 1, 0);
        while q % 2 == 0 {
            q /= 2;
            s += 1;
        }
        let mut m = s;
        let mut c = pow_mod(self.nonsquare, q, p);
        let mut t = pow_mod(*a, q, p);
        let mut r = pow_mod(*a, q.div_ceil(2), p);
        while t != 1 {
            let mut i = 0;
            let mut t2 = t;
            while t2 != 1 {
                t2 = self.mul(&t2, &t2);
                i += 1;
            }
            let b = pow_mod(c, 1 << (m - i - 1), p);
            m = i;
            c = self.mul(&b, &b);
            t = self.mul(&t, &c);
            r = self.mul(&r, &b);
        }
        Some(r.min(p - r))
    }
    fn pth_root(&self, a: &u32) -> Option<u32> {
        Some(*a)
    }
    fn elements(&self) -> Option<Vec<u32>> {
        Some((0..self.p).collect())
    }
    fn roots(&self, coeffs: &[u32]) -> Option<Vec<u32>> {
        Some(
            (0..self.p)
                .filter(|x| {
                    coeffs
                        .iter()
                        .rev()
                        .fold(0, |acc, c| self.add(&self.mul(&acc, x), c))
                        == 0
                })
                .collect(),
        )
    }
    fn format(&self, a: &u32) -> String {
        a.to_string()
    }
    fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> u32 {
        rng.gen_range(0..self.p)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_composites() {
        assert!(PrimeField::new(9).is_err());
        assert!(PrimeField::new(1).is_err());
        assert!(PrimeField::new(65537).is_err());
        assert!(PrimeField::new(65521).is_ok());
    }

    #[test]
    fn square_roots_square_back() {
        for p in [3u64, 5, 7, 13, 17, 97, 65521] {
            let k = PrimeField::new(p).unwrap();
            for a in (0..k.modulus()).step_by(((p / 50) as usize).max(1)) {
                match k.sqrt(&a) {
                    Some(r) => assert_eq!(k.mul(&r, &r), a),
                    None => assert_eq!(k.square_class(&a), k.least_nonsquare()),
                }
            }
        }
    }

    #[test]
    fn two_is_nonsquare_mod_five() {
        let k = PrimeField::new(5).unwrap();
        assert!(!k.is_square(&2));
        assert!(k.is_square(&4));
        assert_eq!(k.square_class(&3), 2);
    }
}
