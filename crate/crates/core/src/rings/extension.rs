use num_bigint::BigInt;
use rand::Rng;

use super::{Field, FieldContext, PolyRing, PrimeField};
use crate::error::{Error, Result};

/// The finite field F_{p^e} realized as F_p[a]/(f) with f the first monic
/// irreducible of degree e in index order. Elements are coefficient vectors
/// of length e, lowest power of `a` first.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExtensionField {
    base: PrimeField,
    degree: usize,
    /// Low coefficients of the monic modulus: a^e = -Σ modulus[i] a^i.
    modulus: Vec<u32>,
    nonsquare: Vec<u32>,
    order: u64,
}

impl ExtensionField {
    pub fn new(p: u64, degree: usize) -> Result<Self> {
        let base = PrimeField::new(p)?;
        if degree == 0 {
            return Err(Error::Unsupported("extension of degree 0".into()));
        }
        let order = p
            .checked_pow(degree as u32)
            .filter(|&q| q <= 1 << 24)
            .ok_or_else(|| Error::Unsupported(format!("F{p}^{degree} is too large")))?;
        let modulus = find_irreducible(&base, degree);
        let mut k = ExtensionField {
            base,
            degree,
            modulus,
            nonsquare: Vec::new(),
            order,
        };
        k.nonsquare = if p == 2 {
            k.one()
        } else {
            (0..order)
                .map(|i| k.element(i))
                .find(|x| !k.is_zero(x) && !k.euler_is_one(x))
                .unwrap()
        };
        Ok(k)
    }

    pub fn base(&self) -> &PrimeField {
        &self.base
    }
    pub fn degree(&self) -> usize {
        self.degree
    }
    /// Coefficients of the defining polynomial, lowest first, monic.
    pub fn modulus_poly(&self) -> Vec<u32> {
        let mut m = self.modulus.clone();
        m.push(1);
        m
    }

    /// The element with base-p digit expansion `i`.
    pub fn element(&self, mut i: u64) -> Vec<u32> {
        let p = self.base.modulus() as u64;
        (0..self.degree)
            .map(|_| {
                let d = (i % p) as u32;
                i /= p;
                d
            })
            .collect()
    }

    pub fn embed(&self, c: u32) -> Vec<u32> {
        let mut v = vec![0; self.degree];
        v[0] = c;
        v
    }

    /// The element as a prime-field scalar, if it lies in F_p.
    pub fn as_base(&self, a: &[u32]) -> Option<u32> {
        a[1..].iter().all(|&c| c == 0).then_some(a[0])
    }

    /// Frobenius x ↦ x^p.
    pub fn frobenius(&self, a: &[u32]) -> Vec<u32> {
        self.pow(&a.to_vec(), self.base.modulus() as u64)
    }

    fn euler_is_one(&self, a: &Vec<u32>) -> bool {
        self.is_one(&self.pow(a, (self.order - 1) / 2))
    }
}

fn find_irreducible(k: &PrimeField, e: usize) -> Vec<u32> {
    let p = k.modulus() as u64;
    let ring = PolyRing::new(*k, "x");
    let x = ring.x();
    for i in 0..p.pow(e as u32) {
        let mut c: Vec<u32> = Vec::with_capacity(e + 1);
        let mut j = i;
        for _ in 0..e {
            c.push((j % p) as u32);
            j /= p;
        }
        c.push(1);
        let f = ring.from_coeffs(c.clone());
        // f is irreducible iff gcd(x^{p^i} - x, f) = 1 for all i ≤ e/2.
        let mut xp = x.clone();
        let irreducible = (1..=e / 2).all(|_| {
            xp = ring.powmod(&xp, p, &f);
            let g = ring.gcd(&ring.sub(&xp, &x), &f);
            ring.is_one(&g)
        });
        if irreducible {
            c.pop();
            return c;
        }
    }
    unreachable!("irreducible polynomials exist in every degree")
}

impl Field for ExtensionField {
    type Elem = Vec<u32>;

    fn descriptor(&self) -> FieldContext {
        if self.degree == 1 {
            self.base.descriptor()
        } else {
            FieldContext::Extension {
                p: self.base.modulus() as u64,
                degree: self.degree,
            }
        }
    }
    fn characteristic(&self) -> u64 {
        self.base.modulus() as u64
    }
    fn order(&self) -> Option<u64> {
        Some(self.order)
    }
    fn zero(&self) -> Vec<u32> {
        vec![0; self.degree]
    }
    fn one(&self) -> Vec<u32> {
        self.embed(1)
    }
    fn from_int(&self, n: i64) -> Vec<u32> {
        self.embed(self.base.from_int(n))
    }
    fn from_bigint(&self, n: &BigInt) -> Vec<u32> {
        self.embed(self.base.from_bigint(n))
    }
    fn add(&self, a: &Vec<u32>, b: &Vec<u32>) -> Vec<u32> {
        a.iter().zip(b).map(|(x, y)| self.base.add(x, y)).collect()
    }
    fn sub(&self, a: &Vec<u32>, b: &Vec<u32>) -> Vec<u32> {
        a.iter().zip(b).map(|(x, y)| self.base.sub(x, y)).collect()
    }
    fn neg(&self, a: &Vec<u32>) -> Vec<u32> {
        a.iter().map(|x| self.base.neg(x)).collect()
    }
    fn mul(&self, a: &Vec<u32>, b: &Vec<u32>) -> Vec<u32> {
        let e = self.degree;
        let p = self.base.modulus() as u64;
        let mut prod = vec![0u64; 2 * e - 1];
        for (i, &x) in a.iter().enumerate() {
            if x == 0 {
                continue;
            }
            for (j, &y) in b.iter().enumerate() {
                prod[i + j] = (prod[i + j] + x as u64 * y as u64) % p;
            }
        }
        for d in (e..2 * e - 1).rev() {
            let c = prod[d];
            if c == 0 {
                continue;
            }
            for (i, &m) in self.modulus.iter().enumerate() {
                prod[d - e + i] = (prod[d - e + i] + (p - m as u64) * c) % p;
            }
        }
        prod.truncate(e);
        prod.into_iter().map(|c| c as u32).collect()
    }
    fn inv(&self, a: &Vec<u32>) -> Option<Vec<u32>> {
        if self.is_zero(a) {
            None
        } else {
            Some(self.pow(a, self.order - 2))
        }
    }
    fn is_zero(&self, a: &Vec<u32>) -> bool {
        a.iter().all(|&c| c == 0)
    }
    fn square_class(&self, a: &Vec<u32>) -> Vec<u32> {
        if self.is_zero(a) {
            self.zero()
        } else if self.characteristic() == 2 || self.euler_is_one(a) {
            self.one()
        } else {
            self.nonsquare.clone()
        }
    }
    fn sqrt(&self, a: &Vec<u32>) -> Option<Vec<u32>> {
        if self.is_zero(a) {
            return Some(a.clone());
        }
        if self.characteristic() == 2 {
            return Some(self.pow(a, self.order / 2));
        }
        if !self.euler_is_one(a) {
            return None;
        }
        // Tonelli–Shanks in the cyclic group of order q - 1.
        let (mut odd, mut s) = (self.order - 1, 0u32);
        while odd % 2 == 0 {
            odd /= 2;
            s += 1;
        }
        let mut m = s;
        let mut c = self.pow(&self.nonsquare, odd);
        let mut t = self.pow(a, odd);
        let mut r = self.pow(a, odd.div_ceil(2));
        while !self.is_one(&t) {
            let mut i = 0;
            let mut t2 = t.clone();
            while !self.is_one(&t2) {
                t2 = self.mul(&t2, &t2);
                i += 1;
            }
            let b = self.pow(&c, 1 << (m - i - 1));
            m = i;
            c = self.mul(&b, &b);
            t = self.mul(&t, &c);
            r = self.mul(&r, &b);
        }
        let neg = self.neg(&r);
        Some(if neg < r { neg } else { r })
    }
    fn pth_root(&self, a: &Vec<u32>) -> Option<Vec<u32>> {
        let p = self.characteristic();
        Some(self.pow(a, p.pow(self.degree as u32 - 1)))
    }
    fn elements(&self) -> Option<Vec<Vec<u32>>> {
        Some((0..self.order).map(|i| self.element(i)).collect())
    }
    fn roots(&self, coeffs: &[Vec<u32>]) -> Option<Vec<Vec<u32>>> {
        let elems = self.elements()?;
        Some(
            elems
                .into_iter()
                .filter(|x| {
                    let v = coeffs
                        .iter()
                        .rev()
                        .fold(self.zero(), |acc, c| self.add(&self.mul(&acc, x), c));
                    self.is_zero(&v)
                })
                .collect(),
        )
    }
    fn generator(&self) -> Option<(String, Vec<u32>)> {
        (self.degree > 1).then(|| {
            let mut g = self.zero();
            g[1] = 1;
            ("a".to_string(), g)
        })
    }
    fn format(&self, a: &Vec<u32>) -> String {
        let mut terms = Vec::new();
        for (i, &c) in a.iter().enumerate().rev() {
            if c == 0 {
                continue;
            }
            terms.push(match (i, c) {
                (0, _) => c.to_string(),
                (1, 1) => "a".to_string(),
                (1, _) => format!("{c}*a"),
                (_, 1) => format!("a^{i}"),
                _ => format!("{c}*a^{i}"),
            });
        }
        if terms.is_empty() {
            "0".into()
        } else {
            terms.join("+")
        }
    }
    fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Vec<u32> {
        (0..self.degree)
            .map(|_| self.base.sample(rng))
            .collect()
    }
}
