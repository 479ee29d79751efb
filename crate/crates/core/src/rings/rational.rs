use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use rand::Rng;

use super::{Field, FieldContext};

/// The rational numbers with arbitrary-precision, gcd-reduced fractions.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash)]
pub struct Rationals;

impl Field for Rationals {
    type Elem = BigRational;

    fn descriptor(&self) -> FieldContext {
        FieldContext::Rationals
    }
    fn characteristic(&self) -> u64 {
        0
    }
    fn zero(&self) -> BigRational {
        BigRational::zero()
    }
    fn one(&self) -> BigRational {
        BigRational::one()
    }
    fn from_int(&self, n: i64) -> BigRational {
        BigRational::from_integer(n.into())
    }
    fn from_bigint(&self, n: &BigInt) -> BigRational {
        BigRational::from_integer(n.clone())
    }
    fn add(&self, a: &BigRational, b: &BigRational) -> BigRational {
        a + b
    }
    fn sub(&self, a: &BigRational, b: &BigRational) -> BigRational {
        a - b
    }
    fn neg(&self, a: &BigRational) -> BigRational {
        -a
    }
    fn mul(&self, a: &BigRational, b: &BigRational) -> BigRational {
        a * b
    }
    fn inv(&self, a: &BigRational) -> Option<BigRational> {
        (!a.is_zero()).then(|| a.recip())
    }
    fn is_zero(&self, a: &BigRational) -> bool {
        a.is_zero()
    }
    fn square_class(&self, a: &BigRational) -> BigRational {
        if a.is_zero() {
            return BigRational::zero();
        }
        let n = a.numer() * a.denom();
        BigRational::from_integer(squarefree_part(&n))
    }
    fn sqrt(&self, a: &BigRational) -> Option<BigRational> {
        if a.is_negative() {
            return None;
        }
        let n = exact_sqrt(a.numer())?;
        let d = exact_sqrt(a.denom())?;
        Some(BigRational::new(n, d))
    }
    fn as_rational(&self, a: &BigRational) -> Option<BigRational> {
        Some(a.clone())
    }
    fn roots(&self, coeffs: &[BigRational]) -> Option<Vec<BigRational>> {
        rational_roots(coeffs)
    }
    fn format(&self, a: &BigRational) -> String {
        a.to_string()
    }
    fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> BigRational {
        let n: i64 = rng.gen_range(-5..=5);
        if rng.gen_ratio(1, 5) {
            BigRational::new(n.into(), rng.gen_range(2i64..=3).into())
        } else {
            BigRational::from_integer(n.into())
        }
    }
}

pub(crate) fn exact_sqrt(n: &BigInt) -> Option<BigInt> {
    if n.is_negative() {
        return None;
    }
    let r = n.sqrt();
    (&r * &r == *n).then_some(r)
}

/// Squarefree kernel of a nonzero integer, sign included.
pub(crate) fn squarefree_part(n: &BigInt) -> BigInt {
    let mut out = if n.is_negative() {
        -BigInt::one()
    } else {
        BigInt::one()
    };
    for (p, e) in factor(&n.abs()) {
        if e % 2 == 1 {
            out *= p;
        }
    }
    out
}

/// Prime factorization of a positive integer by trial division, finishing
/// with Pollard rho on large cofactors.
pub(crate) fn factor(n: &BigInt) -> Vec<(BigInt, u32)> {
    let mut n = n.clone();
    let mut out: Vec<(BigInt, u32)> = Vec::new();
    if n <= BigInt::one() {
        return out;
    }
    let push = |p: BigInt, out: &mut Vec<(BigInt, u32)>| {
        if let Some(slot) = out.iter_mut().find(|(q, _)| *q == p) {
            slot.1 += 1;
        } else {
            out.push((p, 1));
        }
    };
    let mut d: u64 = 2;
    while d < 10_000 {
        let bd = BigInt::from(d);
        if &bd * &bd > n {
            break;
        }
        while (&n % &bd).is_zero() {
            n /= &bd;
            push(bd.clone(), &mut out);
        }
        d += if d == 2 { 1 } else { 2 };
    }
    let mut stack = vec![n];
    while let Some(m) = stack.pop() {
        if m.is_one() {
            continue;
        }
        if is_probable_prime(&m) {
            push(m, &mut out);
            continue;
        }
        if let Some(r) = exact_sqrt(&m) {
            stack.push(r.clone());
            stack.push(r);
            continue;
        }
        let f = pollard_rho(&m);
        stack.push(&m / &f);
        stack.push(f);
    }
    out.sort();
    out
}

fn is_probable_prime(n: &BigInt) -> bool {
    if n < &BigInt::from(2) {
        return false;
    }
    let small = [2u32, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];
    for &p in &small {
        let bp = BigInt::from(p);
        if *n == bp {
            return true;
        }
        if (n % &bp).is_zero() {
            return false;
        }
    }
    let one = BigInt::one();
    let nm1 = n - &one;
    let mut d = nm1.clone();
    let mut s = 0;
    while d.is_even() {
        d >>= 1;
        s += 1;
    }
    'witness: for &a in &small {
        let mut x = BigInt::from(a).modpow(&d, n);
        if x == one || x == nm1 {
            continue;
        }
        for _ in 1..s {
            x = x.modpow(&BigInt::from(2), n);
            if x == nm1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

fn pollard_rho(n: &BigInt) -> BigInt {
    if n.is_even() {
        return BigInt::from(2);
    }
    let mut c = BigInt::one();
    loop {
        let f = |x: &BigInt| (x * x + &c) % n;
        let (mut x, mut y, mut d) = (BigInt::from(2), BigInt::from(2), BigInt::one());
        while d.is_one() {
            x = f(&x);
            y = f(&f(&y));
            d = (&x - &y).abs().gcd(n);
        }
        if &d != n {
            return d;
        }
        c += 1;
    }
}

fn divisors(n: &BigInt, cap: usize) -> Option<Vec<BigInt>> {
    let mut divs = vec![BigInt::one()];
    for (p, e) in factor(n) {
        let mut next = Vec::with_capacity(divs.len() * (e as usize + 1));
        for d in &divs {
            let mut pk = BigInt::one();
            for _ in 0..=e {
                next.push(d * &pk);
                pk *= &p;
            }
        }
        if next.len() > cap {
            return None;
        }
        divs = next;
    }
    Some(divs)
}

/// Rational roots by the rational root theorem. `None` when the candidate set
/// is too large to enumerate.
fn rational_roots(coeffs: &[BigRational]) -> Option<Vec<BigRational>> {
    let mut c: Vec<BigRational> = coeffs.to_vec();
    while c.last().is_some_and(|x| x.is_zero()) {
        c.pop();
    }
    if c.len() <= 1 {
        return Some(Vec::new());
    }
    let mut roots = Vec::new();
    if c[0].is_zero() {
        roots.push(BigRational::zero());
        while c[0].is_zero() {
            c.remove(0);
        }
    }
    if c.len() <= 1 {
        return Some(roots);
    }
    let lcm = c.iter().fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
    let ints: Vec<BigInt> = c.iter().map(|x| (x * &lcm).to_integer()).collect();
    let a0 = ints[0].abs();
    let an = ints.last().unwrap().abs();
    let ps = divisors(&a0, 4096)?;
    let qs = divisors(&an, 4096)?;
    if ps.len().saturating_mul(qs.len()) > 200_000 {
        return None;
    }
    // q^d f(p/q) with integer Horner
    let eval = |p: &BigInt, q: &BigInt| {
        let mut acc = BigInt::zero();
        let mut qpow = BigInt::one();
        for a in ints.iter().rev() {
            acc = acc * p + a * &qpow;
            qpow *= q;
        }
        acc
    };
    let f1: BigInt = ints.iter().sum();
    let fm1: BigInt = ints
        .iter()
        .enumerate()
        .map(|(i, a)| if i % 2 == 0 { a.clone() } else { -a })
        .sum();
    // Cauchy bound on |root|
    let bound = ints[..ints.len() - 1]
        .iter()
        .map(|a| BigRational::new(a.abs(), an.clone()))
        .max()
        .unwrap_or_else(BigRational::zero)
        + BigRational::one();
    for p in &ps {
        for q in &qs {
            if !p.gcd(q).is_one() || BigRational::new(p.clone(), q.clone()) > bound {
                continue;
            }
            for p in [p.clone(), -p] {
                // (q - p) | f(1)·q^d and (q + p) | f(-1)·q^d reduce to these for coprime p, q
                let (dm, dp) = (q - &p, q + &p);
                if (!dm.is_zero() && !(&f1 % &dm).is_zero()) || (!dp.is_zero() && !(&fm1 % &dp).is_zero()) {
                    continue;
                }
                if eval(&p, q).is_zero() {
                    roots.push(BigRational::new(p, q.clone()));
                }
            }
        }
    }
    roots.sort();
    Some(roots)
}
