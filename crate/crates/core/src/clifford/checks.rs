use std::collections::BTreeMap;

use super::center::{center, is_central_simple, span_basis, CenterShape};
use super::{even_clifford, ordered_masks, CliffordEngine};
use crate::error::{Error, Result};
use crate::par;
use crate::quadform::QuadraticForm;
use crate::rings::{Field, Matrix, Rationals};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OrthogonalSumReport {
    pub source_dim: usize,
    pub target_dim: usize,
    pub pairs_checked: usize,
    pub bijective: bool,
    pub multiplicative: bool,
    /// First failing pair, as labels, when not multiplicative.
    pub failure: Option<String>,
}

impl OrthogonalSumReport {
    pub fn ok(&self) -> bool {
        self.bijective && self.multiplicative
    }
}

/// Check C0(q1)⊗C0(q2) ⊕ C1(q1)⊗C1(q2) ≅ C0(q1 ⊥ q2) via x⊗y ↦ x·y, where the
/// source carries the product (x⊗y)(x'⊗y') = (-1)^{deg y · deg x'} xx' ⊗ yy'.
pub fn verify_orthogonal_sum<K: Field>(
    q1: &QuadraticForm<K>,
    q2: &QuadraticForm<K>,
) -> Result<OrthogonalSumReport> {
    let (a, b) = (q1.rank(), q2.rank());
    if a + b > 6 {
        return Err(Error::RankCap {
            what: "orthogonal sum check",
            rank: a + b,
            cap: 6,
        });
    }
    let q = q1.direct_sum(q2)?;
    let k = q.field().clone();
    let (e1, e2, e) = (
        CliffordEngine::new(q1.clone()),
        CliffordEngine::new(q2.clone()),
        CliffordEngine::new(q.clone()),
    );
    // source basis: (S, T) with |S| ≡ |T| mod 2
    let mut source: Vec<(u32, u32)> = Vec::new();
    for parity in [0, 1] {
        for &s in &ordered_masks(a, Some(parity)) {
            for &t in &ordered_masks(b, Some(parity)) {
                source.push((s, t));
            }
        }
    }
    let target = ordered_masks(a + b, Some(0));
    let target_index: BTreeMap<u32, usize> = target.iter().enumerate().map(|(i, &m)| (m, i)).collect();
    let phi = |s: u32, t: u32| s | t << a;

    // bijectivity: images of basis elements as columns
    let cols: Vec<Vec<K::Elem>> = source
        .iter()
        .map(|&(s, t)| {
            let mut v = vec![k.zero(); target.len()];
            v[target_index[&phi(s, t)]] = k.one();
            v
        })
        .collect();
    let bijective = cols.len() == target.len()
        && Matrix::from_cols(&cols)?.rank(&k) == target.len();

    let d = source.len();
    let failure = par::find_map_first(d * d, |ix| {
        let ((s, t), (s2, t2)) = (source[ix / d], source[ix % d]);
        let sign_neg = t.count_ones() % 2 == 1 && s2.count_ones() % 2 == 1;
        let mut lhs: BTreeMap<u32, K::Elem> = BTreeMap::new();
        for (m1, c1) in e1.mul_mono(s, s2) {
            for (m2, c2) in e2.mul_mono(t, t2) {
                let mut c = k.mul(&c1, &c2);
                if sign_neg {
                    c = k.neg(&c);
                }
                let key = phi(m1, m2);
                let v = match lhs.remove(&key) {
                    Some(old) => k.add(&old, &c),
                    None => c,
                };
                if !k.is_zero(&v) {
                    lhs.insert(key, v);
                }
            }
        }
        let rhs: BTreeMap<u32, K::Elem> = e.mul_mono(phi(s, t), phi(s2, t2)).into_iter().collect();
        (lhs != rhs).then(|| {
            format!(
                "({}⊗{})·({}⊗{})",
                super::mask_label(s),
                super::mask_label(t),
                super::mask_label(s2),
                super::mask_label(t2)
            )
        })
    });
    Ok(OrthogonalSumReport {
        source_dim: d,
        target_dim: target.len(),
        pairs_checked: d * d,
        bijective,
        multiplicative: failure.is_none(),
        failure,
    })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HyperbolicSplitReport {
    pub m: usize,
    pub c0_dim: usize,
    pub center_split: bool,
    pub fiber_dims: Vec<usize>,
    pub fibers_central_simple: Vec<bool>,
}

impl HyperbolicSplitReport {
    pub fn ok(&self) -> bool {
        let expected = 1usize << (2 * (self.m - 1));
        self.center_split
            && self.fiber_dims == vec![expected, expected]
            && self.fibers_central_simple.iter().all(|&b| b)
            && self.c0_dim == 2 * expected
    }
}

/// C0(H(m)) over Q: the center splits and both fibers are central simple of
/// dimension (2^{m-1})².
pub fn hyperbolic_split_structure(m: usize) -> Result<HyperbolicSplitReport> {
    if m == 0 || m > 3 {
        return Err(Error::RankCap {
            what: "hyperbolic split structure",
            rank: 2 * m,
            cap: 6,
        });
    }
    let k = Rationals;
    let c0 = even_clifford(&QuadraticForm::hyperbolic(k, m))?;
    let a = &c0.algebra;
    let c = center(a);
    let mut report = HyperbolicSplitReport {
        m,
        c0_dim: a.dim(),
        center_split: c.split,
        fiber_dims: Vec::new(),
        fibers_central_simple: Vec::new(),
    };
    if let CenterShape::Split { idempotents } = &c.shape {
        for e in [&idempotents.0, &idempotents.1] {
            let span: Vec<_> = (0..a.dim()).map(|b| a.mul(&a.basis(b), e)).collect();
            let fiber = a.subalgebra(&span_basis(&k, &span), e)?;
            report.fiber_dims.push(fiber.dim());
            report.fibers_central_simple.push(is_central_simple(&fiber)?);
        }
    }
    Ok(report)
}

/// The map C0(λq) → C0(q), e_S ↦ λ^{|S|/2} e_S, is an algebra isomorphism.
pub fn verify_scaling_isomorphism<K: Field>(q: &QuadraticForm<K>, lambda: &K::Elem) -> Result<bool> {
    let k = q.field();
    if k.is_zero(lambda) {
        return Err(Error::Unsupported("scaling by zero".into()));
    }
    let src = even_clifford(&q.scale(lambda))?;
    let dst = even_clifford(q)?;
    let d = src.dim();
    let weight = |i: usize| k.pow(lambda, (src.masks()[i].count_ones() / 2) as u64);
    let image = |v: &[K::Elem]| -> Vec<K::Elem> {
        let mut out = vec![k.zero(); d];
        for (i, c) in v.iter().enumerate() {
            out[dst.index_of(src.masks()[i]).unwrap()] = k.mul(c, &weight(i));
        }
        out
    };
    Ok(par::all(d * d, |ix| {
        let (x, y) = (ix / d, ix % d);
        let lhs = image(&src.algebra.basis_product_dense(x, y));
        let rhs = dst.algebra.mul(
            &image(&src.algebra.basis(x)),
            &image(&src.algebra.basis(y)),
        );
        lhs == rhs
    }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rings::{ints, PrimeField};

    #[test]
    fn orthogonal_sum_examples() {
        let q = Rationals;
        let r = verify_orthogonal_sum(
            &QuadraticForm::diagonal(q, &ints(&q, &[1])),
            &QuadraticForm::diagonal(q, &ints(&q, &[-1])),
        )
        .unwrap();
        assert!(r.ok());
        assert_eq!((r.source_dim, r.target_dim), (2, 2));
        let f3 = PrimeField::new(3).unwrap();
        let h = QuadraticForm::hyperbolic(f3, 1);
        let r = verify_orthogonal_sum(&h, &h).unwrap();
        assert!(r.ok());
        assert_eq!(r.pairs_checked, 64);
        let r = verify_orthogonal_sum(
            &QuadraticForm::diagonal(f3, &ints(&f3, &[1, 2, 0])),
            &QuadraticForm::diagonal(f3, &ints(&f3, &[1, 1])),
        )
        .unwrap();
        assert!(r.ok());
        assert_eq!(r.source_dim, 16);
    }

    #[test]
    fn wrong_sign_rule_is_detected() {
        // sanity check of the oracle itself: dropping the sign breaks
        // multiplicativity as soon as both factors have odd parts
        let f5 = PrimeField::new(5).unwrap();
        let q1 = QuadraticForm::diagonal(f5, &ints(&f5, &[1]));
        let e1 = CliffordEngine::new(q1.clone());
        let e = CliffordEngine::new(q1.direct_sum(&q1).unwrap());
        // (e1⊗e1)(e1⊗e1) without sign = 1⊗1, but e1e2·e1e2 = -1
        assert_eq!(e1.mul_mono(1, 1), vec![(0, 1)]);
        assert_eq!(e.mul_mono(0b11, 0b11), vec![(0, 4)]);
    }

    #[test]
    fn hyperbolic_structures() {
        for (m, dim) in [(1, 1), (2, 4), (3, 16)] {
            let r = hyperbolic_split_structure(m).unwrap();
            assert!(r.ok(), "{r:?}");
            assert_eq!(r.fiber_dims, vec![dim, dim]);
        }
    }

    #[test]
    fn scaling_gives_isomorphic_even_algebras() {
        let f5 = PrimeField::new(5).unwrap();
        for d in [&[1i64, 2][..], &[1, 2, 3], &[1, 1, 2, 0]] {
            let q = QuadraticForm::diagonal(f5, &ints(&f5, d));
            for l in 1..5 {
                assert!(verify_scaling_isomorphism(&q, &l).unwrap());
            }
        }
    }
}
