//! Clifford algebras of quadratic forms as structure-constant algebras.
//!
//! Monomials e_S = e_{s1} e_{s2} ... (s1 < s2 < ...) are bitmasks. Products
//! are rewritten to this normal form with e_i e_i = c_ii and
//! e_k e_j = b(e_j, e_k) - e_j e_k, which needs no division and so works in
//! every characteristic and for degenerate forms.

mod algebra;
mod bimodule;
mod center;
mod checks;

pub use algebra::{AlgebraTable, Sparse, StructuredAlgebra};
pub use bimodule::CliffordBimodule;
pub use center::{
    azumaya_over_center, center, is_central_simple, AzumayaReport, CenterData, CenterShape,
    FiberReport,
};
pub use checks::{
    hyperbolic_split_structure, verify_orthogonal_sum, verify_scaling_isomorphism,
    HyperbolicSplitReport, OrthogonalSumReport,
};

use std::collections::{BTreeMap, HashMap};

use crate::error::{Error, Result};
use crate::par;
use crate::quadform::QuadraticForm;
use crate::rings::Field;

pub const FULL_RANK_CAP: usize = 6;
pub const EVEN_RANK_CAP: usize = 7;

/// Normal-form multiplication of Clifford monomials.
#[derive(Debug, Clone)]
pub struct CliffordEngine<K: Field> {
    q: QuadraticForm<K>,
}

impl<K: Field> CliffordEngine<K> {
    pub fn new(q: QuadraticForm<K>) -> Self {
        CliffordEngine { q }
    }

    pub fn form(&self) -> &QuadraticForm<K> {
        &self.q
    }

    /// e_S · e_j.
    pub fn mul_gen(&self, s: u32, j: usize) -> Vec<(u32, K::Elem)> {
        let k = self.q.field();
        if s == 0 {
            return vec![(1 << j, k.one())];
        }
        let top = 31 - s.leading_zeros() as usize;
        let rest = s & !(1 << top);
        if top < j {
            return vec![(s | 1 << j, k.one())];
        }
        if top == j {
            let c = self.q.coeff(j, j);
            return if k.is_zero(c) {
                Vec::new()
            } else {
                vec![(rest, c.clone())]
            };
        }
        // e_rest e_top e_j = b_{j,top} e_rest - (e_rest e_j) e_top
        let mut out: BTreeMap<u32, K::Elem> = BTreeMap::new();
        let b = self.q.coeff(j, top);
        if !k.is_zero(b) {
            out.insert(rest, b.clone());
        }
        for (m, c) in self.mul_gen(rest, j) {
            let key = m | 1 << top;
            let v = k.neg(&c);
            accumulate(k, &mut out, key, v);
        }
        out.into_iter().collect()
    }

    /// e_S · e_T.
    pub fn mul_mono(&self, s: u32, t: u32) -> Vec<(u32, K::Elem)> {
        let k = self.q.field();
        let mut acc: Vec<(u32, K::Elem)> = vec![(s, k.one())];
        let mut rest = t;
        while rest != 0 {
            let j = rest.trailing_zeros() as usize;
            rest &= rest - 1;
            let mut next: BTreeMap<u32, K::Elem> = BTreeMap::new();
            for (m, c) in &acc {
                for (m2, c2) in self.mul_gen(*m, j) {
                    accumulate(k, &mut next, m2, k.mul(c, &c2));
                }
            }
            acc = next.into_iter().collect();
        }
        acc
    }

    /// Evaluate a word e_{w1} e_{w2} ... in normal form.
    pub fn eval_word(&self, word: &[usize]) -> Vec<(u32, K::Elem)> {
        let k = self.q.field();
        let mut acc: Vec<(u32, K::Elem)> = vec![(0, k.one())];
        for &j in word {
            let mut next: BTreeMap<u32, K::Elem> = BTreeMap::new();
            for (m, c) in &acc {
                for (m2, c2) in self.mul_gen(*m, j) {
                    accumulate(k, &mut next, m2, k.mul(c, &c2));
                }
            }
            acc = next.into_iter().collect();
        }
        acc
    }
}

fn accumulate<K: Field>(k: &K, map: &mut BTreeMap<u32, K::Elem>, key: u32, v: K::Elem) {
    match map.get_mut(&key) {
        Some(c) => {
            *c = k.add(c, &v);
            if k.is_zero(c) {
                map.remove(&key);
            }
        }
        None => {
            if !k.is_zero(&v) {
                map.insert(key, v);
            }
        }
    }
}

/// Subsets of {0..n-1} with the given parity filter, ordered by size and
/// then lexicographically by sorted elements.
pub(crate) fn ordered_masks(n: usize, parity: Option<u32>) -> Vec<u32> {
    let mut masks: Vec<u32> = (0..1u32 << n)
        .filter(|m| parity.is_none_or(|p| m.count_ones() % 2 == p))
        .collect();
    masks.sort_by_key(|&m| {
        let elems: Vec<u32> = (0..n as u32).filter(|i| m >> i & 1 == 1).collect();
        (m.count_ones(), elems)
    });
    masks
}

pub fn mask_label(m: u32) -> String {
    if m == 0 {
        return "1".into();
    }
    (0..32)
        .filter(|i| m >> i & 1 == 1)
        .map(|i| format!("e{}", i + 1))
        .collect()
}

/// A Clifford-type algebra together with the monomial behind each basis
/// element.
#[derive(Debug, Clone)]
pub struct CliffordAlgebra<K: Field> {
    pub algebra: StructuredAlgebra<K>,
    masks: Vec<u32>,
    index: HashMap<u32, usize>,
    engine: CliffordEngine<K>,
}

impl<K: Field> CliffordAlgebra<K> {
    fn build(q: &QuadraticForm<K>, masks: Vec<u32>, even: bool, verify: bool) -> Result<Self> {
        let k = q.field().clone();
        let engine = CliffordEngine::new(q.clone());
        let index: HashMap<u32, usize> = masks.iter().enumerate().map(|(i, &m)| (m, i)).collect();
        let d = masks.len();
        let table = par::map_range(d * d, |ab| {
            let (a, b) = (ab / d, ab % d);
            let mut v: Vec<(usize, K::Elem)> = engine
                .mul_mono(masks[a], masks[b])
                .into_iter()
                .map(|(m, c)| (index[&m], c))
                .collect();
            v.sort_by_key(|(i, _)| *i);
            v
        });
        let labels = masks.iter().map(|&m| mask_label(m)).collect();
        let degrees = masks
            .iter()
            .map(|m| if even { m.count_ones() as usize / 2 } else { m.count_ones() as usize })
            .collect();
        let mut unit = vec![k.zero(); d];
        unit[index[&0]] = k.one();
        let algebra = if verify {
            StructuredAlgebra::new(k, labels, table, unit, Some(degrees))?
        } else {
            StructuredAlgebra::new_unchecked(k, labels, table, unit, Some(degrees))?
        };
        Ok(CliffordAlgebra {
            algebra,
            masks,
            index,
            engine,
        })
    }

    pub fn masks(&self) -> &[u32] {
        &self.masks
    }
    pub fn index_of(&self, mask: u32) -> Option<usize> {
        self.index.get(&mask).copied()
    }
    pub fn engine(&self) -> &CliffordEngine<K> {
        &self.engine
    }
    pub fn dim(&self) -> usize {
        self.algebra.dim()
    }

    /// Coordinates of a normal-form combination of monomials.
    pub fn vector(&self, terms: &[(u32, K::Elem)]) -> Vec<K::Elem> {
        let mut v = self.algebra.zero_vec();
        let k = self.algebra.field();
        for (m, c) in terms {
            let i = self.index[m];
            v[i] = k.add(&v[i], c);
        }
        v
    }
}

/// The full Clifford algebra, dimension 2^n, for n ≤ 6.
pub fn full_clifford<K: Field>(q: &QuadraticForm<K>) -> Result<CliffordAlgebra<K>> {
    let n = q.rank();
    if n > FULL_RANK_CAP {
        return Err(Error::RankCap {
            what: "full Clifford algebra",
            rank: n,
            cap: FULL_RANK_CAP,
        });
    }
    CliffordAlgebra::build(q, ordered_masks(n, None), false, true)
}

/// The even Clifford algebra C0(q), dimension 2^{n-1}, for n ≤ 7. Only
/// products of even monomials are formed, so rank 7 never touches the
/// 128-dimensional full algebra.
pub fn even_clifford<K: Field>(q: &QuadraticForm<K>) -> Result<CliffordAlgebra<K>> {
    even_clifford_with(q, true)
}

/// `even_clifford` without the associativity verification, for callers
/// that verify separately.
pub fn even_clifford_unverified<K: Field>(q: &QuadraticForm<K>) -> Result<CliffordAlgebra<K>> {
    even_clifford_with(q, false)
}

fn even_clifford_with<K: Field>(q: &QuadraticForm<K>, verify: bool) -> Result<CliffordAlgebra<K>> {
    let n = q.rank();
    if n > EVEN_RANK_CAP {
        return Err(Error::RankCap {
            what: "even Clifford algebra",
            rank: n,
            cap: EVEN_RANK_CAP,
        });
    }
    CliffordAlgebra::build(q, ordered_masks(n, Some(0)), true, verify)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rings::{ints, ExtensionField, Matrix, PrimeField, Rationals};

    fn diag<K: Field>(k: &K, d: &[i64]) -> QuadraticForm<K> {
        QuadraticForm::diagonal(k.clone(), &ints(k, d))
    }

    #[test]
    fn full_clifford_examples() {
        let q = Rationals;
        let c = full_clifford(&diag(&q, &[1])).unwrap();
        assert_eq!(c.dim(), 2);
        let e1 = c.index_of(1).unwrap();
        assert_eq!(c.algebra.basis_product_dense(e1, e1), c.algebra.unit().to_vec());

        let h = full_clifford(&QuadraticForm::hyperbolic(q, 1)).unwrap();
        let (e1, e2) = (h.index_of(1).unwrap(), h.index_of(2).unwrap());
        let a = &h.algebra;
        assert!(a.is_zero(&a.basis_product_dense(e1, e1)));
        assert!(a.is_zero(&a.basis_product_dense(e2, e2)));
        let anti = a.add(&a.basis_product_dense(e1, e2), &a.basis_product_dense(e2, e1));
        assert_eq!(anti, a.unit().to_vec());

        // q = 0: exterior algebra
        let ext = full_clifford(&QuadraticForm::zero(q, 2)).unwrap();
        for i in 0..4 {
            if ext.masks()[i] != 0 {
                assert!(ext.algebra.is_zero(&ext.algebra.basis_product_dense(i, i)));
            }
        }
        assert!(matches!(
            full_clifford(&QuadraticForm::zero(q, 7)),
            Err(Error::RankCap { .. })
        ));
    }

    #[test]
    fn even_clifford_examples() {
        let q = Rationals;
        assert_eq!(even_clifford(&diag(&q, &[1, 2, 3, 4])).unwrap().dim(), 8);
        let h = even_clifford(&QuadraticForm::hyperbolic(q, 1)).unwrap();
        assert_eq!(h.dim(), 2);
        let z = h.index_of(0b11).unwrap();
        assert_eq!(h.algebra.basis_product_dense(z, z), h.algebra.basis(z));
        let f2 = PrimeField::new(2).unwrap();
        let seven = QuadraticForm::hyperbolic(f2, 3)
            .direct_sum(&diag(&f2, &[1]))
            .unwrap();
        let c = even_clifford(&seven).unwrap();
        assert_eq!(c.dim(), 64);
        assert_eq!(c.algebra.degrees().unwrap()[63], 3);
    }

    #[test]
    fn non_diagonal_relations() {
        // q = x^2 + xy + y^2 over F_2 with cross term: e1 e2 + e2 e1 = 1
        let f2 = PrimeField::new(2).unwrap();
        let m = Matrix::from_rows(vec![vec![1, 1], vec![0, 1]]).unwrap();
        let q = QuadraticForm::from_upper(f2, m).unwrap();
        let c = full_clifford(&q).unwrap();
        let a = &c.algebra;
        let (e1, e2) = (c.index_of(1).unwrap(), c.index_of(2).unwrap());
        let anti = a.add(&a.basis_product_dense(e1, e2), &a.basis_product_dense(e2, e1));
        assert_eq!(anti, a.unit().to_vec());
        assert_eq!(a.basis_product_dense(e2, e2), a.unit().to_vec());
    }

    #[test]
    fn base_change_preserves_dimension() {
        let f3 = PrimeField::new(3).unwrap();
        let f9 = ExtensionField::new(3, 2).unwrap();
        for d in [&[1i64, 1, 1][..], &[1, 2, 0, 1], &[0, 0, 1, 1, 2]] {
            let a = even_clifford(&diag(&f3, d)).unwrap();
            let b = even_clifford(&diag(&f9, d)).unwrap();
            assert_eq!(a.dim(), b.dim());
        }
    }
}
