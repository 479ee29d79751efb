use std::collections::HashMap;

use super::algebra::Sparse;
use super::{center::span_basis, even_clifford, mask_label, ordered_masks, CliffordAlgebra, CliffordEngine};
use crate::error::{Error, Result};
use crate::par;
use crate::quadform::QuadraticForm;
use crate::rings::Field;

/// C1(q): the odd part of the Clifford algebra as a C0(q)-bimodule, with the
/// pairing m : C1 ⊗ C1 → C0 given by Clifford multiplication.
#[derive(Debug, Clone)]
pub struct CliffordBimodule<K: Field> {
    pub even: CliffordAlgebra<K>,
    masks: Vec<u32>,
    labels: Vec<String>,
    /// (a even, x odd) ↦ a·x
    left: Vec<Sparse<K::Elem>>,
    /// (x odd, a even) ↦ x·a
    right: Vec<Sparse<K::Elem>>,
    /// (x odd, y odd) ↦ x·y in C0
    pairing: Vec<Sparse<K::Elem>>,
}

impl<K: Field> CliffordBimodule<K> {
    pub fn new(q: &QuadraticForm<K>) -> Result<Self> {
        let n = q.rank();
        if n > super::FULL_RANK_CAP {
            return Err(Error::RankCap {
                what: "Clifford bimodule",
                rank: n,
                cap: super::FULL_RANK_CAP,
            });
        }
        let even = even_clifford(q)?;
        let masks = ordered_masks(n, Some(1));
        let odd_index: HashMap<u32, usize> = masks.iter().enumerate().map(|(i, &m)| (m, i)).collect();
        let engine = even.engine().clone();
        let (de, d1) = (even.dim(), masks.len());
        let to_odd = |terms: Vec<(u32, K::Elem)>| {
            let mut v: Sparse<K::Elem> = terms.into_iter().map(|(m, c)| (odd_index[&m], c)).collect();
            v.sort_by_key(|(i, _)| *i);
            v
        };
        let to_even = |terms: Vec<(u32, K::Elem)>| {
            let mut v: Sparse<K::Elem> = terms
                .into_iter()
                .map(|(m, c)| (even.index_of(m).unwrap(), c))
                .collect();
            v.sort_by_key(|(i, _)| *i);
            v
        };
        let even_masks = even.masks().to_vec();
        let left = par::map_range(de * d1, |ix| {
            to_odd(engine.mul_mono(even_masks[ix / d1], masks[ix % d1]))
        });
        let right = par::map_range(d1 * de, |ix| {
            to_odd(engine.mul_mono(masks[ix / de], even_masks[ix % de]))
        });
        let pairing = par::map_range(d1 * d1, |ix| {
            to_even(engine.mul_mono(masks[ix / d1], masks[ix % d1]))
        });
        let labels = masks.iter().map(|&m| mask_label(m)).collect();
        Ok(CliffordBimodule {
            even,
            masks,
            labels,
            left,
            right,
            pairing,
        })
    }

    pub fn dim(&self) -> usize {
        self.masks.len()
    }
    pub fn labels(&self) -> &[String] {
        &self.labels
    }
    pub fn masks(&self) -> &[u32] {
        &self.masks
    }
    fn field(&self) -> &K {
        self.even.algebra.field()
    }

    /// Indices of the basis elements e_i, the image of E in C1.
    pub fn generator_indices(&self) -> Vec<usize> {
        (0..self.dim())
            .filter(|&i| self.masks[i].count_ones() == 1)
            .collect()
    }

    fn apply(
        &self,
        table: &[Sparse<K::Elem>],
        cols: usize,
        out_dim: usize,
        x: &[K::Elem],
        y: &[K::Elem],
    ) -> Vec<K::Elem> {
        let k = self.field();
        let mut out = vec![k.zero(); out_dim];
        for (i, xi) in x.iter().enumerate() {
            if k.is_zero(xi) {
                continue;
            }
            for (j, yj) in y.iter().enumerate() {
                if k.is_zero(yj) {
                    continue;
                }
                let c = k.mul(xi, yj);
                for (l, t) in &table[i * cols + j] {
                    out[*l] = k.add(&out[*l], &k.mul(&c, t));
                }
            }
        }
        out
    }

    /// a · x for a ∈ C0, x ∈ C1.
    pub fn left_act(&self, a: &[K::Elem], x: &[K::Elem]) -> Vec<K::Elem> {
        self.apply(&self.left, self.dim(), self.dim(), a, x)
    }
    /// x · a for x ∈ C1, a ∈ C0.
    pub fn right_act(&self, x: &[K::Elem], a: &[K::Elem]) -> Vec<K::Elem> {
        self.apply(&self.right, self.even.dim(), self.dim(), x, a)
    }
    /// m(x ⊗ y) ∈ C0.
    pub fn pair(&self, x: &[K::Elem], y: &[K::Elem]) -> Vec<K::Elem> {
        self.apply(&self.pairing, self.dim(), self.even.dim(), x, y)
    }

    fn odd_basis(&self, i: usize) -> Vec<K::Elem> {
        let k = self.field();
        let mut v = vec![k.zero(); self.dim()];
        v[i] = k.one();
        v
    }

    /// Unitality and associativity of both actions, the bimodule
    /// compatibility (a·x)·b = a·(x·b), balance m(x·a, y) = m(x, a·y), and
    /// m(x, y)·z = x·m(y, z), on all basis triples.
    pub fn check_axioms(&self) -> Result<()> {
        let c0 = &self.even.algebra;
        let (de, d1) = (c0.dim(), self.dim());
        let unit = c0.unit().to_vec();
        for x in 0..d1 {
            let xv = self.odd_basis(x);
            if self.left_act(&unit, &xv) != xv || self.right_act(&xv, &unit) != xv {
                return Err(Error::Falsified(format!(
                    "unit does not act trivially on {}",
                    self.labels[x]
                )));
            }
        }
        let bad = par::find_map_first(de * d1, |ix| {
            let (a, x) = (ix / d1, ix % d1);
            let av = c0.basis(a);
            let xv = self.odd_basis(x);
            let ax = self.left_act(&av, &xv);
            let xa = self.right_act(&xv, &av);
            for b in 0..de {
                let bv = c0.basis(b);
                if self.left_act(&c0.mul(&bv, &av), &xv) != self.left_act(&bv, &ax) {
                    return Some(format!("left action associativity at ({}, {})", b, a));
                }
                if self.right_act(&xv, &c0.mul(&av, &bv)) != self.right_act(&xa, &bv) {
                    return Some(format!("right action associativity at ({}, {})", a, b));
                }
                if self.right_act(&ax, &bv) != self.left_act(&av, &self.right_act(&xv, &bv)) {
                    return Some(format!("bimodule compatibility at ({}, {})", a, b));
                }
            }
            for y in 0..d1 {
                let yv = self.odd_basis(y);
                if self.pair(&xa, &yv) != self.pair(&xv, &self.left_act(&av, &yv)) {
                    return Some(format!("pairing is not balanced at ({}, {})", x, y));
                }
            }
            None
        });
        if let Some(msg) = bad {
            return Err(Error::Falsified(msg));
        }
        let bad = par::find_map_first(d1 * d1, |ix| {
            let (x, y) = (ix / d1, ix % d1);
            let (xv, yv) = (self.odd_basis(x), self.odd_basis(y));
            let m = self.pair(&xv, &yv);
            (0..d1).find_map(|z| {
                let zv = self.odd_basis(z);
                (self.left_act(&m, &zv) != self.right_act(&xv, &self.pair(&yv, &zv)))
                    .then(|| format!("m(x,y)z = x m(y,z) fails at ({x}, {y}, {z})"))
            })
        });
        match bad {
            Some(msg) => Err(Error::Falsified(msg)),
            None => Ok(()),
        }
    }

    /// Dimension of the span of m(C1 ⊗ C1) in C0.
    pub fn pairing_rank(&self) -> usize {
        let k = self.field();
        let d1 = self.dim();
        let images: Vec<Vec<K::Elem>> = (0..d1 * d1)
            .map(|ix| self.pair(&self.odd_basis(ix / d1), &self.odd_basis(ix % d1)))
            .collect();
        span_basis(k, &images).len()
    }

    pub fn pairing_is_surjective(&self) -> bool {
        self.pairing_rank() == self.even.dim()
    }

    /// Compare the left action obtained by inserting generators into words,
    /// (v ⊗ u) * (w ⊗ τ) = v ⊗ u ⊗ w ⊗ τ, with the table left action. Each even
    /// monomial is applied one generator pair at a time. Returns the first
    /// disagreement as (even label, odd label).
    pub fn star_action_disagreement(&self) -> Result<Option<(String, String)>> {
        let q = self.even.engine().form();
        if q.rank() > 3 {
            return Err(Error::RankCap {
                what: "word-level left action check",
                rank: q.rank(),
                cap: 3,
            });
        }
        let engine: &CliffordEngine<K> = self.even.engine();
        let c0 = &self.even.algebra;
        let k = self.field();
        for (a, &am) in self.even.masks().iter().enumerate() {
            let pairs: Vec<usize> = (0..32).filter(|i| am >> i & 1 == 1).collect();
            for (x, &xm) in self.masks.iter().enumerate() {
                // a = g1 g2 ... acts as g1 * (g2 * (... * x)), which inserts the
                // pairs in order in front of the odd word
                let mut word: Vec<usize> = Vec::new();
                let odd: Vec<usize> = (0..32).filter(|i| xm >> i & 1 == 1).collect();
                for pair in pairs.chunks(2) {
                    word.extend_from_slice(pair);
                }
                word.extend(odd);
                let mut by_words = vec![k.zero(); self.dim()];
                for (m, c) in engine.eval_word(&word) {
                    let i = self.masks.iter().position(|&mm| mm == m).unwrap();
                    by_words[i] = k.add(&by_words[i], &c);
                }
                if by_words != self.left_act(&c0.basis(a), &self.odd_basis(x)) {
                    return Ok(Some((c0.labels()[a].clone(), self.labels[x].clone())));
                }
            }
        }
        Ok(None)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rings::{ints, PrimeField, Rationals};

    #[test]
    fn bimodule_examples() {
        let q = Rationals;
        let one = CliffordBimodule::new(&QuadraticForm::diagonal(q, &ints(&q, &[1]))).unwrap();
        assert_eq!(one.dim(), 1);
        let e = one.odd_basis(0);
        assert_eq!(one.pair(&e, &e), one.even.algebra.unit().to_vec());
        assert_eq!(one.generator_indices(), vec![0]);

        let h = CliffordBimodule::new(&QuadraticForm::hyperbolic(q, 1)).unwrap();
        h.check_axioms().unwrap();
        assert_eq!(h.pairing_rank(), 2);
        assert!(h.pairing_is_surjective());

        let z = CliffordBimodule::new(&QuadraticForm::zero(q, 2)).unwrap();
        assert!(!z.pairing_is_surjective());
    }

    #[test]
    fn axioms_hold_for_degenerate_forms() {
        let f3 = PrimeField::new(3).unwrap();
        let b = CliffordBimodule::new(&QuadraticForm::diagonal(f3, &ints(&f3, &[1, 2, 0, 1]))).unwrap();
        assert_eq!(b.dim(), 8);
        b.check_axioms().unwrap();
    }

    #[test]
    fn word_insertion_matches_left_multiplication() {
        let f5 = PrimeField::new(5).unwrap();
        for d in [&[1i64][..], &[1, 2], &[1, 2, 3], &[0, 1, 4]] {
            let b = CliffordBimodule::new(&QuadraticForm::diagonal(f5, &ints(&f5, d))).unwrap();
            assert_eq!(b.star_action_disagreement().unwrap(), None);
        }
        let h = CliffordBimodule::new(&QuadraticForm::hyperbolic(Rationals, 1)).unwrap();
        assert_eq!(h.star_action_disagreement().unwrap(), None);
    }
}
