//! Totally isotropic subspaces over finite fields, the two rulings of
//! lagrangians, and their comparison with the center of C0.

use std::collections::HashMap;

use crate::clifford::{center, even_clifford};
use crate::error::{Error, Result};
use crate::par;
use crate::quadform::QuadraticForm;
use crate::rings::{ExtensionField, Field, Matrix, PrimeField};

pub const MAX_RANK: usize = 6;
/// Largest field order accepted by the enumeration.
pub const MAX_ORDER: u64 = 25;
/// Cap on the pairwise ruling check (pairs of lagrangians).
pub const MAX_PAIRS: u64 = 1 << 26;

/// A subspace, as the rows of its reduced row echelon basis.
pub type Subspace<E> = Vec<Vec<E>>;

/// Every (r+1)-dimensional subspace on which q vanishes identically, in
/// reduced row echelon form.
pub fn enumerate_isotropic<K: Field>(q: &QuadraticForm<K>, r: usize) -> Result<Vec<Subspace<K::Elem>>> {
    let k = q.field();
    let n = q.rank();
    let elems = k
        .elements()
        .ok_or_else(|| Error::Unsupported("isotropic subspaces are enumerated over finite fields".into()))?;
    let order = elems.len() as u64;
    if n > MAX_RANK || order > MAX_ORDER {
        return Err(Error::BudgetExceeded(format!(
            "rank {n} over a field of order {order} (caps {MAX_RANK}, {MAX_ORDER})"
        )));
    }
    let dim = r + 1;
    if dim > n {
        return Ok(Vec::new());
    }
    let search = Search { q, elems: &elems };
    // rows are chosen last to first, so later pivots are known when a row
    // is filled in
    let tops: Vec<(usize, Vec<K::Elem>)> = (dim - 1..n)
        .flat_map(|p| search.rows(p, &[], &[]).into_iter().map(move |v| (p, v)))
        .collect();
    let parts = par::map(&tops, |(p, v)| {
        let mut out = Vec::new();
        search.extend(dim - 1, vec![*p], vec![v.clone()], &mut out);
        out
    });
    Ok(parts.into_iter().flatten().collect())
}

struct Search<'a, K: Field> {
    q: &'a QuadraticForm<K>,
    elems: &'a [K::Elem],
}

impl<K: Field> Search<'_, K> {
    /// Isotropic rows with pivot p, zero at the later pivots, orthogonal to
    /// the rows already chosen.
    fn rows(&self, p: usize, later: &[usize], chosen: &[Vec<K::Elem>]) -> Vec<Vec<K::Elem>> {
        let k = self.q.field();
        let n = self.q.rank();
        let free: Vec<usize> = (p + 1..n).filter(|c| !later.contains(c)).collect();
        let base = self.elems.len();
        let total = base.pow(free.len() as u32);
        let mut out = Vec::new();
        for mut idx in 0..total {
            let mut v = vec![k.zero(); n];
            v[p] = k.one();
            for &c in free.iter().rev() {
                v[c] = self.elems[idx % base].clone();
                idx /= base;
            }
            if k.is_zero(&self.q.evaluate(&v).unwrap())
                && chosen.iter().all(|w| k.is_zero(&self.q.polar(&v, w).unwrap()))
            {
                out.push(v);
            }
        }
        out
    }

    /// `rows` holds rows i..dim-1 (last first); fill in row i-1.
    fn extend(&self, i: usize, pivots: Vec<usize>, rows: Vec<Vec<K::Elem>>, out: &mut Vec<Subspace<K::Elem>>) {
        if i == 0 {
            let mut basis = rows;
            basis.reverse();
            // zero at the other pivots by construction, so already reduced
            out.push(basis);
            return;
        }
        let top = *pivots.last().unwrap();
        for p in i - 1..top {
            for v in self.rows(p, &pivots, &rows) {
                let mut pv = pivots.clone();
                pv.push(p);
                let mut rv = rows.clone();
                rv.push(v);
                self.extend(i - 1, pv, rv, out);
            }
        }
    }
}

/// dim(U ∩ V) for subspaces of the same ambient space.
pub fn intersection_dim<K: Field>(k: &K, u: &Subspace<K::Elem>, v: &Subspace<K::Elem>) -> usize {
    let stacked: Vec<Vec<K::Elem>> = u.iter().chain(v.iter()).cloned().collect();
    u.len() + v.len() - Matrix::from_rows(stacked).unwrap().rank(k)
}

/// Canonical basis of the span of `rows`.
pub fn canonical<K: Field>(k: &K, rows: &[Vec<K::Elem>]) -> Subspace<K::Elem> {
    let (r, pivots) = Matrix::from_rows(rows.to_vec()).unwrap().rref(k);
    r.to_rows().into_iter().take(pivots.len()).collect()
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Rulings {
    /// Component label (0 or 1) of each lagrangian; the first is 0.
    pub labels: Vec<u8>,
    pub sizes: (usize, usize),
}

/// Split lagrangians of a regular rank-2m form by the parity of
/// dim(U ∩ V) − m, checking that this gives an equivalence relation with
/// exactly two classes.
pub fn ruling_components<K: Field>(k: &K, lagrangians: &[Subspace<K::Elem>], m: usize) -> Result<Rulings> {
    let n = lagrangians.len();
    if n < 2 {
        return Err(Error::Falsified(format!(
            "{n} lagrangian(s): the parity rule needs at least two"
        )));
    }
    if (n as u64).saturating_mul(n as u64) > MAX_PAIRS {
        return Err(Error::BudgetExceeded(format!("{n} lagrangians for the pairwise ruling check")));
    }
    let same = |a: usize, b: usize| intersection_dim(k, &lagrangians[a], &lagrangians[b]) % 2 == m % 2;
    let labels: Vec<u8> = par::map_range(n, |i| if same(0, i) { 0 } else { 1 });
    let ones = labels.iter().filter(|&&l| l == 1).count();
    if ones == 0 {
        return Err(Error::Falsified("parity rule gives a single class".into()));
    }
    let bad = par::find_map_first(n * n, |ix| {
        let (a, b) = (ix / n, ix % n);
        (a < b && same(a, b) != (labels[a] == labels[b])).then_some((a, b))
    });
    if let Some((a, b)) = bad {
        return Err(Error::Falsified(format!(
            "parity relation is not transitive (lagrangians {a} and {b})"
        )));
    }
    Ok(Rulings {
        sizes: (n - ones, ones),
        labels,
    })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SteinReport {
    pub rank: usize,
    pub order: u64,
    pub delta: String,
    pub delta_square: bool,
    pub center_split: bool,
    /// Lagrangians over F_q and their ruling sizes.
    pub lagrangians: usize,
    pub components: Option<(usize, usize)>,
    /// Lagrangians over F_{q²} and the behaviour of Frobenius on rulings.
    pub extension_lagrangians: Option<usize>,
    pub frobenius_swaps: Option<bool>,
    pub frobenius_involution: Option<bool>,
    pub agrees: bool,
}

/// Compare the rulings of a regular even-rank form over F_p with the center of
/// C0: δ square ⇔ two rulings over F_p; δ nonsquare ⇔ Frobenius swaps the two
/// rulings over F_{p²}. The F_{p²} check also runs for split forms of rank 4.
pub fn stein_vs_center(q: &QuadraticForm<PrimeField>) -> Result<SteinReport> {
    let k = *q.field();
    let n = q.rank();
    if n % 2 == 1 || n == 0 || n > MAX_RANK {
        return Err(Error::Unsupported(format!("rank {n}: need even rank 2..={MAX_RANK}")));
    }
    if k.characteristic() == 2 {
        return Err(Error::Unsupported("characteristic 2".into()));
    }
    if q.radical_dim() != 0 {
        return Err(Error::Unsupported("the form must be regular".into()));
    }
    let m = n / 2;
    let c = center(&even_clifford(q)?.algebra);
    let delta = c.delta.ok_or_else(|| Error::UnexpectedCenter("no δ for a regular form".into()))?;
    let delta_square = k.is_square(&delta);
    let base = enumerate_isotropic(q, m - 1)?;
    let components = if delta_square {
        let r = ruling_components(&k, &base, m)?;
        Some(r.sizes)
    } else {
        None
    };
    let mut report = SteinReport {
        rank: n,
        order: k.modulus() as u64,
        delta: k.format(&delta),
        delta_square,
        center_split: c.split,
        lagrangians: base.len(),
        components,
        extension_lagrangians: None,
        frobenius_swaps: None,
        frobenius_involution: None,
        agrees: false,
    };
    if !delta_square || n <= 4 {
        let f = ExtensionField::new(k.modulus() as u64, 2)?;
        let lifted = QuadraticForm::from_upper(f.clone(), q.coeffs().map(|&x| f.embed(x)))?;
        let ext = enumerate_isotropic(&lifted, m - 1)?;
        let rulings = ruling_components(&f, &ext, m)?;
        let index: HashMap<&Subspace<Vec<u32>>, usize> = ext.iter().enumerate().map(|(i, u)| (u, i)).collect();
        let frob = |u: &Subspace<Vec<u32>>| {
            let rows: Vec<Vec<Vec<u32>>> = u.iter().map(|r| r.iter().map(|x| f.frobenius(x)).collect()).collect();
            canonical(&f, &rows)
        };
        let images: Vec<usize> = par::map(&ext, |u| index[&frob(u)]);
        let swaps: Vec<bool> = (0..ext.len()).map(|i| rulings.labels[i] != rulings.labels[images[i]]).collect();
        report.extension_lagrangians = Some(ext.len());
        report.frobenius_swaps = if swaps.iter().all(|&s| s) {
            Some(true)
        } else if swaps.iter().all(|&s| !s) {
            Some(false)
        } else {
            return Err(Error::Falsified("Frobenius neither fixes nor swaps the rulings".into()));
        };
        report.frobenius_involution = Some((0..ext.len()).all(|i| images[images[i]] == i));
    }
    report.agrees = report.center_split == delta_square
        && match report.components {
            Some((a, b)) => a > 0 && b > 0,
            None => base.is_empty(),
        }
        && report.frobenius_swaps.is_none_or(|s| s == !delta_square)
        && report.frobenius_involution != Some(false);
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rings::ints;
    use crate::splitting::ProjectivePoints;

    fn diag(k: PrimeField, d: &[i64]) -> QuadraticForm<PrimeField> {
        QuadraticForm::diagonal(k, &ints(&k, d))
    }

    #[test]
    fn lagrangian_planes_of_split_rank4() {
        for p in [2u64, 3, 5] {
            let k = PrimeField::new(p).unwrap();
            let l = enumerate_isotropic(&QuadraticForm::hyperbolic(k, 2), 1).unwrap();
            assert_eq!(l.len() as u64, 2 * (p + 1));
            let r = ruling_components(&k, &l, 2).unwrap();
            assert_eq!(r.sizes, (p as usize + 1, p as usize + 1));
        }
    }

    #[test]
    fn no_planes_in_a_nonsplit_rank4_form() {
        let f3 = PrimeField::new(3).unwrap();
        assert!(enumerate_isotropic(&diag(f3, &[1, 1, 1, 2]), 1).unwrap().is_empty());
    }

    #[test]
    fn isotropic_lines_are_quadric_points() {
        let f5 = PrimeField::new(5).unwrap();
        for d in [&[1i64, 2, 3][..], &[1, 1, 1, 1], &[1, 0, 2]] {
            let q = diag(f5, d);
            let pts = ProjectivePoints::new(f5.elements().unwrap(), q.rank()).unwrap();
            let zeros = (0..pts.len())
                .filter(|&i| q.evaluate(&pts.get(i)).unwrap() == 0)
                .count();
            assert_eq!(enumerate_isotropic(&q, 0).unwrap().len(), zeros);
        }
    }

    #[test]
    fn subspaces_are_isotropic_and_distinct() {
        let f3 = PrimeField::new(3).unwrap();
        let q = QuadraticForm::hyperbolic(f3, 3);
        let l = enumerate_isotropic(&q, 2).unwrap();
        // 2 (q+1)(q²+1)
        assert_eq!(l.len(), 80);
        for u in &l {
            assert_eq!(canonical(&f3, u), *u);
            for a in u {
                assert_eq!(q.evaluate(a).unwrap(), 0);
                assert!(u.iter().all(|b| q.polar(a, b).unwrap() == 0));
            }
        }
        let set: std::collections::HashSet<_> = l.iter().collect();
        assert_eq!(set.len(), l.len());
        assert_eq!(ruling_components(&f3, &l, 3).unwrap().sizes, (40, 40));
    }

    #[test]
    fn rank6_over_f2() {
        let f2 = PrimeField::new(2).unwrap();
        let l = enumerate_isotropic(&QuadraticForm::hyperbolic(f2, 3), 2).unwrap();
        assert_eq!(l.len(), 30);
        assert_eq!(ruling_components(&f2, &l, 3).unwrap().sizes, (15, 15));
    }

    #[test]
    fn single_lagrangian_is_rejected() {
        let f3 = PrimeField::new(3).unwrap();
        let l = enumerate_isotropic(&QuadraticForm::hyperbolic(f3, 2), 1).unwrap();
        assert!(ruling_components(&f3, &l[..1], 2).is_err());
    }

    #[test]
    fn stein_examples() {
        let f5 = PrimeField::new(5).unwrap();
        let r = stein_vs_center(&diag(f5, &[1, 1, 1, 1])).unwrap();
        assert!(r.delta_square && r.center_split && r.agrees);
        assert_eq!(r.components, Some((6, 6)));
        assert_eq!(r.frobenius_swaps, Some(false));
        let r = stein_vs_center(&diag(f5, &[1, 1, 1, 2])).unwrap();
        assert!(!r.delta_square && !r.center_split && r.agrees, "{r:?}");
        assert_eq!(r.lagrangians, 0);
        assert_eq!(r.extension_lagrangians, Some(52));
        assert_eq!((r.frobenius_swaps, r.frobenius_involution), (Some(true), Some(true)));
        let f3 = PrimeField::new(3).unwrap();
        let r = stein_vs_center(&QuadraticForm::hyperbolic(f3, 1)).unwrap();
        assert!(r.agrees && r.center_split);
        assert_eq!(r.components, Some((1, 1)));
    }
}
