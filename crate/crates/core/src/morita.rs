//! The module P = C0(q′) ⊕ C1(q′), its endomorphism algebra, and the
//! explicit isomorphism C0(H ⊥ q′) ≅ End_{C0(q′)}(P).
//!
//! P is realized inside the full Clifford algebra of q = H ⊥ q′, with u, v the
//! hyperbolic generators (b(u, v) = 1) and e = vu idempotent:
//! P = vu·C0(q′) ⊕ u·C1(q′). It is stable under left multiplication by
//! C0(q) and right multiplication by C0(q′), and as a right module it is
//! C(q′) itself via vu·a ↦ a, u·c ↦ c.

use crate::clifford::{
    center, even_clifford, full_clifford, mask_label, CliffordAlgebra, CliffordEngine,
    StructuredAlgebra,
};
use crate::clifford::Sparse;
use crate::error::{Error, Result};
use crate::par;
use crate::quadform::QuadraticForm;
use crate::rings::{Field, Matrix};

pub const MORITA_RANK_CAP: usize = 4;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Summand {
    Even,
    Odd,
}

/// A right module over a C0(q′), given by its action on basis elements.
#[derive(Debug, Clone)]
pub struct RightModule<K: Field> {
    pub algebra: CliffordAlgebra<K>,
    /// C(q′) monomials: even masks first, then odd.
    masks: Vec<u32>,
    tags: Vec<Summand>,
    labels: Vec<String>,
    /// (x, a) ↦ x·a, indexed x·dim(A) + a.
    action: Vec<Sparse<K::Elem>>,
}

impl<K: Field> RightModule<K> {
    pub fn dim(&self) -> usize {
        self.masks.len()
    }
    pub fn tags(&self) -> &[Summand] {
        &self.tags
    }
    pub fn labels(&self) -> &[String] {
        &self.labels
    }
    pub fn masks(&self) -> &[u32] {
        &self.masks
    }
    fn field(&self) -> &K {
        self.algebra.algebra.field()
    }

    pub fn act(&self, x: &[K::Elem], a: &[K::Elem]) -> Vec<K::Elem> {
        let k = self.field();
        let da = self.algebra.dim();
        let mut out = vec![k.zero(); self.dim()];
        for (i, xi) in x.iter().enumerate() {
            if k.is_zero(xi) {
                continue;
            }
            for (j, aj) in a.iter().enumerate() {
                if k.is_zero(aj) {
                    continue;
                }
                let c = k.mul(xi, aj);
                for (l, t) in &self.action[i * da + j] {
                    out[*l] = k.add(&out[*l], &k.mul(&c, t));
                }
            }
        }
        out
    }

    /// Matrix of x ↦ x·a (column x holds the coordinates of x·a).
    pub fn right_matrix(&self, a: &[K::Elem]) -> Matrix<K::Elem> {
        let k = self.field();
        let d = self.dim();
        let cols: Vec<Vec<K::Elem>> = (0..d).map(|x| self.act(&unit_vec(k, d, x), a)).collect();
        Matrix::from_cols(&cols).unwrap()
    }

    /// Unital action and (x·a)·b = x·(ab) on all basis triples.
    pub fn check_axioms(&self) -> Result<()> {
        let a = &self.algebra.algebra;
        let k = self.field();
        let (d, da) = (self.dim(), a.dim());
        for x in 0..d {
            let xv = unit_vec(k, d, x);
            if self.act(&xv, a.unit()) != xv {
                return Err(Error::Falsified(format!("unit acts nontrivially on {}", self.labels[x])));
            }
        }
        let bad = par::find_map_first(d * da, |ix| {
            let (x, i) = (ix / da, ix % da);
            let xa = self.act(&unit_vec(k, d, x), &a.basis(i));
            (0..da).find_map(|j| {
                let lhs = self.act(&xa, &a.basis(j));
                let rhs = self.act(&unit_vec(k, d, x), &a.mul(&a.basis(i), &a.basis(j)));
                (lhs != rhs).then(|| format!("(x·a)·b ≠ x·(ab) at ({}, {}, {})", x, i, j))
            })
        });
        bad.map_or(Ok(()), |m| Err(Error::Falsified(m)))
    }
}

fn unit_vec<K: Field>(k: &K, d: usize, i: usize) -> Vec<K::Elem> {
    let mut v = vec![k.zero(); d];
    v[i] = k.one();
    v
}

fn check_rank<K: Field>(qp: &QuadraticForm<K>) -> Result<()> {
    let r = qp.rank();
    if r == 0 {
        return Err(Error::Unsupported("q′ of rank 0 has C1(q′) = 0".into()));
    }
    if r > MORITA_RANK_CAP {
        return Err(Error::RankCap {
            what: "Morita module",
            rank: r,
            cap: MORITA_RANK_CAP,
        });
    }
    Ok(())
}

pub fn build_p<K: Field>(qp: &QuadraticForm<K>) -> Result<RightModule<K>> {
    check_rank(qp)?;
    let algebra = even_clifford(qp)?;
    let r = qp.rank();
    let mut masks: Vec<u32> = algebra.masks().to_vec();
    masks.extend((0..1u32 << r).filter(|m| m.count_ones() % 2 == 1).collect::<Vec<_>>());
    // odd masks in the same (size, lex) order as the even ones
    let n_even = algebra.dim();
    let mut odd = masks.split_off(n_even);
    odd.sort_by_key(|&m| (m.count_ones(), (0..32).filter(|i| m >> i & 1 == 1).collect::<Vec<u32>>()));
    masks.extend(odd);
    let index = |m: u32| masks.iter().position(|&x| x == m).unwrap();
    let tags = masks
        .iter()
        .map(|m| if m.count_ones() % 2 == 0 { Summand::Even } else { Summand::Odd })
        .collect();
    let labels = masks.iter().map(|&m| mask_label(m)).collect();
    let engine = algebra.engine();
    let am = algebra.masks().to_vec();
    let (d, da) = (masks.len(), am.len());
    let action = par::map_range(d * da, |ix| {
        let mut v: Sparse<K::Elem> = engine
            .mul_mono(masks[ix / da], am[ix % da])
            .into_iter()
            .map(|(m, c)| (index(m), c))
            .collect();
        v.sort_by_key(|(i, _)| *i);
        v
    });
    let module = RightModule {
        algebra,
        masks: masks.clone(),
        tags,
        labels,
        action,
    };
    module.check_axioms()?;
    Ok(module)
}

/// End_A(P) as the commutant of the right action, with the basis matrices.
#[derive(Debug, Clone)]
pub struct EndomorphismAlgebra<K: Field> {
    pub algebra: StructuredAlgebra<K>,
    pub matrices: Vec<Matrix<K::Elem>>,
    /// Flattened matrix positions whose entries are the coordinates.
    free: Vec<usize>,
}

impl<K: Field> EndomorphismAlgebra<K> {
    /// Coordinates of a matrix in the basis, or None if it is not in the span.
    pub fn coordinates(&self, k: &K, m: &Matrix<K::Elem>) -> Option<Vec<K::Elem>> {
        let flat = m.entries();
        let coords: Vec<K::Elem> = self.free.iter().map(|&f| flat[f].clone()).collect();
        let back = combine(k, &self.matrices, &coords);
        (back.entries() == flat).then_some(coords)
    }
}

fn combine<K: Field>(k: &K, ms: &[Matrix<K::Elem>], coords: &[K::Elem]) -> Matrix<K::Elem> {
    let (r, c) = (ms[0].rows(), ms[0].cols());
    let mut out = Matrix::zeros(k, r, c);
    for (m, x) in ms.iter().zip(coords) {
        if k.is_zero(x) {
            continue;
        }
        out = out.add(k, &m.scale(k, x)).unwrap();
    }
    out
}

/// Matrices F with F·G = G·F for every G in `gens`.
fn commutant<K: Field>(k: &K, d: usize, gens: &[Matrix<K::Elem>]) -> (Vec<Matrix<K::Elem>>, Vec<usize>) {
    // unknown F[i][l] at position i·d + l; equation (i, j) of each generator
    let blocks = par::map(gens, |g| {
        let mut rows = Vec::new();
        for i in 0..d {
            for j in 0..d {
                let mut row = vec![k.zero(); d * d];
                for l in 0..d {
                    let glj = g.get(l, j);
                    if !k.is_zero(glj) {
                        row[i * d + l] = k.add(&row[i * d + l], glj);
                    }
                    let gil = g.get(i, l);
                    if !k.is_zero(gil) {
                        row[l * d + j] = k.sub(&row[l * d + j], gil);
                    }
                }
                if row.iter().any(|c| !k.is_zero(c)) {
                    rows.push(row);
                }
            }
        }
        rows
    });
    let rows: Vec<Vec<K::Elem>> = blocks.into_iter().flatten().collect();
    let kernel = if rows.is_empty() {
        (0..d * d).map(|i| unit_vec(k, d * d, i)).collect()
    } else {
        Matrix::from_rows(rows).unwrap().kernel_basis(k)
    };
    let free = free_positions(k, &kernel);
    let mats = kernel
        .into_iter()
        .map(|v| Matrix::new(d, d, v).unwrap())
        .collect();
    (mats, free)
}

/// The free column of each kernel vector: the position where it is 1 and
/// every other kernel vector is 0.
fn free_positions<K: Field>(k: &K, kernel: &[Vec<K::Elem>]) -> Vec<usize> {
    (0..kernel.len())
        .map(|i| {
            (0..kernel[i].len())
                .find(|&p| {
                    k.is_one(&kernel[i][p])
                        && kernel.iter().enumerate().all(|(j, w)| j == i || k.is_zero(&w[p]))
                })
                .expect("kernel basis has free columns")
        })
        .collect()
}

pub fn endomorphism_algebra<K: Field>(p: &RightModule<K>) -> Result<EndomorphismAlgebra<K>> {
    let k = p.field().clone();
    let a = &p.algebra;
    let d = p.dim();
    // commuting with the generator products e_i e_j suffices
    let gens: Vec<Matrix<K::Elem>> = (0..a.dim())
        .filter(|&i| a.masks()[i].count_ones() == 2)
        .map(|i| p.right_matrix(&a.algebra.basis(i)))
        .collect();
    let (matrices, free) = commutant(&k, d, &gens);
    let n = matrices.len();
    let end = EndomorphismAlgebra {
        algebra: StructuredAlgebra::matrix_algebra(k.clone(), 1),
        matrices,
        free,
    };
    let products = par::map_range(n * n, |ix| {
        let m = end.matrices[ix / n].mul(&k, &end.matrices[ix % n]).unwrap();
        end.coordinates(&k, &m)
    });
    let products: Option<Vec<Vec<K::Elem>>> = products.into_iter().collect();
    let products = products.ok_or_else(|| Error::Falsified("commutant is not closed under composition".into()))?;
    let id = Matrix::identity(&k, d);
    let unit = end
        .coordinates(&k, &id)
        .ok_or_else(|| Error::Falsified("identity is not in the commutant".into()))?;
    let labels = (0..n).map(|i| format!("f{}", i + 1)).collect();
    let algebra = StructuredAlgebra::from_dense(k, labels, products, unit)?;
    Ok(EndomorphismAlgebra { algebra, ..end })
}

#[derive(Debug, Clone)]
pub struct MoritaReport<K: Field> {
    pub q: QuadraticForm<K>,
    pub p_dim: usize,
    pub c0_dim: usize,
    pub end_dim: usize,
    /// Φ(x) commutes with the right C0(q′)-action for every basis x.
    pub commutes: bool,
    pub multiplicative: bool,
    pub unital: bool,
    pub bijective: bool,
    /// Columns: coordinates of Φ(basis of C0(q)) in the End basis.
    pub matrix: Matrix<K::Elem>,
    pub first_failure: Option<String>,
    pub center_dims: (usize, usize),
    /// Equal δ square classes (even rank, characteristic ≠ 2).
    pub delta_classes_match: Option<bool>,
    pub center_shapes: (&'static str, &'static str),
    /// The commutant of End(P) in End_k(P) is C0(q′) acting on the right
    /// through reversal.
    pub double_centralizer: Option<bool>,
}

impl<K: Field> MoritaReport<K> {
    pub fn ok(&self) -> bool {
        self.commutes
            && self.multiplicative
            && self.unital
            && self.bijective
            && self.center_dims.0 == self.center_dims.1
            && self.delta_classes_match != Some(false)
            && self.double_centralizer != Some(false)
    }
}

/// Coordinates in P of an element of C(q) known to lie in P.
fn p_coordinates<K: Field>(
    k: &K,
    full: &CliffordAlgebra<K>,
    p: &RightModule<K>,
    embedded: &[Vec<K::Elem>],
    v: &[K::Elem],
) -> Option<Vec<K::Elem>> {
    // vu·e_S has e_{S'} as its only shift-free monomial, u·e_S is e_{{0}∪S'}
    let coords: Vec<K::Elem> = p
        .masks()
        .iter()
        .zip(p.tags())
        .map(|(&m, t)| {
            let key = match t {
                Summand::Even => m << 2,
                Summand::Odd => m << 2 | 1,
            };
            v[full.index_of(key).unwrap()].clone()
        })
        .collect();
    let mut back = vec![k.zero(); v.len()];
    for (c, e) in coords.iter().zip(embedded) {
        if k.is_zero(c) {
            continue;
        }
        for (b, x) in back.iter_mut().zip(e) {
            *b = k.add(b, &k.mul(c, x));
        }
    }
    (back == v).then_some(coords)
}

pub fn morita_witness<K: Field>(qp: &QuadraticForm<K>) -> Result<MoritaReport<K>> {
    check_rank(qp)?;
    let k = qp.field().clone();
    let q = QuadraticForm::hyperbolic(k.clone(), 1).direct_sum(qp)?;
    let p = build_p(qp)?;
    let end = endomorphism_algebra(&p)?;
    let c0 = even_clifford(&q)?;
    let full = full_clifford(&q)?;
    let fa = &full.algebra;
    let d = p.dim();

    // P inside C(q): vu·e_S and u·e_S
    let vu = full.vector(&full.engine().eval_word(&[1, 0]));
    let u = full.vector(&[(1, k.one())]);
    let embedded: Vec<Vec<K::Elem>> = p
        .masks()
        .iter()
        .zip(p.tags())
        .map(|(&m, t)| {
            let e = fa.basis(full.index_of(m << 2).unwrap());
            match t {
                Summand::Even => fa.mul(&vu, &e),
                Summand::Odd => fa.mul(&u, &e),
            }
        })
        .collect();

    // Φ on generator products by left multiplication, then extended along
    // the sorted generator pairs of each even monomial
    let left = |x: &[K::Elem]| -> Option<Matrix<K::Elem>> {
        let cols: Option<Vec<Vec<K::Elem>>> = embedded
            .iter()
            .map(|e| p_coordinates(&k, &full, &p, &embedded, &fa.mul(x, e)))
            .collect();
        Some(Matrix::from_cols(&cols?).unwrap())
    };
    let n = q.rank();
    let mut pair_ops: Vec<Vec<Option<Matrix<K::Elem>>>> = vec![vec![None; n]; n];
    for a in 0..n {
        for b in a + 1..n {
            let x = full.vector(&[(1 << a | 1 << b, k.one())]);
            pair_ops[a][b] = Some(left(&x).ok_or_else(|| {
                Error::Falsified(format!("e{}e{} does not preserve P", a + 1, b + 1))
            })?);
        }
    }
    let phi_mats: Vec<Matrix<K::Elem>> = c0
        .masks()
        .iter()
        .map(|&m| {
            let idx: Vec<usize> = (0..n).filter(|i| m >> i & 1 == 1).collect();
            let mut acc = Matrix::identity(&k, d);
            for pair in idx.chunks(2) {
                acc = acc.mul(&k, pair_ops[pair[0]][pair[1]].as_ref().unwrap()).unwrap();
            }
            acc
        })
        .collect();

    let mut first_failure = None;
    let phi: Vec<Option<Vec<K::Elem>>> = phi_mats.iter().map(|m| end.coordinates(&k, m)).collect();
    let commutes = phi.iter().all(|c| c.is_some());
    if !commutes {
        let i = phi.iter().position(|c| c.is_none()).unwrap();
        first_failure = Some(format!(
            "Φ({}) does not commute with the right action",
            c0.algebra.labels()[i]
        ));
    }
    let dc = c0.dim();
    let de = end.algebra.dim();
    let zero_col = vec![k.zero(); de];
    let phi: Vec<Vec<K::Elem>> = phi.into_iter().map(|c| c.unwrap_or_else(|| zero_col.clone())).collect();
    let matrix = Matrix::from_cols(&phi)?;
    let apply = |x: &[K::Elem]| matrix.mul_vec(&k, x).unwrap();
    let unital = apply(c0.algebra.unit()) == end.algebra.unit();
    let bad = par::find_map_first(dc * dc, |ix| {
        let (x, y) = (ix / dc, ix % dc);
        let lhs = apply(&c0.algebra.basis_product_dense(x, y));
        let rhs = end.algebra.mul(&phi[x], &phi[y]);
        (lhs != rhs).then(|| {
            format!(
                "Φ({}·{}) ≠ Φ({})Φ({})",
                c0.algebra.labels()[x],
                c0.algebra.labels()[y],
                c0.algebra.labels()[x],
                c0.algebra.labels()[y]
            )
        })
    });
    let multiplicative = bad.is_none();
    if first_failure.is_none() {
        first_failure = bad;
    }
    let bijective = dc == de && matrix.rank(&k) == dc;

    let (zq, zp) = (center(&c0.algebra), center(&p.algebra.algebra));
    let delta_classes_match = match (&zq.delta_class, &zp.delta_class) {
        (Some(a), Some(b)) if qp.rank().is_multiple_of(2) => Some(a == b),
        _ => None,
    };
    let double_centralizer = Some(double_centralizer(&k, &p, &phi_mats));

    Ok(MoritaReport {
        q,
        p_dim: d,
        c0_dim: dc,
        end_dim: de,
        commutes,
        multiplicative,
        unital,
        bijective,
        matrix,
        first_failure,
        center_dims: (zq.dim, zp.dim),
        delta_classes_match,
        center_shapes: (zq.shape.name(), zp.shape.name()),
        double_centralizer,
    })
}

/// End_{End(P)}(P) has the dimension of C0(q′) and is spanned by the right
/// actions of reversed elements; a ↦ R_{rev(a)} is multiplicative.
fn double_centralizer<K: Field>(k: &K, p: &RightModule<K>, phi_mats: &[Matrix<K::Elem>]) -> bool {
    let d = p.dim();
    let (mats, free) = commutant(k, d, phi_mats);
    let a = &p.algebra;
    if mats.len() != a.dim() {
        return false;
    }
    let span = EndomorphismAlgebra {
        algebra: StructuredAlgebra::matrix_algebra(k.clone(), 1),
        matrices: mats,
        free,
    };
    let engine: &CliffordEngine<K> = a.engine();
    let rev: Vec<Matrix<K::Elem>> = a
        .masks()
        .iter()
        .map(|&m| {
            let word: Vec<usize> = (0..32).rev().filter(|i| m >> i & 1 == 1).collect();
            p.right_matrix(&a.vector(&engine.eval_word(&word)))
        })
        .collect();
    if rev.iter().any(|r| span.coordinates(k, r).is_none()) {
        return false;
    }
    let da = a.dim();
    par::all(da * da, |ix| {
        let (x, y) = (ix / da, ix % da);
        let prod = a.algebra.basis_product_dense(x, y);
        let lhs = combine(k, &rev, &prod);
        rev[x].mul(k, &rev[y]).unwrap() == lhs
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rings::{ints, PrimeField, Rationals};

    fn diag<K: Field>(k: &K, d: &[i64]) -> QuadraticForm<K> {
        QuadraticForm::diagonal(k.clone(), &ints(k, d))
    }

    #[test]
    fn module_dimensions() {
        let q = Rationals;
        let p = build_p(&diag(&q, &[1])).unwrap();
        assert_eq!((p.dim(), p.algebra.dim()), (2, 1));
        let p = build_p(&QuadraticForm::hyperbolic(q, 1)).unwrap();
        assert_eq!((p.dim(), p.algebra.dim()), (4, 2));
        let p = build_p(&diag(&q, &[1, 1, 1])).unwrap();
        assert_eq!((p.dim(), p.algebra.dim()), (8, 4));
        assert_eq!(p.tags().iter().filter(|t| **t == Summand::Odd).count(), 4);
    }

    #[test]
    fn endomorphism_dimensions() {
        let q = Rationals;
        let e = endomorphism_algebra(&build_p(&diag(&q, &[1])).unwrap()).unwrap();
        assert_eq!(e.algebra.dim(), 4);
        assert!(crate::clifford::is_central_simple(&e.algebra).unwrap());
        let e = endomorphism_algebra(&build_p(&QuadraticForm::hyperbolic(q, 1)).unwrap()).unwrap();
        assert_eq!(e.algebra.dim(), 8);
        let e = endomorphism_algebra(&build_p(&diag(&q, &[1, 1])).unwrap()).unwrap();
        assert_eq!(e.algebra.dim(), 8);
    }

    #[test]
    fn witness_examples() {
        let q = Rationals;
        let r = morita_witness(&diag(&q, &[1])).unwrap();
        assert!(r.ok(), "{r:?}");
        assert_eq!((r.matrix.rows(), r.matrix.cols()), (4, 4));
        let f5 = PrimeField::new(5).unwrap();
        let r = morita_witness(&diag(&f5, &[1, 1, 1])).unwrap();
        assert!(r.ok());
        assert_eq!(r.end_dim, 16);
        let f3 = PrimeField::new(3).unwrap();
        let r = morita_witness(&diag(&f3, &[1, 1, 1, 0])).unwrap();
        assert!(r.ok(), "{r:?}");
        assert_eq!(r.center_shapes, ("dual-numbers", "dual-numbers"));
        assert_eq!(r.end_dim, 32);
    }

    #[test]
    fn rank_limits() {
        let q = Rationals;
        assert!(matches!(morita_witness(&diag(&q, &[1, 1, 1, 1, 1])), Err(Error::RankCap { .. })));
        assert!(morita_witness(&QuadraticForm::zero(q, 0)).is_err());
    }
}
