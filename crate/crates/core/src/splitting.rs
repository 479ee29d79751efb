//! Isotropic vectors, hyperbolic splitting and Witt reduction.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::par;
use crate::quadform::QuadraticForm;
use crate::rings::{
    ExtensionField, Field, FunctionField, Matrix, Poly, PolyRing, PrimeField, RatFunc, Rationals,
};

/// The node cap of a polynomial search was reached.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct NodeCapHit;

/// Search limits: height bound over Q, polynomial degree over k(t), and a
/// cap on enumerated candidates (per top-level branch over k(t)).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SearchBudget {
    pub height: u64,
    pub degree: usize,
    pub enumeration: u64,
}

impl Default for SearchBudget {
    fn default() -> Self {
        SearchBudget {
            height: 50,
            degree: 3,
            enumeration: 4_000_000,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IsotropicWitness<E> {
    pub vector: Vec<E>,
    /// Recomputed from the polar form, never taken from the search.
    pub regular: bool,
    pub candidates: u64,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SearchOutcome<E> {
    Found(IsotropicWitness<E>),
    /// Exhaustive search found nothing: a proof of anisotropy.
    Anisotropic { candidates: u64 },
    /// Nothing found within the stated bound; no conclusion.
    Inconclusive { bound: String, candidates: u64 },
}

impl<E> SearchOutcome<E> {
    pub fn witness(&self) -> Option<&IsotropicWitness<E>> {
        match self {
            SearchOutcome::Found(w) => Some(w),
            _ => None,
        }
    }
    pub fn is_inconclusive(&self) -> bool {
        matches!(self, SearchOutcome::Inconclusive { .. })
    }
}

/// Field-specific isotropic vector search.
pub trait IsotropySearch: Field {
    fn search_isotropic(q: &QuadraticForm<Self>, budget: &SearchBudget) -> SearchOutcome<Self::Elem>;
}

impl IsotropySearch for PrimeField {
    fn search_isotropic(q: &QuadraticForm<Self>, budget: &SearchBudget) -> SearchOutcome<u32> {
        finite_search(q, budget)
    }
}

impl IsotropySearch for ExtensionField {
    fn search_isotropic(q: &QuadraticForm<Self>, budget: &SearchBudget) -> SearchOutcome<Vec<u32>> {
        finite_search(q, budget)
    }
}

impl IsotropySearch for Rationals {
    fn search_isotropic(q: &QuadraticForm<Self>, budget: &SearchBudget) -> SearchOutcome<BigRational> {
        rational_search(q, budget)
    }
}

impl<K: Field> IsotropySearch for FunctionField<K> {
    fn search_isotropic(
        q: &QuadraticForm<Self>,
        budget: &SearchBudget,
    ) -> SearchOutcome<RatFunc<K::Elem>> {
        function_field_search(q, budget)
    }
}

pub fn find_isotropic<K: IsotropySearch>(
    q: &QuadraticForm<K>,
    budget: &SearchBudget,
) -> SearchOutcome<K::Elem> {
    K::search_isotropic(q, budget)
}

fn witness<K: Field>(q: &QuadraticForm<K>, v: Vec<K::Elem>, candidates: u64) -> SearchOutcome<K::Elem> {
    debug_assert!(q.field().is_zero(&q.evaluate(&v).unwrap()));
    let regular = is_regular_isotropic(q, &v).unwrap_or(false);
    SearchOutcome::Found(IsotropicWitness {
        vector: v,
        regular,
        candidates,
    })
}

/// Projective points of k^n for a finite field, in lexicographic order of
/// their normalized representatives (first nonzero coordinate 1).
pub struct ProjectivePoints<E> {
    elems: Vec<E>,
    n: usize,
    /// (pivot, first global index of its block), pivots descending.
    blocks: Vec<(usize, u64)>,
    total: u64,
}

impl<E: Clone> ProjectivePoints<E> {
    /// `elems` must list the field with zero first and one second.
    pub fn new(elems: Vec<E>, n: usize) -> Option<Self> {
        let q = elems.len() as u64;
        let mut blocks = Vec::with_capacity(n);
        let mut total: u64 = 0;
        for pivot in (0..n).rev() {
            blocks.push((pivot, total));
            total = total.checked_add(q.checked_pow((n - 1 - pivot) as u32)?)?;
        }
        Some(ProjectivePoints {
            elems,
            n,
            blocks,
            total,
        })
    }

    pub fn len(&self) -> u64 {
        self.total
    }
    pub fn is_empty(&self) -> bool {
        self.total == 0
    }

    pub fn get(&self, idx: u64) -> Vec<E> {
        let q = self.elems.len() as u64;
        let b = self.blocks.partition_point(|&(_, start)| start <= idx) - 1;
        let (pivot, start) = self.blocks[b];
        let mut rest = idx - start;
        let mut v = vec![self.elems[0].clone(); self.n];
        v[pivot] = self.elems[1].clone();
        for j in (pivot + 1..self.n).rev() {
            v[j] = self.elems[(rest % q) as usize].clone();
            rest /= q;
        }
        v
    }
}

fn finite_search<K: Field>(q: &QuadraticForm<K>, budget: &SearchBudget) -> SearchOutcome<K::Elem> {
    let k = q.field();
    let elems = k.elements().expect("finite field");
    let Some(points) = ProjectivePoints::new(elems, q.rank()) else {
        return SearchOutcome::Inconclusive {
            bound: "projective space too large".into(),
            candidates: 0,
        };
    };
    if points.len() > budget.enumeration {
        return SearchOutcome::Inconclusive {
            bound: format!("{} projective points exceed the enumeration budget", points.len()),
            candidates: 0,
        };
    }
    let found = par::find_map_first(points.len() as usize, |i| {
        let v = points.get(i as u64);
        k.is_zero(&q.evaluate(&v).unwrap()).then_some((i, v))
    });
    match found {
        Some((i, v)) => witness(q, v, i as u64 + 1),
        None => SearchOutcome::Anisotropic {
            candidates: points.len(),
        },
    }
}

fn to_rational_vec(v: &[BigInt]) -> Vec<BigRational> {
    v.iter().map(|x| BigRational::from_integer(x.clone())).collect()
}

/// Clear denominators and divide by the content; first nonzero entry positive.
fn primitive(v: &[BigRational]) -> Vec<BigRational> {
    let l = v.iter().fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
    let ints: Vec<BigInt> = v.iter().map(|x| (x * BigRational::from_integer(l.clone())).to_integer()).collect();
    let g = ints.iter().fold(BigInt::zero(), |acc, x| acc.gcd(x));
    let sign = ints.iter().find(|x| !x.is_zero()).map_or(BigInt::one(), |x| x.signum());
    let g = if g.is_zero() { BigInt::one() } else { g * sign };
    to_rational_vec(&ints.iter().map(|x| x / &g).collect::<Vec<_>>())
}

/// Definite over the reals (Sylvester), hence anisotropic over Q.
fn is_definite(q: &QuadraticForm<Rationals>) -> bool {
    let b = q.polar_matrix();
    let n = q.rank();
    let mut signs = Vec::with_capacity(n);
    for m in 1..=n {
        let data = (0..m).flat_map(|i| (0..m).map(move |j| (i, j))).map(|(i, j)| b.get(i, j).clone()).collect();
        let minor = Matrix::new(m, m, data).and_then(|s| s.det(&Rationals));
        match minor {
            Ok(d) if !d.is_zero() => signs.push(d.is_positive()),
            _ => return false,
        }
    }
    // positive definite: all minors positive; negative: signs alternate from negative
    signs.iter().all(|&p| p) || signs.iter().enumerate().all(|(i, &p)| p == (i % 2 == 1))
}

fn rational_search(q: &QuadraticForm<Rationals>, budget: &SearchBudget) -> SearchOutcome<BigRational> {
    let k = Rationals;
    let n = q.rank();
    if n == 0 {
        return SearchOutcome::Anisotropic { candidates: 0 };
    }
    let last = n - 1;
    let mut e = vec![k.zero(); n];
    e[last] = k.one();
    if k.is_zero(q.coeff(last, last)) {
        return witness(q, e, 1);
    }
    if n == 1 {
        return SearchOutcome::Anisotropic { candidates: 1 };
    }
    // Solve a x_n^2 + b x_n + c = 0 for the last coordinate.
    let a = q.coeff(last, last).clone();
    let solve_last = |x: &[BigRational]| -> Option<BigRational> {
        let b = (0..last).fold(k.zero(), |acc, i| acc + q.coeff(i, last) * &x[i]);
        let mut c = k.zero();
        for i in 0..last {
            for j in i..last {
                c += q.coeff(i, j) * &x[i] * &x[j];
            }
        }
        let disc = &b * &b - BigRational::from_integer(4.into()) * &a * &c;
        let r = k.sqrt(&disc)?;
        let two_a = BigRational::from_integer(2.into()) * &a;
        // the larger root, so that x_n > 0 whenever possible
        Some(std::cmp::max((-&b + &r) / &two_a, (-b - r) / two_a))
    };
    if is_definite(q) {
        return SearchOutcome::Anisotropic { candidates: 0 };
    }
    if n == 2 {
        // the discriminant is (b² - 4ac)·x0², so x0 = 1 decides
        let mut v = vec![k.one()];
        return match solve_last(&v) {
            Some(x) => {
                v.push(x);
                witness(q, primitive(&v), 1)
            }
            None => SearchOutcome::Anisotropic { candidates: 1 },
        };
    }
    let dims = (n - 1) as u32;
    let mut consumed: u64 = 0;
    for h in 1..=budget.height {
        let side = 2 * h + 1;
        let Some(cube) = side.checked_pow(dims) else {
            return inconclusive_height(h - 1, consumed);
        };
        let shell = (cube - (side - 2).pow(dims)) / 2;
        if consumed + shell > budget.enumeration {
            return inconclusive_height(h - 1, consumed);
        }
        let hh = h as i64;
        let found = par::find_map_first(cube as usize, |idx| {
            let mut rest = idx as u64;
            let mut x = vec![0i64; n - 1];
            for j in (0..n - 1).rev() {
                x[j] = (rest % side) as i64 - hh;
                rest /= side;
            }
            if x.iter().all(|c| c.abs() < hh) || x.iter().find(|c| **c != 0).is_some_and(|c| *c < 0) {
                return None;
            }
            let mut v: Vec<BigRational> = x.iter().map(|&c| k.from_int(c)).collect();
            let last_coord = solve_last(&v)?;
            v.push(last_coord);
            Some(v)
        });
        consumed += shell;
        if let Some(v) = found {
            return witness(q, primitive(&v), consumed);
        }
    }
    inconclusive_height(budget.height, consumed)
}

fn inconclusive_height<E>(h: u64, candidates: u64) -> SearchOutcome<E> {
    SearchOutcome::Inconclusive {
        bound: format!("height {h}"),
        candidates,
    }
}

/// Polynomial coefficients of a form over k(t), after clearing denominators.
pub(crate) fn polynomial_coefficients<K: Field>(
    q: &QuadraticForm<FunctionField<K>>,
) -> Vec<Vec<Poly<K::Elem>>> {
    let ff = q.field();
    let r = ff.ring();
    let n = q.rank();
    let mut l = r.one();
    for i in 0..n {
        for j in i..n {
            let d = &q.coeff(i, j).den;
            let g = r.gcd(&l, d);
            l = r.exact_div(&r.mul(&l, d), &g);
        }
    }
    (0..n)
        .map(|i| {
            (0..n)
                .map(|j| {
                    if j < i {
                        return r.zero();
                    }
                    let c = q.coeff(i, j);
                    r.mul(&c.num, &r.exact_div(&l, &c.den))
                })
                .collect()
        })
        .collect()
}

/// Depth-first search for v ∈ k[t]^n of degree ≤ D with q(v) = 0, building
/// v one t-adic digit at a time. The coefficient of t^d in q(v) is fixed once
/// digits 0..d are chosen, and is linear in digit d for d ≥ 1, so each level
/// only visits digits satisfying that linear condition.
pub struct PolySearch<'a, K: Field> {
    ring: &'a PolyRing<K>,
    coeffs: &'a [Vec<Poly<K::Elem>>],
    /// Full polar matrix with polynomial entries.
    polar: Vec<Vec<Poly<K::Elem>>>,
    pool: Vec<K::Elem>,
    degree: usize,
    node_cap: u64,
}

/// Search state: v, q(v) and B·v.
struct Node<E> {
    v: Vec<Poly<E>>,
    qv: Poly<E>,
    bv: Vec<Poly<E>>,
}

impl<'a, K: Field> PolySearch<'a, K> {
    pub fn new(
        ring: &'a PolyRing<K>,
        coeffs: &'a [Vec<Poly<K::Elem>>],
        degree: usize,
        node_cap: u64,
    ) -> Self {
        let n = coeffs.len();
        let polar = (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| match i.cmp(&j) {
                        std::cmp::Ordering::Less => coeffs[i][j].clone(),
                        std::cmp::Ordering::Greater => coeffs[j][i].clone(),
                        std::cmp::Ordering::Equal => ring.add(&coeffs[i][i], &coeffs[i][i]),
                    })
                    .collect()
            })
            .collect();
        PolySearch {
            ring,
            coeffs,
            polar,
            pool: ring.field().search_pool(),
            degree,
            node_cap,
        }
    }

    fn n(&self) -> usize {
        self.coeffs.len()
    }

    /// q(x) for a constant vector x.
    fn q_const(&self, x: &[K::Elem]) -> Poly<K::Elem> {
        let r = self.ring;
        let k = r.field();
        let n = self.n();
        let mut acc = r.zero();
        for i in 0..n {
            if k.is_zero(&x[i]) {
                continue;
            }
            for j in i..n {
                if k.is_zero(&x[j]) || self.coeffs[i][j].is_zero() {
                    continue;
                }
                acc = r.add(&acc, &r.scale(&self.coeffs[i][j], &k.mul(&x[i], &x[j])));
            }
        }
        acc
    }

    /// B·x for a constant vector x.
    fn polar_const(&self, x: &[K::Elem]) -> Vec<Poly<K::Elem>> {
        let r = self.ring;
        let k = r.field();
        (0..self.n())
            .map(|i| {
                let mut acc = r.zero();
                for (j, xj) in x.iter().enumerate() {
                    if !k.is_zero(xj) && !self.polar[i][j].is_zero() {
                        acc = r.add(&acc, &r.scale(&self.polar[i][j], xj));
                    }
                }
                acc
            })
            .collect()
    }

    /// Constant terms of the polar matrix.
    fn polar0(&self) -> Vec<Vec<K::Elem>> {
        let k = self.ring.field();
        self.polar
            .iter()
            .map(|row| {
                row.iter()
                    .map(|p| p.coeffs().first().cloned().unwrap_or_else(|| k.zero()))
                    .collect()
            })
            .collect()
    }

    /// Normalized constant digits: first nonzero coordinate 1.
    pub fn roots(&self) -> Vec<Vec<K::Elem>> {
        let k = self.ring.field();
        let mut out = Vec::new();
        let n = self.n();
        let p = self.pool.len();
        for pivot in (0..n).rev() {
            let tail = n - 1 - pivot;
            let count = p.pow(tail as u32);
            for idx in 0..count {
                let mut v = vec![k.zero(); n];
                v[pivot] = k.one();
                let mut rest = idx;
                for j in (pivot + 1..n).rev() {
                    v[j] = self.pool[rest % p].clone();
                    rest /= p;
                }
                out.push(v);
            }
        }
        out
    }

    /// Search below one constant digit.
    pub fn search_from(&self, root: &[K::Elem]) -> std::result::Result<Option<Vec<Poly<K::Elem>>>, NodeCapHit> {
        let r = self.ring;
        let k = r.field();
        let qv = self.q_const(root);
        if qv.coeffs().first().is_some_and(|c| !k.is_zero(c)) {
            return Ok(None);
        }
        let b0 = self.polar0();
        let ell: Vec<K::Elem> = (0..self.n())
            .map(|j| k.dot(root, &b0.iter().map(|row| row[j].clone()).collect::<Vec<_>>()))
            .collect();
        let node = Node {
            v: root.iter().map(|c| r.constant(c.clone())).collect(),
            qv,
            bv: self.polar_const(root),
        };
        let mut nodes = 0u64;
        self.dfs(1, node, &ell, &mut nodes)
    }

    fn dfs(
        &self,
        d: usize,
        node: Node<K::Elem>,
        ell: &[K::Elem],
        nodes: &mut u64,
    ) -> std::result::Result<Option<Vec<Poly<K::Elem>>>, NodeCapHit> {
        if node.qv.is_zero() {
            return Ok(Some(node.v));
        }
        if d > self.degree {
            return Ok(None);
        }
        *nodes += 1;
        if *nodes > self.node_cap {
            return Err(NodeCapHit);
        }
        let r = self.ring;
        let k = r.field();
        let n = self.n();
        let rhs = node.qv.coeffs().get(d).cloned().unwrap_or_else(|| k.zero());
        let pivot = ell.iter().position(|c| !k.is_zero(c));
        if pivot.is_none() && !k.is_zero(&rhs) {
            return Ok(None);
        }
        let free: Vec<usize> = (0..n).filter(|&j| Some(j) != pivot).collect();
        let p = self.pool.len();
        let count = p.pow(free.len() as u32);
        let td = r.monomial(k.one(), d);
        let t2d = r.monomial(k.one(), 2 * d);
        for idx in 0..count {
            let mut x = vec![k.zero(); n];
            let mut rest = idx;
            for &j in free.iter().rev() {
                x[j] = self.pool[rest % p].clone();
                rest /= p;
            }
            if let Some(pv) = pivot {
                // ℓ·x + rhs = 0
                let partial = k.add(&k.dot(ell, &x), &rhs);
                x[pv] = k.neg(&k.div(&partial, &ell[pv]).unwrap());
            }
            if x.iter().all(|c| k.is_zero(c)) && !k.is_zero(&rhs) {
                continue;
            }
            // q(v + x t^d) = q(v) + t^d b(v, x) + t^{2d} q(x)
            let mut bvx = r.zero();
            for (xj, wj) in x.iter().zip(&node.bv) {
                if !k.is_zero(xj) && !wj.is_zero() {
                    bvx = r.add(&bvx, &r.scale(wj, xj));
                }
            }
            let qv = r.add(
                &node.qv,
                &r.add(&r.mul(&td, &bvx), &r.mul(&t2d, &self.q_const(&x))),
            );
            debug_assert!(qv.coeffs().get(d).is_none_or(|c| k.is_zero(c)));
            let last = d == self.degree;
            if last && !qv.is_zero() {
                continue;
            }
            let v: Vec<Poly<K::Elem>> = node
                .v
                .iter()
                .zip(&x)
                .map(|(vi, xi)| r.add(vi, &r.scale(&td, xi)))
                .collect();
            let bv = if last || qv.is_zero() {
                Vec::new()
            } else {
                node.bv
                    .iter()
                    .zip(self.polar_const(&x))
                    .map(|(w, bx)| r.add(w, &r.mul(&td, &bx)))
                    .collect()
            };
            if let Some(w) = self.dfs(d + 1, Node { v, qv, bv }, ell, nodes)? {
                return Ok(Some(w));
            }
        }
        Ok(None)
    }
}

/// Result of the polynomial search over k(t).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PolyZeroSearch<E> {
    pub witness: Option<Vec<Poly<E>>>,
    /// Index (1-based) of the constant digit the witness grew from, or the
    /// number of constant digits tried.
    pub candidates: u64,
    /// Some branch hit the node cap, so a miss does not cover degree ≤ D.
    pub aborted: bool,
}

/// Polynomial vectors of degree ≤ D with q(v) = 0, over k(t) after clearing
/// denominators. The first witness in constant-digit order wins.
pub fn search_polynomial_zero<K: Field>(
    q: &QuadraticForm<FunctionField<K>>,
    budget: &SearchBudget,
) -> PolyZeroSearch<K::Elem> {
    let ff = q.field();
    let coeffs = polynomial_coefficients(q);
    let search = PolySearch::new(ff.ring(), &coeffs, budget.degree, budget.enumeration);
    let roots = search.roots();
    let aborted = std::sync::atomic::AtomicBool::new(false);
    let found = par::find_map_first(roots.len(), |i| match search.search_from(&roots[i]) {
        Ok(w) => w.map(|w| (i, w)),
        Err(NodeCapHit) => {
            aborted.store(true, std::sync::atomic::Ordering::Relaxed);
            None
        }
    });
    match found {
        Some((i, w)) => PolyZeroSearch {
            witness: Some(w),
            candidates: i as u64 + 1,
            aborted: false,
        },
        None => PolyZeroSearch {
            witness: None,
            candidates: roots.len() as u64,
            aborted: aborted.into_inner(),
        },
    }
}

fn function_field_search<K: Field>(
    q: &QuadraticForm<FunctionField<K>>,
    budget: &SearchBudget,
) -> SearchOutcome<RatFunc<K::Elem>> {
    let ff = q.field();
    let res = search_polynomial_zero(q, budget);
    match res.witness {
        Some(v) => {
            let vec: Vec<RatFunc<K::Elem>> = v.into_iter().map(|p| ff.from_poly(p)).collect();
            witness(q, vec, res.candidates)
        }
        None => SearchOutcome::Inconclusive {
            bound: if res.aborted {
                format!("degree {} (node budget exhausted)", budget.degree)
            } else {
                format!("degree {}", budget.degree)
            },
            candidates: res.candidates,
        },
    }
}

/// True iff the isotropic vector v is outside the radical of the polar form.
pub fn is_regular_isotropic<K: Field>(q: &QuadraticForm<K>, v: &[K::Elem]) -> Result<bool> {
    let k = q.field();
    if v.iter().all(|x| k.is_zero(x)) || !k.is_zero(&q.evaluate(v)?) {
        return Err(Error::NotIsotropic);
    }
    Ok(q
        .polar_matrix()
        .mul_vec(k, v)?
        .iter()
        .any(|x| !k.is_zero(x)))
}

/// The first standard basis vector w with b(v, w) ≠ 0.
pub fn hyperbolic_complement<K: Field>(q: &QuadraticForm<K>, v: &[K::Elem]) -> Result<Vec<K::Elem>> {
    if !is_regular_isotropic(q, v)? {
        return Err(Error::InRadical);
    }
    let k = q.field();
    let bv = q.polar_matrix().mul_vec(k, v)?;
    let i = bv.iter().position(|x| !k.is_zero(x)).unwrap();
    let mut w = vec![k.zero(); q.rank()];
    w[i] = k.one();
    Ok(w)
}

/// Normalize (v, w) to a hyperbolic pair: v' = c v, w' = w - c q(w) v with
/// c = b(v, w)^{-1}.
pub fn hyperbolic_pair<K: Field>(
    q: &QuadraticForm<K>,
    v: &[K::Elem],
    w: &[K::Elem],
) -> Result<(Vec<K::Elem>, Vec<K::Elem>)> {
    let k = q.field();
    let c = k
        .inv(&q.polar(v, w)?)
        .ok_or_else(|| Error::Falsified("b(v, w) = 0 for the chosen complement".into()))?;
    let qw = q.evaluate(w)?;
    let vp: Vec<_> = v.iter().map(|x| k.mul(&c, x)).collect();
    let cq = k.mul(&c, &qw);
    let wp: Vec<_> = w.iter().zip(v).map(|(wi, vi)| k.sub(wi, &k.mul(&cq, vi))).collect();
    Ok((vp, wp))
}

/// q ≅ H(1) ⊥ q′ with explicit change of basis.
#[derive(Debug, Clone, PartialEq)]
pub struct SplittingWitness<K: Field> {
    pub original: QuadraticForm<K>,
    /// Columns: v', w', then a basis of {v', w'}^⊥.
    pub p: Matrix<K::Elem>,
    pub pair: (usize, usize),
    pub reduced: QuadraticForm<K>,
    /// Coordinates (columns) of the canonical N⊥/N representatives in the
    /// complement basis: reduced_form(q, v) = Γ^* q′.
    pub congruence: Matrix<K::Elem>,
    pub isotropic: Vec<K::Elem>,
}

pub fn split_hyperbolic<K: Field>(q: &QuadraticForm<K>, v: &[K::Elem]) -> Result<SplittingWitness<K>> {
    let k = q.field();
    let w = hyperbolic_complement(q, v)?;
    let (vp, wp) = hyperbolic_pair(q, v, &w)?;
    let complement = q.orthogonal(&[vp.clone(), wp.clone()])?;
    if complement.len() + 2 != q.rank() {
        return Err(Error::Falsified("hyperbolic plane is degenerate".into()));
    }
    let reduced = q.pullback(&complement)?;
    let mut cols = vec![vp.clone(), wp.clone()];
    cols.extend(complement.iter().cloned());
    let p = Matrix::from_cols(&cols)?;
    // canonical representatives r ≡ Σ γ_j u_j mod v
    let canon = q.reduction_basis(v)?;
    let mut gamma_cols = Vec::with_capacity(canon.len());
    for r in &canon {
        let c = p
            .solve(k, r)?
            .ok_or_else(|| Error::Falsified("P is not invertible".into()))?;
        if !k.is_zero(&c[1]) {
            return Err(Error::Falsified("representative leaves v^⊥".into()));
        }
        gamma_cols.push(c[2..].to_vec());
    }
    let congruence = if gamma_cols.is_empty() {
        Matrix::zeros(k, 0, 0)
    } else {
        Matrix::from_cols(&gamma_cols)?
    };
    let witness = SplittingWitness {
        original: q.clone(),
        p,
        pair: (0, 1),
        reduced,
        congruence,
        isotropic: v.to_vec(),
    };
    witness.verify()?;
    Ok(witness)
}

impl<K: Field> SplittingWitness<K> {
    /// Re-derive every claim: q∘P = H(1) ⊥ q′ coefficientwise, Pᵀ B P is the
    /// block polar matrix, sampled q-values agree, and q′ is congruent to
    /// the canonical reduced form on v^⊥/v.
    pub fn verify(&self) -> Result<()> {
        let q = &self.original;
        let k = q.field();
        let n = q.rank();
        let cols: Vec<Vec<K::Elem>> = (0..n).map(|j| self.p.col(j)).collect();
        let expected = QuadraticForm::hyperbolic(k.clone(), 1).direct_sum(&self.reduced)?;
        if q.pullback(&cols)? != expected {
            return Err(Error::Falsified("q∘P differs from H ⊥ q′".into()));
        }
        let ptbp = self.p.transpose().mul(k, &q.polar_matrix())?.mul(k, &self.p)?;
        if ptbp != expected.polar_matrix() {
            return Err(Error::Falsified("PᵀBP is not block hyperbolic".into()));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(n as u64);
        for _ in 0..20 {
            let x: Vec<K::Elem> = (0..n).map(|_| k.sample(&mut rng)).collect();
            let px = self.p.mul_vec(k, &x)?;
            if q.evaluate(&px)? != expected.evaluate(&x)? {
                return Err(Error::Falsified("sampled q-values disagree".into()));
            }
        }
        let canonical = q.reduced_form(&self.isotropic)?;
        let gcols: Vec<Vec<K::Elem>> = (0..self.congruence.cols()).map(|j| self.congruence.col(j)).collect();
        if self.reduced.pullback(&gcols)? != canonical {
            return Err(Error::Falsified("q′ is not congruent to the reduced form".into()));
        }
        Ok(())
    }
}

/// Witt decomposition of the regular part: q ≅ witt_index·H ⊥ anisotropic ⊥ radical.
#[derive(Debug, Clone, PartialEq)]
pub struct WittDecomposition<K: Field> {
    pub witt_index: usize,
    pub anisotropic: QuadraticForm<K>,
    pub radical_rank: usize,
    pub steps: Vec<SplittingWitness<K>>,
    /// False when the last search was inconclusive (Q, k(t)).
    pub conclusive: bool,
    pub last_bound: Option<String>,
}

pub fn reduce_fully<K: IsotropySearch>(
    q: &QuadraticForm<K>,
    budget: &SearchBudget,
) -> Result<WittDecomposition<K>> {
    let k = q.field();
    let radical = q.radical();
    // complement of the radical from standard basis vectors
    let mut span = radical.clone();
    let mut rank = span.len();
    let mut w_basis = Vec::new();
    for i in 0..q.rank() {
        let mut e = vec![k.zero(); q.rank()];
        e[i] = k.one();
        span.push(e.clone());
        let r = Matrix::from_rows(span.clone())?.rank(k);
        if r > rank {
            rank = r;
            w_basis.push(e);
        } else {
            span.pop();
        }
    }
    let mut current = if w_basis.is_empty() {
        QuadraticForm::zero(k.clone(), 0)
    } else {
        q.restrict(&w_basis)?
    };
    let mut steps = Vec::new();
    loop {
        if current.rank() == 0 {
            return Ok(WittDecomposition {
                witt_index: steps.len(),
                anisotropic: current,
                radical_rank: radical.len(),
                steps,
                conclusive: true,
                last_bound: None,
            });
        }
        match find_isotropic(&current, budget) {
            SearchOutcome::Found(w) => {
                let s = split_hyperbolic(&current, &w.vector)?;
                current = s.reduced.clone();
                steps.push(s);
            }
            SearchOutcome::Anisotropic { .. } => {
                return Ok(WittDecomposition {
                    witt_index: steps.len(),
                    anisotropic: current,
                    radical_rank: radical.len(),
                    steps,
                    conclusive: true,
                    last_bound: None,
                })
            }
            SearchOutcome::Inconclusive { bound, .. } => {
                return Ok(WittDecomposition {
                    witt_index: steps.len(),
                    anisotropic: current,
                    radical_rank: radical.len(),
                    steps,
                    conclusive: false,
                    last_bound: Some(bound),
                })
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rings::ints;

    fn diag<K: Field>(k: &K, d: &[i64]) -> QuadraticForm<K> {
        QuadraticForm::diagonal(k.clone(), &ints(k, d))
    }

    #[test]
    fn isotropic_search_examples() {
        let q = Rationals;
        let b = SearchBudget::default();
        let w = find_isotropic(&diag(&q, &[1, -1]), &b);
        assert_eq!(w.witness().unwrap().vector, ints(&q, &[1, 1]));
        let f3 = PrimeField::new(3).unwrap();
        let w = find_isotropic(&diag(&f3, &[1, 1, 1]), &b);
        assert_eq!(w.witness().unwrap().vector, vec![1, 1, 1]);
        assert!(matches!(
            find_isotropic(&diag(&f3, &[1, 1]), &b),
            SearchOutcome::Anisotropic { candidates: 4 }
        ));
        // definite forms are settled without search
        assert!(matches!(find_isotropic(&diag(&q, &[1, 1, 1]), &b), SearchOutcome::Anisotropic { .. }));
        assert!(matches!(find_isotropic(&diag(&q, &[-1, -2, -1, -5]), &b), SearchOutcome::Anisotropic { .. }));
        assert!(matches!(find_isotropic(&diag(&q, &[1, 3]), &b), SearchOutcome::Anisotropic { .. }));
        // (x + y)(x + 2y)
        let f = QuadraticForm::from_upper(q, Matrix::new(2, 2, ints(&q, &[1, 3, 0, 2])).unwrap()).unwrap();
        assert_eq!(find_isotropic(&f, &b).witness().unwrap().vector, ints(&q, &[2, -1]));
        // indefinite but anisotropic (no solution mod 3): the search cannot decide
        assert!(matches!(find_isotropic(&diag(&q, &[1, 1, -3]), &b), SearchOutcome::Inconclusive { .. }));
        let w = find_isotropic(&diag(&q, &[1, 1, -3, 2]), &b);
        let v = &w.witness().unwrap().vector;
        assert!(q.is_zero(&diag(&q, &[1, 1, -3, 2]).evaluate(v).unwrap()));
    }

    #[test]
    fn projective_point_order() {
        let pts = ProjectivePoints::new(vec![0u32, 1, 2], 2).unwrap();
        assert_eq!(pts.len(), 4);
        let all: Vec<_> = (0..4).map(|i| pts.get(i)).collect();
        assert_eq!(all, vec![vec![0, 1], vec![1, 0], vec![1, 1], vec![1, 2]]);
    }

    #[test]
    fn function_field_search_finds_low_degree_witness() {
        let f3 = PrimeField::new(3).unwrap();
        let k = FunctionField::new(f3, "t").unwrap();
        // x^2 - t y^2 + (t - 1) z^2: (1, 1, 1) is a zero
        let t = k.t();
        let q = QuadraticForm::diagonal(
            k.clone(),
            &[k.one(), k.neg(&t), k.sub(&t, &k.one())],
        );
        let w = find_isotropic(&q, &SearchBudget::default());
        let v = &w.witness().unwrap().vector;
        assert!(k.is_zero(&q.evaluate(v).unwrap()));
        // x^2 - t y^2 is anisotropic; the search never claims a proof
        let q2 = QuadraticForm::diagonal(k.clone(), &[k.one(), k.neg(&t)]);
        assert!(find_isotropic(&q2, &SearchBudget::default()).is_inconclusive());
        // a witness needing positive degree: x^2 - t^2 y^2 -> (t, 1)
        let q3 = QuadraticForm::diagonal(k.clone(), &[k.one(), k.neg(&k.mul(&t, &t))]);
        let w = find_isotropic(&q3, &SearchBudget::default());
        assert!(k.is_zero(&q3.evaluate(&w.witness().unwrap().vector).unwrap()));
    }

    #[test]
    fn regularity() {
        let q = Rationals;
        let f = diag(&q, &[1, -1, 0]);
        assert!(!is_regular_isotropic(&f, &ints(&q, &[0, 0, 1])).unwrap());
        assert!(is_regular_isotropic(&f, &ints(&q, &[1, 1, 0])).unwrap());
        assert!(matches!(
            is_regular_isotropic(&f, &ints(&q, &[1, 0, 0])),
            Err(Error::NotIsotropic)
        ));
    }

    #[test]
    fn hyperbolic_pairs() {
        let q = Rationals;
        let h = QuadraticForm::hyperbolic(q, 1);
        assert_eq!(hyperbolic_complement(&h, &ints(&q, &[1, 0])).unwrap(), ints(&q, &[0, 1]));
        let f = diag(&q, &[1, -1]);
        let v = ints(&q, &[1, 1]);
        let w = hyperbolic_complement(&f, &v).unwrap();
        let (vp, wp) = hyperbolic_pair(&f, &v, &w).unwrap();
        let g = f.pullback(&[vp, wp]).unwrap();
        assert_eq!(g, h);
    }

    #[test]
    fn splitting_examples() {
        let q = Rationals;
        let s = split_hyperbolic(&diag(&q, &[1, -1, 1, 1]), &ints(&q, &[1, 1, 0, 0])).unwrap();
        assert_eq!(s.reduced, diag(&q, &[1, 1]));
        let h2 = QuadraticForm::hyperbolic(q, 2);
        let s = split_hyperbolic(&h2, &ints(&q, &[1, 0, 0, 0])).unwrap();
        assert_eq!(s.reduced, QuadraticForm::hyperbolic(q, 1));
        let f5 = PrimeField::new(5).unwrap();
        let f = diag(&f5, &[1, 1, 1, 0]);
        let v = vec![1, 2, 0, 0];
        let s = split_hyperbolic(&f, &v).unwrap();
        assert_eq!(s.reduced.rank(), 2);
        assert_eq!(s.reduced.radical_dim(), 1);
        assert!(matches!(
            split_hyperbolic(&f, &[0, 0, 0, 1]),
            Err(Error::InRadical)
        ));
    }

    #[test]
    fn witt_reduction_examples() {
        let f3 = PrimeField::new(3).unwrap();
        let b = SearchBudget::default();
        let r = reduce_fully(&QuadraticForm::hyperbolic(f3, 2), &b).unwrap();
        assert_eq!((r.witt_index, r.anisotropic.rank(), r.radical_rank), (2, 0, 0));
        let r = reduce_fully(&diag(&f3, &[1, 1]), &b).unwrap();
        assert_eq!((r.witt_index, r.anisotropic.rank()), (0, 2));
        assert!(r.conclusive);
        let r = reduce_fully(&diag(&f3, &[1, 1, 1, 0]), &b).unwrap();
        assert_eq!((r.witt_index, r.anisotropic.rank(), r.radical_rank), (1, 1, 1));
        let again = reduce_fully(&r.anisotropic, &b).unwrap();
        assert_eq!(again.witt_index, 0);
    }

    proptest::proptest! {
        #![proptest_config(proptest::prelude::ProptestConfig::with_cases(48))]
        #[test]
        fn witt_decomposition_accounts_for_rank(seed in proptest::prelude::any::<u64>(), n in 1usize..6) {
            let f5 = PrimeField::new(5).unwrap();
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let q = QuadraticForm::random(f5, n, 0.6, &mut rng);
            let r = reduce_fully(&q, &SearchBudget::default()).unwrap();
            proptest::prop_assert!(r.conclusive);
            proptest::prop_assert_eq!(2 * r.witt_index + r.anisotropic.rank() + r.radical_rank, n);
            // anisotropic parts over a finite field have rank at most 2
            proptest::prop_assert!(r.anisotropic.rank() <= 2);
            proptest::prop_assert_eq!(r.anisotropic.radical_dim(), 0);
            for s in &r.steps {
                proptest::prop_assert!(s.verify().is_ok());
            }
        }
    }
}
