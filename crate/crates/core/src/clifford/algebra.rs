use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::par;
use crate::rings::{Field, Matrix};

/// (ab)c = a(bc) on basis elements for an integer table. Constants are
/// below 2^40, so a sum of d² products cannot overflow for d < 2^20.
fn int_triple_ok(t: &[Vec<(usize, i128)>], d: usize, a: usize, b: usize, c: usize) -> bool {
    let mut diff = vec![0i128; d];
    for (m, x) in &t[a * d + b] {
        for (i, y) in &t[m * d + c] {
            diff[*i] += x * y;
        }
    }
    for (m, x) in &t[b * d + c] {
        for (i, y) in &t[a * d + m] {
            diff[*i] -= x * y;
        }
    }
    diff.iter().all(|v| *v == 0)
}

/// Sparse coordinate vector: (basis index, nonzero coefficient).
pub type Sparse<E> = Vec<(usize, E)>;

/// A finite-dimensional unital algebra given by structure constants:
/// `basis_a · basis_b = Σ_k table[a·dim + b][k]`.
#[derive(Debug, Clone, PartialEq)]
pub struct StructuredAlgebra<K: Field> {
    field: K,
    labels: Vec<String>,
    table: Vec<Sparse<K::Elem>>,
    unit: Vec<K::Elem>,
    degrees: Option<Vec<usize>>,
}

/// Serializable structure-constant table with exact-scalar strings.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AlgebraTable {
    pub field: String,
    pub labels: Vec<String>,
    pub unit: Vec<String>,
    /// `constants[a][b]` is the coordinate vector of basis_a · basis_b.
    pub constants: Vec<Vec<Vec<String>>>,
}

impl<K: Field> StructuredAlgebra<K> {
    /// Build and verify associativity (exhaustive up to dim 32, sampled
    /// above) and the unit axioms.
    pub fn new(
        field: K,
        labels: Vec<String>,
        table: Vec<Sparse<K::Elem>>,
        unit: Vec<K::Elem>,
        degrees: Option<Vec<usize>>,
    ) -> Result<Self> {
        let a = Self::new_unchecked(field, labels, table, unit, degrees)?;
        a.check_unit()?;
        a.check_associativity()?;
        Ok(a)
    }

    pub fn new_unchecked(
        field: K,
        labels: Vec<String>,
        table: Vec<Sparse<K::Elem>>,
        unit: Vec<K::Elem>,
        degrees: Option<Vec<usize>>,
    ) -> Result<Self> {
        let d = labels.len();
        if table.len() != d * d || unit.len() != d || degrees.as_ref().is_some_and(|g| g.len() != d) {
            return Err(Error::DimensionMismatch(format!(
                "structure constants for dimension {d}"
            )));
        }
        Ok(StructuredAlgebra {
            field,
            labels,
            table,
            unit,
            degrees,
        })
    }

    /// Algebra from dense structure constants given as products of basis
    /// vectors.
    pub fn from_dense(
        field: K,
        labels: Vec<String>,
        products: Vec<Vec<K::Elem>>,
        unit: Vec<K::Elem>,
    ) -> Result<Self> {
        let table = products.into_iter().map(|v| sparse(&field, &v)).collect();
        Self::new(field, labels, table, unit, None)
    }

    /// The algebra of n×n matrices with matrix units E_ij as basis.
    pub fn matrix_algebra(field: K, n: usize) -> Self {
        let d = n * n;
        let mut table = vec![Vec::new(); d * d];
        for i in 0..n {
            for j in 0..n {
                for l in 0..n {
                    table[(i * n + j) * d + (j * n + l)] = vec![(i * n + l, field.one())];
                }
            }
        }
        let mut unit = vec![field.zero(); d];
        for i in 0..n {
            unit[i * n + i] = field.one();
        }
        let labels = (0..n)
            .flat_map(|i| (0..n).map(move |j| format!("E{}{}", i + 1, j + 1)))
            .collect();
        StructuredAlgebra {
            field,
            labels,
            table,
            unit,
            degrees: None,
        }
    }

    pub fn field(&self) -> &K {
        &self.field
    }
    pub fn dim(&self) -> usize {
        self.labels.len()
    }
    pub fn labels(&self) -> &[String] {
        &self.labels
    }
    pub fn unit(&self) -> &[K::Elem] {
        &self.unit
    }
    pub fn degrees(&self) -> Option<&[usize]> {
        self.degrees.as_deref()
    }
    pub fn basis_product(&self, a: usize, b: usize) -> &Sparse<K::Elem> {
        &self.table[a * self.dim() + b]
    }

    pub fn basis(&self, i: usize) -> Vec<K::Elem> {
        let mut v = vec![self.field.zero(); self.dim()];
        v[i] = self.field.one();
        v
    }

    pub fn scalar(&self, c: &K::Elem) -> Vec<K::Elem> {
        self.unit.iter().map(|u| self.field.mul(u, c)).collect()
    }

    pub fn zero_vec(&self) -> Vec<K::Elem> {
        vec![self.field.zero(); self.dim()]
    }

    pub fn mul(&self, x: &[K::Elem], y: &[K::Elem]) -> Vec<K::Elem> {
        let k = &self.field;
        let d = self.dim();
        let mut out = vec![k.zero(); d];
        for (a, xa) in x.iter().enumerate() {
            if k.is_zero(xa) {
                continue;
            }
            for (b, yb) in y.iter().enumerate() {
                if k.is_zero(yb) {
                    continue;
                }
                let c = k.mul(xa, yb);
                for (i, t) in &self.table[a * d + b] {
                    out[*i] = k.add(&out[*i], &k.mul(&c, t));
                }
            }
        }
        out
    }

    pub fn add(&self, x: &[K::Elem], y: &[K::Elem]) -> Vec<K::Elem> {
        x.iter().zip(y).map(|(a, b)| self.field.add(a, b)).collect()
    }
    pub fn sub(&self, x: &[K::Elem], y: &[K::Elem]) -> Vec<K::Elem> {
        x.iter().zip(y).map(|(a, b)| self.field.sub(a, b)).collect()
    }
    pub fn scale(&self, x: &[K::Elem], c: &K::Elem) -> Vec<K::Elem> {
        x.iter().map(|a| self.field.mul(a, c)).collect()
    }
    pub fn commutator(&self, x: &[K::Elem], y: &[K::Elem]) -> Vec<K::Elem> {
        self.sub(&self.mul(x, y), &self.mul(y, x))
    }
    pub fn is_zero(&self, x: &[K::Elem]) -> bool {
        x.iter().all(|a| self.field.is_zero(a))
    }

    /// Matrix of y ↦ x·y (columns are images of basis vectors).
    pub fn left_matrix(&self, x: &[K::Elem]) -> Matrix<K::Elem> {
        let cols: Vec<_> = (0..self.dim()).map(|b| self.mul(x, &self.basis(b))).collect();
        Matrix::from_cols(&cols).unwrap()
    }

    /// Matrix of y ↦ y·x.
    pub fn right_matrix(&self, x: &[K::Elem]) -> Matrix<K::Elem> {
        let cols: Vec<_> = (0..self.dim()).map(|b| self.mul(&self.basis(b), x)).collect();
        Matrix::from_cols(&cols).unwrap()
    }

    pub fn check_unit(&self) -> Result<()> {
        for b in 0..self.dim() {
            let e = self.basis(b);
            if self.mul(&self.unit, &e) != e || self.mul(&e, &self.unit) != e {
                return Err(Error::Falsified(format!(
                    "unit axiom fails on basis element {}",
                    self.labels[b]
                )));
            }
        }
        Ok(())
    }

    fn triple_ok(&self, a: usize, b: usize, c: usize) -> bool {
        let k = &self.field;
        let d = self.dim();
        let mut left = vec![k.zero(); d];
        for (m, t) in &self.table[a * d + b] {
            for (i, s) in &self.table[m * d + c] {
                left[*i] = k.add(&left[*i], &k.mul(t, s));
            }
        }
        let mut right = vec![k.zero(); d];
        for (m, t) in &self.table[b * d + c] {
            for (i, s) in &self.table[a * d + m] {
                right[*i] = k.add(&right[*i], &k.mul(t, s));
            }
        }
        left == right
    }

    /// The table times the common denominator of its constants, when all
    /// constants are rational and the result fits comfortably in i128.
    /// Both sides of (ab)c = a(bc) scale by the same square, so the integer
    /// table decides associativity exactly.
    fn integer_table(&self) -> Option<Vec<Vec<(usize, i128)>>> {
        let k = &self.field;
        let mut lcm = BigInt::one();
        let mut rats = Vec::with_capacity(self.table.len());
        for entry in &self.table {
            let mut row = Vec::with_capacity(entry.len());
            for (i, c) in entry {
                let r = k.as_rational(c)?;
                lcm = lcm.lcm(r.denom());
                row.push((*i, r));
            }
            rats.push(row);
        }
        let cap = BigInt::one() << 40;
        rats.into_iter()
            .map(|row| {
                row.into_iter()
                    .map(|(i, r)| {
                        let v = (r * BigRational::from_integer(lcm.clone())).to_integer();
                        (v.abs() < cap).then(|| (i, v.to_i128().unwrap()))
                    })
                    .collect()
            })
            .collect()
    }

    /// Associativity on all basis triples.
    pub fn check_associativity(&self) -> Result<()> {
        let d = self.dim();
        let ints = self.integer_table();
        let bad = par::find_map_first(d * d, |ab| {
            let (a, b) = (ab / d, ab % d);
            (0..d)
                .find(|&c| match &ints {
                    Some(t) => !int_triple_ok(t, d, a, b, c),
                    None => !self.triple_ok(a, b, c),
                })
                .map(|c| (a, b, c))
        });
        match bad {
            None => Ok(()),
            Some((a, b, c)) => Err(Error::Falsified(format!(
                "associativity fails on ({}, {}, {})",
                self.labels[a], self.labels[b], self.labels[c]
            ))),
        }
    }

    /// Copy with one structure constant perturbed; a test hook for fault
    /// injection.
    pub fn with_perturbed_constant(&self, a: usize, b: usize) -> Self {
        let mut out = self.clone();
        let d = self.dim();
        let entry = &mut out.table[a * d + b];
        let k = &self.field;
        let target = d - 1;
        match entry.iter_mut().find(|(i, _)| *i == target) {
            Some((_, c)) => *c = k.add(c, &k.one()),
            None => entry.push((target, k.one())),
        }
        entry.retain(|(_, c)| !k.is_zero(c));
        out
    }

    /// Tr(L_x) for each basis x.
    pub fn traces(&self) -> Vec<K::Elem> {
        let k = &self.field;
        let d = self.dim();
        (0..d)
            .map(|a| {
                let mut t = k.zero();
                for b in 0..d {
                    if let Some((_, c)) = self.table[a * d + b].iter().find(|(i, _)| *i == b) {
                        t = k.add(&t, c);
                    }
                }
                t
            })
            .collect()
    }

    /// Gram matrix of the trace form (x, y) ↦ Tr(L_{xy}).
    pub fn trace_form(&self) -> Matrix<K::Elem> {
        let k = &self.field;
        let d = self.dim();
        let tr = self.traces();
        let mut m = Matrix::zeros(k, d, d);
        for a in 0..d {
            for b in 0..d {
                let v = self.table[a * d + b]
                    .iter()
                    .fold(k.zero(), |acc, (i, c)| k.add(&acc, &k.mul(c, &tr[*i])));
                m.set(a, b, v);
            }
        }
        m
    }

    /// Rank of the sandwich map A ⊗ A^op → End_k(A), a ⊗ b ↦ (x ↦ a x b).
    pub fn sandwich_rank(&self) -> usize {
        let d = self.dim();
        let rows = par::map_range(d * d, |ab| {
            let (a, b) = (ab / d, ab % d);
            let mut row = Vec::with_capacity(d * d);
            for x in 0..d {
                let ax = self.mul(&self.basis(a), &self.basis(x));
                row.extend(self.mul(&ax, &self.basis(b)));
            }
            row
        });
        Matrix::from_rows(rows).unwrap().rank(&self.field)
    }

    /// Subalgebra spanned by the given vectors with the given unit (which
    /// must lie in the span). Fails if the span is not closed.
    pub fn subalgebra(&self, basis: &[Vec<K::Elem>], unit: &[K::Elem]) -> Result<Self> {
        let k = &self.field;
        let cols = Matrix::from_cols(basis)?;
        let coords = |v: &[K::Elem]| -> Result<Vec<K::Elem>> {
            cols.solve(k, v)?
                .ok_or_else(|| Error::Falsified("span is not closed under multiplication".into()))
        };
        let r = basis.len();
        let mut products = Vec::with_capacity(r * r);
        for x in basis {
            for y in basis {
                products.push(coords(&self.mul(x, y))?);
            }
        }
        let labels = (0..r).map(|i| format!("b{}", i + 1)).collect();
        Self::from_dense(k.clone(), labels, products, coords(unit)?)
    }

    /// Quotient by a two-sided ideal spanned by the given vectors. The
    /// complement basis is chosen greedily among the standard basis vectors.
    pub fn quotient(&self, ideal: &[Vec<K::Elem>]) -> Result<Self> {
        let k = &self.field;
        let d = self.dim();
        let mut span: Vec<Vec<K::Elem>> = Vec::new();
        let mut rank = 0;
        for v in ideal {
            span.push(v.clone());
            let r = Matrix::from_rows(span.clone())?.rank(k);
            if r > rank {
                rank = r;
            } else {
                span.pop();
            }
        }
        let ideal_basis = span.clone();
        let mut complement = Vec::new();
        for b in 0..d {
            span.push(self.basis(b));
            let r = Matrix::from_rows(span.clone())?.rank(k);
            if r > rank {
                rank = r;
                complement.push(b);
            } else {
                span.pop();
            }
        }
        // coordinates w.r.t. [complement basis vectors | ideal basis]
        let mut all: Vec<Vec<K::Elem>> = complement.iter().map(|&b| self.basis(b)).collect();
        all.extend(ideal_basis);
        let m = Matrix::from_cols(&all)?;
        let r = complement.len();
        let project = |v: &[K::Elem]| -> Vec<K::Elem> {
            let c = m.solve(k, v).unwrap().expect("full-rank basis");
            c[..r].to_vec()
        };
        // the ideal must be closed under multiplication by the basis
        for v in ideal {
            for b in 0..d {
                let e = self.basis(b);
                for w in [self.mul(&e, v), self.mul(v, &e)] {
                    let c = m.solve(k, &w)?.unwrap();
                    if c[..r].iter().any(|x| !k.is_zero(x)) {
                        return Err(Error::Falsified("span is not a two-sided ideal".into()));
                    }
                }
            }
        }
        let mut products = Vec::with_capacity(r * r);
        for &a in &complement {
            for &b in &complement {
                products.push(project(self.basis_product_dense(a, b).as_slice()));
            }
        }
        let labels = complement.iter().map(|&b| self.labels[b].clone()).collect();
        Self::from_dense(k.clone(), labels, products, project(&self.unit))
    }

    pub fn basis_product_dense(&self, a: usize, b: usize) -> Vec<K::Elem> {
        let mut v = self.zero_vec();
        for (i, c) in self.basis_product(a, b) {
            v[*i] = c.clone();
        }
        v
    }

    /// Exhaustive search for x, y ≠ 0 with x·y = 0 over a finite field, in
    /// element index order. `None` if there is none or the search would
    /// exceed `budget` elements.
    pub fn find_zero_divisor(&self, budget: u64) -> Option<(Vec<K::Elem>, Vec<K::Elem>)> {
        let k = &self.field;
        let elems = k.elements()?;
        let q = elems.len() as u64;
        let d = self.dim() as u32;
        let total = q.checked_pow(d).filter(|&t| t <= budget)?;
        par::find_map_first(total as usize, |idx| {
            let mut i = idx as u64;
            let x: Vec<K::Elem> = (0..d)
                .map(|_| {
                    let e = elems[(i % q) as usize].clone();
                    i /= q;
                    e
                })
                .collect();
            if self.is_zero(&x) {
                return None;
            }
            let ker = self.left_matrix(&x).kernel_basis(k);
            ker.into_iter().next().map(|y| (x, y))
        })
    }

    pub fn to_table(&self) -> AlgebraTable {
        let k = &self.field;
        let d = self.dim();
        AlgebraTable {
            field: k.descriptor().to_string(),
            labels: self.labels.clone(),
            unit: self.unit.iter().map(|c| k.format(c)).collect(),
            constants: (0..d)
                .map(|a| {
                    (0..d)
                        .map(|b| {
                            self.basis_product_dense(a, b)
                                .iter()
                                .map(|c| k.format(c))
                                .collect()
                        })
                        .collect()
                })
                .collect(),
        }
    }
}

pub(crate) fn sparse<K: Field>(k: &K, v: &[K::Elem]) -> Sparse<K::Elem> {
    v.iter()
        .enumerate()
        .filter(|(_, c)| !k.is_zero(c))
        .map(|(i, c)| (i, c.clone()))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rings::{PrimeField, Rationals};

    #[test]
    fn matrix_algebra_is_associative_and_central_simple_shaped() {
        let a = StructuredAlgebra::matrix_algebra(Rationals, 2);
        a.check_unit().unwrap();
        a.check_associativity().unwrap();
        assert_eq!(a.sandwich_rank(), 16);
        assert!(a.trace_form().det(&Rationals).unwrap() != Rationals.zero());
    }

    #[test]
    fn perturbed_constants_break_associativity() {
        let a = StructuredAlgebra::matrix_algebra(PrimeField::new(3).unwrap(), 2);
        let bad = a.with_perturbed_constant(1, 2);
        assert!(matches!(bad.check_associativity(), Err(Error::Falsified(_))));
    }

    #[test]
    fn zero_divisors_in_matrices() {
        let f3 = PrimeField::new(3).unwrap();
        let a = StructuredAlgebra::matrix_algebra(f3, 2);
        let (x, y) = a.find_zero_divisor(1 << 20).unwrap();
        assert!(a.is_zero(&a.mul(&x, &y)));
        assert!(!a.is_zero(&x) && !a.is_zero(&y));
    }

    #[test]
    fn corner_and_quotient() {
        let f5 = PrimeField::new(5).unwrap();
        let a = StructuredAlgebra::matrix_algebra(f5, 2);
        // E11 A E11 = k
        let e11 = a.basis(0);
        let corner = a.subalgebra(std::slice::from_ref(&e11), &e11).unwrap();
        assert_eq!(corner.dim(), 1);
        // the whole algebra is the only nonzero ideal; quotient by 0 is A
        assert_eq!(a.quotient(&[]).unwrap().dim(), 4);
    }
}
