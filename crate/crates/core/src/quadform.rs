//! Quadratic forms with possibly degenerate polar forms.

use rand::Rng;

use crate::error::{Error, Result};
use crate::rings::{Field, Matrix};

/// q(x) = Σ_{i≤j} c_ij x_i x_j, stored as an upper-triangular matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadraticForm<K: Field> {
    field: K,
    coeffs: Matrix<K::Elem>,
}

/// Determinant of the polar matrix (halved in odd rank) with its
/// canonical square-class representative.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Discriminant<E> {
    pub value: E,
    pub square_class: E,
    pub is_square: bool,
    pub half: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DegenerationReport<E> {
    /// `None` for odd rank in characteristic 2.
    pub discriminant: Option<Discriminant<E>>,
    pub radical_dim: usize,
    pub simple: bool,
}

impl<K: Field> QuadraticForm<K> {
    /// From an upper-triangular coefficient matrix; nonzero entries below the
    /// diagonal are rejected.
    pub fn from_upper(field: K, coeffs: Matrix<K::Elem>) -> Result<Self> {
        if !coeffs.is_square() {
            return Err(Error::DimensionMismatch(format!(
                "coefficient matrix is {}x{}",
                coeffs.rows(),
                coeffs.cols()
            )));
        }
        for i in 0..coeffs.rows() {
            for j in 0..i {
                if !field.is_zero(coeffs.get(i, j)) {
                    return Err(Error::DimensionMismatch(format!(
                        "entry ({}, {}) below the diagonal is nonzero",
                        i + 1,
                        j + 1
                    )));
                }
            }
        }
        Ok(QuadraticForm { field, coeffs })
    }

    /// From coefficients c_ij for all i, j: the lower part is folded onto
    /// the upper part, so this represents Σ_{i,j} c_ij x_i x_j.
    pub fn from_full(field: K, m: &Matrix<K::Elem>) -> Result<Self> {
        if !m.is_square() {
            return Err(Error::DimensionMismatch("square matrix expected".into()));
        }
        let n = m.rows();
        let mut c = Matrix::zeros(&field, n, n);
        for i in 0..n {
            c.set(i, i, m.get(i, i).clone());
            for j in i + 1..n {
                c.set(i, j, field.add(m.get(i, j), m.get(j, i)));
            }
        }
        Ok(QuadraticForm { field, coeffs: c })
    }

    pub fn diagonal(field: K, d: &[K::Elem]) -> Self {
        let coeffs = Matrix::diagonal(&field, d);
        QuadraticForm { field, coeffs }
    }

    pub fn zero(field: K, n: usize) -> Self {
        let coeffs = Matrix::zeros(&field, n, n);
        QuadraticForm { field, coeffs }
    }

    /// H(m) = Σ x_i y_i with coordinates ordered x_1, y_1, x_2, y_2, ...
    pub fn hyperbolic(field: K, m: usize) -> Self {
        let mut q = Self::zero(field, 2 * m);
        for i in 0..m {
            q.coeffs.set(2 * i, 2 * i + 1, q.field.one());
        }
        q
    }

    /// Random form with each coefficient nonzero with probability `density`.
    pub fn random<R: Rng + ?Sized>(field: K, n: usize, density: f64, rng: &mut R) -> Self {
        let mut q = Self::zero(field, n);
        for i in 0..n {
            for j in i..n {
                if rng.gen_bool(density) {
                    let c = q.field.sample(rng);
                    q.coeffs.set(i, j, c);
                }
            }
        }
        q
    }

    pub fn field(&self) -> &K {
        &self.field
    }
    pub fn rank(&self) -> usize {
        self.coeffs.rows()
    }
    pub fn coeff(&self, i: usize, j: usize) -> &K::Elem {
        self.coeffs.get(i, j)
    }
    pub fn coeffs(&self) -> &Matrix<K::Elem> {
        &self.coeffs
    }

    pub fn evaluate(&self, v: &[K::Elem]) -> Result<K::Elem> {
        self.check_len(v)?;
        Ok(self.eval_unchecked(v))
    }

    pub(crate) fn eval_unchecked(&self, v: &[K::Elem]) -> K::Elem {
        let k = &self.field;
        let n = self.rank();
        let mut acc = k.zero();
        for i in 0..n {
            if k.is_zero(&v[i]) {
                continue;
            }
            let mut row = k.zero();
            for j in i..n {
                let c = self.coeffs.get(i, j);
                if !k.is_zero(c) && !k.is_zero(&v[j]) {
                    row = k.add(&row, &k.mul(c, &v[j]));
                }
            }
            acc = k.add(&acc, &k.mul(&v[i], &row));
        }
        acc
    }

    /// b_q(u, v) = q(u + v) - q(u) - q(v).
    pub fn polar(&self, u: &[K::Elem], v: &[K::Elem]) -> Result<K::Elem> {
        self.check_len(u)?;
        self.check_len(v)?;
        Ok(self.polar_unchecked(u, v))
    }

    pub(crate) fn polar_unchecked(&self, u: &[K::Elem], v: &[K::Elem]) -> K::Elem {
        let k = &self.field;
        let n = self.rank();
        let mut acc = k.zero();
        for i in 0..n {
            for j in i..n {
                let c = self.coeffs.get(i, j);
                if k.is_zero(c) {
                    continue;
                }
                let t = if i == j {
                    k.mul(&k.from_int(2), &k.mul(&u[i], &v[i]))
                } else {
                    k.add(&k.mul(&u[i], &v[j]), &k.mul(&u[j], &v[i]))
                };
                acc = k.add(&acc, &k.mul(c, &t));
            }
        }
        acc
    }

    /// Gram matrix of b_q: B_ii = 2 c_ii, B_ij = B_ji = c_ij.
    pub fn polar_matrix(&self) -> Matrix<K::Elem> {
        let k = &self.field;
        let n = self.rank();
        let mut b = Matrix::zeros(k, n, n);
        for i in 0..n {
            b.set(i, i, k.add(self.coeff(i, i), self.coeff(i, i)));
            for j in i + 1..n {
                b.set(i, j, self.coeff(i, j).clone());
                b.set(j, i, self.coeff(i, j).clone());
            }
        }
        b
    }

    /// det B for even rank, det B / 2 for odd rank.
    pub fn discriminant(&self) -> Result<Discriminant<K::Elem>> {
        let k = &self.field;
        let half = self.rank() % 2 == 1;
        if half && k.characteristic() == 2 {
            return Err(Error::OddRankChar2);
        }
        let mut value = self.polar_matrix().det(k)?;
        if half {
            value = k.div(&value, &k.from_int(2)).unwrap();
        }
        let square_class = k.square_class(&value);
        Ok(Discriminant {
            is_square: k.is_zero(&value) || k.is_one(&square_class),
            square_class,
            value,
            half,
        })
    }

    pub fn radical(&self) -> Vec<Vec<K::Elem>> {
        self.polar_matrix().kernel_basis(&self.field)
    }

    pub fn radical_dim(&self) -> usize {
        self.rank() - self.polar_matrix().rank(&self.field)
    }

    pub fn degeneration_report(&self) -> DegenerationReport<K::Elem> {
        let radical_dim = self.radical_dim();
        DegenerationReport {
            discriminant: self.discriminant().ok(),
            radical_dim,
            simple: radical_dim <= 1,
        }
    }

    pub fn direct_sum(&self, other: &Self) -> Result<Self> {
        if self.field != other.field {
            return Err(Error::FieldMismatch(format!(
                "{} vs {}",
                self.field.descriptor(),
                other.field.descriptor()
            )));
        }
        let (a, b) = (self.rank(), other.rank());
        let mut c = Matrix::zeros(&self.field, a + b, a + b);
        for i in 0..a {
            for j in i..a {
                c.set(i, j, self.coeff(i, j).clone());
            }
        }
        for i in 0..b {
            for j in i..b {
                c.set(a + i, a + j, other.coeff(i, j).clone());
            }
        }
        Ok(QuadraticForm {
            field: self.field.clone(),
            coeffs: c,
        })
    }

    pub fn scale(&self, lambda: &K::Elem) -> Self {
        QuadraticForm {
            field: self.field.clone(),
            coeffs: self.coeffs.scale(&self.field, lambda),
        }
    }

    /// s·self + t·other, coefficientwise.
    pub fn combine(&self, s: &K::Elem, other: &Self, t: &K::Elem) -> Result<Self> {
        let lhs = self.coeffs.scale(&self.field, s);
        let rhs = other.coeffs.scale(&self.field, t);
        Ok(QuadraticForm {
            field: self.field.clone(),
            coeffs: lhs.add(&self.field, &rhs)?,
        })
    }

    /// The form x ↦ q(Σ x_i p_i) for arbitrary vectors p_i:
    /// c'_ii = q(p_i), c'_ij = b_q(p_i, p_j).
    pub fn pullback(&self, basis: &[Vec<K::Elem>]) -> Result<Self> {
        for p in basis {
            self.check_len(p)?;
        }
        let r = basis.len();
        let mut c = Matrix::zeros(&self.field, r, r);
        for i in 0..r {
            c.set(i, i, self.eval_unchecked(&basis[i]));
            for j in i + 1..r {
                c.set(i, j, self.polar_unchecked(&basis[i], &basis[j]));
            }
        }
        Ok(QuadraticForm {
            field: self.field.clone(),
            coeffs: c,
        })
    }

    /// Restriction to the span of linearly independent vectors, in their
    /// coordinates.
    pub fn restrict(&self, basis: &[Vec<K::Elem>]) -> Result<Self> {
        for p in basis {
            self.check_len(p)?;
        }
        if !basis.is_empty() && Matrix::from_rows(basis.to_vec())?.rank(&self.field) < basis.len() {
            return Err(Error::DependentBasis);
        }
        self.pullback(basis)
    }

    /// N⊥ as a list of basis vectors.
    pub fn orthogonal(&self, vectors: &[Vec<K::Elem>]) -> Result<Vec<Vec<K::Elem>>> {
        let b = self.polar_matrix();
        let mut rows = Vec::new();
        for v in vectors {
            rows.push(b.mul_vec(&self.field, v)?);
        }
        if rows.is_empty() {
            return Ok(crate::rings::Matrix::identity(&self.field, self.rank()).to_rows());
        }
        Ok(Matrix::from_rows(rows)?.kernel_basis(&self.field))
    }

    /// Representatives in N⊥ of a basis of N⊥/N, chosen greedily from the
    /// kernel basis of b(N, -).
    pub fn reduction_basis(&self, n: &[K::Elem]) -> Result<Vec<Vec<K::Elem>>> {
        self.check_regular_isotropic(n)?;
        let k = &self.field;
        let perp = self.orthogonal(&[n.to_vec()])?;
        let mut chosen = vec![n.to_vec()];
        let mut rank = 1;
        for v in perp {
            chosen.push(v);
            let r = Matrix::from_rows(chosen.clone())?.rank(k);
            if r > rank {
                rank = r;
            } else {
                chosen.pop();
            }
        }
        chosen.remove(0);
        Ok(chosen)
    }

    /// The form q' on N⊥/N induced by q, for a regular isotropic vector N.
    pub fn reduced_form(&self, n: &[K::Elem]) -> Result<Self> {
        let reps = self.reduction_basis(n)?;
        self.pullback(&reps)
    }

    /// q' computed from caller-chosen representatives of a basis of N⊥/N.
    pub fn reduced_form_in(&self, n: &[K::Elem], reps: &[Vec<K::Elem>]) -> Result<Self> {
        self.check_regular_isotropic(n)?;
        let k = &self.field;
        if reps.len() + 2 != self.rank() {
            return Err(Error::WrongRank {
                expected: self.rank().saturating_sub(2),
                got: reps.len(),
            });
        }
        for r in reps {
            if !k.is_zero(&self.polar(n, r)?) {
                return Err(Error::DimensionMismatch(
                    "representative is not orthogonal to N".into(),
                ));
            }
        }
        let mut all = reps.to_vec();
        all.push(n.to_vec());
        if Matrix::from_rows(all)?.rank(k) < reps.len() + 1 {
            return Err(Error::DependentBasis);
        }
        self.pullback(reps)
    }

    pub(crate) fn check_regular_isotropic(&self, n: &[K::Elem]) -> Result<()> {
        let k = &self.field;
        if !k.is_zero(&self.evaluate(n)?) || n.iter().all(|x| k.is_zero(x)) {
            return Err(Error::NotIsotropic);
        }
        if self
            .polar_matrix()
            .mul_vec(k, n)?
            .iter()
            .all(|x| k.is_zero(x))
        {
            return Err(Error::InRadical);
        }
        Ok(())
    }

    fn check_len(&self, v: &[K::Elem]) -> Result<()> {
        if v.len() != self.rank() {
            return Err(Error::DimensionMismatch(format!(
                "vector of length {} for a rank-{} form",
                v.len(),
                self.rank()
            )));
        }
        Ok(())
    }

    /// Coefficient rows as strings, upper triangle only.
    pub fn format_coeffs(&self) -> Vec<Vec<String>> {
        let n = self.rank();
        (0..n)
            .map(|i| (0..n).map(|j| self.field.format(self.coeff(i, j))).collect())
            .collect()
    }

    /// Literal accepted by the CLI parser.
    pub fn to_literal(&self) -> String {
        let rows: Vec<String> = self
            .format_coeffs()
            .into_iter()
            .map(|r| format!("[{}]", r.join(",")))
            .collect();
        format!(
            "field={}; n={}; coeffs=[{}]",
            self.field.descriptor(),
            self.rank(),
            rows.join(",")
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rings::{ints, PrimeField, Rationals};
    use proptest::prelude::{any, ProptestConfig};
    use proptest::proptest;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn diag<K: Field>(k: &K, d: &[i64]) -> QuadraticForm<K> {
        QuadraticForm::diagonal(k.clone(), &ints(k, d))
    }

    #[test]
    fn evaluation_examples() {
        let q = Rationals;
        assert!(q.is_zero(&diag(&q, &[1, -1]).evaluate(&ints(&q, &[1, 1])).unwrap()));
        assert_eq!(diag(&q, &[1, 2, 3]).evaluate(&ints(&q, &[1, 1, 1])).unwrap(), q.from_int(6));
        let f2 = PrimeField::new(2).unwrap();
        let m = Matrix::from_rows(vec![vec![1, 1], vec![0, 1]]).unwrap();
        let x2xy = QuadraticForm::from_upper(f2, m).unwrap();
        assert_eq!(x2xy.evaluate(&[1, 1]).unwrap(), 1);
        assert_eq!(x2xy.polar_matrix().to_rows(), vec![vec![0, 1], vec![1, 0]]);
        assert!(diag(&q, &[1]).evaluate(&ints(&q, &[1, 2])).is_err());
    }

    #[test]
    fn polar_and_discriminant_examples() {
        let q = Rationals;
        let d = diag(&q, &[1, 2, 3]);
        assert_eq!(d.polar_matrix(), Matrix::diagonal(&q, &ints(&q, &[2, 4, 6])));
        let disc = d.discriminant().unwrap();
        assert_eq!(disc.value, q.from_int(24));
        assert_eq!(disc.square_class, q.from_int(6));
        let h = QuadraticForm::hyperbolic(q, 1);
        assert_eq!(h.discriminant().unwrap().square_class, q.from_int(-1));
        assert!(q.is_zero(&diag(&q, &[1, 1, 1, 0]).discriminant().unwrap().value));
        let h2 = QuadraticForm::hyperbolic(q, 2);
        assert_eq!(h2.polar_matrix().det(&q).unwrap(), q.one());
        let f2 = PrimeField::new(2).unwrap();
        assert!(matches!(
            diag(&f2, &[1, 1, 1]).discriminant(),
            Err(Error::OddRankChar2)
        ));
    }

    #[test]
    fn radicals() {
        let q = Rationals;
        assert_eq!(diag(&q, &[1, 1, 1, 0]).radical(), vec![ints(&q, &[0, 0, 0, 1])]);
        assert!(diag(&q, &[1, 2]).radical().is_empty());
        assert_eq!(diag(&q, &[1, 0, 0]).radical_dim(), 2);
        let rep = diag(&q, &[1, 0, 0]).degeneration_report();
        assert!(!rep.simple);
    }

    #[test]
    fn sums_and_restrictions() {
        let q = Rationals;
        assert_eq!(diag(&q, &[1]).direct_sum(&diag(&q, &[-1])).unwrap(), diag(&q, &[1, -1]));
        let h = QuadraticForm::hyperbolic(q, 1);
        assert_eq!(h.direct_sum(&h).unwrap(), QuadraticForm::hyperbolic(q, 2));
        assert_eq!(h.direct_sum(&QuadraticForm::zero(q, 0)).unwrap(), h);
        let f3 = PrimeField::new(3).unwrap();
        assert!(matches!(
            diag(&f3, &[1]).direct_sum(&diag(&PrimeField::new(5).unwrap(), &[1])),
            Err(Error::FieldMismatch(_))
        ));
        let e = |v: &[i64]| ints(&q, v);
        assert_eq!(
            diag(&q, &[1, 1, 1]).restrict(&[e(&[1, 0, 0]), e(&[0, 1, 0])]).unwrap(),
            diag(&q, &[1, 1])
        );
        assert_eq!(h.restrict(&[e(&[1, 0])]).unwrap(), diag(&q, &[0]));
        assert!(matches!(
            h.restrict(&[e(&[1, 0]), e(&[2, 0])]),
            Err(Error::DependentBasis)
        ));
    }

    #[test]
    fn reduced_forms() {
        let q = Rationals;
        let e = |v: &[i64]| ints(&q, v);
        let f = diag(&q, &[1, -1, 1, 1]);
        let red = f.reduced_form(&e(&[1, 1, 0, 0])).unwrap();
        assert_eq!(red, diag(&q, &[1, 1]));
        let g = QuadraticForm::hyperbolic(q, 1).direct_sum(&diag(&q, &[5])).unwrap();
        assert_eq!(g.reduced_form(&e(&[1, 0, 0])).unwrap(), diag(&q, &[5]));
        let d = diag(&q, &[1, -1, 0]);
        assert!(matches!(d.reduced_form(&e(&[0, 0, 1])), Err(Error::InRadical)));
        assert!(matches!(d.reduced_form(&e(&[1, 0, 0])), Err(Error::NotIsotropic)));
        // discriminant class is preserved once the hyperbolic -1 is removed
        let dq = f.discriminant().unwrap().square_class;
        let dr = red.discriminant().unwrap().square_class;
        assert_eq!(dq, q.square_class(&q.neg(&dr)));
    }

    fn check_homogeneity_and_polar<K: Field>(k: K, seed: u64) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let n = rng.gen_range(1..=6);
        let f = QuadraticForm::random(k.clone(), n, 0.6, &mut rng);
        let v: Vec<_> = (0..n).map(|_| k.sample(&mut rng)).collect();
        let u: Vec<_> = (0..n).map(|_| k.sample(&mut rng)).collect();
        let l = k.sample(&mut rng);
        let lv: Vec<_> = v.iter().map(|x| k.mul(&l, x)).collect();
        assert_eq!(
            f.evaluate(&lv).unwrap(),
            k.mul(&k.mul(&l, &l), &f.evaluate(&v).unwrap())
        );
        let uv: Vec<_> = u.iter().zip(&v).map(|(a, b)| k.add(a, b)).collect();
        let expected = k.sub(
            &k.sub(&f.evaluate(&uv).unwrap(), &f.evaluate(&u).unwrap()),
            &f.evaluate(&v).unwrap(),
        );
        let bv = f.polar_matrix().mul_vec(&k, &v).unwrap();
        assert_eq!(k.dot(&u, &bv), expected);
        assert_eq!(f.polar(&u, &v).unwrap(), expected);
    }

    fn check_disc_multiplicative<K: Field>(k: K, seed: u64) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (a, b) = if seed.is_multiple_of(2) {
            (2 * rng.gen_range(1..=2), 2 * rng.gen_range(1..=2))
        } else {
            (2 * rng.gen_range(0..=1) + 1, 2 * rng.gen_range(0..=1) + 1)
        };
        let f = QuadraticForm::random(k.clone(), a, 0.7, &mut rng);
        let g = QuadraticForm::random(k.clone(), b, 0.7, &mut rng);
        let s = f.direct_sum(&g).unwrap();
        let (df, dg, ds) = (
            f.discriminant().unwrap(),
            g.discriminant().unwrap(),
            s.discriminant().unwrap(),
        );
        // odd ⊥ odd: det B = (2 df)(2 dg), so the sum's value is 4 df dg
        assert_eq!(ds.square_class, k.square_class(&k.mul(&df.value, &dg.value)));
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(40))]

        #[test]
        fn homogeneity_and_polarization(seed in any::<u64>()) {
            check_homogeneity_and_polar(Rationals, seed);
            check_homogeneity_and_polar(PrimeField::new(2).unwrap(), seed);
            check_homogeneity_and_polar(PrimeField::new(3).unwrap(), seed);
            check_homogeneity_and_polar(PrimeField::new(5).unwrap(), seed);
        }

        #[test]
        fn discriminant_of_sums(seed in any::<u64>()) {
            check_disc_multiplicative(Rationals, seed);
            check_disc_multiplicative(PrimeField::new(5).unwrap(), seed);
            check_disc_multiplicative(PrimeField::new(3).unwrap(), seed);
        }
    }
}
