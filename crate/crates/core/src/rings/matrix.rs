use super::Field;
use crate::error::{Error, Result};

/// Dense row-major matrix over a field; the field itself is passed to each
/// operation.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Matrix<E> {
    rows: usize,
    cols: usize,
    data: Vec<E>,
}

impl<E: Clone> Matrix<E> {
    pub fn new(rows: usize, cols: usize, data: Vec<E>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::DimensionMismatch(format!(
                "{} entries for a {rows}x{cols} matrix",
                data.len()
            )));
        }
        Ok(Matrix { rows, cols, data })
    }

    pub fn from_rows(rows: Vec<Vec<E>>) -> Result<Self> {
        let cols = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != cols) {
            return Err(Error::DimensionMismatch("ragged rows".into()));
        }
        let n = rows.len();
        Ok(Matrix {
            rows: n,
            cols,
            data: rows.into_iter().flatten().collect(),
        })
    }

    /// Matrix whose columns are the given vectors.
    pub fn from_cols(cols: &[Vec<E>]) -> Result<Self> {
        Ok(Self::from_rows(cols.to_vec())?.transpose())
    }

    pub fn filled(rows: usize, cols: usize, e: E) -> Self {
        Matrix {
            rows,
            cols,
            data: vec![e; rows * cols],
        }
    }

    pub fn zeros<K: Field<Elem = E>>(k: &K, rows: usize, cols: usize) -> Self {
        Self::filled(rows, cols, k.zero())
    }

    pub fn identity<K: Field<Elem = E>>(k: &K, n: usize) -> Self {
        let mut m = Self::zeros(k, n, n);
        for i in 0..n {
            m.set(i, i, k.one());
        }
        m
    }

    pub fn diagonal<K: Field<Elem = E>>(k: &K, d: &[E]) -> Self {
        let mut m = Self::zeros(k, d.len(), d.len());
        for (i, x) in d.iter().enumerate() {
            m.set(i, i, x.clone());
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }
    pub fn cols(&self) -> usize {
        self.cols
    }
    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }
    pub fn get(&self, i: usize, j: usize) -> &E {
        &self.data[i * self.cols + j]
    }
    pub fn set(&mut self, i: usize, j: usize, e: E) {
        self.data[i * self.cols + j] = e;
    }
    pub fn row(&self, i: usize) -> &[E] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }
    pub fn col(&self, j: usize) -> Vec<E> {
        (0..self.rows).map(|i| self.get(i, j).clone()).collect()
    }
    pub fn to_rows(&self) -> Vec<Vec<E>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }
    pub fn entries(&self) -> &[E] {
        &self.data
    }

    pub fn transpose(&self) -> Self {
        let mut data = Vec::with_capacity(self.data.len());
        for j in 0..self.cols {
            for i in 0..self.rows {
                data.push(self.get(i, j).clone());
            }
        }
        Matrix {
            rows: self.cols,
            cols: self.rows,
            data,
        }
    }

    pub fn map<F: Clone, G: FnMut(&E) -> F>(&self, g: G) -> Matrix<F> {
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(g).collect(),
        }
    }

    pub fn add<K: Field<Elem = E>>(&self, k: &K, o: &Self) -> Result<Self> {
        if (self.rows, self.cols) != (o.rows, o.cols) {
            return Err(self.mismatch(o, "add"));
        }
        Ok(Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&o.data).map(|(a, b)| k.add(a, b)).collect(),
        })
    }

    pub fn scale<K: Field<Elem = E>>(&self, k: &K, c: &E) -> Self {
        self.map(|a| k.mul(a, c))
    }

    pub fn mul<K: Field<Elem = E>>(&self, k: &K, o: &Self) -> Result<Self> {
        if self.cols != o.rows {
            return Err(self.mismatch(o, "multiply"));
        }
        let mut out = Self::zeros(k, self.rows, o.cols);
        for i in 0..self.rows {
            for l in 0..self.cols {
                let a = self.get(i, l);
                if k.is_zero(a) {
                    continue;
                }
                for j in 0..o.cols {
                    let b = o.get(l, j);
                    if !k.is_zero(b) {
                        let v = k.add(out.get(i, j), &k.mul(a, b));
                        out.set(i, j, v);
                    }
                }
            }
        }
        Ok(out)
    }

    pub fn mul_vec<K: Field<Elem = E>>(&self, k: &K, v: &[E]) -> Result<Vec<E>> {
        if v.len() != self.cols {
            return Err(Error::DimensionMismatch(format!(
                "vector of length {} against {} columns",
                v.len(),
                self.cols
            )));
        }
        Ok((0..self.rows).map(|i| k.dot(self.row(i), v)).collect())
    }

    /// Determinant by fraction-free (Bareiss) elimination.
    pub fn det<K: Field<Elem = E>>(&self, k: &K) -> Result<E> {
        if !self.is_square() {
            return Err(Error::DimensionMismatch(format!(
                "determinant of a {}x{} matrix",
                self.rows, self.cols
            )));
        }
        let n = self.rows;
        if n == 0 {
            return Ok(k.one());
        }
        let mut a = self.to_rows();
        let mut prev = k.one();
        let mut negate = false;
        for c in 0..n - 1 {
            if k.is_zero(&a[c][c]) {
                match (c + 1..n).find(|&i| !k.is_zero(&a[i][c])) {
                    Some(i) => {
                        a.swap(i, c);
                        negate = !negate;
                    }
                    None => return Ok(k.zero()),
                }
            }
            for i in c + 1..n {
                for j in c + 1..n {
                    let num = k.sub(&k.mul(&a[i][j], &a[c][c]), &k.mul(&a[i][c], &a[c][j]));
                    a[i][j] = k.div(&num, &prev).unwrap();
                }
            }
            prev = a[c][c].clone();
        }
        let d = a[n - 1][n - 1].clone();
        Ok(if negate { k.neg(&d) } else { d })
    }

    /// Reduced row echelon form and pivot columns.
    pub fn rref<K: Field<Elem = E>>(&self, k: &K) -> (Self, Vec<usize>) {
        let mut m = self.clone();
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..self.cols {
            if r == self.rows {
                break;
            }
            let Some(p) = (r..self.rows).find(|&i| !k.is_zero(m.get(i, c))) else {
                continue;
            };
            m.swap_rows(p, r);
            let inv = k.inv(m.get(r, c)).unwrap();
            for j in c..self.cols {
                let v = k.mul(m.get(r, j), &inv);
                m.set(r, j, v);
            }
            for i in 0..self.rows {
                if i == r {
                    continue;
                }
                let f = m.get(i, c).clone();
                if k.is_zero(&f) {
                    continue;
                }
                for j in c..self.cols {
                    let rj = m.get(r, j);
                    if !k.is_zero(rj) {
                        let v = k.sub(m.get(i, j), &k.mul(&f, rj));
                        m.set(i, j, v);
                    }
                }
            }
            pivots.push(c);
            r += 1;
        }
        (m, pivots)
    }

    pub fn rank<K: Field<Elem = E>>(&self, k: &K) -> usize {
        self.rref(k).1.len()
    }

    /// Basis of {x : M x = 0}, one vector per free column, with a 1 in that
    /// column.
    pub fn kernel_basis<K: Field<Elem = E>>(&self, k: &K) -> Vec<Vec<E>> {
        let (r, pivots) = self.rref(k);
        let free: Vec<usize> = (0..self.cols).filter(|c| !pivots.contains(c)).collect();
        free.iter()
            .map(|&f| {
                let mut v = vec![k.zero(); self.cols];
                v[f] = k.one();
                for (i, &p) in pivots.iter().enumerate() {
                    v[p] = k.neg(r.get(i, f));
                }
                v
            })
            .collect()
    }

    /// Some solution of M x = b, or `None` if the system is inconsistent.
    pub fn solve<K: Field<Elem = E>>(&self, k: &K, b: &[E]) -> Result<Option<Vec<E>>> {
        if b.len() != self.rows {
            return Err(Error::DimensionMismatch(format!(
                "right-hand side of length {} for {} rows",
                b.len(),
                self.rows
            )));
        }
        let mut aug = Self::zeros(k, self.rows, self.cols + 1);
        for i in 0..self.rows {
            for j in 0..self.cols {
                aug.set(i, j, self.get(i, j).clone());
            }
            aug.set(i, self.cols, b[i].clone());
        }
        let (r, pivots) = aug.rref(k);
        if pivots.last() == Some(&self.cols) {
            return Ok(None);
        }
        let mut x = vec![k.zero(); self.cols];
        for (i, &p) in pivots.iter().enumerate() {
            x[p] = r.get(i, self.cols).clone();
        }
        Ok(Some(x))
    }

    pub fn inverse<K: Field<Elem = E>>(&self, k: &K) -> Option<Self> {
        if !self.is_square() {
            return None;
        }
        let n = self.rows;
        let mut aug = Self::zeros(k, n, 2 * n);
        for i in 0..n {
            for j in 0..n {
                aug.set(i, j, self.get(i, j).clone());
            }
            aug.set(i, n + i, k.one());
        }
        let (r, pivots) = aug.rref(k);
        if pivots.len() < n || pivots[n - 1] != n - 1 {
            return None;
        }
        let mut out = Self::zeros(k, n, n);
        for i in 0..n {
            for j in 0..n {
                out.set(i, j, r.get(i, n + j).clone());
            }
        }
        Some(out)
    }

    pub fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.data.swap(a * self.cols + j, b * self.cols + j);
        }
    }

    fn mismatch(&self, o: &Self, what: &str) -> Error {
        Error::DimensionMismatch(format!(
            "cannot {what} {}x{} and {}x{}",
            self.rows, self.cols, o.rows, o.cols
        ))
    }

    pub fn format<K: Field<Elem = E>>(&self, k: &K) -> Vec<Vec<String>> {
        (0..self.rows)
            .map(|i| self.row(i).iter().map(|e| k.format(e)).collect())
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rings::{ints, ExtensionField, FunctionField, PrimeField, Rationals};
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn diagonal_examples() {
        let q = Rationals;
        let d = Matrix::diagonal(&q, &ints(&q, &[2, 4, 6]));
        assert_eq!(d.det(&q).unwrap(), q.from_int(48));
        let m = Matrix::diagonal(&q, &ints(&q, &[1, 1, 1, 0]));
        assert_eq!(m.rank(&q), 3);
        assert_eq!(m.kernel_basis(&q), vec![ints(&q, &[0, 0, 0, 1])]);
        assert!(Matrix::zeros(&q, 2, 3).det(&q).is_err());
    }

    #[test]
    fn solve_and_inverse() {
        let f5 = PrimeField::new(5).unwrap();
        let m = Matrix::from_rows(vec![ints(&f5, &[1, 2]), ints(&f5, &[3, 4])]).unwrap();
        let x = m.solve(&f5, &ints(&f5, &[1, 1])).unwrap().unwrap();
        assert_eq!(m.mul_vec(&f5, &x).unwrap(), ints(&f5, &[1, 1]));
        let inv = m.inverse(&f5).unwrap();
        assert_eq!(m.mul(&f5, &inv).unwrap(), Matrix::identity(&f5, 2));
        let sing = Matrix::from_rows(vec![ints(&f5, &[1, 2]), ints(&f5, &[2, 4])]).unwrap();
        assert_eq!(sing.solve(&f5, &ints(&f5, &[0, 1])).unwrap(), None);
        assert!(sing.inverse(&f5).is_none());
    }

    fn random_matrix<K: Field, R: rand::Rng>(k: &K, n: usize, rng: &mut R) -> Matrix<K::Elem> {
        Matrix::new(n, n, (0..n * n).map(|_| k.sample(rng)).collect()).unwrap()
    }

    fn det_multiplicative<K: Field>(k: &K, seed: u64, n: usize) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a = random_matrix(k, n, &mut rng);
        let b = random_matrix(k, n, &mut rng);
        let ab = a.mul(k, &b).unwrap();
        assert_eq!(
            ab.det(k).unwrap(),
            k.mul(&a.det(k).unwrap(), &b.det(k).unwrap())
        );
    }

    fn rank_nullity<K: Field>(k: &K, seed: u64, r: usize, c: usize) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        // low-rank products make nontrivial kernels likely
        let inner = 1 + (seed as usize % r.max(1));
        let a = Matrix::new(r, inner, (0..r * inner).map(|_| k.sample(&mut rng)).collect()).unwrap();
        let b = Matrix::new(inner, c, (0..inner * c).map(|_| k.sample(&mut rng)).collect()).unwrap();
        let m = a.mul(k, &b).unwrap();
        let ker = m.kernel_basis(k);
        assert_eq!(m.rank(k) + ker.len(), c);
        for v in &ker {
            assert!(m.mul_vec(k, v).unwrap().iter().all(|x| k.is_zero(x)));
        }
        if !ker.is_empty() {
            assert_eq!(Matrix::from_cols(&ker).unwrap().rank(k), ker.len());
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]

        #[test]
        fn det_is_multiplicative(seed in any::<u64>(), n in 1usize..=5) {
            det_multiplicative(&Rationals, seed, n);
            det_multiplicative(&PrimeField::new(5).unwrap(), seed, n);
            det_multiplicative(&PrimeField::new(2).unwrap(), seed, n);
            det_multiplicative(&ExtensionField::new(3, 2).unwrap(), seed, n);
            if n <= 3 {
                det_multiplicative(&FunctionField::new(PrimeField::new(3).unwrap(), "t").unwrap(), seed, n);
            }
        }

        #[test]
        fn rank_plus_nullity(seed in any::<u64>(), r in 1usize..=6, c in 1usize..=6) {
            rank_nullity(&Rationals, seed, r, c);
            rank_nullity(&PrimeField::new(3).unwrap(), seed, r, c);
            rank_nullity(&FunctionField::new(Rationals, "t").unwrap(), seed, r.min(3), c.min(3));
        }
    }
}
