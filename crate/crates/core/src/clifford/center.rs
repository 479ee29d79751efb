use super::StructuredAlgebra;
use crate::error::{Error, Result};
use crate::par;
use crate::rings::{Field, Matrix};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CenterShape<E> {
    /// The center is the base field.
    Trivial,
    /// k × k, with its two primitive idempotents.
    Split { idempotents: (Vec<E>, Vec<E>) },
    /// A quadratic field extension.
    Field,
    /// k[ε]/(ε²), with ε.
    DualNumbers { epsilon: Vec<E> },
    /// Anything else (dimension above 2, or a shape we cannot decide).
    Other,
}

impl<E> CenterShape<E> {
    pub fn name(&self) -> &'static str {
        match self {
            CenterShape::Trivial => "trivial",
            CenterShape::Split { .. } => "split",
            CenterShape::Field => "field",
            CenterShape::DualNumbers { .. } => "dual-numbers",
            CenterShape::Other => "other",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CenterData<E> {
    /// Basis of the center, unit first.
    pub basis: Vec<Vec<E>>,
    pub dim: usize,
    /// Trace-zero generator z with z² = δ (dimension 2, char ≠ 2).
    pub generator: Option<Vec<E>>,
    pub delta: Option<E>,
    pub delta_class: Option<E>,
    pub split: bool,
    pub shape: CenterShape<E>,
}

/// The center, by solving [z, b] = 0 for every basis element b.
pub fn center<K: Field>(a: &StructuredAlgebra<K>) -> CenterData<K::Elem> {
    let k = a.field();
    let d = a.dim();
    // row (b, i): Σ_x z_x (T[x][b]_i - T[b][x]_i) = 0
    let blocks = par::map_range(d, |b| {
        let mut rows = vec![vec![k.zero(); d]; d];
        for x in 0..d {
            for (i, c) in a.basis_product(x, b) {
                rows[*i][x] = k.add(&rows[*i][x], c);
            }
            for (i, c) in a.basis_product(b, x) {
                rows[*i][x] = k.sub(&rows[*i][x], c);
            }
        }
        rows.retain(|r| r.iter().any(|c| !k.is_zero(c)));
        rows
    });
    let rows: Vec<Vec<K::Elem>> = blocks.into_iter().flatten().collect();
    let kernel = if rows.is_empty() {
        (0..d).map(|i| a.basis(i)).collect()
    } else {
        Matrix::from_rows(rows).unwrap().kernel_basis(k)
    };
    // unit first, then kernel vectors independent of it
    let mut basis = vec![a.unit().to_vec()];
    for v in kernel {
        let mut trial = basis.clone();
        trial.push(v.clone());
        if Matrix::from_rows(trial).unwrap().rank(k) == basis.len() + 1 {
            basis.push(v);
        }
    }
    let dim = basis.len();
    let mut data = CenterData {
        basis: basis.clone(),
        dim,
        generator: None,
        delta: None,
        delta_class: None,
        split: false,
        shape: if dim == 1 {
            CenterShape::Trivial
        } else {
            CenterShape::Other
        },
    };
    if dim != 2 {
        return data;
    }
    let one = &basis[0];
    let z = &basis[1];
    // z² = α z + β
    let cols = Matrix::from_cols(&[one.clone(), z.clone()]).unwrap();
    let c = cols
        .solve(k, &a.mul(z, z))
        .unwrap()
        .expect("the center is a subalgebra");
    let (beta, alpha) = (c[0].clone(), c[1].clone());
    if k.characteristic() != 2 {
        let two = k.from_int(2);
        let half_alpha = k.div(&alpha, &two).unwrap();
        let zz = a.sub(z, &a.scale(one, &half_alpha));
        let delta = k.add(&beta, &k.mul(&half_alpha, &half_alpha));
        let class = k.square_class(&delta);
        data.shape = if k.is_zero(&delta) {
            CenterShape::DualNumbers { epsilon: zz.clone() }
        } else if let Some(r) = k.sqrt(&delta) {
            // e = (1 + z/r) / 2
            let zr = a.scale(&zz, &k.inv(&r).unwrap());
            let inv2 = k.inv(&two).unwrap();
            let e1 = a.scale(&a.add(one, &zr), &inv2);
            let e2 = a.sub(one, &e1);
            data.split = true;
            CenterShape::Split {
                idempotents: (e1, e2),
            }
        } else {
            CenterShape::Field
        };
        data.generator = Some(zz);
        data.delta = Some(delta);
        data.delta_class = Some(class);
        return data;
    }
    // characteristic 2: no trace-zero normalization
    if k.is_zero(&alpha) {
        if let Some(r) = k.sqrt(&beta) {
            data.shape = CenterShape::DualNumbers {
                epsilon: a.add(z, &a.scale(one, &r)),
            };
        }
        return data;
    }
    // x² - αx - β = x² + αx + β in characteristic 2
    let Some(roots) = k.roots(&[beta.clone(), alpha.clone(), k.one()]) else {
        return data;
    };
    data.shape = match roots.first() {
        Some(r) => {
            let r2 = k.add(&alpha, r);
            let denom = k.inv(&k.sub(r, &r2)).unwrap();
            let e1 = a.scale(&a.sub(z, &a.scale(one, &r2)), &denom);
            let e2 = a.sub(one, &e1);
            data.split = true;
            CenterShape::Split {
                idempotents: (e1, e2),
            }
        }
        None => CenterShape::Field,
    };
    data
}

const SANDWICH_CAP: usize = 16;

/// Central simplicity over the base field: center of dimension 1 and a
/// nondegenerate trace form when the characteristic is 0 or exceeds the
/// dimension. In small characteristic the sandwich map A ⊗ A^op → End(A) is
/// tested for bijectivity instead, up to dimension 16.
pub fn is_central_simple<K: Field>(a: &StructuredAlgebra<K>) -> Result<bool> {
    let k = a.field();
    let d = a.dim();
    let p = k.characteristic();
    if p == 0 || p > d as u64 {
        if center(a).dim != 1 {
            return Ok(false);
        }
        return Ok(!k.is_zero(&a.trace_form().det(k)?));
    }
    if d <= SANDWICH_CAP {
        return Ok(a.sandwich_rank() == d * d);
    }
    Err(Error::CharacteristicTooSmall(p, d))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FiberReport {
    pub dim: usize,
    pub central_simple: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AzumayaReport<E> {
    pub center: CenterData<E>,
    pub fibers: Vec<FiberReport>,
    pub ok: bool,
}

/// Fiberwise central simplicity over the maximal quotients of the center.
pub fn azumaya_over_center<K: Field>(a: &StructuredAlgebra<K>) -> Result<AzumayaReport<K::Elem>> {
    let k = a.field();
    let c = center(a);
    let d = a.dim();
    let fibers = match &c.shape {
        CenterShape::Trivial => vec![FiberReport {
            dim: d,
            central_simple: is_central_simple(a)?,
        }],
        CenterShape::Split { idempotents } => {
            let mut out = Vec::new();
            for e in [&idempotents.0, &idempotents.1] {
                let span: Vec<_> = (0..d).map(|b| a.mul(&a.basis(b), e)).collect();
                let basis = span_basis(k, &span);
                let fiber = a.subalgebra(&basis, e)?;
                out.push(FiberReport {
                    dim: fiber.dim(),
                    central_simple: is_central_simple(&fiber)?,
                });
            }
            out
        }
        CenterShape::DualNumbers { epsilon } => {
            let ideal: Vec<_> = (0..d).map(|b| a.mul(epsilon, &a.basis(b))).collect();
            let fiber = a.quotient(&ideal)?;
            vec![FiberReport {
                dim: fiber.dim(),
                central_simple: is_central_simple(&fiber)?,
            }]
        }
        CenterShape::Field => {
            // Azumaya over the center field L iff A ⊗ A^op → End_L(A) is onto.
            if d > SANDWICH_CAP * 2 {
                return Err(Error::CharacteristicTooSmall(k.characteristic(), d));
            }
            vec![FiberReport {
                dim: d / 2,
                central_simple: a.sandwich_rank() == d * d / 2,
            }]
        }
        CenterShape::Other => {
            return Err(Error::UnexpectedCenter(format!(
                "center of dimension {} is not k, k×k, a quadratic field or k[ε]",
                c.dim
            )))
        }
    };
    let expected = if c.dim == 1 { d } else { d / 2 };
    let ok = fibers.iter().all(|f| f.central_simple && f.dim == expected);
    Ok(AzumayaReport {
        center: c,
        fibers,
        ok,
    })
}

/// Rows of the RREF of the given vectors: a basis of their span.
pub(crate) fn span_basis<K: Field>(k: &K, vectors: &[Vec<K::Elem>]) -> Vec<Vec<K::Elem>> {
    if vectors.is_empty() {
        return Vec::new();
    }
    let (r, pivots) = Matrix::from_rows(vectors.to_vec()).unwrap().rref(k);
    (0..pivots.len()).map(|i| r.row(i).to_vec()).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::clifford::even_clifford;
    use crate::quadform::QuadraticForm;
    use crate::rings::{ints, PrimeField, Rationals};

    fn c0<K: Field>(k: &K, d: &[i64]) -> StructuredAlgebra<K> {
        even_clifford(&QuadraticForm::diagonal(k.clone(), &ints(k, d)))
            .unwrap()
            .algebra
    }

    #[test]
    fn centers_of_even_clifford_algebras() {
        let q = Rationals;
        let c = center(&c0(&q, &[1, 1, 1, 1]));
        assert_eq!(c.dim, 2);
        assert!(c.split);
        let CenterShape::Split { idempotents: (e1, e2) } = &c.shape else {
            panic!("expected split center");
        };
        let a = c0(&q, &[1, 1, 1, 1]);
        assert_eq!(&a.mul(e1, e1), e1);
        assert!(a.is_zero(&a.mul(e1, e2)));
        assert_eq!(c.delta_class, Some(q.one()));

        let f5 = PrimeField::new(5).unwrap();
        let c = center(&c0(&f5, &[1, 1, 1, 2]));
        assert_eq!(c.shape, CenterShape::Field);
        assert_eq!(c.delta_class, Some(2));

        assert_eq!(center(&c0(&q, &[1, 1, 1])).dim, 1);
    }

    #[test]
    fn central_simplicity() {
        let q = Rationals;
        assert!(is_central_simple(&c0(&q, &[1, 1, 1])).unwrap());
        assert!(!is_central_simple(&c0(&q, &[1, 1, 0])).unwrap());
        assert!(is_central_simple(&StructuredAlgebra::matrix_algebra(q, 2)).unwrap());
        let f3 = PrimeField::new(3).unwrap();
        let a = c0(&f3, &[1, 1, 1]);
        assert!(is_central_simple(&a).unwrap());
        let (x, y) = a.find_zero_divisor(1 << 16).unwrap();
        assert!(a.is_zero(&a.mul(&x, &y)));
    }

    #[test]
    fn azumaya_fibers() {
        let f5 = PrimeField::new(5).unwrap();
        let r = azumaya_over_center(&c0(&f5, &[1, 1, 1, 0])).unwrap();
        assert!(matches!(r.center.shape, CenterShape::DualNumbers { .. }));
        assert_eq!(r.fibers, vec![FiberReport { dim: 4, central_simple: true }]);
        assert!(r.ok);

        let q = Rationals;
        let r = azumaya_over_center(&c0(&q, &[1, 1, 1, 1])).unwrap();
        assert_eq!(r.fibers.len(), 2);
        assert!(r.ok && r.fibers.iter().all(|f| f.dim == 4));

        let r = azumaya_over_center(&c0(&q, &[1, 1, 0, 0]));
        assert!(!matches!(r, Ok(AzumayaReport { ok: true, .. })));

        let r = azumaya_over_center(&c0(&f5, &[1, 1, 1, 2])).unwrap();
        assert!(r.ok);
    }
}
