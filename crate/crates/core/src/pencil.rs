//! Pencils s·q1 + t·q2: discriminant forms, degeneration points, discriminant
//! covers, Amer–Brumer consistency and section verdicts.

use crate::clifford::{center, even_clifford, CenterShape};
use crate::error::{Error, Result};
use crate::par;
use crate::quadform::QuadraticForm;
use crate::rings::{
    BinaryForm, ExtensionField, Field, FunctionField, Matrix, Poly, PolyRing, PrimeField,
    Rationals,
};
use crate::splitting::{
    find_isotropic, search_polynomial_zero, IsotropySearch, ProjectivePoints, SearchBudget,
    SearchOutcome,
};

#[derive(Debug, Clone, PartialEq)]
pub struct Pencil<K: Field> {
    pub q1: QuadraticForm<K>,
    pub q2: QuadraticForm<K>,
}

impl<K: Field> Pencil<K> {
    pub fn new(q1: QuadraticForm<K>, q2: QuadraticForm<K>) -> Result<Self> {
        if q1.field() != q2.field() {
            return Err(Error::FieldMismatch(format!(
                "{} vs {}",
                q1.field().descriptor(),
                q2.field().descriptor()
            )));
        }
        if q1.rank() != q2.rank() {
            return Err(Error::DimensionMismatch(format!(
                "pencil of forms of ranks {} and {}",
                q1.rank(),
                q2.rank()
            )));
        }
        Ok(Pencil { q1, q2 })
    }

    pub fn field(&self) -> &K {
        self.q1.field()
    }
    pub fn rank(&self) -> usize {
        self.q1.rank()
    }

    pub fn member(&self, s: &K::Elem, t: &K::Elem) -> QuadraticForm<K> {
        self.q1.combine(s, &self.q2, t).unwrap()
    }

    /// Δ(x, 1) = det(x·B1 + B2), halved in odd rank.
    fn affine_discriminant(&self) -> Result<Poly<K::Elem>> {
        let k = self.field();
        let n = self.rank();
        let half = n % 2 == 1;
        if half && k.characteristic() == 2 {
            return Err(Error::OddRankChar2);
        }
        let ring = PolyRing::new(k.clone(), "x");
        let (b1, b2) = (self.q1.polar_matrix(), self.q2.polar_matrix());
        let m: Vec<Vec<Poly<K::Elem>>> = (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| ring.from_coeffs(vec![b2.get(i, j).clone(), b1.get(i, j).clone()]))
                    .collect()
            })
            .collect();
        let det = ring.det(&m);
        Ok(if half {
            ring.scale(&det, &k.inv(&k.from_int(2)).unwrap())
        } else {
            det
        })
    }

    /// The binary discriminant form Δ(s, t) of degree n.
    pub fn discriminant_form(&self) -> Result<BinaryForm<K::Elem>> {
        let f = self.affine_discriminant()?;
        Ok(BinaryForm::from_affine(self.field(), self.rank(), &f))
    }
}

/// A k-rational point (s:t) where the member degenerates.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DegenerationPoint<E> {
    pub s: E,
    pub t: E,
    pub multiplicity: usize,
    pub radical_rank: usize,
}

/// A Galois orbit of degeneration points of degree > 1 over F_p, represented
/// by one root in F_{p^e} (first in element order).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExtensionPoint {
    pub degree: usize,
    pub root: String,
    /// Defining polynomial of F_{p^e} in the generator `a`.
    pub modulus: String,
    pub radical_rank: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PencilAnalysis<E> {
    pub rank: usize,
    pub delta: BinaryForm<E>,
    pub half_discriminant: bool,
    pub squarefree: bool,
    pub points: Vec<DegenerationPoint<E>>,
    pub extension_points: Vec<ExtensionPoint>,
    /// Every geometric root of Δ was located and examined.
    pub roots_complete: bool,
    pub max_radical_rank: usize,
    /// Squarefree Δ and radical rank ≤ 1 at every examined point.
    pub simple: bool,
}

/// Field-specific pencil searches.
pub trait PencilField: IsotropySearch {
    /// Degeneration orbits over proper extensions, and whether all roots of
    /// the affine discriminant were found. Only finite prime fields locate
    /// them.
    fn extension_points(_p: &Pencil<Self>, _affine: &Poly<Self::Elem>) -> (Vec<ExtensionPoint>, bool) {
        (Vec::new(), false)
    }
    /// Search for v ≠ 0 with q1(v) = q2(v) = 0.
    fn common_zero(p: &Pencil<Self>, budget: &SearchBudget) -> SearchOutcome<Self::Elem>;
    /// Search for a zero of s·q1 + q2 over k(s) with polynomial entries.
    fn section_search(_p: &Pencil<Self>, _budget: &SearchBudget) -> Option<SectionSearch> {
        None
    }
}

/// Outcome of the bounded search over k(s).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SectionSearch {
    pub witness: Option<Vec<String>>,
    pub witness_degree: Option<usize>,
    /// All polynomial vectors of degree ≤ D with normalized constant term
    /// were covered (the node cap was never hit).
    pub complete: bool,
    pub degree_bound: usize,
}

fn section_search_generic<K: Field>(p: &Pencil<K>, budget: &SearchBudget) -> Option<SectionSearch> {
    let ff = FunctionField::new(p.field().clone(), "s").ok()?;
    let s = ff.t();
    let lift = |q: &QuadraticForm<K>| q.coeffs().map(|c| ff.from_base(c.clone()));
    let q1 = QuadraticForm::from_upper(ff.clone(), lift(&p.q1)).ok()?;
    let q2 = QuadraticForm::from_upper(ff.clone(), lift(&p.q2)).ok()?;
    let q = q1.combine(&s, &q2, &ff.one()).ok()?;
    let res = search_polynomial_zero(&q, budget);
    let ring = ff.ring();
    Some(match res.witness {
        Some(w) => {
            let fw: Vec<_> = w.iter().map(|x| ff.from_poly(x.clone())).collect();
            debug_assert!(ff.is_zero(&q.evaluate(&fw).unwrap()));
            SectionSearch {
                witness_degree: w.iter().filter_map(|x| x.degree()).max(),
                witness: Some(w.iter().map(|x| ring.format(x)).collect()),
                complete: true,
                degree_bound: budget.degree,
            }
        }
        None => SectionSearch {
            witness: None,
            witness_degree: None,
            complete: !res.aborted,
            degree_bound: budget.degree,
        },
    })
}

fn finite_common_zero<K: Field>(p: &Pencil<K>, budget: &SearchBudget) -> SearchOutcome<K::Elem> {
    let k = p.field();
    let Some(points) = ProjectivePoints::new(k.elements().unwrap(), p.rank()) else {
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
        (k.is_zero(&p.q1.evaluate(&v).unwrap()) && k.is_zero(&p.q2.evaluate(&v).unwrap()))
            .then_some((i, v))
    });
    match found {
        Some((i, v)) => SearchOutcome::Found(crate::splitting::IsotropicWitness {
            regular: crate::splitting::is_regular_isotropic(&p.q1, &v).unwrap_or(false),
            vector: v,
            candidates: i as u64 + 1,
        }),
        None => SearchOutcome::Anisotropic {
            candidates: points.len(),
        },
    }
}

impl PencilField for PrimeField {
    fn extension_points(p: &Pencil<Self>, affine: &Poly<u32>) -> (Vec<ExtensionPoint>, bool) {
        prime_extension_points(p, affine)
    }
    fn common_zero(p: &Pencil<Self>, budget: &SearchBudget) -> SearchOutcome<u32> {
        finite_common_zero(p, budget)
    }
    fn section_search(p: &Pencil<Self>, budget: &SearchBudget) -> Option<SectionSearch> {
        section_search_generic(p, budget)
    }
}

impl PencilField for ExtensionField {
    fn common_zero(p: &Pencil<Self>, budget: &SearchBudget) -> SearchOutcome<Vec<u32>> {
        finite_common_zero(p, budget)
    }
    fn section_search(p: &Pencil<Self>, budget: &SearchBudget) -> Option<SectionSearch> {
        section_search_generic(p, budget)
    }
}

impl PencilField for Rationals {
    fn common_zero(p: &Pencil<Self>, budget: &SearchBudget) -> SearchOutcome<num_rational::BigRational> {
        rational_common_zero(p, budget)
    }
    fn section_search(p: &Pencil<Self>, budget: &SearchBudget) -> Option<SectionSearch> {
        section_search_generic(p, budget)
    }
}

impl<K: Field> PencilField for FunctionField<K> {
    fn common_zero(_p: &Pencil<Self>, _budget: &SearchBudget) -> SearchOutcome<Self::Elem> {
        SearchOutcome::Inconclusive {
            bound: "no common-zero search over function fields".into(),
            candidates: 0,
        }
    }
}

/// Height-bounded common zero over Q: integer x' in growing shells, the last
/// coordinate from q1, then a check against q2.
fn rational_common_zero(
    p: &Pencil<Rationals>,
    budget: &SearchBudget,
) -> SearchOutcome<num_rational::BigRational> {
    use num_rational::BigRational;
    let k = Rationals;
    let n = p.rank();
    if n == 0 {
        return SearchOutcome::Anisotropic { candidates: 0 };
    }
    let last = n - 1;
    let mut e = vec![k.zero(); n];
    e[last] = k.one();
    if k.is_zero(&p.q1.evaluate(&e).unwrap()) && k.is_zero(&p.q2.evaluate(&e).unwrap()) {
        return found(p, e, 1);
    }
    if n == 1 {
        return SearchOutcome::Anisotropic { candidates: 1 };
    }
    // all x_n with q1(x', x_n) = 0 (None: every x_n works)
    let last_coords = |x: &[BigRational]| -> Option<Vec<BigRational>> {
        let (q1, q2) = (&p.q1, &p.q2);
        let a = q1.coeff(last, last).clone();
        let b = (0..last).fold(k.zero(), |acc, i| acc + q1.coeff(i, last) * &x[i]);
        let mut c = k.zero();
        for i in 0..last {
            for j in i..last {
                c += q1.coeff(i, j) * &x[i] * &x[j];
            }
        }
        let roots = if !k.is_zero(&a) {
            let disc = &b * &b - BigRational::from_integer(4.into()) * &a * &c;
            let r = k.sqrt(&disc)?;
            let two_a = BigRational::from_integer(2.into()) * &a;
            vec![(-&b + &r) / &two_a, (-&b - r) / two_a]
        } else if !k.is_zero(&b) {
            vec![-c / b]
        } else if k.is_zero(&c) {
            // q1 vanishes along the whole line: solve q2 instead
            let a2 = q2.coeff(last, last).clone();
            let b2 = (0..last).fold(k.zero(), |acc, i| acc + q2.coeff(i, last) * &x[i]);
            let mut c2 = k.zero();
            for i in 0..last {
                for j in i..last {
                    c2 += q2.coeff(i, j) * &x[i] * &x[j];
                }
            }
            if !k.is_zero(&a2) {
                let disc = &b2 * &b2 - BigRational::from_integer(4.into()) * &a2 * &c2;
                let r = k.sqrt(&disc)?;
                let two_a = BigRational::from_integer(2.into()) * &a2;
                vec![(-&b2 + &r) / &two_a, (-&b2 - r) / two_a]
            } else if !k.is_zero(&b2) {
                vec![-c2 / b2]
            } else if k.is_zero(&c2) {
                vec![k.zero()]
            } else {
                return None;
            }
        } else {
            return None;
        };
        let mut roots = roots;
        roots.sort();
        roots.dedup();
        roots.reverse();
        Some(roots)
    };
    let dims = (n - 1) as u32;
    let mut consumed: u64 = 0;
    for h in 1..=budget.height {
        let side = 2 * h + 1;
        let Some(cube) = side.checked_pow(dims) else {
            return inconclusive(h - 1, consumed);
        };
        let shell = (cube - (side - 2).pow(dims)) / 2;
        if consumed + shell > budget.enumeration {
            return inconclusive(h - 1, consumed);
        }
        let hh = h as i64;
        let hit = par::find_map_first(cube as usize, |idx| {
            let mut rest = idx as u64;
            let mut x = vec![0i64; n - 1];
            for j in (0..n - 1).rev() {
                x[j] = (rest % side) as i64 - hh;
                rest /= side;
            }
            if x.iter().all(|c| c.abs() < hh) || x.iter().find(|c| **c != 0).is_some_and(|c| *c < 0) {
                return None;
            }
            let xs: Vec<BigRational> = x.iter().map(|&c| k.from_int(c)).collect();
            last_coords(&xs)?.into_iter().find_map(|xn| {
                let mut v = xs.clone();
                v.push(xn);
                (k.is_zero(&p.q1.evaluate(&v).unwrap()) && k.is_zero(&p.q2.evaluate(&v).unwrap()))
                    .then_some(v)
            })
        });
        consumed += shell;
        if let Some(v) = hit {
            return found(p, v, consumed);
        }
    }
    inconclusive(budget.height, consumed)
}

fn found<K: Field>(p: &Pencil<K>, v: Vec<K::Elem>, candidates: u64) -> SearchOutcome<K::Elem> {
    SearchOutcome::Found(crate::splitting::IsotropicWitness {
        regular: crate::splitting::is_regular_isotropic(&p.q1, &v).unwrap_or(false),
        vector: v,
        candidates,
    })
}

fn inconclusive<E>(h: u64, candidates: u64) -> SearchOutcome<E> {
    SearchOutcome::Inconclusive {
        bound: format!("height {h}"),
        candidates,
    }
}

/// Roots of the affine discriminant in F_{p^e}, e = 2..deg, one per orbit.
fn prime_extension_points(p: &Pencil<PrimeField>, affine: &Poly<u32>) -> (Vec<ExtensionPoint>, bool) {
    let k = p.field();
    let prime = k.modulus() as u64;
    let Some(deg) = affine.degree() else {
        return (Vec::new(), false);
    };
    let ring = PolyRing::new(*k, "x");
    let Ok(Some(parts)) = ring.squarefree_test(affine).map(|r| Some(r.radical)) else {
        return (Vec::new(), false);
    };
    let distinct = parts.degree().unwrap_or(0);
    let rational = k.roots(parts.coeffs()).map_or(0, |r| r.len());
    let mut located = rational;
    let mut out = Vec::new();
    let mut complete = true;
    for e in 2..=deg {
        let Ok(f) = ExtensionField::new(prime, e) else {
            complete = false;
            break;
        };
        let coeffs: Vec<Vec<u32>> = parts.coeffs().iter().map(|&c| f.embed(c)).collect();
        let roots = f.roots(&coeffs).unwrap();
        let mut seen: Vec<Vec<u32>> = Vec::new();
        for x in roots {
            if seen.contains(&x) {
                continue;
            }
            // the Frobenius orbit of x; degree e exactly
            let mut orbit = vec![x.clone()];
            let mut y = f.frobenius(&x);
            while y != x {
                orbit.push(y.clone());
                y = f.frobenius(&y);
            }
            if orbit.len() != e {
                continue;
            }
            seen.extend(orbit);
            let member = member_over(&f, p, &x);
            let modulus = PolyRing::new(*k, "a").format(&PolyRing::new(*k, "a").from_coeffs(f.modulus_poly()));
            out.push(ExtensionPoint {
                degree: e,
                root: f.format(&x),
                modulus,
                radical_rank: member.radical_dim(),
            });
            located += e;
        }
        if located >= distinct {
            break;
        }
    }
    (out, complete && located == distinct)
}

/// The member x·q1 + q2 with coefficients embedded in F_{p^e}.
fn member_over(f: &ExtensionField, p: &Pencil<PrimeField>, x: &[u32]) -> QuadraticForm<ExtensionField> {
    let lift = |q: &QuadraticForm<PrimeField>| {
        QuadraticForm::from_upper(f.clone(), q.coeffs().map(|&c| f.embed(c))).unwrap()
    };
    lift(&p.q1).combine(&x.to_vec(), &lift(&p.q2), &f.one()).unwrap()
}

pub fn analyze<K: PencilField>(p: &Pencil<K>) -> Result<PencilAnalysis<K::Elem>> {
    let k = p.field();
    let n = p.rank();
    let affine = p.affine_discriminant()?;
    let delta = BinaryForm::from_affine(k, n, &affine);
    let ring = PolyRing::new(k.clone(), "x");
    let squarefree = matches!(delta.squarefree_test(&ring), Ok(r) if r.is_squarefree);
    let mut points = Vec::new();
    let inf = delta.multiplicity_at_infinity(k);
    if !delta.is_zero(k) {
        if inf > 0 {
            points.push(DegenerationPoint {
                s: k.one(),
                t: k.zero(),
                multiplicity: inf,
                radical_rank: p.q1.radical_dim(),
            });
        }
        let mut rational_roots = k.roots(affine.coeffs()).unwrap_or_default();
        rational_roots.dedup();
        for x in rational_roots {
            let lin = ring.linear(&x);
            let mut rest = affine.clone();
            let mut mult = 0;
            while ring.divides(&lin, &rest) && !rest.is_zero() {
                rest = ring.exact_div(&rest, &lin);
                mult += 1;
            }
            points.push(DegenerationPoint {
                radical_rank: p.member(&x, &k.one()).radical_dim(),
                s: x,
                t: k.one(),
                multiplicity: mult,
            });
        }
    }
    let (extension_points, mut roots_complete) = if delta.is_zero(k) {
        (Vec::new(), false)
    } else {
        K::extension_points(p, &affine)
    };
    let found: usize = points.iter().map(|d| d.multiplicity).sum();
    if !delta.is_zero(k) && found == delta.degree {
        roots_complete = true;
    }
    let max_radical_rank = points
        .iter()
        .map(|d| d.radical_rank)
        .chain(extension_points.iter().map(|e| e.radical_rank))
        .max()
        .unwrap_or(0);
    let simple = squarefree && max_radical_rank <= 1;
    Ok(PencilAnalysis {
        rank: n,
        delta,
        half_discriminant: n % 2 == 1,
        squarefree,
        points,
        extension_points,
        roots_complete,
        max_radical_rank,
        simple,
    })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CoverModel {
    pub genus: usize,
    /// y^2 = Δ(x, 1).
    pub model: String,
    pub branch_points: usize,
    pub branched_at_infinity: bool,
}

/// The double cover y² = Δ(x, 1) for squarefree Δ.
pub fn cover_model<K: Field>(k: &K, a: &PencilAnalysis<K::Elem>) -> Result<CoverModel> {
    if k.characteristic() == 2 {
        return Err(Error::Unsupported("double covers in characteristic 2".into()));
    }
    if !a.squarefree {
        return Err(Error::NotSquarefree);
    }
    let ring = PolyRing::new(k.clone(), "x");
    let f = a.delta.affine(&ring);
    let m = f.degree().unwrap_or(0);
    let genus = m.div_ceil(2).saturating_sub(1);
    Ok(CoverModel {
        genus,
        model: format!("y^2 = {}", ring.format(&f)),
        branch_points: 2 * (genus + 1),
        branched_at_infinity: m % 2 == 1,
    })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CenterSample<E> {
    pub s: E,
    pub t: E,
    pub delta_value: E,
    pub center_delta: Option<E>,
    pub shape: &'static str,
    pub radical_rank: usize,
    pub agrees: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CenterCoverReport<E> {
    /// Square class c with δ ≡ c·Δ at regular samples.
    pub constant: Option<E>,
    pub samples: Vec<CenterSample<E>>,
    pub consistent: bool,
}

/// Points (x:1) for every x, then (1:0).
pub fn projective_line<K: Field>(k: &K) -> Option<Vec<(K::Elem, K::Elem)>> {
    let mut pts: Vec<_> = k.elements()?.into_iter().map(|x| (x, k.one())).collect();
    pts.push((k.one(), k.zero()));
    Some(pts)
}

/// Compare the center of C0 of each sampled member with Δ at that point.
pub fn center_matches_cover<K: Field>(
    p: &Pencil<K>,
    samples: &[(K::Elem, K::Elem)],
) -> Result<CenterCoverReport<K::Elem>> {
    let k = p.field();
    if p.rank() % 2 == 1 || k.characteristic() == 2 {
        return Err(Error::Unsupported(
            "center comparison needs even rank and characteristic ≠ 2".into(),
        ));
    }
    let delta = p.discriminant_form()?;
    let computed = par::map(samples, |(s, t)| -> Result<_> {
        let m = p.member(s, t);
        let c = center(&even_clifford(&m)?.algebra);
        Ok((m.radical_dim(), c))
    });
    let mut constant: Option<K::Elem> = None;
    let mut out = Vec::new();
    let mut consistent = true;
    for ((s, t), res) in samples.iter().zip(computed) {
        let (radical_rank, c) = res?;
        let value = delta.eval(k, s, t);
        let agrees = if k.is_zero(&value) {
            radical_rank != 1 || matches!(c.shape, CenterShape::DualNumbers { .. })
        } else {
            match &c.delta {
                Some(d) if !k.is_zero(d) => {
                    let class = k.square_class(&k.div(d, &value).unwrap());
                    match &constant {
                        None => {
                            constant = Some(class);
                            true
                        }
                        Some(c0) => *c0 == class,
                    }
                }
                _ => false,
            }
        };
        consistent &= agrees;
        out.push(CenterSample {
            s: s.clone(),
            t: t.clone(),
            delta_value: value,
            center_delta: c.delta.clone(),
            shape: c.shape.name(),
            radical_rank,
            agrees,
        });
    }
    Ok(CenterCoverReport {
        constant,
        samples: out,
        consistent,
    })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AmerBrumerReport<E> {
    pub common_zero: Option<Vec<E>>,
    pub points_checked: u64,
    pub section: SectionSearch,
    /// A common zero exists and the k(s) search found a witness.
    pub a_implies_b: bool,
    /// A k(s) witness was found and a common zero exists.
    pub b_implies_a: bool,
    pub violation: Option<String>,
}

impl<E> AmerBrumerReport<E> {
    pub fn ok(&self) -> bool {
        self.violation.is_none()
    }
}

/// Side A: exhaustive common zero over F_p. Side B: a zero of s·q1 + q2 over
/// F_p(s) of degree ≤ D. Each side found must imply the other.
pub fn amer_brumer_check(p: &Pencil<PrimeField>, degree: usize) -> Result<AmerBrumerReport<u32>> {
    if p.rank() > 5 || p.field().modulus() > 5 {
        return Err(Error::Unsupported(
            "Amer–Brumer check is limited to rank ≤ 5 over F_p with p ≤ 5".into(),
        ));
    }
    let budget = SearchBudget {
        degree,
        ..SearchBudget::default()
    };
    let (common_zero, points_checked) = match PrimeField::common_zero(p, &budget) {
        SearchOutcome::Found(w) => (Some(w.vector), w.candidates),
        SearchOutcome::Anisotropic { candidates } => (None, candidates),
        SearchOutcome::Inconclusive { bound, .. } => return Err(Error::BudgetExceeded(bound)),
    };
    let section = section_search_generic(p, &budget).expect("F_p(s) is a valid field");
    let (a, b) = (common_zero.is_some(), section.witness.is_some());
    let violation = match (a, b) {
        (true, false) => Some(format!(
            "common zero {:?} but no k(s) zero of degree ≤ {}",
            common_zero.as_ref().unwrap(),
            degree
        )),
        (false, true) => Some(format!(
            "k(s) zero {:?} but no common zero over F_{}",
            section.witness.as_ref().unwrap(),
            p.field().modulus()
        )),
        _ => None,
    };
    Ok(AmerBrumerReport {
        common_zero,
        points_checked,
        a_implies_b: a && b,
        b_implies_a: a && b,
        section,
        violation,
    })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SectionWitness<E> {
    CommonZero(Vec<E>),
    /// Polynomial entries of a zero of s·q1 + q2 over k(s).
    Section(Vec<String>),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum BrauerVerdict<E> {
    Trivial(SectionWitness<E>),
    /// No common zero (exhaustive over a finite field), hence no k(s)
    /// section by Amer–Brumer; the bounded k(s) search agrees.
    Nontrivial { points_checked: u64, degree_bound: usize },
    Unknown { bound: String },
}

impl<E> BrauerVerdict<E> {
    pub fn name(&self) -> &'static str {
        match self {
            BrauerVerdict::Trivial(_) => "trivial",
            BrauerVerdict::Nontrivial { .. } => "nontrivial",
            BrauerVerdict::Unknown { .. } => "unknown",
        }
    }
}

/// Rank-4 pencils with simple degeneration: trivial iff the quadric
/// fibration has a rational section, found as a common zero or a k(s) zero.
pub fn brauer_triviality_rank4<K: PencilField>(
    p: &Pencil<K>,
    budget: &SearchBudget,
) -> Result<BrauerVerdict<K::Elem>> {
    if p.rank() != 4 {
        return Err(Error::WrongRank {
            expected: 4,
            got: p.rank(),
        });
    }
    if !analyze(p)?.simple {
        return Err(Error::NotSquarefree);
    }
    let k = p.field();
    let common = K::common_zero(p, budget);
    if let SearchOutcome::Found(w) = &common {
        let v = &w.vector;
        if !k.is_zero(&p.q1.evaluate(v)?) || !k.is_zero(&p.q2.evaluate(v)?) {
            return Err(Error::Falsified("common zero does not vanish".into()));
        }
        return Ok(BrauerVerdict::Trivial(SectionWitness::CommonZero(v.clone())));
    }
    let section = K::section_search(p, budget);
    if let Some(SectionSearch {
        witness: Some(w), ..
    }) = &section
    {
        return Ok(BrauerVerdict::Trivial(SectionWitness::Section(w.clone())));
    }
    Ok(match (common, section) {
        (SearchOutcome::Anisotropic { candidates }, Some(s)) if s.complete => BrauerVerdict::Nontrivial {
            points_checked: candidates,
            degree_bound: s.degree_bound,
        },
        (SearchOutcome::Inconclusive { bound, .. }, Some(s)) => BrauerVerdict::Unknown {
            bound: format!("{bound}; k(s) degree {}", s.degree_bound),
        },
        (SearchOutcome::Inconclusive { bound, .. }, None) => BrauerVerdict::Unknown { bound },
        _ => BrauerVerdict::Unknown {
            bound: format!("k(s) degree {} (node budget exhausted)", budget.degree),
        },
    })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PlaneReport<E> {
    /// Rows of the plane in reduced row echelon form.
    pub plane: Option<[Vec<E>; 2]>,
    pub candidates: u64,
    pub total: u64,
    pub beta_trivial: bool,
}

/// 2×n reduced row echelon matrices over a finite field, ordered by pivot
/// pair and then by free entries.
pub struct PlaneEnumeration<E> {
    elems: Vec<E>,
    n: usize,
    /// (i, j, first index, free entries)
    blocks: Vec<(usize, usize, u64, u32)>,
    total: u64,
}

impl<E: Clone> PlaneEnumeration<E> {
    pub fn new(elems: Vec<E>, n: usize) -> Self {
        let q = elems.len() as u64;
        let mut blocks = Vec::new();
        let mut total = 0u64;
        for i in 0..n {
            for j in i + 1..n {
                // row 1: positions > i except j; row 2: positions > j
                let free = ((n - 1 - i - 1) + (n - 1 - j)) as u32;
                blocks.push((i, j, total, free));
                total += q.pow(free);
            }
        }
        PlaneEnumeration {
            elems,
            n,
            blocks,
            total,
        }
    }

    pub fn len(&self) -> u64 {
        self.total
    }
    pub fn is_empty(&self) -> bool {
        self.total == 0
    }

    pub fn get(&self, idx: u64) -> [Vec<E>; 2] {
        let q = self.elems.len() as u64;
        let b = self.blocks.partition_point(|&(_, _, start, _)| start <= idx) - 1;
        let (i, j, start, _) = self.blocks[b];
        let mut rest = idx - start;
        let zero = self.elems[0].clone();
        let one = self.elems[1].clone();
        let mut r1 = vec![zero.clone(); self.n];
        let mut r2 = vec![zero; self.n];
        r1[i] = one.clone();
        r2[j] = one;
        let mut slots: Vec<(usize, usize)> = (i + 1..self.n).filter(|&c| c != j).map(|c| (0, c)).collect();
        slots.extend((j + 1..self.n).map(|c| (1, c)));
        for &(row, col) in slots.iter().rev() {
            let v = self.elems[(rest % q) as usize].clone();
            rest /= q;
            if row == 0 {
                r1[col] = v;
            } else {
                r2[col] = v;
            }
        }
        [r1, r2]
    }
}

/// Exhaustive search for a plane totally isotropic for both forms of a
/// rank-6 pencil over a finite field. A plane gives a line on the quadric
/// fibration over the base, hence β trivial.
pub fn common_isotropic_plane_rank6<K: Field>(
    p: &Pencil<K>,
    budget: &SearchBudget,
) -> Result<PlaneReport<K::Elem>> {
    if p.rank() != 6 {
        return Err(Error::WrongRank {
            expected: 6,
            got: p.rank(),
        });
    }
    let k = p.field();
    let elems = k
        .elements()
        .ok_or_else(|| Error::Unsupported("plane enumeration needs a finite field".into()))?;
    let planes = PlaneEnumeration::new(elems, 6);
    if planes.len() > budget.enumeration {
        return Err(Error::BudgetExceeded(format!("{} planes", planes.len())));
    }
    let isotropic = |q: &QuadraticForm<K>, [a, b]: &[Vec<K::Elem>; 2]| {
        k.is_zero(&q.evaluate(a).unwrap())
            && k.is_zero(&q.evaluate(b).unwrap())
            && k.is_zero(&q.polar(a, b).unwrap())
    };
    let hit = par::find_map_first(planes.len() as usize, |i| {
        let pl = planes.get(i as u64);
        (isotropic(&p.q1, &pl) && isotropic(&p.q2, &pl)).then_some((i, pl))
    });
    Ok(match hit {
        Some((i, pl)) => PlaneReport {
            plane: Some(pl),
            candidates: i as u64 + 1,
            total: planes.len(),
            beta_trivial: true,
        },
        None => PlaneReport {
            plane: None,
            candidates: planes.len(),
            total: planes.len(),
            beta_trivial: false,
        },
    })
}

/// Pointwise reduction through a common isotropic vector v: at each sample
/// where v is regular, reduced_form(member, v) keeps the radical rank and
/// its discriminant times −1 has the member's square class.
pub fn reduction_preserves_degenerations<K: Field>(
    p: &Pencil<K>,
    v: &[K::Elem],
    samples: &[(K::Elem, K::Elem)],
) -> Result<bool> {
    let k = p.field();
    for (s, t) in samples {
        let m = p.member(s, t);
        if !crate::splitting::is_regular_isotropic(&m, v)? {
            continue;
        }
        let r = m.reduced_form(v)?;
        if r.radical_dim() != m.radical_dim() {
            return Ok(false);
        }
        if k.characteristic() != 2 && m.rank().is_multiple_of(2) {
            let (d, dr) = (m.discriminant()?, r.discriminant()?);
            if d.square_class != k.square_class(&k.neg(&dr.value)) {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// Polar matrix of a member, for callers that need it directly.
pub fn member_polar<K: Field>(p: &Pencil<K>, s: &K::Elem, t: &K::Elem) -> Matrix<K::Elem> {
    p.member(s, t).polar_matrix()
}

pub fn find_member_isotropic<K: IsotropySearch>(
    p: &Pencil<K>,
    s: &K::Elem,
    t: &K::Elem,
    budget: &SearchBudget,
) -> SearchOutcome<K::Elem> {
    find_isotropic(&p.member(s, t), budget)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rings::ints;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn diag<K: Field>(k: &K, d: &[i64]) -> QuadraticForm<K> {
        QuadraticForm::diagonal(k.clone(), &ints(k, d))
    }

    #[test]
    fn discriminant_of_diagonal_pencil() {
        let q = Rationals;
        let p = Pencil::new(diag(&q, &[1, 1, 1, 1]), diag(&q, &[1, 2, 3, 4])).unwrap();
        let a = analyze(&p).unwrap();
        // 16 (s+t)(s+2t)(s+3t)(s+4t)
        assert_eq!(a.delta.coeffs, ints(&q, &[16, 160, 560, 800, 384]));
        assert!(a.squarefree && a.simple);
        assert_eq!(a.points.len(), 4);
        assert!(a.points.iter().all(|d| d.radical_rank == 1 && d.multiplicity == 1));
        assert_eq!(cover_model(&q, &a).unwrap().genus, 1);
    }

    #[test]
    fn proportional_members_are_not_squarefree() {
        let f5 = PrimeField::new(5).unwrap();
        let q1 = diag(&f5, &[1, 2, 3, 4]);
        let a = analyze(&Pencil::new(q1.clone(), q1.clone()).unwrap()).unwrap();
        assert!(!a.squarefree && !a.simple);
        assert_eq!(a.max_radical_rank, 4);
        assert!(matches!(cover_model(&f5, &a), Err(Error::NotSquarefree)));
    }

    #[test]
    fn extension_roots_complete_the_picture() {
        let f3 = PrimeField::new(3).unwrap();
        // Δ(x,1) ∝ (x^2 + 1)(x + 2)...: roots outside F_3 must be found
        let p = Pencil::new(diag(&f3, &[1, 1, 0, 0]), diag(&f3, &[1, 2, 1, 1])).unwrap();
        let a = analyze(&p).unwrap();
        assert!(a.roots_complete);
        let count: usize = a.points.iter().filter(|d| d.t == 1).count()
            + a.extension_points.iter().map(|e| e.degree).sum::<usize>();
        let ring = PolyRing::new(f3, "x");
        let f = a.delta.affine(&ring);
        let rad = ring.squarefree_test(&f).map(|r| r.radical.degree().unwrap());
        assert_eq!(Ok(count), rad);
    }

    #[test]
    fn random_sextic_pencil_over_f5() {
        let f5 = PrimeField::new(5).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let mut simple_seen = false;
        for _ in 0..20 {
            let p = Pencil::new(
                QuadraticForm::random(f5, 6, 0.7, &mut rng),
                QuadraticForm::random(f5, 6, 0.7, &mut rng),
            )
            .unwrap();
            let a = analyze(&p).unwrap();
            assert!(a.roots_complete || !a.squarefree);
            if a.squarefree {
                assert!(a.simple);
                assert_eq!(cover_model(&f5, &a).unwrap().genus, 2);
                simple_seen = true;
            }
        }
        assert!(simple_seen);
    }

    #[test]
    fn member_discriminants_match_delta() {
        let f5 = PrimeField::new(5).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for n in [3, 4, 5] {
            let p = Pencil::new(
                QuadraticForm::random(f5, n, 0.8, &mut rng),
                QuadraticForm::random(f5, n, 0.8, &mut rng),
            )
            .unwrap();
            let delta = p.discriminant_form().unwrap();
            for (s, t) in projective_line(&f5).unwrap() {
                let d = p.member(&s, &t).discriminant().unwrap();
                assert_eq!(d.value, delta.eval(&f5, &s, &t));
            }
        }
    }

    #[test]
    fn center_tracks_the_discriminant() {
        let f5 = PrimeField::new(5).unwrap();
        let p = Pencil::new(diag(&f5, &[1, 1, 1, 1]), diag(&f5, &[1, 2, 3, 4])).unwrap();
        let r = center_matches_cover(&p, &projective_line(&f5).unwrap()).unwrap();
        assert!(r.consistent, "{r:?}");
        assert!(r.samples.iter().any(|s| s.shape == "dual-numbers"));
        let q = Rationals;
        let h = Pencil::new(QuadraticForm::hyperbolic(q, 1), diag(&q, &[1, 1])).unwrap();
        let r = center_matches_cover(&h, &[(q.one(), q.zero()), (q.one(), q.one())]).unwrap();
        assert!(r.consistent);
    }

    #[test]
    fn amer_brumer_examples() {
        let f3 = PrimeField::new(3).unwrap();
        let p = Pencil::new(diag(&f3, &[1, -1, 1]), diag(&f3, &[1, 1, -1])).unwrap();
        let r = amer_brumer_check(&p, 3).unwrap();
        assert!(r.ok() && r.common_zero.is_some() && r.section.witness.is_some());
        let p = Pencil::new(diag(&f3, &[1, 1]), diag(&f3, &[1, 2])).unwrap();
        let r = amer_brumer_check(&p, 3).unwrap();
        assert!(r.ok() && r.common_zero.is_none() && r.section.witness.is_none());
        assert!(r.section.complete);
    }

    #[test]
    fn brauer_verdicts() {
        let q = Rationals;
        // common zero (1, 1, 1, 1) planted
        let p = Pencil::new(diag(&q, &[1, -1, 2, -2]), diag(&q, &[3, -1, -5, 3])).unwrap();
        match brauer_triviality_rank4(&p, &SearchBudget::default()).unwrap() {
            BrauerVerdict::Trivial(SectionWitness::CommonZero(v)) => {
                assert!(q.is_zero(&p.q1.evaluate(&v).unwrap()));
                assert!(q.is_zero(&p.q2.evaluate(&v).unwrap()));
            }
            other => panic!("{other:?}"),
        }
        let f3 = PrimeField::new(3).unwrap();
        let p = Pencil::new(diag(&f3, &[1, 1, 1, 1]), diag(&f3, &[0, 1, 2, 1])).unwrap();
        if analyze(&p).unwrap().simple {
            assert_eq!(brauer_triviality_rank4(&p, &SearchBudget::default()).unwrap().name(), "trivial");
        }
        assert!(matches!(
            brauer_triviality_rank4(&Pencil::new(diag(&q, &[1]), diag(&q, &[2])).unwrap(), &SearchBudget::default()),
            Err(Error::WrongRank { .. })
        ));
    }

    #[test]
    fn plane_enumeration_counts() {
        let f3 = PrimeField::new(3).unwrap();
        let e = PlaneEnumeration::new(f3.elements().unwrap(), 6);
        // Gaussian binomial [6 choose 2]_3
        assert_eq!(e.len(), 11011);
        let e2 = PlaneEnumeration::new(vec![0u32, 1], 4);
        assert_eq!(e2.len(), 35);
        let all: std::collections::HashSet<_> = (0..e2.len()).map(|i| e2.get(i)).collect();
        assert_eq!(all.len(), 35);
    }

    #[test]
    fn common_planes() {
        let f3 = PrimeField::new(3).unwrap();
        let h = QuadraticForm::hyperbolic(f3, 3);
        let r = common_isotropic_plane_rank6(&Pencil::new(h.clone(), h.clone()).unwrap(), &SearchBudget::default()).unwrap();
        assert!(r.beta_trivial);
        let [a, b] = r.plane.unwrap();
        assert_eq!((a[0], a[1], b[0], b[1]), (1, 0, 0, 1));
        assert_eq!(h.evaluate(&a).unwrap(), 0);
        assert_eq!(h.polar(&a, &b).unwrap(), 0);
        // no common plane exists
        let p = Pencil::new(diag(&f3, &[1, 1, 1, 1, 1, 1]), diag(&f3, &[0, 1, 1, 1, 2, 2])).unwrap();
        let r = common_isotropic_plane_rank6(&p, &SearchBudget::default()).unwrap();
        assert!(!r.beta_trivial && r.candidates == 11011);
    }
}
