//! The acceptance checks, runnable from the binary. Every instance comes from
//! a fixed seed, so the machine report is reproducible byte for byte.

use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::report::{Section, Status};
use super::Outcome;
use crate::clifford::{center, even_clifford, hyperbolic_split_structure, verify_orthogonal_sum};
use crate::error::{Error, Result};
use crate::lagrangian::{enumerate_isotropic, stein_vs_center};
use crate::morita::morita_witness;
use crate::pencil::{
    amer_brumer_check, analyze, brauer_triviality_rank4, common_isotropic_plane_rank6, cover_model,
    BrauerVerdict, Pencil, SectionWitness,
};
use crate::quadform::QuadraticForm;
use crate::rings::{ints, Field, FunctionField, Matrix, PrimeField, Rationals};
use crate::splitting::{is_regular_isotropic, search_polynomial_zero, split_hyperbolic, SearchBudget};

pub const FAULTS: [&str; 2] = ["structure-constant", "split-witness"];

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Check {
    pub pass: bool,
    pub detail: String,
}

impl Check {
    fn new(pass: bool, detail: impl Into<String>) -> Self {
        Check {
            pass,
            detail: detail.into(),
        }
    }
    fn fail(detail: impl Into<String>) -> Self {
        Check::new(false, detail)
    }
}

pub struct Criterion {
    pub id: &'static str,
    pub title: &'static str,
    pub bound: Duration,
    pub run: fn(Option<&str>) -> Check,
}

pub fn criteria() -> Vec<Criterion> {
    let s = Duration::from_secs;
    vec![
        Criterion { id: "C1", title: "even Clifford dimension law", bound: s(10), run: c1_dimension_law },
        Criterion { id: "C2", title: "orthogonal sum formula", bound: s(30), run: c2_orthogonal_sum },
        Criterion { id: "C3", title: "hyperbolic even Clifford algebras", bound: s(5), run: c3_hyperbolic },
        Criterion { id: "C4", title: "reduction invariance", bound: s(60), run: c4_reduction },
        Criterion { id: "C5", title: "Morita witness corpus", bound: s(60), run: c5_morita },
        Criterion { id: "C6", title: "Amer-Brumer consistency", bound: s(300), run: c6_amer_brumer },
        Criterion { id: "C7", title: "rank-5 function-field zeros at degree 3", bound: s(120), run: c7_rank5_zeros },
        Criterion { id: "C8", title: "discriminant cover genus", bound: s(10), run: c8_genus },
        Criterion { id: "C9", title: "rulings versus center", bound: s(120), run: c9_rulings },
        Criterion { id: "C10", title: "rank-4 triviality over Q", bound: s(5), run: c10_rank4_trivial },
        Criterion { id: "C11", title: "rank-6 common plane", bound: s(120), run: c11_rank6_plane },
    ]
}

fn attempt(r: Result<Check>) -> Check {
    r.unwrap_or_else(|e| Check::fail(format!("error: {e}")))
}

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// q∘P for a random invertible P with small entries; returns the new form
/// and P.
fn disguise<K: Field, R: Rng>(q: &QuadraticForm<K>, rng: &mut R) -> (QuadraticForm<K>, Matrix<K::Elem>) {
    let k = q.field();
    let n = q.rank();
    loop {
        let entries: Vec<K::Elem> = (0..n * n).map(|_| k.from_int(rng.gen_range(-1..=1))).collect();
        let p = Matrix::new(n, n, entries).unwrap();
        if !k.is_zero(&p.det(k).unwrap()) {
            let cols: Vec<Vec<K::Elem>> = (0..n).map(|j| p.col(j)).collect();
            return (q.pullback(&cols).unwrap(), p);
        }
    }
}

fn c1_form<K: Field, R: Rng>(k: &K, n: usize, degenerate: bool, rng: &mut R) -> QuadraticForm<K> {
    if degenerate && n >= 2 {
        QuadraticForm::random(k.clone(), n - 1, 0.6, rng)
            .direct_sum(&QuadraticForm::zero(k.clone(), 1))
            .unwrap()
    } else {
        QuadraticForm::random(k.clone(), n, 0.6, rng)
    }
}

fn c1_one<K: Field>(q: &QuadraticForm<K>, inject: bool) -> Result<Option<String>> {
    let n = q.rank();
    let a = even_clifford(q)?;
    if a.dim() != 1 << (n - 1) {
        return Ok(Some(format!("dim C0 = {} for rank {n}", a.dim())));
    }
    if inject {
        let bad = a.algebra.with_perturbed_constant(1, 1);
        if let Err(e) = bad.check_unit().and_then(|_| bad.check_associativity()) {
            return Ok(Some(e.to_string()));
        }
    }
    Ok(None)
}

fn c1_dimension_law(fault: Option<&str>) -> Check {
    attempt((|| {
        let mut r = rng(1);
        let (q, f2, f3, f5) = (Rationals, PrimeField::new(2)?, PrimeField::new(3)?, PrimeField::new(5)?);
        let mut degenerate = 0;
        let mut injected = fault != Some("structure-constant");
        for i in 0..200 {
            let n = 1 + (i / 4) % 7;
            let deg = i % 5 == 0;
            let inject = !injected && n >= 3;
            injected |= inject;
            let (failure, radical) = match i % 4 {
                0 => {
                    let f = c1_form(&q, n, deg, &mut r);
                    (c1_one(&f, inject)?, f.radical_dim())
                }
                1 => {
                    let f = c1_form(&f2, n, deg, &mut r);
                    (c1_one(&f, inject)?, f.radical_dim())
                }
                2 => {
                    let f = c1_form(&f3, n, deg, &mut r);
                    (c1_one(&f, inject)?, f.radical_dim())
                }
                _ => {
                    let f = c1_form(&f5, n, deg, &mut r);
                    (c1_one(&f, inject)?, f.radical_dim())
                }
            };
            if let Some(msg) = failure {
                return Ok(Check::fail(format!("form {i}: {msg}")));
            }
            if radical > 0 {
                degenerate += 1;
            }
        }
        Ok(Check::new(true, format!("200 forms, {degenerate} degenerate")))
    })())
}

fn c2_orthogonal_sum(_: Option<&str>) -> Check {
    attempt((|| {
        let mut r = rng(2);
        let (f3, f5) = (PrimeField::new(3)?, PrimeField::new(5)?);
        let mut pairs = 0;
        for i in 0..50 {
            let a = r.gen_range(1..=3);
            let b = r.gen_range(1..=6 - a);
            let k = if i % 2 == 0 { f3 } else { f5 };
            let q1 = QuadraticForm::random(k, a, 0.7, &mut r);
            let q2 = QuadraticForm::random(k, b, 0.7, &mut r);
            let rep = verify_orthogonal_sum(&q1, &q2)?;
            if !rep.ok() {
                return Ok(Check::fail(format!(
                    "pair {i}: bijective {} multiplicative {} ({:?})",
                    rep.bijective, rep.multiplicative, rep.failure
                )));
            }
            pairs += rep.pairs_checked;
        }
        Ok(Check::new(true, format!("50 pairs, {pairs} basis products")))
    })())
}

fn c3_hyperbolic(_: Option<&str>) -> Check {
    attempt((|| {
        let mut dims = Vec::new();
        for (m, d) in [(1, 1), (2, 4), (3, 16)] {
            let r = hyperbolic_split_structure(m)?;
            if !r.ok() || r.fiber_dims != vec![d, d] {
                return Ok(Check::fail(format!("m = {m}: {r:?}")));
            }
            dims.push(d.to_string());
        }
        Ok(Check::new(true, format!("split centers, fiber dims {}", dims.join(", "))))
    })())
}

fn c4_one<K: Field, R: Rng>(k: &K, n: usize, rng: &mut R, tamper: bool) -> Result<Option<String>> {
    // q′ must be primitive, i.e. not identically zero
    let rest = loop {
        let r = QuadraticForm::random(k.clone(), n - 2, 0.6, rng);
        if r.coeffs().entries().iter().any(|c| !k.is_zero(c)) {
            break r;
        }
    };
    let base = QuadraticForm::hyperbolic(k.clone(), 1).direct_sum(&rest)?;
    let (q, p) = disguise(&base, rng);
    // v = P⁻¹ e0 is sent to the isotropic e0
    let mut e0 = vec![k.zero(); n];
    e0[0] = k.one();
    let v = p.solve(k, &e0)?.ok_or(Error::DependentBasis)?;
    if !is_regular_isotropic(&q, &v)? {
        return Ok(Some("planted vector is not regular isotropic".into()));
    }
    let mut w = split_hyperbolic(&q, &v)?;
    if tamper {
        let c = k.add(w.p.get(0, 0), &k.one());
        w.p.set(0, 0, c);
        if let Err(e) = w.verify() {
            return Ok(Some(format!("splitting witness: {e}")));
        }
    }
    let qp = &w.reduced;
    if q.radical_dim() != qp.radical_dim() {
        return Ok(Some("radical dimension changed".into()));
    }
    let (d, dp) = (q.discriminant()?, qp.discriminant()?);
    if d.square_class != k.square_class(&k.neg(&dp.value)) {
        return Ok(Some("discriminant class changed".into()));
    }
    if n.is_multiple_of(2) {
        let c = center(&even_clifford(&q)?.algebra);
        let cp = center(&even_clifford(qp)?.algebra);
        if c.dim != cp.dim || c.delta_class != cp.delta_class || c.shape.name() != cp.shape.name() {
            return Ok(Some(format!(
                "centers differ: {} {:?} vs {} {:?}",
                c.shape.name(),
                c.delta_class,
                cp.shape.name(),
                cp.delta_class
            )));
        }
    }
    Ok(None)
}

fn c4_reduction(fault: Option<&str>) -> Check {
    attempt((|| {
        let mut r = rng(4);
        let (f3, f5) = (PrimeField::new(3)?, PrimeField::new(5)?);
        let tamper = fault == Some("split-witness");
        for i in 0..100 {
            let n = 3 + i % 4;
            let t = tamper && i == 0;
            let failure = match i % 3 {
                0 => c4_one(&f3, n, &mut r, t)?,
                1 => c4_one(&f5, n, &mut r, t)?,
                _ => c4_one(&Rationals, n, &mut r, t)?,
            };
            if let Some(msg) = failure {
                return Ok(Check::fail(format!("form {i} (rank {n}): {msg}")));
            }
        }
        Ok(Check::new(true, "100 forms, radical, discriminant class and center preserved"))
    })())
}

/// Forms q′ of rank ≤ 4 for the Morita check, with simple degenerations.
pub fn morita_corpus() -> (Vec<QuadraticForm<Rationals>>, Vec<QuadraticForm<PrimeField>>) {
    let q = Rationals;
    let f3 = PrimeField::new(3).unwrap();
    let f5 = PrimeField::new(5).unwrap();
    let mut rat: Vec<_> = [&[1i64][..], &[1, 1], &[1, -1], &[1, 2, 3], &[1, 1, 0], &[1, -1, 2, 3]]
        .iter()
        .map(|d| QuadraticForm::diagonal(q, &ints(&q, d)))
        .collect();
    rat.push(QuadraticForm::hyperbolic(q, 1));
    let mut fin: Vec<_> = [&[1i64][..], &[1, 2], &[1, 1, 1], &[1, 1, 0], &[1, 2, 0, 1], &[0, 1], &[1, 1, 1, 1]]
        .iter()
        .map(|d| QuadraticForm::diagonal(f3, &ints(&f3, d)))
        .collect();
    fin.extend(
        [&[2i64][..], &[1, 2, 3], &[1, 1, 1, 0], &[1, 0, 1], &[1, 2, 3, 4], &[1, 0]]
            .iter()
            .map(|d| QuadraticForm::diagonal(f5, &ints(&f5, d))),
    );
    (rat, fin)
}

fn c5_morita(_: Option<&str>) -> Check {
    attempt((|| {
        let (rat, fin) = morita_corpus();
        let mut count = 0;
        for q in &rat {
            let m = morita_witness(q)?;
            if !m.ok() {
                return Ok(Check::fail(format!("{}: {:?}", q.to_literal(), m.first_failure)));
            }
            count += 1;
        }
        for q in &fin {
            let m = morita_witness(q)?;
            if !m.ok() {
                return Ok(Check::fail(format!("{}: {:?}", q.to_literal(), m.first_failure)));
            }
            count += 1;
        }
        Ok(Check::new(true, format!("{count} forms")))
    })())
}

/// Multisets of size n drawn from 0..m, as sorted index vectors.
fn multisets(m: usize, n: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(n);
    fn go(m: usize, n: usize, from: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == n {
            out.push(cur.clone());
            return;
        }
        for i in from..m {
            cur.push(i);
            go(m, n, i, cur, out);
            cur.pop();
        }
    }
    go(m, n, 0, &mut cur, &mut out);
    out
}

fn c6_amer_brumer(_: Option<&str>) -> Check {
    attempt((|| {
        let mut classes = 0;
        let mut pairs = 0u64;
        let mut with_zero = 0;
        for p in [2u64, 3] {
            let k = PrimeField::new(p)?;
            let m = (p * p) as usize;
            for n in [3usize, 4] {
                // a diagonal pair is a multiset of coefficient pairs (a_i, b_i):
                // permuting coordinates changes neither side
                for ms in multisets(m, n) {
                    let a: Vec<u32> = ms.iter().map(|&i| (i / p as usize) as u32).collect();
                    let b: Vec<u32> = ms.iter().map(|&i| (i % p as usize) as u32).collect();
                    let pencil = Pencil::new(QuadraticForm::diagonal(k, &a), QuadraticForm::diagonal(k, &b))?;
                    let r = amer_brumer_check(&pencil, 3)?;
                    if let Some(v) = r.violation {
                        return Ok(Check::fail(format!("F{p}, a = {a:?}, b = {b:?}: {v}")));
                    }
                    classes += 1;
                    if r.common_zero.is_some() {
                        with_zero += 1;
                    }
                }
                pairs += p.pow(2 * n as u32);
            }
        }
        Ok(Check::new(
            true,
            format!("{pairs} diagonal pairs in {classes} classes, {with_zero} with a common zero, no violations"),
        ))
    })())
}

fn c7_rank5_zeros(_: Option<&str>) -> Check {
    attempt((|| {
        let mut r = rng(7);
        let f3 = PrimeField::new(3)?;
        let ff = FunctionField::new(f3, "s")?;
        let budget = SearchBudget::default();
        let mut max_degree = 0;
        for i in 0..50 {
            let q1 = QuadraticForm::random(f3, 5, 0.7, &mut r);
            let q2 = QuadraticForm::random(f3, 5, 0.7, &mut r);
            let lift = |q: &QuadraticForm<PrimeField>| {
                QuadraticForm::from_upper(ff.clone(), q.coeffs().map(|c| ff.from_base(*c)))
            };
            let q = lift(&q1)?.combine(&ff.t(), &lift(&q2)?, &ff.one())?;
            let res = search_polynomial_zero(&q, &budget);
            let Some(w) = res.witness else {
                return Ok(Check::fail(format!("pencil {i}: no zero of degree ≤ 3")));
            };
            let v: Vec<_> = w.iter().map(|x| ff.from_poly(x.clone())).collect();
            let degree = w.iter().filter_map(|x| x.degree()).max();
            if degree.is_none() || !ff.is_zero(&q.evaluate(&v)?) {
                return Ok(Check::fail(format!("pencil {i}: witness does not vanish")));
            }
            max_degree = max_degree.max(degree.unwrap());
        }
        Ok(Check::new(true, format!("50 pencils, witness degree ≤ {max_degree}")))
    })())
}

fn c8_instances<K: Field + crate::pencil::PencilField, R: Rng>(k: &K, n: usize, rng: &mut R) -> Result<Option<String>> {
    let want = if n == 4 { 1 } else { 2 };
    let mut found = 0;
    let mut tries = 0;
    while found < 20 {
        tries += 1;
        if tries > 400 {
            return Ok(Some(format!("only {found} squarefree rank-{n} pencils in 400 tries")));
        }
        let p = Pencil::new(
            QuadraticForm::random(k.clone(), n, 0.7, rng),
            QuadraticForm::random(k.clone(), n, 0.7, rng),
        )?;
        let a = analyze(&p)?;
        if !a.squarefree {
            continue;
        }
        let c = cover_model(k, &a)?;
        if c.genus != want || 2 * (c.genus + 1) != c.branch_points {
            return Ok(Some(format!("rank {n}: genus {} ({})", c.genus, c.model)));
        }
        for (s, t) in [(1, 0), (0, 1), (2, 3)] {
            let (s, t) = (k.from_int(s), k.from_int(t));
            if p.member(&s, &t).discriminant()?.value != a.delta.eval(k, &s, &t) {
                return Ok(Some(format!("rank {n}: Δ differs from the member discriminant")));
            }
        }
        found += 1;
    }
    Ok(None)
}

fn c8_genus(_: Option<&str>) -> Check {
    attempt((|| {
        let mut r = rng(8);
        let f5 = PrimeField::new(5)?;
        for n in [4, 6] {
            let fail = c8_instances(&Rationals, n, &mut r)?.or(c8_instances(&f5, n, &mut r)?);
            if let Some(msg) = fail {
                return Ok(Check::fail(msg));
            }
        }
        Ok(Check::new(true, "80 squarefree pencils: genus 1 for rank 4, genus 2 for rank 6"))
    })())
}

fn c9_rulings(_: Option<&str>) -> Check {
    attempt((|| {
        let mut forms = 0;
        let mut split = 0;
        for p in [3u64, 5] {
            let k = PrimeField::new(p)?;
            let units: Vec<u32> = (1..p as u32).collect();
            for idx in 0..units.len().pow(4) {
                let mut rest = idx;
                let d: Vec<u32> = (0..4)
                    .map(|_| {
                        let c = units[rest % units.len()];
                        rest /= units.len();
                        c
                    })
                    .collect();
                let q = QuadraticForm::diagonal(k, &d);
                let r = stein_vs_center(&q)?;
                if !r.agrees {
                    return Ok(Check::fail(format!("F{p} diag{d:?}: {r:?}")));
                }
                if r.delta_square {
                    split += 1;
                    if r.lagrangians as u64 != 2 * (p + 1) {
                        return Ok(Check::fail(format!("F{p} diag{d:?}: {} lagrangians", r.lagrangians)));
                    }
                }
                forms += 1;
            }
            let h = enumerate_isotropic(&QuadraticForm::hyperbolic(k, 2), 1)?;
            if h.len() as u64 != 2 * (p + 1) {
                return Ok(Check::fail(format!("H(2) over F{p}: {} lagrangians", h.len())));
            }
        }
        Ok(Check::new(true, format!("{forms} forms, {split} split with 2(q+1) lagrangians")))
    })())
}

fn c10_rank4_trivial(_: Option<&str>) -> Check {
    attempt((|| {
        let q = Rationals;
        let mut r = rng(10);
        // both forms vanish at (1, 1, 1, 1) before the change of basis
        let q1 = QuadraticForm::diagonal(q, &ints(&q, &[1, -1, 2, -2]));
        let q2 = QuadraticForm::diagonal(q, &ints(&q, &[3, -1, -5, 3]));
        let (h1, p) = disguise(&q1, &mut r);
        let cols: Vec<_> = (0..4).map(|j| p.col(j)).collect();
        let h2 = q2.pullback(&cols)?;
        let pencil = Pencil::new(h1.clone(), h2.clone())?;
        match brauer_triviality_rank4(&pencil, &SearchBudget::default())? {
            BrauerVerdict::Trivial(SectionWitness::CommonZero(v)) => {
                let ok = q.is_zero(&h1.evaluate(&v)?) && q.is_zero(&h2.evaluate(&v)?) && v.iter().any(|x| !q.is_zero(x));
                let shown: Vec<String> = v.iter().map(|x| q.format(x)).collect();
                Ok(Check::new(ok, format!("trivial, witness ({})", shown.join(", "))))
            }
            other => Ok(Check::fail(format!("verdict {}", other.name()))),
        }
    })())
}

fn c11_rank6_plane(_: Option<&str>) -> Check {
    attempt((|| {
        let k = PrimeField::new(3)?;
        let mut r = rng(11);
        // H(3) vanishes on span(e0, e2); q2 is random away from that plane
        let q1 = QuadraticForm::hyperbolic(k, 3);
        let mut q2 = QuadraticForm::random(k, 6, 0.8, &mut r);
        let mut c = q2.coeffs().clone();
        for (i, j) in [(0, 0), (2, 2), (0, 2)] {
            c.set(i, j, 0);
        }
        q2 = QuadraticForm::from_upper(k, c)?;
        let (h1, p) = disguise(&q1, &mut r);
        let cols: Vec<_> = (0..6).map(|j| p.col(j)).collect();
        let h2 = q2.pullback(&cols)?;
        let rep = common_isotropic_plane_rank6(&Pencil::new(h1.clone(), h2.clone())?, &SearchBudget::default())?;
        let Some([a, b]) = rep.plane else {
            return Ok(Check::fail(format!("no plane among {} candidates", rep.candidates)));
        };
        let vanish = |q: &QuadraticForm<PrimeField>| -> Result<bool> {
            Ok(q.evaluate(&a)? == 0 && q.evaluate(&b)? == 0 && q.polar(&a, &b)? == 0)
        };
        let ok = rep.beta_trivial && vanish(&h1)? && vanish(&h2)?;
        Ok(Check::new(
            ok,
            format!("plane found after {} of {} candidates, beta trivial", rep.candidates, rep.total),
        ))
    })())
}

#[derive(Debug, Clone)]
pub struct Run {
    pub id: &'static str,
    pub title: &'static str,
    pub check: Check,
    pub elapsed: Duration,
    pub bound: Duration,
}

pub fn run_all(fault: Option<&str>) -> Vec<Run> {
    criteria()
        .into_iter()
        .map(|c| {
            let start = Instant::now();
            let check = (c.run)(fault);
            Run {
                id: c.id,
                title: c.title,
                check,
                elapsed: start.elapsed(),
                bound: c.bound,
            }
        })
        .collect()
}

pub fn run(fault: Option<&str>) -> Result<Outcome> {
    if let Some(f) = fault {
        if !FAULTS.contains(&f) {
            return Err(Error::Unsupported(format!(
                "unknown fault `{f}` (known: {})",
                FAULTS.join(", ")
            )));
        }
    }
    let runs = run_all(fault);
    let passed = runs.iter().filter(|r| r.check.pass).count();
    let mut body = Section::new();
    body.opt("fault", fault)
        .str("passed", format!("{passed}/{}", runs.len()))
        .sections(
            "criteria",
            runs.iter()
                .map(|r| {
                    let mut s = Section::new();
                    s.str("id", r.id)
                        .str("title", r.title)
                        .flag("pass", r.check.pass)
                        .str("detail", &r.check.detail);
                    s
                })
                .collect(),
        );
    let notes = runs
        .iter()
        .map(|r| {
            format!(
                "  {:<4} {:>8.2}s  (bound {}s)",
                r.id,
                r.elapsed.as_secs_f64(),
                r.bound.as_secs()
            )
        })
        .collect::<Vec<_>>();
    let mut all_notes = vec!["timings:".to_string()];
    all_notes.extend(notes);
    Ok(Outcome {
        status: if passed == runs.len() { Status::Ok } else { Status::Falsified },
        body,
        notes: all_notes,
    })
}
