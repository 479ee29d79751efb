use super::parse::{self, Item};
use super::report::{self, Section, Status};
use super::{JobSpec, Outcome, Scenario};
use crate::clifford::{center, even_clifford};
use crate::error::{Error, Result};
use crate::lagrangian::{enumerate_isotropic, ruling_components, stein_vs_center};
use crate::morita::{morita_witness, MORITA_RANK_CAP};
use crate::pencil::{
    amer_brumer_check, analyze as analyze_pencil, brauer_triviality_rank4, center_matches_cover,
    common_isotropic_plane_rank6, cover_model, projective_line, BrauerVerdict, Pencil, PencilField,
    SectionWitness,
};
use crate::quadform::QuadraticForm;
use crate::rings::{ExtensionField, Field, FieldContext, FunctionField, PrimeField, Rationals};
use crate::splitting::{find_isotropic, reduce_fully, split_hyperbolic, IsotropySearch, SearchBudget};

type Symbols<E> = Box<dyn Fn(&str) -> Option<E>>;

fn symbols<K: Field>(k: &K) -> Symbols<K::Elem> {
    let g = k.generator();
    Box::new(move |name| g.as_ref().filter(|(n, _)| n == name).map(|(_, e)| e.clone()))
}

/// The variable of k(t), plus the generator of the base field if it has one.
fn ff_symbols<B: Field>(ff: &FunctionField<B>) -> Symbols<<FunctionField<B> as Field>::Elem> {
    let t = ff.generator();
    let a = ff.base().generator().map(|(n, e)| (n, ff.from_base(e)));
    Box::new(move |name| {
        [&t, &a]
            .into_iter()
            .flatten()
            .find(|(n, _)| n == name)
            .map(|(_, e)| e.clone())
    })
}

/// A field chosen at runtime.
pub enum AnyField {
    Q(Rationals),
    Fp(PrimeField),
    Fq(ExtensionField),
    QT(FunctionField<Rationals>),
    FpT(FunctionField<PrimeField>),
    FqT(FunctionField<ExtensionField>),
}

impl AnyField {
    pub fn new(c: &FieldContext) -> Result<Self> {
        Ok(match c {
            FieldContext::Rationals => AnyField::Q(Rationals),
            FieldContext::PrimeField { p } => AnyField::Fp(PrimeField::new(*p)?),
            FieldContext::Extension { p, degree } => AnyField::Fq(ExtensionField::new(*p, *degree)?),
            FieldContext::FunctionField { base, var } => match base.as_ref() {
                FieldContext::Rationals => AnyField::QT(FunctionField::new(Rationals, var.clone())?),
                FieldContext::PrimeField { p } => AnyField::FpT(FunctionField::new(PrimeField::new(*p)?, var.clone())?),
                FieldContext::Extension { p, degree } => {
                    AnyField::FqT(FunctionField::new(ExtensionField::new(*p, *degree)?, var.clone())?)
                }
                FieldContext::FunctionField { .. } => return Err(Error::TowerTooDeep),
            },
        })
    }
}

/// Run `$body` with `$k` bound to the concrete field and `$sym` to its
/// symbol table.
macro_rules! with_field {
    ($any:expr, |$k:ident, $sym:ident| $body:expr) => {
        match $any {
            AnyField::Q($k) => {
                let $sym = symbols(&$k);
                $body
            }
            AnyField::Fp($k) => {
                let $sym = symbols(&$k);
                $body
            }
            AnyField::Fq($k) => {
                let $sym = symbols(&$k);
                $body
            }
            AnyField::QT($k) => {
                let $sym = ff_symbols(&$k);
                $body
            }
            AnyField::FpT($k) => {
                let $sym = ff_symbols(&$k);
                $body
            }
            AnyField::FqT($k) => {
                let $sym = ff_symbols(&$k);
                $body
            }
        }
    };
}

struct Parsed<'a> {
    items: Vec<Item<'a>>,
    field: AnyField,
    n: Option<usize>,
}

fn parse_literal<'a>(src: &'a str, job: &JobSpec, keys: &[&str]) -> Result<Parsed<'a>> {
    let items = parse::items(src)?;
    parse::check_keys(&items, keys)?;
    let ctx = parse::field_of(&items, job.field.as_deref())?;
    Ok(Parsed {
        field: AnyField::new(&ctx)?,
        n: parse::declared_rank(&items)?,
        items,
    })
}

fn form_item<'a, 'b>(items: &'b [Item<'a>], keys: &[&str]) -> Result<&'b Item<'a>> {
    let found: Vec<_> = items.iter().filter(|it| keys.contains(&it.key)).collect();
    match found.as_slice() {
        [one] => Ok(one),
        [] => Err(Error::Parse {
            pos: 0,
            msg: format!("missing `{}=...`", keys[0]),
        }),
        [_, second, ..] => Err(Error::Parse {
            pos: second.key_pos,
            msg: "give the form once (`q=` or `coeffs=`)".into(),
        }),
    }
}

fn literal<'a>(opt: &'a Option<String>, what: &str) -> Result<&'a str> {
    opt.as_deref().ok_or_else(|| Error::Parse {
        pos: 0,
        msg: format!("missing --{what}"),
    })
}

pub fn analyze(job: &JobSpec) -> Result<Outcome> {
    let src = literal(&job.form, "form")?;
    let p = parse_literal(src, job, &["field", "n", "q", "coeffs"])?;
    let item = form_item(&p.items, &["q", "coeffs"])?;
    with_field!(p.field, |k, sym| {
        let q = parse::parse_form_value(&k, item, p.n, &*sym)?;
        analyze_form(&q)
    })
}

pub fn analyze_form<K: Field>(q: &QuadraticForm<K>) -> Result<Outcome> {
    let k = q.field();
    let mut body = Section::new();
    body.str("field", k.descriptor().to_string())
        .section("form", report::form(q))
        .grid("polar_matrix", report::matrix(k, &q.polar_matrix()));
    let mut disc = Section::new();
    match q.discriminant() {
        Ok(d) => {
            disc.str("value", k.format(&d.value))
                .str("square_class", k.format(&d.square_class))
                .flag("square", d.is_square)
                .flag("half", d.half);
        }
        Err(e) => {
            disc.str("undefined", e.to_string());
        }
    }
    body.section("discriminant", disc);
    let radical = q.radical();
    let mut rad = Section::new();
    rad.num("dim", radical.len())
        .grid("basis", radical.iter().map(|v| report::vector(k, v)).collect())
        .flag("simple_degeneration", radical.len() <= 1);
    body.section("radical", rad);
    if (1..=7).contains(&q.rank()) {
        let c0 = even_clifford(q)?;
        let c = center(&c0.algebra);
        let mut s = Section::new();
        s.num("dim", c0.dim())
            .num("center_dim", c.dim)
            .str("center_shape", c.shape.name())
            .opt("delta", c.delta.as_ref().map(|d| k.format(d)))
            .opt("delta_class", c.delta_class.as_ref().map(|d| k.format(d)))
            .flag("center_split", c.split);
        body.section("even_clifford", s);
    }
    Ok(Outcome {
        status: Status::Ok,
        body,
        notes: Vec::new(),
    })
}

pub fn reduce(job: &JobSpec) -> Result<Outcome> {
    let src = literal(&job.form, "form")?;
    let p = parse_literal(src, job, &["field", "n", "q", "coeffs"])?;
    let item = form_item(&p.items, &["q", "coeffs"])?;
    let budget = job.budget.search();
    with_field!(p.field, |k, sym| {
        let q = parse::parse_form_value(&k, item, p.n, &*sym)?;
        reduce_form(&q, &budget, job.fault_inject.as_deref() == Some("split-witness"))
    })
}

pub fn reduce_form<K: IsotropySearch>(q: &QuadraticForm<K>, budget: &SearchBudget, tamper: bool) -> Result<Outcome> {
    let k = q.field();
    let mut status = Status::Ok;
    let mut body = Section::new();
    body.str("field", k.descriptor().to_string()).section("form", report::form(q));

    // one reduction step on q itself, with its invariants
    if let Some(w) = find_isotropic(q, budget).witness().filter(|w| w.regular) {
        let mut s = split_hyperbolic(q, &w.vector)?;
        if tamper {
            let c = k.add(s.p.get(0, 0), &k.one());
            s.p.set(0, 0, c);
        }
        s.verify()?;
        let qp = &s.reduced;
        let mut step = Section::new();
        step.list("isotropic", report::vector(k, &w.vector))
            .grid("change_of_basis", report::matrix(k, &s.p))
            .section("reduced", report::form(qp))
            .grid("congruence", report::matrix(k, &s.congruence));
        let mut inv = Section::new();
        inv.flag("radical_preserved", q.radical_dim() == qp.radical_dim());
        if let (Ok(d), Ok(dp)) = (q.discriminant(), qp.discriminant()) {
            inv.flag(
                "discriminant_class_preserved",
                d.square_class == k.square_class(&k.neg(&dp.value)),
            );
        }
        step.section("invariants", inv);
        if (1..=MORITA_RANK_CAP).contains(&qp.rank()) {
            let m = morita_witness(qp)?;
            let mut ms = Section::new();
            ms.num("p_dim", m.p_dim)
                .num("c0_dim", m.c0_dim)
                .num("end_dim", m.end_dim)
                .flag("commutes", m.commutes)
                .flag("multiplicative", m.multiplicative)
                .flag("unital", m.unital)
                .flag("bijective", m.bijective)
                .str("center_shapes", format!("{} / {}", m.center_shapes.0, m.center_shapes.1))
                .opt("double_centralizer", m.double_centralizer.map(|b| b.to_string()))
                .opt("first_failure", m.first_failure.clone());
            if m.matrix.rows() <= 16 {
                ms.grid("matrix", report::matrix(k, &m.matrix));
            }
            if !m.ok() {
                status = Status::Falsified;
            }
            step.section("morita", ms);
        }
        body.section("first_step", step);
    }

    let d = reduce_fully(q, budget)?;
    let mut witt = Section::new();
    witt.num("witt_index", d.witt_index)
        .num("radical_rank", d.radical_rank)
        .section("anisotropic", report::form(&d.anisotropic))
        .flag("conclusive", d.conclusive)
        .opt("bound", d.last_bound.clone());
    let steps = d
        .steps
        .iter()
        .map(|s| {
            let mut x = Section::new();
            x.list("isotropic", report::vector(k, &s.isotropic))
                .str("reduced", s.reduced.to_literal())
                .flag("verified", s.verify().is_ok());
            x
        })
        .collect();
    witt.sections("steps", steps);
    body.section("witt_decomposition", witt);
    if !d.conclusive && status == Status::Ok {
        status = Status::Inconclusive;
    }
    Ok(Outcome {
        status,
        body,
        notes: Vec::new(),
    })
}

fn point<K: Field>(k: &K, s: &K::Elem, t: &K::Elem) -> String {
    format!("({}:{})", k.format(s), k.format(t))
}

pub fn pencil(job: &JobSpec) -> Result<Outcome> {
    let src = literal(&job.pencil, "pencil")?;
    let p = parse_literal(src, job, &["field", "n", "q1", "q2"])?;
    let i1 = form_item(&p.items, &["q1"])?;
    let i2 = form_item(&p.items, &["q2"])?;
    let budget = job.budget.search();
    let scenario = job.scenario;
    let n = p.n;
    macro_rules! build {
        ($k:expr, $sym:expr) => {{
            let q1 = parse::parse_form_value(&$k, i1, n, &*$sym)?;
            let q2 = parse::parse_form_value(&$k, i2, n, &*$sym)?;
            let pencil = Pencil::new(q1, q2)?;
            if let Some(s) = scenario {
                if pencil.rank() != s.rank() {
                    return Err(Error::WrongRank {
                        expected: s.rank(),
                        got: pencil.rank(),
                    });
                }
            }
            pencil
        }};
    }
    match p.field {
        AnyField::Fp(k) => {
            let sym = symbols(&k);
            let pencil = build!(k, sym);
            let mut out = pencil_report(&pencil, &budget, scenario)?;
            if pencil.rank() <= 5 && k.modulus() <= 5 && pencil.rank() >= 1 {
                let r = amer_brumer_check(&pencil, budget.degree)?;
                let mut s = Section::new();
                s.opt("common_zero", r.common_zero.as_ref().map(|v| report::vector(&k, v).join(", ")))
                    .num("points_checked", r.points_checked)
                    .opt("section_witness", r.section.witness.as_ref().map(|w| w.join(", ")))
                    .flag("section_search_complete", r.section.complete)
                    .num("degree_bound", r.section.degree_bound)
                    .opt("violation", r.violation.clone());
                if !r.ok() {
                    out.status = Status::Falsified;
                }
                out.body.section("amer_brumer", s);
            }
            Ok(out)
        }
        AnyField::Q(k) => {
            let sym = symbols(&k);
            pencil_report(&build!(k, sym), &budget, scenario)
        }
        AnyField::Fq(k) => {
            let sym = symbols(&k);
            pencil_report(&build!(k, sym), &budget, scenario)
        }
        AnyField::QT(k) => {
            let sym = ff_symbols(&k);
            pencil_report(&build!(k, sym), &budget, scenario)
        }
        AnyField::FpT(k) => {
            let sym = ff_symbols(&k);
            pencil_report(&build!(k, sym), &budget, scenario)
        }
        AnyField::FqT(k) => {
            let sym = ff_symbols(&k);
            pencil_report(&build!(k, sym), &budget, scenario)
        }
    }
}

pub fn pencil_report<K: PencilField>(
    p: &Pencil<K>,
    budget: &SearchBudget,
    scenario: Option<Scenario>,
) -> Result<Outcome> {
    let k = p.field();
    let n = p.rank();
    let mut status = Status::Ok;
    let mut body = Section::new();
    body.str("field", k.descriptor().to_string())
        .opt("scenario", scenario.map(|s| format!("{s:?}").to_lowercase()))
        .section("q1", report::form(&p.q1))
        .section("q2", report::form(&p.q2));
    let a = analyze_pencil(p)?;
    let mut an = Section::new();
    an.num("rank", a.rank)
        .str("delta", a.delta.format(k))
        .flag("half_discriminant", a.half_discriminant)
        .flag("squarefree", a.squarefree)
        .sections(
            "points",
            a.points
                .iter()
                .map(|d| {
                    let mut s = Section::new();
                    s.str("point", point(k, &d.s, &d.t))
                        .num("multiplicity", d.multiplicity)
                        .num("radical_rank", d.radical_rank);
                    s
                })
                .collect(),
        )
        .sections(
            "extension_points",
            a.extension_points
                .iter()
                .map(|e| {
                    let mut s = Section::new();
                    s.num("degree", e.degree)
                        .str("root", &e.root)
                        .str("modulus", &e.modulus)
                        .num("radical_rank", e.radical_rank);
                    s
                })
                .collect(),
        )
        .flag("roots_complete", a.roots_complete)
        .num("max_radical_rank", a.max_radical_rank)
        .flag("simple", a.simple);
    body.section("analysis", an);

    let mut cover = Section::new();
    match cover_model(k, &a) {
        Ok(c) => {
            cover
                .num("genus", c.genus)
                .str("model", c.model)
                .num("branch_points", c.branch_points)
                .flag("branched_at_infinity", c.branched_at_infinity);
        }
        Err(e) => {
            cover.str("unavailable", e.to_string());
        }
    }
    body.section("cover", cover);

    if n.is_multiple_of(2) && n <= 6 && k.characteristic() != 2 {
        if let Some(samples) = projective_line(k).filter(|s| s.len() <= 10) {
            let r = center_matches_cover(p, &samples)?;
            let mut s = Section::new();
            s.opt("constant", r.constant.as_ref().map(|c| k.format(c)))
                .flag("consistent", r.consistent)
                .sections(
                    "samples",
                    r.samples
                        .iter()
                        .map(|x| {
                            let mut y = Section::new();
                            y.str("point", point(k, &x.s, &x.t))
                                .str("delta_value", k.format(&x.delta_value))
                                .opt("center_delta", x.center_delta.as_ref().map(|d| k.format(d)))
                                .str("shape", x.shape)
                                .flag("agrees", x.agrees);
                            y
                        })
                        .collect(),
                );
            if !r.consistent {
                status = Status::Falsified;
            }
            body.section("center_vs_cover", s);
        }
    }

    let mut verdicts = Section::new();
    if n == 4 && a.simple {
        match brauer_triviality_rank4(p, budget)? {
            BrauerVerdict::Trivial(w) => {
                verdicts.str("brauer", "trivial");
                match w {
                    SectionWitness::CommonZero(v) => verdicts.list("common_zero", report::vector(k, &v)),
                    SectionWitness::Section(s) => verdicts.list("section", s),
                };
            }
            BrauerVerdict::Nontrivial {
                points_checked,
                degree_bound,
            } => {
                verdicts
                    .str("brauer", "nontrivial")
                    .num("points_checked", points_checked)
                    .num("degree_bound", degree_bound);
            }
            BrauerVerdict::Unknown { bound } => {
                verdicts.str("brauer", "unknown").str("bound", bound);
                status = status.max(Status::Inconclusive);
            }
        }
    }
    if n == 6 && k.elements().is_some() {
        match common_isotropic_plane_rank6(p, budget) {
            Ok(r) => {
                verdicts
                    .flag("beta_trivial", r.beta_trivial)
                    .num("planes_checked", r.candidates)
                    .num("planes_total", r.total);
                if let Some([a, b]) = &r.plane {
                    verdicts.grid("plane", vec![report::vector(k, a), report::vector(k, b)]);
                }
            }
            Err(Error::BudgetExceeded(b)) => {
                verdicts.str("plane_search", format!("budget exceeded: {b}"));
                status = status.max(Status::Inconclusive);
            }
            Err(e) => return Err(e),
        }
    }
    if n >= 5 {
        match K::section_search(p, budget) {
            Some(s) => {
                verdicts
                    .opt("function_field_zero", s.witness.as_ref().map(|w| w.join(", ")))
                    .opt("function_field_zero_degree", s.witness_degree.map(|d| d.to_string()));
                if s.witness.is_none() {
                    status = status.max(Status::Inconclusive);
                }
            }
            None => {
                verdicts.str("function_field_zero", "not searched over this base");
            }
        }
    }
    body.section("verdicts", verdicts);
    Ok(Outcome {
        status,
        body,
        notes: Vec::new(),
    })
}

pub fn lagrangian(job: &JobSpec) -> Result<Outcome> {
    let src = literal(&job.form, "form")?;
    let p = parse_literal(src, job, &["field", "n", "q", "coeffs"])?;
    let item = form_item(&p.items, &["q", "coeffs"])?;
    match p.field {
        AnyField::Fp(k) => {
            let q = parse::parse_form_value(&k, item, p.n, &*symbols(&k))?;
            let mut out = lagrangian_form(&q, job.dim)?;
            if q.rank() % 2 == 0 && q.rank() > 0 && q.radical_dim() == 0 && k.modulus() != 2 {
                let r = stein_vs_center(&q)?;
                let mut s = Section::new();
                s.str("delta", &r.delta)
                    .flag("delta_square", r.delta_square)
                    .flag("center_split", r.center_split)
                    .num("lagrangians", r.lagrangians)
                    .opt("components", r.components.map(|(a, b)| format!("{a} + {b}")))
                    .opt("extension_lagrangians", r.extension_lagrangians.map(|x| x.to_string()))
                    .opt("frobenius_swaps", r.frobenius_swaps.map(|x| x.to_string()))
                    .flag("agrees", r.agrees);
                if !r.agrees {
                    out.status = Status::Falsified;
                }
                out.body.section("stein_vs_center", s);
            }
            Ok(out)
        }
        AnyField::Fq(k) => {
            let q = parse::parse_form_value(&k, item, p.n, &*symbols(&k))?;
            lagrangian_form(&q, job.dim)
        }
        _ => Err(Error::Unsupported("isotropic subspaces are enumerated over finite fields".into())),
    }
}

pub fn lagrangian_form<K: Field>(q: &QuadraticForm<K>, dim: Option<usize>) -> Result<Outcome> {
    let k = q.field();
    let n = q.rank();
    let m = n / 2;
    let r = match dim {
        Some(r) => r,
        None if m >= 1 => m - 1,
        None => return Err(Error::Unsupported("rank 0 has no isotropic subspaces".into())),
    };
    let subspaces = enumerate_isotropic(q, r)?;
    let mut body = Section::new();
    body.str("field", k.descriptor().to_string())
        .section("form", report::form(q))
        .num("subspace_dim", r + 1)
        .num("count", subspaces.len());
    let lagrangian = n.is_multiple_of(2) && r + 1 == m && q.radical_dim() == 0;
    let labels = if lagrangian && subspaces.len() >= 2 {
        let rl = ruling_components(k, &subspaces, m)?;
        body.str("rulings", format!("{} + {}", rl.sizes.0, rl.sizes.1));
        Some(rl.labels)
    } else {
        None
    };
    let list = subspaces
        .iter()
        .enumerate()
        .map(|(i, u)| {
            let mut s = Section::new();
            s.grid("basis", u.iter().map(|v| report::vector(k, v)).collect());
            if let Some(l) = &labels {
                s.num("ruling", l[i]);
            }
            s
        })
        .collect();
    body.sections("subspaces", list);
    Ok(Outcome {
        status: Status::Ok,
        body,
        notes: Vec::new(),
    })
}
