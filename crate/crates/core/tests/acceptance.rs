//! Acceptance run: every criterion at its runtime bound, each backed by an
//! oracle written independently of the library where one exists.
//! Prints one line per criterion and exits nonzero on any failure.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use quadrics::cli::selftest::{criteria, Check};
use quadrics::cli::{execute, Command, JobSpec};
use quadrics::clifford::full_clifford;
use quadrics::lagrangian::enumerate_isotropic;
use quadrics::pencil::{amer_brumer_check, analyze, Pencil, PlaneEnumeration};
use quadrics::quadform::QuadraticForm;
use quadrics::rings::{Field, PrimeField, Rationals};

type Oracle = fn() -> Result<String, String>;

fn pow_mod(mut b: u64, mut e: u64, p: u64) -> u64 {
    let mut r = 1;
    b %= p;
    while e > 0 {
        if e & 1 == 1 {
            r = r * b % p;
        }
        b = b * b % p;
        e >>= 1;
    }
    r
}

/// Determinant over F_p by plain elimination.
fn det_mod(mut m: Vec<Vec<u64>>, p: u64) -> u64 {
    let n = m.len();
    let mut det = 1;
    for c in 0..n {
        let Some(r) = (c..n).find(|&r| m[r][c] != 0) else { return 0 };
        if r != c {
            m.swap(r, c);
            det = (p - det) % p;
        }
        det = det * m[c][c] % p;
        let inv = pow_mod(m[c][c], p - 2, p);
        for r in c + 1..n {
            let f = m[r][c] * inv % p;
            for j in c..n {
                m[r][j] = (m[r][j] + p * p - f * m[c][j] % p) % p;
            }
        }
    }
    det
}

/// v² = q(v) in the full Clifford algebra, for random v.
fn oracle_c1() -> Result<String, String> {
    fn check<K: Field>(k: K, rng: &mut ChaCha8Rng) -> Result<usize, String> {
        let mut checked = 0;
        for n in 1..=5 {
            let q = QuadraticForm::random(k.clone(), n, 0.7, rng);
            let c = full_clifford(&q).map_err(|e| e.to_string())?;
            let a = &c.algebra;
            for _ in 0..5 {
                let v: Vec<K::Elem> = (0..n).map(|_| k.sample(rng)).collect();
                let mut x = vec![k.zero(); a.dim()];
                for (i, vi) in v.iter().enumerate() {
                    x[c.index_of(1 << i).unwrap()] = vi.clone();
                }
                let qv = q.evaluate(&v).unwrap();
                if a.mul(&x, &x) != a.scale(a.unit(), &qv) {
                    return Err(format!("v² ≠ q(v) for {}", q.to_literal()));
                }
                checked += 1;
            }
        }
        Ok(checked)
    }
    let mut rng = ChaCha8Rng::seed_from_u64(101);
    let mut total = check(Rationals, &mut rng)?;
    for p in [2, 3, 5] {
        total += check(PrimeField::new(p).unwrap(), &mut rng)?;
    }
    Ok(format!("v²=q(v) on {total} vectors"))
}

/// Brute-force common zeros of rank-3 diagonal pairs over F_3.
fn oracle_c6() -> Result<String, String> {
    let p = 3u64;
    let k = PrimeField::new(p).unwrap();
    let mut agree = 0;
    for code in 0..9u32.pow(3) {
        let pairs: Vec<(u64, u64)> = (0..3).map(|i| ((code / 9u32.pow(i)) % 9) as u64).map(|c| (c / 3, c % 3)).collect();
        if pairs.windows(2).any(|w| w[0] > w[1]) {
            continue;
        }
        let mut brute = false;
        for v in 1..27u64 {
            let x = [v % 3, v / 3 % 3, v / 9];
            let s1: u64 = (0..3).map(|i| pairs[i].0 * x[i] * x[i]).sum();
            let s2: u64 = (0..3).map(|i| pairs[i].1 * x[i] * x[i]).sum();
            if s1.is_multiple_of(p) && s2.is_multiple_of(p) {
                brute = true;
                break;
            }
        }
        let d1: Vec<u32> = pairs.iter().map(|c| c.0 as u32).collect();
        let d2: Vec<u32> = pairs.iter().map(|c| c.1 as u32).collect();
        let pencil = Pencil::new(QuadraticForm::diagonal(k, &d1), QuadraticForm::diagonal(k, &d2)).map_err(|e| e.to_string())?;
        let r = amer_brumer_check(&pencil, 3).map_err(|e| e.to_string())?;
        if r.common_zero.is_some() != brute {
            return Err(format!("common zero disagrees for {pairs:?}"));
        }
        agree += 1;
    }
    Ok(format!("{agree} F3 classes match brute force"))
}

/// Δ(s, t) against an independent determinant of the member's polar matrix.
fn oracle_c8() -> Result<String, String> {
    let p = 5u64;
    let k = PrimeField::new(p).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(108);
    let mut checked = 0;
    for n in [4, 6] {
        for _ in 0..10 {
            let q1 = QuadraticForm::random(k, n, 0.7, &mut rng);
            let q2 = QuadraticForm::random(k, n, 0.7, &mut rng);
            let pencil = Pencil::new(q1.clone(), q2.clone()).map_err(|e| e.to_string())?;
            let a = analyze(&pencil).map_err(|e| e.to_string())?;
            for (s, t) in [(1u32, 0u32), (0, 1), (1, 1), (2, 1), (3, 1), (4, 1)] {
                let gram: Vec<Vec<u64>> = (0..n)
                    .map(|i| {
                        (0..n)
                            .map(|j| {
                                let c = |q: &QuadraticForm<PrimeField>| {
                                    let (a, b) = (i.min(j), i.max(j));
                                    let v = *q.coeff(a, b) as u64;
                                    if i == j { 2 * v } else { v }
                                };
                                (s as u64 * c(&q1) + t as u64 * c(&q2)) % p
                            })
                            .collect()
                    })
                    .collect();
                if det_mod(gram, p) != a.delta.eval(&k, &s, &t) as u64 {
                    return Err(format!("Δ({s}:{t}) differs for rank {n}"));
                }
                checked += 1;
            }
        }
    }
    Ok(format!("Δ matches {checked} determinants"))
}

/// Lines on regular diagonal quadric surfaces: brute force count against
/// 2(q+1) or 0 by the Euler criterion on the product of the diagonal.
fn oracle_c9() -> Result<String, String> {
    let mut forms = 0;
    for p in [3u64, 5] {
        let k = PrimeField::new(p).unwrap();
        // normalized 2-dim subspaces: two RREF rows
        let mut planes = Vec::new();
        for (i, j) in [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)] {
            // (row, column) of every free entry
            let slots: Vec<(usize, usize)> = (i + 1..4)
                .filter(|&c| c != j)
                .map(|c| (0, c))
                .chain((j + 1..4).map(|c| (1, c)))
                .collect();
            for code in 0..p.pow(slots.len() as u32) {
                let mut rows = [[0u64; 4]; 2];
                rows[0][i] = 1;
                rows[1][j] = 1;
                for (n, &(r, c)) in slots.iter().enumerate() {
                    rows[r][c] = code / p.pow(n as u32) % p;
                }
                planes.push((rows[0], rows[1]));
            }
        }
        for code in 0..(p - 1).pow(4) {
            let d: Vec<u64> = (0..4).map(|i| 1 + code / (p - 1).pow(i) % (p - 1)).collect();
            let qf = |x: &[u64; 4]| (0..4).map(|i| d[i] * x[i] * x[i]).sum::<u64>() % p;
            let bf = |x: &[u64; 4], y: &[u64; 4]| (0..4).map(|i| 2 * d[i] * x[i] * y[i]).sum::<u64>() % p;
            let brute = planes.iter().filter(|(a, b)| qf(a) == 0 && qf(b) == 0 && bf(a, b) == 0).count() as u64;
            let prod = d.iter().product::<u64>() % p;
            let expected = if pow_mod(prod, (p - 1) / 2, p) == 1 { 2 * (p + 1) } else { 0 };
            let dd: Vec<u32> = d.iter().map(|&x| x as u32).collect();
            let lib = enumerate_isotropic(&QuadraticForm::diagonal(k, &dd), 1).map_err(|e| e.to_string())?.len() as u64;
            if brute != expected || lib != brute {
                return Err(format!("F{p} diag{d:?}: brute {brute}, expected {expected}, library {lib}"));
            }
            forms += 1;
        }
    }
    Ok(format!("{forms} forms match brute force"))
}

/// The plane enumeration covers Gr(2, F_3^6): [6 choose 2]_3 subspaces.
fn oracle_c11() -> Result<String, String> {
    let q: u64 = 3;
    let gaussian = (q.pow(6) - 1) * (q.pow(5) - 1) / ((q.pow(2) - 1) * (q - 1));
    let k = PrimeField::new(3).unwrap();
    let len = PlaneEnumeration::new(k.elements().unwrap(), 6).len();
    if len == gaussian {
        Ok(format!("{len} planes = Gaussian binomial"))
    } else {
        Err(format!("{len} planes, expected {gaussian}"))
    }
}

fn oracle_for(id: &str) -> Option<Oracle> {
    match id {
        "C1" => Some(oracle_c1),
        "C6" => Some(oracle_c6),
        "C8" => Some(oracle_c8),
        "C9" => Some(oracle_c9),
        "C11" => Some(oracle_c11),
        _ => None,
    }
}

/// A fault must make its criterion fail with a named invariant.
fn fault_for(id: &str) -> Option<(&'static str, &'static str)> {
    match id {
        "C1" => Some(("structure-constant", "associativity")),
        "C4" => Some(("split-witness", "q∘P differs")),
        _ => None,
    }
}

fn line(id: &str, title: &str, pass: bool, elapsed: Duration, bound: Option<Duration>, detail: &str) {
    let bound = bound.map_or("-".to_string(), |b| format!("{}s", b.as_secs()));
    println!(
        "{:<4} {}  {:<42} {:>7.2}s / {:>4}  {}",
        id,
        if pass { "PASS" } else { "FAIL" },
        title,
        elapsed.as_secs_f64(),
        bound,
        detail
    );
}

fn main() -> ExitCode {
    // `cargo test` passes filter arguments; honour a plain substring filter
    let filter: Vec<String> = std::env::args().skip(1).filter(|a| !a.starts_with('-')).collect();
    let wanted = |id: &str| filter.is_empty() || filter.iter().any(|f| id.contains(f.as_str()));
    let mut failures = 0;
    for c in criteria() {
        if !wanted(c.id) {
            continue;
        }
        let start = Instant::now();
        let Check { mut pass, mut detail } = (c.run)(None);
        let elapsed = start.elapsed();
        if elapsed > c.bound {
            pass = false;
            detail = format!("over time bound; {detail}");
        }
        if let Some(oracle) = oracle_for(c.id) {
            match oracle() {
                Ok(msg) => detail = format!("{detail}; oracle: {msg}"),
                Err(msg) => {
                    pass = false;
                    detail = format!("{detail}; oracle FAILED: {msg}");
                }
            }
        }
        if let Some((fault, invariant)) = fault_for(c.id) {
            let f = (c.run)(Some(fault));
            if f.pass || !f.detail.contains(invariant) {
                pass = false;
                detail = format!("{detail}; fault `{fault}` not caught ({})", f.detail);
            } else {
                detail = format!("{detail}; fault `{fault}` caught");
            }
        }
        if !pass {
            failures += 1;
        }
        line(c.id, c.title, pass, elapsed, Some(c.bound), &detail);
    }
    if wanted("C12") {
        let start = Instant::now();
        let job = JobSpec::new(Command::Selftest);
        let (a, b) = (execute(&job).machine(), execute(&job).machine());
        let pass = a == b;
        if !pass {
            failures += 1;
        }
        let detail = if pass {
            format!("{} identical bytes", a.len())
        } else {
            "machine reports differ".to_string()
        };
        line("C12", "deterministic machine report", pass, start.elapsed(), None, &detail);
    }
    if failures == 0 {
        ExitCode::SUCCESS
    } else {
        println!("{failures} criteria failed");
        ExitCode::FAILURE
    }
}
