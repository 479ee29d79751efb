use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use quadrics::clifford::{center, even_clifford};
use quadrics::lagrangian::enumerate_isotropic;
use quadrics::pencil::{analyze, Pencil};
use quadrics::quadform::QuadraticForm;
use quadrics::rings::{Field, Matrix, PrimeField, Rationals};
use quadrics::splitting::{is_regular_isotropic, split_hyperbolic};

fn field(i: usize) -> PrimeField {
    PrimeField::new([2, 3, 5, 7][i]).unwrap()
}

/// q∘P for a random invertible P.
fn disguise<K: Field>(q: &QuadraticForm<K>, rng: &mut ChaCha8Rng) -> (QuadraticForm<K>, Matrix<K::Elem>) {
    let k = q.field();
    let n = q.rank();
    loop {
        let entries = (0..n * n).map(|_| k.sample(rng)).collect();
        let p = Matrix::new(n, n, entries).unwrap();
        if !k.is_zero(&p.det(k).unwrap()) {
            let cols: Vec<_> = (0..n).map(|j| p.col(j)).collect();
            return (q.pullback(&cols).unwrap(), p);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn even_clifford_dimension(seed: u64, n in 1usize..6, f in 0usize..4) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let q = QuadraticForm::random(field(f), n, 0.6, &mut rng);
        prop_assert_eq!(even_clifford(&q).unwrap().dim(), 1 << (n - 1));
    }

    #[test]
    fn regular_even_rank_center_is_quadratic(seed: u64, m in 1usize..3, f in 1usize..4) {
        // δ = (-1)^m disc, up to squares
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let k = field(f);
        let q = QuadraticForm::random(k, 2 * m, 0.7, &mut rng);
        prop_assume!(q.radical_dim() == 0);
        let c = center(&even_clifford(&q).unwrap().algebra);
        prop_assert_eq!(c.dim, 2);
        let d = q.discriminant().unwrap().value;
        let sign = if m % 2 == 1 { k.neg(&k.one()) } else { k.one() };
        prop_assert_eq!(c.delta_class.unwrap(), k.square_class(&k.mul(&sign, &d)));
    }

    #[test]
    fn splitting_witness_verifies(seed: u64, n in 3usize..7, f in 0usize..4) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let k = field(f);
        let base = QuadraticForm::hyperbolic(k, 1)
            .direct_sum(&QuadraticForm::random(k, n - 2, 0.6, &mut rng))
            .unwrap();
        let (q, p) = disguise(&base, &mut rng);
        let mut e0 = vec![0u32; n];
        e0[0] = 1;
        let v = p.solve(&k, &e0).unwrap().unwrap();
        prop_assert!(is_regular_isotropic(&q, &v).unwrap());
        let w = split_hyperbolic(&q, &v).unwrap();
        prop_assert!(w.verify().is_ok());
        prop_assert_eq!(w.reduced.rank(), n - 2);
        prop_assert_eq!(w.reduced.radical_dim(), q.radical_dim());
    }

    #[test]
    fn pencil_discriminant_matches_members(seed: u64, n in 2usize..7, f in 1usize..4, s: u8, t: u8) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let k = field(f);
        prop_assume!(n % 2 == 0 || k.characteristic() != 2);
        let p = Pencil::new(
            QuadraticForm::random(k, n, 0.7, &mut rng),
            QuadraticForm::random(k, n, 0.7, &mut rng),
        ).unwrap();
        let a = analyze(&p).unwrap();
        let (s, t) = (k.from_int(s as i64), k.from_int(t as i64));
        prop_assert_eq!(p.member(&s, &t).discriminant().unwrap().value, a.delta.eval(&k, &s, &t));
    }

    #[test]
    fn rational_splitting_preserves_discriminant_class(seed: u64, n in 3usize..6) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let q = Rationals;
        let base = QuadraticForm::hyperbolic(q, 1)
            .direct_sum(&QuadraticForm::random(q, n - 2, 0.6, &mut rng))
            .unwrap();
        let (h, p) = disguise(&base, &mut rng);
        let mut e0 = vec![q.zero(); n];
        e0[0] = q.one();
        let v = p.solve(&q, &e0).unwrap().unwrap();
        let w = split_hyperbolic(&h, &v).unwrap();
        prop_assert!(w.verify().is_ok());
        let (d, dp) = (h.discriminant().unwrap(), w.reduced.discriminant().unwrap());
        prop_assert_eq!(d.square_class, q.square_class(&q.neg(&dp.value)));
    }
}

#[test]
fn hyperbolic_lagrangian_counts() {
    // maximal isotropic subspaces of H(m) over F_q: ∏_{i<m} (q^i + 1)
    for (p, m) in [(2u64, 1usize), (2, 2), (3, 2), (5, 2), (2, 3), (3, 3)] {
        let k = PrimeField::new(p).unwrap();
        let expected: u64 = (0..m as u32).map(|i| p.pow(i) + 1).product();
        let got = enumerate_isotropic(&QuadraticForm::hyperbolic(k, m), m - 1).unwrap().len() as u64;
        assert_eq!(got, expected, "H({m}) over F{p}");
    }
}
