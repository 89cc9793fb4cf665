use proptest::prelude::*;

use ewunfold::bounds::{bound_constants, BoundInputs};
use ewunfold::linalg::{ComplexVector, RealMatrix, C64};
use ewunfold::unroll::{network_output, t_phi, unroll};
use ewunfold::{ClipRadius, MeasurementEnsemble, Nonlinearity, PseudoHuber, Regularizer, SeededRng, UnitaryMatrix, UnrollConfig};

fn complex() -> impl Strategy<Value = C64> {
    (-50.0..50.0f64, -50.0..50.0f64).prop_map(|(re, im)| C64::new(re, im))
}

fn delta() -> impl Strategy<Value = f64> {
    (-3.0..2.0f64).prop_map(|e| 10f64.powf(e))
}

proptest! {
    #[test]
    fn huber_prox_is_firmly_nonexpansive(a in complex(), b in complex(), d in delta()) {
        let h = PseudoHuber::new(d).unwrap();
        let (pa, pb) = (h.prox(a), h.prox(b));
        let inner = ((pa - pb).conj() * (a - b)).re;
        prop_assert!((pa - pb).norm_sqr() <= inner + 1e-10 * (1.0 + (a - b).norm_sqr()));
    }

    #[test]
    fn huber_moreau_split(z in complex(), d in delta()) {
        let h = PseudoHuber::new(d).unwrap();
        prop_assert!((h.prox(z) + h.prox_conjugate(z) - z).norm() <= 1e-12 * (1.0 + z.norm()));
        prop_assert!(h.prox(z).norm() < d);
    }

    #[test]
    fn transform_round_trips(i in 0.0..1e4f64, d in delta()) {
        let h = PseudoHuber::new(d).unwrap();
        let back = h.inverse_transform(h.transform(i));
        prop_assert!((back - i).abs() <= 1e-9 * (1.0 + i));
    }

    #[test]
    fn clip_lands_in_ball(seed in any::<u64>(), n in 1usize..10, c in 0.01..10.0f64) {
        let mut rng = SeededRng::new(seed);
        let x = rng.complex_gaussian_vector(n) * C64::new(10.0, 0.0);
        let y = ClipRadius::uniform(c).unwrap().clip(&x);
        prop_assert!(y.norm() <= c * (1.0 + 1e-12));
        if x.norm() <= c {
            prop_assert_eq!(y, x);
        }
    }

    #[test]
    fn l1_prox_shrinks_toward_zero(seed in any::<u64>(), n in 1usize..10, lambda in 0.0..3.0f64, t in 0.01..2.0f64) {
        let mut rng = SeededRng::new(seed);
        let z = rng.complex_gaussian_vector(n);
        let p = Regularizer::l1(lambda).unwrap().prox(t, &z).unwrap();
        for (pi, zi) in p.iter().zip(z.iter()) {
            prop_assert!(pi.norm() <= zi.norm() + 1e-15);
            prop_assert!((pi.norm() - (zi.norm() - t * lambda).max(0.0)).abs() <= 1e-12);
        }
    }

    #[test]
    fn dictionary_operator_norm_is_ensemble_norm(seed in any::<u64>(), n in 1usize..8, k in 1usize..4) {
        let mut rng = SeededRng::new(seed);
        let e = MeasurementEnsemble::random(&mut rng, n, k).unwrap();
        let phi = UnitaryMatrix::random(&mut rng, n).unwrap();
        let z = rng.complex_gaussian_vector(n);
        let op = e.with_dictionary(&phi).unwrap();
        let lhs = op.apply(&z).unwrap().norm();
        let rhs = e.apply(&(phi.matrix() * &z)).unwrap().norm();
        prop_assert!((lhs - rhs).abs() <= 1e-10 * (1.0 + rhs));
        prop_assert!(lhs <= e.norm() * z.norm() * (1.0 + 1e-12));
    }

    #[test]
    fn t_map_is_firmly_nonexpansive(seed in any::<u64>(), n in 1usize..8, k in 1usize..4, d in delta(), frac in 0.01..1.0f64) {
        let mut rng = SeededRng::new(seed);
        let e = MeasurementEnsemble::random(&mut rng, n, k).unwrap();
        let phi = UnitaryMatrix::random(&mut rng, n).unwrap();
        let op = e.with_dictionary(&phi).unwrap();
        let nl = Nonlinearity::pseudo_huber(d).unwrap();
        let tau = C64::new(frac * e.max_step(), 0.0);
        let z1: ComplexVector = rng.complex_gaussian_vector(n);
        let z2: ComplexVector = rng.complex_gaussian_vector(n);
        let t1 = t_phi(&op, &z1, &nl).unwrap() * tau;
        let t2 = t_phi(&op, &z2, &nl).unwrap() * tau;
        let lhs = (&t1 - &t2).norm_squared() + ((&z1 - &t1) - (&z2 - &t2)).norm_squared();
        prop_assert!(lhs <= (&z1 - &z2).norm_squared() * (1.0 + 1e-10) + 1e-14);
    }

    #[test]
    fn k_constant_grows_with_depth(n in 1usize..10, k in 1usize..4, m in 1usize..20, g_inf in 0.0..5.0f64, d in delta(), depth in 1usize..30) {
        let inputs = |l: usize| BoundInputs {
            n,
            k,
            m,
            norm_a: 1.0,
            g_inf,
            taus: vec![0.5 * (n * k) as f64; l],
            nonlin: Nonlinearity::pseudo_huber(d).unwrap(),
            c_in: 1.0,
            c_out: 1.0,
            alpha: 0.05,
        };
        let short = bound_constants(&inputs(depth)).unwrap();
        let long = bound_constants(&inputs(depth + 1)).unwrap();
        prop_assert!(long.log_k_l >= short.log_k_l);
        prop_assert!(long.m_l >= short.m_l);
        prop_assert!(short.gamma >= 1.0);
    }

    #[test]
    fn unroll_is_deterministic_and_clipped(seed in any::<u64>(), n in 1usize..6, m in 1usize..4, depth in 0usize..6) {
        let mut rng = SeededRng::new(seed);
        let e = MeasurementEnsemble::random(&mut rng, n, 2).unwrap();
        let phi = UnitaryMatrix::random(&mut rng, n).unwrap();
        let g = RealMatrix::from_fn(e.rows(), m, |_, _| rng.uniform(0.0, 2.0));
        let mut cfg = UnrollConfig::constant(&e, depth, 0.9, Nonlinearity::pseudo_huber(0.1).unwrap());
        cfg.clip = ClipRadius::new(1.0, 0.5).unwrap();
        let a = unroll(&e, &phi, &g, &cfg).unwrap();
        let b = unroll(&e, &phi, &g, &cfg).unwrap();
        prop_assert_eq!(&a.codes, &b.codes);
        let psi = UnitaryMatrix::random(&mut rng, n).unwrap();
        let out = network_output(&e, &psi, &phi, &g, &cfg).unwrap();
        for col in out.column_iter() {
            prop_assert!(col.norm() <= 0.5 * (1.0 + 1e-12));
        }
    }
}
