//! Property tests for the invariants of the free norm, the extension operators and λ.

mod common;

use lipext::{
    averaging_operator, build_r_lattice, default_local_operators, free_norm, free_norm_witness, hyperbolic_rho,
    hyperbolic_rho0, lipschitz_seminorm, mcshane_extend, metric_projection_extend, operator_norm, optimal_lambda,
    optimal_lambda_nonneg, projection_operator, whitney_operator, whitney_partition, ConvexBody, FiniteMetricSpace,
    HyperbolicPoint, MeasureFamily, ScalarField, SignedWeightVector, WeightMatrix,
};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use common::*;

fn instance(seed: u64, n: usize) -> (ChaCha8Rng, FiniteMetricSpace<f64>) {
    let mut r = ChaCha8Rng::seed_from_u64(seed);
    let s = random_space(&mut r, n);
    (r, s)
}

fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * a.abs().max(b.abs()).max(1.0)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn free_norm_is_a_norm(seed in any::<u64>(), n in 2usize..8, c in -4.0f64..4.0) {
        let (mut r, s) = instance(seed, n);
        let a = random_zero_sum(&mut r, n);
        let b = random_zero_sum(&mut r, n);
        let na = free_norm(&s, &SignedWeightVector::new(a.clone()).unwrap()).unwrap();
        let nb = free_norm(&s, &SignedWeightVector::new(b.clone()).unwrap()).unwrap();
        let sum: Vec<f64> = a.iter().zip(&b).map(|(x, y)| x + y).collect();
        let nsum = free_norm(&s, &SignedWeightVector::new(sum).unwrap()).unwrap();
        prop_assert!(na >= 0.0);
        prop_assert!(nsum <= na + nb + 1e-9);
        let scaled: Vec<f64> = a.iter().map(|x| c * x).collect();
        let nscaled = free_norm(&s, &SignedWeightVector::new(scaled).unwrap()).unwrap();
        prop_assert!(close(nscaled, c.abs() * na, 1e-9));
        prop_assert_eq!(free_norm(&s, &SignedWeightVector::zero(n)).unwrap(), 0.0);
    }

    #[test]
    fn free_norm_scales_with_the_metric(seed in any::<u64>(), n in 2usize..8, c in 0.1f64..10.0) {
        let (mut r, s) = instance(seed, n);
        let a = SignedWeightVector::new(random_zero_sum(&mut r, n)).unwrap();
        let base = free_norm(&s, &a).unwrap();
        prop_assert!(close(free_norm(&s.scale(c).unwrap(), &a).unwrap(), c * base, 1e-9));
    }

    #[test]
    fn witness_certifies_duality(seed in any::<u64>(), n in 2usize..8) {
        let (mut r, s) = instance(seed, n);
        let a = SignedWeightVector::new(random_zero_sum(&mut r, n)).unwrap();
        let base = r.gen_range(0..n);
        let w = free_norm_witness(&s, &a, base).unwrap();
        prop_assert!(close(w.value, free_norm(&s, &a).unwrap(), 1e-9));
        prop_assert!(close(w.dual_value, w.value, 1e-9));
        prop_assert_eq!(w.potential.get(base), 0.0);
        prop_assert!(brute_seminorm(&s, w.potential.values()) <= 1.0 + 1e-9);
        for (div, target) in w.flow.divergence().iter().zip(a.weights()) {
            prop_assert!((div - target).abs() <= 1e-9);
        }
        prop_assert!(close(w.flow.cost(&s), w.value, 1e-9));
        // every 1-Lipschitz function pairs below the norm
        for x in 0..n {
            let dist = ScalarField::distance_to(&s, x);
            prop_assert!(a.pair(dist.values()) <= w.value + 1e-9);
        }
    }

    #[test]
    fn seminorm_ignores_constants_and_scales(seed in any::<u64>(), n in 2usize..9, c in -5.0f64..5.0, t in -3.0f64..3.0) {
        let (mut r, s) = instance(seed, n);
        let f: Vec<f64> = (0..n).map(|_| r.gen_range(-4.0..4.0)).collect();
        let base = lipschitz_seminorm(&ScalarField::new(f.clone()), &s).unwrap();
        prop_assert!(close(base, brute_seminorm(&s, &f), 1e-12));
        let shifted = ScalarField::new(f.iter().map(|x| x + c).collect());
        prop_assert!(close(lipschitz_seminorm(&shifted, &s).unwrap(), base, 1e-12));
        let scaled = ScalarField::new(f.iter().map(|x| t * x).collect());
        prop_assert!(close(lipschitz_seminorm(&scaled, &s).unwrap(), t.abs() * base, 1e-12));
    }

    #[test]
    fn mcshane_is_the_largest_extension(seed in any::<u64>(), n in 2usize..10) {
        let (mut r, s) = instance(seed, n);
        let k = r.gen_range(1..=n);
        let sub = random_subset(&mut r, n, k);
        let f: Vec<f64> = (0..k).map(|_| r.gen_range(-4.0..4.0)).collect();
        let e = mcshane_extend(&s, &sub, &f).unwrap();
        for (&p, &v) in sub.iter().zip(&f) {
            prop_assert_eq!(e.get(p), v);
        }
        let l = brute_seminorm(&s.restrict(&sub).unwrap(), &f);
        prop_assert!(close(brute_seminorm(&s, e.values()), l, 1e-12));
        // any L-Lipschitz extension lies below, e.g. the lower McShane envelope
        for m in 0..n {
            let lower = sub.iter().zip(&f).map(|(&p, &v)| v - l * s.dist(m, p)).fold(f64::NEG_INFINITY, f64::max);
            prop_assert!(lower <= e.get(m) + 1e-9);
        }
    }

    #[test]
    fn linear_operators_extend(seed in any::<u64>(), n in 2usize..9) {
        let (mut r, s) = instance(seed, n);
        let k = r.gen_range(1..=n);
        let sub = random_subset(&mut r, n, k);
        let f: Vec<f64> = (0..k).map(|_| r.gen_range(-4.0..4.0)).collect();
        let ops: Vec<WeightMatrix<f64>> = vec![
            optimal_lambda(&s, &sub).unwrap().operator,
            optimal_lambda_nonneg(&s, &sub).unwrap().operator,
            averaging_operator(&s, &sub, &MeasureFamily::counting(n)).unwrap(),
        ];
        for op in &ops {
            let e = op.apply(&f).unwrap();
            for (&p, &v) in sub.iter().zip(&f) {
                prop_assert!((e.get(p) - v).abs() <= 1e-12 * v.abs().max(1.0));
            }
            // |Ef|_Lip <= |E| |f|_Lip
            if k > 1 {
                let lf = brute_seminorm(&s.restrict(&sub).unwrap(), &f);
                prop_assert!(brute_seminorm(&s, e.values()) <= operator_norm(&s, op).unwrap() * lf * (1.0 + 1e-9) + 1e-12);
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn lambda_sandwich(seed in any::<u64>(), n in 3usize..8) {
        let (mut r, s) = instance(seed, n);
        let k = r.gen_range(2..n);
        let sub = random_subset(&mut r, n, k);
        let lam = optimal_lambda(&s, &sub).unwrap();
        let nonneg = optimal_lambda_nonneg(&s, &sub).unwrap();
        let avg = averaging_operator(&s, &sub, &MeasureFamily::counting(n)).unwrap();
        prop_assert!(lam.value >= 1.0 - 1e-9);
        prop_assert!(lam.value <= nonneg.value + 1e-7);
        prop_assert!(nonneg.value <= operator_norm(&s, &avg).unwrap() + 1e-7);
        prop_assert!(nonneg.operator.min_weight() >= -1e-9);
    }

    #[test]
    fn lambda_bounded_by_whitney(seed in any::<u64>(), n in 4usize..9, radius in 0.5f64..6.0) {
        let (_, s) = instance(seed, n);
        let lattice = build_r_lattice(&s, radius).unwrap();
        if lattice.centers().len() < 2 || lattice.centers().len() == n {
            return Ok(());
        }
        let partition = whitney_partition(&s, &lattice).unwrap();
        let local = default_local_operators(&s, &partition).unwrap();
        let op = whitney_operator(&s, &partition, &local).unwrap();
        let lam = optimal_lambda(&s, lattice.centers()).unwrap();
        prop_assert!(lam.value <= operator_norm(&s, &op).unwrap() + 1e-7);
    }

    #[test]
    fn lambda_is_invariant_under_isometry(seed in any::<u64>(), n in 3usize..7, c in 0.2f64..20.0) {
        let (mut r, s) = instance(seed, n);
        let k = r.gen_range(2..n);
        let sub = random_subset(&mut r, n, k);
        let base = optimal_lambda(&s, &sub).unwrap().value;
        prop_assert!(close(optimal_lambda(&s.scale(c).unwrap(), &sub).unwrap().value, base, 1e-8));
        let mut perm: Vec<usize> = (0..n).collect();
        perm.reverse();
        let mapped: Vec<usize> = sub.iter().map(|&p| n - 1 - p).collect();
        prop_assert!(close(optimal_lambda(&s.permute(&perm).unwrap(), &mapped).unwrap().value, base, 1e-8));
    }

    #[test]
    fn lambda_is_one_when_source_is_everything(seed in any::<u64>(), n in 1usize..7) {
        let (_, s) = instance(seed, n);
        let all: Vec<usize> = (0..n).collect();
        prop_assert_eq!(optimal_lambda(&s, &all).unwrap().value, 1.0);
    }

    #[test]
    fn projection_extension_is_exact_and_nonexpansive(seed in any::<u64>(), k in 2usize..7, q in 1usize..6) {
        let mut r = ChaCha8Rng::seed_from_u64(seed);
        let body = ConvexBody::Ball { center: vec![0.0, 0.0], radius: 1.0 };
        let sample: Vec<Vec<f64>> = (0..k)
            .map(|_| {
                let (t, rad): (f64, f64) = (r.gen_range(0.0..std::f64::consts::TAU), r.gen_range(0.0..1.0));
                vec![rad * t.cos(), rad * t.sin()]
            })
            .collect();
        let queries: Vec<Vec<f64>> = (0..q).map(|_| vec![r.gen_range(-3.0..3.0), r.gen_range(-3.0..3.0)]).collect();
        let f: Vec<f64> = (0..k).map(|_| r.gen_range(-2.0..2.0)).collect();
        let direct = metric_projection_extend(&body, &sample, &f, &queries).unwrap();
        let (space, op) = projection_operator(&body, &sample, &queries).unwrap();
        let e = op.apply(&f).unwrap();
        prop_assert_eq!(&e.values()[..k], &f[..]);
        prop_assert_eq!(&e.values()[k..], &direct[..]);
        prop_assert!(op.min_weight() >= 0.0);
        prop_assert_eq!(space.len(), k + q);
    }

    #[test]
    fn half_plane_comparison(x1 in -50.0f64..50.0, y1 in -50.0f64..50.0, a in -4.0f64..4.0, b in -4.0f64..4.0) {
        let x = HyperbolicPoint::new(x1, 10f64.powf(a)).unwrap();
        let y = HyperbolicPoint::new(y1, 10f64.powf(b)).unwrap();
        let (rho, rho0) = (hyperbolic_rho(&x, &y), hyperbolic_rho0(&x, &y));
        prop_assert!(rho <= 4.0 * rho0 * (1.0 + 1e-12) + 1e-12);
        if x.euclidean_distance(&y) >= 0.5 * x.x2().min(y.x2()) {
            prop_assert!(rho >= rho0 / 8.0 * (1.0 - 1e-12));
        }
        prop_assert!(close(rho, half_plane_distance((x1, x.x2()), (y1, y.x2())), 1e-9));
    }
}
