//! Randomized invariants of the basis, the Hamiltonian and the reduction loop.

use hsred_core::criticality::fixed_point_drift_steps;
use hsred_core::{
    build_ladder, enumerate_sector, ground_entropy, magnetization, order_by_amplitude, run_reduction, EigenOptions,
    HalfInt, LadderConfig, ReductionOptions,
};
use proptest::prelude::*;

fn ladder() -> impl Strategy<Value = LadderConfig> {
    (1usize..=4, 0.1f64..20.0, 0.0f64..20.0, 0.0f64..20.0).prop_map(|(l, jt, jl, jc)| LadderConfig::new(l, jt, jl, jc))
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn basis_round_trips_and_stays_in_sector(l in 1usize..=6, m_off in 0i64..=12) {
        let m = (m_off % (2 * l as i64 + 1)) - l as i64;
        let basis = enumerate_sector(l, HalfInt::from_int(m)).unwrap();
        let configs = basis.configs();
        prop_assert!(configs.windows(2).all(|w| w[0] < w[1]));
        for (p, &c) in configs.iter().enumerate() {
            prop_assert_eq!(basis.index_of(c), Some(p));
            prop_assert_eq!(magnetization(c, l), HalfInt::from_int(m));
            prop_assert!(c.0 >> (2 * l) == 0);
        }
    }

    #[test]
    fn apply_is_linear_in_coupling_and_vector(
        cfg in ladder(),
        g1 in -5.0f64..5.0,
        g2 in -5.0f64..5.0,
        a in -3.0f64..3.0,
        seed in any::<u64>(),
    ) {
        let (_, ham) = build_ladder(&cfg).unwrap();
        let n = ham.dim();
        let v: Vec<f64> = (0..n).map(|i| ((seed.wrapping_add(i as u64 * 2654435761)) % 1000) as f64 / 500.0 - 1.0).collect();
        let w: Vec<f64> = (0..n).map(|i| ((seed.wrapping_mul(31).wrapping_add(i as u64 * 40503)) % 997) as f64 / 498.5 - 1.0).collect();
        let combo: Vec<f64> = v.iter().zip(&w).map(|(x, y)| a * x + y).collect();
        let lhs = ham.apply(g1 + g2, &combo).unwrap();
        let hv1 = ham.apply(g1, &v).unwrap();
        let hv2 = ham.apply(g2, &v).unwrap();
        let hw1 = ham.apply(g1, &w).unwrap();
        let hw2 = ham.apply(g2, &w).unwrap();
        for i in 0..n {
            let rhs = a * (hv1[i] + hv2[i]) + hw1[i] + hw2[i];
            prop_assert!((lhs[i] - rhs).abs() <= 1e-9 * (1.0 + rhs.abs()));
        }
    }

    #[test]
    fn operator_is_symmetric(cfg in ladder(), g in 0.1f64..10.0, seed in any::<u64>()) {
        let (_, ham) = build_ladder(&cfg).unwrap();
        let n = ham.dim();
        let u: Vec<f64> = (0..n).map(|i| ((seed ^ (i as u64 * 0x9e37_79b9)) % 2003) as f64 - 1001.0).collect();
        let v: Vec<f64> = (0..n).map(|i| ((seed.rotate_left(17) ^ (i as u64 * 0x85eb_ca6b)) % 1999) as f64 - 999.0).collect();
        let left = dot(&u, &ham.apply(g, &v).unwrap());
        let right = dot(&ham.apply(g, &u).unwrap(), &v);
        prop_assert!((left - right).abs() <= 1e-9 * (1.0 + left.abs()));
        prop_assert!(ham.h1().asymmetry() == 0.0);
    }

    #[test]
    fn restriction_is_the_principal_submatrix(cfg in ladder(), mask in any::<u64>()) {
        let (_, ham) = build_ladder(&cfg).unwrap();
        let n = ham.dim();
        let mut keep: Vec<usize> = (0..n).filter(|&i| (mask >> (i % 64)) & 1 == 1).collect();
        if keep.is_empty() {
            keep.push(0);
        }
        let sub = ham.restrict(&keep).unwrap();
        prop_assert_eq!(sub.labels(), &keep[..]);
        for (r, &kr) in keep.iter().enumerate() {
            for (c, &kc) in keep.iter().enumerate() {
                prop_assert_eq!(sub.h1().get(r, c), ham.h1().get(kr, kc));
            }
        }
        // labels compose across nested restrictions
        let inner: Vec<usize> = (0..keep.len()).step_by(2).collect();
        let nested = sub.restrict(&inner).unwrap();
        let expect: Vec<usize> = inner.iter().map(|&i| keep[i]).collect();
        prop_assert_eq!(nested.labels(), &expect[..]);
    }

    #[test]
    fn amplitude_order_is_a_sorted_permutation(v in prop::collection::vec(-1.0f64..1.0, 1..50)) {
        let order = order_by_amplitude(&v);
        let mut seen = order.clone();
        seen.sort_unstable();
        prop_assert_eq!(seen, (0..v.len()).collect::<Vec<_>>());
        for w in order.windows(2) {
            let (a, b) = (v[w[0]].abs(), v[w[1]].abs());
            prop_assert!(a > b || (a == b && w[0] < w[1]));
        }
    }

    #[test]
    fn entropy_lies_between_zero_and_uniform(v in prop::collection::vec(-1.0f64..1.0, 1..64), l in 1usize..=9) {
        let norm = dot(&v, &v).sqrt();
        prop_assume!(norm > 1e-3);
        let unit: Vec<f64> = v.iter().map(|x| x / norm).collect();
        let s = ground_entropy(&unit, l).unwrap();
        prop_assert!(s >= -1e-15);
        prop_assert!(s <= (unit.len() as f64).ln() / (2.0 * l as f64) + 1e-12);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn reduction_invariants_hold_on_small_ladders(
        jt in 1.0f64..20.0,
        jl in 0.0f64..15.0,
        jc in 0.0f64..15.0,
        l in 3usize..=4,
    ) {
        let cfg = LadderConfig::new(l, jt, jl, jc);
        let eopts = EigenOptions::default();
        let ropts = ReductionOptions { n_min: 5, p_max: f64::INFINITY, ..ReductionOptions::default() };
        let traj = run_reduction(&cfg, &eopts, &ropts).unwrap();
        let lambda1 = traj.lambda1();
        let first = &traj.steps[0];
        prop_assert_eq!(first.g, jt);
        prop_assert_eq!(first.p[0], 0.0);
        let mut prev_g = first.g;
        let mut prev_n = first.n;
        for s in &traj.steps {
            prop_assert!((s.lambdas[0] - lambda1).abs() <= 1e-10 * lambda1.abs());
            prop_assert!(s.entropy >= 0.0 && s.entropy <= (s.n as f64).ln() / (2.0 * l as f64) + 1e-12);
            prop_assert!(s.n <= prev_n);
            // with H0 = 0, interlacing makes the renormalized coupling non-decreasing
            prop_assert!(s.g >= prev_g * (1.0 - 1e-12));
            prev_g = s.g;
            prev_n = s.n;
        }
        prop_assert_eq!(traj.steps.last().unwrap().n, 5);
        let drift = fixed_point_drift_steps(&traj.steps, 5).unwrap();
        prop_assert!(drift.drift >= 0.0);
    }
}
