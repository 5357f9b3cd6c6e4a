use proptest::prelude::*;

use badapprox::constructions::{sample_subspace, sample_theta};
use badapprox::cover::{mu_branches, profile_with, CoverParams, DecayFunction};
use badapprox::engine::{Engine, NormConvention, Record, RecordTable, Subject};
use badapprox::exponent::{estimate_exponent, Method};
use badapprox::geometry::{graph_subspace, orthonormal_subspace, select_graph_coordinates, Ambient, ThetaMatrix};
use badapprox::parallel::Execution;

fn subspace_strategy(max_d: usize) -> impl Strategy<Value = (usize, usize, u64)> {
    (2..=max_d).prop_flat_map(|d| (Just(d), 1..d, any::<u64>()))
}

fn theta_strategy() -> impl Strategy<Value = ThetaMatrix> {
    (1usize..=2, 1usize..=2, any::<u64>()).prop_map(|(r, c, s)| sample_theta(r, c, 1.0, s).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn graph_coordinates_round_trip((d, k, seed) in subspace_strategy(6)) {
        let s = sample_subspace(d, k, seed).unwrap();
        let g = select_graph_coordinates(&s);
        let back = g.subspace().unwrap();
        prop_assert!(s.max_principal_angle(&back).unwrap() <= 1e-8);
    }

    #[test]
    fn projector_properties((d, k, seed) in subspace_strategy(6)) {
        let s = sample_subspace(d, k, seed).unwrap();
        let p = s.projector();
        prop_assert!((p * p - p).abs().max() <= 1e-9);
        prop_assert!((p - p.transpose()).abs().max() <= 1e-12);
        let b = s.basis();
        prop_assert!((b.transpose() * b - nalgebra::DMatrix::identity(k, k)).abs().max() <= 1e-10);
        prop_assert!((p * b - b).abs().max() <= 1e-9);
    }

    #[test]
    fn spanning_vectors_lie_in_result(
        vectors in (2usize..=5).prop_flat_map(|d| prop::collection::vec(prop::collection::vec(-5.0f64..5.0, d), 1..d))
    ) {
        if let Ok(s) = orthonormal_subspace(&vectors) {
            for v in &vectors {
                let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
                prop_assert!(s.distance(v).unwrap() <= 1e-9 * norm);
            }
        }
    }

    #[test]
    fn distance_under_signed_permutation(
        (d, k, seed) in subspace_strategy(5),
        z in prop::collection::vec(-20.0f64..20.0, 5),
        perm_seed in any::<u64>(),
        signs in prop::collection::vec(any::<bool>(), 5),
    ) {
        let s = sample_subspace(d, k, seed).unwrap();
        let z = &z[..d];
        let mut perm: Vec<usize> = (0..d).collect();
        let mut x = perm_seed;
        for i in (1..d).rev() {
            x = x.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            perm.swap(i, (x >> 33) as usize % (i + 1));
        }
        let act = |v: &[f64]| -> Vec<f64> {
            (0..d).map(|i| if signs[i] { -v[perm[i]] } else { v[perm[i]] }).collect()
        };
        let moved = orthonormal_subspace(&(0..k).map(|j| act(&s.basis_vector(j))).collect::<Vec<_>>()).unwrap();
        let before = s.distance(z).unwrap();
        let after = moved.distance(&act(z)).unwrap();
        prop_assert!((before - after).abs() <= 1e-12 * (1.0 + before.max(z.iter().fold(0.0f64, |m, v| m.max(v.abs())))));
    }

    #[test]
    fn graph_subspace_contains_substituted_points(seed in any::<u64>(), x in prop::collection::vec(-3.0f64..3.0, 2)) {
        let a_space = sample_subspace(5, 3, seed).unwrap();
        let theta = sample_theta(1, 2, 2.0, seed ^ 1).unwrap();
        let c = graph_subspace(&theta, Ambient::Within(&a_space)).unwrap();
        prop_assert!(c.is_contained_in(&a_space, 1e-9));
        let u = [x[0], x[1], theta.get(0, 0) * x[0] + theta.get(0, 1) * x[1]];
        let b = a_space.basis();
        let point: Vec<f64> = (0..5).map(|r| (0..3).map(|k| b[(r, k)] * u[k]).sum()).collect();
        prop_assert!(c.distance(&point).unwrap() <= 1e-9);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn psi_is_monotone_and_conventions_bridge((d, k, seed) in subspace_strategy(3)) {
        let engine = Engine::default();
        let s = Subject::Subspace(sample_subspace(d, k, seed).unwrap());
        let mut last = f64::INFINITY;
        for t in 1..=40u64 {
            let inc = engine.psi(&s, t, NormConvention::Inclusive).unwrap();
            prop_assert!(inc.value <= last);
            last = inc.value;
            let strict = engine.psi(&s, t + 1, NormConvention::Strict).unwrap();
            prop_assert_eq!(strict, inc);
        }
    }

    #[test]
    fn graph_form_directional_bound(theta in theta_strategy()) {
        let engine = Engine::default();
        let (n, m) = (theta.rows(), theta.cols());
        let lattice = graph_subspace(&theta, Ambient::Full(m + n)).unwrap();
        let stretch = 1.0 + theta.max_row_abs_sum();
        let limit = if m == 2 { 60 } else { 200 };
        for t in (1..=limit).step_by(7) {
            let pt = engine.psi_theta(&theta, t).unwrap();
            let t2 = (stretch * t as f64).ceil() as u64 + 1;
            let ps = engine.psi_subspace(&lattice, t2, NormConvention::Strict).unwrap();
            prop_assert!(ps.value <= (n as f64).sqrt() * pt.value, "t = {}: {} vs {}", t, ps.value, pt.value);
        }
    }

    #[test]
    fn record_tables_are_consistent(theta in theta_strategy()) {
        let subject = Subject::Theta(theta);
        let par = Engine::default().record_table(&subject, 300, NormConvention::Inclusive).unwrap();
        let seq = Engine { execution: Execution::Sequential, ..Engine::default() }
            .record_table(&subject, 300, NormConvention::Inclusive)
            .unwrap();
        prop_assert_eq!(&par, &seq);
        for w in par.records.windows(2) {
            prop_assert!(w[0].t < w[1].t && w[0].value > w[1].value);
        }
        for r in &par.records {
            prop_assert!((subject.evaluate(&r.witness) - r.value).abs() <= 1e-9);
            prop_assert!(r.witness.iter().any(|&x| x != 0));
            prop_assert!(r.witness.iter().all(|x| x.unsigned_abs() <= r.t));
        }
    }
}

fn cover_params() -> impl Strategy<Value = CoverParams> {
    (3u32..=6).prop_flat_map(|d| (Just(d), 2..d)).prop_flat_map(|(d, a)| (Just(d), Just(a), 1..=a, 1..a))
        .prop_map(|(d, a, b, c)| CoverParams::new(a, b, c, d).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn telescoping(values in prop::collection::vec(0.0f64..1e3, 1..400)) {
        let n = values.len();
        let mu = |x: f64| if x < 1.0 { 0.0 } else { values[(x.floor() as usize).min(n) - 1] };
        let prof = profile_with(n, mu, |_| 1.0);
        let mut sum = 0.0;
        for t in 0..n {
            sum += prof.lambda[t];
            prop_assert!((sum - prof.m[t]).abs() <= 1e-12 * prof.m[t].abs().max(1.0));
        }
    }

    #[test]
    fn partial_summation(values in prop::collection::vec(0.0f64..1e3, 2..400), gamma in 0.1f64..3.0) {
        let n = values.len();
        let mu = |x: f64| if x < 1.0 { 0.0 } else { values[(x.floor() as usize).min(n) - 1] };
        let g = |t: f64| t.powf(-gamma);
        let prof = profile_with(n, mu, g);
        let mut rhs = prof.m[n - 1] * g(n as f64);
        for t in 1..n {
            rhs += prof.m[t - 1] * (g(t as f64) - g(t as f64 + 1.0));
        }
        let lhs = prof.partial_sum[n - 1];
        prop_assert!((lhs - rhs).abs() <= 1e-10 * lhs.abs().max(1e-300));
    }

    #[test]
    fn mu_branches_agree_when_phi_equals_psi(p in cover_params(), t in 1.0f64..1e6, rho in 0.01f64..1.0, gamma in 0.0f64..2.0) {
        let psi = DecayFunction::power(rho, gamma);
        let (first, second) = mu_branches(t, &p, &psi, &psi);
        prop_assert_eq!(first, second);
    }

    #[test]
    fn tail_slope_is_shift_invariant(gamma in 0.2f64..3.0, rho in 0.01f64..100.0, jitter in prop::collection::vec(-0.3f64..0.3, 30)) {
        let records: Vec<(u64, f64)> = (0..30)
            .map(|k| {
                let t = (10f64.powf(1.0 + 0.2 * k as f64)).round() as u64;
                (t, (t as f64).powf(-gamma) * jitter[k].exp())
            })
            .collect();
        let scaled: Vec<(u64, f64)> = records.iter().map(|&(t, v)| (t, rho * v)).collect();
        let a = estimate_exponent(&synthetic(&records), Method::TailSlope, None).unwrap();
        let b = estimate_exponent(&synthetic(&scaled), Method::TailSlope, None).unwrap();
        let first_t = records[records.len() - a.window].0 as f64;
        prop_assert!((a.omega_hat - b.omega_hat).abs() <= rho.ln().abs() / first_t.ln() + 1e-9);
    }

    #[test]
    fn tail_slope_recovers_power_log_exponent(gamma in 0.2f64..3.0, rho in 0.01f64..100.0, logpow in -0.5f64..0.5) {
        // geometric record times spanning [10³, 10⁹]
        let records: Vec<(u64, f64)> = (0..=30)
            .map(|k| 10f64.powf(3.0 + 0.2 * k as f64).round() as u64)
            .collect::<Vec<_>>()
            .windows(2)
            .map(|w| {
                let next = w[1] as f64;
                (w[0], rho * next.powf(-gamma) * next.ln().powf(logpow))
            })
            .collect();
        let est = estimate_exponent(&synthetic(&records), Method::TailSlope, None).unwrap();
        prop_assert!((est.omega_hat - gamma).abs() <= 0.05, "{}", est.omega_hat);
    }
}

fn synthetic(points: &[(u64, f64)]) -> RecordTable {
    RecordTable {
        subject: "synthetic".into(),
        convention: NormConvention::Inclusive,
        records: points.iter().map(|&(t, value)| Record { t, value, witness: vec![1] }).collect(),
        t_max_scanned: points.last().unwrap().0,
        contains_integer_points: false,
    }
}
