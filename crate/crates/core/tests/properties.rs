mod common;

use common::close;
use proptest::prelude::*;
use tropical_core::oracle::{boolean_power_reach, brute_force_lambda};
use tropical_core::{
    column_periodicity, critical_structure, csr_build, csr_rotate, is_orbit_periodic, kleene_star,
    max_cycle_mean_of, orbit_growth_rate, pair_periodicity, simulate_orbit, Block,
    CriticalSelection, Error, TropicalMatrix, TropicalVector, ZERO,
};

fn entry() -> impl Strategy<Value = f64> {
    prop_oneof![Just(ZERO), (-9i32..=3).prop_map(f64::from)]
}

fn matrix(lo: usize, hi: usize) -> impl Strategy<Value = TropicalMatrix> {
    (lo..=hi).prop_flat_map(|n| {
        prop::collection::vec(entry(), n * n)
            .prop_map(move |v| TropicalMatrix::from_fn(n, |i, j| v[i * n + j]))
    })
}

fn cyclic(lo: usize, hi: usize) -> impl Strategy<Value = TropicalMatrix> {
    matrix(lo, hi).prop_filter("needs a cycle", |a| max_cycle_mean_of(a).is_finite())
}

fn gamma_u(a: &TropicalMatrix) -> usize {
    critical_structure(a).map_or(1, |cs| cs.ultimate_cyclicity())
}

fn horizon(a: &TropicalMatrix) -> usize {
    let n = a.dim();
    6 * n * n + 2 * gamma_u(a)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn karp_matches_cycle_enumeration(a in matrix(1, 7)) {
        let karp = max_cycle_mean_of(&a);
        let brute = brute_force_lambda(&a);
        prop_assert!(karp == brute || (karp - brute).abs() < 1e-9);
    }

    #[test]
    fn star_is_a_finite_power_sum(a in cyclic(1, 7)) {
        let d = a.scale(-max_cycle_mean_of(&a));
        let star = kleene_star(&d).unwrap();
        let mut sum = TropicalMatrix::identity(d.dim());
        let mut p = TropicalMatrix::identity(d.dim());
        for _ in 1..d.dim() {
            p = p.otimes(&d).unwrap();
            sum = sum.oplus(&p).unwrap();
        }
        prop_assert!(close(&star, &sum));
    }

    #[test]
    fn positive_cycles_diverge(a in cyclic(1, 6)) {
        let lifted = a.scale(1.0 - max_cycle_mean_of(&a));
        let diverges = matches!(kleene_star(&lifted), Err(Error::DivergentStar { .. }));
        prop_assert!(diverges);
    }

    #[test]
    fn reach_matches_power_support(a in matrix(1, 6), t in 0u64..40) {
        let p = a.pow(t);
        let reach = boolean_power_reach(&a, t);
        for (i, row) in reach.iter().enumerate() {
            for (j, &r) in row.iter().enumerate() {
                prop_assert_eq!(r, p.get(i, j).is_finite());
            }
        }
    }

    #[test]
    fn rotation_matches_powers(a in cyclic(2, 7), r in 0u64..60, dt in -30i64..30) {
        let d = a.scale(-max_cycle_mean_of(&a));
        let triple = csr_build(&d, CriticalSelection::Full).unwrap();
        let s = triple.s();
        let rows = s.pow(r).otimes(triple.r()).unwrap();
        let cols = triple.c().otimes(&s.pow(r)).unwrap();
        let to = (r as i64 + dt).rem_euclid(triple.gamma() as i64 * 8) as u64;
        let want_rows = s.pow(to).otimes(triple.r()).unwrap();
        let want_cols = triple.c().otimes(&s.pow(to)).unwrap();
        let shift = to as i64 - r as i64;
        prop_assert!(close(&csr_rotate(&triple, &rows, Block::Rows, shift).unwrap(), &want_rows));
        prop_assert!(close(&csr_rotate(&triple, &cols, Block::Columns, shift).unwrap(), &want_cols));
    }

    #[test]
    fn periodic_orbits_follow_the_growth_rate(a in matrix(1, 6), seed in any::<u64>()) {
        let report = is_orbit_periodic(&a).unwrap();
        prop_assume!(report.verdict);
        let mut rng = common::rng(seed);
        let y = common::random_vector(&mut rng, a.dim());
        let trace = simulate_orbit(&a, &y, horizon(&a)).unwrap();
        let period = trace.detected_period.expect("periodic orbit");
        prop_assert_eq!(report.gamma_u % period, 0);
        let rate = orbit_growth_rate(&a, &y).unwrap();
        let seen = trace.growth_rate.unwrap();
        prop_assert!(rate == seen || (rate - seen).abs() < 1e-9, "{} vs {}", rate, seen);
    }

    #[test]
    fn column_verdicts_match_simulation(a in cyclic(1, 6)) {
        let t_max = horizon(&a);
        for j in 0..a.dim() {
            let verdict = match column_periodicity(&a, j) {
                Ok(v) => v,
                Err(Error::TrivialColumn(_)) => continue,
                Err(e) => panic!("{e}"),
            };
            let y = TropicalVector::unit(a.dim(), j);
            let trace = simulate_orbit(&a, &y, t_max).unwrap();
            prop_assert_eq!(verdict, trace.is_linear_periodic(), "column {}", j);
        }
    }

    #[test]
    fn pair_verdicts_match_simulation(a in cyclic(2, 6)) {
        let n = a.dim();
        let t_max = horizon(&a);
        let good: Vec<usize> = (0..n)
            .filter(|&j| column_periodicity(&a, j).unwrap_or(false))
            .collect();
        for &i in &good {
            for &j in &good {
                let verdict = pair_periodicity(&a, i, j).unwrap();
                let mut y = vec![ZERO; n];
                y[i] = 0.0;
                y[j] = 0.0;
                let trace = simulate_orbit(&a, &TropicalVector::new(y).unwrap(), t_max).unwrap();
                prop_assert_eq!(verdict, trace.is_linear_periodic(), "pair ({}, {})", i, j);
            }
        }
    }
}
