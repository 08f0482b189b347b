use frontier_lp::estimators::{
    fit_fourier_estimator, fit_kernel_estimator, fit_modified_estimator, fit_partition_estimator, log_likelihood,
    solve_kernel_program, Atom, Estimate, FrontierEstimate, KernelFrontierEstimate,
};
use frontier_lp::frontier::{sample_support, FrontierFunction, Knot};
use frontier_lp::harness::{run_replications, EstimatorSpec, SimulationConfig};
use frontier_lp::kernel::{Bandwidth, Kernel, KernelFamily};
use frontier_lp::metrics::{coverage_check, l1_error, surface_integral};
use proptest::prelude::*;

fn family() -> impl Strategy<Value = KernelFamily> {
    prop::sample::select(KernelFamily::ALL.to_vec())
}

fn frontier() -> impl Strategy<Value = FrontierFunction> {
    (prop::collection::vec(0.01f64..0.99, 0..6), prop::collection::vec(0.05f64..2.0, 8)).prop_map(|(mut xs, vs)| {
        xs.sort_by(f64::total_cmp);
        xs.dedup_by(|a, b| (*a - *b).abs() < 1e-3);
        let mut knots = vec![0.0];
        knots.extend(xs);
        knots.push(1.0);
        FrontierFunction::new(knots.iter().zip(&vs).map(|(&x, &v)| Knot { x, v }).collect()).unwrap()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn frontier_stays_within_bounds_and_lipschitz(f in frontier(), a in 0.0f64..=1.0, b in 0.0f64..=1.0) {
        let (fa, fb) = (f.eval(a), f.eval(b));
        prop_assert!(fa >= f.f_min() - 1e-12 && fa <= f.f_max() + 1e-12);
        prop_assert!((fa - fb).abs() <= f.lipschitz() * (a - b).abs() + 1e-12);
    }

    #[test]
    fn samples_lie_in_the_support(f in frontier(), seed in any::<u64>()) {
        let s = sample_support(&f, 200, seed).unwrap();
        for p in s.points() {
            prop_assert!((0.0..=1.0).contains(&p.x) && p.y >= 0.0 && p.y <= f.eval(p.x));
        }
    }

    #[test]
    fn kernel_fits_cover_and_match_their_surface(
        seed in any::<u64>(), n in 1usize..80, h in 0.05f64..0.3, fam in family()
    ) {
        let f = FrontierFunction::benchmark();
        let s = sample_support(&f, n, seed).unwrap();
        let k = Kernel::new(fam);
        let fit = solve_kernel_program(&s, &k, Bandwidth::new(h).unwrap(), None).unwrap();
        prop_assert!(coverage_check(&fit.estimate, &s) <= 1e-7);
        prop_assert!((fit.estimate.total_mass() - surface_integral(&fit.estimate, 100_001)).abs() <= 1e-4);
        prop_assert!(fit.estimate.parameter_count() <= n);
        prop_assert!((fit.solution.objective - fit.estimate.total_mass()).abs() <= 1e-9 * (1.0 + fit.solution.objective));
    }

    #[test]
    fn capped_program_costs_at_least_the_free_one(
        seed in any::<u64>(), n in 10usize..100, h in 0.05f64..0.3, c in 0.5f64..3.0
    ) {
        let f = FrontierFunction::benchmark();
        let s = sample_support(&f, n, seed).unwrap();
        let k = Kernel::new(KernelFamily::Epanechnikov);
        let h = Bandwidth::new(h).unwrap();
        let free = fit_kernel_estimator(&s, &k, h).unwrap();
        if let Ok(capped) = fit_modified_estimator(&s, &k, h, c) {
            prop_assert!(capped.atoms().iter().all(|a| a.alpha <= c / n as f64 + 1e-12));
            prop_assert!(capped.total_mass() >= free.total_mass() - 1e-9 * (1.0 + free.total_mass()));
            prop_assert!(coverage_check(&capped, &s) <= 1e-7);
        }
    }

    #[test]
    fn fourier_fits_are_periodic_and_within_budget(
        seed in any::<u64>(), n in 1usize..80, m in 1usize..8, l in 0.0f64..12.0
    ) {
        let s = sample_support(&FrontierFunction::benchmark(), n, seed).unwrap();
        let e = fit_fourier_estimator(&s, m, l).unwrap();
        prop_assert!(coverage_check(&e, &s) <= 1e-7);
        prop_assert!(e.weighted_coefficient_norm() <= l / std::f64::consts::TAU + 1e-9);
        prop_assert!((e.value(0.0) - e.value(1.0)).abs() <= 1e-9);
    }
}

#[test]
fn scaling_or_adding_weight_lowers_the_likelihood() {
    let f = FrontierFunction::benchmark();
    let s = sample_support(&f, 60, 4).unwrap();
    let k = Kernel::new(KernelFamily::Biweight);
    let h = Bandwidth::new(0.1).unwrap();
    let fit = solve_kernel_program(&s, &k, h, None).unwrap();
    let xs: Vec<f64> = s.xs().collect();
    let build = |alphas: Vec<f64>| {
        let atoms = xs.iter().zip(alphas).map(|(&x, alpha)| Atom { x, alpha }).collect();
        KernelFrontierEstimate::from_atoms(k, h, atoms, None).unwrap()
    };
    let star: Vec<f64> = fit.solution.primal.iter().map(|a| a.max(0.0)).collect();
    let l_star = log_likelihood(&s, &build(star.clone()));
    assert!(l_star.is_finite());
    assert!(log_likelihood(&s, &build(star.iter().map(|a| a * 1.01).collect())) < l_star);
    let mut bumped = star.clone();
    bumped[0] += 0.01;
    assert!(log_likelihood(&s, &build(bumped)) < l_star);
    // Removing weight uncovers a point, which is not a feasible alternative.
    let shrunk = build(star.iter().map(|a| a * 0.9).collect());
    assert_eq!(log_likelihood(&s, &shrunk), f64::NEG_INFINITY);
}

#[test]
fn estimates_round_trip_through_json() {
    let f = FrontierFunction::benchmark();
    let s = sample_support(&f, 40, 2).unwrap();
    let k = Kernel::new(KernelFamily::Triangular);
    let h = Bandwidth::new(0.15).unwrap();
    let estimates: Vec<Estimate> = vec![
        fit_kernel_estimator(&s, &k, h).unwrap().into(),
        fit_modified_estimator(&s, &k, h, 2.0).unwrap().into(),
        fit_fourier_estimator(&s, 3, 4.0).unwrap().into(),
        fit_partition_estimator(&s, &k, h, 6).unwrap().into(),
    ];
    for e in estimates {
        let back = Estimate::from_json(&e.to_json().unwrap()).unwrap();
        assert_eq!(back, e);
        assert_eq!(l1_error(&back, &f, 2001).unwrap(), l1_error(&e, &f, 2001).unwrap());
    }
}

#[test]
fn reports_do_not_depend_on_thread_count() {
    let cfg = SimulationConfig::new(30, 12, EstimatorSpec::Fourier { l: 5.0, m: 3 }).with_seed(77);
    let parallel = run_replications(&cfg).unwrap();
    std::env::set_var(frontier_lp::harness::THREADS_ENV, "1");
    let serial = run_replications(&cfg).unwrap();
    std::env::remove_var(frontier_lp::harness::THREADS_ENV);
    assert_eq!(parallel, serial);
}
