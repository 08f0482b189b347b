//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any
//! failure. Every tolerance, seed and replication count is fixed here.
//!
//! Table replications use the gaussian kernel (see the README for why);
//! everything else uses the library defaults unless stated.

mod common;

use std::time::Instant;

use frontier_lp::estimators::{
    build_fourier_lp, default_c_alpha, fit_fourier_estimator, fit_partition_estimator, log_likelihood,
    solve_kernel_program, Atom, FourierFrontierEstimate, FrontierEstimate, KernelFrontierEstimate,
};
use frontier_lp::frontier::{sample_support, FrontierFunction, Sample};
use frontier_lp::harness::{
    rate_experiment, run_replications, EstimatorSpec, HRule, RateEstimator, RateSpec, SimulationConfig,
    SimulationReport,
};
use frontier_lp::kernel::{Bandwidth, Kernel, KernelFamily};
use frontier_lp::lp::{brute_force_lp, certificate, solve_lp, LinearProgram, LpSolution, LpStatus};
use frontier_lp::metrics::{coverage_check, surface_integral, DEFAULT_GRID};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const MASTER_SEED: u64 = 1;
const TABLE_KERNEL: KernelFamily = KernelFamily::Gaussian;

const COVERAGE_TOL: f64 = 1e-7;
const ORACLE_OBJ_TOL: f64 = 1e-8;
const DUALITY_TOL: f64 = 1e-8;
const SURFACE_TOL: f64 = 1e-4;
const SURFACE_GRID: usize = 200_001;
const LIKELIHOOD_SUM_TOL: f64 = 1e-9;
const CAP_TOL: f64 = 1e-12;
/// Floating slack when comparing the capped and uncapped optima.
const OBJECTIVE_ORDER_TOL: f64 = 1e-9;
const BUDGET_TOL: f64 = 1e-9;
const PERIODICITY_TOL: f64 = 1e-9;

struct Line {
    id: usize,
    name: &'static str,
    passed: bool,
    detail: String,
}

/// Worst relative duality gap and complementarity seen over all certified solves.
#[derive(Default)]
struct DualityLog {
    solves: usize,
    worst_gap: f64,
    worst_comp: f64,
    worst_primal: f64,
    errors: Vec<String>,
}

impl DualityLog {
    fn record(&mut self, p: &LinearProgram, s: &LpSolution, what: &str) {
        if !s.is_optimal() {
            return;
        }
        match certificate(s, p) {
            Ok(c) => {
                let scale = 1.0 + s.objective.abs();
                self.solves += 1;
                self.worst_gap = self.worst_gap.max(c.gap / scale);
                self.worst_comp = self.worst_comp.max(c.complementarity / scale);
                self.worst_primal = self.worst_primal.max(c.primal_residual);
            }
            Err(e) => self.errors.push(format!("{what}: {e}")),
        }
    }
}

fn table_config(n: usize, reps: usize, estimator: EstimatorSpec) -> SimulationConfig {
    SimulationConfig::new(n, reps, estimator)
        .with_kernel(TABLE_KERNEL)
        .with_seed(MASTER_SEED)
}

fn within(value: f64, target: f64, tol: f64) -> bool {
    (value - target).abs() <= tol
}

fn table_line(id: usize, name: &'static str, r: &SimulationReport, delta: (f64, f64), np: (f64, f64)) -> Line {
    let passed = r.failures == 0 && within(r.mean_delta, delta.0, delta.1) && within(r.mean_np, np.0, np.1);
    Line {
        id,
        name,
        passed,
        detail: format!(
            "mean(Δ_N)={:.4} (target {} ± {}), mean(np)={:.3} (target {} ± {}), st-dev(Δ_N)={:.4}, st-dev(np)={:.3}, reps={}, failures={}",
            r.mean_delta, delta.0, delta.1, r.mean_np, np.0, np.1, r.std_delta, r.std_np, r.successes + r.failures, r.failures
        ),
    }
}

fn kernel_row(id: usize, name: &'static str, n: usize, h: f64, reps: usize, delta: (f64, f64), np: (f64, f64)) -> Line {
    match run_replications(&table_config(n, reps, EstimatorSpec::Kernel { h })) {
        Ok(r) => table_line(id, name, &r, delta, np),
        Err(e) => failed(id, name, e),
    }
}

fn failed(id: usize, name: &'static str, e: impl std::fmt::Display) -> Line {
    Line {
        id,
        name,
        passed: false,
        detail: format!("error: {e}"),
    }
}

fn u_shape(n: usize, reps: usize, hs: &[f64]) -> Result<(bool, String), frontier_lp::Error> {
    let mut means = Vec::new();
    for &h in hs {
        means.push(run_replications(&table_config(n, reps, EstimatorSpec::Kernel { h }))?.mean_delta);
    }
    let argmin = (0..means.len())
        .min_by(|&a, &b| means[a].total_cmp(&means[b]))
        .unwrap();
    let interior = argmin > 0 && argmin + 1 < means.len();
    let listing: Vec<String> = hs.iter().zip(&means).map(|(h, m)| format!("{h:.2}:{m:.4}")).collect();
    Ok((interior, format!("N={n} [{}] argmin h={:.2}", listing.join(" "), hs[argmin])))
}

fn random_sample(rng: &mut ChaCha8Rng, f: &FrontierFunction, n_lo: usize, n_hi: usize) -> Sample {
    let n = rng.gen_range(n_lo..=n_hi);
    sample_support(f, n, rng.gen()).expect("sampling the benchmark frontier")
}

fn random_family(rng: &mut ChaCha8Rng, finite_only: bool) -> KernelFamily {
    let pool: &[KernelFamily] = if finite_only {
        &[KernelFamily::Epanechnikov, KernelFamily::Triangular, KernelFamily::Biweight]
    } else {
        &KernelFamily::ALL
    };
    pool[rng.gen_range(0..pool.len())]
}

fn main() {
    let start = Instant::now();
    let f = FrontierFunction::benchmark();
    let mut lines = Vec::new();
    let mut duality = DualityLog::default();

    // 1-3: error tables.
    lines.push(kernel_row(1, "kernel estimator, N=25, h=0.14", 25, 0.14, 300, (0.112, 0.020), (3.84, 1.0)));
    lines.push(
        match run_replications(&table_config(25, 300, EstimatorSpec::Fourier { l: 5.0, m: 4 })) {
            Ok(r) => table_line(2, "Fourier estimator, N=25, L=5, M=4", &r, (0.119, 0.020), (5.5, 1.2)),
            Err(e) => failed(2, "Fourier estimator, N=25, L=5, M=4", e),
        },
    );
    lines.push(kernel_row(3, "kernel estimator, N=100, h=0.09", 100, 0.09, 100, (0.060, 0.015), (7.35, 1.5)));

    // 4: U-shape over the bandwidth grids.
    {
        let name = "error is U-shaped in h (interior minimum)";
        let a = u_shape(25, 300, &[0.10, 0.12, 0.14, 0.16, 0.18, 0.20]);
        let b = u_shape(100, 100, &[0.05, 0.07, 0.09, 0.11, 0.13, 0.15]);
        lines.push(match (a, b) {
            (Ok((pa, da)), Ok((pb, db))) => Line {
                id: 4,
                name,
                passed: pa && pb,
                detail: format!("{da}; {db}"),
            },
            (Err(e), _) | (_, Err(e)) => failed(4, name, e),
        });
    }

    // 5: convergence trend of the capped estimator.
    {
        let name = "capped estimator error decays at the (log N/N)^(1/3) rate";
        let spec = RateSpec {
            frontier: f.clone(),
            n_grid: vec![50, 100, 200, 400, 800],
            h_rule: HRule::Third,
            estimator: RateEstimator::Modified { c_alpha: Some(1.0) },
            kernel: KernelFamily::Epanechnikov,
            replications: 50,
            master_seed: MASTER_SEED,
            grid: DEFAULT_GRID,
        };
        lines.push(match rate_experiment(&spec) {
            Ok(exp) => {
                let cells: Vec<String> = exp
                    .cells
                    .iter()
                    .map(|c| format!("N={}:{:.4}({} failed)", c.n, c.mean_error, c.failures))
                    .collect();
                Line {
                    id: 5,
                    name,
                    passed: exp.inversions <= 1 && (0.5..=1.5).contains(&exp.slope) && exp.cells.iter().all(|c| !c.failed()),
                    detail: format!(
                        "{}; inversions={} (max 1), slope={:.3} (within [0.5, 1.5])",
                        cells.join(" "),
                        exp.inversions,
                        exp.slope
                    ),
                }
            }
            Err(e) => failed(5, name, e),
        });
    }

    // 6: simplex against vertex enumeration.
    {
        let mut rng = ChaCha8Rng::seed_from_u64(MASTER_SEED ^ 6);
        let (mut status_ok, mut obj_ok, mut worst) = (0, 0, 0.0f64);
        let mut counts = [0usize; 3];
        let mut problems = Vec::new();
        const PROGRAMS: usize = 100;
        for i in 0..PROGRAMS {
            let p = common::random_program(&mut rng, 6, 6);
            let (a, b) = match (solve_lp(&p), brute_force_lp(&p)) {
                (Ok(a), Ok(b)) => (a, b),
                (Err(e), _) | (_, Err(e)) => {
                    problems.push(format!("#{i}: {e}"));
                    continue;
                }
            };
            duality.record(&p, &a, "random program");
            counts[match b.status {
                LpStatus::Optimal => 0,
                LpStatus::Infeasible => 1,
                LpStatus::Unbounded => 2,
            }] += 1;
            if a.status == b.status {
                status_ok += 1;
                if a.status != LpStatus::Optimal {
                    obj_ok += 1;
                } else {
                    let d = (a.objective - b.objective).abs();
                    worst = worst.max(d);
                    if d <= ORACLE_OBJ_TOL {
                        obj_ok += 1;
                    } else {
                        problems.push(format!("#{i}: objective {} vs {}", a.objective, b.objective));
                    }
                }
            } else {
                problems.push(format!("#{i}: status {:?} vs oracle {:?}", a.status, b.status));
            }
        }
        lines.push(Line {
            id: 6,
            name: "simplex agrees with vertex enumeration",
            passed: status_ok == PROGRAMS && obj_ok == PROGRAMS,
            detail: format!(
                "{PROGRAMS} programs (optimal {}, infeasible {}, unbounded {}): status agreement {status_ok}/{PROGRAMS}, objective within {ORACLE_OBJ_TOL:e}: {obj_ok}/{PROGRAMS}, worst |ΔJ|={worst:.2e}{}",
                counts[0],
                counts[1],
                counts[2],
                if problems.is_empty() { String::new() } else { format!("; {}", problems.join(", ")) }
            ),
        });
    }

    // 8 and 12: coverage over randomized fits of every type; Fourier budget and periodicity.
    let mut fourier_fits: Vec<(FourierFrontierEstimate, f64)> = Vec::new();
    {
        let mut rng = ChaCha8Rng::seed_from_u64(MASTER_SEED ^ 8);
        const FITS: usize = 1000;
        let mut by_type = [0usize; 4];
        let mut infeasible_capped = 0;
        let mut worst = f64::NEG_INFINITY;
        let mut errors = Vec::new();
        for i in 0..FITS {
            let s = random_sample(&mut rng, &f, 5, 200);
            let h = Bandwidth::new(rng.gen_range(0.05..=0.3)).unwrap();
            let kind = rng.gen_range(0..4);
            by_type[kind] += 1;
            let covering: Option<Box<dyn FrontierEstimate>> = match kind {
                0 | 1 => {
                    let k = Kernel::new(random_family(&mut rng, kind == 1));
                    let cap = (kind == 1).then(|| default_c_alpha(&s) * rng.gen_range(1.0..3.0) / s.len() as f64);
                    match solve_kernel_program(&s, &k, h, cap) {
                        Ok(fit) => {
                            duality.record(&fit.program, &fit.solution, "kernel fit");
                            Some(Box::new(fit.estimate))
                        }
                        Err(frontier_lp::Error::Infeasible(_)) if kind == 1 => {
                            infeasible_capped += 1;
                            None
                        }
                        Err(e) => {
                            errors.push(format!("#{i}: {e}"));
                            None
                        }
                    }
                }
                2 => {
                    let m = rng.gen_range(1..=8);
                    let l = rng.gen_range(0.0..=12.0);
                    let program = build_fourier_lp(&s, m, l).unwrap();
                    match (solve_lp(&program), fit_fourier_estimator(&s, m, l)) {
                        (Ok(sol), Ok(e)) => {
                            duality.record(&program, &sol, "Fourier fit");
                            fourier_fits.push((e.clone(), l));
                            Some(Box::new(e))
                        }
                        (Err(e), _) | (_, Err(e)) => {
                            errors.push(format!("#{i}: {e}"));
                            None
                        }
                    }
                }
                _ => {
                    let slices = rng.gen_range(1..=20);
                    let k = Kernel::new(random_family(&mut rng, false));
                    if let Err(e) = fit_partition_estimator(&s, &k, h, slices) {
                        errors.push(format!("#{i}: {e}"));
                    }
                    None
                }
            };
            if let Some(e) = covering {
                worst = worst.max(coverage_check(e.as_ref(), &s));
            }
        }
        lines.push(Line {
            id: 8,
            name: "fits cover every sample point",
            passed: errors.is_empty() && worst <= COVERAGE_TOL,
            detail: format!(
                "{FITS} fits (kernel {}, capped {} of which {infeasible_capped} infeasible, Fourier {}, partition {}): max(Y_i - f̂(X_i))={worst:.2e} (limit {COVERAGE_TOL:e}){}",
                by_type[0],
                by_type[1],
                by_type[2],
                by_type[3],
                if errors.is_empty() { String::new() } else { format!("; errors: {}", errors.join(", ")) }
            ),
        });
    }

    // 9: surface identity.
    {
        let mut rng = ChaCha8Rng::seed_from_u64(MASTER_SEED ^ 9);
        const FITS: usize = 100;
        let mut worst = 0.0f64;
        let mut errors = Vec::new();
        for i in 0..FITS {
            let s = random_sample(&mut rng, &f, 5, 200);
            let h = Bandwidth::new(rng.gen_range(0.05..=0.3)).unwrap();
            let k = Kernel::new(random_family(&mut rng, false));
            match solve_kernel_program(&s, &k, h, None) {
                Ok(fit) => {
                    duality.record(&fit.program, &fit.solution, "kernel fit");
                    let d = (fit.estimate.total_mass() - surface_integral(&fit.estimate, SURFACE_GRID)).abs();
                    worst = worst.max(d);
                }
                Err(e) => errors.push(format!("#{i}: {e}")),
            }
        }
        lines.push(Line {
            id: 9,
            name: "sum of weights equals the integral of the estimate",
            passed: errors.is_empty() && worst <= SURFACE_TOL,
            detail: format!(
                "{FITS} kernel fits: max |Σα - ∫f̂|={worst:.2e} (limit {SURFACE_TOL:e}, {SURFACE_GRID} quadrature nodes){}",
                if errors.is_empty() { String::new() } else { format!("; errors: {}", errors.join(", ")) }
            ),
        });
    }

    // 10: the LP optimum maximizes the likelihood among covering weights.
    {
        let mut rng = ChaCha8Rng::seed_from_u64(MASTER_SEED ^ 10);
        const FITS: usize = 50;
        const ALTERNATIVES: usize = 100;
        let mut violations = Vec::new();
        let mut equal_cases = 0;
        let mut compared = 0;
        for i in 0..FITS {
            let s = random_sample(&mut rng, &f, 5, 200);
            let h = Bandwidth::new(rng.gen_range(0.05..=0.3)).unwrap();
            let k = Kernel::new(random_family(&mut rng, false));
            let fit = match solve_kernel_program(&s, &k, h, None) {
                Ok(fit) => fit,
                Err(e) => {
                    violations.push(format!("fit #{i}: {e}"));
                    continue;
                }
            };
            duality.record(&fit.program, &fit.solution, "kernel fit");
            let xs: Vec<f64> = s.xs().collect();
            let star: Vec<f64> = fit.solution.primal.iter().map(|a| a.max(0.0)).collect();
            let build = |alphas: &[f64]| {
                let atoms = xs.iter().zip(alphas).map(|(&x, &alpha)| Atom { x, alpha }).collect();
                KernelFrontierEstimate::from_atoms(k, h, atoms, None).unwrap()
            };
            let e_star = build(&star);
            let l_star = log_likelihood(&s, &e_star);
            if !l_star.is_finite() {
                violations.push(format!("fit #{i}: optimum has likelihood {l_star}"));
                continue;
            }
            for j in 0..ALTERNATIVES {
                let alt: Vec<f64> = match j % 20 {
                    // The optimum itself: equal likelihood and equal mass.
                    0 => star.clone(),
                    1..=9 => {
                        let c = 1.0 + rng.gen_range(1e-6..1.0);
                        star.iter().map(|a| a * c).collect()
                    }
                    _ => star
                        .iter()
                        .map(|a| if rng.gen_bool(0.3) { a + rng.gen_range(1e-6..0.05) } else { *a })
                        .collect(),
                };
                let e_alt = build(&alt);
                let l_alt = log_likelihood(&s, &e_alt);
                compared += 1;
                let tie = (l_alt - l_star).abs() <= 1e-12 * (1.0 + l_star.abs());
                let mass_gap = (e_alt.total_mass() - e_star.total_mass()).abs();
                if l_alt > l_star && !tie {
                    violations.push(format!("fit #{i} alt #{j}: L(α')={l_alt} > L(α*)={l_star}"));
                } else if tie {
                    equal_cases += 1;
                    if mass_gap > LIKELIHOOD_SUM_TOL {
                        violations.push(format!("fit #{i} alt #{j}: equal likelihood but |ΔΣα|={mass_gap:.2e}"));
                    }
                }
            }
        }
        lines.push(Line {
            id: 10,
            name: "LP optimum maximizes the likelihood",
            passed: violations.is_empty() && compared == FITS * ALTERNATIVES,
            detail: format!(
                "{FITS} fits x {ALTERNATIVES} covering alternatives: {compared} compared, {equal_cases} ties (all with |ΔΣα| ≤ {LIKELIHOOD_SUM_TOL:e}), {} violations{}",
                violations.len(),
                if violations.is_empty() { String::new() } else { format!(": {}", violations.iter().take(5).cloned().collect::<Vec<_>>().join(", ")) }
            ),
        });
    }

    // 11: capped fits respect the cap and cost at least as much as uncapped ones.
    {
        let mut rng = ChaCha8Rng::seed_from_u64(MASTER_SEED ^ 11);
        const FITS: usize = 100;
        let (mut feasible, mut infeasible) = (0, 0);
        let mut worst_cap = f64::NEG_INFINITY;
        let mut worst_order = f64::NEG_INFINITY;
        let mut errors = Vec::new();
        for i in 0..FITS {
            let s = random_sample(&mut rng, &f, 10, 200);
            let h = Bandwidth::new(rng.gen_range(0.05..=0.3)).unwrap();
            let k = Kernel::new(random_family(&mut rng, true));
            let c_alpha = rng.gen_range(0.5..=3.0);
            let cap = c_alpha / s.len() as f64;
            let free = match solve_kernel_program(&s, &k, h, None) {
                Ok(fit) => fit,
                Err(e) => {
                    errors.push(format!("#{i}: {e}"));
                    continue;
                }
            };
            duality.record(&free.program, &free.solution, "kernel fit");
            match solve_kernel_program(&s, &k, h, Some(cap)) {
                Ok(capped) => {
                    feasible += 1;
                    duality.record(&capped.program, &capped.solution, "capped fit");
                    let over = capped.solution.primal.iter().map(|a| a - cap).fold(f64::NEG_INFINITY, f64::max);
                    worst_cap = worst_cap.max(over);
                    let j_p = free.solution.objective;
                    let shortfall = (j_p - capped.solution.objective) / (1.0 + j_p.abs());
                    worst_order = worst_order.max(shortfall);
                }
                Err(frontier_lp::Error::Infeasible(_)) => infeasible += 1,
                Err(e) => errors.push(format!("#{i}: {e}")),
            }
        }
        lines.push(Line {
            id: 11,
            name: "capped weights stay below C_alpha/N and J*_MP >= J*_P",
            passed: errors.is_empty() && feasible > 0 && worst_cap <= CAP_TOL && worst_order <= OBJECTIVE_ORDER_TOL,
            detail: format!(
                "{FITS} inputs ({feasible} feasible, {infeasible} infeasible): max(α_i - C_α/N)={worst_cap:.2e} (limit {CAP_TOL:e}), max (J*_P - J*_MP)/(1+|J*_P|)={worst_order:.2e} (limit {OBJECTIVE_ORDER_TOL:e}){}",
                if errors.is_empty() { String::new() } else { format!("; errors: {}", errors.join(", ")) }
            ),
        });
    }

    // 12: Fourier fits from criterion 8.
    {
        let mut worst_budget = f64::NEG_INFINITY;
        let mut worst_period = 0.0f64;
        for (e, l) in &fourier_fits {
            worst_budget = worst_budget.max(e.weighted_coefficient_norm() - l / std::f64::consts::TAU);
            worst_period = worst_period.max((e.value(0.0) - e.value(1.0)).abs());
        }
        lines.push(Line {
            id: 12,
            name: "Fourier fits respect the Lipschitz budget and are periodic",
            passed: !fourier_fits.is_empty() && worst_budget <= BUDGET_TOL && worst_period <= PERIODICITY_TOL,
            detail: format!(
                "{} fits: max(Σk(|a_k|+|b_k|) - L/2π)={worst_budget:.2e} (limit {BUDGET_TOL:e}), max |ĝ(0)-ĝ(1)|={worst_period:.2e} (limit {PERIODICITY_TOL:e})",
                fourier_fits.len()
            ),
        });
    }

    // 7: duality over every certified solve above.
    lines.push(Line {
        id: 7,
        name: "optimal solves satisfy strong duality and complementary slackness",
        passed: duality.errors.is_empty() && duality.solves > 0 && duality.worst_gap <= DUALITY_TOL && duality.worst_comp <= DUALITY_TOL,
        detail: format!(
            "{} optimal solves (random programs and every fit in criteria 8-11): max gap/(1+|J*|)={:.2e}, max complementarity/(1+|J*|)={:.2e} (limits {DUALITY_TOL:e}), max primal residual={:.2e}{}",
            duality.solves,
            duality.worst_gap,
            duality.worst_comp,
            duality.worst_primal,
            if duality.errors.is_empty() { String::new() } else { format!("; errors: {}", duality.errors.join(", ")) }
        ),
    });

    lines.sort_by_key(|l| l.id);
    let failures = lines.iter().filter(|l| !l.passed).count();
    for l in &lines {
        println!("{} [{:>2}] {}: {}", if l.passed { "PASS" } else { "FAIL" }, l.id, l.name, l.detail);
    }
    println!(
        "acceptance: {} passed, {} failed ({:.1} s)",
        lines.len() - failures,
        failures,
        start.elapsed().as_secs_f64()
    );
    if failures > 0 {
        std::process::exit(1);
    }
}
