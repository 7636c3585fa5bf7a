//! Acceptance suite: one check per criterion, one PASS/FAIL line each.
//!
//! Run with `cargo test -p reservoir-tn --test acceptance`. Every check also
//! enforces its wall-clock budget.

use std::collections::BTreeMap;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use clap::Parser;
use reservoir_tn::cli::{execute, Cli};
use reservoir_tn::estimators::{
    branch_entropy_bound, branch_weights_idealized, entropy_estimate, normalization_check, random_branches,
    renyi_bound_check, EstimateInputs, LogBase,
};
use reservoir_tn::liouville::{interaction_factorize, interaction_first_order, to_split_order, TimeGrid};
use reservoir_tn::models::{preset, random_model, DESK_SEED};
use reservoir_tn::network::{
    build_rn, coarse_grain, compress, contract_system, mutual_information, tail_cut, two_point_correlation,
    TruncationPolicy,
};
use reservoir_tn::oracle::{evolve_exact, evolve_trotter_dense, InteractionMode};
use reservoir_tn::stats::loglog_slope;
use reservoir_tn::tensor::trace_distance;
use reservoir_tn::ModelSpec;

type Check = (u32, &'static str, Duration, fn() -> Outcome);

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome { pass, detail: detail.into() }
}

fn desk() -> ModelSpec {
    random_model(DESK_SEED, 2, 4, 1)
}

fn worked_example() -> Outcome {
    let run = |base: &str| {
        let cli = Cli::try_parse_from([
            "rnet",
            "dsuff",
            "--n",
            "2",
            "--gamma",
            "1",
            "--memory-time",
            "1",
            "--tau-min",
            "0.2",
            "--log-base",
            base,
        ])
        .expect("valid arguments");
        execute(&cli.command).expect("dsuff runs")
    };
    let ten = run("10").summary["selected"]["d_suff"].as_f64().unwrap();
    let nat = run("e").summary["selected"]["d_suff"].as_f64().unwrap();
    let pass = (700.0..=1100.0).contains(&ten) && (nat / 3.41e4 - 1.0).abs() < 0.01;
    outcome(pass, format!("d_suff base 10 = {ten:.1}, natural = {nat:.4e}"))
}

fn oracle_equivalence() -> Outcome {
    let m = desk();
    let g = TimeGrid::new(0.02, 100).unwrap();
    let rn = contract_system(&build_rn(&m, &g).unwrap(), &m, &g).unwrap();
    let dense = evolve_trotter_dense(&m, &g, InteractionMode::Factorized).unwrap().trajectory;
    let err = rn.max_trace_distance(&dense).unwrap();
    outcome(err <= 1e-10, format!("max trace distance {err:.3e}"))
}

fn trotter_order() -> Outcome {
    let m = desk();
    let err = |tau: f64| {
        let g = TimeGrid::from_total(1.0, tau).unwrap();
        let exact = evolve_exact(&m, &g).unwrap().trajectory;
        let rn = contract_system(&build_rn(&m, &g).unwrap(), &m, &g).unwrap();
        trace_distance(exact.final_state(), rn.final_state()).unwrap()
    };
    let (coarse, fine) = (err(0.02), err(0.01));
    let ratio = coarse / fine;
    outcome((1.7..=2.3).contains(&ratio), format!("errors {coarse:.3e} / {fine:.3e}, ratio {ratio:.3}"))
}

fn factorization_identity() -> Outcome {
    let mut worst: f64 = 0.0;
    for seed in 0..20u64 {
        let n = 1 + (seed % 3) as usize;
        let d_r = 2 + (seed % 2) as usize;
        let m = random_model(1000 + seed, 2, d_r, n);
        let tau = 0.05 + 0.01 * seed as f64;
        let assembled = to_split_order(interaction_first_order(&m, tau).matrix(), m.d_s(), m.d_r()).unwrap();
        let sum = interaction_factorize(&m, tau).unwrap().sum();
        let diff = (assembled - sum).iter().map(|z| z.norm()).fold(0.0, f64::max);
        worst = worst.max(diff);
    }
    outcome(worst <= 1e-12, format!("worst entrywise deviation {worst:.3e} over 20 models"))
}

fn entropy_bound() -> Outcome {
    let mut worst = f64::NEG_INFINITY;
    for case in 0..200u64 {
        let dim = 1 + (case % 8) as usize;
        let count = 1 + ((case * 7) % 16) as usize;
        let branches = random_branches(case, dim, count);
        for alpha in [1.0, 2.0, 3.0] {
            let c = renyi_bound_check(&branches, alpha).unwrap();
            worst = worst.max(c.entropy - c.bound);
        }
    }
    outcome(worst <= 1e-9, format!("largest S - bound over 200 cases and alpha in {{1,2,3}}: {worst:.3e}"))
}

fn normalization_identity() -> Outcome {
    let mut worst: f64 = 0.0;
    for n in 1..=3 {
        for k in 1..=8 {
            for gtau in [0.01, 0.1, 0.37] {
                let (sum, closed) = normalization_check(n, gtau, k).unwrap();
                worst = worst.max((sum - closed).abs() / closed);
            }
        }
    }
    outcome(worst <= 1e-12, format!("worst relative deviation {worst:.3e}"))
}

fn entropy_consistency() -> Outcome {
    let mut worst: f64 = 0.0;
    for (n, k_max) in [(1, 12), (2, 8), (3, 6)] {
        for k in 1..=k_max {
            for gtau in [0.01, 0.1, 0.3] {
                let enumerated = branch_entropy_bound(&branch_weights_idealized(n, gtau, k).unwrap());
                let inputs = EstimateInputs::new(n, 1.0, gtau * k as f64, gtau, LogBase::Natural).unwrap();
                let closed = entropy_estimate(&inputs, true).unwrap();
                worst = worst.max((enumerated - closed).abs());
            }
        }
    }
    outcome(worst <= 1e-10, format!("worst |enumerated - closed form| {worst:.3e}"))
}

fn compression_soundness() -> Outcome {
    let m = desk();
    let g = TimeGrid::new(0.02, 100).unwrap();
    let rn = build_rn(&m, &g).unwrap();
    let lossless = contract_system(&rn, &m, &g).unwrap();
    let run = |cutoff: f64| {
        let (c, _) = compress(&rn, &TruncationPolicy { cutoff, ..Default::default() }).unwrap();
        (lossless.max_trace_distance(&contract_system(&c, &m, &g).unwrap()).unwrap(), c.max_bond_dim())
    };
    let (e8, d8) = run(1e-8);
    let (e0, d0) = run(0.0);
    outcome(e8 <= 1e-6 && e0 <= 1e-12, format!("cutoff 1e-8: {e8:.3e} (bond {d8}); cutoff 0: {e0:.3e} (bond {d0})"))
}

fn memory_trends() -> Outcome {
    let m = preset("fast-mixing", &BTreeMap::new()).unwrap();
    let g = TimeGrid::new(0.1, 20).unwrap();
    let rn = build_rn(&m, &g).unwrap();
    let (c, _) = compress(&rn, &TruncationPolicy::default()).unwrap();
    let anchor = 4;
    let mi = |sep: usize| mutual_information(&c, anchor..anchor + 1, anchor + sep..anchor + sep + 1).unwrap();
    let (near, far) = (mi(1), mi(6));
    let full = contract_system(&rn, &m, &g).unwrap();
    let errors: Vec<f64> = (1..=g.steps())
        .map(|keep| {
            let cut = contract_system(&tail_cut(&rn, keep).unwrap(), &m, &g).unwrap();
            trace_distance(full.final_state(), cut.final_state()).unwrap()
        })
        .collect();
    let monotone = errors.windows(2).all(|w| w[1] <= w[0] + 1e-9);
    outcome(
        far <= near && monotone,
        format!(
            "MI sep 1 = {near:.4e}, sep 6 = {far:.4e}; tail-cut error {:.3e} -> {:.3e}, monotone = {monotone}",
            errors[0],
            errors[errors.len() - 1]
        ),
    )
}

fn correlator_stability() -> Outcome {
    let m = desk();
    let (t1, t2) = (0.2, 0.8);
    let taus = [0.1, 0.05, 0.025, 0.0125];
    let diffs: Vec<f64> = taus
        .iter()
        .map(|&tau| {
            let coarse = build_rn(&m, &TimeGrid::from_total(1.0, tau).unwrap()).unwrap();
            let fine = coarse_grain(&build_rn(&m, &TimeGrid::from_total(1.0, tau / 2.0).unwrap()).unwrap(), 2).unwrap();
            let (s1, s2) = ((t1 / tau).round() as usize, (t2 / tau).round() as usize);
            let a = two_point_correlation(&coarse, s1, 1, s2, 1).unwrap();
            let b = two_point_correlation(&fine, s1, 1, s2, 1).unwrap();
            // per unit γτ: the two-time function both grids approximate
            (a - b).norm() / (m.gamma() * tau)
        })
        .collect();
    let slope = loglog_slope(&taus, &diffs);
    let c = taus.iter().zip(&diffs).map(|(t, d)| d / t).fold(0.0, f64::max);
    outcome(
        slope >= 0.8,
        format!(
            "slope {slope:.3}, C = {c:.3e}, differences {:?}",
            diffs.iter().map(|d| format!("{d:.3e}")).collect::<Vec<_>>()
        ),
    )
}

fn main() -> ExitCode {
    let checks: [Check; 10] = [
        (1, "worked dimension example", Duration::from_secs(1), worked_example),
        (2, "oracle equivalence", Duration::from_secs(30), oracle_equivalence),
        (3, "Trotter order", Duration::from_secs(60), trotter_order),
        (4, "factorization identity", Duration::from_secs(10), factorization_identity),
        (5, "entropy bound", Duration::from_secs(30), entropy_bound),
        (6, "normalization identity", Duration::from_secs(10), normalization_identity),
        (7, "entropy-estimate consistency", Duration::from_secs(30), entropy_consistency),
        (8, "compression soundness", Duration::from_secs(60), compression_soundness),
        (9, "memory-structure trends", Duration::from_secs(120), memory_trends),
        (10, "two-point correlator stability", Duration::from_secs(60), correlator_stability),
    ];
    let mut failed = 0;
    for (id, name, budget, check) in checks {
        let start = Instant::now();
        let result = check();
        let elapsed = start.elapsed();
        let pass = result.pass && elapsed <= budget;
        if !pass {
            failed += 1;
        }
        println!(
            "criterion {id:>2} {}: {name}: {} [{:.2?} of {:?}]",
            if pass { "PASS" } else { "FAIL" },
            result.detail,
            elapsed,
            budget
        );
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        println!("{failed} criteria failed");
        ExitCode::FAILURE
    }
}
