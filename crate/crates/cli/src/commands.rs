use std::fmt::Write as _;
use std::path::Path;

use anyhow::{anyhow, bail, Result};
use rayon::prelude::*;
use tailmdp::models::{beta_example_model, growth_model, toy_finite_mdp};
use tailmdp::numerics::StreamFactory;
use tailmdp::simulate::{estimate_reward_functional, sample_trajectory, EstimatorConfig, TRAJECTORY_TAG};
use tailmdp::solve::{
    brute_force_optimal, cross_check, discretize, initial_value, refine, value_iteration, CrossCheck, FiniteMDP,
    PolicyTable, Refinement, Solution, ValueTable, BRUTE_FORCE_LIMIT,
};
use tailmdp::verify::{
    check_condition_c, check_envelope_domination, check_kernel_continuity, check_strong_coercivity, find_tight_set,
};
use tailmdp::weakconv::{check_aui, check_conclusion, check_convergence_conditions, scenario};
use tailmdp::{ClosedSetSpec, MdpError, ModelSpec, Policy, Report, StateSpace, TestFunction, ToReport};

use crate::config::{parse_domain, RunConfig};
use crate::output::write_all_atomic;

/// Exit status: success, a check failed, or the run could not proceed.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Outcome {
    Ok = 0,
    CheckFailed = 1,
    CannotRun = 2,
}

impl Outcome {
    /// Failures dominate, then "cannot certify".
    fn combine(self, other: Outcome) -> Outcome {
        match (self, other) {
            (Outcome::CheckFailed, _) | (_, Outcome::CheckFailed) => Outcome::CheckFailed,
            (Outcome::CannotRun, _) | (_, Outcome::CannotRun) => Outcome::CannotRun,
            _ => Outcome::Ok,
        }
    }

    fn from_pass(pass: bool) -> Outcome {
        if pass {
            Outcome::Ok
        } else {
            Outcome::CheckFailed
        }
    }
}

fn build_model(cfg: &RunConfig) -> Result<ModelSpec> {
    Ok(match cfg.model.as_str() {
        "beta" => beta_example_model(cfg.beta_params())?,
        "growth" => growth_model(cfg.growth_params()?)?,
        "toy" => toy_finite_mdp().to_model_spec("toy"),
        other => bail!("unknown model {other:?}"),
    })
}

fn horizon(cfg: &RunConfig, model: &ModelSpec) -> usize {
    cfg.horizon.unwrap_or_else(|| model.horizon_hint())
}

pub fn simulate(cfg: &RunConfig) -> Result<Outcome> {
    let model = build_model(cfg)?;
    let horizon = horizon(cfg, &model);
    let policy = Policy::UniformOverAdmissible;
    let streams = StreamFactory::new(cfg.seed);
    let est = estimate_reward_functional(&model, &policy, horizon, cfg.samples, &streams, &EstimatorConfig::default())?;
    // Same streams as the estimator, so the file and the estimate agree.
    let trajectories = (0..cfg.samples as u64)
        .into_par_iter()
        .map(|i| {
            let mut rng = streams.stream(TRAJECTORY_TAG, i);
            sample_trajectory(&model, &policy, horizon, &mut rng, streams.stream_id(TRAJECTORY_TAG, i))
        })
        .collect::<tailmdp::Result<Vec<_>>>()?;
    let mut csv = String::from("trajectory_id,t,state,action,reward\n");
    for (i, tr) in trajectories.iter().enumerate() {
        for t in 0..tr.horizon() {
            writeln!(csv, "{i},{},{},{},{}", t + 1, tr.states[t], tr.actions[t], tr.per_step_rewards[t]).unwrap();
        }
    }
    let mut report =
        est.to_report().field("model", &cfg.model).field("policy", "uniform-over-admissible").field("seed", cfg.seed);
    if model.has_tail_bound() {
        let series: f64 = (1..=horizon).map(|t| model.tail_bound(t)).sum::<tailmdp::Result<f64>>()?;
        report = report.field("envelope_series_sum", series);
    }
    let text = report.to_string();
    write_all_atomic(Path::new(&cfg.out), &[("trajectories.csv", csv), ("estimate.txt", text.clone())])?;
    print!("{text}");
    Ok(Outcome::Ok)
}

fn hull(space: StateSpace) -> Result<ClosedSetSpec> {
    match space {
        StateSpace::Interval { lo, hi } => Ok(ClosedSetSpec::interval(lo, hi)?),
        StateSpace::Finite(v) => {
            let lo = v.iter().copied().fold(f64::INFINITY, f64::min);
            let hi = v.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            Ok(ClosedSetSpec::interval(lo, hi)?)
        }
    }
}

fn domain(cfg: &RunConfig, model: &ModelSpec) -> Result<ClosedSetSpec> {
    match parse_domain(&cfg.domain)? {
        Some(d) => Ok(d),
        None => hull(model.state_space(cfg.t)),
    }
}

fn test_function(cfg: &RunConfig, model: &ModelSpec) -> Result<TestFunction> {
    let next = hull(model.state_space(cfg.t + 1))?;
    let (lo, hi) = next.bounds();
    Ok(match cfg.g.as_str() {
        "y" => TestFunction::from_fn("y", next, |y| y).with_sup_norm(lo.abs().max(hi.abs())),
        "one" => TestFunction::from_fn("1", next, |_| 1.0).with_sup_norm(1.0),
        "min1" => TestFunction::from_fn("min(y,1)", next, |y| y.min(1.0)).with_sup_norm(lo.abs().max(1.0)),
        other => bail!("unknown test function {other:?}"),
    })
}

/// Report plus outcome for one check; "cannot certify" becomes exit 2.
fn run_check(name: &str, cfg: &RunConfig, model: &ModelSpec) -> Result<(Report, Outcome)> {
    let unavailable = |e: &MdpError| {
        (Report::new(name.replace('-', "_")).field("status", "cannot certify").field("reason", e), Outcome::CannotRun)
    };
    Ok(match name {
        "condition-c" => match check_condition_c(model, cfg.tmax, cfg.tol) {
            Ok(r) => (r.to_report(), Outcome::from_pass(r.certified)),
            Err(e @ MdpError::Unavailable(_)) => unavailable(&e),
            Err(e) => return Err(e.into()),
        },
        "tight-set" => match find_tight_set(model, cfg.t, cfg.target) {
            Ok(r) => (r.to_report().field("target", cfg.target), Outcome::Ok),
            Err(MdpError::TargetUnreachable { target, best, eps }) => (
                Report::new("tight_set")
                    .field("status", "target unreachable")
                    .field("target", target)
                    .field("best_bound", best)
                    .field("best_eps", eps),
                Outcome::CheckFailed,
            ),
            Err(e @ MdpError::Unavailable(_)) => unavailable(&e),
            Err(e) => return Err(e.into()),
        },
        "envelope" => {
            let r = check_envelope_domination(model, cfg.t, cfg.points, 64)?;
            (r.to_report(), Outcome::from_pass(r.passed))
        }
        "coercivity" => {
            let r = check_strong_coercivity(model, cfg.t, &domain(cfg, model)?, cfg.net_step, &cfg.betas)?;
            (r.to_report(), Outcome::from_pass(r.passed))
        }
        "kernel-continuity" => {
            let g = test_function(cfg, model)?;
            let r = check_kernel_continuity(model, cfg.t, &g, &domain(cfg, model)?, cfg.net_step)?;
            (r.to_report().field("g", g.name()), Outcome::from_pass(r.passed))
        }
        other => bail!("unknown check {other:?}"),
    })
}

pub fn verify(cfg: &RunConfig) -> Result<Outcome> {
    let model = build_model(cfg)?;
    let names: Vec<&str> = if cfg.check == "all" {
        vec!["condition-c", "tight-set", "envelope", "coercivity", "kernel-continuity"]
    } else {
        vec![cfg.check.as_str()]
    };
    let mut outcome = Outcome::Ok;
    let mut text = String::new();
    for name in names {
        let (report, o) = run_check(name, cfg, &model)?;
        outcome = outcome.combine(o);
        text.push_str(&report.to_string());
    }
    print!("{text}");
    Ok(outcome)
}

fn value_csv(fm: &FiniteMDP, values: &ValueTable) -> String {
    let mut out = String::from("t,state,value\n");
    for t in 1..=fm.horizon() {
        for (s, x) in fm.states_at(t).iter().enumerate() {
            writeln!(out, "{t},{x},{}", values.at(t, s)).unwrap();
        }
    }
    out
}

fn policy_csv(fm: &FiniteMDP, policy: &PolicyTable) -> String {
    let mut out = String::from("t,state,action\n");
    for t in 1..=fm.horizon() {
        for (s, x) in fm.states_at(t).iter().enumerate() {
            writeln!(out, "{t},{x},{}", fm.choices(t, s)[policy.at(t, s)].action).unwrap();
        }
    }
    out
}

fn cross_check_lines(out: &mut String, cc: &CrossCheck) {
    writeln!(out, "mc_value={}", cc.estimate.value).unwrap();
    writeln!(out, "mc_std_error={}", cc.estimate.std_error).unwrap();
    writeln!(out, "mc_samples={}", cc.estimate.n_samples).unwrap();
    writeln!(out, "discrepancy={}", cc.discrepancy).unwrap();
    writeln!(out, "allowance={}", cc.allowance).unwrap();
    writeln!(out, "cross_check={}", if cc.passed { "PASS" } else { "FAIL" }).unwrap();
}

pub fn solve(cfg: &RunConfig) -> Result<Outcome> {
    let model = build_model(cfg)?;
    let streams = StreamFactory::new(cfg.seed);
    let mut summary = format!("model={}\n", cfg.model);
    let mut outcome = Outcome::Ok;

    let (refinement, sim_model) = if cfg.model == "toy" {
        let fm = toy_finite_mdp();
        let (values, policy) = value_iteration(&fm);
        let value = initial_value(&fm, &values);
        let sim = fm.to_model_spec("toy");
        let coarse = Solution { fm, values, policy, value };
        (Refinement { fine_n: coarse.fm.states_at(1).len(), fine_value: value, gap: 0.0, coarse }, sim)
    } else {
        let horizon = horizon(cfg, &model);
        if cfg.oracle {
            let fm = discretize(&model, cfg.grid, cfg.amax, horizon)?;
            if let Err(e @ MdpError::TooManyPolicies { .. }) = brute_force_optimal(&fm, BRUTE_FORCE_LIMIT) {
                return Err(anyhow!(e).context("brute-force oracle refused"));
            }
        }
        (refine(&model, cfg.grid, cfg.amax, horizon)?, model)
    };
    let sol = &refinement.coarse;
    writeln!(summary, "grid={}", sol.fm.states_at(1).len()).unwrap();
    writeln!(summary, "horizon={}", sol.fm.horizon()).unwrap();
    writeln!(summary, "dp_value={}", sol.value).unwrap();
    writeln!(summary, "fine_grid={}", refinement.fine_n).unwrap();
    writeln!(summary, "fine_value={}", refinement.fine_value).unwrap();
    writeln!(summary, "gap={}", refinement.gap).unwrap();

    if cfg.oracle {
        let (bv, bp) = brute_force_optimal(&sol.fm, BRUTE_FORCE_LIMIT)?;
        let matched = bv == sol.value && bp == sol.policy;
        writeln!(summary, "oracle_value={bv}").unwrap();
        writeln!(summary, "oracle={}", if matched { "MATCH" } else { "MISMATCH" }).unwrap();
        outcome = outcome.combine(Outcome::from_pass(matched));
    }

    let cc = cross_check(&sim_model, &refinement, cfg.samples, &streams)?;
    cross_check_lines(&mut summary, &cc);
    outcome = outcome.combine(Outcome::from_pass(cc.passed));

    write_all_atomic(
        Path::new(&cfg.out),
        &[
            ("value.csv", value_csv(&sol.fm, &sol.values)),
            ("policy.csv", policy_csv(&sol.fm, &sol.policy)),
            ("summary.txt", summary.clone()),
        ],
    )?;
    print!("{summary}");
    Ok(outcome)
}

pub fn weakconv(cfg: &RunConfig) -> Result<Outcome> {
    let sc = scenario(&cfg.scenario, cfg.n.as_deref(), cfg.seed)?;
    let cond = check_convergence_conditions(&sc.seq, &sc.limit, &sc.u, &sc.eps_list, sc.net_step)?;
    let concl = check_conclusion(&sc.seq, &sc.limit, &sc.u, sc.tol)?;
    let aui = check_aui(&sc.seq, &sc.u, &sc.c_grid)?;
    let report = Report::new("weakconv")
        .field("scenario", sc.name)
        .field("seed", cfg.seed)
        .list("n", &sc.ns)
        .field("verdict", concl.verdict())
        .field("conditions_certified", cond.certified)
        .child("conditions", cond.to_report())
        .child("conclusion", concl.to_report())
        .child("aui", aui.to_report());
    let mut csv = String::from("n,integral,tail_sup,margin\n");
    for (k, n) in sc.ns.iter().enumerate() {
        writeln!(csv, "{n},{},{},{}", concl.integrals[k].value, concl.tail_sups[k], concl.margins[k]).unwrap();
    }
    let text = report.to_string();
    write_all_atomic(Path::new(&cfg.out), &[("margins.csv", csv), ("weakconv.txt", text.clone())])?;
    print!("{text}");
    Ok(Outcome::from_pass(concl.holds && cond.certified))
}
