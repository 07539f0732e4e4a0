//! The `simulate` subcommand: replications x methods on one scenario,
//! with per-method result files and a combined summary.

use tsdr_core::experiment::{run_experiment, Method, MethodSettings};
use tsdr_core::io::{write_results, ExperimentConfig, ExperimentPlan, ResultRow, ResultTable};
use tsdr_core::simulate::{Scenario, ScenarioSpec};
use tsdr_core::{Error, Result};

use crate::SimulateArgs;

fn plan_from_args(args: &SimulateArgs) -> Result<ExperimentPlan> {
    let mut plan = match &args.config {
        Some(path) => ExperimentConfig::from_path(path)?.resolve()?,
        None => {
            let scenario_name = args
                .scenario
                .as_deref()
                .ok_or_else(|| Error::Config("either --config or --scenario is required".into()))?;
            ExperimentPlan {
                scenario: Scenario::from_parts(
                    scenario_name,
                    args.rho.unwrap_or(0.0),
                    args.df.unwrap_or(10),
                )?,
                n: 200,
                replications: 20,
                seed: 1,
                methods: vec![Method::TSir],
                settings: MethodSettings::default(),
                out: None,
                threads: 1,
            }
        }
    };

    // flags override the config
    if args.config.is_some() {
        if let Some(name) = &args.scenario {
            plan.scenario =
                Scenario::from_parts(name, args.rho.unwrap_or(0.0), args.df.unwrap_or(10))?;
        } else if args.rho.is_some() || args.df.is_some() {
            return Err(Error::Config(
                "--rho/--df override requires --scenario as well".into(),
            ));
        }
    }
    if !args.methods.is_empty() {
        plan.methods = args
            .methods
            .iter()
            .map(|m| Method::parse(m))
            .collect::<Result<_>>()?;
    }
    if let Some(n) = args.n {
        plan.n = n;
    }
    if let Some(reps) = args.reps {
        plan.replications = reps;
    }
    if let Some(seed) = args.seed {
        plan.seed = seed;
    }
    if let Some(slices) = args.slices {
        plan.settings.slices = slices;
    }
    if let Some(alpha) = args.alpha {
        plan.settings.alpha = alpha;
    }
    if let Some(lambda) = args.lambda {
        plan.settings.lambda = lambda;
    }
    if args.select_dimension {
        plan.settings.select_dimension = true;
    }
    if let Some(threads) = args.threads {
        plan.threads = threads;
    }
    Ok(plan)
}

pub fn run(args: SimulateArgs) -> Result<()> {
    let plan = plan_from_args(&args)?;
    let out_dir = plan.out.clone().unwrap_or_else(|| args.out.clone());
    let scenario_dir = out_dir.join(plan.scenario.to_string());

    let base = ScenarioSpec::new(plan.scenario, plan.n, plan.seed);
    let mut summary = ResultTable::default();
    for method in &plan.methods {
        println!(
            "running {} on {} (n = {}, {} replications)",
            method, plan.scenario, plan.n, plan.replications
        );
        let cell = run_experiment(
            &base,
            *method,
            &plan.settings,
            plan.replications,
            plan.threads,
        )?;
        let row = ResultRow::from(&cell);
        let mut table = ResultTable::default();
        table.push(row.clone());
        let path = scenario_dir.join(format!("{method}.csv"));
        write_results(&table, &path)?;
        println!(
            "  vcc {:.4} ({:.4})  tcc {:.4} ({:.4})  -> {}",
            row.vcc_mean,
            row.vcc_sd,
            row.tcc_mean,
            row.tcc_sd,
            path.display()
        );
        summary.push(row);
    }
    let summary_path = out_dir.join("summary.csv");
    write_results(&summary, &summary_path)?;
    println!("wrote {}", summary_path.display());
    Ok(())
}
