use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use irsec::dump::write_dump;
use irsec::record::{fp_fraction_csv, fp_trace_csv, phase_trace_csv, sdp_trace_csv, ResultRecord};
use irsec::runner::{
    channels_for, fp_at_random_phases, params_for, realization_seed, run_plan, RunPlan,
};
use irsec::scenario::{parse_baselines, parse_l_list, Scenario};
use irsec::validate;
use irsec_core::ao::{initial_phases, run_algorithm1};
use irsec_core::channel::build_effective;
use irsec_core::geometry::ConfigLabel;
use irsec_core::kernel::solve_sdp;
use irsec_core::phase_opt::sca_subproblem;
use irsec_core::rates::{PowerVector, PsdMatrix};

#[derive(Parser)]
#[command(
    name = "irsec",
    version,
    about = "Max-min secrecy-rate optimization for IRS-assisted two-way pairs"
)]
struct Cli {
    /// More log output (-v info, -vv debug). RUST_LOG overrides.
    #[arg(short, long, action = clap::ArgAction::Count, global = true)]
    verbose: u8,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Monte Carlo sweep: AO and baselines on shared channel draws.
    Run(RunArgs),
    /// One realization with every trace written out.
    Trace(TraceArgs),
    /// Oracle and acceptance checks.
    Validate(ValidateArgs),
}

#[derive(Args)]
struct ScenarioArgs {
    /// Scenario file with [anchors], [params] and [run] sections.
    #[arg(long, conflicts_with = "config")]
    scenario: Option<PathBuf>,
    /// Named layout(s), comma separated: C1, C2, C3, C4.
    #[arg(long)]
    config: Option<String>,
}

impl ScenarioArgs {
    fn load(&self) -> Result<Vec<Scenario>> {
        match (&self.scenario, &self.config) {
            (Some(path), _) => Ok(vec![Scenario::load(path)?]),
            (None, Some(names)) => names
                .split(',')
                .map(|n| {
                    let label = ConfigLabel::parse(n)
                        .filter(|l| *l != ConfigLabel::Custom)
                        .with_context(|| format!("unknown configuration `{n}`"))?;
                    Ok(Scenario::named(label)?)
                })
                .collect(),
            (None, None) => Ok(vec![Scenario::named(ConfigLabel::C1)?]),
        }
    }
}

#[derive(Args)]
struct RunArgs {
    #[command(flatten)]
    scenario: ScenarioArgs,
    /// IRS element counts, comma separated.
    #[arg(long = "L", value_name = "LIST")]
    l: Option<String>,
    #[arg(long)]
    realizations: Option<usize>,
    /// Base seed of the channel draws.
    #[arg(long)]
    seed: Option<u64>,
    /// Baseline names, `all` or `none`.
    #[arg(long)]
    baselines: Option<String>,
    /// Lattice size of grid_search_power.
    #[arg(long, default_value_t = 50)]
    grid_q: usize,
    /// Write per-realization traces and records.
    #[arg(long)]
    traces: bool,
    /// Worker threads (0: all cores).
    #[arg(long, default_value_t = 0)]
    threads: usize,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct TraceArgs {
    #[command(flatten)]
    scenario: ScenarioArgs,
    #[arg(long = "L")]
    l: Option<usize>,
    /// Realization index; the channel seed is derived as in `run`.
    #[arg(long, default_value_t = 0)]
    realization: usize,
    #[arg(long)]
    seed: Option<u64>,
    /// Use this channel seed directly.
    #[arg(long, conflicts_with_all = ["realization", "seed"])]
    channel_seed: Option<u64>,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct ValidateArgs {
    /// Criteria to run, comma separated (default: the fast ones).
    #[arg(long)]
    criteria: Option<String>,
    /// Run all ten criteria, including the Monte Carlo reproductions.
    #[arg(long, conflicts_with = "criteria")]
    all: bool,
    /// Scratch directory for the determinism check.
    #[arg(long)]
    work: Option<PathBuf>,
}

fn main() {
    let cli = Cli::parse();
    let level = match cli.verbose {
        0 => "warn",
        1 => "info",
        _ => "debug",
    };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level)).init();
    let result = match cli.command {
        Command::Run(a) => run(a),
        Command::Trace(a) => trace(a),
        Command::Validate(a) => validate_cmd(a),
    };
    if let Err(e) = result {
        eprintln!("error: {e:#}");
        std::process::exit(1);
    }
}

fn run(a: RunArgs) -> Result<()> {
    let scenarios = a.scenario.load()?;
    let first = &scenarios[0].run;
    let l_values = match &a.l {
        Some(s) => parse_l_list(s).map_err(anyhow::Error::msg)?,
        None => first.l_values.clone(),
    };
    let baselines = match &a.baselines {
        Some(s) => parse_baselines(s).map_err(anyhow::Error::msg)?,
        None => first.baselines.clone(),
    };
    let plan = RunPlan {
        configs: scenarios.iter().map(|s| s.config.clone()).collect(),
        l_values,
        realizations: a.realizations.unwrap_or(first.realizations),
        seed: a.seed.unwrap_or(first.seed),
        baselines,
        traces: a.traces,
        grid_q: a.grid_q,
        out: a.out.clone().or_else(|| first.out.clone()),
        threads: a.threads,
    };
    let report = run_plan(&plan)?;
    print!("{}", report.aggregate_csv());
    if let Some(out) = &plan.out {
        eprintln!("wrote {}", out.display());
    }
    Ok(())
}

fn write(dir: &Path, name: &str, text: &str) -> Result<()> {
    let path = dir.join(name);
    std::fs::write(&path, text).with_context(|| format!("writing {}", path.display()))
}

fn trace(a: TraceArgs) -> Result<()> {
    let scenarios = a.scenario.load()?;
    if scenarios.len() != 1 {
        bail!("trace takes a single configuration");
    }
    let sc = &scenarios[0];
    let l = a.l.unwrap_or(sc.config.params.irs_elements);
    let params = params_for(&sc.config, l);
    let label = sc.config.label.as_str();
    let seed = a.channel_seed.unwrap_or_else(|| {
        realization_seed(a.seed.unwrap_or(sc.run.seed), label, l, a.realization)
    });
    let chs = channels_for(&sc.config, &params, seed)?;
    let eff = build_effective(&chs);
    let ao = run_algorithm1(&eff, &params, seed)?;
    let rec = ResultRecord::from_ao(seed, label, a.realization, &ao);

    std::fs::create_dir_all(&a.out)?;
    write(&a.out, "channels.txt", &write_dump(seed, &params, &chs))?;
    write(&a.out, "record.json", &rec.to_json())?;
    write(&a.out, "phase_trace.csv", &phase_trace_csv(&rec))?;
    write(&a.out, "fp_trace.csv", &fp_trace_csv(&rec))?;

    let fp = fp_at_random_phases(&eff, &params, seed)?;
    write(
        &a.out,
        "fp_random_phases.csv",
        &fp_fraction_csv(&fp.trace, &fp.pair_secrecy, &fp.powers, params.p_max),
    )?;

    // the first phase subproblem of the first outer iteration
    if let Some(first) = ao.outer.first() {
        let p = PowerVector::new(first.fp_powers.last().cloned().unwrap_or_default())?;
        let w0 = PsdMatrix::rank_one(&initial_phases(l, seed));
        let sol = solve_sdp(&sca_subproblem(&eff, &p, &w0, &params)?, &params.solver)?;
        write(
            &a.out,
            "sdp_trace.csv",
            &sdp_trace_csv(&sol.trace, sol.report.status),
        )?;
    }
    println!(
        "seed {seed}: min secrecy {:.6} bits, outer trace {:?}",
        ao.rates.min_secrecy, ao.outer_trace
    );
    Ok(())
}

fn validate_cmd(a: ValidateArgs) -> Result<()> {
    let ids: Vec<usize> = if a.all {
        (1..=10).collect()
    } else if let Some(list) = &a.criteria {
        list.split(',')
            .map(|s| {
                s.trim()
                    .parse()
                    .with_context(|| format!("bad criterion `{s}`"))
            })
            .collect::<Result<_>>()?
    } else {
        vec![1, 2, 3, 4, 5, 6, 10]
    };
    let tmp;
    let work = match &a.work {
        Some(w) => w.clone(),
        None => {
            tmp = std::env::temp_dir().join(format!("irsec-validate-{}", std::process::id()));
            tmp
        }
    };
    std::fs::create_dir_all(&work)?;
    let mut failed = 0;
    for id in ids {
        let checks = validate::run(&[id], &work);
        let Some(c) = checks.first() else {
            bail!("no criterion {id}");
        };
        println!("{}", c.line());
        failed += usize::from(!c.passed);
    }
    if a.work.is_none() {
        let _ = std::fs::remove_dir_all(&work);
    }
    if failed > 0 {
        bail!("{failed} checks failed");
    }
    Ok(())
}
