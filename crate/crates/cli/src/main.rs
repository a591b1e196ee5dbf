use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use hypquad::experiment::{
    self, frame_stage, maxprinciple_stage, orbit_stage, qtilde_stage, system_stage, window_stage, write_csv_file,
    write_json, ExperimentConfig, Summary,
};
use hypquad::orbits::{action_spectrum, write_orbits_csv};
use hypquad::planning::plan_window;
use hypquad::quadform::check_smallness;
use hypquad::taming::write_rows;
use hypquad::Error;

#[derive(Parser)]
#[command(name = "hypquad", version, about = "Hamiltonians that are hyperbolic quadratic forms at infinity")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct Common {
    /// Experiment config (JSON).
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output directory.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Replaces the epsilon list; repeatable.
    #[arg(long = "epsilon")]
    epsilon: Vec<f64>,
    /// Replaces the period list and prime range; repeatable.
    #[arg(long = "period")]
    period: Vec<usize>,
    /// Seed grid points per axis.
    #[arg(long)]
    seeds: Option<usize>,
    /// Integrator step.
    #[arg(long)]
    step: Option<f64>,
    /// Cylinder grid nodes per side.
    #[arg(long)]
    grid: Option<usize>,
}

#[derive(Subcommand)]
enum Command {
    /// Print the normal frame of the configured blocks.
    NormalForm(Common),
    /// Print the rescaled frame and its smallness report.
    Rescale(Common),
    /// Build and verify the taming profile for each epsilon.
    Qtilde(Common),
    /// Subharmonicity, slow-homotopy and shift checks.
    Maxprinciple(Common),
    /// Fixed points and simple periodic orbits.
    Orbits(Common),
    /// Index reports of the orbits found.
    Indices(Common),
    /// Action window plan, from the config or from explicit constants.
    Plan {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        a: Option<f64>,
        #[arg(long)]
        c3: Option<f64>,
        #[arg(long, default_value_t = 1)]
        m: usize,
        #[arg(long, default_value_t = 2)]
        floor: u64,
    },
    /// Run every stage and write the report bundle.
    Run(Common),
    /// Summarize a previously written bundle.
    Report(Common),
}

enum Failure {
    Config(String),
    Verification(String),
    Numerical(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Config(_) | Error::Io(_) => Failure::Config(e.to_string()),
            _ => Failure::Numerical(e.to_string()),
        }
    }
}

type Outcome = std::result::Result<(), Failure>;

fn load(c: &Common) -> std::result::Result<ExperimentConfig, Failure> {
    let path = c
        .config
        .as_ref()
        .ok_or_else(|| Failure::Config("--config is required".into()))?;
    let mut cfg = ExperimentConfig::load(path)?;
    if !c.epsilon.is_empty() {
        cfg.epsilon = c.epsilon.clone();
    }
    if !c.period.is_empty() {
        cfg.periods = c.period.clone();
        cfg.prime_range = None;
    }
    if let Some(s) = c.seeds {
        cfg.seed_density = s;
    }
    if let Some(s) = c.step {
        cfg.step = s;
    }
    if let Some(g) = c.grid {
        cfg.grid = g;
    }
    cfg.validate()?;
    Ok(cfg)
}

fn out_dir(c: &Common, cfg: Option<&ExperimentConfig>) -> Option<PathBuf> {
    c.out.clone().or_else(|| cfg.and_then(|x| x.output.clone()))
}

fn print_json<T: serde::Serialize>(v: &T) {
    println!("{}", serde_json::to_string_pretty(v).expect("serializable"));
}

fn ensure_dir(dir: &Path) -> Outcome {
    std::fs::create_dir_all(dir).map_err(|e| Failure::Config(format!("{}: {e}", dir.display())))
}

fn verdict(pass: bool, what: &str) -> Outcome {
    if pass {
        Ok(())
    } else {
        Err(Failure::Verification(format!("{what} failed")))
    }
}

fn dispatch(cmd: Command) -> Outcome {
    match cmd {
        Command::NormalForm(c) => {
            let cfg = load(&c)?;
            let (raw, _) = frame_stage(&cfg)?;
            print_json(&raw);
            Ok(())
        }
        Command::Rescale(c) => {
            let cfg = load(&c)?;
            let (_, scaled) = frame_stage(&cfg)?;
            let rep = check_smallness(&scaled);
            print_json(&serde_json::json!({ "frame": scaled, "smallness": rep, "margin": rep.margin() }));
            verdict(rep.all(), "smallness")
        }
        Command::Qtilde(c) => {
            let cfg = load(&c)?;
            let (_, frame) = frame_stage(&cfg)?;
            let h = system_stage(&cfg, &frame)?;
            let (profiles, rows) = qtilde_stage(&cfg, &h)?;
            if let Some(dir) = out_dir(&c, Some(&cfg)) {
                ensure_dir(&dir)?;
                write_csv_file(&dir.join("qtilde_report.csv"), |f| write_rows(&rows, f))?;
            }
            print_json(&profiles);
            verdict(rows.iter().all(|r| r.pass), "taming profile verification")
        }
        Command::Maxprinciple(c) => {
            let cfg = load(&c)?;
            let (_, frame) = frame_stage(&cfg)?;
            let h = system_stage(&cfg, &frame)?;
            let rows = maxprinciple_stage(&cfg, &h)?;
            if let Some(dir) = out_dir(&c, Some(&cfg)) {
                ensure_dir(&dir)?;
                write_csv_file(&dir.join("maxp_report.csv"), |f| write_rows(&rows, f))?;
            }
            let failing: Vec<_> = rows.iter().filter(|r| !r.pass).map(|r| &r.check).collect();
            print_json(&serde_json::json!({ "rows": rows.len(), "failing": failing }));
            verdict(failing.is_empty(), "maximum principle checks")
        }
        Command::Orbits(c) => {
            let cfg = load(&c)?;
            let (_, frame) = frame_stage(&cfg)?;
            let h = system_stage(&cfg, &frame)?;
            let o = orbit_stage(&cfg, &h)?;
            let mut all = o.fixed.clone();
            all.extend(o.simple.iter().cloned());
            match out_dir(&c, Some(&cfg)) {
                Some(dir) => {
                    ensure_dir(&dir)?;
                    write_csv_file(&dir.join("orbits.csv"), |f| write_orbits_csv(&all, f))?;
                }
                None => write_orbits_csv(&all, std::io::stdout())?,
            }
            eprintln!("{} fixed points, {} simple orbits from {} seeds", o.fixed.len(), o.simple.len(), o.seeds);
            Ok(())
        }
        Command::Indices(c) => {
            let cfg = load(&c)?;
            let (_, frame) = frame_stage(&cfg)?;
            let h = system_stage(&cfg, &frame)?;
            let o = orbit_stage(&cfg, &h)?;
            let rows: Vec<_> = o
                .fixed
                .iter()
                .chain(&o.simple)
                .map(|x| {
                    serde_json::json!({
                        "period": x.period,
                        "minimal_period": x.minimal_period,
                        "cz": x.index.cz_label(),
                        "mean": x.index.mean,
                        "gap_ok": x.index.gap_ok,
                        "degenerate": x.degenerate,
                        "topological_index": x.topological_index,
                    })
                })
                .collect();
            print_json(&rows);
            verdict(
                o.fixed.iter().chain(&o.simple).all(|x| x.degenerate || x.index.gap_ok),
                "index gap",
            )
        }
        Command::Plan {
            common,
            a,
            c3,
            m,
            floor,
        } => {
            let report = match (a, c3) {
                (Some(a), Some(c3)) => serde_json::to_value(plan_window(a, c3, m, floor)?).expect("serializable"),
                _ => {
                    let cfg = load(&common)?;
                    let (_, frame) = frame_stage(&cfg)?;
                    let h = system_stage(&cfg, &frame)?;
                    let (profiles, _) = qtilde_stage(&cfg, &h)?;
                    let c3 = profiles
                        .iter()
                        .min_by(|x, y| x.epsilon.total_cmp(&y.epsilon))
                        .map(|p| p.c3)
                        .ok_or_else(|| Failure::Config("no epsilon configured".into()))?;
                    let o = orbit_stage(&cfg, &h)?;
                    let spec = action_spectrum(&o.fixed, 1e-9);
                    if !spec.gap_radius.is_finite() {
                        return Err(Failure::Verification("action spectrum has no nonzero value".into()));
                    }
                    let w = window_stage(&cfg, spec.gap_radius, c3, &o.fixed, frame.half_dim())?;
                    if let Some(dir) = out_dir(&common, Some(&cfg)) {
                        ensure_dir(&dir)?;
                        write_json(&Some(&w), &dir.join("windows.json"))?;
                    }
                    serde_json::to_value(w).expect("serializable")
                }
            };
            print_json(&report);
            Ok(())
        }
        Command::Run(c) => {
            let cfg = load(&c)?;
            let rep = experiment::run(&cfg);
            let dir = out_dir(&c, Some(&cfg)).unwrap_or_else(|| PathBuf::from("out"));
            rep.write_bundle(&dir)?;
            print_summary(&rep.summary);
            eprintln!("bundle written to {}", dir.display());
            if rep.summary.numerical_failure {
                return Err(Failure::Numerical("a stage failed numerically".into()));
            }
            verdict(rep.summary.verified, "verification")
        }
        Command::Report(c) => {
            let dir = c
                .out
                .clone()
                .ok_or_else(|| Failure::Config("--out is required".into()))?;
            let path = dir.join("summary.json");
            let text =
                std::fs::read_to_string(&path).map_err(|e| Failure::Config(format!("{}: {e}", path.display())))?;
            let s: Summary =
                serde_json::from_str(&text).map_err(|e| Failure::Config(format!("{}: {e}", path.display())))?;
            print_summary(&s);
            if s.numerical_failure {
                return Err(Failure::Numerical("bundle records a numerical failure".into()));
            }
            verdict(s.verified, "verification")
        }
    }
}

fn print_summary(s: &Summary) {
    for st in &s.stages {
        println!("{:<13} {:<8} {:>8.2}s  {}", st.name, format!("{:?}", st.status).to_lowercase(), st.seconds, st.detail);
    }
    for f in &s.fixed_points {
        println!(
            "fixed point {:?}: action {:.6}, mean index {:.6}, cz {}",
            f.z0,
            f.action,
            f.mean_index,
            f.cz.map_or("degenerate".into(), |c| c.to_string())
        );
    }
    if !s.periods.is_empty() {
        let line: Vec<String> = s
            .periods
            .iter()
            .map(|p| format!("{}:{}/{}", p.period, p.passing, p.simple))
            .collect();
        println!("simple orbits passing/found per period: {}", line.join(" "));
        println!("prime minimal periods found: {:?}", s.prime_periods_found);
    }
    if let Some(w) = &s.window {
        println!(
            "window: a = {:.6}, primes {:?}, delta = {:.6e}, alpha in ({:.6e}, {:.6e})",
            w.plan.a, w.plan.primes, w.plan.delta, w.plan.alpha_interval.0, w.plan.alpha_interval.1
        );
    }
    println!("verified: {}", s.verified);
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Config(m)) => {
            eprintln!("config error: {m}");
            ExitCode::from(1)
        }
        Err(Failure::Verification(m)) => {
            eprintln!("verification failure: {m}");
            ExitCode::from(2)
        }
        Err(Failure::Numerical(m)) => {
            eprintln!("numerical failure: {m}");
            ExitCode::from(3)
        }
    }
}
