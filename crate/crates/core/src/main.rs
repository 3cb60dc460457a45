#![allow(clippy::neg_cmp_op_on_partial_ord)]

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use hydrolimit::config::{parse_list, parse_state, KeyValues};
use hydrolimit::harness::{
    emit_report, run_convergence_sweep_detailed, run_scaling_study, MacroSnapshot, ReportFormat, ScalingConfig,
    ScalingStudy, SweepConfig,
};
use hydrolimit::kinetic::{run, KineticConfig};
use hydrolimit::numerics::UniformGrid;
use hydrolimit::par::Execution;
use hydrolimit::profiles::{CompositeOptions, CompositeProfile, Transport};
use hydrolimit::riemann::{euler_solution, solve_riemann, WavePattern};
use hydrolimit::{Error, Result};

#[derive(Parser)]
#[command(name = "hydrolimit", version, about = "Riemann patterns, composite profiles and BGK hydrodynamic-limit studies")]
struct Cli {
    /// Run every kernel on one thread.
    #[arg(long, global = true)]
    sequential: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve a Riemann problem; prints the wave pattern as JSON.
    Riemann {
        /// Left state `v,u1,theta`.
        #[arg(long, allow_hyphen_values = true)]
        left: String,
        /// Right state `v,u1,theta`.
        #[arg(long, allow_hyphen_values = true)]
        right: String,
        /// Also sample the inviscid solution at this time.
        #[arg(long)]
        time: Option<f64>,
        /// CSV for the sampled solution (`x, v, u1, theta, rho, p`).
        #[arg(long, requires = "time")]
        out: Option<PathBuf>,
        /// Lagrangian sampling interval `a,b`.
        #[arg(long, default_value = "-2,2", allow_hyphen_values = true)]
        span: String,
        #[arg(long, default_value_t = 801)]
        n: usize,
    },
    /// Sample the composite profile in Lagrangian coordinates.
    Profile {
        /// Key-value file with `left`, `right` and optional `x_span`, `n`,
        /// `h`, `wave_i`, `wave_ii`, `mu0`, `prandtl`.
        #[arg(long)]
        pattern: PathBuf,
        #[arg(long)]
        eps: f64,
        #[arg(long)]
        time: f64,
        #[arg(long)]
        out: PathBuf,
        /// Write the per-wave components instead of the inviscid overlay.
        #[arg(long)]
        decompose: bool,
    },
    /// Run the reduced BGK solver and write macroscopic snapshots.
    Kinetic {
        #[arg(long)]
        config: PathBuf,
        /// Output directory.
        #[arg(long, default_value = ".")]
        out: PathBuf,
    },
    /// Knudsen-number convergence sweep.
    Sweep {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Scaling law of one profile lemma; prints the report as JSON.
    Scaling {
        /// lemma21, lemma22, lemma26, shock_tail or contact_tail.
        #[arg(long)]
        which: ScalingStudy,
        /// Key-value file with `left` and `right`.
        #[arg(long)]
        pattern: PathBuf,
        /// Swept values (`σ` for lemma21, `ε` otherwise).
        #[arg(long, allow_hyphen_values = true)]
        values: String,
        #[arg(long, default_value_t = 2.0)]
        p: f64,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let exec = if cli.sequential {
        Execution::Sequential
    } else {
        Execution::Parallel
    };
    match dispatch(cli.command, exec) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}

fn dispatch(cmd: Command, exec: Execution) -> Result<()> {
    match cmd {
        Command::Riemann {
            left,
            right,
            time,
            out,
            span,
            n,
        } => {
            let p = solve_riemann(&parse_state("left", &left)?, &parse_state("right", &right)?)?;
            println!("{}", serde_json::to_string_pretty(&p)?);
            if let (Some(t), Some(out)) = (time, out) {
                let grid = span_grid(&parse_list("span", &span)?, n)?;
                write_riemann_csv(&p, t, &grid, &out)?;
            }
            Ok(())
        }
        Command::Profile {
            pattern,
            eps,
            time,
            out,
            decompose,
        } => profile(&pattern, eps, time, &out, decompose, exec),
        Command::Kinetic { config, out } => kinetic(&config, &out, exec),
        Command::Sweep { config, out } => sweep(&config, &out, exec),
        Command::Scaling {
            which,
            pattern,
            values,
            p,
        } => {
            let kv = KeyValues::from_file(&pattern)?;
            let mut cfg = ScalingConfig::new(pattern_from(&kv)?, parse_list("values", &values)?);
            cfg.p = p;
            cfg.exec = exec;
            let report = run_scaling_study(which, &cfg)?;
            println!("{}", serde_json::to_string_pretty(&report)?);
            Ok(())
        }
    }
}

fn pattern_from(kv: &KeyValues) -> Result<WavePattern> {
    let left = kv.state("left")?.ok_or_else(|| Error::Config("missing key left".into()))?;
    let right = kv.state("right")?.ok_or_else(|| Error::Config("missing key right".into()))?;
    solve_riemann(&left, &right)
}

fn span_grid(span: &[f64], n: usize) -> Result<UniformGrid> {
    match *span {
        [a, b] => UniformGrid::new(a, b, n),
        _ => Err(Error::Config("span: expected a,b".into())),
    }
}

fn write_csv(path: &Path, header: &[String], rows: impl Iterator<Item = Vec<f64>>) -> Result<()> {
    let to_err = |e: csv::Error| match e.into_kind() {
        csv::ErrorKind::Io(io) => Error::io(path, io),
        other => Error::Numerical(format!("{}: {other:?}", path.display())),
    };
    let mut w = csv::Writer::from_path(path).map_err(to_err)?;
    w.write_record(header).map_err(to_err)?;
    for r in rows {
        w.write_record(r.iter().map(|v| v.to_string())).map_err(to_err)?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

fn write_riemann_csv(p: &WavePattern, t: f64, grid: &UniformGrid, out: &Path) -> Result<()> {
    if !(t > 0.0) {
        return Err(Error::Config(format!("time must be positive (got {t})")));
    }
    let header = ["x", "v", "u1", "theta", "rho", "p"].map(String::from);
    let rows = (0..grid.n).map(|i| {
        let x = grid.x(i);
        let s = euler_solution(p, t, x);
        vec![x, s.v, s.u1, s.theta, s.rho(), s.pressure()]
    });
    write_csv(out, &header, rows)
}

fn profile(pattern: &Path, eps: f64, time: f64, out: &Path, decompose: bool, exec: Execution) -> Result<()> {
    let kv = KeyValues::from_file(pattern)?;
    kv.reject_unknown(&["left", "right", "x_span", "n", "h", "wave_i", "wave_ii", "mu0", "prandtl"])?;
    let p = pattern_from(&kv)?;
    let h: f64 = kv.get_or("h", 0.1)?;
    if !(time > 0.0) {
        return Err(Error::Config(format!("time must be positive (got {time})")));
    }
    // the correction waves live on [h, T]
    let waves = time >= h;
    let mut opts = CompositeOptions::new(eps, h.min(time), time.max(h));
    opts.transport = Transport {
        mu0: kv.get_or("mu0", 1.0)?,
        prandtl: kv.get_or("prandtl", 1.0)?,
    };
    opts.wave_i = waves && kv.flag("wave_i", true)?;
    opts.wave_ii = waves && kv.flag("wave_ii", true)?;
    let span = kv.list("x_span")?.unwrap_or_else(|| vec![-2.0, 2.0]);
    opts.span = (span[0].min(-2.0), span.get(1).copied().unwrap_or(2.0).max(2.0));
    opts.exec = exec;
    let grid = span_grid(&span, kv.get_or("n", 2001)?)?;
    let prof = CompositeProfile::build(&p, &opts)?;
    let (field, comps) = prof.field(time, &grid, exec)?;
    let f = &field.slice().values;
    let base = ["x", "v", "u1", "theta"].map(String::from);
    if decompose {
        let cols = comps.columns();
        let header: Vec<String> = base.iter().cloned().chain(cols.iter().map(|c| c.0.to_string())).collect();
        let rows = (0..grid.n).map(|i| {
            let mut r = vec![grid.x(i), f.v[i], f.u1[i], f.theta[i]];
            r.extend(cols.iter().map(|c| c.1[i]));
            r
        });
        write_csv(out, &header, rows)
    } else {
        let header: Vec<String> = base
            .iter()
            .cloned()
            .chain(["E", "v_euler", "u1_euler", "theta_euler"].map(String::from))
            .collect();
        let rows = (0..grid.n).map(|i| {
            let x = grid.x(i);
            let s = euler_solution(&p, time, x);
            vec![x, f.v[i], f.u1[i], f.theta[i], f.e[i], s.v, s.u1, s.theta]
        });
        write_csv(out, &header, rows)
    }
}

fn kinetic(config: &Path, out: &Path, exec: Execution) -> Result<()> {
    let cfg = KineticConfig::from_file(config)?;
    let pattern = cfg.pattern()?;
    cfg.check_domain(&pattern)?;
    let (initial, _) = cfg.initial_state(exec)?;
    let star = cfg.star(&pattern);
    std::fs::create_dir_all(out).map_err(|e| Error::io(out, e))?;
    let states = run(&initial, cfg.t_end, &cfg.snapshots, cfg.cfl)?;
    for (k, st) in states.iter().enumerate() {
        let path = out.join(format!("kinetic_{k:03}.csv"));
        MacroSnapshot::from_state(st, &star)?.write_csv(&path)?;
        eprintln!("t = {:.6}: {}", st.time, path.display());
    }
    Ok(())
}

fn sweep(config: &Path, out: &Path, exec: Execution) -> Result<()> {
    let cfg = SweepConfig::from_file(config)?;
    std::fs::create_dir_all(out).map_err(|e| Error::io(out, e))?;
    let (result, runs) = run_convergence_sweep_detailed(&cfg, exec)?;
    emit_report(&result, &out.join("sweep.csv"), ReportFormat::Csv)?;
    emit_report(&result, &out.join("sweep.json"), ReportFormat::Json)?;
    for (i, r) in runs.iter().enumerate() {
        for (k, snap) in r.snapshots.iter().enumerate() {
            snap.write_csv(&out.join(format!("snapshot_eps{i}_t{k}.csv")))?;
        }
        eprintln!(
            "eps = {:.3e}: sup = {:.4e}, l2 = {:.4e}, {:.1} s",
            r.row.eps, r.row.sup_error, r.row.l2_error, r.row.runtime_s
        );
    }
    if let Some(fit) = result.fit {
        eprintln!("fitted order {:.3} (residual {:.2e})", fit.order, fit.residual);
    }
    if !result.accepted() {
        eprintln!("warning: grid refinement changed the sup error by 5% or more");
    }
    Ok(())
}
