use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use num_complex::Complex64;
use serde_json::json;

use idnls_core::harness::{prediction_csv, simulate};
use idnls_core::lattice::fmt_real;
use idnls_core::{
    build_three_site, find_eigenvalues, fit_power_law, predict, run, scatter, synthesize_reflectionless, Error,
    ExperimentConfig, LatticeState, PredictorParams, Result, ScatteringData, SolitonSpec,
};

#[derive(Parser)]
#[command(name = "idnls", version, about = "Ablowitz-Ladik lattice simulation, scattering and asymptotics")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build the initial data of an experiment and integrate it.
    Simulate {
        #[arg(long)]
        config: PathBuf,
    },
    /// Compute the scattering data of a lattice state.
    Scatter {
        #[arg(long)]
        state: PathBuf,
        /// Number of samples on the unit circle (power of two).
        #[arg(long, default_value_t = 512)]
        n: usize,
        #[arg(long)]
        out: PathBuf,
    },
    /// Synthesize a reflectionless state from eigenvalue quartets.
    Synth {
        #[arg(long)]
        spec: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Predicted asymptotic value at one lattice site and time.
    Predict {
        #[arg(long)]
        scattering: PathBuf,
        #[arg(long, allow_hyphen_values = true)]
        n: i64,
        #[arg(long)]
        t: f64,
        #[arg(long, default_value_t = PredictorParams::default().d)]
        d: f64,
        #[arg(long, default_value_t = PredictorParams::default().v0)]
        v0: f64,
        #[arg(long, default_value_t = PredictorParams::default().m)]
        m: f64,
    },
    /// Run the full experiment pipeline.
    Compare {
        #[arg(long)]
        config: PathBuf,
    },
    /// Three-site state with prescribed zeros x1, x2 of a(z) in z^2.
    Appendix {
        #[arg(long, allow_hyphen_values = true)]
        x1: String,
        #[arg(long, allow_hyphen_values = true)]
        x2: String,
        #[arg(long)]
        out: PathBuf,
    },
    /// Power-law fit of one CSV column against another.
    Fit {
        #[arg(long)]
        csv: PathBuf,
        #[arg(long)]
        xcol: String,
        #[arg(long)]
        ycol: String,
    },
}

fn parse_complex(s: &str) -> Result<Complex64> {
    let cleaned: String = s.chars().filter(|c| !c.is_whitespace()).collect();
    cleaned
        .parse::<Complex64>()
        .map_err(|e| Error::Parse(format!("cannot read {s:?} as a complex number: {e}")))
}

fn complex_json(z: Complex64) -> serde_json::Value {
    json!({ "re": z.re, "im": z.im })
}

fn cmd_simulate(config: &Path) -> Result<()> {
    let cfg = ExperimentConfig::load(config)?;
    let (initial, traj) = simulate(&cfg)?;
    println!("sites,{}", initial.len());
    println!("snapshots,{}", traj.snapshots.len());
    println!("max_product_drift,{}", fmt_real(traj.max_drift()));
    println!("out_dir,{}", cfg.out_dir.join("snapshots").display());
    Ok(())
}

fn cmd_scatter(state: &Path, n: usize, out: &Path) -> Result<()> {
    let s = LatticeState::load_csv(state)?;
    let data = scatter(&s, n)?;
    data.save_json(out)?;
    println!("c_inf,{}", fmt_real(data.c_inf));
    println!("max_abs_r,{}", fmt_real(data.max_abs_r()));
    println!("z_re,z_im,C_re,C_im,tw");
    for q in &data.quartets {
        println!(
            "{},{},{},{},{}",
            fmt_real(q.z.re),
            fmt_real(q.z.im),
            fmt_real(q.norming.re),
            fmt_real(q.norming.im),
            fmt_real(q.tw)
        );
    }
    Ok(())
}

fn cmd_synth(spec: &Path, out: &Path) -> Result<()> {
    let s = synthesize_reflectionless(&SolitonSpec::load_json(spec)?)?;
    s.save_csv(out)?;
    println!("sites,{}", s.len());
    Ok(())
}

fn cmd_predict(scattering: &Path, n: i64, t: f64, params: PredictorParams) -> Result<()> {
    params.validate()?;
    let data = ScatteringData::load_json(scattering)?;
    let p = predict(n, t, &data, &params)?;
    print!("{}", prediction_csv(std::slice::from_ref(&p)));
    Ok(())
}

fn cmd_compare(config: &Path) -> Result<()> {
    let out = run(&ExperimentConfig::load(config)?)?;
    println!("{}", serde_json::to_string_pretty(&out.summary)?);
    Ok(())
}

/// Writes the report, then reports a violated assumption through the exit
/// status.
fn cmd_appendix(x1: &str, x2: &str, out: &Path) -> Result<()> {
    let (x1, x2) = (parse_complex(x1)?, parse_complex(x2)?);
    let ts = build_three_site(x1, x2)?;
    let mut closed_form_err: f64 = 0.0;
    for k in 0..256 {
        let z = Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI * k as f64 / 256.0);
        let (a, _) = idnls_core::compute_ab(z, &ts.state)?;
        closed_form_err = closed_form_err.max((a - ts.closed_form_a(z)).norm());
    }
    let outcome = scatter(&ts.state, 256);
    let roots = find_eigenvalues(&ts.state).ok();
    let status = match &outcome {
        Ok(_) => "ok".to_string(),
        Err(Error::AssumptionViolated(kind)) => format!("{kind:?}"),
        Err(e) => e.to_string(),
    };
    let report = json!({
        "x1": complex_json(x1),
        "x2": complex_json(x2),
        "R": [complex_json(ts.spec.r0), complex_json(Complex64::new(1.0, 0.0)), complex_json(ts.spec.r2)],
        "closed_form_max_err": closed_form_err,
        "eigenvalues": roots.map(|r| r.into_iter().map(complex_json).collect::<Vec<_>>()),
        "quartets": outcome.as_ref().ok().map(|d| d.quartets.iter().map(|q| json!({
            "z": complex_json(q.z),
            "C": complex_json(q.norming),
            "tw": q.tw,
        })).collect::<Vec<_>>()),
        "status": status,
    });
    std::fs::write(out, serde_json::to_string_pretty(&report)?)?;
    println!("R0,{},{}", fmt_real(ts.spec.r0.re), fmt_real(ts.spec.r0.im));
    println!("R2,{},{}", fmt_real(ts.spec.r2.re), fmt_real(ts.spec.r2.im));
    println!("closed_form_max_err,{}", fmt_real(closed_form_err));
    println!("status,{status}");
    outcome.map(|_| ())
}

fn cmd_fit(csv_path: &Path, xcol: &str, ycol: &str) -> Result<()> {
    let mut reader = csv::Reader::from_path(csv_path).map_err(|e| Error::Parse(e.to_string()))?;
    let headers = reader.headers().map_err(|e| Error::Parse(e.to_string()))?.clone();
    let col = |name: &str| {
        headers
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| Error::InvalidConfig(format!("no column {name:?} in {}", csv_path.display())))
    };
    let (ix, iy) = (col(xcol)?, col(ycol)?);
    let mut points = Vec::new();
    for row in reader.records() {
        let row = row.map_err(|e| Error::Parse(e.to_string()))?;
        let num = |i: usize| -> Result<f64> {
            let s = row.get(i).unwrap_or("");
            s.trim().parse::<f64>().map_err(|_| Error::Parse(format!("not a number: {s:?}")))
        };
        let (x, y) = (num(ix)?, num(iy)?);
        if x > 0.0 && y > 0.0 {
            points.push((x, y));
        }
    }
    let fit = fit_power_law(&points)?;
    println!("exponent,prefactor,r_squared,points");
    println!(
        "{},{},{},{}",
        fmt_real(fit.exponent),
        fmt_real(fit.prefactor),
        fmt_real(fit.r_squared),
        points.len()
    );
    Ok(())
}

fn dispatch(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Simulate { config } => cmd_simulate(&config),
        Command::Scatter { state, n, out } => cmd_scatter(&state, n, &out),
        Command::Synth { spec, out } => cmd_synth(&spec, &out),
        Command::Predict {
            scattering,
            n,
            t,
            d,
            v0,
            m,
        } => cmd_predict(
            &scattering,
            n,
            t,
            PredictorParams {
                d,
                v0,
                m,
                ..Default::default()
            },
        ),
        Command::Compare { config } => cmd_compare(&config),
        Command::Appendix { x1, x2, out } => cmd_appendix(&x1, &x2, &out),
        Command::Fit { csv, xcol, ycol } => cmd_fit(&csv, &xcol, &ycol),
    }
}

fn main() -> ExitCode {
    match dispatch(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
