use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;

use clap::{Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use serde_json::json;

use opfp::algebra::{BElement, HalfPlanePoint, MatricialElement};
use opfp::analytic::{abel_check, cauchy_bernoulli, cauchy_semicircle, f_arcsine, IterationConfig};
use opfp::io::{matrix_to_doc, read_json, read_matrix, LawSpec};
use opfp::laws::Distribution;
use opfp::series::{boolean_convolve, free_convolve, monotone_convolve};
use opfp::suite::{
    clt_experiment, moment_table, run_suite, to_json_lines, CltKind, ScenarioConfig,
};
use opfp::{Error, Result};

#[derive(Parser)]
#[command(
    name = "opfp",
    version,
    about = "Operator-valued free, Boolean and monotone probability over matrix algebras",
    after_help = "OPFP_SEED overrides the configured seed."
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the verification suite and print one JSON report per check.
    Verify {
        #[arg(long)]
        config: Option<PathBuf>,
        /// Comma-separated check ids.
        #[arg(long, value_delimiter = ',')]
        only: Vec<String>,
    },
    /// Moment table of a law at the identity and at one seeded random point.
    Moments {
        #[arg(long)]
        law: PathBuf,
        #[arg(long, default_value_t = 8)]
        order: usize,
        #[arg(long, default_value_t = 1)]
        level: usize,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Moment table of a convolution of two laws.
    Convolve {
        #[arg(long, value_enum)]
        op: Op,
        #[arg(long)]
        lhs: PathBuf,
        #[arg(long)]
        rhs: PathBuf,
        #[arg(long, default_value_t = 8)]
        order: usize,
        #[arg(long, default_value_t = 1)]
        level: usize,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Cauchy transform or its reciprocal at a half-plane point.
    Analytic {
        #[arg(long)]
        law: PathBuf,
        #[arg(long)]
        point: PathBuf,
        #[arg(long, value_enum, default_value_t = Transform::G)]
        transform: Transform,
        #[arg(long, default_value_t = 1e-12)]
        tol: f64,
    },
    /// Abel equation residual for the arcsine reciprocal Cauchy transform.
    Abel {
        #[arg(long)]
        a: PathBuf,
        #[arg(long)]
        point: PathBuf,
        #[arg(long, default_value_t = 3)]
        n: usize,
        #[arg(long, default_value_t = 1e-12)]
        tol: f64,
    },
    /// Central limit convergence curve.
    Clt {
        #[arg(long, value_enum)]
        kind: Op,
        #[arg(long)]
        base: PathBuf,
        /// Highest moment order compared.
        #[arg(long, default_value_t = 8)]
        orders: usize,
        #[arg(long = "N", value_delimiter = ',', default_values_t = [1usize, 2, 4, 8, 16, 32, 64])]
        n: Vec<usize>,
        #[arg(long)]
        seed: Option<u64>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Op {
    Free,
    Boolean,
    Monotone,
}

#[derive(Clone, Copy, PartialEq, ValueEnum)]
enum Transform {
    #[value(name = "G")]
    G,
    #[value(name = "F")]
    F,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}

/// 2 for bad input, 1 for numerical failure.
fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Config(_)
        | Error::Argument(_)
        | Error::Dimension(_)
        | Error::Precondition(_)
        | Error::Json(_)
        | Error::Io(_) => 2,
        _ => 1,
    }
}

fn seed(explicit: Option<u64>) -> Result<u64> {
    if let Some(s) = explicit {
        return Ok(s);
    }
    Ok(ScenarioConfig::default().with_env()?.seed)
}

fn emit(value: &impl serde::Serialize) -> Result<()> {
    println!("{}", serde_json::to_string(value)?);
    Ok(())
}

fn load_law(path: &Path) -> Result<Arc<dyn Distribution>> {
    read_json::<LawSpec>(path)?.build()
}

fn run(command: Command) -> Result<ExitCode> {
    match command {
        Command::Verify { config, only } => {
            let cfg = match config {
                Some(p) => read_json::<ScenarioConfig>(p)?,
                None => ScenarioConfig::default(),
            }
            .with_env()?;
            let reports = run_suite(&cfg, &only)?;
            print!("{}", to_json_lines(&reports)?);
            for r in &reports {
                eprintln!("{}", r.summary_line());
            }
            let ok = reports.iter().all(|r| r.passed);
            Ok(if ok {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            })
        }
        Command::Moments {
            law,
            order,
            level,
            seed: s,
        } => {
            let dist = load_law(&law)?;
            emit(&moment_table(dist.as_ref(), level, order, seed(s)?)?)?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Convolve {
            op,
            lhs,
            rhs,
            order,
            level,
            seed: s,
        } => {
            let (x, y) = (load_law(&lhs)?, load_law(&rhs)?);
            let dist = match op {
                Op::Free => free_convolve(x, y, order)?,
                Op::Boolean => boolean_convolve(x, y, order)?,
                Op::Monotone => monotone_convolve(x, y, order)?,
            };
            emit(&moment_table(dist.as_ref(), level, order, seed(s)?)?)?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Analytic {
            law,
            point,
            transform,
            tol,
        } => {
            let cfg = IterationConfig {
                tol,
                ..Default::default()
            };
            cfg.validate()?;
            let spec = read_json::<LawSpec>(&law)?;
            let b = half_plane_point(&point, spec.build()?.base_dim())?;
            emit(&analytic(&spec, &b, transform, &cfg)?)?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Abel { a, point, n, tol } => {
            let cfg = IterationConfig {
                tol,
                ..Default::default()
            };
            cfg.validate()?;
            let a = BElement::new(read_matrix(&a)?)?;
            let b = half_plane_point(&point, a.dim())?;
            emit(&abel_check(&a, &b, n, &cfg)?)?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Clt {
            kind,
            base,
            orders,
            n,
            seed: s,
        } => {
            let kind = match kind {
                Op::Free => CltKind::Free,
                Op::Boolean => CltKind::Boolean,
                Op::Monotone => CltKind::Monotone,
            };
            emit(&clt_experiment(
                kind,
                load_law(&base)?,
                &n,
                orders,
                seed(s)?,
            )?)?;
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn half_plane_point(path: &Path, d: usize) -> Result<HalfPlanePoint> {
    let m = read_matrix(path)?;
    if m.nrows() % d != 0 {
        return Err(Error::Dimension(format!(
            "point of size {} is not a block matrix over M_{d}",
            m.nrows()
        )));
    }
    HalfPlanePoint::new(MatricialElement::new(m.nrows() / d, d, m)?)
}

fn analytic(
    spec: &LawSpec,
    b: &HalfPlanePoint,
    transform: Transform,
    cfg: &IterationConfig,
) -> Result<serde_json::Value> {
    // (value of G or F, residual, iterations, which one was computed)
    let (value, residual, iterations, is_f) = match spec {
        LawSpec::Bernoulli { variance } => {
            (cauchy_bernoulli(&variance.to_cpmap()?, b)?, 0.0, 0, false)
        }
        LawSpec::Semicircle { variance } => {
            let g = cauchy_semicircle(&variance.to_cpmap()?, b, cfg)?;
            (g.value, g.residual, g.iterations, false)
        }
        LawSpec::Arcsine { variance } => {
            // variance c·b·c is 2·aba with a = c/√2
            let c = variance.to_cpmap()?.as_single_sandwich().ok_or_else(|| {
                Error::Argument(
                    "the analytic arcsine transform needs a single self-adjoint Kraus operator"
                        .into(),
                )
            })?;
            let a = BElement::new(c.matrix() * Complex64::new(0.5f64.sqrt(), 0.0))?;
            let f = f_arcsine(&a, b, cfg)?;
            (f.value, f.residual, f.iterations, true)
        }
        LawSpec::MatrixModel { .. } => {
            let model = spec.model()?.expect("matrix model variant");
            (model.cauchy(b.value())?, 0.0, 0, false)
        }
    };
    let out = if (transform == Transform::F) == is_f {
        value
    } else {
        value.inverse()?
    };
    Ok(json!({
        "transform": if transform == Transform::F { "F" } else { "G" },
        "level": out.level(),
        "value": matrix_to_doc(out.matrix()),
        "residual": residual,
        "iterations": iterations,
    }))
}
