//! Command-line front end: file-based matrix I/O, JSON reports with
//! fixed-precision floats, and the exit-code contract `0` success /
//! `2` infeasible-or-failed-validation (complete command) / `1` errors
//! (with a machine-readable error object on stderr).

use std::path::{Path, PathBuf};

use clap::error::ErrorKind;
use clap::{ArgGroup, Parser, Subcommand};
use serde::Serialize;

use crate::completion::{
    bunce_certificate, feasible_completion, free_radius_estimate, lemma63_check,
    min_sum_norm, row_contraction_form, validate_certificate, CompletionOutcome,
    CompletionProblem, DEFAULT_MAX_ITER, DEFAULT_TOL, DEFAULT_TRUNCATION,
};
use crate::error::{Error, Result};
use crate::json::{
    from_json_str, to_json_string, AlgebraJson, CertificateJson, MatrixJson,
    MatrixListJson, ProblemJson,
};
use crate::linalg::{CMat, HermMat};
use crate::numrad::{circle_check, free_radius_lower_bound, numerical_radius};
use crate::subalgebra::{wep_transfer, StarAlgebraBasis};

#[derive(Parser, Debug)]
#[command(
    name = "opradius",
    version,
    about = "Numerical radii, strictly positive block-tridiagonal completions, \
             and conditional-expectation transfer for matrix *-subalgebras"
)]
pub struct Cli {
    /// Write the JSON report to this file instead of stdout.
    #[arg(long, global = true)]
    pub output: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Numerical radius of a square complex matrix.
    Numrad {
        /// Matrix JSON file.
        #[arg(long)]
        input: PathBuf,
    },
    /// Check that I + e^{i t} X + e^{-i t} X* stays >= delta on the circle.
    CircleCheck {
        /// Matrix JSON file.
        #[arg(long)]
        input: PathBuf,
        /// Strictness margin.
        #[arg(long, default_value_t = 1e-9)]
        delta: f64,
    },
    /// Sampling lower bound (and bisection upper bound) for the free
    /// joint numerical radius of a matrix tuple.
    FreeNumrad {
        /// Matrix or list-of-matrices JSON file (the tuple X_1..X_n).
        #[arg(long)]
        input: PathBuf,
        /// Dimension of the sampled unitaries.
        #[arg(long, default_value_t = 2)]
        unitary_dim: usize,
        /// Number of Haar-unitary tuples to sample.
        #[arg(long, default_value_t = 64)]
        samples: usize,
        /// RNG seed.
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Skip the diagonal-sum optimization providing the upper bound.
        #[arg(long)]
        lower_only: bool,
        /// Bisection tolerance for the upper bound.
        #[arg(long, default_value_t = DEFAULT_TOL)]
        tol: f64,
    },
    /// Decide feasibility of a completion problem (exit 2 when
    /// infeasible), or re-validate an emitted certificate against it.
    #[command(group(ArgGroup::new("problem_src").required(true).args(["input", "offdiag"])))]
    Complete {
        /// Problem JSON file ({"offdiag": [...], "target_sum": ..., "delta": ...}).
        #[arg(long)]
        input: Option<PathBuf>,
        /// Off-diagonal blocks (single matrix or list of matrices).
        #[arg(long)]
        offdiag: Option<PathBuf>,
        /// Target sum with --offdiag: "identity" or a matrix JSON path.
        #[arg(long, conflicts_with = "input")]
        sum: Option<String>,
        /// Strictness margin (also the default when the problem file
        /// does not set one).
        #[arg(long, default_value_t = 1e-6)]
        delta: f64,
        /// Iteration budget for the projection solver.
        #[arg(long, default_value_t = DEFAULT_MAX_ITER)]
        max_iter: usize,
        /// Validate this certificate instead of solving (exit 2 when the
        /// validation fails).
        #[arg(long)]
        validate: Option<PathBuf>,
    },
    /// Minimize t over strictly positive completions with diagonal sum t I.
    MinSum {
        /// Off-diagonal blocks (single matrix or list of matrices).
        #[arg(long)]
        offdiag: PathBuf,
        /// Bisection tolerance.
        #[arg(long, default_value_t = DEFAULT_TOL)]
        tol: f64,
    },
    /// 2x2 certificate (a, b) with a + b = I for a block with w(x) < 1/2.
    Bunce {
        /// Matrix JSON file.
        #[arg(long)]
        input: PathBuf,
        /// Recursion depth.
        #[arg(long, default_value_t = DEFAULT_TRUNCATION)]
        truncation: usize,
    },
    /// Dual-route strict positivity check of the identity-diagonal
    /// three-block tridiagonal matrix.
    Lemma63 {
        /// First off-diagonal block.
        #[arg(long)]
        x1: PathBuf,
        /// Second off-diagonal block.
        #[arg(long)]
        x2: PathBuf,
        /// Strictness margin.
        #[arg(long, default_value_t = 1e-9)]
        delta: f64,
    },
    /// Row-contraction form of the three-block matrix with prescribed
    /// strictly positive diagonal (A, B, C) summing to I.
    RowForm {
        #[arg(long)]
        a: PathBuf,
        #[arg(long)]
        b: PathBuf,
        #[arg(long)]
        c: PathBuf,
        #[arg(long)]
        x1: PathBuf,
        #[arg(long)]
        x2: PathBuf,
        /// Margin required of A, B, C.
        #[arg(long, default_value_t = 1e-6)]
        delta: f64,
    },
    /// Orthonormal basis of the unital *-algebra generated by the given
    /// matrices.
    AlgebraBuild {
        /// Algebra JSON file ({"ambient_dim": d, "generators": [...]}).
        #[arg(long)]
        input: PathBuf,
    },
    /// Conditional expectation of a matrix onto a subalgebra.
    Expect {
        /// Algebra JSON file.
        #[arg(long)]
        algebra: PathBuf,
        /// Matrix JSON file.
        #[arg(long)]
        input: PathBuf,
    },
    /// Transfer a feasible ambient completion into a subalgebra by the
    /// blockwise conditional expectation.
    WepTransfer {
        /// Algebra JSON file.
        #[arg(long)]
        algebra: PathBuf,
        /// Problem JSON file.
        #[arg(long)]
        problem: PathBuf,
        /// Certificate JSON file.
        #[arg(long)]
        certificate: PathBuf,
        /// Default margin when the problem file does not set one.
        #[arg(long, default_value_t = 1e-6)]
        delta: f64,
    },
}

#[derive(Serialize)]
struct RadiusOut {
    value: f64,
    argmax_theta: f64,
    grid_points: usize,
    refined: bool,
}

#[derive(Serialize)]
struct CircleOut {
    holds: bool,
    worst_theta: f64,
    worst_lambda_min: f64,
}

#[derive(Serialize)]
struct FreeOut {
    lower: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    upper: Option<f64>,
    witness_dim: usize,
    samples_used: usize,
    seed: u64,
    witness_unitaries: Vec<MatrixJson>,
}

#[derive(Serialize)]
struct InfeasibleOut {
    iterations: usize,
    best_lambda_min: f64,
    cone_residual: f64,
    affine_residual: f64,
}

#[derive(Serialize)]
struct CompleteOut {
    feasible: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    certificate: Option<CertificateJson>,
    #[serde(skip_serializing_if = "Option::is_none")]
    report: Option<InfeasibleOut>,
}

#[derive(Serialize)]
struct ValidateOut {
    lambda_min_assembled: f64,
    sum_residual: f64,
    lambda_min_pass: bool,
    sum_pass: bool,
    pass: bool,
}

#[derive(Serialize)]
struct MinSumOut {
    t_star: f64,
    bisection_steps: usize,
    certificate: CertificateJson,
}

#[derive(Serialize)]
struct BunceOut {
    a: MatrixJson,
    b: MatrixJson,
    truncation: usize,
    tail_change: f64,
}

#[derive(Serialize)]
struct Lemma63Out {
    via_matrix: bool,
    via_row: bool,
    matrix_lambda_min: f64,
    row_lambda_min: f64,
}

#[derive(Serialize)]
struct RowFormOut {
    row_norm: f64,
    equivalent_matrix_strict: bool,
    matrix_lambda_min: f64,
}

#[derive(Serialize)]
struct AlgebraOut {
    ambient_dim: usize,
    dim: usize,
    basis: Vec<MatrixJson>,
}

#[derive(Serialize)]
struct ExpectOut {
    expectation: MatrixJson,
    membership_residual: f64,
}

#[derive(Serialize)]
struct TransferOut {
    original_lambda_min: f64,
    transferred_lambda_min: f64,
    sum_residual: f64,
    membership_residuals: Vec<f64>,
    transferred_blocks: Vec<MatrixJson>,
}

#[derive(Serialize)]
struct ErrorOut {
    code: String,
    message: String,
}

fn read_file(path: &Path) -> Result<String> {
    Ok(std::fs::read_to_string(path)?)
}

fn load_matrix(path: &Path) -> Result<CMat> {
    from_json_str::<MatrixJson>(&read_file(path)?)?.to_cmat()
}

fn load_matrices(path: &Path) -> Result<Vec<CMat>> {
    from_json_str::<MatrixListJson>(&read_file(path)?)?.to_cmats()
}

fn load_herm(path: &Path) -> Result<HermMat> {
    from_json_str::<MatrixJson>(&read_file(path)?)?.to_herm()
}

fn load_algebra(path: &Path) -> Result<StarAlgebraBasis> {
    from_json_str::<AlgebraJson>(&read_file(path)?)?.build()
}

fn emit(output: &Option<PathBuf>, report: &str) -> Result<()> {
    match output {
        Some(path) => Ok(std::fs::write(path, format!("{report}\n"))?),
        None => {
            println!("{report}");
            Ok(())
        }
    }
}

fn execute(command: Command) -> Result<(String, i32)> {
    match command {
        Command::Numrad { input } => {
            let r = numerical_radius(&load_matrix(&input)?)?;
            let out = RadiusOut {
                value: r.value,
                argmax_theta: r.argmax_theta,
                grid_points: r.grid_points,
                refined: r.refined,
            };
            Ok((to_json_string(&out)?, 0))
        }
        Command::CircleCheck { input, delta } => {
            let r = circle_check(&load_matrix(&input)?, delta)?;
            let out = CircleOut {
                holds: r.holds,
                worst_theta: r.worst_theta,
                worst_lambda_min: r.worst_lambda_min,
            };
            Ok((to_json_string(&out)?, 0))
        }
        Command::FreeNumrad { input, unitary_dim, samples, seed, lower_only, tol } => {
            let xs = load_matrices(&input)?;
            let est = if lower_only {
                free_radius_lower_bound(&xs, unitary_dim, samples, seed)?
            } else {
                free_radius_estimate(&xs, unitary_dim, samples, seed, tol)?
            };
            let out = FreeOut {
                lower: est.lower,
                upper: est.upper,
                witness_dim: est.witness_dim,
                samples_used: est.samples_used,
                seed: est.seed,
                witness_unitaries: est
                    .witness_unitaries
                    .iter()
                    .map(MatrixJson::from_cmat)
                    .collect(),
            };
            Ok((to_json_string(&out)?, 0))
        }
        Command::Complete { input, offdiag, sum, delta, max_iter, validate } => {
            let prob = match (&input, &offdiag) {
                (Some(path), None) => {
                    from_json_str::<ProblemJson>(&read_file(path)?)?.to_problem(delta)?
                }
                (None, Some(path)) => {
                    let blocks = load_matrices(path)?;
                    match sum.as_deref() {
                        None | Some("identity") => {
                            CompletionProblem::with_identity_sum(blocks, delta)?
                        }
                        Some(matrix_path) => CompletionProblem::new(
                            blocks,
                            load_herm(Path::new(matrix_path))?,
                            delta,
                        )?,
                    }
                }
                _ => unreachable!("clap enforces exactly one problem source"),
            };
            if let Some(cert_path) = validate {
                let cert =
                    from_json_str::<CertificateJson>(&read_file(&cert_path)?)?.to_certificate()?;
                let rep = validate_certificate(&prob, &cert)?;
                let out = ValidateOut {
                    lambda_min_assembled: rep.lambda_min_assembled,
                    sum_residual: rep.sum_residual,
                    lambda_min_pass: rep.lambda_min_pass,
                    sum_pass: rep.sum_pass,
                    pass: rep.pass,
                };
                let code = if rep.pass { 0 } else { 2 };
                return Ok((to_json_string(&out)?, code));
            }
            match feasible_completion(&prob, max_iter)? {
                CompletionOutcome::Feasible(cert) => {
                    let out = CompleteOut {
                        feasible: true,
                        certificate: Some(CertificateJson::from_certificate(&cert)),
                        report: None,
                    };
                    Ok((to_json_string(&out)?, 0))
                }
                CompletionOutcome::Infeasible(rep) => {
                    let out = CompleteOut {
                        feasible: false,
                        certificate: None,
                        report: Some(InfeasibleOut {
                            iterations: rep.iterations,
                            best_lambda_min: rep.best_lambda_min,
                            cone_residual: rep.cone_residual,
                            affine_residual: rep.affine_residual,
                        }),
                    };
                    Ok((to_json_string(&out)?, 2))
                }
            }
        }
        Command::MinSum { offdiag, tol } => {
            let res = min_sum_norm(&load_matrices(&offdiag)?, tol)?;
            let out = MinSumOut {
                t_star: res.t_star,
                bisection_steps: res.bisection_steps,
                certificate: CertificateJson::from_certificate(&res.certificate),
            };
            Ok((to_json_string(&out)?, 0))
        }
        Command::Bunce { input, truncation } => {
            let res = bunce_certificate(&load_matrix(&input)?, truncation)?;
            let out = BunceOut {
                a: MatrixJson::from_cmat(res.a.mat()),
                b: MatrixJson::from_cmat(res.b.mat()),
                truncation: res.truncation,
                tail_change: res.tail_change,
            };
            Ok((to_json_string(&out)?, 0))
        }
        Command::Lemma63 { x1, x2, delta } => {
            let rep = lemma63_check(&load_matrix(&x1)?, &load_matrix(&x2)?, delta)?;
            let out = Lemma63Out {
                via_matrix: rep.via_matrix,
                via_row: rep.via_row,
                matrix_lambda_min: rep.matrix_lambda_min,
                row_lambda_min: rep.row_lambda_min,
            };
            Ok((to_json_string(&out)?, 0))
        }
        Command::RowForm { a, b, c, x1, x2, delta } => {
            let rep = row_contraction_form(
                &load_herm(&a)?,
                &load_herm(&b)?,
                &load_herm(&c)?,
                &load_matrix(&x1)?,
                &load_matrix(&x2)?,
                delta,
            )?;
            let out = RowFormOut {
                row_norm: rep.row_norm,
                equivalent_matrix_strict: rep.equivalent_matrix_strict,
                matrix_lambda_min: rep.matrix_lambda_min,
            };
            Ok((to_json_string(&out)?, 0))
        }
        Command::AlgebraBuild { input } => {
            let alg = load_algebra(&input)?;
            let out = AlgebraOut {
                ambient_dim: alg.ambient_dim(),
                dim: alg.dim(),
                basis: alg.basis().iter().map(MatrixJson::from_cmat).collect(),
            };
            Ok((to_json_string(&out)?, 0))
        }
        Command::Expect { algebra, input } => {
            let alg = load_algebra(&algebra)?;
            let m = load_matrix(&input)?;
            let e = alg.expect(&m)?;
            let out = ExpectOut {
                membership_residual: m.sub(&e).frobenius_norm(),
                expectation: MatrixJson::from_cmat(&e),
            };
            Ok((to_json_string(&out)?, 0))
        }
        Command::WepTransfer { algebra, problem, certificate, delta } => {
            let alg = load_algebra(&algebra)?;
            let prob = from_json_str::<ProblemJson>(&read_file(&problem)?)?.to_problem(delta)?;
            let cert =
                from_json_str::<CertificateJson>(&read_file(&certificate)?)?.to_certificate()?;
            let rep = wep_transfer(&alg, &prob, &cert)?;
            let out = TransferOut {
                original_lambda_min: rep.original_lambda_min,
                transferred_lambda_min: rep.transferred_lambda_min,
                sum_residual: rep.sum_residual,
                membership_residuals: rep.membership_residuals,
                transferred_blocks: rep
                    .transferred_blocks
                    .iter()
                    .map(|m| MatrixJson::from_cmat(m.mat()))
                    .collect(),
            };
            Ok((to_json_string(&out)?, 0))
        }
    }
}

fn report_error(err: &Error) -> String {
    let out = ErrorOut { code: err.code().to_string(), message: err.to_string() };
    to_json_string(&out).unwrap_or_else(|_| {
        format!("{{\"code\":\"{}\",\"message\":\"serialization failed\"}}", err.code())
    })
}

/// Run a parsed command line: emit the report, return the process exit
/// code, and print a machine-readable error object to stderr on failure.
pub fn run(cli: Cli) -> i32 {
    match execute(cli.command) {
        Ok((report, code)) => match emit(&cli.output, &report) {
            Ok(()) => code,
            Err(err) => {
                eprintln!("{}", report_error(&err));
                1
            }
        },
        Err(err) => {
            eprintln!("{}", report_error(&err));
            1
        }
    }
}

/// Process entry point: argument errors exit 1 with an error object
/// (help/version still exit 0).
pub fn main_entry() -> i32 {
    match Cli::try_parse() {
        Ok(cli) => run(cli),
        Err(e) if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) => {
            print!("{e}");
            0
        }
        Err(e) => {
            let out = ErrorOut {
                code: "invalid-parameter".to_string(),
                message: e.to_string(),
            };
            eprintln!("{}", to_json_string(&out).unwrap_or_default());
            1
        }
    }
}
