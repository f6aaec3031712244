//! Batch front-end for the `uuqc` library.
//!
//! Every subcommand reads JSON documents, writes a JSON report to standard
//! output (or `--out`) and a one-line summary to standard error.
//!
//! Exit codes: 0 success, 1 invalid input, 2 numerical failure, 3 negative
//! verdict from a certification subcommand.

use std::io::{Read, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde::de::DeserializeOwned;
use serde_json::{json, Value};
use uuqc::densecode::{capacity, optimal_protocol, simulate, verify_protocol_bound, SharedState};
use uuqc::entanglement::{schmidt, sweep_mixed_nonzero, teleport_probability_pure, ues_to_uuqc, uuqc_to_ues};
use uuqc::io::{parse, ChannelDocument, CodeDocument, MatrixDocument};
use uuqc::qec::{
    choi_is_ues, construct_recovery, kl_check, unambiguous_correction_probability, verify_correction_uuqc,
};
use uuqc::unambiguous::{certify_uum, certify_uuqc, refine, EnvBases, UumCertificate, UuqcCertificate};
use uuqc::{Channel, Error, Layout, Matrix, Subspace};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INVALID: i32 = 1;
pub const EXIT_NUMERICAL: i32 = 2;
pub const EXIT_NEGATIVE: i32 = 3;

#[derive(Parser, Debug)]
#[command(
    name = "uuqc",
    version,
    about = "Certify unambiguous unitary channels and related protocols"
)]
struct Cli {
    #[command(flatten)]
    config: RunConfig,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone)]
struct RunConfig {
    /// Numerical tolerance for every verdict.
    #[arg(long, global = true, default_value_t = 1e-9)]
    tol: f64,
    /// Seed for every randomised step.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Monte Carlo trials.
    #[arg(long, global = true, default_value_t = 100_000)]
    trials: u64,
    /// Report destination; standard output when absent.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug, Clone)]
struct LayoutArgs {
    #[arg(long, default_value_t = 1)]
    env_in: usize,
    #[arg(long, default_value_t = 1)]
    env_out: usize,
    /// Isometry (matrix document) spanning the input subspace.
    #[arg(long)]
    input_subspace: Option<PathBuf>,
    /// Isometry (matrix document) spanning the output subspace.
    #[arg(long)]
    output_subspace: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Certify a single operator as an unambiguous unitary map.
    CheckUum {
        operator: PathBuf,
        #[command(flatten)]
        layout: LayoutArgs,
    },
    /// Certify a channel as an unambiguous unitary channel.
    CheckUuqc {
        channel: PathBuf,
        #[command(flatten)]
        layout: LayoutArgs,
    },
    /// Replace the elements of a certified channel by rank-one environment elements.
    Refine {
        channel: PathBuf,
        #[command(flatten)]
        layout: LayoutArgs,
        /// Unitary (matrix document) whose columns are the input environment basis.
        #[arg(long)]
        env_in_basis: Option<PathBuf>,
        /// Unitary (matrix document) whose columns are the output environment basis.
        #[arg(long)]
        env_out_basis: Option<PathBuf>,
    },
    /// Send half of a maximally entangled state through a certified channel.
    ToUes {
        channel: PathBuf,
        #[command(flatten)]
        layout: LayoutArgs,
    },
    /// Teleportation: build the scheme, or bound its probability over a shared state.
    Teleport {
        /// Shared state: a ket (one column) or a density matrix.
        state: Option<PathBuf>,
        /// Dimension to teleport.
        #[arg(long)]
        d: usize,
        /// Factor dimensions `a,b` of the shared state.
        #[arg(long, value_delimiter = ',')]
        dims: Option<Vec<usize>>,
    },
    /// Knill-Laflamme check, with a recovery when the errors are correctable.
    KlCheck { code: PathBuf, errors: PathBuf },
    /// Probability of unambiguously correcting a noise channel on a code.
    EcProb { code: PathBuf, noise: PathBuf },
    /// Simulate the optimal dense coding protocol.
    DenseCode {
        #[arg(long = "D")]
        rank: Option<usize>,
        /// Squared Schmidt coefficients, comma separated.
        #[arg(long, value_delimiter = ',', required = true)]
        lambdas2: Vec<f64>,
    },
    /// Check a dense coding protocol against the success bound.
    VerifyDc {
        /// Channel document whose elements are the encoders.
        encoders: PathBuf,
        /// Bob's operator (matrix document).
        bob: PathBuf,
        #[arg(long, value_delimiter = ',', required = true)]
        lambdas2: Vec<f64>,
    },
    /// Schmidt decomposition of a bipartite ket.
    Schmidt {
        state: PathBuf,
        #[arg(long, value_delimiter = ',')]
        dims: Option<Vec<usize>>,
    },
}

/// A failed run: the exit code and a message for standard error.
#[derive(Debug)]
struct Failure {
    code: i32,
    message: String,
}

impl Failure {
    fn invalid(message: impl Into<String>) -> Self {
        Self {
            code: EXIT_INVALID,
            message: message.into(),
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::NoConvergence { .. } => EXIT_NUMERICAL,
            Error::NotUuqc(_) | Error::NotCorrectable { .. } => EXIT_NEGATIVE,
            _ => EXIT_INVALID,
        };
        Self {
            code,
            message: e.to_string(),
        }
    }
}

/// Report plus summary line; `positive = false` maps to exit 3.
struct Outcome {
    report: Value,
    summary: String,
    positive: bool,
}

/// Parses `args` (program name first), runs the subcommand and returns the
/// exit code.
pub fn run<I, S>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let text = e.render().to_string();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = write!(out, "{text}");
                    EXIT_OK
                }
                _ => {
                    let _ = write!(err, "{text}");
                    EXIT_INVALID
                }
            };
        }
    };
    match execute(&cli) {
        Ok(outcome) => {
            let mut text = serde_json::to_string_pretty(&outcome.report).expect("reports serialise");
            text.push('\n');
            if let Err(f) = emit(&cli.config, &text, out) {
                let _ = writeln!(err, "error: {}", f.message);
                return f.code;
            }
            let _ = writeln!(err, "{}", outcome.summary);
            if outcome.positive {
                EXIT_OK
            } else {
                EXIT_NEGATIVE
            }
        }
        Err(f) => {
            let _ = writeln!(err, "error: {}", f.message);
            f.code
        }
    }
}

fn emit(config: &RunConfig, text: &str, out: &mut dyn Write) -> Result<(), Failure> {
    match &config.out {
        Some(path) => std::fs::write(path, text)
            .map_err(|e| Failure::invalid(format!("cannot write report to {}: {e}", path.display()))),
        None => out
            .write_all(text.as_bytes())
            .map_err(|e| Failure::invalid(format!("cannot write report: {e}"))),
    }
}

fn execute(cli: &Cli) -> Result<Outcome, Failure> {
    let config = &cli.config;
    if !(config.tol > 0.0 && config.tol.is_finite()) {
        return Err(Failure::invalid(format!("--tol must be positive, got {}", config.tol)));
    }
    if config.trials == 0 {
        return Err(Failure::invalid("--trials must be at least 1"));
    }
    let mut outcome = match &cli.command {
        Command::CheckUum { operator, layout } => check_uum(config, operator, layout)?,
        Command::CheckUuqc { channel, layout } => check_uuqc(config, channel, layout)?,
        Command::Refine {
            channel,
            layout,
            env_in_basis,
            env_out_basis,
        } => refine_cmd(
            config,
            channel,
            layout,
            env_in_basis.as_deref(),
            env_out_basis.as_deref(),
        )?,
        Command::ToUes { channel, layout } => to_ues(config, channel, layout)?,
        Command::Teleport { state, d, dims } => teleport(config, state.as_deref(), *d, dims.as_deref())?,
        Command::KlCheck { code, errors } => kl(config, code, errors)?,
        Command::EcProb { code, noise } => ec_prob(config, code, noise)?,
        Command::DenseCode { rank, lambdas2 } => dense_code(config, *rank, lambdas2)?,
        Command::VerifyDc {
            encoders,
            bob,
            lambdas2,
        } => verify_dc(config, encoders, bob, lambdas2)?,
        Command::Schmidt { state, dims } => schmidt_cmd(config, state, dims.as_deref())?,
    };
    if let Value::Object(map) = &mut outcome.report {
        map.insert("config".into(), json!({ "tol": config.tol, "seed": config.seed }));
    }
    Ok(outcome)
}

fn read_text(path: &Path) -> Result<String, Failure> {
    if path == Path::new("-") {
        let mut s = String::new();
        std::io::stdin()
            .read_to_string(&mut s)
            .map_err(|e| Failure::invalid(format!("cannot read standard input: {e}")))?;
        return Ok(s);
    }
    std::fs::read_to_string(path).map_err(|e| Failure::invalid(format!("cannot read {}: {e}", path.display())))
}

fn read_doc<D: DeserializeOwned>(path: &Path) -> Result<D, Failure> {
    parse(&read_text(path)?).map_err(|e| Failure::invalid(format!("{}: {e}", path.display())))
}

fn read_matrix(path: &Path) -> Result<Matrix, Failure> {
    read_doc::<MatrixDocument>(path)?
        .to_matrix()
        .map_err(|e| Failure::invalid(format!("{}: {e}", path.display())))
}

fn read_channel(path: &Path) -> Result<Channel, Failure> {
    read_doc::<ChannelDocument>(path)?
        .to_channel()
        .map_err(|e| Failure::invalid(format!("{}: {e}", path.display())))
}

fn read_code(path: &Path, tol: f64) -> Result<uuqc::Code, Failure> {
    read_doc::<CodeDocument>(path)?
        .to_code(tol)
        .map_err(|e| Failure::invalid(format!("{}: {e}", path.display())))
}

fn matrix_value(m: &Matrix) -> Value {
    serde_json::to_value(MatrixDocument::from_matrix(m)).expect("matrices serialise")
}

fn subspace_arg(path: Option<&Path>, ambient: usize, env: usize, tol: f64, flag: &str) -> Result<Subspace, Failure> {
    if env == 0 || !ambient.is_multiple_of(env) {
        return Err(Failure::invalid(format!(
            "operator dimension {ambient} is not a multiple of the environment dimension {env}"
        )));
    }
    match path {
        Some(p) => {
            let cols = read_matrix(p)?;
            if cols.rows() * env != ambient {
                return Err(Failure::invalid(format!(
                    "{flag}: isometry has {} rows, expected {}",
                    cols.rows(),
                    ambient / env
                )));
            }
            Subspace::new(cols, tol.max(1e-12)).map_err(|e| Failure::invalid(format!("{flag}: {e}")))
        }
        None => Ok(Subspace::full(ambient / env)),
    }
}

fn layout_for(args: &LayoutArgs, out_dim: usize, in_dim: usize, tol: f64) -> Result<Layout, Failure> {
    let input = subspace_arg(
        args.input_subspace.as_deref(),
        in_dim,
        args.env_in,
        tol,
        "--input-subspace",
    )?;
    let output = subspace_arg(
        args.output_subspace.as_deref(),
        out_dim,
        args.env_out,
        tol,
        "--output-subspace",
    )?;
    Ok(Layout::new(input, output, args.env_in, args.env_out)?)
}

fn uum_value(c: &UumCertificate<f64>) -> Value {
    json!({
        "is_uum": c.is_uum,
        "probability": c.probability,
        "unitary": matrix_value(&c.unitary),
        "env_factor": matrix_value(&c.env_factor),
        "residual": c.residual,
        "unitarity_defect": c.unitarity_defect,
        "schmidt_values": c.schmidt_values,
    })
}

fn uuqc_value(c: &UuqcCertificate<f64>) -> Value {
    json!({
        "is_uuqc": c.is_uuqc,
        "total_probability": c.total_probability,
        "per_element_probability": c.probabilities(),
        "per_element_residual": c.per_element.iter().map(|e| e.residual).collect::<Vec<_>>(),
        "unitary": c.unitary.as_ref().map(matrix_value),
        "non_uum_elements": c.non_uum_elements,
        "offending_pair": c.offending_pair,
        "direct_probability": c.direct_probability,
        "definition_residual": c.definition_residual,
    })
}

fn check_uum(config: &RunConfig, path: &Path, args: &LayoutArgs) -> Result<Outcome, Failure> {
    let omega = read_matrix(path)?;
    let layout = layout_for(args, omega.rows(), omega.cols(), config.tol)?;
    let cert = certify_uum(&omega, &layout, config.tol)?;
    let summary = if cert.is_uum {
        format!("check-uum: unambiguous unitary map, p = {:.12}", cert.probability)
    } else {
        format!(
            "check-uum: not an unambiguous unitary map, residual {:.3e}",
            cert.residual
        )
    };
    Ok(Outcome {
        report: json!({ "command": "check-uum", "verdict": cert.is_uum, "certificate": uum_value(&cert) }),
        summary,
        positive: cert.is_uum,
    })
}

fn check_uuqc(config: &RunConfig, path: &Path, args: &LayoutArgs) -> Result<Outcome, Failure> {
    let ch = read_channel(path)?;
    let layout = layout_for(args, ch.out_dim(), ch.in_dim(), config.tol)?;
    let cert = certify_uuqc(&ch, &layout, config.tol)?;
    let summary = if cert.is_uuqc {
        format!(
            "check-uuqc: unambiguous unitary channel, q = {:.12}",
            cert.total_probability
        )
    } else {
        format!(
            "check-uuqc: rejected (non-product elements {:?}, mismatched pair {:?})",
            cert.non_uum_elements, cert.offending_pair
        )
    };
    Ok(Outcome {
        report: json!({ "command": "check-uuqc", "verdict": cert.is_uuqc, "certificate": uuqc_value(&cert) }),
        summary,
        positive: cert.is_uuqc,
    })
}

fn refine_cmd(
    config: &RunConfig,
    path: &Path,
    args: &LayoutArgs,
    env_in_basis: Option<&Path>,
    env_out_basis: Option<&Path>,
) -> Result<Outcome, Failure> {
    let ch = read_channel(path)?;
    let layout = layout_for(args, ch.out_dim(), ch.in_dim(), config.tol)?;
    let mut bases = EnvBases::computational(args.env_in, args.env_out);
    if let Some(p) = env_in_basis {
        bases.input = vec![read_matrix(p)?];
    }
    if let Some(p) = env_out_basis {
        bases.output = vec![read_matrix(p)?];
    }
    let refined = refine(&ch, &layout, &bases, config.tol)?;
    let cert = certify_uuqc(&refined, &layout, config.tol)?;
    Ok(Outcome {
        summary: format!("refine: {} elements, q = {:.12}", refined.len(), cert.total_probability),
        report: json!({
            "command": "refine",
            "verdict": cert.is_uuqc,
            "channel": serde_json::to_value(ChannelDocument::from_channel(&refined)).expect("channels serialise"),
            "certificate": uuqc_value(&cert),
        }),
        positive: cert.is_uuqc,
    })
}

fn to_ues(config: &RunConfig, path: &Path, args: &LayoutArgs) -> Result<Outcome, Failure> {
    let ch = read_channel(path)?;
    let layout = layout_for(args, ch.out_dim(), ch.in_dim(), config.tol)?;
    let conv = uuqc_to_ues(&ch, &layout, config.tol)?;
    Ok(Outcome {
        summary: format!("to-ues: success probability {:.12}", conv.probability),
        report: json!({
            "command": "to-ues",
            "verdict": true,
            "probability": conv.probability,
            "output": matrix_value(&conv.output),
            "purity_defect": conv.purity_defect,
            "certificate": uuqc_value(&conv.certificate),
        }),
        positive: true,
    })
}

fn split_dims(dims: Option<&[usize]>, total: usize) -> Result<(usize, usize), Failure> {
    match dims {
        Some([a, b]) => {
            if a * b != total {
                return Err(Failure::invalid(format!(
                    "--dims {a},{b} does not match state dimension {total}"
                )));
            }
            Ok((*a, *b))
        }
        Some(other) => Err(Failure::invalid(format!(
            "--dims needs two entries, got {}",
            other.len()
        ))),
        None => {
            let a = (total as f64).sqrt().round() as usize;
            if a * a != total {
                return Err(Failure::invalid(format!(
                    "state dimension {total} is not a square; pass --dims"
                )));
            }
            Ok((a, a))
        }
    }
}

fn teleport(config: &RunConfig, state: Option<&Path>, d: usize, dims: Option<&[usize]>) -> Result<Outcome, Failure> {
    let Some(path) = state else {
        let scheme = ues_to_uuqc::<f64>(d)?;
        let layout = Layout::full(d, 1, 1)?;
        let cert = certify_uuqc(&scheme.channel, &layout, config.tol)?;
        return Ok(Outcome {
            summary: format!("teleport: {}-level scheme, q = {:.12}", d, cert.total_probability),
            report: json!({
                "command": "teleport",
                "verdict": cert.is_uuqc,
                "channel": serde_json::to_value(ChannelDocument::from_channel(&scheme.channel)).expect("channels serialise"),
                "corrections": scheme.corrections.iter().map(matrix_value).collect::<Vec<_>>(),
                "certificate": uuqc_value(&cert),
            }),
            positive: cert.is_uuqc,
        });
    };
    let rho = read_matrix(path)?;
    let (da, db) = split_dims(dims, rho.rows())?;
    let (cert, kind) = if rho.cols() == 1 {
        (teleport_probability_pure(&rho, da, db, d, config.tol)?, "pure")
    } else if rho.is_square() {
        (sweep_mixed_nonzero(&rho, (da, db), d, config.tol)?, "mixed")
    } else {
        return Err(Failure::invalid(format!(
            "{}: expected a ket or a square density matrix, found {}x{}",
            path.display(),
            rho.rows(),
            rho.cols()
        )));
    };
    let witness = cert
        .witness_subspaces
        .as_ref()
        .map(|(v3, v2)| json!({ "sender": matrix_value(v3.columns()), "receiver": matrix_value(v2.columns()) }));
    Ok(Outcome {
        summary: format!(
            "teleport: {kind} state, {} probability {:.12}",
            if cert.nonzero { "nonzero" } else { "zero" },
            cert.probability
        ),
        report: json!({
            "command": "teleport",
            "verdict": cert.nonzero,
            "state_kind": kind,
            "probability": cert.probability,
            "probability_is_lower_bound": kind == "mixed",
            "d": cert.rank_d,
            "witness": witness,
        }),
        positive: cert.nonzero,
    })
}

fn kl(config: &RunConfig, code_path: &Path, errors_path: &Path) -> Result<Outcome, Failure> {
    let code = read_code(code_path, config.tol)?;
    let errors = read_channel(errors_path)?;
    let report = kl_check(&code, &errors, config.tol)?;
    let mut value = json!({
        "command": "kl-check",
        "verdict": report.correctable,
        "h": matrix_value(&report.h),
        "residual": report.residual,
    });
    let summary = if report.correctable {
        let recovery = construct_recovery(&code, &errors, config.tol)?;
        let cert = verify_correction_uuqc(&code, &errors, &recovery, config.tol)?;
        value["recovery"] = serde_json::to_value(ChannelDocument::from_channel(&recovery)).expect("channels serialise");
        value["correction_probability"] = json!(cert.probability);
        value["fully_corrects"] = json!(cert.fully_corrects);
        format!(
            "kl-check: correctable, recovery succeeds with q = {:.12}",
            cert.probability
        )
    } else {
        format!("kl-check: not correctable, residual {:.3e}", report.residual)
    };
    Ok(Outcome {
        report: value,
        summary,
        positive: report.correctable,
    })
}

fn ec_prob(config: &RunConfig, code_path: &Path, noise_path: &Path) -> Result<Outcome, Failure> {
    let code = read_code(code_path, config.tol)?;
    let noise = read_channel(noise_path)?;
    let res = unambiguous_correction_probability(&code, &noise, config.tol, config.seed)?;
    let ues = choi_is_ues(&code, &noise, config.tol)?;
    Ok(Outcome {
        summary: format!("ec-prob: {:.12} ({})", res.probability, res.method.tag()),
        report: json!({
            "command": "ec-prob",
            "probability": res.probability,
            "method": res.method.tag(),
            "choi_weight": res.choi_weight,
            "choi_is_ues": ues.is_ues,
            "choi_is_pure": ues.pure,
            "choi_schmidt_coefficients": ues.coefficients,
        }),
        positive: true,
    })
}

fn shared_state(rank: Option<usize>, lambdas2: &[f64]) -> Result<SharedState<f64>, Failure> {
    if let Some(d) = rank {
        if d != lambdas2.len() {
            return Err(Failure::invalid(format!(
                "--D {d} but --lambdas2 has {} entries",
                lambdas2.len()
            )));
        }
    }
    SharedState::from_squared(lambdas2).map_err(|e| Failure::invalid(format!("--lambdas2: {e}")))
}

fn dense_code(config: &RunConfig, rank: Option<usize>, lambdas2: &[f64]) -> Result<Outcome, Failure> {
    let state = shared_state(rank, lambdas2)?;
    let protocol = optimal_protocol(&state);
    let sim = simulate(&state, &protocol, config.trials, config.seed)?;
    let cap = capacity(&state);
    let sigma = (cap * (1.0 - cap) / config.trials as f64).sqrt();
    let per_message: Vec<Value> = sim
        .per_message
        .iter()
        .map(|m| json!({ "sent": m.sent, "successes": m.successes, "rate": m.success_rate(), "decode_errors": m.decode_errors }))
        .collect();
    Ok(Outcome {
        summary: format!(
            "dense-code: capacity {:.12}, simulated {:.6} over {} trials",
            cap,
            sim.pooled_rate(),
            sim.trials
        ),
        report: json!({
            "command": "dense-code",
            "rank": state.rank(),
            "capacity": cap,
            "trials": sim.trials,
            "pooled_rate": sim.pooled_rate(),
            "binomial_sigma": sigma,
            "filter_failures": sim.filter_failures,
            "decode_errors": sim.decode_errors,
            "per_message": per_message,
        }),
        positive: true,
    })
}

fn verify_dc(config: &RunConfig, encoders: &Path, bob: &Path, lambdas2: &[f64]) -> Result<Outcome, Failure> {
    let state = shared_state(None, lambdas2)?;
    let enc = read_channel(encoders)?;
    let b = read_matrix(bob)?;
    let check = verify_protocol_bound(&state, enc.elements(), &b, config.tol)?;
    let ok = check.form_holds && check.within_bound && check.trace_condition_holds;
    Ok(Outcome {
        summary: format!(
            "verify-dc: success {:.12} against bound {:.12}{}",
            check.success_probability,
            check.bound,
            if check.form_holds {
                ""
            } else {
                " (not uniform over messages)"
            }
        ),
        report: json!({
            "command": "verify-dc",
            "verdict": ok,
            "r": [check.r.re, check.r.im],
            "form_holds": check.form_holds,
            "form_residual": check.form_residual,
            "success_probability": check.success_probability,
            "bound": check.bound,
            "within_bound": check.within_bound,
            "trace_condition_max": check.trace_condition_max,
            "trace_condition_holds": check.trace_condition_holds,
        }),
        positive: ok,
    })
}

fn schmidt_cmd(config: &RunConfig, path: &Path, dims: Option<&[usize]>) -> Result<Outcome, Failure> {
    let psi = read_matrix(path)?;
    if psi.cols() != 1 {
        return Err(Failure::invalid(format!(
            "{}: expected a ket, found {} columns",
            path.display(),
            psi.cols()
        )));
    }
    let (da, db) = split_dims(dims, psi.rows())?;
    let sf = schmidt(&psi, da, db, config.tol)?;
    Ok(Outcome {
        summary: format!("schmidt: rank {}, coefficients {:?}", sf.rank, sf.coefficients),
        report: json!({
            "command": "schmidt",
            "coefficients": sf.coefficients,
            "rank": sf.rank,
            "left_basis": matrix_value(sf.left_basis.columns()),
            "right_basis": matrix_value(sf.right_basis.columns()),
        }),
        positive: true,
    })
}
