//! Batch command-line surface over the exact bispectral engine: operator
//! algebra, Fourier images, bisymmetry verification, endpoint solving, and
//! rank-1 Grassmannian synthesis.
//!
//! Exit codes: 0 success, 1 validation error, 2 parse error, 3 solve
//! completed but only constant solutions exist, 4 Grassmannian plane
//! rejected (not Lagrangian or not σ-stable).

use std::collections::BTreeMap;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use bispec::context::Context;
use bispec::darboux::{BoundsOverride, CandidatePair, DarbouxTransform, Provenance};
use bispec::exactnum::{G, Poly, Var};
use bispec::grassmannian::{
    is_lagrangian, is_sigma_stable, to_darboux, AdelicPlane, ConditionFunctional, GrassError,
};
use bispec::orealg::OreOp;
use bispec::parser::{parse, parse_poly, parse_raw_op, parse_scalar, ParamEnv};
use bispec::solver::{concomitant, solve, verify_bisymmetric, EndpointMode, EndpointSpec};

mod files;
use files::{ConditionsFile, PairText, ProblemFile, ResultFile, SystemText, TransformReport};

const EXIT_VALIDATION: u8 = 1;
const EXIT_PARSE: u8 = 2;
const EXIT_ONLY_CONSTANTS: u8 = 3;
const EXIT_PLANE_REJECTED: u8 = 4;

/// Candidate-family sizes beyond this require --slow-ok.
const SLOW_GENERATOR_LIMIT: usize = 60;

#[derive(Parser)]
#[command(name = "bispec", about = "exact bispectral Darboux/concomitant toolkit")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct ContextArgs {
    /// Bispectral context: exp, airy, or bessel
    #[arg(long, default_value = "exp")]
    context: String,
    /// Bessel parameter ν as a rational literal (required for bessel)
    #[arg(long)]
    nu: Option<String>,
    /// Parameter binding name=value (repeatable)
    #[arg(long = "param")]
    params: Vec<String>,
}

#[derive(Args, Clone)]
struct EndpointArgs {
    /// x-side contour endpoint (Gaussian-rational literal, e.g. "1", "i")
    #[arg(long = "x-endpoint")]
    x_endpoint: String,
    /// y-side contour endpoint
    #[arg(long = "y-endpoint")]
    y_endpoint: String,
    /// x-side mode: sym (endpoints ±t) or inf (finite endpoint plus ∞)
    #[arg(long = "x-mode", default_value = "sym")]
    x_mode: String,
    /// y-side mode: sym or inf
    #[arg(long = "y-mode", default_value = "sym")]
    y_mode: String,
}

#[derive(Subcommand)]
enum Command {
    /// Solve the endpoint system described by a problem file (JSON)
    Solve {
        problem: String,
        /// Write the result file here instead of standard output
        #[arg(long)]
        out: Option<String>,
        /// Allow large candidate spaces (long runtimes)
        #[arg(long = "slow-ok")]
        slow_ok: bool,
    },
    /// Check the bisymmetry certificate of a single operator
    Verify {
        /// Operator expression in the context dialect
        op: String,
        #[command(flatten)]
        ctx: ContextArgs,
        #[command(flatten)]
        ep: EndpointArgs,
    },
    /// Synthesize Darboux data from adelic conditions (JSON file)
    Grassmannian {
        conditions: String,
        /// Chain into the endpoint solver after synthesis
        #[arg(long)]
        solve: bool,
        #[arg(long = "x-endpoint")]
        x_endpoint: Option<String>,
        #[arg(long = "y-endpoint")]
        y_endpoint: Option<String>,
        #[arg(long = "x-mode", default_value = "sym")]
        x_mode: String,
        #[arg(long = "y-mode", default_value = "sym")]
        y_mode: String,
        /// Target order filtration (default: d₁·d₂)
        #[arg(long = "L")]
        l_target: Option<usize>,
        /// Target co-order filtration (default: d₁·d₂)
        #[arg(long = "M")]
        m_target: Option<usize>,
        #[arg(long)]
        out: Option<String>,
        #[arg(long = "slow-ok")]
        slow_ok: bool,
    },
    /// Operator algebra utilities
    Algebra {
        #[command(subcommand)]
        op: AlgebraCommand,
    },
}

#[derive(Subcommand)]
enum AlgebraCommand {
    /// Product of two operators (canonical form)
    Mul {
        a: String,
        b: String,
        #[command(flatten)]
        ctx: ContextArgs,
    },
    /// Formal adjoint
    Adjoint {
        a: String,
        #[command(flatten)]
        ctx: ContextArgs,
    },
    /// Apply an operator to a rational function of x
    Apply {
        a: String,
        f: String,
        #[command(flatten)]
        ctx: ContextArgs,
    },
    /// Image under the generalized Fourier map
    Fourier {
        a: String,
        #[command(flatten)]
        ctx: ContextArgs,
    },
    /// List the symmetric basis of the double filtration
    Basis {
        #[command(flatten)]
        ctx: ContextArgs,
        #[arg(long = "L", alias = "l")]
        l: usize,
        #[arg(long = "M", alias = "m")]
        m: usize,
    },
}

/// Internal error type carrying the exit code.
struct CliError {
    code: u8,
    message: String,
}

impl CliError {
    fn validation(msg: impl Into<String>) -> Self {
        CliError {
            code: EXIT_VALIDATION,
            message: msg.into(),
        }
    }

    fn parse(msg: impl Into<String>) -> Self {
        CliError {
            code: EXIT_PARSE,
            message: msg.into(),
        }
    }
}

fn param_env(args: &ContextArgs) -> Result<ParamEnv, CliError> {
    let mut env = ParamEnv::new();
    bind_params(&mut env, &args.params)?;
    Ok(env)
}

fn bind_params(env: &mut ParamEnv, params: &[String]) -> Result<(), CliError> {
    for p in params {
        let (name, value) = p
            .split_once('=')
            .ok_or_else(|| CliError::parse(format!("--param must be name=value, got {p:?}")))?;
        let v = parse_scalar(value, env).map_err(|e| CliError::parse(e.to_string()))?;
        env.bind(name, v).map_err(|e| CliError::parse(e.to_string()))?;
    }
    Ok(())
}

fn build_context(kind: &str, nu: Option<&str>, env: &ParamEnv) -> Result<Context, CliError> {
    match kind {
        "exp" => Ok(Context::exp()),
        "airy" => Ok(Context::airy()),
        "bessel" => {
            let nu_text = nu.ok_or_else(|| CliError::validation("bessel requires --nu"))?;
            let nu = parse_scalar(nu_text, env).map_err(|e| CliError::parse(e.to_string()))?;
            Context::bessel(nu).map_err(|e| CliError::validation(e.to_string()))
        }
        other => Err(CliError::validation(format!("unknown context {other:?}"))),
    }
}

fn parse_mode(text: &str) -> Result<EndpointMode, CliError> {
    match text {
        "sym" => Ok(EndpointMode::SymmetricPair),
        "inf" => Ok(EndpointMode::FinitePlusInfinity),
        other => Err(CliError::validation(format!(
            "endpoint mode must be sym or inf, got {other:?}"
        ))),
    }
}

fn endpoint_spec(args: &EndpointArgs, env: &ParamEnv) -> Result<EndpointSpec, CliError> {
    Ok(EndpointSpec {
        x_point: parse_scalar(&args.x_endpoint, env).map_err(|e| CliError::parse(e.to_string()))?,
        y_point: parse_scalar(&args.y_endpoint, env).map_err(|e| CliError::parse(e.to_string()))?,
        x_mode: parse_mode(&args.x_mode)?,
        y_mode: parse_mode(&args.y_mode)?,
    })
}

fn wrap_operator(ctx: &Context, text: &str, env: &ParamEnv) -> Result<CandidatePair, CliError> {
    let tree = parse(text, ctx.dialect(), env).map_err(|e| CliError::parse(e.to_string()))?;
    let gen = ctx
        .fourier(&tree)
        .map_err(|e| CliError::validation(e.to_string()))?;
    Ok(CandidatePair {
        x_op: gen.x_op,
        y_op: gen.y_op,
        provenance: Provenance::Combination,
    })
}

fn transform_report(t: &DarbouxTransform) -> TransformReport {
    TransformReport {
        u: format!("{}", t.u),
        p: format!("{}", t.p),
        q: format!("{}", t.q),
        d1: t.d1,
        d2: t.d2,
        unit: format!("{}", t.unit),
        f_monic: format!("{}", t.f_monic),
    }
}

/// Estimated generator count before the candidate space is materialized,
/// used to gate long runs behind --slow-ok.
fn generator_estimate(
    t: &DarbouxTransform,
    l: usize,
    m: usize,
    bounds: Option<&BoundsOverride>,
) -> usize {
    let basis_size = |l: usize, m: usize| (l + 1) * (m + 1);
    match bounds {
        Some(b) => {
            basis_size(b.u_family[0] / 2, b.u_family[1] / 2)
                + basis_size(b.p_family[0] / 2, b.p_family[1] / 2)
        }
        None if t.is_trivial() => basis_size(l, m),
        None => {
            let u = if l >= t.d1 { basis_size(l - t.d1, m) } else { 0 };
            let p = if t.d1 >= 1 && m >= t.d2 {
                basis_size(t.d1 - 1, m - t.d2)
            } else {
                0
            };
            1 + u + p
        }
    }
}

fn run_solve(
    problem: ProblemFile,
    out: Option<&str>,
    slow_ok: bool,
) -> Result<u8, CliError> {
    let mut env = ParamEnv::new();
    for (name, value) in &problem.params {
        let v = parse_scalar(value, &env).map_err(|e| CliError::parse(e.to_string()))?;
        env.bind(name, v).map_err(|e| CliError::parse(e.to_string()))?;
    }
    let ctx = build_context(
        &problem.context.kind,
        problem.context.nu.as_deref(),
        &env,
    )?;
    let t = match &problem.u {
        None => DarbouxTransform::trivial(&ctx),
        Some(u_text) => {
            let tree =
                parse(u_text, ctx.dialect(), &env).map_err(|e| CliError::parse(e.to_string()))?;
            let gen = ctx
                .fourier(&tree)
                .map_err(|e| CliError::validation(e.to_string()))?;
            let p_over = problem
                .p
                .as_ref()
                .map(|s| parse_poly(s, Var::X, &env))
                .transpose()
                .map_err(|e| CliError::parse(e.to_string()))?;
            let q_over = problem
                .q
                .as_ref()
                .map(|s| parse_poly(s, Var::Y, &env))
                .transpose()
                .map_err(|e| CliError::parse(e.to_string()))?;
            DarbouxTransform::build(&ctx, gen, p_over, q_over)
                .map_err(|e| CliError::validation(e.to_string()))?
        }
    };
    let ep = EndpointSpec {
        x_point: parse_scalar(&problem.endpoints.x_point, &env)
            .map_err(|e| CliError::parse(e.to_string()))?,
        y_point: parse_scalar(&problem.endpoints.y_point, &env)
            .map_err(|e| CliError::parse(e.to_string()))?,
        x_mode: parse_mode(&problem.endpoints.x_mode)?,
        y_mode: parse_mode(&problem.endpoints.y_mode)?,
    };
    let bounds = problem.bounds_override.clone();
    let estimate = generator_estimate(&t, problem.l_target, problem.m_target, bounds.as_ref());
    if estimate > SLOW_GENERATOR_LIMIT && !slow_ok {
        return Err(CliError::validation(format!(
            "candidate space has about {estimate} generators; pass --slow-ok to proceed"
        )));
    }
    let res = solve(&t, problem.l_target, problem.m_target, &ep, bounds.as_ref())
        .map_err(|e| CliError::validation(e.to_string()))?;
    let result = ResultFile {
        problem,
        transform: transform_report(&t),
        dimension: res.dimension,
        system: SystemText {
            rows: res.system_stats.rows,
            cols: res.system_stats.cols,
            rank: res.system_stats.rank,
        },
        positive_order_guaranteed: res.positive_order_guaranteed,
        basis: res
            .solution_basis
            .iter()
            .map(|p| PairText {
                x: format!("{}", p.x_op),
                y: format!("{}", p.y_op),
            })
            .collect(),
        nonconstant_witness: res.nonconstant_witness.as_ref().map(|p| PairText {
            x: format!("{}", p.x_op),
            y: format!("{}", p.y_op),
        }),
    };
    let text = serde_json::to_string_pretty(&result).expect("serializable result");
    match out {
        Some(path) => std::fs::write(path, text + "\n")
            .map_err(|e| CliError::validation(format!("cannot write result: {e}")))?,
        None => println!("{text}"),
    }
    Ok(if result.nonconstant_witness.is_some() {
        0
    } else {
        EXIT_ONLY_CONSTANTS
    })
}

/// (v − p)^k in the operator's variable: the jet-basis test function with
/// f^{(a)}(p) = δ_{a,k}·k!.
fn jet_poly(var: Var, p: &G, k: usize) -> Poly {
    let shift = Poly::new(var, vec![-p, G::one()]);
    let mut out = Poly::one(var);
    for _ in 0..k {
        out = out.mul(&shift);
    }
    out
}

fn residual_table(op: &OreOp, point: &G) -> Result<Vec<(usize, usize, G)>, CliError> {
    let n = op.order().unwrap_or(0);
    let mut bad = vec![];
    for jf in 0..=n {
        for jg in 0..=n {
            let f = jet_poly(op.var, point, jf);
            let g = jet_poly(op.var, point, jg);
            let c = concomitant(op, &f, &g, point)
                .map_err(|e| CliError::validation(format!("endpoint at pole: {e}")))?;
            if !c.is_zero() {
                bad.push((jf, jg, c));
            }
        }
    }
    Ok(bad)
}

fn run_verify(op_text: &str, ctx_args: &ContextArgs, ep_args: &EndpointArgs) -> Result<u8, CliError> {
    let env = param_env(ctx_args)?;
    let ctx = build_context(&ctx_args.context, ctx_args.nu.as_deref(), &env)?;
    let ep = endpoint_spec(ep_args, &env)?;
    let pair = wrap_operator(&ctx, op_text, &env)?;
    println!("x operator: {}", pair.x_op);
    println!("fourier image: {}", pair.y_op);
    println!(
        "x-side formally symmetric: {}",
        pair.x_op.is_formally_symmetric()
    );
    println!(
        "y-side formally symmetric: {}",
        pair.y_op.is_formally_symmetric()
    );
    let mut first_fail: Option<String> = None;
    for (label, op, point, mode) in [
        ("x", &pair.x_op, &ep.x_point, ep.x_mode),
        ("y", &pair.y_op, &ep.y_point, ep.y_mode),
    ] {
        let mut points = vec![point.clone()];
        if mode == EndpointMode::SymmetricPair {
            points.push(-point);
        }
        for pt in points {
            let bad = residual_table(op, &pt)?;
            if bad.is_empty() {
                println!("{label} residuals at {pt}: all zero");
            } else {
                println!("{label} residuals at {pt}:");
                for (jf, jg, c) in &bad {
                    println!("  jets ({jf}, {jg}): {c}");
                }
                if first_fail.is_none() {
                    let (jf, jg, _) = &bad[0];
                    first_fail = Some(format!("{label} side, jets ({jf}, {jg}) at {pt}"));
                }
            }
        }
    }
    let ok = verify_bisymmetric(&pair, &ep).map_err(|e| CliError::validation(e.to_string()))?;
    println!("bisymmetric: {ok}");
    if ok {
        Ok(0)
    } else {
        if let Some(msg) = first_fail {
            eprintln!("first failing condition: {msg}");
        } else {
            eprintln!("operator is not formally symmetric");
        }
        Ok(EXIT_VALIDATION)
    }
}

#[allow(clippy::too_many_arguments)]
fn run_grassmannian(
    conditions_path: &str,
    chain_solve: bool,
    x_endpoint: Option<&str>,
    y_endpoint: Option<&str>,
    x_mode: &str,
    y_mode: &str,
    l_target: Option<usize>,
    m_target: Option<usize>,
    out: Option<&str>,
    slow_ok: bool,
) -> Result<u8, CliError> {
    let text = std::fs::read_to_string(conditions_path)
        .map_err(|e| CliError::validation(format!("cannot read conditions: {e}")))?;
    let file: ConditionsFile =
        serde_json::from_str(&text).map_err(|e| CliError::parse(e.to_string()))?;
    let env = ParamEnv::new();
    let conds: Vec<ConditionFunctional> = file
        .conditions
        .iter()
        .map(|c| {
            let point = parse_scalar(&c.point, &env).map_err(|e| CliError::parse(e.to_string()))?;
            let coeffs = c
                .coeffs
                .iter()
                .map(|s| parse_scalar(s, &env).map_err(|e| CliError::parse(e.to_string())))
                .collect::<Result<Vec<G>, _>>()?;
            ConditionFunctional::new(point, coeffs)
                .map_err(|e| CliError::validation(e.to_string()))
        })
        .collect::<Result<_, _>>()?;
    let plane =
        AdelicPlane::from_conditions(&conds).map_err(|e| CliError::validation(e.to_string()))?;
    let lagrangian =
        is_lagrangian(&plane).map_err(|e| CliError::validation(e.to_string()))?;
    let sigma_stable = is_sigma_stable(&plane);
    println!("plane dimension: {}", plane.dim());
    println!("ambient order: {}", plane.order());
    println!("q: {}", plane.q);
    println!("lagrangian: {lagrangian}");
    println!("sigma-stable: {sigma_stable}");
    let t = match to_darboux(&plane) {
        Ok(t) => t,
        Err(e @ (GrassError::NotLagrangian | GrassError::NotSigmaStable)) => {
            eprintln!("plane rejected: {e}");
            return Ok(EXIT_PLANE_REJECTED);
        }
        Err(e) => return Err(CliError::validation(e.to_string())),
    };
    println!("u: {}", t.u);
    println!("p: {}", t.p);
    println!("bidegree: ({}, {})", t.d1, t.d2);
    if !chain_solve {
        return Ok(0);
    }
    let (x_endpoint, y_endpoint) = match (x_endpoint, y_endpoint) {
        (Some(x), Some(y)) => (x, y),
        _ => {
            return Err(CliError::validation(
                "--solve requires --x-endpoint and --y-endpoint",
            ))
        }
    };
    let default_lm = (t.d1 * t.d2).max(1);
    let problem = ProblemFile {
        context: files::ContextText {
            kind: "exp".to_string(),
            nu: None,
        },
        u: Some(format!("{}", t.u)),
        p: Some(format!("{}", t.p)),
        q: Some(format!("{}", t.q)),
        params: BTreeMap::new(),
        endpoints: files::EndpointsText {
            x_point: x_endpoint.to_string(),
            y_point: y_endpoint.to_string(),
            x_mode: x_mode.to_string(),
            y_mode: y_mode.to_string(),
        },
        l_target: l_target.unwrap_or(default_lm),
        m_target: m_target.unwrap_or(default_lm),
        bounds_override: None,
    };
    run_solve(problem, out, slow_ok)
}

fn run_algebra(cmd: &AlgebraCommand) -> Result<u8, CliError> {
    match cmd {
        AlgebraCommand::Mul { a, b, ctx } => {
            let env = param_env(ctx)?;
            let c = build_context(&ctx.context, ctx.nu.as_deref(), &env)?;
            let a = wrap_operator(&c, a, &env)?;
            let b = wrap_operator(&c, b, &env)?;
            println!("{}", a.x_op.mul(&b.x_op));
        }
        AlgebraCommand::Adjoint { a, ctx } => {
            let env = param_env(ctx)?;
            let c = build_context(&ctx.context, ctx.nu.as_deref(), &env)?;
            let a = wrap_operator(&c, a, &env)?;
            println!("{}", a.x_op.adjoint());
        }
        AlgebraCommand::Apply { a, f, ctx } => {
            let env = param_env(ctx)?;
            let c = build_context(&ctx.context, ctx.nu.as_deref(), &env)?;
            let a = wrap_operator(&c, a, &env)?;
            let f_op =
                parse_raw_op(f, Var::X, &env).map_err(|e| CliError::parse(e.to_string()))?;
            if f_op.order().unwrap_or(0) != 0 {
                return Err(CliError::parse("apply expects a function, not an operator"));
            }
            println!("{}", a.x_op.apply(&f_op.coeff(0)));
        }
        AlgebraCommand::Fourier { a, ctx } => {
            let env = param_env(ctx)?;
            let c = build_context(&ctx.context, ctx.nu.as_deref(), &env)?;
            let a = wrap_operator(&c, a, &env)?;
            println!("{}", a.y_op);
        }
        AlgebraCommand::Basis { ctx, l, m } => {
            let env = param_env(ctx)?;
            let c = build_context(&ctx.context, ctx.nu.as_deref(), &env)?;
            let basis = c.sym_basis(*l, *m);
            println!("{} elements", basis.len());
            for e in &basis {
                println!(
                    "j={} k={} ({:?}): x: {} | y: {}",
                    e.j, e.k, e.family, e.gen.x_op, e.gen.y_op
                );
            }
        }
    }
    Ok(0)
}

fn dispatch(cli: Cli) -> Result<u8, CliError> {
    match cli.command {
        Command::Solve {
            problem,
            out,
            slow_ok,
        } => {
            let text = std::fs::read_to_string(&problem)
                .map_err(|e| CliError::validation(format!("cannot read problem: {e}")))?;
            let problem: ProblemFile =
                serde_json::from_str(&text).map_err(|e| CliError::parse(e.to_string()))?;
            run_solve(problem, out.as_deref(), slow_ok)
        }
        Command::Verify { op, ctx, ep } => run_verify(&op, &ctx, &ep),
        Command::Grassmannian {
            conditions,
            solve,
            x_endpoint,
            y_endpoint,
            x_mode,
            y_mode,
            l_target,
            m_target,
            out,
            slow_ok,
        } => run_grassmannian(
            &conditions,
            solve,
            x_endpoint.as_deref(),
            y_endpoint.as_deref(),
            &x_mode,
            &y_mode,
            l_target,
            m_target,
            out.as_deref(),
            slow_ok,
        ),
        Command::Algebra { op } => run_algebra(&op),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {}", e.message);
            ExitCode::from(e.code)
        }
    }
}
