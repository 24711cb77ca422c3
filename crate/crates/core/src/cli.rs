//! Command-line front end: evaluate operators over grids, check the Mellin
//! multipliers, run Monte Carlo verifications, sweep the pathway parameter,
//! run the reduction identities, and list the registered functions.
//!
//! Exit codes: 0 success, 1 verification failure (a pass=false report),
//! 2 validation error, 3 numerical failure.

use crate::density::{self, ArgMode, HyperDensityParams, HyperParams, OperatorKind, PathwayParams};
use crate::error::{Error, Result};
use crate::mellin::{self, MultiplierSpec};
use crate::operator::{self, KoberParams};
use crate::quad::Tol;
use crate::stochastic::{self, TheoremId, TheoremParams, VerifyOpts};
use clap::{Args, Parser, Subcommand};
use num_complex::Complex64;
use rayon::prelude::*;
use std::io::Write as _;
use std::path::PathBuf;

#[derive(Debug, Parser)]
#[command(
    name = "kober",
    about = "Erdélyi–Kober fractional integral operators: quadrature, Mellin and Monte Carlo routes",
    after_help = "Run `kober list` to see the registered densities and operators."
)]
pub struct RunConfig {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Evaluate an operator over a grid of u values; writes CSV u,value,abs_err
    Eval(EvalArgs),
    /// Compare an operator's Mellin multiplier against the numeric transform
    MellinCheck(MellinArgs),
    /// Monte Carlo verification of a product/ratio density identity
    McVerify(McArgs),
    /// Sweep the pathway parameter q across both regimes and the limit
    SweepQ(SweepArgs),
    /// Run the reduction identities (pathway→Kober, Kober→Weyl, hyper→Kober, Saigo)
    ReduceCheck(ReduceArgs),
    /// List registered densities, functions and operators
    List,
}

#[derive(Debug, Args)]
pub struct OperatorParams {
    #[arg(long)]
    pub zeta: Option<f64>,
    #[arg(long)]
    pub alpha: Option<f64>,
    /// Pathway γ
    #[arg(long)]
    pub gamma: Option<f64>,
    /// Pathway δ
    #[arg(long)]
    pub delta: Option<f64>,
    /// Pathway η
    #[arg(long)]
    pub eta: Option<f64>,
    /// Pathway a
    #[arg(long)]
    pub a: Option<f64>,
    /// Pathway q
    #[arg(long)]
    pub q: Option<f64>,
    /// Hypergeometric upper parameters, comma separated
    #[arg(long, value_delimiter = ',')]
    pub upper: Vec<f64>,
    /// Hypergeometric lower parameters, comma separated
    #[arg(long, value_delimiter = ',')]
    pub lower: Vec<f64>,
    /// Hypergeometric scale a
    #[arg(long)]
    pub scale: Option<f64>,
    /// Argument mode: x | 1mx | powx | pow1mx | mixed
    #[arg(long)]
    pub mode: Option<String>,
    /// Power-mode exponents d1,d2,d3
    #[arg(long, value_delimiter = ',')]
    pub exponents: Vec<f64>,
}

#[derive(Debug, Args)]
pub struct EvalArgs {
    /// Operator: kober1 | kober2 | pathway1 | pathway2 | hyper1 | hyper2 |
    /// saigo1 | saigo2 | weyl | rl | product | ratio
    pub operator: String,
    /// Input function/density name (see `list`)
    #[arg(long, short = 'f')]
    pub f: String,
    /// Second density for product/ratio (the kernel side is --f)
    #[arg(long)]
    pub f2: Option<String>,
    /// Grid min:max:count
    #[arg(long)]
    pub grid: String,
    /// Logarithmic grid spacing
    #[arg(long)]
    pub log: bool,
    /// Report the bare operator value instead of the density-normalized g(u)
    #[arg(long)]
    pub bare: bool,
    /// Output CSV path (stdout if omitted)
    #[arg(long, short = 'o')]
    pub out: Option<PathBuf>,
    /// Absolute quadrature tolerance
    #[arg(long, default_value_t = 1e-10)]
    pub abs_tol: f64,
    /// Relative quadrature tolerance
    #[arg(long, default_value_t = 1e-9)]
    pub rel_tol: f64,
    #[command(flatten)]
    pub params: OperatorParams,
}

#[derive(Debug, Args)]
pub struct MellinArgs {
    /// Operator: kober1 | kober2 | hyper1 | hyper2 | rl | weyl | ratio
    pub operator: String,
    #[arg(long, short = 'f')]
    pub f: String,
    /// f1 for the generic ratio check
    #[arg(long)]
    pub f1: Option<String>,
    /// Probe points Re[,Im], semicolon separated (e.g. "1.5;2;2.5,1")
    #[arg(long, default_value = "1.5;2;2.5")]
    pub s: String,
    #[arg(long, short = 'o')]
    pub out: Option<PathBuf>,
    /// Identity tolerance for pass/fail
    #[arg(long, default_value_t = 1e-6)]
    pub tol: f64,
    #[command(flatten)]
    pub params: OperatorParams,
}

#[derive(Debug, Args)]
pub struct McArgs {
    /// Identity: t1.1 | t2.1 | t3.1 | t3.2 | pathway1 | pathway2 | hyper1 | hyper2
    pub theorem: String,
    #[arg(long, short = 'f')]
    pub f: String,
    #[arg(long, default_value_t = 100_000)]
    pub n: usize,
    #[arg(long, default_value_t = 42)]
    pub seed: u64,
    /// Negative control: replace the identity constant by 1
    #[arg(long)]
    pub negative_control: bool,
    #[arg(long, short = 'o')]
    pub out: Option<PathBuf>,
    #[command(flatten)]
    pub params: OperatorParams,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    /// Operator: pathway1 | pathway2
    pub operator: String,
    #[arg(long, short = 'f')]
    pub f: String,
    /// Fixed evaluation point u
    #[arg(long)]
    pub u: f64,
    /// q grid min:max:count (spans both regimes; q = 1 is inserted if crossed)
    #[arg(long = "q-grid", allow_hyphen_values = true)]
    pub q_grid: String,
    #[arg(long, short = 'o')]
    pub out: Option<PathBuf>,
    #[command(flatten)]
    pub params: OperatorParams,
}

#[derive(Debug, Args)]
pub struct ReduceArgs {
    #[arg(long, short = 'f', default_value = "exp1")]
    pub f: String,
    #[arg(long, default_value_t = 1.0)]
    pub zeta: f64,
    /// Needs alpha > 1 so the pathway reduction has η = α−1 > 0
    #[arg(long, default_value_t = 1.5)]
    pub alpha: f64,
    /// Evaluation points
    #[arg(long, value_delimiter = ',', default_values_t = vec![0.25, 1.0, 4.0])]
    pub u: Vec<f64>,
    #[arg(long, default_value_t = 1e-9)]
    pub tol: f64,
    #[arg(long, short = 'o')]
    pub out: Option<PathBuf>,
}

/// Entry point used by the binary; maps errors to exit codes.
pub fn main() -> i32 {
    let config = RunConfig::parse();
    match run(&config) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            match e {
                Error::Validation(_) | Error::Domain(_) => 2,
                _ => 3,
            }
        }
    }
}

/// Runs a parsed configuration; returns the process exit code.
pub fn run(config: &RunConfig) -> Result<i32> {
    match &config.command {
        Command::Eval(args) => eval(args),
        Command::MellinCheck(args) => mellin_check(args),
        Command::McVerify(args) => mc_verify(args),
        Command::SweepQ(args) => sweep_q(args),
        Command::ReduceCheck(args) => reduce_check(args),
        Command::List => list(),
    }
}

fn parse_grid(spec: &str, log: bool) -> Result<Vec<f64>> {
    let parts: Vec<&str> = spec.split(':').collect();
    if parts.len() != 3 {
        return Err(Error::validation(format!("grid '{spec}' is not min:max:count")));
    }
    let min: f64 = parts[0]
        .parse()
        .map_err(|_| Error::validation(format!("bad grid min '{}'", parts[0])))?;
    let max: f64 = parts[1]
        .parse()
        .map_err(|_| Error::validation(format!("bad grid max '{}'", parts[1])))?;
    let count: usize = parts[2]
        .parse()
        .map_err(|_| Error::validation(format!("bad grid count '{}'", parts[2])))?;
    if count < 2 || !(min < max) {
        return Err(Error::validation(format!(
            "grid needs min < max and count >= 2, got '{spec}'"
        )));
    }
    if log && !(min > 0.0) {
        return Err(Error::validation("log grid needs min > 0".to_string()));
    }
    Ok((0..count)
        .map(|i| {
            let t = i as f64 / (count - 1) as f64;
            if log {
                (min.ln() + t * (max.ln() - min.ln())).exp()
            } else {
                min + t * (max - min)
            }
        })
        .collect())
}

fn require(v: Option<f64>, name: &str) -> Result<f64> {
    v.ok_or_else(|| Error::validation(format!("missing --{name}")))
}

fn kober_params(p: &OperatorParams) -> Result<KoberParams> {
    KoberParams::new(require(p.zeta, "zeta")?, require(p.alpha, "alpha")?)
}

fn pathway_params(p: &OperatorParams) -> Result<PathwayParams> {
    PathwayParams::new(
        require(p.gamma, "gamma")?,
        require(p.delta, "delta")?,
        require(p.eta, "eta")?,
        require(p.a, "a")?,
        require(p.q, "q")?,
    )
}

fn arg_mode(s: &str) -> Result<ArgMode> {
    Ok(match s {
        "x" => ArgMode::X,
        "1mx" => ArgMode::OneMinusX,
        "powx" => ArgMode::PowerX,
        "pow1mx" => ArgMode::PowerOneMinusX,
        "mixed" => ArgMode::Mixed,
        other => return Err(Error::validation(format!("unknown mode '{other}'"))),
    })
}

fn hyper_params(p: &OperatorParams, kind: OperatorKind, saigo: bool) -> Result<HyperDensityParams> {
    let zeta = require(p.zeta, "zeta")?;
    let alpha = require(p.alpha, "alpha")?;
    let scale = require(p.scale, "scale")?;
    if saigo {
        if p.upper.len() != 2 || p.lower.len() != 1 {
            return Err(Error::validation(
                "saigo preset needs --upper a1,a2 and --lower b1".to_string(),
            ));
        }
        return HyperDensityParams::saigo(
            (p.upper[0], p.upper[1]),
            p.lower[0],
            scale,
            zeta,
            alpha,
            kind,
        );
    }
    let mode = arg_mode(p.mode.as_deref().unwrap_or("x"))?;
    let exps = match p.exponents.len() {
        0 => None,
        3 => Some((p.exponents[0], p.exponents[1], p.exponents[2])),
        _ => return Err(Error::validation("--exponents needs d1,d2,d3".to_string())),
    };
    let hp = HyperParams::new(p.upper.clone(), p.lower.clone(), scale, mode, exps)?;
    HyperDensityParams::new(hp, zeta, alpha, kind)
}

/// 17-significant-digit formatting: round-trips every f64 exactly.
fn fmt17(v: f64) -> String {
    format!("{v:.16e}")
}

fn write_output(out: &Option<PathBuf>, content: &str) -> Result<()> {
    match out {
        Some(path) => std::fs::write(path, content)
            .map_err(|e| Error::validation(format!("cannot write {}: {e}", path.display()))),
        None => {
            print!("{content}");
            std::io::stdout().flush().ok();
            Ok(())
        }
    }
}

fn eval(args: &EvalArgs) -> Result<i32> {
    let f = density::resolve(&args.f)?;
    if args.abs_tol <= 0.0 || args.rel_tol <= 0.0 {
        return Err(Error::validation("tolerances must be positive".to_string()));
    }
    let tol = Tol { abs: args.abs_tol, rel: args.rel_tol };
    let grid = parse_grid(&args.grid, args.log)?;
    let op = args.operator.as_str();

    // per-point evaluation returning (density g(u), bare value, err estimate)
    let eval_one: Box<dyn Fn(f64) -> Result<(f64, f64, f64)> + Sync> = match op {
        "kober2" => {
            let p = kober_params(&args.params)?;
            let c = operator::kober_second_density_const(p)?;
            let f = f.clone();
            Box::new(move |u| {
                let r = operator::kober_second(&f, p, u, tol)?;
                Ok((c * r.value, r.value, r.abs_error_estimate))
            })
        }
        "kober1" => {
            let p = kober_params(&args.params)?;
            if p.zeta == 0.0 {
                eprintln!("warning: zeta = 0 is the boundary of the first-kind parameter range");
            }
            let c = if p.zeta > 0.0 { operator::kober_first_density_const(p)? } else { f64::NAN };
            let f = f.clone();
            Box::new(move |u| {
                let r = operator::kober_first(&f, p, u, tol)?;
                Ok((c * r.value, r.value, r.abs_error_estimate))
            })
        }
        "pathway2" | "pathway1" => {
            let p = pathway_params(&args.params)?;
            let kind = if op == "pathway2" { OperatorKind::Second } else { OperatorKind::First };
            let (c_reg, _) = p.norm_consts(kind)?;
            let f = f.clone();
            Box::new(move |u| {
                let r = match kind {
                    OperatorKind::Second => operator::pathway_second(&f, p, u, tol)?,
                    OperatorKind::First => operator::pathway_first(&f, p, u, tol)?,
                };
                // bare = kernel-constant stripped
                Ok((r.value, r.value / c_reg, r.abs_error_estimate))
            })
        }
        "hyper2" | "hyper1" | "saigo2" | "saigo1" => {
            let kind = if op.ends_with('2') { OperatorKind::Second } else { OperatorKind::First };
            let hd = hyper_params(&args.params, kind, op.starts_with("saigo"))?;
            let p = KoberParams::new(hd.zeta, hd.alpha)?;
            let c = match kind {
                OperatorKind::Second => operator::kober_second_density_const(p)?,
                OperatorKind::First => operator::kober_first_density_const(p)?,
            };
            let f = f.clone();
            Box::new(move |u| {
                let r = match kind {
                    OperatorKind::Second => operator::hyper_second(&f, &hd, u, tol)?,
                    OperatorKind::First => operator::hyper_first(&f, &hd, u, tol)?,
                };
                // bare convention: the scale-0 reduction constant divided out
                Ok((r.value, r.value / c, r.abs_error_estimate))
            })
        }
        "weyl" => {
            let alpha = require(args.params.alpha, "alpha")?;
            let f = f.clone();
            Box::new(move |u| {
                let r = operator::weyl_right(&f, alpha, u, tol)?;
                Ok((r.value, r.value, r.abs_error_estimate))
            })
        }
        "rl" => {
            let alpha = require(args.params.alpha, "alpha")?;
            let f = f.clone();
            Box::new(move |u| {
                let r = operator::rl_left(&f, alpha, u, tol)?;
                Ok((r.value, r.value, r.abs_error_estimate))
            })
        }
        "product" | "ratio" => {
            let f2 = density::resolve(
                args.f2
                    .as_deref()
                    .ok_or_else(|| Error::validation("product/ratio need --f2".to_string()))?,
            )?;
            let is_product = op == "product";
            let f = f.clone();
            Box::new(move |u| {
                let r = if is_product {
                    operator::product_density(&f, &f2, u, tol)?
                } else {
                    operator::ratio_density(&f, &f2, u, tol)?
                };
                Ok((r.value, r.value, r.abs_error_estimate))
            })
        }
        other => return Err(Error::validation(format!("unknown operator '{other}'"))),
    };

    let rows: Vec<Result<(f64, f64, f64)>> = grid.par_iter().map(|&u| eval_one(u)).collect();
    let mut csv = String::from("u,value,abs_err\n");
    for (u, row) in grid.iter().zip(rows) {
        let (dens, bare, err) = row.map_err(|e| Error::Domain(format!("at u = {u}: {e}")))?;
        let v = if args.bare { bare } else { dens };
        csv.push_str(&format!("{},{},{}\n", fmt17(*u), fmt17(v), fmt17(err)));
    }
    write_output(&args.out, &csv)?;
    Ok(0)
}

fn parse_probes(spec: &str) -> Result<Vec<Complex64>> {
    spec.split(';')
        .filter(|t| !t.trim().is_empty())
        .map(|tok| {
            let parts: Vec<&str> = tok.split(',').collect();
            let re: f64 = parts[0]
                .trim()
                .parse()
                .map_err(|_| Error::validation(format!("bad probe '{tok}'")))?;
            let im: f64 = if parts.len() > 1 {
                parts[1]
                    .trim()
                    .parse()
                    .map_err(|_| Error::validation(format!("bad probe '{tok}'")))?
            } else {
                0.0
            };
            Ok(Complex64::new(re, im))
        })
        .collect()
}

fn mellin_check(args: &MellinArgs) -> Result<i32> {
    let f = density::resolve(&args.f)?;
    let probes = parse_probes(&args.s)?;
    let (spec, f2) = match args.operator.as_str() {
        "kober2" => (MultiplierSpec::Kober2(kober_params(&args.params)?), None),
        "kober1" => (MultiplierSpec::Kober1(kober_params(&args.params)?), None),
        "hyper2" => (
            MultiplierSpec::HyperSecond(hyper_params(&args.params, OperatorKind::Second, false)?),
            None,
        ),
        "hyper1" => (
            MultiplierSpec::HyperFirst(hyper_params(&args.params, OperatorKind::First, false)?),
            None,
        ),
        "rl" => (MultiplierSpec::RlLeft { alpha: require(args.params.alpha, "alpha")? }, None),
        "weyl" => {
            (MultiplierSpec::WeylProduct { alpha: require(args.params.alpha, "alpha")? }, None)
        }
        "ratio" => {
            let f1 = density::resolve(
                args.f1
                    .as_deref()
                    .ok_or_else(|| Error::validation("ratio check needs --f1".to_string()))?,
            )?;
            (MultiplierSpec::RatioGeneric(f1), Some(f.clone()))
        }
        other => return Err(Error::validation(format!("unknown operator '{other}'"))),
    };
    let report =
        mellin::verify_multiplier(&spec, f, f2, &probes, Tol { abs: 1e-10, rel: 1e-9 })?;
    let pass = report.max_rel_err < args.tol;
    let json = serde_json::json!({
        "operator": report.operator,
        "function": report.function,
        "probes": report.probes,
        "max_rel_err": report.max_rel_err,
        "tol": args.tol,
        "pass": pass,
    });
    write_output(&args.out, &format!("{}\n", serde_json::to_string_pretty(&json).unwrap()))?;
    Ok(if pass { 0 } else { 1 })
}

fn mc_verify(args: &McArgs) -> Result<i32> {
    let theorem = TheoremId::parse(&args.theorem)?;
    let f2 = density::resolve(&args.f)?;
    let params = match theorem {
        TheoremId::T1_1 | TheoremId::T2_1 | TheoremId::T3_2 => {
            TheoremParams::Kober(kober_params(&args.params)?)
        }
        TheoremId::T3_1 => TheoremParams::Weyl { alpha: require(args.params.alpha, "alpha")? },
        TheoremId::Pathway1 | TheoremId::Pathway2 => {
            TheoremParams::Pathway(pathway_params(&args.params)?)
        }
        TheoremId::Hyper1 => {
            TheoremParams::Hyper(hyper_params(&args.params, OperatorKind::First, false)?)
        }
        TheoremId::Hyper2 => {
            TheoremParams::Hyper(hyper_params(&args.params, OperatorKind::Second, false)?)
        }
    };
    let opts = VerifyOpts { unit_constant: args.negative_control, ..Default::default() };
    let report = stochastic::verify_theorem(theorem, &params, f2, args.n, args.seed, &opts)?;
    write_output(&args.out, &format!("{}\n", serde_json::to_string_pretty(&report).unwrap()))?;
    Ok(if report.pass { 0 } else { 1 })
}

fn sweep_q(args: &SweepArgs) -> Result<i32> {
    let f = density::resolve(&args.f)?;
    let kind = match args.operator.as_str() {
        "pathway2" => OperatorKind::Second,
        "pathway1" => OperatorKind::First,
        other => {
            return Err(Error::validation(format!(
                "sweep-q wants pathway1|pathway2, got '{other}'"
            )));
        }
    };
    let mut qs = parse_grid(&args.q_grid, false)?;
    // make sure the limit branch itself appears when the sweep crosses it
    if qs.first().copied().unwrap_or(1.0) < 1.0
        && qs.last().copied().unwrap_or(1.0) > 1.0
        && !qs.iter().any(|&q| q == 1.0)
    {
        qs.push(1.0);
        qs.sort_by(|a, b| a.partial_cmp(b).unwrap());
    }
    let gamma = require(args.params.gamma, "gamma")?;
    let delta = require(args.params.delta, "delta")?;
    let eta = require(args.params.eta, "eta")?;
    let a = require(args.params.a, "a")?;
    let tol = Tol::default();
    let rows: Vec<Result<(f64, f64)>> = qs
        .par_iter()
        .map(|&q| {
            let p = PathwayParams::new(gamma, delta, eta, a, q)?;
            let r = match kind {
                OperatorKind::Second => operator::pathway_second(&f, p, args.u, tol)?,
                OperatorKind::First => operator::pathway_first(&f, p, args.u, tol)?,
            };
            Ok((q, r.value))
        })
        .collect();
    let mut csv = String::from("q,u,value\n");
    for row in rows {
        let (q, v) = row.map_err(|e| Error::Domain(format!("sweep failed: {e}")))?;
        csv.push_str(&format!("{},{},{}\n", fmt17(q), fmt17(args.u), fmt17(v)));
    }
    write_output(&args.out, &csv)?;
    Ok(0)
}

fn reduce_check(args: &ReduceArgs) -> Result<i32> {
    let f = density::resolve(&args.f)?;
    let (zeta, alpha) = (args.zeta, args.alpha);
    if !(alpha > 1.0) {
        return Err(Error::validation(
            "reduce-check needs --alpha > 1 so the pathway reduction has eta = alpha-1 > 0"
                .to_string(),
        ));
    }
    if !(zeta > 0.0) {
        return Err(Error::validation("reduce-check needs --zeta > 0".to_string()));
    }
    let tol = Tol { abs: 1e-11, rel: 1e-10 };
    let kp = KoberParams::new(zeta, alpha)?;
    let mut checks: Vec<serde_json::Value> = Vec::new();
    let mut all_pass = true;
    let push = |name: &str, gap: f64, checks: &mut Vec<serde_json::Value>| -> bool {
        let pass = gap < args.tol;
        checks.push(serde_json::json!({
            "identity": name, "max_abs_gap": gap, "tol": args.tol, "pass": pass,
        }));
        pass
    };

    // pathway at q=0 (δ=1, a=1, η=α−1) against the Kober operators
    let pw = PathwayParams::new(zeta, 1.0, alpha - 1.0, 1.0, 0.0)?;
    let c2 = crate::special::gamma_ratio(&[zeta + 1.0], &[zeta + 1.0 + alpha])?;
    let mut gap: f64 = 0.0;
    for &u in &args.u {
        let g = operator::pathway_second(&f, pw, u, tol)?.value;
        let k = operator::kober_second(&f, kp, u, tol)?.value;
        gap = gap.max((c2 * g - k).abs());
    }
    all_pass &= push("pathway2_q0_is_kober2", gap, &mut checks);

    let c1 = crate::special::gamma_ratio(&[zeta], &[zeta + alpha])?;
    let mut gap: f64 = 0.0;
    for &u in &args.u {
        let g = operator::pathway_first(&f, pw, u, tol)?.value;
        let i = operator::kober_first(&f, kp, u, tol)?.value;
        gap = gap.max((c1 * g - i).abs());
    }
    all_pass &= push("pathway1_q0_is_kober1", gap, &mut checks);

    // Kober second at ζ=0 equals Weyl applied to t^{-α}f
    let shifted = density::TestFunction::new(
        format!("t^-{alpha}*{}", f.name),
        {
            let f = f.clone();
            move |t: f64| t.powf(-alpha) * f.eval(t)
        },
        f.support,
        f.decay,
    )
    .with_exponents(f.lo_exponent - alpha, f.hi_exponent)
    .registered()?;
    let k0 = KoberParams::new(0.0, alpha)?;
    let mut gap: f64 = 0.0;
    for &u in &args.u {
        let k = operator::kober_second(&f, k0, u, tol)?.value;
        let w = operator::weyl_right(&shifted, alpha, u, tol)?.value;
        gap = gap.max((k - w).abs());
    }
    all_pass &= push("kober2_zeta0_is_weyl", gap, &mut checks);

    // hyper with scale 0 against Kober (both kinds)
    for kind in [OperatorKind::Second, OperatorKind::First] {
        let hd = HyperDensityParams::new(
            HyperParams::new(vec![1.0], vec![2.0], 0.0, ArgMode::X, None)?,
            zeta,
            alpha,
            kind,
        )?;
        let mut gap: f64 = 0.0;
        for &u in &args.u {
            let (g, k, c) = match kind {
                OperatorKind::Second => (
                    operator::hyper_second(&f, &hd, u, tol)?.value,
                    operator::kober_second(&f, kp, u, tol)?.value,
                    operator::kober_second_density_const(kp)?,
                ),
                OperatorKind::First => (
                    operator::hyper_first(&f, &hd, u, tol)?.value,
                    operator::kober_first(&f, kp, u, tol)?.value,
                    operator::kober_first_density_const(kp)?,
                ),
            };
            gap = gap.max((g - c * k).abs());
        }
        let name = match kind {
            OperatorKind::Second => "hyper2_scale0_is_kober2",
            OperatorKind::First => "hyper1_scale0_is_kober1",
        };
        all_pass &= push(name, gap, &mut checks);
    }

    // Saigo preset wiring against the explicit ₂F₁ construction
    for kind in [OperatorKind::Second, OperatorKind::First] {
        let preset = HyperDensityParams::saigo((1.0, 1.5), 2.5, 0.5, zeta, alpha, kind)?;
        let manual = HyperDensityParams::new(
            HyperParams::new(vec![1.0, 1.5], vec![2.5], 0.5, ArgMode::OneMinusX, None)?,
            zeta,
            alpha,
            kind,
        )?;
        let mut gap: f64 = 0.0;
        for &u in &args.u {
            let (a, b) = match kind {
                OperatorKind::Second => (
                    operator::hyper_second(&f, &preset, u, tol)?.value,
                    operator::hyper_second(&f, &manual, u, tol)?.value,
                ),
                OperatorKind::First => (
                    operator::hyper_first(&f, &preset, u, tol)?.value,
                    operator::hyper_first(&f, &manual, u, tol)?.value,
                ),
            };
            gap = gap.max((a - b).abs());
        }
        let name = match kind {
            OperatorKind::Second => "saigo2_preset_is_2f1_hyper2",
            OperatorKind::First => "saigo1_preset_is_2f1_hyper1",
        };
        all_pass &= push(name, gap, &mut checks);
    }

    let json = serde_json::json!({
        "f": args.f, "zeta": zeta, "alpha": alpha, "u": args.u,
        "checks": checks, "pass": all_pass,
    });
    write_output(&args.out, &format!("{}\n", serde_json::to_string_pretty(&json).unwrap()))?;
    Ok(if all_pass { 0 } else { 1 })
}

fn list() -> Result<i32> {
    let mut out = String::new();
    out.push_str("registered densities/functions:\n");
    for (name, desc) in density::builtin_names() {
        out.push_str(&format!("  {name:<24} {desc}\n"));
    }
    out.push_str("\noperators (eval):\n");
    for (name, desc) in [
        ("kober2", "Kober operator of the second kind K_u^{zeta,alpha}"),
        ("kober1", "Kober operator of the first kind I_u^{zeta,alpha}"),
        ("pathway2", "pathway-generalized operator, second kind (g(u))"),
        ("pathway1", "pathway-generalized operator, first kind (g(u))"),
        ("hyper2", "hypergeometric-generalized operator, second kind (g(u))"),
        ("hyper1", "hypergeometric-generalized operator, first kind (g(u))"),
        ("saigo2", "Saigo preset: 2F1 with argument a(1-u/v), second kind"),
        ("saigo1", "Saigo preset: 2F1 with argument a(1-v/u), first kind"),
        ("weyl", "right-sided Weyl fractional integral of order alpha"),
        ("rl", "left-sided Riemann-Liouville fractional integral"),
        ("product", "density of x1*x2 (product Mellin convolution)"),
        ("ratio", "density of x2/x1 (ratio Mellin convolution)"),
    ] {
        out.push_str(&format!("  {name:<24} {desc}\n"));
    }
    out.push_str("\nmc-verify identities: t1.1 t2.1 t3.1 t3.2 pathway1 pathway2 hyper1 hyper2\n");
    write_output(&None, &out)?;
    Ok(0)
}
