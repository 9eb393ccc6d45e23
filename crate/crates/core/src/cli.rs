//! Command-line front end. Exit codes: 0 success, 1 domain error, 2 usage error.

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use crate::arith::{FieldCtx, QuadElem};
use crate::basechange::{bianchi_form, build_fixture, parse_sources, RationalCurve};
use crate::classgroup::class_number;
use crate::eliminate::trace_set_a;
use crate::error::{Error, Result};
use crate::frey::{
    conductor_exponent_at_lambda, direct_j_valuation, invariants_closed_form,
    invariants_from_model, j_valuation_lemma, reduction_type, relevant_primes, CurveInvariants,
    FreyInstance, ReductionReport,
};
use crate::ideal::{primes_above_3, splitting_type, tk_set, PrimeIdeal};
use crate::newform::{emit_newforms, Level, NewformFile};
use crate::pipeline::{
    default_constants, fixture_dir, parse_constants, run_pipeline, OutputFormat, PipelineConfig,
    DEFAULT_FIXTURE_SOURCES,
};
use crate::sunit::{solve_alpha_plus_one, tk_condition};

#[derive(Parser, Debug)]
#[command(name = "pp3", version, about = "Frey curves, S-units and newform elimination for A a^p + B b^p = C c^3")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Facts about Q(sqrt(-d)).
    #[command(subcommand)]
    Field(FieldCmd),
    /// Frey curve invariants and reduction data.
    #[command(subcommand)]
    Frey(FreyCmd),
    /// The equation alpha + 1 = gamma^3 and the T_K condition.
    #[command(subcommand)]
    Sunit(SunitCmd),
    /// Newform elimination.
    #[command(subcommand)]
    Eliminate(EliminateCmd),
    /// Eigenvalue fixtures.
    #[command(subcommand)]
    Fixture(FixtureCmd),
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum TextOrJson {
    Text,
    Json,
}

#[derive(Subcommand, Debug)]
enum FieldCmd {
    Info {
        #[arg(long)]
        d: u64,
        #[arg(long, value_enum, default_value = "text")]
        format: TextOrJson,
    },
}

#[derive(Args, Debug)]
struct InstanceArgs {
    #[arg(long)]
    d: u64,
    #[arg(long = "A", default_value = "1")]
    coef_a: String,
    #[arg(long = "B", default_value = "1")]
    coef_b: String,
    #[arg(long = "C", default_value = "1")]
    coef_c: String,
    #[arg(long = "a")]
    a: String,
    #[arg(long = "b")]
    b: String,
    #[arg(long = "c")]
    c: String,
    #[arg(long)]
    p: u64,
}

#[derive(Subcommand, Debug)]
enum FreyCmd {
    /// Invariants by both routes and reduction data at every relevant prime.
    Invariants(InstanceArgs),
    /// Reduction data at one prime (`p` or `p:label`), or at the primes above 3.
    Reduction {
        #[command(flatten)]
        inst: InstanceArgs,
        #[arg(long)]
        prime: Option<String>,
    },
}

#[derive(Subcommand, Debug)]
enum SunitCmd {
    Solve {
        #[arg(long)]
        d: u64,
        #[arg(long, default_value_t = 50)]
        nmax: u32,
    },
    /// Exit 0 iff every pair in the file satisfies the condition. One pair
    /// `alpha,beta` per line; `#` starts a comment.
    CheckTk {
        #[arg(long)]
        d: u64,
        #[arg(long)]
        pairs: PathBuf,
        #[arg(long = "A", default_value = "1")]
        coef_a: String,
        #[arg(long = "B", default_value = "1")]
        coef_b: String,
        #[arg(long = "C", default_value = "1")]
        coef_c: String,
    },
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum ReportFormat {
    Json,
    Table,
}

#[derive(Subcommand, Debug)]
enum EliminateCmd {
    Run {
        #[arg(long)]
        d: u64,
        #[arg(long, value_enum, default_value = "json")]
        format: ReportFormat,
        /// Directory holding the fixture files.
        #[arg(long)]
        fixtures: Option<PathBuf>,
        /// Constants file replacing the shipped one.
        #[arg(long)]
        constants: Option<PathBuf>,
        #[arg(long)]
        inertia_threshold: Option<u64>,
        #[arg(long, value_delimiter = ',')]
        skip_primes: Option<Vec<u64>>,
        #[arg(long, value_delimiter = ',')]
        levels: Option<Vec<String>>,
        /// Write the run manifest (hashes, timing) here.
        #[arg(long)]
        manifest: Option<PathBuf>,
    },
    TraceSet {
        #[arg(long)]
        norm: u64,
    },
    /// Eigenvalues of the base change of rational curves, as a newform file.
    BaseChange {
        #[arg(long)]
        d: u64,
        #[arg(long)]
        id: String,
        #[arg(long)]
        level: String,
        /// `LABEL=a1,a2,a3,a4,a6`; repeat for isogenous curves.
        #[arg(long, required = true)]
        curve: Vec<String>,
    },
}

#[derive(Subcommand, Debug)]
enum FixtureCmd {
    Build {
        #[arg(long)]
        d: u64,
        #[arg(long)]
        sources: Option<PathBuf>,
    },
}

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let text = e.render().to_string();
            let _ = if code == 0 {
                write!(out, "{text}")
            } else {
                write!(err, "{text}")
            };
            return code;
        }
    };
    match dispatch(cli.command, out) {
        Ok(code) => code,
        Err(Error::Io { source, .. }) if source.kind() == std::io::ErrorKind::BrokenPipe => 0,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            1
        }
    }
}

fn io(e: std::io::Error) -> Error {
    Error::Io { path: "<stdout>".into(), source: e }
}

fn read_file(path: &PathBuf) -> Result<String> {
    std::fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.display().to_string(),
        source,
    })
}

fn dispatch(cmd: Command, out: &mut dyn Write) -> Result<i32> {
    match cmd {
        Command::Field(FieldCmd::Info { d, format }) => field_info(d, format, out),
        Command::Frey(FreyCmd::Invariants(args)) => {
            let inst = instance(&args)?;
            print_json(out, &frey_report(&inst)?)
        }
        Command::Frey(FreyCmd::Reduction { inst, prime }) => {
            let inst = instance(&inst)?;
            let primes = match prime {
                Some(s) => vec![parse_prime(inst.ctx(), &s)?],
                None => primes_above_3(inst.ctx()),
            };
            let mut items = Vec::new();
            for q in &primes {
                items.push(local_report(&inst, q)?);
            }
            print_json(out, &Value::Array(items))
        }
        Command::Sunit(SunitCmd::Solve { d, nmax }) => {
            let ctx = FieldCtx::new(d)?;
            let sols = solve_alpha_plus_one(ctx, nmax)?;
            let v: Vec<Value> = sols
                .iter()
                .map(|s| {
                    json!({
                        "alpha": s.alpha.to_string(),
                        "gamma": s.gamma.to_string(),
                        "sign": s.sign,
                        "n": s.n,
                    })
                })
                .collect();
            print_json(out, &Value::Array(v))
        }
        Command::Sunit(SunitCmd::CheckTk { d, pairs, coef_a, coef_b, coef_c }) => {
            let ctx = FieldCtx::new(d)?;
            let list = parse_pairs(ctx, &read_file(&pairs)?)?;
            let (a, b, c) = (
                QuadElem::parse(ctx, &coef_a)?,
                QuadElem::parse(ctx, &coef_b)?,
                QuadElem::parse(ctx, &coef_c)?,
            );
            let tk = tk_set(&a, &b, &c)?;
            let ok = tk_condition(&list, &primes_above_3(ctx), &tk)?;
            writeln!(out, "{ok}").map_err(io)?;
            Ok(if ok { 0 } else { 1 })
        }
        Command::Eliminate(EliminateCmd::Run {
            d,
            format,
            fixtures,
            constants,
            inertia_threshold,
            skip_primes,
            levels,
            manifest,
        }) => {
            let constants = match constants {
                Some(p) => parse_constants(&read_file(&p)?)?,
                None => default_constants(),
            };
            let mut cfg = PipelineConfig::for_field(d, &constants, &fixture_dir(fixtures.as_deref()))?;
            if let Some(t) = inertia_threshold {
                cfg.inertia_threshold = t;
            }
            if let Some(s) = skip_primes {
                cfg.skip_primes = s;
            }
            if let Some(ls) = levels {
                cfg.levels = ls.iter().map(|l| l.parse::<Level>()).collect::<Result<_>>()?;
            }
            cfg.format = match format {
                ReportFormat::Json => OutputFormat::Json,
                ReportFormat::Table => OutputFormat::Table,
            };
            let (report, man) = run_pipeline(&cfg)?;
            let text = match cfg.format {
                OutputFormat::Json => report.to_json(),
                OutputFormat::Table => report.to_table(),
            };
            write!(out, "{text}").map_err(io)?;
            if let Some(path) = manifest {
                let body = serde_json::to_string_pretty(&man).expect("manifest serialises");
                std::fs::write(&path, body + "\n").map_err(|source| Error::Io {
                    path: path.display().to_string(),
                    source,
                })?;
            }
            Ok(0)
        }
        Command::Eliminate(EliminateCmd::TraceSet { norm }) => {
            if norm < 2 {
                return Err(Error::Precondition(format!("norm {norm} must be at least 2")));
            }
            let s: Vec<String> = trace_set_a(norm).iter().map(|a| a.to_string()).collect();
            writeln!(out, "{}", s.join(" ")).map_err(io)?;
            Ok(0)
        }
        Command::Eliminate(EliminateCmd::BaseChange { d, id, level, curve }) => {
            let ctx = FieldCtx::new(d)?;
            let curves = curve
                .iter()
                .map(|c| RationalCurve::parse(c))
                .collect::<Result<Vec<_>>>()?;
            let form = bianchi_form(ctx, &id, level.parse()?, &curves)?;
            write!(out, "{}", emit_newforms(&NewformFile { ctx, forms: vec![form] })).map_err(io)?;
            Ok(0)
        }
        Command::Fixture(FixtureCmd::Build { d, sources }) => {
            let text = match sources {
                Some(p) => read_file(&p)?,
                None => DEFAULT_FIXTURE_SOURCES.to_string(),
            };
            let file = build_fixture(&parse_sources(&text)?, d)?;
            write!(out, "{}", emit_newforms(&file)).map_err(io)?;
            Ok(0)
        }
    }
}

fn print_json(out: &mut dyn Write, v: &Value) -> Result<i32> {
    let s = serde_json::to_string_pretty(v).expect("json value serialises");
    writeln!(out, "{s}").map_err(io)?;
    Ok(0)
}

fn field_info(d: u64, format: TextOrJson, out: &mut dyn Write) -> Result<i32> {
    let ctx = FieldCtx::new(d)?;
    let h = class_number(ctx);
    let (kind3, _) = splitting_type(3, ctx)?;
    let v = json!({
        "field": ctx.to_string(),
        "d": d,
        "disc": ctx.disc(),
        "omega": ctx.omega_description(),
        "h_K": h,
        "cl3_trivial": h % 3 != 0,
        "three": kind3.to_string(),
    });
    match format {
        TextOrJson::Json => print_json(out, &v),
        TextOrJson::Text => {
            let text = format!(
                "field {}\ndisc {}\nomega {}\nh_K={}\ncl3_trivial {}\n3 {}\n",
                ctx,
                ctx.disc(),
                ctx.omega_description(),
                h,
                h % 3 != 0,
                kind3
            );
            write!(out, "{text}").map_err(io)?;
            Ok(0)
        }
    }
}

fn instance(args: &InstanceArgs) -> Result<FreyInstance> {
    let ctx = FieldCtx::new(args.d)?;
    let e = |s: &str| QuadElem::parse(ctx, s);
    FreyInstance::new(
        e(&args.coef_a)?,
        e(&args.coef_b)?,
        e(&args.coef_c)?,
        e(&args.a)?,
        e(&args.b)?,
        e(&args.c)?,
        args.p,
    )
}

/// `p` (the unique prime above `p`, or the first of two) or `p:label`.
fn parse_prime(ctx: FieldCtx, s: &str) -> Result<PrimeIdeal> {
    let (p, label) = match s.split_once(':') {
        Some((p, l)) => (p, Some(l)),
        None => (s, None),
    };
    let p: u64 = p
        .trim()
        .parse()
        .map_err(|_| Error::Parse(format!("bad prime {s:?}")))?;
    match label {
        Some(l) => PrimeIdeal::from_label(ctx, p, l.trim()),
        None => Ok(crate::ideal::primes_above(p, ctx)?.remove(0)),
    }
}

fn parse_pairs(ctx: FieldCtx, text: &str) -> Result<Vec<(QuadElem, QuadElem)>> {
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (a, b) = line
            .split_once(',')
            .ok_or_else(|| Error::Parse(format!("line {}: expected alpha,beta", i + 1)))?;
        out.push((QuadElem::parse(ctx, a.trim())?, QuadElem::parse(ctx, b.trim())?));
    }
    Ok(out)
}

fn invariants_json(inv: &CurveInvariants) -> Value {
    json!({
        "c4": inv.c4.to_string(),
        "c6": inv.c6.to_string(),
        "delta": inv.delta.to_string(),
        "j": inv.j.to_string(),
    })
}

fn reduction_json(r: &ReductionReport) -> Value {
    json!({
        "prime": format!("{}:{}", r.prime.p(), r.prime.label()),
        "ideal": r.prime.to_string(),
        "type": r.reduction.to_string(),
        "v_delta": r.v_delta,
        "v_c4": r.v_c4,
        "minimal_after_rescale": r.minimal_after_rescale,
        "in_tk": r.in_tk,
        "conductor_exponent_candidates": r.conductor_exponent_candidates,
        "serre_bound": r.serre_bound,
    })
}

fn result_json<T>(r: Result<T>, f: impl FnOnce(T) -> Value) -> Value {
    match r {
        Ok(v) => f(v),
        Err(e) => json!({ "error": e.to_string() }),
    }
}

fn local_report(inst: &FreyInstance, q: &PrimeIdeal) -> Result<Value> {
    let mut v = reduction_json(&reduction_type(inst, q)?);
    if q.p() == 3 {
        v["conductor_at_lambda"] = result_json(conductor_exponent_at_lambda(inst, q), |c| {
            json!({ "candidates": c.candidates, "swapped": c.swapped })
        });
        v["j_valuation"] = result_json(j_valuation_lemma(inst, q), |j| {
            json!({ "value": j.value, "p_divides_inertia": j.p_divides_inertia })
        });
        v["j_valuation_direct"] = result_json(direct_j_valuation(inst, q), |x| json!(x));
    }
    Ok(v)
}

fn frey_report(inst: &FreyInstance) -> Result<Value> {
    let model = crate::frey::frey_model(inst)?;
    let from_model = invariants_from_model(&model)?;
    let closed = invariants_closed_form(inst)?;
    let mut local = Vec::new();
    for q in relevant_primes(inst)? {
        local.push(local_report(inst, &q)?);
    }
    Ok(json!({
        "field": inst.ctx().to_string(),
        "p": inst.p(),
        "primitive": inst.is_primitive(),
        "model": {
            "a1": model.a1.to_string(),
            "a2": model.a2.to_string(),
            "a3": model.a3.to_string(),
            "a4": model.a4.to_string(),
            "a6": model.a6.to_string(),
        },
        "invariants_model": invariants_json(&from_model),
        "invariants_closed_form": invariants_json(&closed),
        "agree": from_model == closed,
        "reduction": local,
    }))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn call(args: &[&str]) -> (i32, String, String) {
        let mut out = Vec::new();
        let mut err = Vec::new();
        let mut argv = vec!["pp3"];
        argv.extend_from_slice(args);
        let code = run(argv, &mut out, &mut err);
        (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
    }

    #[test]
    fn trace_set_output() {
        let (code, out, _) = call(&["eliminate", "trace-set", "--norm", "7"]);
        assert_eq!(code, 0);
        assert_eq!(out, "-4 -1 2 5\n");
    }

    #[test]
    fn exit_codes() {
        assert_eq!(call(&["eliminate", "trace-set", "--bogus"]).0, 2);
        assert_eq!(call(&["field", "info", "--d", "4"]).0, 1);
        assert_eq!(call(&["--help"]).0, 0);
    }
}
