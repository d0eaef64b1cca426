use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, CommandFactory, Parser, Subcommand, ValueEnum};
use moperad::assoc_solver::{solve_associator_with, solve_cyclotomic_with, FreeChoices, SolveReport};
use moperad::chord_categories::{check_cd_relation, CD_TAGS};
use moperad::graded_lie::{free_algebra, kernel_algebra, t_algebra, tbar2_algebra, tgamma_algebra, LieAlgebra};
use moperad::gt_torsors::*;
use moperad::par_groupoids::{braid_linking, catalogue, check_relation, random_endomorphism, ParObject};
use moperad::rational::{parse_q, Q};
use moperad::report::{run_checks, Check, CheckFn, Report};
use moperad::Error;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

#[derive(Parser)]
#[command(name = "moperad-kit", version, about = "Exact checks for parenthesized braids, chord diagrams and associator torsors")]
struct Cli {
    /// Print the report as JSON instead of text.
    #[arg(long, global = true)]
    json: bool,
    /// Seed for every randomized check.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check defining relations of a presentation.
    #[command(subcommand)]
    Verify(Verify),
    /// Inspect truncated graded Lie algebras.
    #[command(subcommand)]
    Lie(Lie),
    /// Solve for (cyclotomic) associators degree by degree.
    #[command(subcommand)]
    Solve(Solve),
    /// Compose, act with and validate group and torsor elements.
    #[command(subcommand)]
    Torsor(Torsor),
}

#[derive(Clone, Copy, ValueEnum)]
enum Presentation {
    Pab,
    Pab1,
    Pabgamma,
}

#[derive(Subcommand)]
enum Verify {
    /// Relations of PaB, PaB^1 or PaB^Γ, evaluated in the braid groups.
    Presentation {
        #[arg(long, value_enum)]
        which: Presentation,
        #[arg(long = "N", default_value_t = 1, value_parser = clap::value_parser!(u32).range(1..))]
        n: u32,
        /// Random endomorphisms for the Γ-weight versus linking-number cross-check.
        #[arg(long, default_value_t = 0)]
        samples: usize,
    },
    /// Relations of the crossed-product chord diagram model.
    Cdgamma {
        #[arg(long = "N", value_parser = clap::value_parser!(u32).range(1..))]
        n: u32,
        #[arg(long, default_value_t = 3, value_parser = clap::value_parser!(u64).range(1..))]
        degree: u64,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum AlgebraKind {
    T,
    Tgamma,
    Free,
    Tbar,
    Kernel,
}

#[derive(Subcommand)]
enum Lie {
    /// Graded dimensions and basis labels.
    Basis {
        #[arg(long, value_enum)]
        algebra: AlgebraKind,
        /// Number of strands, or of generators for `free`.
        #[arg(long, default_value_t = 2)]
        n: u32,
        #[arg(long = "N", default_value_t = 1, value_parser = clap::value_parser!(u32).range(1..))]
        modulus: u32,
        #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
        degree: u64,
    },
}

#[derive(Args)]
struct SolveCommon {
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
    degree: u64,
    /// Where to write the solution.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Value of a free coordinate, as `degree:index=value`; unset ones are 0.
    #[arg(long = "free", value_parser = parse_free)]
    free: Vec<((usize, usize), Q)>,
}

#[derive(Subcommand)]
enum Solve {
    Associator {
        #[arg(long, default_value = "1", value_parser = parse_rational)]
        mu: Q,
        #[command(flatten)]
        common: SolveCommon,
    },
    Cyclotomic {
        #[arg(long = "N", value_parser = clap::value_parser!(u32).range(1..))]
        n: u32,
        /// Associator file (an element or a solve report).
        #[arg(long)]
        base: PathBuf,
        #[arg(long, default_value_t = 1)]
        gamma: i64,
        #[command(flatten)]
        common: SolveCommon,
    },
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Kind {
    Gt,
    Gtm,
    Grt,
    Grtgamma,
    Assoc,
    Cycassoc,
}

impl Kind {
    fn name(self) -> &'static str {
        match self {
            Kind::Gt => "gt",
            Kind::Gtm => "gtm",
            Kind::Grt => "grt",
            Kind::Grtgamma => "grtgamma",
            Kind::Assoc => "assoc",
            Kind::Cycassoc => "cycassoc",
        }
    }
}

#[derive(Args)]
struct TorsorArgs {
    /// Expected kind of the first input.
    #[arg(long, value_enum)]
    kind: Option<Kind>,
    #[arg(long = "in", required = true)]
    inputs: Vec<PathBuf>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Torsor {
    /// Product of two group elements of the same kind.
    Compose(TorsorArgs),
    /// Action of a group element on an associator (either order).
    Act(TorsorArgs),
    /// Check the defining equations; gt and gtm take a reference associator as second input.
    Validate {
        #[command(flatten)]
        args: TorsorArgs,
        #[arg(long, default_value_t = 1)]
        gamma: i64,
    },
}

fn parse_rational(s: &str) -> Result<Q, String> {
    parse_q(s).ok_or_else(|| format!("not a rational number: {s:?}"))
}

fn parse_free(s: &str) -> Result<((usize, usize), Q), String> {
    let err = || format!("expected degree:index=value, got {s:?}");
    let (key, value) = s.split_once('=').ok_or_else(err)?;
    let (d, j) = key.split_once(':').ok_or_else(err)?;
    let d = d.trim().parse().map_err(|_| err())?;
    let j = j.trim().parse().map_err(|_| err())?;
    Ok(((d, j), parse_rational(value.trim())?))
}

/// Input or output problem: reported on stderr with exit status 2.
struct InputError(String);

impl From<Error> for InputError {
    fn from(e: Error) -> Self {
        InputError(e.to_string())
    }
}

fn read_json(path: &Path) -> Result<Value, InputError> {
    let text = fs::read_to_string(path).map_err(|e| InputError(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| InputError(format!("{}: {e}", path.display())))
}

fn read_element(path: &Path) -> Result<TorsorElement, InputError> {
    let v = read_json(path)?;
    // solve reports wrap the element
    let v = if v.get("solution").is_some() { v["solution"].clone() } else { v };
    TorsorElement::from_json(&v).map_err(|e| InputError(format!("{}: {e}", path.display())))
}

fn write_json(path: &Path, v: &Value) -> Result<(), InputError> {
    let text = serde_json::to_string_pretty(v).expect("JSON values serialize");
    fs::write(path, text + "\n").map_err(|e| InputError(format!("{}: {e}", path.display())))
}

fn job<'a>(id: impl Into<String>, f: impl FnOnce() -> Result<(bool, Value), Error> + Send + 'a) -> (String, CheckFn<'a>) {
    (id.into(), Box::new(f))
}

fn verify_presentation(which: Presentation, n: u32, samples: usize, seed: u64) -> Result<Vec<Check>, InputError> {
    let name = match which {
        Presentation::Pab => "pab",
        Presentation::Pab1 => "pab1",
        Presentation::Pabgamma => "pabgamma",
    };
    let mut jobs: Vec<(String, CheckFn)> = catalogue(name)?
        .iter()
        .map(|tag| {
            job(format!("relation:{tag}"), move || {
                let c = check_relation(tag, n)?;
                Ok((c.holds, c.to_json()))
            })
        })
        .collect();
    if samples > 0 && !matches!(which, Presentation::Pab) {
        jobs.push(job("gamma-weight:random", move || gamma_weight_samples(n, samples, seed)));
    }
    Ok(run_checks(jobs))
}

/// The Γ-weight of an endomorphism of PaB^1 is the mod-N linking number with strand 0.
fn gamma_weight_samples(n: u32, samples: usize, seed: u64) -> Result<(bool, Value), Error> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let sources = ["(0 1)", "((0 1) 2)", "(0 (1 2))", "(((0 1) 2) 3)"];
    let mut mismatches = Vec::new();
    let mut nontrivial = 0;
    for k in 0..samples {
        let src = ParObject::parse(sources[k % sources.len()])?;
        let w = random_endomorphism(&src, 10, None, &mut rng)?;
        let links = braid_linking(&w)?;
        let gw = w.gamma_weight(n)?;
        nontrivial += usize::from(links.values().any(|l| l.rem_euclid(n as i64) != 0));
        for (strand, link) in &links {
            if gw.get(*strand) as i64 != link.rem_euclid(n as i64) {
                mismatches.push(json!({"word": w.to_string(), "strand": strand, "linking": link}));
            }
        }
    }
    let details = json!({"samples": samples, "seed": seed, "nontrivial": nontrivial, "mismatches": mismatches});
    Ok((mismatches.is_empty(), details))
}

fn verify_cdgamma(n: u32, degree: usize) -> Vec<Check> {
    let jobs = CD_TAGS
        .iter()
        .map(|tag| {
            job(format!("relation:{tag}"), move || {
                let c = check_cd_relation(tag, n, degree)?;
                Ok((c.holds, c.to_json()))
            })
        })
        .collect();
    run_checks(jobs)
}

fn lie_basis(kind: AlgebraKind, n: u32, modulus: u32, degree: usize) -> Vec<Check> {
    let id = match kind {
        AlgebraKind::T => "t",
        AlgebraKind::Tgamma => "tgamma",
        AlgebraKind::Free => "free",
        AlgebraKind::Tbar => "tbar",
        AlgebraKind::Kernel => "kernel",
    };
    vec![Check::run(
        &format!("basis:{id}"),
        Box::new(move || {
            let strands: Vec<u32> = (1..=n).collect();
            let alg: std::sync::Arc<LieAlgebra> = match kind {
                AlgebraKind::T => t_algebra(&strands, degree),
                AlgebraKind::Tgamma => tgamma_algebra(&strands, modulus, degree),
                AlgebraKind::Free => {
                    let names: Vec<String> =
                        if n == 2 { vec!["x".into(), "y".into()] } else { (1..=n).map(|i| format!("x{i}")).collect() };
                    let refs: Vec<&str> = names.iter().map(String::as_str).collect();
                    free_algebra(&refs, degree)
                }
                AlgebraKind::Tbar => tbar2_algebra(modulus, degree),
                AlgebraKind::Kernel => kernel_algebra(modulus, degree),
            };
            let dims = alg.dims();
            let mut details = json!({"algebra": alg.id(), "dims": dims, "total": alg.dim()});
            if alg.dim() <= 200 {
                details["basis"] = json!((0..alg.dim()).map(|i| alg.basis_label(i)).collect::<Vec<_>>());
            }
            Ok((dims.len() == degree, details))
        }),
    )]
}

fn choices(free: &[((usize, usize), Q)]) -> FreeChoices {
    free.iter().cloned().collect()
}

fn solve_checks(
    solve: impl FnOnce() -> Result<SolveReport, Error>,
    degree: usize,
    out: Option<&Path>,
) -> Result<Vec<Check>, InputError> {
    let start = Instant::now();
    let rep = solve();
    let elapsed = start.elapsed().as_secs_f64() * 1e3;
    let rep = match rep {
        Ok(r) => r,
        Err(e) => {
            let fail = matches!(e, Error::Obstruction { .. });
            let mut c = Check::run(
                "solve",
                Box::new(move || if fail { Ok((false, json!({"obstruction": e.to_string()}))) } else { Err(e) }),
            );
            c.timing_ms += elapsed;
            return Ok(vec![c]);
        }
    };
    let mut details = rep.to_json();
    if let Some(path) = out {
        write_json(path, &rep.solution.to_json(Some(rep.certified_degree)))?;
        details["solution"] = json!(path.display().to_string());
    }
    let certified = rep.certified_degree;
    let mut solve = Check::run("solve", Box::new(move || Ok((certified == degree, details))));
    solve.timing_ms += elapsed;
    let solution = rep.solution;
    let recheck = Check::run(
        "validate",
        Box::new(move || {
            let v = match &solution {
                TorsorElement::Assoc(t) => validate_assoc(t),
                TorsorElement::CycAssoc(t) => validate_cycassoc(t, 1),
                _ => unreachable!("the solver returns associators"),
            };
            Ok((v.passes(), v.to_json()))
        }),
    );
    Ok(vec![solve, recheck])
}

fn load_inputs(args: &TorsorArgs, max: usize) -> Result<Vec<TorsorElement>, InputError> {
    if args.inputs.len() > max {
        return Err(InputError(format!("at most {max} --in files expected")));
    }
    let elems: Vec<TorsorElement> = args.inputs.iter().map(|p| read_element(p)).collect::<Result<_, _>>()?;
    if let Some(k) = args.kind {
        if elems[0].kind() != k.name() {
            return Err(InputError(format!("first input is {}, not {}", elems[0].kind(), k.name())));
        }
    }
    Ok(elems)
}

fn element_check(id: &str, result: Result<TorsorElement, Error>, out: Option<&Path>) -> Result<Check, InputError> {
    let mut written = None;
    if let (Ok(e), Some(path)) = (&result, out) {
        write_json(path, &e.to_json(None))?;
        written = Some(path.display().to_string());
    }
    Ok(Check::run(
        id,
        Box::new(move || {
            let e = result?;
            let body = match written {
                Some(p) => json!({"kind": e.kind(), "written": p}),
                None => json!({"kind": e.kind(), "result": e.to_json(None)}),
            };
            Ok((true, body))
        }),
    ))
}

fn torsor_compose(args: &TorsorArgs) -> Result<Vec<Check>, InputError> {
    let e = load_inputs(args, 2)?;
    if e.len() != 2 {
        return Err(InputError("compose needs two --in files".into()));
    }
    use TorsorElement as T;
    let r = match (&e[0], &e[1]) {
        (T::Gt(a), T::Gt(b)) => gt_compose(a, b).map(T::Gt),
        (T::Grt(a), T::Grt(b)) => grt_compose(a, b).map(T::Grt),
        (T::Gtm(a), T::Gtm(b)) => gtm_compose(a, b).map(T::Gtm),
        (T::GrtGamma(a), T::GrtGamma(b)) => grtgamma_compose(a, b).map(T::GrtGamma),
        (a, b) => return Err(InputError(format!("cannot compose {} with {}", a.kind(), b.kind()))),
    };
    Ok(vec![element_check("compose", r, args.out.as_deref())?])
}

fn torsor_act(args: &TorsorArgs) -> Result<Vec<Check>, InputError> {
    let e = load_inputs(args, 2)?;
    if e.len() != 2 {
        return Err(InputError("act needs two --in files".into()));
    }
    use TorsorElement as T;
    let r = match (&e[0], &e[1]) {
        (T::Gt(a), T::Assoc(t)) | (T::Assoc(t), T::Gt(a)) => act_gt_on_assoc(a, t).map(T::Assoc),
        (T::Grt(b), T::Assoc(t)) | (T::Assoc(t), T::Grt(b)) => act_assoc_grt(t, b).map(T::Assoc),
        (T::Gtm(a), T::CycAssoc(t)) | (T::CycAssoc(t), T::Gtm(a)) => act_gtm_on_cycassoc(a, t).map(T::CycAssoc),
        (T::GrtGamma(b), T::CycAssoc(t)) | (T::CycAssoc(t), T::GrtGamma(b)) => {
            act_cycassoc_grtgamma(t, b).map(T::CycAssoc)
        }
        (a, b) => return Err(InputError(format!("{} does not act on {}", a.kind(), b.kind()))),
    };
    Ok(vec![element_check("act", r, args.out.as_deref())?])
}

fn torsor_validate(args: &TorsorArgs, gamma: i64) -> Result<Vec<Check>, InputError> {
    let e = load_inputs(args, 2)?;
    let reference = e.get(1).cloned();
    let kind = e[0].kind();
    let first = e[0].clone();
    Ok(vec![Check::run(
        &format!("validate:{kind}"),
        Box::new(move || {
            use TorsorElement as T;
            let rep = match (&first, &reference) {
                (T::Assoc(t), _) => validate_assoc(t),
                (T::CycAssoc(t), _) => validate_cycassoc(t, gamma),
                (T::Grt(b), _) => validate_grt(b),
                (T::GrtGamma(b), _) => validate_grtgamma(b, gamma),
                (T::Gt(a), None) => validate_gt(a, None)?,
                (T::Gt(a), Some(T::Assoc(r))) => validate_gt(a, Some(r))?,
                (T::Gtm(a), None) => validate_gtm(a, None, gamma)?,
                (T::Gtm(a), Some(T::CycAssoc(r))) => validate_gtm(a, Some(r), gamma)?,
                (a, Some(r)) => {
                    return Err(Error::Invalid(format!("{} is not a reference for {}", r.kind(), a.kind())));
                }
            };
            Ok((rep.passes(), rep.to_json()))
        }),
    )])
}

fn run(cli: &Cli) -> Result<Vec<Check>, InputError> {
    match &cli.command {
        Command::Verify(Verify::Presentation { which, n, samples }) => verify_presentation(*which, *n, *samples, cli.seed),
        Command::Verify(Verify::Cdgamma { n, degree }) => Ok(verify_cdgamma(*n, *degree as usize)),
        Command::Lie(Lie::Basis { algebra, n, modulus, degree }) => Ok(lie_basis(*algebra, *n, *modulus, *degree as usize)),
        Command::Solve(Solve::Associator { mu, common }) => {
            let d = common.degree as usize;
            solve_checks(|| solve_associator_with(mu, d, &choices(&common.free)), d, common.out.as_deref())
        }
        Command::Solve(Solve::Cyclotomic { n, base, gamma, common }) => {
            let d = common.degree as usize;
            let base = match read_element(base)? {
                TorsorElement::Assoc(t) => t,
                other => return Err(InputError(format!("--base must be an assoc element, got {}", other.kind()))),
            };
            solve_checks(|| solve_cyclotomic_with(&base, *n, d, &choices(&common.free), *gamma), d, common.out.as_deref())
        }
        Command::Torsor(Torsor::Compose(a)) => torsor_compose(a),
        Command::Torsor(Torsor::Act(a)) => torsor_act(a),
        Command::Torsor(Torsor::Validate { args, gamma }) => torsor_validate(args, *gamma),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let checks = match run(&cli) {
        Ok(c) => c,
        Err(InputError(msg)) => {
            let mut cmd = Cli::command();
            cmd.error(clap::error::ErrorKind::ValueValidation, msg).exit();
        }
    };
    let mut report = Report::new(std::env::args().skip(1).collect());
    report.extend(checks);
    if cli.json {
        println!("{}", serde_json::to_string_pretty(&report.to_json()).expect("JSON values serialize"));
    } else {
        print!("{}", report.to_text());
    }
    ExitCode::from(report.exit_code() as u8)
}
