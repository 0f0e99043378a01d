use std::collections::{BTreeSet, HashMap};
use std::fmt::Display;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{ArgGroup, Args, Parser, Subcommand};
use mmlag_core::coupling::{count_terms, enumerate_mset, CouplingTable};
use mmlag_core::curve::{eval_expression, generator_environment, report_csv, CurveConfig};
use mmlag_core::diagram::{
    catalog_json, correlator, enumerate_diagrams, render_catalog_dot, render_dot, symmetry_factor,
};
use mmlag_core::oracle::w1_recursion;
use mmlag_core::verify::{compare_lambda, expected_failure, golden, run_all};
use mmlag_core::{Expression, Generator, PointLabel};
use num_complex::Complex64;

#[derive(Parser)]
#[command(name = "mmlag", version, about = "Lagrangean computer algebra for Hermitean one-matrix models")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print the coupling λ^(h)
    Lambda {
        #[arg(long)]
        h: u32,
        #[arg(long)]
        json: bool,
    },
    /// Compare computed couplings with the tabulated ones
    LambdaVerify {
        #[arg(long, default_value_t = 5)]
        max_h: u32,
    },
    /// Term counts of λ^(h), or the N(k,h) grid with --grid
    CountTerms {
        #[arg(long, default_value_t = 10)]
        max_h: u32,
        /// CSV output (the only format; accepted for scripts that pass it)
        #[arg(long)]
        csv: bool,
        #[arg(long, requires = "max_k")]
        grid: bool,
        #[arg(long)]
        max_k: Option<u32>,
    },
    /// List the multi-index set M_k^(h)
    Mset {
        #[arg(long)]
        k: u32,
        #[arg(long)]
        h: u32,
    },
    /// Diagram catalog with weights
    Diagrams {
        #[arg(long)]
        k: u32,
        #[arg(long)]
        h: u32,
        /// Write one DOT file per diagram plus catalog.dot into DIR
        #[arg(long, value_name = "DIR")]
        dot: Option<PathBuf>,
        #[arg(long)]
        json: bool,
    },
    /// Symbolic W_k^(h) as a diagram sum
    Correlator {
        #[command(flatten)]
        kh: Order,
        #[arg(long)]
        k: u32,
    },
    /// Symbolic W_1^(h) from the loop-equation recursion
    Oracle {
        #[command(flatten)]
        kh: Order,
    },
    /// Exact comparison of the diagram sum and the recursion for W_1^(h)
    CrossCheck {
        #[command(flatten)]
        kh: Order,
    },
    /// Numeric evaluation on a one-cut curve
    Curve(CurveArgs),
    /// Run every acceptance criterion
    VerifyAll,
}

#[derive(Args)]
struct Order {
    #[arg(long)]
    h: u32,
    #[arg(long, default_value_t = 1)]
    s: u32,
    #[arg(long)]
    json: bool,
}

#[derive(Args)]
#[command(group(ArgGroup::new("mode").required(true).args(["moments", "eval"])))]
#[command(group(ArgGroup::new("target").args(["k", "free_energy"])))]
struct CurveArgs {
    #[arg(long, value_name = "FILE")]
    config: PathBuf,
    /// Report moments y_{f,i} for f <= FMAX
    #[arg(long, value_name = "FMAX")]
    moments: Option<u32>,
    #[arg(long, requires = "target")]
    eval: bool,
    #[arg(long, requires = "h")]
    k: Option<u32>,
    #[arg(long)]
    h: Option<u32>,
    #[arg(long, value_name = "H")]
    free_energy: Option<u32>,
    /// Point for the next external leg, `RE` or `RE,IM`; repeat once per leg
    #[arg(long = "at", value_name = "P", value_parser = parse_point)]
    at: Vec<Complex64>,
}

fn parse_point(s: &str) -> Result<Complex64, String> {
    let parts: Vec<&str> = s.split(',').collect();
    let num = |t: &str| t.trim().parse::<f64>().map_err(|_| format!("bad coordinate `{t}`"));
    match parts[..] {
        [re] => Ok(Complex64::new(num(re)?, 0.0)),
        [re, im] => Ok(Complex64::new(num(re)?, num(im)?)),
        _ => Err(format!("expected RE or RE,IM, got `{s}`")),
    }
}

enum Failure {
    Usage(String),
    Verification(String),
}

fn usage<E: Display>(e: E) -> Failure {
    Failure::Usage(e.to_string())
}

fn print_expression(e: &Expression, json: bool) {
    if json {
        println!("{}", serde_json::to_string_pretty(&e.to_json()).expect("json"));
    } else {
        println!("{e}");
    }
}

fn run(cmd: Command) -> Result<(), Failure> {
    let table = CouplingTable::new();
    match cmd {
        Command::Lambda { h, json } => {
            table.extend_to(h).map_err(usage)?;
            print_expression(&*table.lambda(h).map_err(usage)?, json);
        }
        Command::LambdaVerify { max_h } => {
            let orders: Vec<u32> = golden::published_orders().filter(|&h| h <= max_h).collect();
            if orders.is_empty() {
                return Err(Failure::Usage(format!("no tabulated orders up to {max_h}")));
            }
            table.extend_to(max_h).map_err(usage)?;
            match compare_lambda(&table, max_h) {
                Ok(msg) => println!("MATCH: {msg}"),
                Err(msg) => {
                    println!("MISMATCH: {msg}");
                    return Err(Failure::Verification("computed couplings differ from the tabulated ones".into()));
                }
            }
        }
        Command::CountTerms { max_h, csv: _, grid, max_k } => {
            if grid {
                let max_k = max_k.expect("clap enforces --max-k");
                println!("k,h,n");
                for k in 0..=max_k {
                    for h in 0..=max_h {
                        println!("{k},{h},{}", count_terms(k, h));
                    }
                }
            } else {
                println!("h,terms");
                for h in (0..=max_h).filter(|&h| h != 1) {
                    table.extend_to(h).map_err(usage)?;
                    println!("{h},{}", table.lambda(h).map_err(usage)?.len());
                }
            }
        }
        Command::Mset { k, h } => {
            for alpha in enumerate_mset(k, h) {
                println!("{alpha}");
            }
        }
        Command::Diagrams { k, h, dot, json } => {
            let ds = enumerate_diagrams(k, h).map_err(usage)?;
            if let Some(dir) = dot {
                std::fs::create_dir_all(&dir).map_err(usage)?;
                for (n, d) in ds.iter().enumerate() {
                    std::fs::write(dir.join(format!("diagram_{k}_{h}_{n}.dot")), render_dot(d)).map_err(usage)?;
                }
                std::fs::write(dir.join("catalog.dot"), render_catalog_dot(&ds)).map_err(usage)?;
            }
            if json {
                println!("{}", serde_json::to_string_pretty(&catalog_json(&ds)).expect("json"));
            } else {
                for (n, d) in ds.iter().enumerate() {
                    let vs: Vec<String> = d.vertices.iter().map(|v| format!("h{}{}", v.h, v.alpha)).collect();
                    let es: Vec<String> =
                        d.edges.iter().map(|e| format!("{}.{}-{}.{}", e.a.v, e.a.f, e.b.v, e.b.f)).collect();
                    let xs: Vec<String> = d.external.iter().map(|x| format!("{}:{}.{}", x.label, x.v, x.m)).collect();
                    println!(
                        "{n} weight={} vertices=[{}] edges=[{}] legs=[{}]",
                        symmetry_factor(d).value,
                        vs.join(" "),
                        es.join(" "),
                        xs.join(" ")
                    );
                }
                println!("{} diagrams", ds.len());
            }
        }
        Command::Correlator { kh, k } => {
            table.extend_to(kh.h).map_err(usage)?;
            print_expression(&correlator(k, kh.h, kh.s, &table).map_err(usage)?, kh.json);
        }
        Command::Oracle { kh } => {
            table.extend_to(kh.h.max(1)).map_err(usage)?;
            let seed = correlator(1, 1, kh.s, &table).map_err(usage)?;
            print_expression(&w1_recursion(kh.h, kh.s, Some(&seed)).map_err(usage)?, kh.json);
        }
        Command::CrossCheck { kh } => {
            table.extend_to(kh.h.max(1)).map_err(usage)?;
            let seed = correlator(1, 1, kh.s, &table).map_err(usage)?;
            let oracle = w1_recursion(kh.h, kh.s, Some(&seed)).map_err(usage)?;
            let diagrams = correlator(1, kh.h, kh.s, &table).map_err(usage)?;
            if oracle == diagrams {
                println!("EQUAL ({} terms)", oracle.len());
            } else {
                println!("DIFFERENT ({} terms differ)", (&oracle - &diagrams).len());
                return Err(Failure::Verification(format!("pipelines disagree at h={}, s={}", kh.h, kh.s)));
            }
        }
        Command::Curve(args) => curve(args, &table)?,
        Command::VerifyAll => {
            let reports = run_all(|r| println!("{}", r.line()));
            let mut bad = Vec::new();
            for r in &reports {
                match (r.passed, expected_failure(r.id)) {
                    (false, Some(why)) => println!("note: criterion {} is a known failure: {why}", r.id),
                    (true, Some(_)) => bad.push(format!("criterion {} passed but is listed as a known failure", r.id)),
                    (false, None) => bad.push(format!("criterion {} failed", r.id)),
                    (true, None) => {}
                }
            }
            println!("{}/{} criteria pass", reports.iter().filter(|r| r.passed).count(), reports.len());
            if !bad.is_empty() {
                return Err(Failure::Verification(bad.join("; ")));
            }
        }
    }
    Ok(())
}

fn curve(args: CurveArgs, table: &CouplingTable) -> Result<(), Failure> {
    let text =
        std::fs::read_to_string(&args.config).map_err(|e| Failure::Usage(format!("{}: {e}", args.config.display())))?;
    let (data, q) = CurveConfig::from_json(&text).and_then(|c| c.build()).map_err(usage)?;
    if let Some(fmax) = args.moments {
        let gens: BTreeSet<Generator> =
            (1..=fmax).flat_map(|f| (1..=2).map(move |i| Generator::moment_at(f, i))).collect();
        let env = generator_environment(&data, &gens, &HashMap::new(), &q).map_err(usage)?;
        print!("{}", report_csv(&env));
        return Ok(());
    }
    let (k, h, name) = match (args.k, args.h, args.free_energy) {
        (_, _, Some(h)) => (0, h, format!("F^({h})")),
        (Some(k), Some(h), None) => (k, h, format!("W_{k}^({h})")),
        _ => return Err(Failure::Usage("--eval needs --k and --h, or --free-energy".into())),
    };
    if args.at.len() != k as usize {
        return Err(Failure::Usage(format!(
            "{name} has {k} external legs but {} --at points were given",
            args.at.len()
        )));
    }
    table.extend_to(h).map_err(usage)?;
    let e = correlator(k, h, 1, table).map_err(usage)?;
    let points: HashMap<PointLabel, Complex64> =
        args.at.iter().enumerate().map(|(n, p)| (PointLabel::leg(n + 1), *p)).collect();
    let v = eval_expression(&data, &e, &points, &q).map_err(usage)?;
    println!("quantity,value_re,value_im");
    println!("{name},{:.17e},{:.17e}", v.re, v.im);
    Ok(())
}

fn configure_threads() -> Result<(), String> {
    let Ok(raw) = std::env::var("MMLAG_THREADS") else {
        return Ok(());
    };
    let n: usize = raw.trim().parse().map_err(|_| format!("MMLAG_THREADS must be a positive integer, got `{raw}`"))?;
    if n == 0 {
        return Err("MMLAG_THREADS must be positive".into());
    }
    rayon::ThreadPoolBuilder::new().num_threads(n).build_global().map_err(|e| e.to_string())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Err(e) = configure_threads() {
        eprintln!("error: {e}");
        return ExitCode::from(2);
    }
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
        Err(Failure::Verification(e)) => {
            eprintln!("verification failed: {e}");
            ExitCode::from(1)
        }
    }
}
