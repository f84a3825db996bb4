//! `primroot`: one binary multiplexing the toolkit's operations.
//!
//! Exit codes: 0 success, 1 usage/domain error, 2 partial or truncated
//! output, 3 internal contract violation (a bug; diagnostics on stderr).
//!
//! Output is deterministic: fixed JSON field order and floats rounded to 12
//! significant digits, so identical invocations are byte-identical.
//! Defaults can come from `PRIMROOT_*` environment variables; flags win.

use std::fs;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use primroot::arith;
use primroot::constructor;
use primroot::dickman::{self, DickmanTable};
use primroot::jsonfmt::fmt_sig12;
use primroot::residues;
use primroot::structure::{self, JacobsthalCache};
use primroot::survey::{self, SurveyConfig};
use primroot::Error;

#[derive(Parser)]
#[command(
    name = "primroot",
    version,
    about = "Least primitive roots, power non-residues, Dickman rho, and prime-sweep statistics",
    args_override_self = true,
    allow_negative_numbers = true
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
    /// Output mode for scalar results (machine-stable JSON, plain value, or
    /// aligned human text where available)
    #[arg(long, global = true, env = "PRIMROOT_OUTPUT")]
    output: Option<OutputMode>,
    /// Cap on worker threads for sweeps
    #[arg(long, global = true, env = "PRIMROOT_THREADS")]
    threads: Option<usize>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum OutputMode {
    Json,
    Human,
    Csv,
}

#[derive(Subcommand)]
enum Cmd {
    /// Evaluate the Dickman function rho(u)
    #[command(allow_negative_numbers = true)]
    Rho {
        #[arg(long)]
        u: f64,
        /// Table extent (grows automatically when u exceeds it)
        #[arg(long, env = "PRIMROOT_UMAX", default_value_t = dickman::DEFAULT_U_MAX)]
        umax: u32,
    },
    /// Solve rho(u) = 1/d for u
    #[command(name = "u-of-d", allow_negative_numbers = true)]
    UOfD {
        #[arg(long)]
        d: f64,
    },
    /// Write a CSV table of rho on a grid
    #[command(name = "rho-table")]
    RhoTable {
        #[arg(long)]
        umax: u32,
        /// Grid step; 1/step must be an integer >= 4
        #[arg(long, default_value_t = 0.001)]
        step: f64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Least d-th power non-residue g(d) mod p
    Gd {
        #[arg(long)]
        p: u64,
        #[arg(long)]
        d: u64,
    },
    /// Exact smooth-number count Psi(x, y) (strict: prime factors < y)
    Psi {
        #[arg(long)]
        x: u64,
        #[arg(long)]
        y: f64,
        /// Also evaluate the lower bound x * rho(log x / log y)
        #[arg(long)]
        check_bound: bool,
    },
    /// Character partial-sum cancellation diagnostic
    #[command(name = "char-sums")]
    CharSums {
        #[arg(long)]
        p: u64,
        #[arg(long)]
        d: u64,
        #[arg(long)]
        h: u64,
    },
    /// Exact Jacobsthal function j(n)
    Jacobsthal {
        #[arg(long)]
        n: u64,
    },
    /// Discrete logarithm of a to the least primitive root mod p
    Dlog {
        #[arg(long)]
        p: u64,
        #[arg(long)]
        a: u64,
    },
    /// Construct a simultaneous power non-residue (a primitive root) mod p
    Construct {
        #[arg(long)]
        p: u64,
        #[arg(long, env = "PRIMROOT_EPSILON", default_value_t = 0.01)]
        epsilon: f64,
        /// Include per-step lift details in the trace
        #[arg(long)]
        trace: bool,
    },
    /// Sweep all odd primes <= x and aggregate the statistics
    Survey(SurveyArgs),
    /// Run the built-in oracle suites
    Selftest,
}

#[derive(Args)]
struct SurveyArgs {
    #[arg(long)]
    x: u64,
    #[arg(long, env = "PRIMROOT_Y", default_value_t = 3)]
    y: u64,
    #[arg(long, env = "PRIMROOT_EPSILON", default_value_t = 0.01)]
    epsilon: f64,
    #[arg(long, env = "PRIMROOT_DELTA", default_value_t = 0.1)]
    delta: f64,
    /// Comma-separated thresholds for the omega(p-1, t) moment tables
    #[arg(long, default_value = "100", value_delimiter = ',')]
    t: Vec<u64>,
    /// Output directory (records.jsonl, report.json, tables/*.csv)
    #[arg(long)]
    out: PathBuf,
    /// Shard count for the parallel sweep (determinism is shard-invariant)
    #[arg(long, env = "PRIMROOT_SHARDS", default_value_t = 8)]
    shards: usize,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if e.use_stderr() => {
            // flag/usage problems exit 1; --help and --version exit 0
            eprint!("{e}");
            return ExitCode::from(1);
        }
        Err(e) => {
            print!("{e}");
            return ExitCode::SUCCESS;
        }
    };
    if let Some(n) = cli.threads {
        // a global cap; building the pool twice is impossible here
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(n.max(1))
            .build_global();
    }
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(match e {
                Error::Contract(_) => 3u8,
                Error::Io(_) => 2u8,
                Error::Capacity(_) => 1u8,
                _ => 1u8,
            })
        }
    }
}

fn run(cli: Cli) -> primroot::Result<ExitCode> {
    let mode = cli.output;
    match cli.cmd {
        Cmd::Rho { u, umax } => {
            let mut table = DickmanTable::with_params(umax.max(2), dickman::DEFAULT_STEP_INV)?;
            if u > table.u_max() {
                table.extend_to(u.ceil() as u32)?;
            }
            let value = table.rho(u)?;
            match mode {
                Some(OutputMode::Json) => {
                    println!("{{\"u\":{},\"rho\":{}}}", fmt_sig12(u), fmt_sig12(value))
                }
                _ => println!("{}", fmt_sig12(value)),
            }
        }
        Cmd::UOfD { d } => {
            let mut table = DickmanTable::new();
            let u = table.u_of_extending(d)?;
            match mode {
                Some(OutputMode::Json) => {
                    println!("{{\"d\":{},\"u\":{}}}", fmt_sig12(d), fmt_sig12(u))
                }
                _ => println!("{}", fmt_sig12(u)),
            }
        }
        Cmd::RhoTable { umax, step, out } => {
            let inv = 1.0 / step;
            if step <= 0.0 || (inv - inv.round()).abs() > 1e-9 || inv.round() < 4.0 {
                return Err(Error::Domain(
                    "step must be the reciprocal of an integer >= 4".into(),
                ));
            }
            let table = DickmanTable::with_params(umax, inv.round() as u32)?;
            let mut body = String::from("u,rho\n");
            for (u, v) in table.grid() {
                body.push_str(&fmt_sig12(u));
                body.push(',');
                body.push_str(&fmt_sig12(v));
                body.push('\n');
            }
            fs::write(&out, body)?;
            println!("{{\"rows\":{},\"out\":{:?}}}", umax * inv.round() as u32 + 1, out);
        }
        Cmd::Gd { p, d } => {
            let g = residues::least_power_nonresidue(p, d)?;
            println!("{{\"p\":{p},\"d\":{d},\"g\":{g}}}");
        }
        Cmd::Psi { x, y, check_bound } => {
            if check_bound {
                let mut table = DickmanTable::new();
                let u = (x as f64).ln() / y.ln();
                if u > table.u_max() {
                    table.extend_to((u.ceil() as u32 + 1).min(dickman::MAX_U_MAX))?;
                }
                let r = residues::check_psi_lower_bound(x, y, &table)?;
                println!("{}", serde_json::to_string(&r).expect("serialize"));
            } else {
                let psi = residues::psi_count(x, y)?;
                println!("{{\"x\":{x},\"y\":{},\"psi\":{psi}}}", fmt_sig12(y));
            }
        }
        Cmd::CharSums { p, d, h } => {
            let r = residues::character_partial_sum_diagnostic(p, d, h)?;
            println!("{}", serde_json::to_string(&r).expect("serialize"));
        }
        Cmd::Jacobsthal { n } => {
            let f = arith::factorize(n)?;
            let j = structure::jacobsthal_exact(&f)?;
            let bound = structure::jacobsthal_pigeonhole_bound(&f);
            let bound = bound
                .map(|b| b.to_string())
                .unwrap_or_else(|| "null".into());
            println!(
                "{{\"n\":{n},\"radical\":{},\"j\":{j},\"pigeonhole_bound\":{bound}}}",
                f.radical()
            );
        }
        Cmd::Dlog { p, a } => {
            let ctx = structure::DlogContext::new(p)?;
            let e = ctx.discrete_log(a)?;
            println!(
                "{{\"p\":{p},\"a\":{a},\"generator\":{},\"log\":{e}}}",
                ctx.generator()
            );
        }
        Cmd::Construct { p, epsilon, trace } => {
            let table = DickmanTable::new();
            let mut cache = JacobsthalCache::new();
            let mut tr = constructor::construct_simultaneous_nonresidue(
                p, &table, epsilon, &mut cache,
            )?;
            if !trace {
                tr.lifts.clear();
            }
            println!("{}", serde_json::to_string(&tr).expect("serialize"));
        }
        Cmd::Survey(args) => return run_survey(args, mode),
        Cmd::Selftest => return selftest(),
    }
    Ok(ExitCode::SUCCESS)
}

fn run_survey(args: SurveyArgs, mode: Option<OutputMode>) -> primroot::Result<ExitCode> {
    let config = SurveyConfig {
        x_limit: args.x,
        y: args.y,
        epsilon: args.epsilon,
        delta: args.delta,
        t_list: args.t,
        shards: args.shards.max(1),
    };
    config.validate()?;
    let table = DickmanTable::new();
    let out = survey::run_survey(&config, &table)?;

    fs::create_dir_all(&args.out)?;
    let records_path = args.out.join("records.jsonl");
    let mut f = fs::File::create(&records_path)?;
    if let Err(e) = survey::write_records_jsonl(&out.records, &mut f) {
        eprintln!("error: record stream truncated: {e}");
        return Ok(ExitCode::from(2));
    }
    f.flush()?;

    let report_json = serde_json::to_string_pretty(&out.report).expect("serialize");
    fs::write(args.out.join("report.json"), &report_json)?;
    let tables_dir = args.out.join("tables");
    fs::create_dir_all(&tables_dir)?;
    for (name, body) in out.report.csv_tables() {
        fs::write(tables_dir.join(format!("{name}.csv")), body)?;
    }

    let c = &out.report.counts;
    if mode == Some(OutputMode::Human) {
        let r = &out.report;
        let rows: Vec<(&str, String)> = vec![
            ("odd primes", c.odd_primes.to_string()),
            ("rough", format!("{} ({})", c.rough, fmt_sig12(r.rough_density.empirical))),
            ("rough density prediction", fmt_sig12(r.rough_density.mertens_prediction)),
            ("condition (1) | rough", format!("{}/{}", r.p_cond1_given_rough.num, r.p_cond1_given_rough.den)),
            ("condition (2) | rough", format!("{}/{}", r.p_cond2_given_rough.num, r.p_cond2_given_rough.den)),
            ("both | rough", format!("{}/{}", r.p_both_given_rough.num, r.p_both_given_rough.den)),
            ("threshold exponent", fmt_sig12(r.threshold_exponent)),
            ("g(p) below threshold", format!("{}/{}", r.p_g_below_threshold.num, r.p_g_below_threshold.den)),
            ("construction tight", c.construction_tight.to_string()),
        ];
        let width = rows.iter().map(|(k, _)| k.len()).max().unwrap_or(0);
        for (k, v) in rows {
            println!("{k:width$}  {v}");
        }
        println!("{:width$}  {}", "output", args.out.display());
    } else {
        println!(
            "{{\"odd_primes\":{},\"rough\":{},\"both_conditions_given_rough\":{},\"out\":{:?}}}",
            c.odd_primes,
            c.rough,
            fmt_sig12(out.report.p_both_given_rough.value),
            args.out
        );
    }
    Ok(ExitCode::SUCCESS)
}

fn selftest() -> primroot::Result<ExitCode> {
    let mut failures = 0u32;
    let mut check = |name: &str, ok: bool| {
        println!("{} {name}", if ok { "ok     " } else { "FAILED " });
        if !ok {
            failures += 1;
        }
    };

    // Dickman analytic identities
    let table = DickmanTable::new();
    let rho2 = table.rho(2.0)?;
    check(
        "rho(2) = 1 - ln 2 within 1e-10",
        (rho2 - (1.0 - 2f64.ln())).abs() < 1e-10,
    );
    let mut grid_ok = true;
    for i in 0..=100 {
        let u = 1.0 + i as f64 / 100.0;
        if (table.rho(u)? - (1.0 - u.ln())).abs() >= 1e-10 {
            grid_ok = false;
        }
    }
    check("rho = 1 - ln u on [1,2] within 1e-10", grid_ok);
    check(
        "u(2) = sqrt(e) within 1e-6",
        (table.u_of(2.0)? - 0.5f64.exp()).abs() < 1e-6,
    );
    let mut round_ok = true;
    for d in [2.0, 3.0, 5.0, 10.0, 100.0, 1e6] {
        let u = table.u_of(d)?;
        if (table.rho(u)? - 1.0 / d).abs() >= 1e-8 {
            round_ok = false;
        }
    }
    check("rho(u_of(d)) = 1/d within 1e-8", round_ok);

    // construction sweep to 10^4 with order verification
    let mut cache = JacobsthalCache::new();
    let mut constructed_ok = true;
    let mut tight = 0u64;
    let mut count = 0u64;
    for p in arith::sieve_primes(10_000)?.into_iter().skip(1) {
        let tr = constructor::construct_simultaneous_nonresidue(p, &table, 0.01, &mut cache)?;
        let pm1 = arith::factorize(p - 1)?;
        if arith::multiplicative_order(tr.result, p, &pm1)? != p - 1 {
            constructed_ok = false;
        }
        if tr.result == constructor::least_primitive_root(p)? {
            tight += 1;
        }
        count += 1;
    }
    check(
        "construction yields a primitive root for every odd p <= 10^4",
        constructed_ok,
    );
    println!(
        "info    construction tight for {tight}/{count} primes ({})",
        fmt_sig12(tight as f64 / count as f64)
    );

    // residue counting invariant on a sample
    let mut counts_ok = true;
    for p in arith::sieve_primes(500)?.into_iter().skip(1) {
        for d in arith::factorize(p - 1)?.distinct_primes() {
            if residues::count_dth_power_residues(p, d)? != (p - 1) / d {
                counts_ok = false;
            }
        }
    }
    check("d-th power residue counts equal (p-1)/d", counts_ok);

    if failures == 0 {
        println!("selftest: all suites passed");
        Ok(ExitCode::SUCCESS)
    } else {
        println!("selftest: {failures} suite(s) FAILED");
        Ok(ExitCode::from(1))
    }
}
