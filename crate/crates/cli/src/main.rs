//! Command-line surface for the verification lab: run checks over parameter
//! grids, compute individual objects exactly, and manage the persistent
//! cache of reports and values.
//!
//! Exit codes: 0 when everything asked for verified (or was vacuous), 2 when
//! anything came back undecidable at precision, 1 when anything falsified,
//! 64 on usage errors.

use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use cyclolab_core::cache::{CacheRecord, CacheStore};
use cyclolab_core::chars::DirichletCharacter;
use cyclolab_core::lab::checks::{find_check, registry, run_check, Params};
use cyclolab_core::lab::{CheckStatus, VerificationReport};

#[derive(Parser)]
#[command(name = "cyclolab", version, about = "exact p-adic cyclotomic verification lab")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run verification checks over a parameter grid
    Verify(VerifyArgs),
    /// Compute a single object exactly and print it
    Compute(ComputeArgs),
    /// Inspect or maintain the persistent cache
    Cache(CacheArgs),
    /// List the registered checks and their statements
    ListChecks {
        /// print the full mathematical statement of each check
        #[arg(long)]
        detailed: bool,
    },
}

#[derive(Args)]
struct VerifyArgs {
    /// check id (see list-checks); repeatable
    #[arg(long = "check")]
    checks: Vec<String>,
    /// run every registered check
    #[arg(long)]
    all: bool,
    /// which grid to use
    #[arg(long, default_value = "default")]
    grid: String,
    /// restrict to this prime
    #[arg(long)]
    p: Option<u64>,
    /// restrict to this tame conductor
    #[arg(long)]
    d: Option<u64>,
    /// restrict to this level
    #[arg(long)]
    n: Option<u32>,
    /// working precision override (p-adic digits)
    #[arg(long)]
    precision: Option<u32>,
    /// output format: table | records
    #[arg(long, default_value = "table")]
    format: String,
    /// cache directory (default: CYCLOLAB_CACHE_DIR if set)
    #[arg(long)]
    cache_dir: Option<String>,
    /// worker threads for the grid fan-out
    #[arg(long, default_value_t = 4)]
    jobs: usize,
}

#[derive(Args)]
struct ComputeArgs {
    /// object kind: hminus | bernoulli | lvalue | eps | eps-twisted | index
    kind: String,
    #[arg(long)]
    p: Option<u64>,
    #[arg(long, default_value_t = 1)]
    d: u64,
    #[arg(long, default_value_t = 0)]
    n: u32,
    /// Bernoulli index k
    #[arg(long, default_value_t = 1)]
    k: u32,
    /// character selector: trivial | quad | quadratic-mod-M | omega^K | exps:a,b@M
    #[arg(long)]
    chi: Option<String>,
    /// theta selector for index computations (same grammar as --chi)
    #[arg(long)]
    theta: Option<String>,
    /// lattice selectors for `index`
    #[arg(long)]
    lhs: Option<String>,
    #[arg(long)]
    rhs: Option<String>,
    #[arg(long)]
    precision: Option<u32>,
}

#[derive(Args)]
struct CacheArgs {
    /// list | verify | prune
    action: String,
    #[arg(long)]
    cache_dir: Option<String>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(64)
        }
    }
}

fn dispatch(cli: Cli) -> Result<ExitCode, String> {
    match cli.command {
        Command::Verify(args) => cmd_verify(args),
        Command::Compute(args) => cmd_compute(args).map(|_| ExitCode::SUCCESS),
        Command::Cache(args) => cmd_cache(args),
        Command::ListChecks { detailed } => {
            for def in registry() {
                if detailed {
                    println!("{}\n    {}", def.id, def.statement);
                    println!(
                        "    default grid: {} points, extended: {} points",
                        (def.default_grid)().len(),
                        (def.extended_grid)().len()
                    );
                } else {
                    println!("{}", def.id);
                }
            }
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn cache_store(dir: &Option<String>) -> Result<CacheStore, String> {
    let dir = dir
        .clone()
        .or_else(|| std::env::var("CYCLOLAB_CACHE_DIR").ok());
    match dir {
        Some(d) => CacheStore::at_dir(std::path::Path::new(&d)).map_err(|e| e.to_string()),
        None => Ok(CacheStore::in_memory()),
    }
}

fn cmd_verify(args: VerifyArgs) -> Result<ExitCode, String> {
    let ids: Vec<String> = if args.all || args.checks.is_empty() {
        registry().iter().map(|d| d.id.to_string()).collect()
    } else {
        args.checks.clone()
    };
    if !matches!(args.grid.as_str(), "default" | "extended") {
        return Err(format!("unknown grid '{}': use default or extended", args.grid));
    }
    if !matches!(args.format.as_str(), "table" | "records") {
        return Err(format!("unknown format '{}': use table or records", args.format));
    }
    let store = cache_store(&args.cache_dir)?;

    // assemble the work list (usage errors before any computation)
    let mut work: Vec<(String, Params)> = Vec::new();
    for id in &ids {
        let def = find_check(id).map_err(|e| e.to_string())?;
        let mut grid = (def.default_grid)();
        if args.grid == "extended" {
            grid.extend((def.extended_grid)());
        }
        for mut params in grid {
            if let Some(p) = args.p {
                if params.p != p {
                    continue;
                }
            }
            if let Some(d) = args.d {
                if params.d != d {
                    continue;
                }
            }
            if let Some(n) = args.n {
                if params.n != n {
                    continue;
                }
            }
            params.precision = args.precision.or(params.precision);
            work.push((id.clone(), params));
        }
    }

    // bounded fan-out; reports are collected and emitted in input order
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(args.jobs.max(1))
        .build()
        .map_err(|e| e.to_string())?;
    let results: Vec<Result<VerificationReport, String>> = pool.install(|| {
        use rayon::prelude::*;
        work.par_iter()
            .map(|(id, params)| run_check(id, params).map_err(|e| e.to_string()))
            .collect()
    });

    let mut any_falsified = false;
    let mut any_undecidable = false;
    if args.format == "table" {
        println!(
            "{:<24} {:>3} {:>2} {:>2}  {:<26} {:>8}",
            "check", "p", "d", "n", "status", "ms"
        );
    }
    for res in results {
        let report = res?;
        match report.status {
            CheckStatus::Falsified => any_falsified = true,
            CheckStatus::UndecidableAtPrecision => any_undecidable = true,
            _ => {}
        }
        emit_report(&args.format, &report);
        let key = format!(
            "report:{}:{}",
            report.check_id,
            serde_json::to_string(&report.params).unwrap()
        );
        let payload = serde_json::to_value(&report).unwrap();
        store
            .put(CacheRecord::new(key, payload, report.precision))
            .map_err(|e| e.to_string())?;
    }
    Ok(if any_falsified {
        ExitCode::from(1)
    } else if any_undecidable {
        ExitCode::from(2)
    } else {
        ExitCode::SUCCESS
    })
}

fn emit_report(format: &str, r: &VerificationReport) {
    if format == "records" {
        println!("{}", serde_json::to_string(r).unwrap());
    } else {
        let p = r.params.get("p").and_then(|v| v.as_u64()).unwrap_or(0);
        let d = r.params.get("d").and_then(|v| v.as_u64()).unwrap_or(1);
        let n = r.params.get("n").and_then(|v| v.as_u64()).unwrap_or(0);
        println!(
            "{:<24} {:>3} {:>2} {:>2}  {:<26} {:>8}",
            r.check_id,
            p,
            d,
            n,
            format!("{:?}", r.status),
            r.millis
        );
    }
}

/// Character selector grammar: trivial | quad (mod p) | quadratic-mod-M |
/// omega^K (mod p) | exps:a,b,...@M (exponents on the canonical generators).
fn parse_character(sel: &str, p: Option<u64>) -> Result<DirichletCharacter, String> {
    if sel == "trivial" {
        return Ok(DirichletCharacter::trivial(1));
    }
    if sel == "quad" {
        let p = p.ok_or("selector 'quad' needs --p")?;
        let chi = cyclolab_core::chars::enumerate_characters(p)
            .into_iter()
            .find(|c| c.order() == 2)
            .ok_or("no quadratic character mod p")?;
        return Ok(chi);
    }
    if let Some(m) = sel.strip_prefix("quadratic-mod-") {
        let m: u64 = m.parse().map_err(|_| "bad modulus")?;
        let quads: Vec<_> = cyclolab_core::chars::enumerate_characters(m)
            .into_iter()
            .filter(|c| c.order() == 2)
            .collect();
        return match quads.len() {
            0 => Err(format!("no quadratic character mod {m}")),
            1 => Ok(quads.into_iter().next().unwrap()),
            k => Err(format!("{k} quadratic characters mod {m}: use exps:..@{m}")),
        };
    }
    if let Some(k) = sel.strip_prefix("omega^") {
        let p = p.ok_or("selector 'omega^K' needs --p")?;
        let k: u64 = k.parse().map_err(|_| "bad exponent")?;
        return Ok(cyclolab_core::chars::teich_character(p).power(k));
    }
    if let Some(rest) = sel.strip_prefix("exps:") {
        let (exps, m) = rest.split_once('@').ok_or("use exps:a,b,...@M")?;
        let m: u64 = m.parse().map_err(|_| "bad modulus")?;
        let exps: Vec<u64> = if exps.is_empty() {
            vec![]
        } else {
            exps.split(',')
                .map(|x| x.parse().map_err(|_| "bad exponent".to_string()))
                .collect::<Result<_, _>>()?
        };
        let expect = cyclolab_core::chars::ten_group(m).factors.len();
        if exps.len() != expect {
            return Err(format!("modulus {m} needs {expect} exponents"));
        }
        return Ok(DirichletCharacter { modulus: m, exps });
    }
    Err(format!("cannot parse character selector '{sel}'"))
}

fn cmd_compute(args: ComputeArgs) -> Result<(), String> {
    match args.kind.as_str() {
        "hminus" => {
            let p = args.p.ok_or("hminus needs --p")?;
            let h = cyclolab_core::chars::h_minus(p, args.n).map_err(|e| e.to_string())?;
            println!("{h}");
        }
        "bernoulli" => {
            let chi = parse_character(args.chi.as_deref().ok_or("bernoulli needs --chi")?, args.p)?;
            let ring = chi.order().max(1);
            let b = cyclolab_core::chars::bernoulli_b(args.k, &chi, ring);
            match b.as_rational() {
                Some(r) => println!("{r}"),
                None => {
                    println!("coefficients on powers of zeta_{ring}:");
                    for (i, c) in b.coeffs.iter().enumerate() {
                        if c.to_string() != "0" {
                            println!("  zeta^{i}: {c}");
                        }
                    }
                }
            }
        }
        "lvalue" => {
            let p = args.p.ok_or("lvalue needs --p")?;
            let chi = parse_character(args.chi.as_deref().ok_or("lvalue needs --chi")?, args.p)?;
            let prim = chi.primitive_part();
            let target = args
                .precision
                .unwrap_or_else(|| cyclolab_core::lattice::default_precision(p, args.n));
            let prec = cyclolab_core::lab::units::residue_precision(p, args.n, target);
            let ring = cyclolab_core::arith::lcm(prim.modulus.max(1), p.pow(args.n + 1));
            let table = cyclolab_core::cyclo::LogTable::new(ring, p, prec, target);
            let rec = cyclolab_core::chars::lp_at_one(&prim, p, &table).map_err(|e| e.to_string())?;
            println!(
                "L_p(1, chi) in Z_p[zeta_{}], value precision {} digits:",
                ring, rec.precision
            );
            let v = rec.value.reduce_shift();
            println!("  p-power denominator: p^{}", v.shift);
            for (i, c) in v.coeffs.iter().enumerate() {
                if !c.to_string().eq("0") {
                    println!("  x^{i}: {c}");
                }
            }
        }
        "eps" => {
            let p = args.p.ok_or("eps needs --p")?;
            let e = cyclolab_core::group_ring::stickelberger_eps(p, args.n);
            let reps = e.desc.reps();
            for (rep, c) in reps.iter().zip(&e.coeffs) {
                println!("sigma_{rep}: {c}");
            }
        }
        "eps-twisted" => {
            let p = args.p.ok_or("eps-twisted needs --p")?;
            let theta = parse_character(
                args.theta.as_deref().or(args.chi.as_deref()).ok_or("needs --theta")?,
                args.p,
            )?;
            let prec = args.precision.unwrap_or(16);
            let e = cyclolab_core::group_ring::stickelberger_eps_twisted(&theta, p, args.n, prec)
                .map_err(|e| e.to_string())?;
            println!("coefficients on gamma_0^t (p-power denominator p^{}):", e.shift);
            for (t, c) in e.coeffs.iter().enumerate() {
                println!("  gamma_0^{t}: {c}");
            }
        }
        "index" => {
            let p = args.p.ok_or("index needs --p")?;
            let theta = parse_character(
                args.theta.as_deref().unwrap_or("quad"),
                Some(p),
            )?;
            let lhs = args.lhs.as_deref().unwrap_or("leopoldt");
            let rhs = args.rhs.as_deref().unwrap_or("scriptT-orbit");
            let exp = cyclolab_core::lab::compute_index(p, args.n, &theta, lhs, rhs, args.precision)
                .map_err(|e| e.to_string())?;
            println!("{p}^{exp}");
        }
        other => return Err(format!("unknown compute kind '{other}'")),
    }
    Ok(())
}

fn cmd_cache(args: CacheArgs) -> Result<ExitCode, String> {
    let store = cache_store(&args.cache_dir)?;
    let records = store.disk_records().map_err(|e| e.to_string())?;
    match args.action.as_str() {
        "list" => {
            println!("{} records", records.len());
            for (path, rec) in &records {
                match rec {
                    Ok(r) => println!("{}  {}", path.display(), r.key),
                    Err(e) => println!("{}  CORRUPT: {e}", path.display()),
                }
            }
            Ok(ExitCode::SUCCESS)
        }
        "verify" => {
            let bad: Vec<_> = records.iter().filter(|(_, r)| r.is_err()).collect();
            println!(
                "{} records, {} corrupt",
                records.len(),
                bad.len()
            );
            for (path, rec) in &bad {
                println!("{}  {}", path.display(), rec.as_ref().err().unwrap());
            }
            Ok(if bad.is_empty() {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            })
        }
        "prune" => {
            let mut removed = 0usize;
            for (path, rec) in &records {
                if rec.is_err() {
                    store.remove_file(path).map_err(|e| e.to_string())?;
                    removed += 1;
                }
            }
            println!("removed {removed} corrupt records");
            Ok(ExitCode::SUCCESS)
        }
        other => Err(format!("unknown cache action '{other}'")),
    }
}
