use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use serde_json::json;

use k0_core::algebra::decompose_local;
use k0_core::genus::{genus_equal, Verdict};
use k0_core::instance::{run_glue, verify, Instance, K0Context, VerifyOptions};
use k0_core::k0_local::describe;

#[derive(Parser)]
#[command(name = "k0", version, about = "Verify lattice and genus data and compute Grothendieck groups")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Seed for every randomized search.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Starting p-adic precision for decompositions.
    #[arg(long, global = true, default_value_t = k0_core::algebra::DEFAULT_PRECISION)]
    precision: u32,
    /// Machine-readable output.
    #[arg(long, global = true)]
    json: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Run every declared identity of an instance.
    Verify { file: PathBuf },
    /// Decompose the completion of a module at a prime.
    Decompose {
        file: PathBuf,
        #[arg(long)]
        module: String,
        #[arg(long)]
        prime: Option<u64>,
    },
    /// Print the Grothendieck group basis.
    Basis {
        file: PathBuf,
        /// Show the presentation including the kernel of the genus map.
        #[arg(long)]
        genus: bool,
    },
    /// Coordinates of a module or object in the basis.
    Coords {
        file: PathBuf,
        #[arg(long)]
        module: String,
    },
    /// Compare the genera of two modules.
    GenusEq {
        file: PathBuf,
        #[arg(long)]
        left: String,
        #[arg(long)]
        right: String,
    },
    /// Glue a lattice from a declared local specification.
    Glue {
        file: PathBuf,
        #[arg(long)]
        spec: String,
    },
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 3 } else { 0 });
        }
    };
    let opts = VerifyOptions { seed: cli.seed, precision: cli.precision };
    match run(&cli, &opts) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(3)
        }
    }
}

fn load(file: &PathBuf) -> Result<Instance, String> {
    Instance::load(file).map_err(|e| e.to_string())
}

fn context(inst: &Instance, opts: &VerifyOptions) -> Result<K0Context, String> {
    match K0Context::build(inst, opts)? {
        K0Context::Missing => Err("instance has no registry".into()),
        c => Ok(c),
    }
}

fn emit(as_json: bool, value: serde_json::Value, text: String) {
    let out = if as_json { serde_json::to_string_pretty(&value).expect("json") } else { text };
    // A closed pipe (e.g. `| head`) is not an error worth a panic.
    let _ = writeln!(std::io::stdout(), "{out}");
}

/// Exit status for a computation that failed after the instance loaded.
fn failed(as_json: bool, e: String) -> u8 {
    emit(as_json, json!({ "error": e }), format!("FAIL {e}"));
    1
}

fn run(cli: &Cli, opts: &VerifyOptions) -> Result<u8, String> {
    match &cli.command {
        Command::Verify { file } => {
            let inst = load(file)?;
            let report = verify(&inst, opts);
            emit(cli.json, serde_json::to_value(&report).expect("json"), report.to_string());
            Ok(report.exit_code() as u8)
        }
        Command::Decompose { file, module, prime } => {
            let inst = load(file)?;
            let p = prime.or(inst.base.prime()).ok_or("--prime is required over Z")?;
            let m = inst.module(module)?.localize(p).map_err(|e| e.to_string())?;
            let d = match decompose_local(&m, opts.precision, opts.seed) {
                Ok(d) => d,
                Err(e) => return Ok(failed(cli.json, e.to_string())),
            };
            let mut text = format!("{module} at {p}: {} summands, {} classes\n", d.len(), d.class_count());
            text.push_str(&format!("  {:<6} {:>4} {:>8} {:>8} {:>6}\n", "block", "rank", "end_dim", "rad_dim", "class"));
            for (s, c) in d.summands.iter().zip(&d.classes) {
                text.push_str(&format!(
                    "  {:<6} {:>4} {:>8} {:>8} {:>6}\n",
                    s.block, s.fingerprint.rank, s.fingerprint.end_dim, s.fingerprint.radical_dim, c
                ));
            }
            text.push_str(&format!("precision {} stable {}", d.certificate.precision, d.certificate.stable));
            let value = json!({ "module": module, "prime": p, "classes": d.classes, "certificate": d.certificate, "witness": d.witness });
            emit(cli.json, value, text);
            Ok(0)
        }
        Command::Basis { file, genus } => {
            let inst = load(file)?;
            let ctx = match context(&inst, opts) {
                Ok(c) => c,
                Err(e) => return Ok(failed(cli.json, e)),
            };
            let p = ctx.presentation(&inst)?;
            let mut text = String::new();
            for (i, n) in p.free_basis.iter().enumerate() {
                text.push_str(&format!("  {i:>3}  {n}\n"));
            }
            if *genus {
                text.push_str(&format!("K0 = {p}"));
            } else {
                text.push_str(&format!("rank {}", p.free_rank()));
            }
            emit(cli.json, serde_json::to_value(&p).expect("json"), text);
            Ok(0)
        }
        Command::Coords { file, module } => {
            let inst = load(file)?;
            let ctx = match context(&inst, opts) {
                Ok(c) => c,
                Err(e) => return Ok(failed(cli.json, e)),
            };
            let names = ctx.basis_names(&inst)?;
            let v = match ctx.coords(&inst, module) {
                Ok(v) => v,
                Err(e) => return Ok(failed(cli.json, e)),
            };
            let d = describe(&names, &v);
            let text = d.iter().map(|(n, k)| format!("  {k:>4}  {n}")).collect::<Vec<_>>().join("\n");
            emit(cli.json, json!({ "module": module, "basis": names, "coords": v }), format!("[{module}] =\n{text}"));
            Ok(0)
        }
        Command::GenusEq { file, left, right } => {
            let inst = load(file)?;
            let r = match genus_equal(inst.module(left)?, inst.module(right)?, &opts.iso()) {
                Ok(r) => r,
                Err(e) => return Ok(failed(cli.json, e.to_string())),
            };
            let mut text = format!("G({left}) = G({right}): {:?}\n  rational: {}", r.verdict, r.rational);
            for (p, v) in &r.primes {
                text.push_str(&format!("\n  at {p}: {v}"));
            }
            emit(cli.json, serde_json::to_value(&r).expect("json"), text);
            Ok(match r.verdict {
                Verdict::True => 0,
                Verdict::False => 1,
                Verdict::Inconclusive => 2,
            })
        }
        Command::Glue { file, spec } => {
            let inst = load(file)?;
            let g = inst.file.glue.iter().find(|g| &g.name == spec).ok_or_else(|| format!("unknown glue spec {spec}"))?;
            let m = match run_glue(&inst, g, opts) {
                Ok(m) => m,
                Err(e) => return Ok(failed(cli.json, e)),
            };
            let c = m.carrier();
            let text = format!("{spec}: rank {} lattice\n{c:?}", c.rank());
            emit(cli.json, json!({ "spec": spec, "basis": c.canonical_string() }), text);
            Ok(0)
        }
    }
}
