use std::io::Write;
use std::path::Path;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand};
use num_rational::BigRational;
use serde_json::{json, Value};

use ruelle_core::acoe::{check_acoe, default_test_set, target_test_set, zeta_transfer_check, CocycleWitness};
use ruelle_core::battery::{distinguish, DistinguishConfig, Outcome};
use ruelle_core::ck::{ck_verify, CkVerifyConfig};
use ruelle_core::groupoid::essential_freeness_evidence;
use ruelle_core::ktheory::{bowen_franks, ruelle_k0_stagewise, ruelle_k_groups_full_shift, trace_value_group_full_shift};
use ruelle_core::perron::perron_data;
use ruelle_core::sft::{metric, periodic_count, periodic_orbits};
use ruelle_core::zeta::{zeta_rational, zeta_series};
use ruelle_core::{Mode, SftMatrix, Word};

#[derive(Parser)]
#[command(name = "ruelle", version, about = "Invariants and equivalence checks for topological Markov shifts")]
struct Cli {
    /// Series order / longest period considered.
    #[arg(long, global = true, default_value_t = 12)]
    order: usize,
    /// Search depth: word length, tail-matching bound or orbit length.
    #[arg(long, global = true)]
    depth: Option<u64>,
    /// Last stage of the inductive limit for K-groups.
    #[arg(long, global = true, default_value_t = 4)]
    max_stage: usize,
    /// Metric base, a rational in (0, 1).
    #[arg(long, global = true, default_value = "1/2")]
    lambda0: String,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Zeta function as a rational function and a power series.
    Zeta { matrix: String },
    /// Numbers of periodic points of each period.
    Periodic { matrix: String },
    /// Periodic orbits up to the given order.
    Orbits { matrix: String },
    /// Bowen–Franks group and K-groups of the asymptotic Ruelle algebra.
    Kgroups { matrix: String },
    /// Identities of the symbolic Cuntz–Krieger tensor calculus.
    CkVerify { matrix: String },
    /// Checks an orbit-equivalence witness between two shifts.
    AcoeCheck { a: String, b: String, witness: String },
    /// Certificates that each cylinder contains a non-periodic-asymptotic point.
    Freeness { matrix: String },
    /// Invariant battery and verdict for a pair of shifts.
    Distinguish { a: String, b: String },
}

fn read_arg(arg: &str) -> Result<String> {
    let p = Path::new(arg);
    if p.is_file() {
        std::fs::read_to_string(p).with_context(|| format!("reading {arg}"))
    } else {
        Ok(arg.to_string())
    }
}

fn load_matrix(arg: &str) -> Result<SftMatrix> {
    SftMatrix::parse(&read_arg(arg)?, Mode::Nonnegative).with_context(|| format!("matrix {arg:?}"))
}

/// 0/1 presentation, with a note when the edge shift was substituted.
fn zero_one(a: &SftMatrix) -> (SftMatrix, bool) {
    let (e, _) = a.edge_shift();
    let converted = !a.is_zero_one();
    (e, converted)
}

fn strings<T: ToString>(xs: &[T]) -> Vec<String> {
    xs.iter().map(ToString::to_string).collect()
}

fn run(cli: &Cli) -> Result<(Value, bool)> {
    let order = cli.order;
    let lambda0: BigRational = cli.lambda0.parse().map_err(|_| anyhow::anyhow!("bad --lambda0 {:?}", cli.lambda0))?;
    if lambda0 <= BigRational::from_integer(0.into()) || lambda0 >= BigRational::from_integer(1.into()) {
        bail!("--lambda0 must lie strictly between 0 and 1");
    }
    match &cli.command {
        Command::Zeta { matrix } => {
            let a = load_matrix(matrix)?;
            let r = zeta_rational(&a);
            let s = zeta_series(&a, order);
            let agree = r.expand(order) == s;
            Ok((
                json!({
                    "matrix": a,
                    "rational": { "num": strings(&r.num), "den": strings(&r.den), "text": r.to_string() },
                    "series": strings(s.coeffs()),
                    "series_matches_rational": agree,
                }),
                agree,
            ))
        }
        Command::Periodic { matrix } => {
            let a = load_matrix(matrix)?;
            let counts: Vec<String> = (1..=order as u64).map(|n| periodic_count(&a, n).to_string()).collect();
            Ok((json!({ "matrix": a, "order": order, "counts": counts }), true))
        }
        Command::Orbits { matrix } => {
            let a = load_matrix(matrix)?;
            let (e, converted) = zero_one(&a);
            let orbits = periodic_orbits(&e, order)?;
            let mut per_length = vec![0usize; order];
            for o in &orbits {
                per_length[o.length - 1] += 1;
            }
            let list: Vec<Value> =
                orbits.iter().map(|o| json!({ "length": o.length, "word": o.word().to_string() })).collect();
            Ok((
                json!({ "matrix": a, "edge_shift": converted, "counts_by_length": per_length, "orbits": list }),
                true,
            ))
        }
        Command::Kgroups { matrix } => {
            let a = load_matrix(matrix)?;
            let stages = ruelle_k0_stagewise(&a, cli.max_stage)?;
            let p = perron_data(&a);
            let mut out = json!({
                "matrix": a,
                "bowen_franks": bowen_franks(&a).to_string(),
                "stagewise": {
                    "stage_groups": stages.stage_groups.iter().map(ToString::to_string).collect::<Vec<_>>(),
                    "stabilized": stages.stabilized,
                },
                "perron": { "lambda": p.lambda, "is_integer": p.lambda_is_integer, "residual": p.residual },
            });
            if let Some(n) = a.full_shift_size() {
                let k = ruelle_k_groups_full_shift(n)?;
                out["ruelle_full_shift"] = json!({
                    "k0": k.k0.to_string(),
                    "k1": k.k1.to_string(),
                    "trace_values": trace_value_group_full_shift(n)?.to_string(),
                });
            }
            Ok((out, true))
        }
        Command::CkVerify { matrix } => {
            let a = load_matrix(matrix)?;
            let (e, converted) = zero_one(&a);
            let mut config = CkVerifyConfig::default();
            if let Some(d) = cli.depth {
                config.max_word_len = d as usize;
            }
            let r = ck_verify(&e, &config)?;
            let passed = r.passed;
            Ok((json!({ "matrix": a, "edge_shift": converted, "config": config, "report": r }), passed))
        }
        Command::AcoeCheck { a, b, witness } => {
            let ma = load_matrix(a)?;
            let mb = load_matrix(b)?;
            let mut w: CocycleWitness =
                serde_json::from_str(&read_arg(witness)?).with_context(|| format!("witness {witness:?}"))?;
            if let Some(d) = cli.depth {
                w.depth = d;
            }
            let (sa, sb) = w.systems(&ma, &mb);
            let at = default_test_set(&sa.matrix)?;
            let bt = target_test_set(&w, &at, &sb)?;
            let report = check_acoe(&w, &sa, &sb, &at, &bt)?;
            let zeta = zeta_transfer_check(&w, &sa, &sb, order).ok();
            let passed = report.passed;
            Ok((json!({ "report": report, "zeta_transfer": zeta }), passed))
        }
        Command::Freeness { matrix } => {
            let a = load_matrix(matrix)?;
            let (e, converted) = zero_one(&a);
            let depth = cli.depth.unwrap_or(4) as usize;
            let mut certs = Vec::new();
            let mut all = true;
            for n in 1..=order as i64 {
                for s in e.symbols() {
                    let word = Word(vec![s]);
                    match essential_freeness_evidence(&e, n, &word, depth)? {
                        Some(x) => certs.push(json!({
                            "n": n,
                            "cylinder": word.to_string(),
                            "point": x.to_string(),
                            "distance_to_shift": metric(&x.shift(n), &x, &lambda0).to_string(),
                        })),
                        None => {
                            all = false;
                            certs.push(json!({ "n": n, "cylinder": word.to_string(), "point": null }));
                        }
                    }
                }
            }
            Ok((json!({ "matrix": a, "edge_shift": converted, "certificates": certs, "all_found": all }), all))
        }
        Command::Distinguish { a, b } => {
            let ma = load_matrix(a)?;
            let mb = load_matrix(b)?;
            let v = distinguish(&ma, &mb, &DistinguishConfig { zeta_order: order });
            let inconclusive = v.outcome == Outcome::Inconclusive;
            Ok((serde_json::to_value(&v)?, inconclusive))
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok((value, ok)) => {
            // a closed pipe is not an error of the computation
            let _ = writeln!(std::io::stdout().lock(), "{}", serde_json::to_string_pretty(&value).expect("JSON output"));
            if ok {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
