//! `qtri`: compute triangular-basis elements of bipartite quantum cluster
//! algebras with principal quantization, emit support/plot data, and run
//! the verification suites.
//!
//! Matrices and vectors are accepted inline (JSON or comma-separated) or
//! as a path to a JSON file. All output is byte-deterministic for a fixed
//! invocation. Exit status: 0 success, 1 failed verification, 2 bad input.

use std::io::Write;
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;

use qtri_core::qtorus::ExpVec;
use qtri_core::seedkit::{BipartiteQuiver, Seed, WVector};
use qtri_core::stratdata::{
    dim_f, dim_ftilde, is_l_dominant, is_nonempty_f, poincare_f, support_tsv, vbar,
};
use qtri_core::sweep::{check_instance, instance_checks, sweep_instances, SweepConfig};
use qtri_core::tribasis::{TPrimeFrame, TriangularContext};
use qtri_core::IntMat;

#[derive(Parser)]
#[command(name = "qtri", version, about = "Triangular bases of bipartite quantum cluster algebras")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Tsv,
}

#[derive(Args)]
struct Common {
    /// Exchange matrix B: inline JSON ("[[0,-3],[3,0]]"), a path to a JSON
    /// file, or a file holding {"B": [[...]]}
    #[arg(long = "B")]
    b: String,
    /// Output format
    #[arg(long, value_enum, default_value = "json")]
    format: Format,
    /// Write output to a file instead of stdout
    #[arg(long)]
    out: Option<String>,
}

#[derive(Subcommand)]
enum Cmd {
    /// Compute the basis element at index a and print it as JSON
    Basis {
        #[command(flatten)]
        common: Common,
        /// Index a, length 2n ("9,-4,0,0" or "[9,-4,0,0]")
        #[arg(long)]
        a: String,
    },
    /// Emit rows "v_1 .. v_n f(v) in_support" over the support region plus
    /// a one-cell margin
    Support {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        a: String,
    },
    /// The generating series of the fibers for dimension data w
    ChiM {
        #[command(flatten)]
        common: Common,
        /// Interleaved pairs "w_1,w'_1,w_2,w'_2,..."
        #[arg(long)]
        w: String,
    },
    /// The generalized monomial E* at the once-mutated seed
    EStar {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        w: String,
        /// Frozen prefix, length n (defaults to zero)
        #[arg(long)]
        frozen: Option<String>,
    },
    /// Dominance and dimension data for a pair (v, w)
    Dims {
        #[command(flatten)]
        common: Common,
        /// Vector v, length n
        #[arg(long)]
        v: String,
        #[arg(long)]
        w: String,
    },
    /// Mutate the principal seed in direction k and print the new seed
    Mutate {
        #[command(flatten)]
        common: Common,
        /// Mutation direction, 1-based
        #[arg(long)]
        k: usize,
    },
    /// Run the verification suites; exit status 0 iff every check passes
    Verify {
        #[command(flatten)]
        common: Common,
        /// Verify this single index (full identity suite)
        #[arg(long)]
        a: Option<String>,
        /// Randomized sweep: maximum quiver rank
        #[arg(long = "sweep-n")]
        sweep_n: Option<usize>,
        /// Randomized sweep: number of instances
        #[arg(long = "sweep-count", default_value_t = 200)]
        sweep_count: usize,
        /// Randomized sweep: maximum arrow multiplicity |b_ij|
        #[arg(long = "sweep-bmax", default_value_t = 3)]
        sweep_bmax: i64,
        /// Randomized sweep: maximum |a_i|
        #[arg(long = "sweep-amax", default_value_t = 4)]
        sweep_amax: i64,
        /// RNG seed for the sweep
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Worker threads for the sweep (0 = one per core)
        #[arg(long, default_value_t = 0)]
        jobs: usize,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn run(cli: Cli) -> Result<ExitCode> {
    match cli.cmd {
        Cmd::Basis { common, a } => {
            let (seed, quiver) = load_model(&common.b)?;
            let a = parse_index(&a, 2 * quiver.n())?;
            let ctx = TriangularContext::new(&seed, &quiver)?;
            let elem = ctx.triangular_basis(&a)?;
            let text = match common.format {
                Format::Json => serde_json::to_string(&elem)?,
                Format::Tsv => torus_tsv(&elem.torus_form),
            };
            emit(&common.out, &text)?;
            Ok(ExitCode::SUCCESS)
        }
        Cmd::Support { common, a } => {
            let (seed, quiver) = load_model(&common.b)?;
            let a = parse_index(&a, 2 * quiver.n())?;
            let ctx = TriangularContext::new(&seed, &quiver)?;
            let elem = ctx.triangular_basis(&a)?;
            let support: std::collections::BTreeSet<Vec<i64>> = elem.support().into_iter().collect();
            let text = match common.format {
                Format::Tsv => support_tsv(&quiver, &a, |v| support.contains(v)),
                Format::Json => {
                    let rows = support_tsv(&quiver, &a, |v| support.contains(v));
                    let objs: Vec<serde_json::Value> = rows
                        .lines()
                        .map(|line| {
                            let cells: Vec<&str> = line.split('\t').collect();
                            let n = quiver.n();
                            serde_json::json!({
                                "v": cells[..n].iter().map(|x| x.parse::<i64>().unwrap()).collect::<Vec<_>>(),
                                "f": cells[n].parse::<i64>().unwrap(),
                                "in_support": cells[n + 1] == "1",
                            })
                        })
                        .collect();
                    serde_json::to_string(&objs)?
                }
            };
            emit(&common.out, &text)?;
            Ok(ExitCode::SUCCESS)
        }
        Cmd::ChiM { common, w } => {
            let (seed, quiver) = load_model(&common.b)?;
            let w = parse_wvector(&w, quiver.n())?;
            let elem = qtri_core::stratdata::chi_m(&seed, &quiver, &w);
            let text = match common.format {
                Format::Json => serde_json::to_string(&elem)?,
                Format::Tsv => torus_tsv(&elem),
            };
            emit(&common.out, &text)?;
            Ok(ExitCode::SUCCESS)
        }
        Cmd::EStar { common, w, frozen } => {
            let (seed, quiver) = load_model(&common.b)?;
            let n = quiver.n();
            let w = parse_wvector(&w, n)?;
            let frozen = match frozen {
                Some(f) => parse_ints(&f, n)?,
                None => vec![0; n],
            };
            let frame = TPrimeFrame::new(&seed, &quiver)?;
            let elem = frame.e_star(&w, &frozen);
            let text = match common.format {
                Format::Json => serde_json::to_string(&elem)?,
                Format::Tsv => torus_tsv(&elem),
            };
            emit(&common.out, &text)?;
            Ok(ExitCode::SUCCESS)
        }
        Cmd::Dims { common, v, w } => {
            let (_, quiver) = load_model(&common.b)?;
            let n = quiver.n();
            let v = parse_ints(&v, n)?;
            let w = parse_wvector(&w, n)?;
            let pair = qtri_core::DimPair::new(v, w)?;
            let (v, w) = (pair.v, pair.w);
            let nonempty = is_nonempty_f(&quiver, &v, &w);
            let value = serde_json::json!({
                "v": v,
                "w": w.to_flat(),
                "nonempty": nonempty,
                "l_dominant": is_l_dominant(&quiver, &v, &w),
                "vbar": vbar(&quiver, &v, &w),
                "d": if nonempty { Some(dim_f(&quiver, &v, &w).expect("nonempty")) } else { None },
                "d_tilde": if nonempty { Some(dim_ftilde(&quiver, &v, &w).expect("nonempty")) } else { None },
                "poincare": if nonempty {
                    Some(serde_json::to_value(poincare_f(&quiver, &v, &w).expect("nonempty"))?)
                } else {
                    None
                },
            });
            let text = match common.format {
                Format::Json => serde_json::to_string(&value)?,
                Format::Tsv => {
                    let row = [
                        value["nonempty"].to_string(),
                        value["l_dominant"].to_string(),
                        serde_json::to_string(&value["vbar"])?,
                        value["d"].to_string(),
                        value["d_tilde"].to_string(),
                        value["poincare"].to_string(),
                    ];
                    row.join("\t")
                }
            };
            emit(&common.out, &text)?;
            Ok(ExitCode::SUCCESS)
        }
        Cmd::Mutate { common, k } => {
            let (seed, quiver) = load_model(&common.b)?;
            if k == 0 || k > quiver.n() {
                bail!("mutation direction {k} out of range 1..={}", quiver.n());
            }
            let mutated = seed.mutate(k - 1)?;
            let text = serde_json::to_string(&mutated)?;
            emit(&common.out, &text)?;
            Ok(ExitCode::SUCCESS)
        }
        Cmd::Verify { common, a, sweep_n, sweep_count, sweep_bmax, sweep_amax, seed, jobs } => {
            let (_, quiver) = load_model(&common.b)?;
            let b = parse_matrix(&common.b)?;
            let mut lines = Vec::new();
            let mut all_pass = true;

            if let Some(a) = &a {
                let a = parse_index(a, 2 * quiver.n())?;
                let seed = Seed::principal(&b)?;
                let report = qtri_core::tribasis::verify_support_bound(&seed, &quiver, &a)?;
                lines.extend(report.render_text().lines().map(String::from));
                for check in instance_checks(&b, &a)? {
                    all_pass &= check.pass;
                    lines.push(format!(
                        "[{}] {}: {}",
                        if check.pass { " ok " } else { "FAIL" },
                        check.name,
                        check.detail
                    ));
                }
            }

            if let Some(max_rank) = sweep_n {
                let cfg = SweepConfig {
                    count: sweep_count,
                    max_rank,
                    max_mult: sweep_bmax,
                    max_index: sweep_amax,
                    seed,
                };
                let instances = sweep_instances(&cfg);
                let pool = rayon::ThreadPoolBuilder::new().num_threads(jobs).build()?;
                let outcomes: Vec<_> = pool.install(|| {
                    instances
                        .par_iter()
                        .map(|(b, a)| check_instance(b, a))
                        .collect::<std::result::Result<Vec<_>, _>>()
                })?;
                let mut failed = 0usize;
                for (i, o) in outcomes.iter().enumerate() {
                    if !o.pass() {
                        failed += 1;
                        lines.push(format!(
                            "[FAIL] sweep instance {i}: B={:?} a={:?} (bound {}, identity {})",
                            o.b, o.a, o.bound_pass, o.f_identity_pass
                        ));
                    }
                }
                all_pass &= failed == 0;
                lines.push(format!(
                    "[{}] sweep: {}/{} instances clean (seed {seed}, rank <= {max_rank}, |b| <= {sweep_bmax}, |a| <= {sweep_amax})",
                    if failed == 0 { " ok " } else { "FAIL" },
                    outcomes.len() - failed,
                    outcomes.len()
                ));
            }

            if a.is_none() && sweep_n.is_none() {
                bail!("verify needs --a and/or --sweep-n");
            }
            emit(&common.out, &lines.join("\n"))?;
            Ok(if all_pass { ExitCode::SUCCESS } else { ExitCode::FAILURE })
        }
    }
}

/// Parse B and derive the principal seed plus the bipartition; a
/// non-bipartite matrix is rejected naming the violating vertex.
fn load_model(b: &str) -> Result<(Seed, BipartiteQuiver)> {
    let b = parse_matrix(b)?;
    let quiver = BipartiteQuiver::from_b(&b)?;
    let seed = Seed::principal(&b)?;
    Ok((seed, quiver))
}

fn parse_matrix(input: &str) -> Result<IntMat> {
    let text = inline_or_file(input)?;
    let value: serde_json::Value =
        serde_json::from_str(&text).with_context(|| format!("cannot parse matrix from {input:?}"))?;
    let rows_value = match &value {
        serde_json::Value::Object(map) => {
            map.get("B").ok_or_else(|| anyhow!("matrix object must hold a \"B\" key"))?
        }
        other => other,
    };
    let rows: Vec<Vec<i64>> =
        serde_json::from_value(rows_value.clone()).context("matrix must be an array of integer rows")?;
    Ok(IntMat::from_rows(&rows)?)
}

fn parse_ints(input: &str, expect_len: usize) -> Result<Vec<i64>> {
    let text = inline_or_file(input)?;
    let trimmed = text.trim();
    let values: Vec<i64> = if trimmed.starts_with('[') {
        serde_json::from_str(trimmed).context("cannot parse integer list")?
    } else {
        trimmed
            .split(',')
            .map(|x| x.trim().parse::<i64>().with_context(|| format!("bad integer {x:?}")))
            .collect::<Result<_>>()?
    };
    if values.len() != expect_len {
        bail!("expected {expect_len} integers, got {}", values.len());
    }
    Ok(values)
}

fn parse_index(input: &str, len: usize) -> Result<ExpVec> {
    Ok(ExpVec(parse_ints(input, len)?))
}

fn parse_wvector(input: &str, n: usize) -> Result<WVector> {
    Ok(WVector::from_flat(&parse_ints(input, 2 * n)?)?)
}

/// Inline payloads start with a JSON bracket or look like a bare integer
/// list; anything else is a file path.
fn inline_or_file(input: &str) -> Result<String> {
    let t = input.trim();
    let inline = t.starts_with('[')
        || t.starts_with('{')
        || t.chars().all(|c| c.is_ascii_digit() || c == '-' || c == ',' || c.is_whitespace());
    if inline {
        Ok(t.to_string())
    } else {
        std::fs::read_to_string(t).with_context(|| format!("cannot read {t:?}"))
    }
}

fn torus_tsv(elem: &qtri_core::TorusElem) -> String {
    let mut out = String::new();
    for (e, c) in elem.terms() {
        let coords: Vec<String> = e.0.iter().map(|x| x.to_string()).collect();
        out.push_str(&coords.join("\t"));
        out.push('\t');
        out.push_str(&serde_json::to_string(c).expect("coefficient serializes"));
        out.push('\n');
    }
    out
}

fn emit(out: &Option<String>, text: &str) -> Result<()> {
    let mut body = text.to_string();
    if !body.ends_with('\n') {
        body.push('\n');
    }
    match out {
        Some(path) => std::fs::write(path, body).with_context(|| format!("cannot write {path:?}"))?,
        None => std::io::stdout().write_all(body.as_bytes())?,
    }
    Ok(())
}
