//! Command-line front end: catalog generation, COINC / hierarchy / diagram /
//! KD analysis, perturbation, and the acceptance-suite runner.
//!
//! Exit codes: 0 success, 1 acceptance failure, 2 malformed input or usage,
//! 3 math-layer failure.

use std::io::Read;
use std::path::PathBuf;

use clap::{Parser, Subcommand};

use kdlab::acceptance::run_all;
use kdlab::bases::{self, stats, TransitionMatrix, U6Variant};
use kdlab::coinc::{hierarchy, is_coinc, uncertainty_diagram};
use kdlab::kd::{
    b_representation, entropies, is_kd_classical, kd_distribution, support_profile, witness,
    WitnessOutcome,
};
use kdlab::linalg::enumerate_minors;
use kdlab::oracle::diagram_by_sampling;
use kdlab::perturb::{coincify, near_mub_coinc_traced};
use kdlab::wire;
use kdlab::{C64, Error, Result, Tolerance};

#[derive(Parser)]
#[command(
    name = "kdlab",
    version,
    about = "Kirkwood-Dirac nonclassicality, complete basis incompatibility, and support-uncertainty diagrams"
)]
struct Cli {
    /// Absolute threshold below which a magnitude counts as zero.
    #[arg(long, global = true, value_name = "EPS")]
    tol_zero: Option<f64>,

    /// Relative pivot threshold for rank decisions.
    #[arg(long, global = true, value_name = "EPS")]
    tol_rank: Option<f64>,

    /// Emit machine-readable JSON instead of human-readable text.
    #[arg(long, global = true)]
    json: bool,

    /// Bound the worker-thread fan-out (default: available parallelism).
    #[arg(long, global = true, value_name = "N")]
    threads: Option<usize>,

    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Emit a catalog matrix as JSON (dft, tao, spin1, mub4, u6, u6p).
    Gen {
        /// Matrix family name.
        name: String,
        /// Dimension (dft only).
        #[arg(long)]
        d: Option<usize>,
        /// Unimodular parameter for mub4 as "RE,IM" (default 1,0).
        #[arg(long, value_name = "RE,IM")]
        s: Option<String>,
        /// Write to a file instead of stdout.
        #[arg(long, value_name = "FILE")]
        out: Option<PathBuf>,
    },
    /// Decide complete incompatibility and print the minor census.
    Coinc {
        /// Matrix JSON file, or - for stdin.
        matrix: String,
    },
    /// Print the four-level incompatibility hierarchy report.
    Hierarchy {
        /// Matrix JSON file, or - for stdin.
        matrix: String,
    },
    /// Compute the exact support-uncertainty diagram.
    Diagram {
        /// Matrix JSON file, or - for stdin.
        matrix: String,
        /// Also write the diagram as CSV to this file.
        #[arg(long, value_name = "FILE")]
        csv: Option<PathBuf>,
        /// Cross-check membership by seeded random sampling.
        #[arg(long)]
        oracle: bool,
        /// States per cell for the sampling oracle.
        #[arg(long, default_value_t = 50, value_name = "K")]
        samples: usize,
        /// Seed for the sampling oracle.
        #[arg(long, default_value_t = 7, value_name = "S")]
        seed: u64,
    },
    /// Evaluate the Kirkwood-Dirac distribution of a state.
    Kd {
        /// Matrix JSON file, or - for stdin.
        matrix: String,
        /// State JSON file, or - for stdin.
        state: String,
    },
    /// Perturb a basis pair into a completely incompatible one.
    Perturb {
        /// Matrix JSON file, or - for stdin.
        matrix: String,
        /// Per-round angle budget.
        #[arg(long)]
        eps: f64,
        /// Ignore the entries; build a near-unbiased completely
        /// incompatible matrix of the same dimension.
        #[arg(long)]
        target_mub: bool,
        /// Allowed distance from unbiasedness (with --target-mub).
        #[arg(long)]
        delta: Option<f64>,
    },
    /// Run the acceptance suite; nonzero exit on any failure.
    Verify {
        /// Reduced sample counts for a fast smoke run.
        #[arg(long)]
        quick: bool,
    },
}

fn main() {
    // Die quietly when the read end of a pipe closes (e.g. `kdlab gen ... |
    // head`); the Rust default turns EPIPE into a mid-print panic.
    #[cfg(unix)]
    unsafe {
        libc::signal(libc::SIGPIPE, libc::SIG_DFL);
    }
    let cli = Cli::parse();
    if let Some(n) = cli.threads {
        // Ignore a second initialization (tests, repeated calls).
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
    let code = match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            match e {
                Error::Parse(_) | Error::Io(_) => 2,
                _ => 3,
            }
        }
    };
    std::process::exit(code);
}

fn tolerance(cli: &Cli) -> Result<Tolerance> {
    Tolerance::new(cli.tol_zero.unwrap_or(1e-9), cli.tol_rank.unwrap_or(1e-10))
        .map_err(|e| Error::Parse(e.to_string()))
}

fn read_input(path: &str) -> Result<String> {
    if path == "-" {
        let mut text = String::new();
        std::io::stdin().read_to_string(&mut text)?;
        Ok(text)
    } else {
        Ok(std::fs::read_to_string(path)?)
    }
}

fn load_matrix(path: &str, tol: Tolerance) -> Result<TransitionMatrix> {
    let m = wire::parse_matrix(&read_input(path)?)?;
    TransitionMatrix::new(m, tol)
}

fn parse_complex_flag(text: &str) -> Result<C64> {
    let (re, im) = text
        .split_once(',')
        .ok_or_else(|| Error::Parse(format!("expected RE,IM, got {text:?}")))?;
    let re: f64 = re.trim().parse().map_err(|_| Error::Parse(format!("bad real part {re:?}")))?;
    let im: f64 = im.trim().parse().map_err(|_| Error::Parse(format!("bad imaginary part {im:?}")))?;
    Ok(C64::new(re, im))
}

fn emit(out: &Option<PathBuf>, text: &str) -> Result<()> {
    match out {
        Some(path) => Ok(std::fs::write(path, text)?),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn run(cli: Cli) -> Result<i32> {
    let tol = tolerance(&cli)?;
    match &cli.cmd {
        Cmd::Gen { name, d, s, out } => {
            let t = generate(name, *d, s.as_deref(), tol)?;
            emit(out, &(wire::matrix_json(t.matrix()) + "\n"))?;
            Ok(0)
        }
        Cmd::Coinc { matrix } => {
            let t = load_matrix(matrix, tol)?;
            let coinc = is_coinc(&t)?;
            let rep = enumerate_minors(t.matrix(), t.tol())?;
            if cli.json {
                println!("{}", wire::minor_report_json(coinc, &rep));
            } else {
                println!("COINC: {coinc}");
                println!("d: {}", rep.d);
                println!("{:>4}  {:>9}  {:>9}  {:>12}", "size", "vanishing", "total", "min |det|");
                for c in &rep.per_size {
                    println!(
                        "{:>4}  {:>9}  {:>9}  {:>12.6e}",
                        c.size, c.vanishing, c.total, c.min_abs
                    );
                }
                println!("total vanishing: {}", rep.total_vanishing);
                if let Some((r, c)) = &rep.first_vanishing {
                    println!(
                        "largest vanishing minor: size {} at rows {:?}, cols {:?}",
                        rep.largest_vanishing_size.unwrap_or(0),
                        r.members(),
                        c.members()
                    );
                }
            }
            Ok(0)
        }
        Cmd::Hierarchy { matrix } => {
            let t = load_matrix(matrix, tol)?;
            let h = hierarchy(&t)?;
            if cli.json {
                println!("{}", wire::hierarchy_json(&h));
            } else {
                println!("coinc:                      {}", h.coinc);
                println!("all_projectors_noncommute:  {}", h.all_projectors_noncommute);
                println!("m_positive:                 {}", h.m_positive);
                println!("max_below_one:              {}", h.max_below_one);
                match &h.first_commuting_pair {
                    Some((s, tset)) => println!(
                        "first commuting pair:       S = {:?}, T = {:?}",
                        s.members(),
                        tset.members()
                    ),
                    None => println!("first commuting pair:       none"),
                }
            }
            Ok(0)
        }
        Cmd::Diagram { matrix, csv, oracle, samples, seed } => {
            let t = load_matrix(matrix, tol)?;
            let diag = uncertainty_diagram(&t)?;
            if let Some(path) = csv {
                std::fs::write(path, wire::diagram_csv(&diag))?;
            }
            if cli.json {
                println!("{}", wire::diagram_json(&diag));
            } else {
                let d = t.d();
                println!("d: {d}, n_min: {}", diag.n_min);
                println!("lower edge: {:?}", diag.lower_edge);
                println!("max dim by cell ('.' = not achievable), n_a down, n_b across:");
                let header: Vec<String> = (1..=d).map(|nb| format!("{nb:>3}")).collect();
                println!("     {}", header.join(""));
                for na in 1..=d {
                    let row: Vec<String> = (1..=d)
                        .map(|nb| {
                            if diag.is_member(na, nb) {
                                format!("{:>3}", diag.max_dim_at(na, nb))
                            } else {
                                format!("{:>3}", ".")
                            }
                        })
                        .collect();
                    println!("{na:>4} {}", row.join(""));
                }
            }
            if *oracle {
                let sampled = diagram_by_sampling(&t, *samples, *seed)?;
                let exact: Vec<(usize, usize)> = diag.members();
                let got: Vec<(usize, usize)> = sampled.members();
                let missed: Vec<&(usize, usize)> =
                    exact.iter().filter(|c| !got.contains(c)).collect();
                let spurious: Vec<&(usize, usize)> =
                    got.iter().filter(|c| !exact.contains(c)).collect();
                let agree = missed.is_empty() && spurious.is_empty();
                println!(
                    "oracle ({samples} states/cell, seed {seed}): agreement {agree}{}{}",
                    if missed.is_empty() {
                        String::new()
                    } else {
                        format!(", not reached by sampling: {missed:?}")
                    },
                    if spurious.is_empty() {
                        String::new()
                    } else {
                        format!(", sampled outside exact diagram: {spurious:?}")
                    }
                );
            }
            Ok(0)
        }
        Cmd::Kd { matrix, state } => {
            if matrix == "-" && state == "-" {
                return Err(Error::Parse("matrix and state cannot both be stdin".into()));
            }
            let t = load_matrix(matrix, tol)?;
            let psi = wire::parse_state(&read_input(state)?, t.tol().zero_abs)?;
            let kd = kd_distribution(&t, &psi)?;
            let profile = support_profile(&t, &psi)?;
            let classical = is_kd_classical(&t, &psi)?;
            let verdict = witness(&t, &psi)?;
            let ent = entropies(&t, &psi)?;
            if cli.json {
                println!(
                    "{}",
                    wire::kd_report_json(&t, &psi, &kd, &profile, classical, &verdict, ent)
                );
            } else {
                let d = t.d();
                println!("d: {d}");
                println!("Q (re, im):");
                for i in 0..d {
                    let row: Vec<String> = (0..d)
                        .map(|j| {
                            let q = kd.q.at(i, j);
                            format!("({:>8.5}, {:>8.5})", q.re, q.im)
                        })
                        .collect();
                    println!("  {}", row.join(" "));
                }
                let v = b_representation(&t, &psi)?;
                let row_sums: Vec<String> = (0..d)
                    .map(|i| format!("{:.5}", psi.components()[i].norm_sqr()))
                    .collect();
                let col_sums: Vec<String> =
                    (0..d).map(|j| format!("{:.5}", v[j].norm_sqr())).collect();
                println!("row marginals |u_i|^2: [{}]", row_sums.join(", "));
                println!("col marginals |v_j|^2: [{}]", col_sums.join(", "));
                println!("total: ({:.6}, {:.6})", kd.total.re, kd.total.im);
                println!("min real part: {:.6}", kd.min_real);
                println!("max |imag|:    {:.6}", kd.max_abs_imag);
                println!("classical: {classical}");
                println!(
                    "support: S = {:?} (n_a = {}), T = {:?} (n_b = {}), n_ab = {}",
                    profile.s.members(),
                    profile.n_a,
                    profile.t.members(),
                    profile.n_b,
                    profile.n_ab
                );
                let outcome = match verdict.outcome {
                    WitnessOutcome::Nonclassical => "nonclassical",
                    WitnessOutcome::Inconclusive => "inconclusive",
                };
                println!("witness: {outcome} — {}", verdict.details);
                println!("entropies: H_a = {:.6}, H_b = {:.6}", ent.0, ent.1);
            }
            Ok(0)
        }
        Cmd::Perturb { matrix, eps, target_mub, delta } => {
            let t = load_matrix(matrix, tol)?;
            let (fixed, trace, eps_used) = if *target_mub {
                let delta = delta.ok_or_else(|| {
                    Error::Parse("--target-mub requires --delta".into())
                })?;
                near_mub_coinc_traced(t.d(), delta)?
            } else {
                let (fixed, trace) = coincify(&t, *eps)?;
                (fixed, trace, *eps)
            };
            if cli.json {
                println!(
                    "{{\"eps\":{},\"matrix\":{},\"trace\":{}}}",
                    wire::fmt_f64(eps_used),
                    wire::matrix_json(fixed.matrix()),
                    wire::trace_json(&trace)
                );
            } else {
                println!("rounds: {}", trace.rounds.len());
                for (i, r) in trace.rounds.iter().enumerate() {
                    println!(
                        "  round {}: sigma = {:?}, theta = {:.6e}, vanishing {} -> {}",
                        i + 1,
                        r.sigma.image(),
                        r.theta,
                        r.vanishing_before,
                        r.vanishing_after
                    );
                }
                println!("angle budget used: {eps_used:.6e}");
                println!("total deviation from input: {:.6e}", trace.total_deviation);
                println!("COINC: {}", is_coinc(&fixed)?);
                println!("min |entry|: {:.6}", stats(&fixed).min_mag);
                println!("{}", wire::matrix_json(fixed.matrix()));
            }
            Ok(0)
        }
        Cmd::Verify { quick } => {
            let results = run_all(*quick);
            let failed = results.iter().filter(|r| !r.passed).count();
            if cli.json {
                let items: Vec<String> = results
                    .iter()
                    .map(|r| {
                        format!(
                            "{{\"id\":{},\"name\":{},\"passed\":{},\"detail\":{}}}",
                            r.id,
                            serde_json::to_string(r.name).expect("string serializes"),
                            r.passed,
                            serde_json::to_string(&r.detail).expect("string serializes")
                        )
                    })
                    .collect();
                println!("[{}]", items.join(","));
            } else {
                for r in &results {
                    println!("{}", r.line());
                }
                println!(
                    "{} of {} criteria passed{}",
                    results.len() - failed,
                    results.len(),
                    if *quick { " (quick mode)" } else { "" }
                );
            }
            Ok(if failed > 0 { 1 } else { 0 })
        }
    }
}

fn generate(name: &str, d: Option<usize>, s: Option<&str>, tol: Tolerance) -> Result<TransitionMatrix> {
    let requires = |flag_ok: bool, msg: &str| {
        if flag_ok {
            Ok(())
        } else {
            Err(Error::Parse(msg.into()))
        }
    };
    requires(d.is_none() || name == "dft", "--d only applies to dft")?;
    requires(s.is_none() || name == "mub4", "--s only applies to mub4")?;
    let t = match name {
        "dft" => {
            let d = d.ok_or_else(|| Error::Parse("gen dft requires --d".into()))?;
            bases::dft(d)?
        }
        "tao" => bases::tao(),
        "spin1" => bases::spin1(),
        "mub4" => {
            let s = match s {
                Some(text) => parse_complex_flag(text)?,
                None => C64::new(1.0, 0.0),
            };
            bases::mub4(s)?
        }
        "u6" => bases::u6(U6Variant::Plain),
        "u6p" => bases::u6(U6Variant::Primed),
        other => {
            return Err(Error::Parse(format!(
                "unknown matrix name {other:?} (expected dft, tao, spin1, mub4, u6, u6p)"
            )))
        }
    };
    // Rebuild so the caller's tolerance flags stick to the matrix.
    TransitionMatrix::new(t.matrix().clone(), tol)
}
