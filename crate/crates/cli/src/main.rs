//! Command-line front end: matrix file I/O, instance generation, algorithm
//! dispatch, oracle verification and cost reports.
//!
//! Exit codes: 0 on success, 1 when `--verify` finds a mismatch, 2 on usage
//! or input errors.

mod format;
mod report;

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use qsemiring_core::boolsparse::{auto_sparse_bool_product, sparse_bool_product};
use qsemiring_core::distmsb::{default_w, distance_brute, distance_msb, msb_bits_oracle};
use qsemiring_core::dominance::{
    dominance_brute, dominance_product, dominance_product_with_t, generalized_dominance,
    generalized_dominance_brute, LexOrder,
};
use qsemiring_core::exponents::{
    closed_form_exponent_table, select_parameters, OmegaParams, Parameters, Task,
};
use qsemiring_core::maxmin::{apbp, apbp_brute, default_g, maxmin_brute, maxmin_product};
use qsemiring_core::{ledger_report, CostLedger, Engine, ExtInt, ExtMatrix};

use format::{dominant_fill, parse_bool, parse_ext, write_bool, write_ext};
use report::{checksum, write_report, RunReport};

#[derive(Parser)]
#[command(name = "qsemiring", version, about = "Matrix products over semirings with simulated quantum search")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum EngineArg {
    QuantumSim,
    Classical,
    Brute,
}

impl EngineArg {
    fn name(self) -> &'static str {
        match self {
            EngineArg::QuantumSim => "quantum-sim",
            EngineArg::Classical => "classical",
            EngineArg::Brute => "brute",
        }
    }

    fn core(self) -> Engine {
        match self {
            EngineArg::Classical => Engine::Classical,
            _ => Engine::QuantumSim,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum OrderArg {
    Normal,
    Decreasing,
}

impl From<OrderArg> for LexOrder {
    fn from(o: OrderArg) -> LexOrder {
        match o {
            OrderArg::Normal => LexOrder::Normal,
            OrderArg::Decreasing => LexOrder::Decreasing,
        }
    }
}

#[derive(Args)]
struct CommonArgs {
    /// Execution engine.
    #[arg(long, value_enum, default_value = "quantum-sim")]
    engine: EngineArg,
    /// Seed for the simulated search order.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Re-run the task's brute oracle and compare.
    #[arg(long)]
    verify: bool,
    /// Write a JSON run report to this path.
    #[arg(long)]
    report: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Cmd {
    /// Existence dominance product of two extint matrices.
    Dominance {
        #[arg(long)]
        a: PathBuf,
        #[arg(long)]
        b: PathBuf,
        /// Number of level parts; selected automatically when omitted.
        #[arg(long)]
        t: Option<usize>,
        /// Use strict inequality.
        #[arg(long)]
        strict: bool,
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Generalized dominance over families of matrices.
    Gendom {
        #[arg(long, num_args = 1.., required = true)]
        a: Vec<PathBuf>,
        #[arg(long, num_args = 1.., required = true)]
        b: Vec<PathBuf>,
        #[arg(long)]
        t: Option<usize>,
        #[arg(long, value_enum, default_value = "normal")]
        order: OrderArg,
        #[arg(long)]
        strict: bool,
        #[command(flatten)]
        common: CommonArgs,
    },
    /// (max,min) product of two extint matrices.
    Maxmin {
        #[arg(long)]
        a: PathBuf,
        #[arg(long)]
        b: PathBuf,
        /// Row-part size; selected automatically when omitted.
        #[arg(long)]
        g: Option<usize>,
        #[command(flatten)]
        common: CommonArgs,
    },
    /// All-pairs bottleneck paths of a capacity matrix.
    Apbp {
        #[arg(long)]
        a: PathBuf,
        #[arg(long)]
        g: Option<usize>,
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Most significant bits of the distance product.
    Distmsb {
        #[arg(long)]
        a: PathBuf,
        #[arg(long)]
        b: PathBuf,
        /// Number of leading bits.
        #[arg(long)]
        bits: u32,
        /// Power-of-two scale; derived from the inputs when omitted.
        #[arg(long)]
        w: Option<i64>,
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Boolean product of two bool matrices, sparse-aware.
    Boolmul {
        #[arg(long)]
        a: PathBuf,
        #[arg(long)]
        b: PathBuf,
        /// Degree thresholds; all three or none.
        #[arg(long)]
        l1: Option<usize>,
        #[arg(long)]
        l2: Option<usize>,
        #[arg(long)]
        l3: Option<usize>,
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Print the complexity-exponent table.
    Exponents {
        #[arg(long)]
        omega: Option<f64>,
        #[arg(long)]
        alpha: Option<f64>,
        /// Aligned text table instead of JSON.
        #[arg(long)]
        text: bool,
    },
    /// Generate a seeded random instance file.
    Gen {
        #[arg(long, value_enum)]
        kind: GenKind,
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 0.5)]
        density: f64,
        #[arg(long, default_value_t = -5)]
        min: i64,
        #[arg(long, default_value_t = 5)]
        max: i64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum GenKind {
    /// Extended integers with inf fill.
    Extint,
    /// Boolean by density.
    Bool,
    /// Capacity digraph: -inf fill, nonzero edges by density.
    Capacity,
    /// Extint drawing from three values to force duplicates.
    DuplicateHeavy,
}

enum Outcome {
    Ok,
    VerifyFailed,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.cmd) {
        Ok(Outcome::Ok) => ExitCode::SUCCESS,
        Ok(Outcome::VerifyFailed) => {
            eprintln!("verification mismatch");
            ExitCode::from(1)
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

struct TaskResult<T: serde::Serialize + PartialEq> {
    result: T,
    oracle: Option<T>,
    parameters: Parameters,
    n: usize,
    u: Option<usize>,
    v: Option<usize>,
    ell: Option<u32>,
}

/// Prints the rendered result, writes the report and folds the oracle
/// comparison into the exit code.
fn finish<T: serde::Serialize + PartialEq>(
    task: &str,
    common: &CommonArgs,
    ledger: &CostLedger,
    tr: TaskResult<T>,
    rendered: String,
) -> Result<Outcome> {
    let matched = tr.oracle.as_ref().map(|want| *want == tr.result);
    let report = RunReport {
        task: task.to_string(),
        n: tr.n,
        u: tr.u,
        v: tr.v,
        ell: tr.ell,
        parameters: tr.parameters,
        engine: common.engine.name().to_string(),
        seed: common.seed,
        ledger: ledger_report(ledger),
        result_checksum: checksum(&tr.result)?,
        verified: matched == Some(true),
    };
    if let Some(path) = &common.report {
        write_report(path, &report)?;
    }
    print!("{rendered}");
    Ok(if matched == Some(false) { Outcome::VerifyFailed } else { Outcome::Ok })
}

fn run(cmd: Cmd) -> Result<Outcome> {
    let omega = OmegaParams::default();
    match cmd {
        Cmd::Dominance { a, b, t, strict, common } => {
            let a = parse_ext(&a)?;
            let b = parse_ext(&b)?;
            let n = a.rows();
            let mut ledger = CostLedger::new(common.seed);
            let result = match (common.engine, t) {
                (EngineArg::Brute, _) => dominance_brute(&a, &b, strict)?,
                (e, Some(t)) => {
                    dominance_product_with_t(&a, &b, t, strict, e.core(), &mut ledger)?
                }
                (e, None) => dominance_product(&a, &b, strict, e.core(), &mut ledger)?,
            };
            let oracle =
                if common.verify { Some(dominance_brute(&a, &b, strict)?) } else { None };
            let mut parameters = select_parameters(
                Task::DominanceT {
                    n: n.max(1),
                    m1: a.finite_count(),
                    m2: b.finite_count(),
                },
                &omega,
            )?;
            if t.is_some() {
                parameters.t = t;
            }
            let rendered = write_bool(&result);
            finish(
                "dominance",
                &common,
                &ledger,
                TaskResult {
                    result,
                    oracle,
                    parameters,
                    n,
                    u: Some(1),
                    v: Some(1),
                    ell: None,
                },
                rendered,
            )
        }
        Cmd::Gendom { a, b, t, order, strict, common } => {
            let as_: Vec<ExtMatrix> = a.iter().map(|p| parse_ext(p)).collect::<Result<_>>()?;
            let bs: Vec<ExtMatrix> = b.iter().map(|p| parse_ext(p)).collect::<Result<_>>()?;
            let n = as_.first().map_or(0, ExtMatrix::rows);
            let order = LexOrder::from(order);
            let m1: usize = as_.iter().map(ExtMatrix::finite_count).sum();
            let m2: usize = bs.iter().map(ExtMatrix::finite_count).sum();
            let mut parameters =
                select_parameters(Task::DominanceT { n: n.max(1), m1, m2 }, &omega)?;
            let t = t.unwrap_or_else(|| parameters.t.unwrap_or(1).clamp(1, m1.max(1)));
            parameters.t = Some(t);
            let mut ledger = CostLedger::new(common.seed);
            let result = match common.engine {
                EngineArg::Brute => generalized_dominance_brute(&as_, &bs, order, strict)?,
                e => generalized_dominance(&as_, &bs, t, order, strict, e.core(), &mut ledger)?,
            };
            let oracle = if common.verify {
                Some(generalized_dominance_brute(&as_, &bs, order, strict)?)
            } else {
                None
            };
            let mut rendered = serde_json::to_string_pretty(&result)?;
            rendered.push('\n');
            finish(
                "gendom",
                &common,
                &ledger,
                TaskResult {
                    result,
                    oracle,
                    parameters,
                    n,
                    u: Some(as_.len()),
                    v: Some(bs.len()),
                    ell: None,
                },
                rendered,
            )
        }
        Cmd::Maxmin { a, b, g, common } => {
            let a = parse_ext(&a)?;
            let b = parse_ext(&b)?;
            let n = a.rows();
            let mut parameters = select_parameters(Task::MaxMinG { n: n.max(1) }, &omega)?;
            if g.is_some() {
                parameters.g = g;
                parameters.gamma = None;
            }
            let g = parameters.g.unwrap_or(1);
            let mut ledger = CostLedger::new(common.seed);
            let result = match common.engine {
                EngineArg::Brute => maxmin_brute(&a, &b)?,
                e => maxmin_product(&a, &b, g, e.core(), &mut ledger)?,
            };
            let oracle = if common.verify { Some(maxmin_brute(&a, &b)?) } else { None };
            let rendered = write_ext(&result, dominant_fill(&result));
            finish(
                "maxmin",
                &common,
                &ledger,
                TaskResult { result, oracle, parameters, n, u: None, v: None, ell: None },
                rendered,
            )
        }
        Cmd::Apbp { a, g, common } => {
            let cap = parse_ext(&a)?;
            let n = cap.rows();
            let mut parameters = select_parameters(Task::MaxMinG { n: n.max(1) }, &omega)?;
            if g.is_some() {
                parameters.g = g;
                parameters.gamma = None;
            }
            let g = parameters.g.unwrap_or_else(|| default_g(n).unwrap_or(1));
            let mut ledger = CostLedger::new(common.seed);
            let result = match common.engine {
                EngineArg::Brute => apbp_brute(&cap)?,
                e => apbp(&cap, g, e.core(), &mut ledger)?,
            };
            let oracle = if common.verify { Some(apbp_brute(&cap)?) } else { None };
            let rendered = write_ext(&result, dominant_fill(&result));
            finish(
                "apbp",
                &common,
                &ledger,
                TaskResult { result, oracle, parameters, n, u: None, v: None, ell: None },
                rendered,
            )
        }
        Cmd::Distmsb { a, b, bits, w, common } => {
            let a = parse_ext(&a)?;
            let b = parse_ext(&b)?;
            let n = a.rows();
            let parameters = select_parameters(
                Task::DistMsbT {
                    n: n.max(1),
                    ell: bits,
                    classical: common.engine == EngineArg::Classical,
                },
                &omega,
            )?;
            let mut ledger = CostLedger::new(common.seed);
            let scale = match w {
                Some(w) => w,
                None => default_w(&a, &b, bits)?,
            };
            let result = match common.engine {
                EngineArg::Brute => msb_bits_oracle(&distance_brute(&a, &b)?, scale, bits)?,
                e => distance_msb(&a, &b, bits, w, e.core(), &mut ledger)?,
            };
            let oracle = if common.verify {
                Some(msb_bits_oracle(&distance_brute(&a, &b)?, scale, bits)?)
            } else {
                None
            };
            let mut rendered = serde_json::to_string_pretty(&result)?;
            rendered.push('\n');
            finish(
                "distmsb",
                &common,
                &ledger,
                TaskResult {
                    result,
                    oracle,
                    parameters,
                    n,
                    u: Some(1 << bits.div_ceil(2)),
                    v: Some(1 << (bits / 2)),
                    ell: Some(bits),
                },
                rendered,
            )
        }
        Cmd::Boolmul { a, b, l1, l2, l3, common } => {
            let a = parse_bool(&a)?;
            let b = parse_bool(&b)?;
            let n = a.rows();
            let mut ledger = CostLedger::new(common.seed);
            let (result, parameters) = match (common.engine, l1, l2, l3) {
                (EngineArg::Brute, _, _, _) => (a.multiply(&b)?, Parameters::default()),
                (e, Some(l1), Some(l2), Some(l3)) => (
                    sparse_bool_product(&a, &b, l1, l2, l3, e.core(), &mut ledger)?,
                    Parameters {
                        l1: Some(l1),
                        l2: Some(l2),
                        l3: Some(l3),
                        ..Parameters::default()
                    },
                ),
                (e, None, None, None) => (
                    auto_sparse_bool_product(&a, &b, e.core(), &mut ledger)?,
                    select_parameters(
                        Task::BoolSparse {
                            n: n.max(1),
                            m1: a.count_ones(),
                            m2: b.count_ones(),
                        },
                        &omega,
                    )?,
                ),
                _ => bail!("--l1, --l2, --l3 must be given together or not at all"),
            };
            let oracle = if common.verify { Some(a.multiply(&b)?) } else { None };
            let rendered = write_bool(&result);
            finish(
                "boolmul",
                &common,
                &ledger,
                TaskResult { result, oracle, parameters, n, u: None, v: None, ell: None },
                rendered,
            )
        }
        Cmd::Exponents { omega: w, alpha, text } => {
            let p = OmegaParams::new(
                w.unwrap_or(OmegaParams::default().omega),
                alpha.unwrap_or(OmegaParams::default().alpha),
            )?;
            let t = closed_form_exponent_table(&p);
            let rows: Vec<(&str, f64)> = vec![
                ("omega", p.omega),
                ("alpha", p.alpha),
                ("beta", p.beta()),
                ("maxmin", t.max_min),
                ("dominance", t.dominance_dense),
                ("maxmin-classical", t.max_min_classical),
                ("distmsb-quantum-coeff", t.dist_msb_quantum_coeff),
                ("distmsb-classical-coeff", t.dist_msb_classical_coeff),
                ("boolsparse-m-exponent", t.bool_sparse_m_exponent),
                ("boolsparse-n-exponent", t.bool_sparse_n_exponent),
                ("boolsparse-crossover", t.bool_sparse_crossover),
                ("threshold-quadratic", t.threshold_low),
                ("threshold-dense", t.threshold_high),
            ];
            if text {
                for (name, value) in rows {
                    println!("{name:<26} {value:>9.6}");
                }
            } else {
                let map: serde_json::Map<String, serde_json::Value> = rows
                    .into_iter()
                    .map(|(k, v)| (k.to_string(), serde_json::json!(v)))
                    .collect();
                println!("{}", serde_json::to_string_pretty(&map)?);
            }
            Ok(Outcome::Ok)
        }
        Cmd::Gen { kind, n, density, min, max, seed, out } => {
            if !(0.0..=1.0).contains(&density) {
                bail!("density {density} not in [0, 1]");
            }
            if min > max {
                bail!("empty value range {min}..{max}");
            }
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let text = match kind {
                GenKind::Bool => {
                    let mut m = qsemiring_core::BoolMatrix::zeros(n, n);
                    for i in 0..n {
                        for j in 0..n {
                            if rng.gen_bool(density) {
                                m.set(i, j, true);
                            }
                        }
                    }
                    write_bool(&m)
                }
                GenKind::Extint => {
                    let mut m = ExtMatrix::filled(n, n, ExtInt::PosInf);
                    for i in 0..n {
                        for j in 0..n {
                            if rng.gen_bool(density) {
                                m.set(i, j, ExtInt::Finite(rng.gen_range(min..=max)));
                            }
                        }
                    }
                    write_ext(&m, ExtInt::PosInf)
                }
                GenKind::Capacity => {
                    let mut m = ExtMatrix::filled(n, n, ExtInt::NegInf);
                    for i in 0..n {
                        for j in 0..n {
                            if i != j && rng.gen_bool(density) {
                                m.set(i, j, ExtInt::Finite(rng.gen_range(min..=max)));
                            }
                        }
                    }
                    write_ext(&m, ExtInt::NegInf)
                }
                GenKind::DuplicateHeavy => {
                    let pool = [min, min + (max - min) / 2, max];
                    let mut m = ExtMatrix::filled(n, n, ExtInt::PosInf);
                    for i in 0..n {
                        for j in 0..n {
                            if rng.gen_bool(density) {
                                let v = match rng.gen_range(0..10) {
                                    0 => ExtInt::NegInf,
                                    1 => ExtInt::PosInf,
                                    _ => ExtInt::Finite(pool[rng.gen_range(0..3)]),
                                };
                                m.set(i, j, v);
                            }
                        }
                    }
                    write_ext(&m, ExtInt::PosInf)
                }
            };
            std::fs::write(&out, text)?;
            Ok(Outcome::Ok)
        }
    }
}
