use std::path::PathBuf;
use std::time::Duration;

use clap::{Args, Parser, Subcommand};
use fuglede_core::budget::Budget;
use fuglede_core::constructions::{brock_matrix, brock_spanning_vectors, default_nonsquare, verify_theorem_main2};
use fuglede_core::davey::{davey_from_rows, decompose_davey, enumerate_davey, is_davey, DaveyMatrix};
use fuglede_core::field::{PointSet, PrimeModulus};
use fuglede_core::fourier::{balanced_certificate, is_balanced};
use fuglede_core::reproduce::{markdown_report, run_criterion, CRITERIA, DEFAULT_SEED};
use fuglede_core::search::{brute_force_fuglede, verify_fuglede_dim3, SearchReport, SizeFilter, Verdict};
use fuglede_core::spectral::{
    dephase, factor_log_hadamard, is_log_hadamard, is_spectral_pair, special_dephase, spectrum_search, LogHadamard,
    SpectralPairRecord, SpectrumSearch,
};
use fuglede_core::tiling::{find_tiling_partner, is_k_tiling_verdict, tiling_conditions_crosscheck, PartnerSearch};
use fuglede_core::Error as CoreError;
use serde_json::{json, Value};

use crate::documents::{
    canonical_json, parse_document, read_matrix, read_set, read_source, MatrixDocument, SetDocument,
};
use crate::{CliError, Status};

#[derive(Debug, Parser)]
#[command(name = "fuglede", version, about = "Tiling and spectral set verification over Z_p^d")]
pub struct Cli {
    #[command(flatten)]
    pub limits: Limits,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct Limits {
    /// Node budget for searches.
    #[arg(long, global = true, env = "FUGLEDE_MAX_NODES")]
    pub max_nodes: Option<u64>,
    /// Wall-clock budget for searches, in seconds.
    #[arg(long, global = true)]
    pub max_seconds: Option<f64>,
    /// Worker threads for parallel searches.
    #[arg(long, global = true, env = "FUGLEDE_THREADS")]
    pub threads: Option<usize>,
}

impl Limits {
    pub fn budget(&self) -> Result<Budget, CliError> {
        let mut b = self.max_nodes.map_or_else(Budget::default, Budget::nodes);
        if let Some(s) = self.max_seconds {
            if !(s.is_finite() && s > 0.0) {
                return Err(CliError::Usage(format!("--max-seconds must be positive, got {s}")));
            }
            b = b.with_time(Duration::from_secs_f64(s));
        }
        Ok(b)
    }
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Check a tiling pair, or search for a partner when none is given.
    CheckTiling {
        #[arg(long)]
        set: PathBuf,
        #[arg(long)]
        partner: Option<PathBuf>,
        /// Require every element to be covered exactly k times.
        #[arg(long, default_value_t = 1)]
        k: usize,
    },
    /// Check a spectral pair, or search for a spectrum when none is given.
    CheckSpectral {
        #[arg(long)]
        set: PathBuf,
        #[arg(long)]
        spectrum: Option<PathBuf>,
    },
    /// Log-Hadamard matrix operations.
    Hadamard {
        #[command(subcommand)]
        op: HadamardOp,
    },
    /// The 2p x 2p log-Hadamard matrix built from a nonsquare n.
    Brock {
        #[arg(long)]
        p: u32,
        #[arg(long, conflicts_with = "rank4")]
        n: Option<u32>,
        /// Use n = p - 1, which gives rank 4 (needs p ≡ 3 mod 4).
        #[arg(long)]
        rank4: bool,
    },
    /// Non-tiling spectral sets of size 2p with their certificate.
    Counterexample {
        #[arg(long)]
        p: u32,
    },
    /// Davey matrices.
    Davey {
        #[command(subcommand)]
        op: DaveyOp,
    },
    /// Exhaustive verification runs.
    Fuglede {
        #[command(subcommand)]
        op: FugledeOp,
    },
    /// Balanced vectors.
    Balanced {
        #[command(subcommand)]
        op: BalancedOp,
    },
    /// Run the whole verification suite and write a markdown report.
    #[command(name = "reproduce", visible_alias = "reproduce-paper")]
    Reproduce {
        /// Report path; printed to stdout when omitted.
        #[arg(long)]
        output: Option<PathBuf>,
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
        /// Only these criteria (comma separated).
        #[arg(long, value_delimiter = ',')]
        only: Vec<u8>,
    },
}

#[derive(Debug, Subcommand)]
pub enum HadamardOp {
    Check(MatrixArg),
    Dephase(MatrixArg),
    SpecialDephase(MatrixArg),
    Rank(MatrixArg),
    /// Factor into a spectral pair in Z_p^k, k = rank.
    Factor(MatrixArg),
}

#[derive(Debug, Args)]
pub struct MatrixArg {
    /// Matrix document, `-` for stdin.
    #[arg(long, default_value = "-")]
    pub matrix: PathBuf,
}

#[derive(Debug, Subcommand)]
pub enum DaveyOp {
    Check(MatrixArg),
    Decompose(MatrixArg),
    Enumerate {
        #[arg(long)]
        p: u32,
        #[arg(long)]
        m: u64,
    },
    /// The matrix counting pairs (x_k, y_k) with y − x on each diagonal.
    FromRows {
        #[arg(long)]
        p: u32,
        #[arg(long, value_delimiter = ',', required = true)]
        x: Vec<u32>,
        #[arg(long, value_delimiter = ',', required = true)]
        y: Vec<u32>,
    },
}

#[derive(Debug, Subcommand)]
pub enum FugledeOp {
    /// Compare tiling and spectrality over every set containing 0.
    Brute {
        #[arg(long)]
        p: u32,
        #[arg(long)]
        d: usize,
        /// Examine every size, not only those a tiling or spectral set can have.
        #[arg(long)]
        all_sizes: bool,
    },
    /// Tiling ⟺ spectral in Z_p^3 via special dephased matrices.
    Dim3 {
        #[arg(long)]
        p: u32,
        /// Search even where no proof strategy is known (p ≥ 5).
        #[arg(long)]
        attempt: bool,
    },
}

#[derive(Debug, Subcommand)]
pub enum BalancedOp {
    Check(VectorArg),
    /// The elementary symmetric polynomial test.
    Certificate(VectorArg),
}

#[derive(Debug, Args)]
pub struct VectorArg {
    #[arg(long)]
    pub p: u32,
    #[arg(long, value_delimiter = ',', required = true, allow_hyphen_values = true)]
    pub vector: Vec<i64>,
}

/// Text for standard output plus the exit status.
#[derive(Debug)]
pub struct Outcome {
    pub stdout: String,
    pub status: Status,
}

impl Outcome {
    fn json(value: &impl serde::Serialize, holds: bool) -> Self {
        Self {
            stdout: canonical_json(value),
            status: if holds { Status::Holds } else { Status::Refuted },
        }
    }
}

fn prime(p: u32) -> Result<PrimeModulus, CliError> {
    Ok(PrimeModulus::new(p)?)
}

fn set_doc(set: &PointSet, label: &str) -> SetDocument {
    SetDocument::from_set(set, Some(label.to_string()))
}

fn pair_doc(pair: &SpectralPairRecord) -> Value {
    json!({
        "set": set_doc(&pair.set, "E"),
        "spectrum": set_doc(&pair.spectrum, "B"),
        "set_rows": pair.set_rows,
        "spectrum_rows": pair.spectrum_rows,
        "dot_matrix": MatrixDocument::from_matrix(&pair.dot_matrix),
    })
}

fn search_outcome(report: &SearchReport) -> Outcome {
    Outcome {
        stdout: canonical_json(report),
        status: match report.verdict {
            Verdict::Proven => Status::Holds,
            Verdict::Refuted { .. } => Status::Refuted,
            Verdict::BudgetExceeded => Status::Inconclusive,
        },
    }
}

fn budget_exceeded(nodes: u64, what: &str) -> Outcome {
    Outcome {
        stdout: canonical_json(&json!({ "outcome": "budget_exceeded", "nodes": nodes, "search": what })),
        status: Status::Inconclusive,
    }
}

fn read_davey(arg: &MatrixArg) -> Result<Vec<Vec<u64>>, CliError> {
    let source = arg.matrix.display().to_string();
    let value: Value = parse_document(&read_source(&arg.matrix)?, &source)?;
    let entries = match value.get("entries") {
        Some(e) => e.clone(),
        None => value,
    };
    serde_json::from_value(entries).map_err(|e| CliError::document(&source, "/entries", e))
}

fn residues(p: PrimeModulus, v: &[i64]) -> Vec<u32> {
    v.iter().map(|&x| p.reduce(x)).collect()
}

pub fn run(cli: &Cli) -> Result<Outcome, CliError> {
    if let Some(t) = cli.limits.threads {
        // only the first call in a process can size the global pool
        let _ = rayon::ThreadPoolBuilder::new().num_threads(t).build_global();
    }
    let budget = cli.limits.budget()?;
    match &cli.command {
        Command::CheckTiling { set, partner, k } => {
            let e = read_set(set)?;
            match partner {
                Some(path) => {
                    let a = read_set(path)?;
                    let verdict = is_k_tiling_verdict(&e, &a, *k)?;
                    let mut out = json!({ "k": k, "verdict": verdict });
                    if *k == 1 && e.len() * a.len() == e.ambient().order() {
                        out["conditions"] =
                            serde_json::to_value(tiling_conditions_crosscheck(&e, &a)?).expect("conditions serialize");
                    }
                    Ok(Outcome::json(&out, verdict.is_tiling))
                }
                None => {
                    if *k != 1 {
                        return Err(CliError::Usage("--k needs --partner".into()));
                    }
                    match find_tiling_partner(&e, budget) {
                        Ok(found) => {
                            let holds = found.partner().is_some();
                            let out = match &found {
                                PartnerSearch::Found { partner, subspace } => json!({
                                    "outcome": "found",
                                    "partner": set_doc(partner, "A"),
                                    "subspace": subspace,
                                }),
                                PartnerSearch::ProvenNone { reason } => {
                                    json!({ "outcome": "proven_none", "reason": reason })
                                }
                            };
                            Ok(Outcome::json(&out, holds))
                        }
                        Err(CoreError::BudgetExceeded { nodes }) => Ok(budget_exceeded(nodes, "tiling partner")),
                        Err(e) => Err(e.into()),
                    }
                }
            }
        }
        Command::CheckSpectral { set, spectrum } => {
            let e = read_set(set)?;
            match spectrum {
                Some(path) => {
                    let b = read_set(path)?;
                    let verdict = is_spectral_pair(&e, &b)?;
                    Ok(Outcome::json(&verdict, verdict.is_spectral))
                }
                None => match spectrum_search(&e, budget) {
                    Ok(found) => {
                        let out = match &found {
                            SpectrumSearch::Found { spectrum } => {
                                json!({ "outcome": "found", "spectrum": set_doc(spectrum, "B") })
                            }
                            SpectrumSearch::ProvenNone => json!({ "outcome": "proven_none" }),
                        };
                        Ok(Outcome::json(&out, found.spectrum().is_some()))
                    }
                    Err(CoreError::BudgetExceeded { nodes }) => Ok(budget_exceeded(nodes, "spectrum")),
                    Err(e) => Err(e.into()),
                },
            }
        }
        Command::Hadamard { op } => hadamard(op),
        Command::Brock { p, n, rank4 } => {
            let p = prime(*p)?;
            let n = match n {
                Some(n) => *n,
                None => default_nonsquare(p, *rank4)?,
            };
            let l = brock_matrix(p, n)?;
            let span = brock_spanning_vectors(p, n)?;
            let out = json!({
                "p": p.get(),
                "n": n,
                "rank": l.rank(),
                "matrix": MatrixDocument::from_matrix(l.matrix.matrix()),
                "certificate": span.certificate,
            });
            Ok(Outcome::json(&out, span.certificate.passed()))
        }
        Command::Counterexample { p } => {
            let b = verify_theorem_main2(prime(*p)?)?;
            let instance = |i: &fuglede_core::constructions::CounterexampleInstance| json!({ "dim": i.dim, "n": i.n, "rank": i.rank, "pair": pair_doc(&i.pair) });
            let out = json!({
                "p": b.p,
                "explicit": b.explicit.as_ref().map(pair_doc),
                "dim5": instance(&b.dim5),
                "dim4": b.dim4.as_ref().map(instance),
                "certificate": b.certificate,
            });
            Ok(Outcome::json(&out, b.proven()))
        }
        Command::Davey { op } => davey(op, budget),
        Command::Fuglede { op } => match op {
            FugledeOp::Brute { p, d, all_sizes } => {
                let filter = if *all_sizes {
                    SizeFilter::All
                } else {
                    SizeFilter::AdmissibleSizes
                };
                Ok(search_outcome(&brute_force_fuglede(prime(*p)?, *d, filter, budget)?))
            }
            FugledeOp::Dim3 { p, attempt } => Ok(search_outcome(&verify_fuglede_dim3(prime(*p)?, *attempt, budget)?)),
        },
        Command::Balanced { op } => match op {
            BalancedOp::Check(v) => {
                let p = prime(v.p)?;
                let r = residues(p, &v.vector);
                let b = is_balanced(p, &r);
                Ok(Outcome::json(&json!({ "p": p.get(), "vector": r, "balanced": b }), b))
            }
            BalancedOp::Certificate(v) => {
                let p = prime(v.p)?;
                let c = balanced_certificate(p, &residues(p, &v.vector))?;
                Ok(Outcome::json(&c, c.pass()))
            }
        },
        Command::Reproduce { output, seed, only } => {
            for id in only {
                if !CRITERIA.iter().any(|(i, _)| i == id) {
                    return Err(CliError::Usage(format!(
                        "no criterion {id}; valid ids are 1 to {}",
                        CRITERIA.len()
                    )));
                }
            }
            let outcomes: Vec<_> = CRITERIA
                .iter()
                .filter(|(id, _)| only.is_empty() || only.contains(id))
                .map(|&(id, _)| run_criterion(id, *seed))
                .collect();
            let report = markdown_report(&outcomes);
            let all = outcomes.iter().all(|o| o.passed());
            let stdout = match output {
                Some(path) => {
                    std::fs::write(path, &report).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
                    let summary: Vec<Value> = outcomes
                        .iter()
                        .map(|o| json!({ "id": o.id, "claim": o.title, "passed": o.passed() }))
                        .collect();
                    canonical_json(&json!({ "report": path.display().to_string(), "criteria": summary }))
                }
                None => report,
            };
            Ok(Outcome {
                stdout,
                status: if all { Status::Holds } else { Status::Refuted },
            })
        }
    }
}

fn hadamard(op: &HadamardOp) -> Result<Outcome, CliError> {
    let (HadamardOp::Check(arg)
    | HadamardOp::Dephase(arg)
    | HadamardOp::SpecialDephase(arg)
    | HadamardOp::Rank(arg)
    | HadamardOp::Factor(arg)) = op;
    let m = read_matrix(&arg.matrix)?;
    match op {
        HadamardOp::Check(_) => {
            let c = is_log_hadamard(&m)?;
            Ok(Outcome::json(&c, c.is_log_hadamard))
        }
        HadamardOp::Rank(_) => Ok(Outcome::json(&m.rank(), true)),
        HadamardOp::Dephase(_) => {
            let d = dephase(&LogHadamard::new(m)?);
            Ok(Outcome::json(
                &json!({ "matrix": MatrixDocument::from_matrix(d.matrix()) }),
                true,
            ))
        }
        HadamardOp::SpecialDephase(_) => {
            let s = special_dephase(&LogHadamard::new(m)?)?;
            let out = json!({
                "matrix": MatrixDocument::from_matrix(s.matrix.matrix()),
                "row_order": s.row_order,
                "column_order": s.column_order,
                "rank": s.rank,
            });
            Ok(Outcome::json(&out, true))
        }
        HadamardOp::Factor(_) => Ok(Outcome::json(&pair_doc(&factor_log_hadamard(&m)?), true)),
    }
}

fn davey(op: &DaveyOp, budget: Budget) -> Result<Outcome, CliError> {
    match op {
        DaveyOp::Check(arg) => {
            let c = is_davey(&read_davey(arg)?)?;
            Ok(Outcome::json(&c, c.is_davey))
        }
        DaveyOp::Decompose(arg) => {
            let x = DaveyMatrix::new(read_davey(arg)?)?;
            match decompose_davey(&x) {
                Ok(d) => Ok(Outcome::json(&json!({ "matrix": x, "decomposition": d }), true)),
                Err(CoreError::NotDecomposable(why)) => {
                    Ok(Outcome::json(&json!({ "matrix": x, "not_decomposable": why }), false))
                }
                Err(e) => Err(e.into()),
            }
        }
        DaveyOp::Enumerate { p, m } => {
            let meter = fuglede_core::budget::Meter::new(budget);
            match enumerate_davey(prime(*p)?, *m, &meter) {
                Ok(all) => Ok(Outcome::json(
                    &json!({ "p": p, "weight": m, "count": all.len(), "matrices": all }),
                    true,
                )),
                Err(CoreError::BudgetExceeded { nodes }) => Ok(budget_exceeded(nodes, "davey matrices")),
                Err(e) => Err(e.into()),
            }
        }
        DaveyOp::FromRows { p, x, y } => {
            let x = davey_from_rows(prime(*p)?, x, y)?;
            Ok(Outcome::json(&x, true))
        }
    }
}
