use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use bellgraph::analysis::{
    bell_value_from_records, load_ghz_summaries, load_measurements, measurements_to_csv, scaling_table,
    scaling_to_csv, select_bound, BoundMethod, ScalingSource, Target, ViolationReport,
};
use bellgraph::bell::{mk_beta, mk_closed_form, mk_recursive, MeasurementSetting, SignedPauliSum};
use bellgraph::lhv::{mk_bound, mk_bound_bruteforce, LhvBound};
use bellgraph::noise::{simulate_records, NoiseSpec};
use bellgraph::stabilizer::{graph_generators, stabilizer_group};
use bellgraph::{Error, Result};
use clap::{Parser, Subcommand, ValueEnum};
use serde_json::json;

#[derive(Parser)]
#[command(name = "bellgraph", version, about = "Stabilizer Bell inequalities for graph states")]
struct Cli {
    /// Output format.
    #[arg(long, value_enum, default_value_t = Format::Text, global = true)]
    format: Format,

    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
    Csv,
}

#[derive(Subcommand)]
enum Command {
    /// List generators and all stabilizer elements of a graph state.
    Stabilizers {
        #[arg(long)]
        graph: String,
    },
    /// Print the Pauli expansion of a graph or Mermin-Klyshko Bell operator.
    Bellop {
        #[arg(long, required_unless_present = "mk", conflicts_with = "mk")]
        graph: Option<String>,
        /// Mermin-Klyshko operator with x/y settings.
        #[arg(long, requires = "n")]
        mk: bool,
        #[arg(long)]
        n: Option<usize>,
    },
    /// LHV bound D of a graph Bell operator.
    Bound {
        #[arg(long)]
        graph: String,
        #[arg(long, default_value = "auto", value_parser = ["auto", "brute", "ghz", "formula", "product"])]
        method: String,
        /// Pin all Z outcomes to +1.
        #[arg(long)]
        restrict_z: bool,
    },
    /// Mermin-Klyshko operator summary and LHV bound.
    Mk {
        #[arg(long)]
        n: usize,
        /// Also enumerate all 4^n outcome assignments (n ≤ 12).
        #[arg(long)]
        brute_force: bool,
    },
    /// Bell value, bound and verdict from a measurement file.
    Analyze {
        #[arg(long)]
        graph: String,
        #[arg(long)]
        measurements: PathBuf,
        #[arg(long, default_value = "auto", value_parser = ["auto", "brute", "ghz", "formula", "product"])]
        method: String,
        #[arg(long)]
        restrict_z: bool,
    },
    /// Sample stabilizer measurements of a depolarized graph state.
    Simulate {
        #[arg(long)]
        graph: String,
        /// Per-qubit retention probability p.
        #[arg(long, default_value_t = 1.0)]
        noise: f64,
        #[arg(long, default_value_t = 1000)]
        shots: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Write CSV records here instead of standard output.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Relative violations of GHZ states against n.
    Scaling {
        #[arg(long, default_value_t = 2)]
        from: usize,
        #[arg(long, default_value_t = 14)]
        to: usize,
        /// Depolarizing retention p instead of ideal states.
        #[arg(long, conflicts_with = "summary")]
        noise: Option<f64>,
        /// GhzSummary CSV with measured populations and coherences.
        #[arg(long)]
        summary: Option<PathBuf>,
    },
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = e.exit_code();
            let _ = e.print();
            return ExitCode::from(code as u8);
        }
    };
    match run(cli) {
        Ok(mut out) => {
            if !out.ends_with('\n') {
                out.push('\n');
            }
            // a closed pipe (e.g. `| head`) is not an error
            let _ = std::io::stdout().lock().write_all(out.as_bytes());
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

fn run(cli: Cli) -> Result<String> {
    let f = cli.format;
    match cli.command {
        Command::Stabilizers { graph } => stabilizers(&Target::resolve(&graph)?, f),
        Command::Bellop { graph, mk, n } => {
            if mk {
                let n = n.expect("clap enforces --n");
                let op = mk_recursive(&MeasurementSetting::xy(n)?)?
                    .pauli
                    .ok_or_else(|| Error::Capacity(format!("MK expansion on {n} qubits")))?;
                Ok(sum_output(&op, f))
            } else {
                let t = Target::resolve(&graph.expect("clap enforces --graph"))?;
                Ok(sum_output(&t.bell_operator()?, f))
            }
        }
        Command::Bound {
            graph,
            method,
            restrict_z,
        } => {
            let t = Target::resolve(&graph)?;
            let b = select_bound(&t, method.parse()?, restrict_z)?;
            Ok(bound_output(t.name(), &b, f))
        }
        Command::Mk { n, brute_force } => mk(n, brute_force, f),
        Command::Analyze {
            graph,
            measurements,
            method,
            restrict_z,
        } => {
            let t = Target::resolve(&graph)?;
            let records = load_measurements(&measurements, t.n())?;
            let est = bell_value_from_records(&records, &t)?;
            let bound = select_bound(&t, method.parse::<BoundMethod>()?, restrict_z)?;
            Ok(report_output(&ViolationReport::new(t.name(), est.value, est.stderr, bound), f))
        }
        Command::Simulate {
            graph,
            noise,
            shots,
            seed,
            out,
        } => {
            let t = Target::resolve(&graph)?;
            let spec = NoiseSpec::new(noise)?;
            let records = simulate_records(&t, spec, shots, seed)?;
            let csv = measurements_to_csv(&records)?;
            match out {
                Some(path) => {
                    std::fs::write(&path, csv).map_err(|source| Error::Io {
                        path: path.clone(),
                        source,
                    })?;
                    Ok(match f {
                        Format::Json => json!({
                            "graph": t.name(),
                            "records": records.len(),
                            "out": path,
                            "noise": noise,
                            "shots": shots,
                            "seed": seed,
                        })
                        .to_string(),
                        _ => format!(
                            "wrote {} records for {} to {} (p = {noise}, shots = {shots}, seed = {seed})",
                            records.len(),
                            t.name(),
                            path.display()
                        ),
                    })
                }
                None => Ok(csv),
            }
        }
        Command::Scaling {
            from,
            to,
            noise,
            summary,
        } => {
            let source = match (noise, summary) {
                (Some(p), _) => ScalingSource::Noise(NoiseSpec::new(p)?),
                (None, Some(path)) => ScalingSource::Summaries(load_ghz_summaries(&path)?),
                (None, None) => ScalingSource::Ideal,
            };
            let rows = scaling_table(from..=to, &source)?;
            Ok(match f {
                Format::Csv => scaling_to_csv(&rows)?,
                Format::Json => serde_json::to_string_pretty(&rows).expect("rows serialize"),
                Format::Text => {
                    let mut s = format!(
                        "{:>3} {:>10} {:>12} {:>10} {:>10} {:>12} {:>10}\n",
                        "n", "F", "D(GHZ)", "graph R", "MK value", "MK bound", "MK R"
                    );
                    for r in rows {
                        s += &format!(
                            "{:>3} {:>10.6} {:>12} {:>10.6} {:>10.6} {:>12.6} {:>10.4}\n",
                            r.n,
                            r.fidelity,
                            r.graph_bound_fraction.unwrap_or_else(|| format!("{:.6}", r.graph_bound)),
                            r.graph_r,
                            r.mk_value,
                            r.mk_bound,
                            r.mk_r
                        );
                    }
                    s
                }
            })
        }
    }
}

fn stabilizers(t: &Target, f: Format) -> Result<String> {
    let group = stabilizer_group(t.graph())?;
    let words = t.stabilizer_words()?;
    let gens: Vec<String> = match t.corrections() {
        None => graph_generators(t.graph()).iter().map(|g| g.to_string()).collect(),
        Some(_) => (0..t.n()).map(|j| words[1 << j].to_string()).collect(),
    };
    Ok(match f {
        Format::Json => serde_json::to_string_pretty(&json!({
            "graph": t.name(),
            "n": t.n(),
            "generators": gens,
            "stabilizers": words.iter().map(|w| w.to_string()).collect::<Vec<_>>(),
        }))
        .expect("json"),
        Format::Csv => {
            let mut s = String::from("subset,word\n");
            for (e, w) in group.iter().zip(&words) {
                s += &format!("{:0width$b},{w}\n", e.subset, width = t.n());
            }
            s
        }
        Format::Text => {
            let mut s = format!("graph {} (n = {})\ngenerators\n", t.name(), t.n());
            for g in &gens {
                s += &format!("  {g}\n");
            }
            s += &format!("stabilizer group ({} elements)\n", words.len());
            for w in &words {
                s += &format!("  {w}\n");
            }
            s
        }
    })
}

fn sum_output(op: &SignedPauliSum, f: Format) -> String {
    match f {
        Format::Json => serde_json::to_string_pretty(&op.to_json()).expect("json"),
        Format::Csv => {
            let mut s = String::from("coeff,word\n");
            for (c, w) in op.terms() {
                s += &format!("{c},{w}\n");
            }
            s
        }
        Format::Text => op.to_string(),
    }
}

fn bound_output(graph: &str, b: &LhvBound, f: Format) -> String {
    match f {
        Format::Json => {
            let mut v = b.to_json();
            v["graph"] = json!(graph);
            serde_json::to_string_pretty(&v).expect("json")
        }
        Format::Csv => format!(
            "graph,value,fraction,kind,method,witness\n{graph},{},{},{},{},{}\n",
            b.value,
            b.fraction_string().unwrap_or_default(),
            b.kind,
            b.method,
            b.witness.map(|w| w.to_string()).unwrap_or_default()
        ),
        Format::Text => {
            let mut s = format!("graph    {graph}\nD        {b}\n");
            if let Some(w) = b.witness {
                s += &format!("witness  {w}\n");
            }
            s
        }
    }
}

fn report_output(r: &ViolationReport, f: Format) -> String {
    match f {
        Format::Json => serde_json::to_string_pretty(&r.to_json()).expect("json"),
        Format::Csv => format!(
            "graph,bell_value,stderr,bound,bound_kind,relative_violation,relative_stderr,relative_is_lower_bound,sigmas,verdict\n\
             {},{},{},{},{},{},{},{},{},{}\n",
            r.graph,
            r.bell_value,
            r.stderr,
            r.bound.value,
            r.bound.kind,
            r.relative_violation,
            r.relative_stderr,
            r.relative_is_lower_bound,
            r.sigmas,
            r.verdict
        ),
        Format::Text => r.to_string(),
    }
}

fn mk(n: usize, brute_force: bool, f: Format) -> Result<String> {
    let op = mk_closed_form(n)?;
    let bound = mk_bound(n)?;
    let brute = if brute_force { Some(mk_bound_bruteforce(n)?) } else { None };
    let quantum_r = 1.0 / bound.value;
    Ok(match f {
        Format::Json => serde_json::to_string_pretty(&json!({
            "n": n,
            "beta": mk_beta(n),
            "entries": op.entries().iter().map(|(r, c, v)| json!({"row": r, "col": c, "re": v.re, "im": v.im})).collect::<Vec<_>>(),
            "quantum_max": 1.0,
            "bound": bound.to_json(),
            "relative_violation": quantum_r,
            "brute_force": brute.as_ref().map(|b| json!({
                "value": b.bound.value,
                "max_units": b.max_units,
                "a_negative": b.a_negative,
                "a_prime_negative": b.a_prime_negative,
            })),
        }))
        .expect("json"),
        Format::Csv => {
            let mut s = String::from("n,beta,quantum_max,bound,relative_violation,brute_force\n");
            s += &format!(
                "{n},{},1,{},{quantum_r},{}\n",
                mk_beta(n),
                bound.value,
                brute.map(|b| b.bound.value.to_string()).unwrap_or_default()
            );
            s
        }
        Format::Text => {
            let mut s = format!(
                "n        {n}\nbeta     {:.6} rad\noperator e^(iβ)|1…1⟩⟨0…0| + h.c.\nquantum  1 on (|0…0⟩ + e^(iβ)|1…1⟩)/√2\nbound    {bound}\nR        {quantum_r:.6}\n",
                mk_beta(n)
            );
            if let Some(b) = brute {
                s += &format!(
                    "brute    {:.12} (max {} units of (2√2)^-(n-1))\n",
                    b.bound.value, b.max_units
                );
            }
            s
        }
    })
}
