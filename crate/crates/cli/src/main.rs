use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::Context;
use clap::{Args, Parser, Subcommand, ValueEnum};
use log::info;

use ldpc_audit::circuit::{encode_decomposition, encode_pseudo_tree, verify_encoder, MAX_EXHAUSTIVE_INPUTS};
use ldpc_audit::counterexample::{
    build_an, build_bn, build_dn, build_mn, build_sn, verify_lemma_valid_choices, verify_theorem,
};
use ldpc_audit::decompose::{check_conservation, decompose, DecomposeEvent};
use ldpc_audit::experiments::{run_ensemble, to_csv, EnsembleParams};
use ldpc_audit::gf2::io::{read_matrix, write_alist};
use ldpc_audit::peel::classify;
use ldpc_audit::{BitMatrix, BitVec, ChoicePolicy, DecomposeOptions, SubSelection, VerifyMode};

/// Overcount fraction required by `experiment --check`; an artifact choice, not a published number.
const OVERCOUNT_THRESHOLD: f64 = 0.8;

const EXIT_VERIFY: u8 = 2;
const EXIT_INPUT: u8 = 3;

#[derive(Parser)]
#[command(name = "ldpc-audit", version, about = "Audit greedy stopping-set decomposition encoders for LDPC codes")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write the counterexample matrix M_n in alist format.
    Generate {
        #[arg(long = "N")]
        big_n: usize,
        /// Also write A_n, S_n, D_n and B_n; --out is then a directory.
        #[arg(long)]
        blocks: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Decompose a matrix and write the JSON report.
    Decompose {
        input: PathBuf,
        #[command(flatten)]
        policy: PolicyArgs,
        #[arg(long, default_value_t = 32)]
        depth_limit: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run the decomposition on M_18 and narrate each step.
    TraceM18 {
        #[command(flatten)]
        policy: PolicyArgs,
        #[arg(long)]
        json: bool,
    },
    /// Check the counterexample claims for M_n, or the composed encoder of a matrix file.
    Verify {
        #[arg(long = "N", conflicts_with = "input")]
        big_n: Option<usize>,
        #[arg(long)]
        input: Option<PathBuf>,
        /// Sample this many messages instead of enumerating all of them.
        #[arg(long)]
        samples: Option<usize>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        json: bool,
    },
    /// Build an encoder circuit; optionally encode one message.
    Encode {
        input: PathBuf,
        /// Message bits as a 0/1 string.
        #[arg(long)]
        message: Option<String>,
        /// Encode a non-pseudo-tree through the decomposition.
        #[arg(long)]
        force: bool,
        /// Write the circuit JSON here.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Decompose random regular matrices and report how often the count overshoots.
    Experiment {
        #[arg(long, default_value_t = 300)]
        n: usize,
        #[arg(long, default_value_t = 3)]
        dv: usize,
        #[arg(long, default_value_t = 6)]
        dc: usize,
        #[arg(long, default_value_t = 50)]
        trials: usize,
        #[arg(long, default_value_t = 42)]
        seed: u64,
        /// Record per-trial wall time (makes output nondeterministic).
        #[arg(long)]
        timed: bool,
        /// Per-trial CSV path.
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        json: bool,
        /// Exit with status 2 if the overcount fraction is below the threshold.
        #[arg(long)]
        check: bool,
    },
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum PolicyName {
    InOrder,
    #[value(alias = "lightest-first-index")]
    LightestFirst,
    Random,
}

#[derive(Args)]
struct PolicyArgs {
    #[arg(long, value_enum, default_value = "in-order")]
    policy: PolicyName,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

impl PolicyArgs {
    fn resolve(&self) -> ChoicePolicy {
        match self.policy {
            PolicyName::InOrder => ChoicePolicy::InOrder,
            PolicyName::LightestFirst => ChoicePolicy::LightestFirstIndex,
            PolicyName::Random => {
                println!("seed: {}", self.seed);
                ChoicePolicy::SeededRandom { seed: self.seed }
            }
        }
    }
}

enum Failure {
    Verify(String),
    Input(anyhow::Error),
}

impl From<anyhow::Error> for Failure {
    fn from(e: anyhow::Error) -> Self {
        Failure::Input(e)
    }
}

impl From<ldpc_audit::Error> for Failure {
    fn from(e: ldpc_audit::Error) -> Self {
        Failure::Input(e.into())
    }
}

type Outcome = Result<(), Failure>;

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::new().filter_or("LDPC_AUDIT_LOG", "warn")).init();
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Generate { big_n, blocks, out } => generate(big_n, blocks, out.as_deref()),
        Command::Decompose {
            input,
            policy,
            depth_limit,
            out,
        } => cmd_decompose(&input, policy.resolve(), depth_limit, out.as_deref()),
        Command::TraceM18 { policy, json } => trace_m18(policy.resolve(), json),
        Command::Verify {
            big_n,
            input,
            samples,
            seed,
            json,
        } => {
            let mode = samples.map(|count| VerifyMode::Sampled { count, seed });
            match (big_n, input) {
                (Some(n), _) => verify_family(n, mode, json),
                (None, Some(path)) => verify_file(&path, mode, json),
                (None, None) => Err(Failure::Input(anyhow::anyhow!("verify needs --N or --input"))),
            }
        }
        Command::Encode {
            input,
            message,
            force,
            out,
        } => encode(&input, message.as_deref(), force, out.as_deref()),
        Command::Experiment {
            n,
            dv,
            dc,
            trials,
            seed,
            timed,
            out,
            json,
            check,
        } => experiment(EnsembleParams { n, dv, dc, trials, seed }, timed, out.as_deref(), json, check),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Verify(claim)) => {
            eprintln!("verification failed: {claim}");
            ExitCode::from(EXIT_VERIFY)
        }
        Err(Failure::Input(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(EXIT_INPUT)
        }
    }
}

fn load(path: &Path) -> anyhow::Result<BitMatrix> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    read_matrix(&text).with_context(|| format!("parsing {}", path.display()))
}

fn emit(text: &str, out: Option<&Path>) -> anyhow::Result<()> {
    match out {
        Some(p) => fs::write(p, text).with_context(|| format!("writing {}", p.display())),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn generate(big_n: usize, blocks: bool, out: Option<&Path>) -> Outcome {
    let m = build_mn(big_n).map_err(|e| anyhow::anyhow!("{e}; N must be odd"))?;
    if !blocks {
        emit(&write_alist(&m), out)?;
        return Ok(());
    }
    let dir = out.ok_or_else(|| anyhow::anyhow!("--blocks needs --out DIR"))?;
    fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    let files = [
        ("M_n", m),
        ("A_n", build_an(big_n)?),
        ("S_n", build_sn(big_n)?),
        ("D_n", build_dn(big_n)?),
        ("B_n", build_bn(big_n)?),
    ];
    for (name, mat) in files {
        let p = dir.join(format!("{name}.alist"));
        fs::write(&p, write_alist(&mat)).with_context(|| format!("writing {}", p.display()))?;
        info!("wrote {}", p.display());
    }
    Ok(())
}

fn cmd_decompose(input: &Path, policy: ChoicePolicy, depth_limit: usize, out: Option<&Path>) -> Outcome {
    let m = load(input)?;
    let opts = DecomposeOptions {
        depth_limit,
        ..DecomposeOptions::with_policy(policy)
    };
    let report = decompose(&m, opts)?;
    if let Err(e) = check_conservation(&m, &report) {
        return Err(Failure::Verify(format!("conservation: {e}")));
    }
    emit(&(report.to_json() + "\n"), out)?;
    Ok(())
}

fn trace_m18(policy: ChoicePolicy, json: bool) -> Outcome {
    let m = build_mn(1)?;
    let report = decompose(&m, DecomposeOptions::with_policy(policy))?;
    if json {
        println!("{}", report.to_json());
        return Ok(());
    }
    println!("M_18: {}x{}, rank {}, dim Ker = {}", m.rows(), m.cols(), m.cols() - report.kernel_dim, report.kernel_dim);
    println!("policy: {policy}");
    let top = &report.recursion_log;
    let step_notes = event_notes(&report.events);
    let mut residual = SubSelection::full(&m);
    for call in &top.finder_calls {
        let rows: Vec<String> = call.rows.iter().map(|r| r.to_string()).collect();
        let sel = SubSelection {
            row_ids: call.rows.iter().filter_map(|r| input_index(r)).collect(),
            col_ids: call.cols.clone(),
        };
        let kind = match m.submatrix(&residual).ok().and_then(|_| classify(&restrict(&m, &residual), &local(&residual, &sel)).ok()) {
            Some(c) => format!("{:?}", c.kind).to_uppercase(),
            None if call.is_residual => "residual".into(),
            None => "not a (P)ESS".into(),
        };
        let kind = if call.is_residual { format!("residual, {kind}") } else { kind };
        println!(
            "step {}: finder returns M({{{}}}, {{{}}}) [{kind}]",
            call.step,
            rows.join(","),
            fmt_cols(&call.cols),
        );
        for line in step_notes.get(&call.step).into_iter().flatten() {
            println!("  {line}");
        }
        residual.row_ids.retain(|i| !sel.row_ids.contains(i) && call.removed.and_then(|r| input_index(&r)) != Some(*i));
        residual.col_ids.retain(|j| !sel.col_ids.contains(j));
    }
    println!("components:");
    for (i, c) in report.components.iter().enumerate() {
        let rows: Vec<String> = c.rows.iter().map(|r| r.to_string()).collect();
        println!(
            "  {}: rows {{{}}} cols {{{}}} kind {} rank {} k_{} = {}",
            i + 1,
            rows.join(","),
            fmt_cols(&c.col_ids),
            serde_json::to_value(&c.kind).ok().and_then(|v| v["kind"].as_str().map(String::from)).unwrap_or_default(),
            c.rank,
            i + 1,
            c.k_i
        );
    }
    println!("sum k_i = {}, dim Ker = {}: {}", report.sum_k, report.kernel_dim, report.verdict);
    Ok(())
}

/// Narrative lines per top-level step; events of recursive calls go to the step that triggered them.
fn event_notes(events: &[DecomposeEvent]) -> std::collections::BTreeMap<usize, Vec<String>> {
    let mut notes: std::collections::BTreeMap<usize, Vec<String>> = Default::default();
    let mut step = 0;
    for e in events {
        let line = match e {
            DecomposeEvent::Dependency {
                call,
                step: s,
                c_prime,
                left_kernel_dim,
            } => {
                if *call == 0 {
                    step = *s;
                }
                let c: Vec<String> = c_prime.iter().map(|r| r.to_string()).collect();
                format!("C' = {{{}}} (left kernel dimension {left_kernel_dim}, call {call})", c.join(","))
            }
            DecomposeEvent::Transferred { row, into } => {
                format!("remove {row}; add {into} to the previous component and decompose it again")
            }
            DecomposeEvent::Discarded { row } => format!("remove {row}; no previous component, constraint discarded"),
            DecomposeEvent::ColumnWeightExceeded { call, column, weight } => {
                format!("call {call}: column {} has weight {weight}", column + 1)
            }
        };
        notes.entry(step).or_default().push(line);
    }
    notes
}

fn input_index(r: &ldpc_audit::decompose::RowLabel) -> Option<usize> {
    match r {
        ldpc_audit::decompose::RowLabel::Input(i) => Some(*i),
        ldpc_audit::decompose::RowLabel::Synthesized(_) => None,
    }
}

fn restrict(m: &BitMatrix, residual: &SubSelection) -> BitMatrix {
    m.submatrix(residual).expect("residual indices are valid")
}

/// Re-indexes `sel` into positions of `residual`.
fn local(residual: &SubSelection, sel: &SubSelection) -> SubSelection {
    let pos = |ids: &[usize], x: usize| ids.iter().position(|&y| y == x).unwrap_or(usize::MAX);
    SubSelection {
        row_ids: sel.row_ids.iter().map(|&i| pos(&residual.row_ids, i)).collect(),
        col_ids: sel.col_ids.iter().map(|&j| pos(&residual.col_ids, j)).collect(),
    }
}

fn fmt_cols(cols: &[usize]) -> String {
    let mut sorted = cols.to_vec();
    sorted.sort_unstable();
    let contiguous = sorted.windows(2).all(|w| w[1] == w[0] + 1);
    match (sorted.first(), sorted.last()) {
        (Some(a), Some(b)) if contiguous && sorted.len() > 2 => format!("{}..{}", a + 1, b + 1),
        _ => sorted.iter().map(|j| (j + 1).to_string()).collect::<Vec<_>>().join(","),
    }
}

fn status(ok: bool) -> &'static str {
    if ok {
        "PASS"
    } else {
        "FAIL"
    }
}

fn verify_family(big_n: usize, mode: Option<VerifyMode>, json: bool) -> Outcome {
    let theorem = verify_theorem(big_n)?;
    let lemma = verify_lemma_valid_choices(big_n)?;
    let m = build_mn(big_n)?;
    let report = decompose(&m, DecomposeOptions::default())?;
    let encoder = encode_decomposition(&report)?;
    let verdict = verify_encoder(&m, &encoder.circuit, pick_mode(mode, encoder.circuit.input_count(), json))?;
    let refuted = verdict.witness().is_some_and(|w| {
        let x = encoder.circuit.evaluate(w).expect("witness length matches");
        !m.mul_vec(&x).is_zero()
    });
    if json {
        let value = serde_json::json!({
            "schema_version": ldpc_audit::SCHEMA_VERSION,
            "theorem": theorem,
            "lemma": lemma,
            "encoder": verdict,
        });
        println!("{}", serde_json::to_string_pretty(&value).expect("serializable"));
    }
    let lines = [
        (
            "Theorem item 1",
            theorem.item1(),
            "in-order finder returns A_n".to_string(),
        ),
        (
            "Theorem item 2",
            theorem.item2(),
            format!("dim Ker(M_n) = {} <= {}", theorem.dim_ker_mn, theorem.dim_ker_mn_bound),
        ),
        (
            "Theorem item 3",
            theorem.item3(),
            format!("dim Ker(A_n) = {} >= {}", theorem.dim_ker_an, theorem.dim_ker_an_bound),
        ),
        (
            "Corollary",
            theorem.corollary(),
            format!("sum k_i = {} > dim Ker(M_n) = {}", theorem.sum_k, theorem.dim_ker_mn),
        ),
        (
            "Lemma",
            lemma.passed(),
            match lemma.first_violation {
                Some(t) => format!("first violated iteration t = {t}"),
                None => format!("{} iterations valid", lemma.iterations.len()),
            },
        ),
        (
            "Encoder refuted",
            refuted,
            format!("{} inputs, witness found: {}", encoder.circuit.input_count(), verdict.witness().is_some()),
        ),
    ];
    let mut failed = Vec::new();
    for (name, ok, detail) in lines {
        if !json {
            println!("{} {name}: {detail}", status(ok));
        }
        if !ok {
            failed.push(name);
        }
    }
    if failed.is_empty() {
        Ok(())
    } else {
        Err(Failure::Verify(failed.join(", ")))
    }
}

/// Exhaustive when affordable, otherwise 1024 sampled messages.
fn pick_mode(requested: Option<VerifyMode>, inputs: usize, quiet: bool) -> VerifyMode {
    requested.unwrap_or_else(|| {
        if inputs <= MAX_EXHAUSTIVE_INPUTS {
            VerifyMode::Exhaustive
        } else {
            if !quiet {
                println!("{inputs} inputs: sampling 1024 messages (seed 0)");
            }
            VerifyMode::Sampled { count: 1024, seed: 0 }
        }
    })
}

fn verify_file(path: &Path, mode: Option<VerifyMode>, json: bool) -> Outcome {
    let m = load(path)?;
    let report = decompose(&m, DecomposeOptions::default())?;
    let encoder = encode_decomposition(&report)?;
    let verdict = verify_encoder(&m, &encoder.circuit, pick_mode(mode, encoder.circuit.input_count(), json))?;
    if json {
        println!("{}", serde_json::to_string_pretty(&verdict).expect("serializable"));
    } else {
        println!(
            "{} encoder: {} inputs, dim Ker = {}, sum k_i = {} ({})",
            status(verdict.encodes()),
            encoder.circuit.input_count(),
            report.kernel_dim,
            report.sum_k,
            report.verdict
        );
        if let Some(w) = verdict.witness() {
            println!("witness message: {w}");
        }
    }
    if verdict.encodes() {
        Ok(())
    } else {
        Err(Failure::Verify("composed encoder image differs from Ker(M)".into()))
    }
}

fn encode(input: &Path, message: Option<&str>, force: bool, out: Option<&Path>) -> Outcome {
    let m = load(input)?;
    let circuit = match encode_pseudo_tree(&m) {
        Ok(c) => c,
        Err(ldpc_audit::Error::NotPseudoTree { rows }) if !force => {
            let listed: Vec<String> = rows.iter().map(|r| (r + 1).to_string()).collect();
            return Err(Failure::Input(anyhow::anyhow!(
                "matrix is not a pseudo-tree: rows {{{}}} survive peeling and contain an ESS or PESS; \
                 rerun with --force to encode through the decomposition",
                listed.join(",")
            )));
        }
        Err(ldpc_audit::Error::NotPseudoTree { .. }) => {
            encode_decomposition(&decompose(&m, DecomposeOptions::default())?)?.circuit
        }
        Err(e) => return Err(e.into()),
    };
    println!("inputs: {}, gates: {}", circuit.input_count(), circuit.size());
    if let Some(p) = out {
        fs::write(p, circuit.to_json()).with_context(|| format!("writing {}", p.display()))?;
    }
    if let Some(bits) = message {
        let w = BitVec::parse_bits(bits).ok_or_else(|| anyhow::anyhow!("message must be a 0/1 string"))?;
        let x = circuit.evaluate(&w)?;
        println!("codeword: {x}");
        println!("syndrome zero: {}", m.mul_vec(&x).is_zero());
    }
    Ok(())
}

fn experiment(params: EnsembleParams, timed: bool, out: Option<&Path>, json: bool, check: bool) -> Outcome {
    println!("seed: {}", params.seed);
    let result = run_ensemble(&params, timed)?;
    if let Some(p) = out {
        fs::write(p, to_csv(&result.trials)).with_context(|| format!("writing {}", p.display()))?;
    }
    let s = &result.summary;
    if json {
        println!("{}", serde_json::to_string_pretty(&result).expect("serializable"));
    } else {
        println!(
            "n = {}, ({}, {})-regular, {} trials completed, {} failed",
            params.n, params.dv, params.dc, s.completed, s.failed
        );
        println!("overcount fraction: {:.3} ({} of {})", s.overcount_fraction, s.overcount, s.completed);
        println!("mean dim Ker(first component) - dim Ker(M): {:.3}", s.mean_first_excess);
        for (excess, count) in &s.first_excess_histogram {
            println!("  excess {excess:>4}: {count}");
        }
    }
    let ok = s.overcount_fraction >= OVERCOUNT_THRESHOLD;
    println!(
        "{} overcount fraction >= {OVERCOUNT_THRESHOLD} (threshold is an artifact choice)",
        status(ok)
    );
    if check && !ok {
        return Err(Failure::Verify("overcount fraction below threshold".into()));
    }
    Ok(())
}
