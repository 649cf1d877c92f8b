//! Command-line frontend.
//!
//! Exit status: 0 on success or a feasible verdict, 2 on a clean infeasible
//! verdict, 1 on any error.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use indexmap::IndexMap;
use serde::Serialize;

use crate::codec::{
    decode_ak, decode_bsi, decode_multicast_block, encode_ak, encode_bsi_messages, encode_multicast_block,
    residual_stream, Bits, BsiCodebook, Codebook, EncodedBlock, COMMON_STREAM,
};
use crate::common_info::{decompose, decompose_source, PartitionExport};
use crate::error::{Error, Result};
use crate::feasibility::{
    check_ak, check_bsi, check_dmb_support, check_independent, check_multicast, check_separation,
    check_separation_l, plan_degraded_messages, FeasibilityReport, MessagePlan, PlanMode, Verdict, Witness,
    DEFAULT_GAMMA_POINTS,
};
use crate::netgraph::{LatentSource, Network};
use crate::probability::{JointPmf, SymbolSequence};
use crate::rlnc::{deliver_multicast, deliver_streams, DEFAULT_PACKET_SIZE};

#[derive(Debug, Parser)]
#[command(name = "commonnet", version, about = "Common-information analysis and coding for correlated sources on networks")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Split a joint pmf into its common part and per-source residuals.
    Decompose(DecomposeArgs),
    /// Decide feasibility of a delivery scheme.
    #[command(subcommand)]
    Check(CheckCommand),
    /// Plan message sets.
    #[command(subcommand)]
    Plan(PlanCommand),
    /// Encode, deliver over the network and decode end to end.
    #[command(subcommand)]
    Simulate(SimulateCommand),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
    Human,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModeArg {
    CommonInformation,
    ConditionalEntropy,
}

impl From<ModeArg> for PlanMode {
    fn from(m: ModeArg) -> Self {
        match m {
            ModeArg::CommonInformation => PlanMode::CommonInformation,
            ModeArg::ConditionalEntropy => PlanMode::ConditionalEntropy,
        }
    }
}

#[derive(Debug, Clone, Args)]
pub struct OutputArgs {
    #[arg(long, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    /// Write the report here instead of stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct DecomposeArgs {
    #[arg(long)]
    pub pmf: PathBuf,
    /// Variables to decompose over; defaults to all.
    #[arg(long, value_delimiter = ',')]
    pub vars: Vec<String>,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Args)]
pub struct Inputs {
    #[arg(long)]
    pub pmf: PathBuf,
    #[arg(long)]
    pub net: PathBuf,
}

#[derive(Debug, Subcommand)]
pub enum CheckCommand {
    /// Correlated multicast: every subset's conditional entropy against its cut.
    Multicast {
        #[command(flatten)]
        inputs: Inputs,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Sources compressed separately, ignoring correlation.
    Independent {
        #[command(flatten)]
        inputs: Inputs,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Two-source separation through the common part.
    Separation {
        #[command(flatten)]
        inputs: Inputs,
        /// The two source variables; defaults to the pmf's first two.
        #[arg(long, value_delimiter = ',')]
        vars: Vec<String>,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Separation through the common part of all sources.
    SeparationL {
        #[command(flatten)]
        inputs: Inputs,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Broadcast with side information; side variable i sits at terminal i.
    Bsi {
        #[command(flatten)]
        inputs: Inputs,
        #[arg(long)]
        source: String,
        #[arg(long, value_delimiter = ',', required = true)]
        side: Vec<String>,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Helper-assisted delivery of one source.
    Ak {
        #[command(flatten)]
        inputs: Inputs,
        #[arg(long)]
        source: String,
        #[arg(long)]
        helper: String,
        #[arg(long, default_value_t = DEFAULT_GAMMA_POINTS)]
        gamma_points: usize,
        #[command(flatten)]
        output: OutputArgs,
    },
}

#[derive(Debug, Subcommand)]
pub enum PlanCommand {
    /// Degraded message set for broadcast with side information.
    Dmb {
        #[arg(long)]
        pmf: PathBuf,
        #[arg(long)]
        source: String,
        #[arg(long, value_delimiter = ',', required = true)]
        side: Vec<String>,
        #[arg(long, value_enum, default_value_t = ModeArg::CommonInformation)]
        mode: ModeArg,
        /// Also check the plan's cut conditions on this network, from the
        /// source's node to the terminals in order.
        #[arg(long)]
        net: Option<PathBuf>,
        #[command(flatten)]
        output: OutputArgs,
    },
}

#[derive(Debug, Clone, Args)]
pub struct SimArgs {
    #[command(flatten)]
    pub inputs: Inputs,
    /// Block length.
    #[arg(long, default_value_t = 10_000)]
    pub n: usize,
    #[arg(long, default_value_t = 0.1)]
    pub epsilon: f64,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    #[arg(long, default_value_t = DEFAULT_PACKET_SIZE)]
    pub packet_size: usize,
    /// Write per-stream empirical rates as CSV.
    #[arg(long)]
    pub dump_rates: Option<PathBuf>,
    /// Write the transport audit log as JSON lines.
    #[arg(long)]
    pub audit: Option<PathBuf>,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Subcommand)]
pub enum SimulateCommand {
    /// All sources to all terminals through the expanded network.
    Multicast {
        #[command(flatten)]
        sim: SimArgs,
    },
    /// Degraded messages to terminals holding side information.
    Bsi {
        #[command(flatten)]
        sim: SimArgs,
        #[arg(long)]
        source: String,
        #[arg(long, value_delimiter = ',', required = true)]
        side: Vec<String>,
    },
    /// One source with a helper describing the common part.
    Ak {
        #[command(flatten)]
        sim: SimArgs,
        #[arg(long)]
        source: String,
        #[arg(long)]
        helper: String,
        /// Fraction of positions the helper describes; defaults to the
        /// feasible grid point with the most slack.
        #[arg(long)]
        gamma: Option<f64>,
        #[arg(long, default_value_t = DEFAULT_GAMMA_POINTS)]
        gamma_points: usize,
    },
}

/// A rendered report and whether the command succeeded.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub text: String,
    pub success: bool,
}

impl Outcome {
    pub fn exit_code(&self) -> i32 {
        if self.success {
            0
        } else {
            2
        }
    }
}

/// Parses arguments, runs, writes the report and returns the exit status.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match run(&cli) {
        Ok(outcome) => {
            let target = output_of(&cli.command).out.clone();
            match emit(&outcome.text, target.as_deref()) {
                Ok(()) => outcome.exit_code(),
                Err(e) => {
                    eprintln!("error: {e}");
                    1
                }
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            1
        }
    }
}

fn emit(text: &str, out: Option<&Path>) -> Result<()> {
    match out {
        Some(path) => fs::write(path, text)?,
        None => print!("{text}"),
    }
    Ok(())
}

fn output_of(cmd: &Command) -> &OutputArgs {
    match cmd {
        Command::Decompose(a) => &a.output,
        Command::Check(c) => match c {
            CheckCommand::Multicast { output, .. }
            | CheckCommand::Independent { output, .. }
            | CheckCommand::Separation { output, .. }
            | CheckCommand::SeparationL { output, .. }
            | CheckCommand::Bsi { output, .. }
            | CheckCommand::Ak { output, .. } => output,
        },
        Command::Plan(PlanCommand::Dmb { output, .. }) => output,
        Command::Simulate(s) => match s {
            SimulateCommand::Multicast { sim } | SimulateCommand::Bsi { sim, .. } | SimulateCommand::Ak { sim, .. } => {
                &sim.output
            }
        },
    }
}

fn read_pmf(path: &Path) -> Result<JointPmf> {
    JointPmf::from_json(&read(path)?)
}

fn read_net(path: &Path) -> Result<Network> {
    Network::from_json(&read(path)?)
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| Error::InvalidInput(format!("{}: {e}", path.display())))
}

/// Runs a parsed command and renders its report.
pub fn run(cli: &Cli) -> Result<Outcome> {
    match &cli.command {
        Command::Decompose(args) => {
            let pmf = read_pmf(&args.pmf)?;
            let vars = if args.vars.is_empty() {
                pmf.variables().to_vec()
            } else {
                args.vars.clone()
            };
            let report = decomposition_report(&pmf, &vars)?;
            Ok(Outcome {
                text: render_decomposition(&report, args.output.format)?,
                success: true,
            })
        }
        Command::Check(cmd) => {
            let (report, format) = match cmd {
                CheckCommand::Multicast { inputs, output } => {
                    (check_multicast(&read_net(&inputs.net)?, &read_pmf(&inputs.pmf)?)?, output.format)
                }
                CheckCommand::Independent { inputs, output } => {
                    (check_independent(&read_net(&inputs.net)?, &read_pmf(&inputs.pmf)?)?, output.format)
                }
                CheckCommand::Separation { inputs, vars, output } => {
                    let pmf = read_pmf(&inputs.pmf)?;
                    let pair = two_vars(&pmf, vars)?;
                    (
                        check_separation(&read_net(&inputs.net)?, &pmf, [&pair[0], &pair[1]])?,
                        output.format,
                    )
                }
                CheckCommand::SeparationL { inputs, output } => {
                    (check_separation_l(&read_net(&inputs.net)?, &read_pmf(&inputs.pmf)?)?, output.format)
                }
                CheckCommand::Bsi {
                    inputs,
                    source,
                    side,
                    output,
                } => (
                    check_bsi(&read_net(&inputs.net)?, &read_pmf(&inputs.pmf)?, source, side)?,
                    output.format,
                ),
                CheckCommand::Ak {
                    inputs,
                    source,
                    helper,
                    gamma_points,
                    output,
                } => (
                    check_ak(
                        &read_net(&inputs.net)?,
                        &read_pmf(&inputs.pmf)?,
                        source,
                        helper,
                        *gamma_points,
                    )?,
                    output.format,
                ),
            };
            Ok(Outcome {
                success: report.verdict != Verdict::Infeasible,
                text: render_report(&report, format)?,
            })
        }
        Command::Plan(PlanCommand::Dmb {
            pmf,
            source,
            side,
            mode,
            net,
            output,
        }) => {
            let pmf = read_pmf(pmf)?;
            let plan = plan_degraded_messages(&pmf, source, side, (*mode).into())?;
            let support = match net {
                Some(path) => {
                    let net = read_net(path)?;
                    let node = net.node_name(net.source_node(source)?).to_owned();
                    Some(check_dmb_support(&net, &plan, &node, &net.terminal_names())?)
                }
                None => None,
            };
            let success = support.as_ref().is_none_or(|r| r.verdict != Verdict::Infeasible);
            Ok(Outcome {
                text: render_plan(&plan, support.as_ref(), output.format)?,
                success,
            })
        }
        Command::Simulate(cmd) => {
            let (report, sim) = match cmd {
                SimulateCommand::Multicast { sim } => (simulate_multicast(sim)?, sim),
                SimulateCommand::Bsi { sim, source, side } => (simulate_bsi(sim, source, side)?, sim),
                SimulateCommand::Ak {
                    sim,
                    source,
                    helper,
                    gamma,
                    gamma_points,
                } => (simulate_ak(sim, source, helper, *gamma, *gamma_points)?, sim),
            };
            if let Some(path) = &sim.dump_rates {
                fs::write(path, rates_csv(&report))?;
            }
            if !report.bit_exact {
                return Err(Error::InvalidInput(format!(
                    "reconstruction mismatch at {}",
                    report
                        .terminals
                        .iter()
                        .filter(|t| !t.bit_exact)
                        .map(|t| t.terminal.as_str())
                        .collect::<Vec<_>>()
                        .join(",")
                )));
            }
            Ok(Outcome {
                text: render_simulation(&report, sim.output.format)?,
                success: true,
            })
        }
    }
}

fn two_vars(pmf: &JointPmf, vars: &[String]) -> Result<[String; 2]> {
    let chosen: Vec<String> = if vars.is_empty() {
        pmf.variables().iter().take(2).cloned().collect()
    } else {
        vars.to_vec()
    };
    chosen
        .try_into()
        .map_err(|_| Error::arg("separation needs exactly two variables"))
}

#[derive(Debug, Clone, Serialize)]
pub struct DecompositionReport {
    pub partition: PartitionExport,
    /// Named information quantities in bits.
    pub quantities: IndexMap<String, f64>,
}

pub fn decomposition_report<S: AsRef<str>>(pmf: &JointPmf, vars: &[S]) -> Result<DecompositionReport> {
    let partition = decompose(pmf, vars)?;
    let names: Vec<&str> = vars.iter().map(|v| v.as_ref()).collect();
    let mut q = IndexMap::new();
    q.insert("H(K)".to_owned(), partition.entropy());
    q.insert(format!("H({})", names.join(",")), pmf.entropy(&names)?);
    for v in &names {
        q.insert(format!("H({v})"), pmf.entropy(&[v])?);
    }
    for v in &names {
        q.insert(format!("H({v}|K)"), decompose_source(pmf, &partition, v)?.residual_entropy());
    }
    if let [a, b] = names[..] {
        q.insert(format!("H({a}|{b})"), pmf.conditional_entropy(&[a], &[b])?);
        q.insert(format!("H({b}|{a})"), pmf.conditional_entropy(&[b], &[a])?);
        q.insert(format!("I({a};{b})"), pmf.mutual_information(&[a], &[b])?);
    }
    Ok(DecompositionReport {
        partition: partition.export(),
        quantities: q,
    })
}

fn json<T: Serialize>(value: &T) -> Result<String> {
    let mut s = serde_json::to_string_pretty(value)?;
    s.push('\n');
    Ok(s)
}

fn render_decomposition(r: &DecompositionReport, format: Format) -> Result<String> {
    let mut s = String::new();
    match format {
        Format::Json => return json(r),
        Format::Csv => {
            s.push_str("component,weight,variable,members\n");
            for c in &r.partition.components {
                for (var, members) in &c.members {
                    let _ = writeln!(s, "{},{},{},{}", c.index, c.weight, var, members.join(" "));
                }
            }
        }
        Format::Human => {
            let _ = writeln!(s, "{} components over {}", r.partition.components.len(), r.partition.variables.join(", "));
            for c in &r.partition.components {
                let members: Vec<String> = c
                    .members
                    .iter()
                    .map(|(v, m)| format!("{v}={{{}}}", m.join(",")))
                    .collect();
                let _ = writeln!(s, "  K={} weight {:.6}: {}", c.index, c.weight, members.join(" "));
            }
            for (name, value) in &r.quantities {
                let _ = writeln!(s, "{name} = {value:.6}");
            }
        }
    }
    Ok(s)
}

fn render_checks(s: &mut String, report: &FeasibilityReport) {
    let _ = writeln!(s, "{}: {}", report.scheme, report.verdict);
    for c in &report.checks {
        let mark = if c.holds { "ok  " } else { "FAIL" };
        let _ = writeln!(s, "  [{mark}] {}: {:.6} vs {:.6} (slack {:.6})", c.label, c.lhs, c.rhs, c.slack);
    }
}

fn render_report(report: &FeasibilityReport, format: Format) -> Result<String> {
    let mut s = String::new();
    match format {
        Format::Json => return json(report),
        Format::Csv => {
            s.push_str("label,lhs,rhs,slack,holds\n");
            for c in &report.checks {
                let _ = writeln!(s, "\"{}\",{},{},{},{}", c.label, c.lhs, c.rhs, c.slack, c.holds);
            }
        }
        Format::Human => {
            render_checks(&mut s, report);
            match &report.witness {
                Some(Witness::LatentRates { rates }) => {
                    for (name, rate) in rates {
                        let _ = writeln!(s, "  rate {name} = {rate:.6}");
                    }
                }
                Some(Witness::HelperSweep(sweep)) => match sweep.feasible_gamma {
                    Some(g) => {
                        let _ = writeln!(s, "  first feasible gamma = {g:.6}");
                    }
                    None => s.push_str("  no feasible gamma on the grid\n"),
                },
                None => {}
            }
        }
    }
    Ok(s)
}

#[derive(Serialize)]
struct PlanOutput<'a> {
    plan: &'a MessagePlan,
    #[serde(skip_serializing_if = "Option::is_none")]
    support: Option<&'a FeasibilityReport>,
}

fn render_plan(plan: &MessagePlan, support: Option<&FeasibilityReport>, format: Format) -> Result<String> {
    let mut s = String::new();
    match format {
        Format::Json => return json(&PlanOutput { plan, support }),
        Format::Csv => {
            s.push_str("message,rate,cumulative\n");
            for (m, c) in plan.messages.iter().zip(&plan.cumulative) {
                let _ = writeln!(s, "M{},{},{}", m.index, m.rate, c);
            }
        }
        Format::Human => {
            let _ = writeln!(s, "messages for {} given {}", plan.source, plan.side.join(", "));
            for (m, c) in plan.messages.iter().zip(&plan.cumulative) {
                let _ = writeln!(s, "  M{}: {:.6} bits/symbol, cumulative {:.6}", m.index, m.rate, c);
            }
            if let Some(r) = support {
                render_checks(&mut s, r);
            }
        }
    }
    Ok(s)
}

#[derive(Debug, Clone, Serialize)]
pub struct TerminalResult {
    pub terminal: String,
    pub bit_exact: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct SimulationReport {
    pub scheme: String,
    pub n: usize,
    pub seed: u64,
    pub epsilon: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub gamma: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub typical: Option<bool>,
    /// Bits per symbol of each stream.
    pub rates: IndexMap<String, f64>,
    pub total_rate: f64,
    /// Entropy the streams aim for.
    pub target_rate: f64,
    pub rounds: usize,
    pub capacity_violations: usize,
    pub terminals: Vec<TerminalResult>,
    pub bit_exact: bool,
}

fn rates_csv(r: &SimulationReport) -> String {
    let mut s = String::from("stream,bits,rate\n");
    for (name, rate) in &r.rates {
        let _ = writeln!(s, "{name},{},{rate}", (rate * r.n as f64).round() as u64);
    }
    s
}

fn render_simulation(r: &SimulationReport, format: Format) -> Result<String> {
    let mut s = String::new();
    match format {
        Format::Json => return json(r),
        Format::Csv => {
            s.push_str("terminal,bit_exact\n");
            for t in &r.terminals {
                let _ = writeln!(s, "{},{}", t.terminal, t.bit_exact);
            }
        }
        Format::Human => {
            let _ = writeln!(s, "{} n={} seed={} rounds={}", r.scheme, r.n, r.seed, r.rounds);
            for (name, rate) in &r.rates {
                let _ = writeln!(s, "  {name}: {rate:.6} bits/symbol");
            }
            let _ = writeln!(s, "  total {:.6} vs target {:.6}", r.total_rate, r.target_rate);
            for t in &r.terminals {
                let _ = writeln!(s, "  {}: {}", t.terminal, if t.bit_exact { "exact" } else { "MISMATCH" });
            }
        }
    }
    Ok(s)
}

fn check_sim_args(sim: &SimArgs) -> Result<()> {
    if sim.n == 0 {
        return Err(Error::arg("--n must be at least 1"));
    }
    if sim.epsilon.is_nan() || sim.epsilon <= 0.0 {
        return Err(Error::arg("--epsilon must be positive"));
    }
    Ok(())
}

fn write_audit(sim: &SimArgs, audit: &[crate::rlnc::AuditEntry]) -> Result<()> {
    if let Some(path) = &sim.audit {
        let mut s = String::new();
        for e in audit {
            s.push_str(&serde_json::to_string(e)?);
            s.push('\n');
        }
        fs::write(path, s)?;
    }
    Ok(())
}

/// Latent node name for a stream.
fn latent_node(stream: &str) -> String {
    format!("s_{stream}")
}

fn simulate_multicast(sim: &SimArgs) -> Result<SimulationReport> {
    check_sim_args(sim)?;
    let pmf = read_pmf(&sim.inputs.pmf)?;
    let net = read_net(&sim.inputs.net)?;
    let vars = pmf.variables().to_vec();
    let book = Codebook::from_pmf(&pmf, &vars)?;

    let mut latent = Vec::new();
    let mut binding = IndexMap::new();
    let mut physical = Vec::new();
    for v in &vars {
        let node = net.node_name(net.source_node(v)?).to_owned();
        let stream = residual_stream(v);
        latent.push(LatentSource::new(latent_node(&stream), [node.clone()]));
        binding.insert(stream.clone(), latent_node(&stream));
        physical.push(node);
    }
    physical.sort();
    physical.dedup();
    latent.push(LatentSource::new(latent_node("K"), physical));
    binding.insert(COMMON_STREAM.to_owned(), latent_node("K"));
    let expanded = net.expand_with_latent_sources(&latent)?;

    let seqs = pmf.sample_iid(sim.n, sim.seed)?;
    let block = encode_multicast_block(&seqs, &book, sim.epsilon)?;
    let delivery = deliver_multicast(&expanded, &block, &binding, sim.seed, sim.packet_size)?;
    write_audit(sim, &delivery.audit)?;

    let mut terminals = Vec::new();
    for (terminal, received) in &delivery.blocks {
        let exact = received == &block && decode_multicast_block(received, &book)? == seqs;
        terminals.push(TerminalResult {
            terminal: terminal.clone(),
            bit_exact: exact,
        });
    }
    let mut target = book.partition().entropy();
    for v in &vars {
        target += book.decomposition(v)?.residual_entropy();
    }
    Ok(SimulationReport {
        scheme: "multicast".into(),
        n: sim.n,
        seed: sim.seed,
        epsilon: block.epsilon(),
        gamma: None,
        typical: Some(block.is_typical()),
        rates: block.rates(),
        total_rate: block.total_rate(),
        target_rate: target,
        rounds: delivery.rounds,
        capacity_violations: delivery.audit.iter().filter(|e| e.packets > e.capacity).count(),
        bit_exact: terminals.iter().all(|t| t.bit_exact),
        terminals,
    })
}

fn frame(bits: &Bits) -> Vec<u8> {
    let mut out = (bits.len() as u64).to_be_bytes().to_vec();
    let mut bits = bits.clone();
    bits.set_uninitialized(false);
    out.extend_from_slice(bits.as_raw_slice());
    out
}

fn unframe(bytes: &[u8]) -> Result<Bits> {
    let (len, rest) = bytes
        .split_first_chunk::<8>()
        .ok_or_else(|| Error::InvalidInput("message frame truncated".into()))?;
    let len = u64::from_be_bytes(*len) as usize;
    if rest.len() * 8 < len {
        return Err(Error::InvalidInput("message frame truncated".into()));
    }
    let mut bits = Bits::from_slice(rest);
    bits.truncate(len);
    Ok(bits)
}

fn simulate_bsi(sim: &SimArgs, source: &str, side: &[String]) -> Result<SimulationReport> {
    check_sim_args(sim)?;
    let pmf = read_pmf(&sim.inputs.pmf)?;
    let net = read_net(&sim.inputs.net)?;
    let terminals = net.terminal_names();
    if terminals.len() != side.len() {
        return Err(Error::Binding(format!(
            "{} side variables for {} terminals",
            side.len(),
            terminals.len()
        )));
    }
    let plan = plan_degraded_messages(&pmf, source, side, PlanMode::CommonInformation)?;
    let source_node = net.node_name(net.source_node(source)?).to_owned();
    let support = check_dmb_support(&net, &plan, &source_node, &terminals)?;
    if support.verdict == Verdict::Infeasible {
        let violated: Vec<String> = support.violated().map(|c| c.label.clone()).collect();
        return Err(Error::Precondition(format!("message rates exceed the network: {}", violated.join("; "))));
    }
    let book = BsiCodebook::new(&pmf, &plan)?;
    let seqs = pmf.sample_iid(sim.n, sim.seed)?;
    let x = &seqs[pmf.var_index(source)?];
    let messages = encode_bsi_messages(x, &book)?;

    // one generation per message, to the terminals that need it
    let mut got: Vec<Vec<Bits>> = vec![Vec::new(); terminals.len()];
    let mut rounds = 0;
    let mut violations = 0;
    let mut audit = Vec::new();
    for (i, m) in messages.iter().enumerate() {
        let name = format!("M{}", i + 1);
        let binding = IndexMap::from([(name.clone(), source_node.clone())]);
        let delivered = deliver_streams(
            &net,
            &[(name, frame(m))],
            &binding,
            Some(&terminals[i..]),
            sim.seed.wrapping_add(i as u64),
            sim.packet_size,
        )?;
        rounds += delivered.rounds;
        violations += delivered.audit.iter().filter(|e| e.packets > e.capacity).count();
        audit.extend(delivered.audit);
        for (j, t) in terminals.iter().enumerate().skip(i) {
            got[j].push(unframe(&delivered.received[t][0])?);
        }
    }
    write_audit(sim, &audit)?;

    let mut results = Vec::new();
    for (j, t) in terminals.iter().enumerate() {
        let y = &seqs[pmf.var_index(&side[j])?];
        let decoded: SymbolSequence = decode_bsi(&got[j], y, &book)?;
        results.push(TerminalResult {
            terminal: t.clone(),
            bit_exact: &decoded == x && got[j][..] == messages[..=j],
        });
    }
    let rates: IndexMap<String, f64> = messages
        .iter()
        .enumerate()
        .map(|(i, m)| (format!("M{}", i + 1), m.len() as f64 / sim.n as f64))
        .collect();
    Ok(SimulationReport {
        scheme: "bsi".into(),
        n: sim.n,
        seed: sim.seed,
        epsilon: sim.epsilon,
        gamma: None,
        typical: None,
        total_rate: rates.values().sum(),
        rates,
        target_rate: *plan.cumulative.last().expect("nonempty plan"),
        rounds,
        capacity_violations: violations,
        bit_exact: results.iter().all(|t| t.bit_exact),
        terminals: results,
    })
}

/// Feasible grid point with the largest worst-case slack.
fn roomiest_gamma(report: &FeasibilityReport) -> Result<f64> {
    let Some(Witness::HelperSweep(sweep)) = &report.witness else {
        return Err(Error::arg("helper report without a sweep"));
    };
    (0..sweep.gamma.len())
        .map(|i| {
            let slack = (sweep.rho_source - sweep.source_rate[i]).min(sweep.rho_helper - sweep.helper_rate[i]);
            (sweep.gamma[i], slack)
        })
        .filter(|&(_, slack)| slack >= -crate::feasibility::DEFAULT_DELTA)
        .max_by(|a, b| a.1.total_cmp(&b.1))
        .map(|(g, _)| g)
        .ok_or_else(|| Error::Precondition("no feasible gamma on the grid".into()))
}

fn simulate_ak(
    sim: &SimArgs,
    source: &str,
    helper: &str,
    gamma: Option<f64>,
    gamma_points: usize,
) -> Result<SimulationReport> {
    check_sim_args(sim)?;
    let pmf = read_pmf(&sim.inputs.pmf)?;
    let net = read_net(&sim.inputs.net)?;
    let report = check_ak(&net, &pmf, source, helper, gamma_points)?;
    let gamma = match gamma {
        Some(g) => g,
        None => roomiest_gamma(&report)?,
    };
    let book = Codebook::from_pmf(&pmf, &[source, helper])?;
    let seqs = pmf.sample_iid(sim.n, sim.seed)?;
    let x = &seqs[pmf.var_index(source)?];
    let y = &seqs[pmf.var_index(helper)?];
    let block = encode_ak(x, y, &book, gamma, sim.seed, sim.epsilon)?;
    let binding = IndexMap::from([
        (COMMON_STREAM.to_owned(), net.node_name(net.source_node(helper)?).to_owned()),
        (residual_stream(source), net.node_name(net.source_node(source)?).to_owned()),
    ]);
    let delivery = deliver_multicast(&net, &block, &binding, sim.seed, sim.packet_size)?;
    write_audit(sim, &delivery.audit)?;

    let mut terminals = Vec::new();
    for (terminal, received) in &delivery.blocks {
        let received: &EncodedBlock = received;
        terminals.push(TerminalResult {
            terminal: terminal.clone(),
            bit_exact: received == &block && &decode_ak(received, &book)? == x,
        });
    }
    let h_x = pmf.entropy(&[source])?;
    let h_x_k = book.decomposition(source)?.residual_entropy();
    let h_k = book.partition().entropy();
    Ok(SimulationReport {
        scheme: "ak".into(),
        n: sim.n,
        seed: sim.seed,
        epsilon: block.epsilon(),
        gamma: Some(gamma),
        typical: Some(block.is_typical()),
        rates: block.rates(),
        total_rate: block.total_rate(),
        // time-shared: common part plus conditional residual where described
        target_rate: gamma * (h_k + h_x_k) + (1.0 - gamma) * h_x,
        rounds: delivery.rounds,
        capacity_violations: delivery.audit.iter().filter(|e| e.packets > e.capacity).count(),
        bit_exact: terminals.iter().all(|t| t.bit_exact),
        terminals,
    })
}
