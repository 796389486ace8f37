//! The `mtlg` command line.
//!
//! Exit codes: 0 success, 2 usage or parse error, 3 model error
//! (infeasible target, unresolved latch, out-of-range value, invalid netlist).

use std::fmt::Write as _;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use mtlg_core::config::{GateFile, ProjectConfig};
use mtlg_core::device::{MemristorState, Programmer};
use mtlg_core::gate::{boundary_grid, boundary_notes, classify};
use mtlg_core::netfile::parse_netlist_str_with;
use mtlg_core::synth::{synthesize, SynthesisResult, SynthesisSpec};
use mtlg_core::transient::simulate;
use mtlg_core::units::{format_resistance, parse_resistance, parse_weights};
use mtlg_core::{FileError, GateConfig, InputVector, Tap, TruthTable};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_MODEL: i32 = 3;

#[derive(Debug, Parser)]
#[command(
    name = "mtlg",
    version,
    about = "Memristive threshold logic gate toolkit"
)]
pub struct Cli {
    /// Project configuration (TOML).
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Override the configured tie rule.
    #[arg(long, global = true, value_name = "input-wins|threshold-wins")]
    tie_rule: Option<String>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Evaluate one input vector.
    Eval {
        #[command(flatten)]
        gate: GateSource,
        /// Logical input bits, x1 first (e.g. 11).
        #[arg(long)]
        input: String,
    },
    /// Print the full truth table and its class.
    Truth {
        #[command(flatten)]
        gate: GateSource,
    },
    /// Classify a grid of relaxed activations in [0,1]^n (n = 2 or 3).
    Boundary {
        #[command(flatten)]
        gate: GateSource,
        #[arg(long, default_value_t = 101)]
        res: usize,
        /// CSV destination; stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Sidecar destination; defaults to `<out>.txt`, or stderr without --out.
        #[arg(long)]
        sidecar: Option<PathBuf>,
    },
    /// Simulate the clocked latch and write a waveform CSV.
    Wave {
        #[command(flatten)]
        gate: GateSource,
        /// Comma-separated input vectors, one per cycle. Defaults to counting
        /// through all rows for the configured number of cycles.
        #[arg(long)]
        inputs: Option<String>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Find memristances realizing a truth table.
    Synth {
        /// AND, OR, NAND, NOR, XOR, XNOR, CONST0, CONST1, MAJ:k, DICT:i, or a
        /// bit string with the all-ones row first.
        #[arg(long)]
        target: String,
        /// Input count for named targets.
        #[arg(long, default_value_t = 2)]
        n: usize,
        #[arg(long, default_value_t = 0.05)]
        min_margin: f64,
        /// Route complements of realizable functions through CO.
        #[arg(long)]
        allow_complement: bool,
        /// Write the quantized gate to this file.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Program one device to a target resistance with verify reads.
    Program {
        #[arg(long)]
        target: String,
        /// Starting resistance; defaults to the reset state (r_max).
        #[arg(long)]
        from: Option<String>,
        #[arg(long, default_value_t = 0.01)]
        tol: f64,
        #[arg(long, default_value_t = 200)]
        max_pulses: usize,
        /// Noise seed; defaults to the configured seed.
        #[arg(long)]
        seed: Option<u64>,
        /// Print every pulse.
        #[arg(long)]
        verbose: bool,
    },
    /// Validate a netlist file and print its output truth tables.
    Netlist { file: PathBuf },
}

#[derive(Debug, Args)]
struct GateSource {
    /// Memristances "M1,...,Mn;TH1,..." with optional k/M suffixes.
    #[arg(long, conflicts_with = "gate", required_unless_present = "gate")]
    weights: Option<String>,
    /// Gate file (TOML) as written by `synth --out`.
    #[arg(long)]
    gate: Option<PathBuf>,
}

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Model(String),
}

impl CliError {
    pub fn code(&self) -> i32 {
        match self {
            CliError::Usage(_) => EXIT_USAGE,
            CliError::Model(_) => EXIT_MODEL,
        }
    }

    pub fn message(&self) -> &str {
        match self {
            CliError::Usage(m) | CliError::Model(m) => m,
        }
    }
}

fn usage_err(e: impl ToString) -> CliError {
    CliError::Usage(e.to_string())
}

fn model_err(e: impl ToString) -> CliError {
    CliError::Model(e.to_string())
}

impl From<FileError> for CliError {
    fn from(e: FileError) -> Self {
        match e {
            FileError::Io { .. } | FileError::Parse(_) | FileError::Field { .. } => usage_err(e),
            FileError::Netlist(_)
            | FileError::Device(_)
            | FileError::Gate(_)
            | FileError::Transient(_) => model_err(e),
        }
    }
}

/// Runs one command, writing results to `out` and diagnostics to `err`.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if code == EXIT_OK {
                write!(out, "{text}")
            } else {
                write!(err, "{text}")
            };
            return code;
        }
    };
    match execute(&cli, out, err) {
        Ok(()) => EXIT_OK,
        Err(e) => {
            let _ = writeln!(err, "error: {}", e.message());
            e.code()
        }
    }
}

struct Context {
    project: ProjectConfig,
}

impl Context {
    fn load(cli: &Cli) -> Result<Self, CliError> {
        let mut project = match &cli.config {
            Some(path) => ProjectConfig::load(path)?,
            None => ProjectConfig::default(),
        };
        if let Some(rule) = &cli.tie_rule {
            project.tie_rule = rule
                .parse()
                .map_err(|e| usage_err(format!("--tie-rule: {e}")))?;
        }
        Ok(Context { project })
    }

    fn gate(&self, src: &GateSource, explicit_tie: bool) -> Result<(GateConfig, Tap), CliError> {
        let (config, tap) = match (&src.weights, &src.gate) {
            (Some(w), _) => {
                let (inputs, thresholds) =
                    parse_weights(w).map_err(|e| usage_err(format!("--weights {e}")))?;
                let config = GateConfig::new(inputs, thresholds).map_err(model_err)?;
                (config.with_tie_rule(self.project.tie_rule), Tap::Ca)
            }
            (None, Some(path)) => {
                let (config, tap) = GateFile::load(path)?.to_config(self.project.tie_rule)?;
                let config = if explicit_tie {
                    config.with_tie_rule(self.project.tie_rule)
                } else {
                    config
                };
                (config, tap)
            }
            (None, None) => return Err(usage_err("either --weights or --gate is required")),
        };
        let config = config.with_levels(self.project.levels).map_err(model_err)?;
        Ok((config, tap))
    }
}

fn execute(cli: &Cli, out: &mut dyn Write, err: &mut dyn Write) -> Result<(), CliError> {
    let ctx = Context::load(cli)?;
    let explicit_tie = cli.tie_rule.is_some();
    match &cli.command {
        Command::Eval { gate, input } => {
            let (config, _) = ctx.gate(gate, explicit_tie)?;
            cmd_eval(&config, input, out)
        }
        Command::Truth { gate } => {
            let (config, tap) = ctx.gate(gate, explicit_tie)?;
            cmd_truth(&config, tap, out)
        }
        Command::Boundary {
            gate,
            res,
            out: path,
            sidecar,
        } => {
            let (config, _) = ctx.gate(gate, explicit_tie)?;
            cmd_boundary(&config, *res, path.as_deref(), sidecar.as_deref(), out, err)
        }
        Command::Wave {
            gate,
            inputs,
            out: path,
        } => {
            let (config, _) = ctx.gate(gate, explicit_tie)?;
            cmd_wave(
                &ctx.project,
                &config,
                inputs.as_deref(),
                path.as_deref(),
                out,
                err,
            )
        }
        Command::Synth {
            target,
            n,
            min_margin,
            allow_complement,
            out: path,
        } => {
            let target = parse_target(target, *n)?;
            let mut spec = SynthesisSpec::new(target, ctx.project.device);
            spec.tie_rule = ctx.project.tie_rule;
            spec.min_margin_rel = *min_margin;
            spec.allow_complement = *allow_complement;
            cmd_synth(&spec, path.as_deref(), out)
        }
        Command::Program {
            target,
            from,
            tol,
            max_pulses,
            seed,
            verbose,
        } => {
            let target =
                parse_resistance(target).map_err(|e| usage_err(format!("--target {e}")))?;
            let from = from
                .as_deref()
                .map(|f| parse_resistance(f).map_err(|e| usage_err(format!("--from {e}"))))
                .transpose()?;
            let seed = seed.unwrap_or(ctx.project.seed);
            cmd_program(
                &ctx.project,
                target,
                from,
                *tol,
                *max_pulses,
                seed,
                *verbose,
                out,
            )
        }
        Command::Netlist { file } => cmd_netlist(&ctx.project, file, out),
    }
}

fn io(e: std::io::Error) -> CliError {
    usage_err(e)
}

fn write_file(path: &Path, text: &str) -> Result<(), CliError> {
    std::fs::write(path, text).map_err(|e| usage_err(format!("{}: {e}", path.display())))
}

fn cmd_eval(config: &GateConfig, input: &str, out: &mut dyn Write) -> Result<(), CliError> {
    let input = InputVector::parse(input).map_err(|e| usage_err(format!("--input {e}")))?;
    let currents = config.branch_currents(&input).map_err(model_err)?;
    let result = config.evaluate(&input).map_err(model_err)?;
    writeln!(
        out,
        "CA={} CO={} Iin={:.4e} Ith={:.4e}",
        result.ca as u8, result.co as u8, currents.i_in, currents.i_th
    )
    .map_err(io)
}

fn class_label(table: &TruthTable) -> String {
    let class = classify(table);
    match class.majority_k(table.n()) {
        Some(k) if !matches!(class, mtlg_core::GateClass::Majority(_)) => {
            format!("{class} (MAJ-{k})")
        }
        _ => class.to_string(),
    }
}

fn cmd_truth(config: &GateConfig, tap: Tap, out: &mut dyn Write) -> Result<(), CliError> {
    let n = config.n_inputs();
    let ca = config.truth_table().map_err(model_err)?;
    let mut text = String::new();
    for i in 1..=n {
        let _ = write!(text, "x{i} ");
    }
    text.push_str("| CA CO\n");
    for row in 0..1usize << n {
        for b in InputVector::from_index(row, n).bits() {
            let _ = write!(text, "{:<3}", *b as u8);
        }
        let v = ca.get(row);
        let _ = writeln!(text, "| {}  {}", v as u8, !v as u8);
    }
    let table = match tap {
        Tap::Ca => ca,
        Tap::Co => ca.complement(),
    };
    let _ = writeln!(text, "tap={tap} bits={}", table.to_bitstring());
    let _ = writeln!(text, "class={}", class_label(&table));
    out.write_all(text.as_bytes()).map_err(io)
}

fn cmd_boundary(
    config: &GateConfig,
    res: usize,
    path: Option<&Path>,
    sidecar: Option<&Path>,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> Result<(), CliError> {
    let grid = boundary_grid(config, res).map_err(|e| match e {
        mtlg_core::GateError::Resolution(_) => usage_err(e),
        other => model_err(other),
    })?;
    let mut meta = format!("hyperplane: {}\n", grid.hyperplane);
    let normalized: Vec<String> = grid
        .hyperplane
        .normalized()
        .iter()
        .enumerate()
        .map(|(i, w)| format!("{w:.6}*a{}", i + 1))
        .collect();
    let _ = writeln!(meta, "normalized: {} = 1", normalized.join(" + "));
    for note in boundary_notes(config).map_err(model_err)? {
        let _ = writeln!(meta, "note: {note}");
    }
    let csv = grid.to_csv();
    match path {
        Some(p) => {
            write_file(p, &csv)?;
            let side = sidecar
                .map(Path::to_path_buf)
                .unwrap_or_else(|| PathBuf::from(format!("{}.txt", p.display())));
            write_file(&side, &meta)?;
            write!(out, "{meta}").map_err(io)
        }
        None => {
            out.write_all(csv.as_bytes()).map_err(io)?;
            match sidecar {
                Some(side) => write_file(side, &meta),
                None => write!(err, "{meta}").map_err(io),
            }
        }
    }
}

fn cmd_wave(
    project: &ProjectConfig,
    config: &GateConfig,
    inputs: Option<&str>,
    path: Option<&Path>,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> Result<(), CliError> {
    let n = config.n_inputs();
    let mut clock = project.clock;
    let sequence: Vec<InputVector> = match inputs {
        Some(list) => {
            let seq = list
                .split(',')
                .map(|s| {
                    InputVector::parse(s.trim()).map_err(|e| usage_err(format!("--inputs {e}")))
                })
                .collect::<Result<Vec<_>, _>>()?;
            clock.n_cycles = seq.len();
            seq
        }
        None => (0..clock.n_cycles)
            .map(|c| InputVector::from_index(c % (1 << n), n))
            .collect(),
    };
    let trace = simulate(config, &sequence, &clock, &project.transient).map_err(model_err)?;
    let csv = trace.to_csv();
    match path {
        Some(p) => write_file(p, &csv)?,
        None => out.write_all(csv.as_bytes()).map_err(io)?,
    }
    let summary: &mut dyn Write = if path.is_some() { out } else { err };
    let mut unresolved = Vec::new();
    for (i, c) in trace.cycles.iter().enumerate() {
        let state = match (c.output, c.settle.time()) {
            (Some(o), Some(t)) => format!("CA={} CO={} settle={t:.4e}s", o.ca as u8, o.co as u8),
            _ => {
                unresolved.push(i);
                "unresolved".to_string()
            }
        };
        writeln!(summary, "cycle {i} input {} {state}", c.input).map_err(io)?;
    }
    if unresolved.is_empty() {
        Ok(())
    } else {
        Err(model_err(format!(
            "latch unresolved in cycles {unresolved:?}"
        )))
    }
}

fn parse_target(target: &str, n: usize) -> Result<TruthTable, CliError> {
    let t = target.trim();
    if !t.is_empty() && t.chars().all(|c| c == '0' || c == '1') {
        TruthTable::from_bitstring(t).map_err(|e| usage_err(format!("--target {e}")))
    } else {
        TruthTable::named(t, n).map_err(|e| usage_err(format!("--target {e}")))
    }
}

fn cmd_synth(
    spec: &SynthesisSpec,
    path: Option<&Path>,
    out: &mut dyn Write,
) -> Result<(), CliError> {
    let mut text = String::new();
    let _ = writeln!(
        text,
        "target: {} ({})",
        spec.target.to_bitstring(),
        class_label(&spec.target)
    );
    let result = synthesize(spec).map_err(model_err)?;
    let design = match result {
        SynthesisResult::Infeasible(witness) => {
            let _ = writeln!(text, "status: infeasible");
            let _ = writeln!(text, "witness: {witness}");
            out.write_all(text.as_bytes()).map_err(io)?;
            return Err(model_err(format!("target is not realizable: {witness}")));
        }
        SynthesisResult::Feasible(d) => d,
    };
    let fmt_list = |v: &[f64]| {
        v.iter()
            .map(|&r| format_resistance(r))
            .collect::<Vec<_>>()
            .join(",")
    };
    let _ = writeln!(text, "status: feasible");
    let _ = writeln!(text, "tap: {}", design.tap);
    let _ = writeln!(text, "ca_function: {}", design.ca_function.to_bitstring());
    let _ = writeln!(
        text,
        "weights: {};{}",
        fmt_list(&design.memristances),
        format_resistance(design.threshold_memristance)
    );
    let _ = writeln!(text, "margin: {:.6}", design.achieved_margin);
    let q = &design.quantized_config;
    let _ = writeln!(
        text,
        "quantized: {};{}",
        fmt_list(q.input_memristances()),
        fmt_list(q.threshold_memristances())
    );
    let levels: Vec<String> = design
        .quantized_levels
        .iter()
        .map(|k| k.to_string())
        .collect();
    let _ = writeln!(text, "levels: {}", levels.join(","));
    let _ = writeln!(
        text,
        "quantized_check: {} worst_margin={:.6} error_bound={:.6}",
        if design.quantized_check.pass {
            "pass"
        } else {
            "fail"
        },
        design.quantized_check.worst_margin,
        design.quantization_error_bound
    );
    if let Some(p) = path {
        write_file(p, &GateFile::from_config(q, design.tap).to_toml())?;
        let _ = writeln!(text, "wrote: {}", p.display());
    }
    out.write_all(text.as_bytes()).map_err(io)?;
    if design.quantized_check.pass {
        Ok(())
    } else {
        Err(model_err("quantized design fails verification"))
    }
}

#[allow(clippy::too_many_arguments)]
fn cmd_program(
    project: &ProjectConfig,
    target: f64,
    from: Option<f64>,
    tol: f64,
    max_pulses: usize,
    seed: u64,
    verbose: bool,
    out: &mut dyn Write,
) -> Result<(), CliError> {
    let device = project.device;
    let state = match from {
        Some(r) => MemristorState::new(device, r),
        None => MemristorState::reset(device),
    }
    .map_err(model_err)?;
    let report = Programmer::new(seed)
        .program(state, target, tol, max_pulses)
        .map_err(model_err)?;
    let mut text = String::new();
    if verbose {
        for (i, p) in report.history.iter().enumerate() {
            let _ = writeln!(
                text,
                "pulse {} {:+.4}V R={:.6e}",
                i + 1,
                p.pulse.amplitude,
                p.resistance
            );
        }
    }
    let r = report.state.resistance();
    let _ = writeln!(
        text,
        "pulses={} R={r:.6e} target={target:.6e} error={:+.4}%",
        report.pulses(),
        (r - target) / target * 100.0
    );
    out.write_all(text.as_bytes()).map_err(io)
}

fn cmd_netlist(project: &ProjectConfig, file: &Path, out: &mut dyn Write) -> Result<(), CliError> {
    let text =
        std::fs::read_to_string(file).map_err(|e| usage_err(format!("{}: {e}", file.display())))?;
    let net = parse_netlist_str_with(&text, project.tie_rule).map_err(|e| match e {
        FileError::Parse(m) => usage_err(format!("{}: {m}", file.display())),
        FileError::Field { field, message } => {
            usage_err(format!("{}: {field}: {message}", file.display()))
        }
        other => CliError::from(other),
    })?;
    let tables = net.network_truth_table().map_err(model_err)?;
    let mut text = format!(
        "gates={} primary_inputs={} outputs={}\n",
        net.gates.len(),
        net.primary_inputs,
        net.outputs.len()
    );
    for ((gate, tap), table) in net.outputs.iter().zip(&tables) {
        let _ = writeln!(
            text,
            "{}.{tap}: {} {} class={}",
            net.gates[*gate].name,
            table.to_bitstring(),
            table,
            class_label(table)
        );
    }
    out.write_all(text.as_bytes()).map_err(io)
}
