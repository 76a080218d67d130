//! The `alphactl` command line.
//!
//! Every run writes its outputs under the output directory (`--out-dir`,
//! or `ALPHA_OUT_DIR`, or the current directory) together with a manifest
//! that `alphactl replay` uses to repeat the run and compare hashes.
//! Exit codes: 0 success, 1 failure (bad input file, invariant violation,
//! replay mismatch), 2 usage error.

pub mod manifest;

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use crate::alpha::{AlphaMachine, MachineSpec, CONTEXT_REGION_START};
use crate::bits::{BitString, Word};
use crate::codec::{decode_sequence, encode_scheme};
use crate::context::{word_distance, EventsFile, ProbabilitySpace};
use crate::cu::{cu_run_traced, reduced_program, ProgramSource};
use crate::isa::{assemble, disassemble, program_bits};
use crate::network::{check_round, event_log, Effect, Network, NetworkSpec};
use crate::scenarios::boids::{boids_run, FlockParams};
use crate::scenarios::genome::{dna_to_bits, genetic_replicate, phylo_distance_matrix, random_word};
use crate::tape::{Symbol, Tape};
use crate::trace::to_jsonl;
use crate::turing::{parse_scheme, scheme_tape, tm_run, Outcome};

use manifest::{sha256_hex, strip_out_dir, FileHash, RunManifest, TOOL};

#[derive(Parser, Debug)]
#[command(name = "alphactl", version, about = "Turing machines, calculators and networks of α-machines")]
struct Cli {
    /// Directory for outputs given as relative paths.
    #[arg(long, global = true, env = "ALPHA_OUT_DIR", default_value = ".")]
    out_dir: PathBuf,
    /// Where to write the run manifest (default: `<command>.manifest.json`
    /// in the output directory).
    #[arg(long, global = true)]
    manifest: Option<PathBuf>,
    /// Repeat a seeded command once per seed in `seeds=A..B` (B excluded),
    /// each run in its own `seed-<n>` directory under the output directory.
    #[arg(long, global = true, value_parser = parse_sweep)]
    sweep: Option<std::ops::Range<u64>>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Particular Turing machines.
    #[command(subcommand)]
    Tm(TmCmd),
    /// Self-delimiting token codes.
    #[command(subcommand)]
    Codec(CodecCmd),
    /// The universal calculator.
    #[command(subcommand)]
    Cu(CuCmd),
    /// A single α-machine.
    #[command(subcommand)]
    Alpha(AlphaCmd),
    /// Networks of α-machines.
    #[command(subcommand)]
    Net(NetCmd),
    /// The flocking and genome demonstrations.
    #[command(subcommand)]
    Scenario(ScenarioCmd),
    /// Repeat a run from its manifest and compare output hashes.
    Replay(ReplayArgs),
}

#[derive(Subcommand, Debug)]
enum TmCmd {
    Run(TmRun),
    Validate {
        #[arg(long)]
        scheme: PathBuf,
    },
}

#[derive(Args, Debug)]
struct TmRun {
    #[arg(long)]
    scheme: PathBuf,
    /// Tape literal; `_` or `Λ` for blank.
    #[arg(long)]
    tape: String,
    #[arg(long, default_value_t = 0, allow_hyphen_values = true)]
    start: i64,
    #[arg(long, default_value_t = 10_000)]
    fuel: u64,
    #[arg(long)]
    trace: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
enum CodecCmd {
    /// Encode a machine scheme, or an assembler program.
    Encode {
        #[arg(long, conflicts_with = "asm", required_unless_present = "asm")]
        scheme: Option<PathBuf>,
        #[arg(long)]
        asm: Option<PathBuf>,
    },
    /// List the tokens of a bit string, or its instructions with `--asm`.
    Decode {
        #[arg(long)]
        bits: String,
        #[arg(long)]
        asm: bool,
    },
}

#[derive(Subcommand, Debug)]
enum CuCmd {
    Run(CuRunArgs),
}

#[derive(Args, Debug)]
struct CuRunArgs {
    /// Program file: ASCII bits, optionally followed by `@generator:<name>`.
    #[arg(long, conflicts_with = "asm", required_unless_present = "asm")]
    program: Option<PathBuf>,
    /// Program file in assembler.
    #[arg(long)]
    asm: Option<PathBuf>,
    #[arg(long, default_value = "")]
    data: String,
    #[arg(long, default_value_t = 100_000)]
    fuel: u64,
    /// Print the reduced program (the prefix read before halting).
    #[arg(long)]
    emit_pr: bool,
    #[arg(long)]
    trace: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
enum AlphaCmd {
    Run(AlphaRunArgs),
}

#[derive(Args, Debug)]
struct AlphaRunArgs {
    #[arg(long)]
    spec: PathBuf,
    #[arg(long, default_value_t = 100_000)]
    fuel: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    events: Option<PathBuf>,
    #[arg(long)]
    trace: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
enum NetCmd {
    Run(NetRunArgs),
}

#[derive(Args, Debug)]
struct NetRunArgs {
    #[arg(long)]
    spec: PathBuf,
    #[arg(long)]
    rounds: u64,
    /// Overrides the seed in the spec file.
    #[arg(long)]
    seed: Option<u64>,
    /// Overrides the `[events]` block of the spec file.
    #[arg(long)]
    events: Option<PathBuf>,
    #[arg(long, default_value = "events.jsonl")]
    log: PathBuf,
}

#[derive(Subcommand, Debug)]
enum ScenarioCmd {
    Boids(BoidsArgs),
    Genome(GenomeArgs),
}

#[derive(Args, Debug)]
struct BoidsArgs {
    #[arg(long, default_value_t = 30)]
    n: usize,
    #[arg(long, default_value_t = 2000)]
    steps: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value = "boids.csv")]
    out: PathBuf,
    /// Per-step metrics: `step,mean_distance,min_distance`.
    #[arg(long)]
    metrics: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct GenomeArgs {
    /// Genome file: ASCII bits, or nucleotides ACGT (two bits each).
    #[arg(long, conflicts_with = "random", required_unless_present = "random")]
    genome: Option<PathBuf>,
    /// Random genome of this many bits.
    #[arg(long)]
    random: Option<usize>,
    #[arg(long)]
    events: Option<PathBuf>,
    #[arg(long, default_value_t = 1)]
    generations: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value = "lineage.json")]
    out: PathBuf,
}

#[derive(Args, Debug)]
struct ReplayArgs {
    #[arg(long)]
    manifest: PathBuf,
    /// Number of consecutive replays.
    #[arg(long, default_value_t = 1)]
    times: u32,
}

/// State of one run: files read and written, and what it printed.
struct Run {
    out_dir: PathBuf,
    inputs: Vec<PathBuf>,
    outputs: Vec<PathBuf>,
    stdout: String,
    command: String,
    seed: Option<u64>,
    fuel: Option<u64>,
    rounds: Option<u64>,
}

impl Run {
    fn read(&mut self, path: &Path) -> Result<String> {
        let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        self.inputs.push(path.to_path_buf());
        Ok(text)
    }

    fn write(&mut self, path: &Path, bytes: &[u8]) -> Result<()> {
        let path = self.out_dir.join(path);
        if let Some(dir) = path.parent() {
            fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
        }
        fs::write(&path, bytes).with_context(|| format!("writing {}", path.display()))?;
        self.outputs.push(path);
        Ok(())
    }

    fn say(&mut self, line: impl AsRef<str>) {
        self.stdout.push_str(line.as_ref());
        self.stdout.push('\n');
    }
}

/// Runs the command line `argv` (program name first). Returns the exit
/// code.
pub fn dispatch<I, T>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<String>,
{
    let argv: Vec<String> = argv.into_iter().map(Into::into).collect();
    let cli = match Cli::try_parse_from(&argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = e.exit_code();
            let text = e.render().to_string();
            if code == 0 {
                let _ = write!(out, "{text}");
            } else {
                let _ = write!(err, "{text}");
            }
            return code;
        }
    };
    let result = match cli.sweep.clone() {
        Some(seeds) => sweep(&cli, &argv, seeds),
        None => execute(cli, &argv[1.min(argv.len())..], true),
    };
    match result {
        Ok(run) => {
            let _ = write!(out, "{}", run.stdout);
            0
        }
        Err(e) => {
            let _ = writeln!(err, "error: {e:#}");
            1
        }
    }
}

fn parse_sweep(text: &str) -> Result<std::ops::Range<u64>, String> {
    let range = text
        .strip_prefix("seeds=")
        .ok_or_else(|| format!("expected seeds=A..B, got {text:?}"))?;
    let (a, b) = range
        .split_once("..")
        .ok_or_else(|| format!("expected A..B, got {range:?}"))?;
    let a: u64 = a.trim().parse().map_err(|e| format!("{a:?}: {e}"))?;
    let b: u64 = b.trim().parse().map_err(|e| format!("{b:?}: {e}"))?;
    if a >= b {
        return Err(format!("empty seed range {a}..{b}"));
    }
    Ok(a..b)
}

fn takes_seed(command: &Command) -> bool {
    matches!(
        command,
        Command::Alpha(_) | Command::Net(_) | Command::Scenario(ScenarioCmd::Boids(_) | ScenarioCmd::Genome(_))
    )
}

/// Runs the command once per seed, in parallel. Each run gets its own
/// output directory and manifest, so any one of them can be replayed alone.
fn sweep(cli: &Cli, argv: &[String], seeds: std::ops::Range<u64>) -> Result<Run> {
    if !takes_seed(&cli.command) {
        bail!("--sweep needs a seeded command (alpha, net or scenario)");
    }
    let mut base = Vec::new();
    let mut skip = false;
    for a in strip_out_dir(&argv[1.min(argv.len())..]) {
        if skip {
            skip = false;
        } else if a == "--sweep" {
            skip = true;
        } else if !a.starts_with("--sweep=") {
            base.push(a);
        }
    }
    let argv_for = |seed: u64| {
        let dir = cli.out_dir.join(format!("seed-{seed}"));
        let mut v = vec![TOOL.to_string(), "--out-dir".into(), dir.display().to_string()];
        v.extend(base.iter().cloned());
        v.extend(["--seed".to_string(), seed.to_string()]);
        v
    };
    let width = std::thread::available_parallelism().map_or(1, |n| n.get());
    let all: Vec<u64> = seeds.collect();
    let mut runs = Vec::with_capacity(all.len());
    for batch in all.chunks(width) {
        let results: Vec<Result<Run>> = std::thread::scope(|scope| {
            let handles: Vec<_> = batch
                .iter()
                .map(|&seed| {
                    let argv = argv_for(seed);
                    scope.spawn(move || {
                        let cli = Cli::try_parse_from(&argv).map_err(|e| anyhow!("seed {seed}: {e}"))?;
                        execute(cli, &argv[1..], true).with_context(|| format!("seed {seed}"))
                    })
                })
                .collect();
            handles.into_iter().map(|h| h.join().expect("sweep worker panicked")).collect()
        });
        for (seed, r) in batch.iter().zip(results) {
            runs.push((*seed, r?));
        }
    }
    let mut run = Run {
        out_dir: cli.out_dir.clone(),
        inputs: Vec::new(),
        outputs: Vec::new(),
        stdout: String::new(),
        command: "sweep".into(),
        seed: None,
        fuel: None,
        rounds: None,
    };
    for (seed, r) in runs {
        run.say(format!("== seed {seed} ({})", r.out_dir.display()));
        run.stdout.push_str(&r.stdout);
    }
    Ok(run)
}

fn execute(cli: Cli, args: &[String], write_manifest: bool) -> Result<Run> {
    let manifest_path = cli.manifest.clone();
    let mut run = Run {
        out_dir: cli.out_dir.clone(),
        inputs: Vec::new(),
        outputs: Vec::new(),
        stdout: String::new(),
        command: String::new(),
        seed: None,
        fuel: None,
        rounds: None,
    };
    match cli.command {
        Command::Replay(r) => {
            replay(&r, &mut run)?;
            return Ok(run);
        }
        Command::Tm(TmCmd::Run(a)) => tm_run_cmd(&a, &mut run)?,
        Command::Tm(TmCmd::Validate { scheme }) => tm_validate(&scheme, &mut run)?,
        Command::Codec(CodecCmd::Encode { scheme, asm }) => codec_encode(scheme, asm, &mut run)?,
        Command::Codec(CodecCmd::Decode { bits, asm }) => codec_decode(&bits, asm, &mut run)?,
        Command::Cu(CuCmd::Run(a)) => cu_run_cmd(&a, &mut run)?,
        Command::Alpha(AlphaCmd::Run(a)) => alpha_run_cmd(&a, &mut run)?,
        Command::Net(NetCmd::Run(a)) => net_run_cmd(&a, &mut run)?,
        Command::Scenario(ScenarioCmd::Boids(a)) => boids_cmd(&a, &mut run)?,
        Command::Scenario(ScenarioCmd::Genome(a)) => genome_cmd(&a, &mut run)?,
    }
    if write_manifest {
        let m = RunManifest {
            tool: TOOL.into(),
            version: env!("CARGO_PKG_VERSION").into(),
            command: run.command.clone(),
            args: strip_out_dir(args),
            out_dir: run.out_dir.clone(),
            seed: run.seed,
            fuel: run.fuel,
            rounds: run.rounds,
            inputs: run.inputs.iter().map(|p| FileHash::of(p)).collect::<Result<_>>()?,
            outputs: run.outputs.iter().map(|p| FileHash::of(p)).collect::<Result<_>>()?,
            stdout_sha256: sha256_hex(run.stdout.as_bytes()),
        };
        let default = format!("{}.manifest.json", run.command.replace(' ', "-"));
        let path = run.out_dir.join(manifest_path.unwrap_or_else(|| PathBuf::from(default)));
        if let Some(dir) = path.parent() {
            fs::create_dir_all(dir)?;
        }
        fs::write(&path, m.to_json()).with_context(|| format!("writing {}", path.display()))?;
    }
    Ok(run)
}

fn replay(args: &ReplayArgs, run: &mut Run) -> Result<()> {
    let m = RunManifest::load(&args.manifest)?;
    if m.tool != TOOL {
        bail!("manifest was written by {:?}, not {TOOL}", m.tool);
    }
    for input in &m.inputs {
        let now = FileHash::of(&input.path)?;
        if now.sha256 != input.sha256 {
            bail!("input {} changed since the run", input.path.display());
        }
    }
    for round in 1..=args.times {
        let mut argv = vec![TOOL.to_string(), "--out-dir".into(), m.out_dir.display().to_string()];
        argv.extend(m.args.iter().cloned());
        let cli = Cli::try_parse_from(&argv).map_err(|e| anyhow!("manifest arguments: {e}"))?;
        let again = execute(cli, &argv[1..], false)?;
        if sha256_hex(again.stdout.as_bytes()) != m.stdout_sha256 {
            bail!("replay {round}: printed output differs");
        }
        for output in &m.outputs {
            let now = FileHash::of(&output.path)?;
            if now.sha256 != output.sha256 {
                bail!("replay {round}: {} differs", output.path.display());
            }
        }
    }
    run.command = "replay".into();
    run.say(format!(
        "replay ok: {} ({} output files, {} time(s))",
        m.command,
        m.outputs.len(),
        args.times
    ));
    Ok(())
}

fn tm_run_cmd(a: &TmRun, run: &mut Run) -> Result<()> {
    run.command = "tm run".into();
    run.fuel = Some(a.fuel);
    let text = run.read(&a.scheme)?;
    let scheme = parse_scheme(&text).with_context(|| format!("{}", a.scheme.display()))?;
    let tape = scheme_tape(&scheme, &a.tape).context("tape literal")?;
    let result = tm_run(&scheme, tape, a.start, a.fuel)?;
    if let Some(path) = &a.trace {
        run.write(path, to_jsonl("tm-trace", &result.trace).as_bytes())?;
    }
    let state = match &result.outcome {
        Outcome::Halted { state, .. } | Outcome::OutOfFuel { state, .. } | Outcome::Stuck { state, .. } => state,
    };
    let (start, _) = result.outcome.tape().trimmed();
    run.say(format!("outcome: {}", result.outcome.label()));
    run.say(format!("state: {state}"));
    run.say(format!("steps: {}", result.trace.len()));
    run.say(format!("tape: {}", result.outcome.tape().literal()));
    run.say(format!("tape start: {start}"));
    if let Outcome::Stuck { read, .. } = &result.outcome {
        bail!("no transition for ({state}, {read})");
    }
    Ok(())
}

fn tm_validate(path: &Path, run: &mut Run) -> Result<()> {
    run.command = "tm validate".into();
    let text = run.read(path)?;
    let scheme = parse_scheme(&text).with_context(|| format!("{}", path.display()))?;
    let violations = scheme.validate();
    if violations.is_empty() {
        run.say("valid");
        return Ok(());
    }
    let list: Vec<String> = violations.iter().map(ToString::to_string).collect();
    bail!("invalid scheme:\n  {}", list.join("\n  "))
}

fn codec_encode(scheme: Option<PathBuf>, asm: Option<PathBuf>, run: &mut Run) -> Result<()> {
    run.command = "codec encode".into();
    let bits = match (scheme, asm) {
        (Some(p), _) => {
            let text = run.read(&p)?;
            let scheme = parse_scheme(&text).with_context(|| format!("{}", p.display()))?;
            encode_scheme(&scheme)?
        }
        (None, Some(p)) => {
            let text = run.read(&p)?;
            program_bits(&assemble(&text).with_context(|| format!("{}", p.display()))?)
        }
        (None, None) => unreachable!("clap requires one"),
    };
    run.say(bits.to_string());
    Ok(())
}

fn codec_decode(text: &str, asm: bool, run: &mut Run) -> Result<()> {
    run.command = "codec decode".into();
    let bits: BitString = text.trim().parse().context("bit string")?;
    if asm {
        let (program, rest) = disassemble(&bits);
        for i in &program {
            run.say(i.to_string());
        }
        if let Some((offset, reason)) = rest {
            bail!("bit {offset}: {reason}");
        }
        return Ok(());
    }
    for t in decode_sequence(&bits)? {
        run.say(t.to_string());
    }
    Ok(())
}

fn cu_run_cmd(a: &CuRunArgs, run: &mut Run) -> Result<()> {
    run.command = "cu run".into();
    run.fuel = Some(a.fuel);
    let source = match (&a.program, &a.asm) {
        (Some(p), _) => {
            let text = run.read(p)?;
            ProgramSource::parse(&text).with_context(|| format!("{}", p.display()))?
        }
        (None, Some(p)) => {
            let text = run.read(p)?;
            ProgramSource::program(&assemble(&text).with_context(|| format!("{}", p.display()))?)
        }
        (None, None) => unreachable!("clap requires one"),
    };
    let data: Word = a.data.parse().context("--data")?;
    let (result, trace) = cu_run_traced(&source, &data, a.fuel);
    if let Some(path) = &a.trace {
        run.write(path, to_jsonl("cu-trace", &trace).as_bytes())?;
    }
    run.say(format!("end: {:?}", result.end));
    run.say(format!("steps: {}", result.steps));
    match &result.output {
        Some(o) => run.say(format!("output: {o}")),
        None => run.say("output: undefined"),
    }
    run.say(format!("consumed: {} bits", result.consumed_prefix.len()));
    if a.emit_pr {
        let pr = reduced_program(&source, &data, a.fuel)?;
        run.say(format!("reduced program: {pr}"));
    }
    Ok(())
}

fn read_space(path: &Path, run: &mut Run) -> Result<ProbabilitySpace> {
    let text = run.read(path)?;
    let file = EventsFile::parse(&text).with_context(|| format!("{}", path.display()))?;
    file.space().with_context(|| format!("{}", path.display()))
}

fn alpha_run_cmd(a: &AlphaRunArgs, run: &mut Run) -> Result<()> {
    run.command = "alpha run".into();
    run.fuel = Some(a.fuel);
    run.seed = Some(a.seed);
    let text = run.read(&a.spec)?;
    let spec = MachineSpec::parse(&text).with_context(|| format!("{}", a.spec.display()))?;
    let machine: AlphaMachine = spec.build()?;
    let id = machine.id();
    let space = match &a.events {
        Some(p) => read_space(p, run)?,
        None => ProbabilitySpace::quiet(),
    };
    let mut net = Network::new(a.seed).with_space(space);
    net.add_machine(machine)?;
    let mut trace = Vec::new();
    let mut rounds = 0;
    while rounds < a.fuel && net.machine(id).expect("added").is_running() {
        let log = net.step()?;
        trace.extend(log.records.into_iter().filter_map(|r| match r.effect {
            Effect::Step { effects } => Some(effects),
            _ => None,
        }));
        rounds += 1;
    }
    if let Some(path) = &a.trace {
        run.write(path, to_jsonl("alpha-trace", &trace).as_bytes())?;
    }
    let m = net.machine(id).expect("added");
    run.say(format!("status: {:?}", m.status()));
    run.say(format!("steps: {}", m.steps()));
    run.say(format!("result: {}", m.result_bits()));
    run.say(format!("work: {}", m.work().literal()));
    Ok(())
}

/// Counts of what a network log shows, after checking its invariants.
#[derive(Default, Serialize)]
struct NetSummary {
    deliveries: usize,
    rendezvous: usize,
    blocked_steps: usize,
    routing_errors: usize,
    shared_rounds: usize,
}

fn net_run_cmd(a: &NetRunArgs, run: &mut Run) -> Result<()> {
    run.command = "net run".into();
    run.rounds = Some(a.rounds);
    let text = run.read(&a.spec)?;
    let spec = NetworkSpec::parse(&text).with_context(|| format!("{}", a.spec.display()))?;
    run.seed = Some(a.seed.unwrap_or(spec.seed));
    let mut net = spec.build(a.seed)?;
    if let Some(p) = &a.events {
        net.set_space(read_space(p, run)?);
    }
    let logs = net.run(a.rounds)?;
    let records = event_log(&logs);
    run.write(&a.log, to_jsonl("net-events", &records).as_bytes())?;

    let mut s = NetSummary::default();
    for r in &records {
        match &r.effect {
            Effect::Delivered {
                issued_step,
                delivered_step,
                ..
            } => {
                if delivered_step < issued_step {
                    bail!("machine {} read a message before it was sent", r.machine);
                }
                s.deliveries += 1;
            }
            Effect::Rendezvous { .. } => s.rendezvous += 1,
            Effect::Blocked { .. } => s.blocked_steps += 1,
            Effect::RoutingError { .. } => s.routing_errors += 1,
            _ => {}
        }
    }
    for log in &logs {
        for shared in &log.shared {
            check_round(shared).map_err(|e| anyhow!("round {} on tape {:?}: {e}", shared.round, shared.tape))?;
            s.shared_rounds += 1;
        }
    }
    run.say(format!("rounds: {}", a.rounds));
    for m in net.machines() {
        let visible = net.visible_work(m.id()).expect("known machine");
        run.say(format!(
            "machine {}: {:?} after {} steps, waited {} rounds, work {:?}, context {:?}, result {:?}",
            m.id(),
            m.status(),
            m.steps(),
            net.waiting_rounds(m.id()),
            visible.word().to_string(),
            context_region(visible),
            m.result_bits().to_string()
        ));
    }
    run.say(format!(
        "deliveries: {}, rendezvous: {}, blocked steps: {}, routing errors: {}, shared rounds serializable: {}",
        s.deliveries, s.rendezvous, s.blocked_steps, s.routing_errors, s.shared_rounds
    ));
    Ok(())
}

/// The context region of a work tape, trailing blanks dropped.
fn context_region(tape: &Tape) -> String {
    let cells: String = (CONTEXT_REGION_START..0).map(|i| tape.read(i).0).collect();
    cells.trim_end_matches(Symbol::BLANK.0).to_string()
}

fn boids_cmd(a: &BoidsArgs, run: &mut Run) -> Result<()> {
    run.command = "scenario boids".into();
    run.seed = Some(a.seed);
    run.rounds = Some(a.steps);
    if a.n == 0 {
        bail!("--n must be at least 1");
    }
    let params = FlockParams::default();
    let result = boids_run(a.n, a.steps, &params, a.seed);
    run.write(&a.out, result.trace_csv().as_bytes())?;
    if let Some(path) = &a.metrics {
        run.write(path, result.metrics_csv().as_bytes())?;
    }
    let first = result.metrics.first().expect("initial metrics");
    let last = result.metrics.last().expect("final metrics");
    run.say(format!("mean distance to barycenter: {:.4} -> {:.4}", first.mean_distance, last.mean_distance));
    run.say(format!("contraction: {:.4}", result.contraction()));
    run.say(format!(
        "steps with min distance >= {}: {:.4}",
        params.min_distance,
        result.spacing_rate(0, params.min_distance)
    ));
    Ok(())
}

fn parse_genome(text: &str) -> Result<Word> {
    let compact: String = text.chars().filter(|c| !c.is_whitespace()).collect();
    if compact.chars().all(|c| c == '0' || c == '1') {
        return Ok(compact.parse()?);
    }
    Ok(dna_to_bits(&compact)?)
}

fn genome_cmd(a: &GenomeArgs, run: &mut Run) -> Result<()> {
    run.command = "scenario genome".into();
    run.seed = Some(a.seed);
    let genome = match (&a.genome, a.random) {
        (Some(p), _) => {
            let text = run.read(p)?;
            parse_genome(&text).with_context(|| format!("{}", p.display()))?
        }
        (None, Some(len)) => random_word(len, a.seed),
        (None, None) => unreachable!("clap requires one"),
    };
    let space = match &a.events {
        Some(p) => read_space(p, run)?,
        None => ProbabilitySpace::quiet(),
    };
    let lineage = genetic_replicate(&genome, &space, a.generations, a.seed)?;
    if !lineage.is_consistent() {
        bail!("lineage does not replay");
    }
    let mut json = serde_json::to_string_pretty(&lineage)?;
    json.push('\n');
    run.write(&a.out, json.as_bytes())?;
    for (i, g) in lineage.generations.iter().enumerate().skip(1) {
        let parent = &lineage.generations[g.parent.expect("children have parents")].genome;
        let d = word_distance(parent, &g.genome);
        if d > g.events.len() {
            bail!("generation {i}: distance {d} exceeds its {} events", g.events.len());
        }
        run.say(format!("generation {i}: {} events, distance to parent {d}", g.events.len()));
    }
    let matrix = phylo_distance_matrix(&lineage.genomes());
    run.say("distance matrix:");
    for row in matrix {
        let cells: Vec<String> = row.iter().map(ToString::to_string).collect();
        run.say(cells.join(" "));
    }
    Ok(())
}
