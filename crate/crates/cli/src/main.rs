//! `caq`: compile, simulate and benchmark layered circuits from the command line.

use caq_core::benchmarks::{run_benchmark, BenchmarkName, BenchmarkSpec};
use caq_core::device::DeviceModel;
use caq_core::io::{compile_output_to_json, read_any_circuit, Num, SCHEMA_VERSION};
use caq_core::pipeline::{compile, CompileOptions, PassList};
use caq_core::sim::{simulate, Mode, NoiseFlags, NoiseModel};
use caq_core::{Error, PauliString, ScheduledCircuit};
use clap::{Args, Parser, Subcommand};
use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "caq", version, about = "Context-aware compilation and crosstalk simulation")]
struct Cli {
    #[command(subcommand)]
    cmd: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Compile a circuit and write the scheduled circuit with pass reports.
    Compile(CompileArgs),
    /// Simulate a raw or compiled circuit under coherent crosstalk.
    Simulate(SimulateArgs),
    /// Run a named benchmark and emit CSV rows plus a JSON summary.
    Bench(BenchArgs),
}

#[derive(Args)]
struct CompileArgs {
    #[arg(long)]
    device: PathBuf,
    #[arg(long)]
    circuit: PathBuf,
    /// Comma-separated passes, e.g. `stratify,schedule,twirl,caec`.
    #[arg(long, default_value = "stratify,schedule")]
    passes: String,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// DD pulse width in ns (device `x_ns` when omitted).
    #[arg(long)]
    pulse_ns: Option<f64>,
    /// Feedforward latency assumed by dynamic-circuit compensation, ns.
    #[arg(long)]
    feedforward_ns: Option<f64>,
    /// Output file; standard output when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SimulateArgs {
    #[arg(long)]
    device: PathBuf,
    #[arg(long)]
    circuit: PathBuf,
    /// Passes applied to raw circuits; compiled files are simulated as is.
    #[arg(long, default_value = "stratify,schedule")]
    passes: String,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Noise terms: any of `zz,stark,parity`, or `all` / `none`.
    #[arg(long, default_value = "all")]
    noise: String,
    /// Sample this many shots instead of reporting exact probabilities only.
    #[arg(long)]
    shots: Option<u64>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct BenchArgs {
    /// ramsey, walsh-nnn, ising, heisenberg, layer-fidelity, bell-dynamic or combo.
    name: String,
    /// Device file; the benchmark's fixture device when omitted.
    #[arg(long)]
    device: Option<PathBuf>,
    /// Comma-separated pipelines (bare, dd, ca-dd, ca-ec, combo).
    #[arg(long)]
    passes: Option<String>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value = "all")]
    noise: String,
    /// `a..b` (inclusive), `a:b:step` or a comma list.
    #[arg(long)]
    depths: Option<String>,
    #[arg(long)]
    twirls: Option<usize>,
    /// `start:stop:step` in ns (inclusive) or a comma list.
    #[arg(long)]
    tau_sweep: Option<String>,
    /// Output directory for `<name>.csv` and `<name>.json`; CSV goes to
    /// standard output when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

enum Failure {
    Config(String),
    Runtime(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Config(_) => 2,
            Failure::Runtime(_) => 3,
        }
    }
}

type CliResult<T> = Result<T, Failure>;

fn config<E: std::fmt::Display>(e: E) -> Failure {
    Failure::Config(e.to_string())
}

/// Compilation and simulation errors are runtime failures unless they stem
/// from the user's configuration.
fn runtime(e: Error) -> Failure {
    match e {
        Error::Config(_) | Error::MissingDuration(_) | Error::InvalidDevice(_) => Failure::Config(e.to_string()),
        other => Failure::Runtime(other.to_string()),
    }
}

fn read(path: &Path) -> CliResult<String> {
    std::fs::read_to_string(path).map_err(|e| Failure::Config(format!("{}: {e}", path.display())))
}

fn load_device(path: &Path) -> CliResult<DeviceModel> {
    DeviceModel::from_json(&read(path)?).map_err(|e| Failure::Config(format!("{}: {e}", path.display())))
}

fn write_out(out: Option<&Path>, text: &str) -> CliResult<()> {
    match out {
        Some(p) => std::fs::write(p, text).map_err(|e| Failure::Runtime(format!("{}: {e}", p.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn with_newline(mut s: String) -> String {
    s.push('\n');
    s
}

fn cmd_compile(a: &CompileArgs) -> CliResult<()> {
    let device = load_device(&a.device)?;
    let passes = PassList::parse(&a.passes).map_err(config)?;
    let cj = read_any_circuit(&read(&a.circuit)?).map_err(config)?;
    let circuit = cj.to_circuit().map_err(config)?;
    let opts = CompileOptions { pulse_ns: a.pulse_ns, feedforward_estimate_ns: a.feedforward_ns };
    let out = compile(&circuit, &device, &passes, a.seed, &opts).map_err(runtime)?;
    let text = compile_output_to_json(&out, &passes, a.seed).map_err(runtime)?;
    write_out(a.out.as_deref(), &with_newline(text))
}

fn load_for_simulation(a: &SimulateArgs, device: &DeviceModel) -> CliResult<ScheduledCircuit> {
    let cj = read_any_circuit(&read(&a.circuit)?).map_err(config)?;
    if cj.layers.is_some() {
        return cj.to_scheduled().map_err(config);
    }
    let circuit = cj.to_circuit().map_err(config)?;
    let passes = PassList::parse(&a.passes).map_err(config)?;
    Ok(compile(&circuit, device, &passes, a.seed, &CompileOptions::default()).map_err(runtime)?.circuit)
}

fn cmd_simulate(a: &SimulateArgs) -> CliResult<()> {
    let device = load_device(&a.device)?;
    let flags = NoiseFlags::parse(&a.noise).map_err(config)?;
    let circuit = load_for_simulation(a, &device)?;
    if circuit.num_qubits != device.num_qubits {
        return Err(Failure::Config(format!(
            "circuit has {} qubits, device {}",
            circuit.num_qubits, device.num_qubits
        )));
    }
    let noise = NoiseModel::from_device(&device, flags);
    let mode = match a.shots {
        Some(shots) => Mode::Shots { shots, seed: a.seed },
        None => Mode::Exact,
    };
    let r = simulate(&circuit, &noise, mode).map_err(runtime)?;
    let n = circuit.num_qubits;
    let z: Vec<Num> = (0..n)
        .map(|q| {
            let mut s = vec!['I'; n];
            s[q] = 'Z';
            let p = PauliString::parse(&s.into_iter().collect::<String>()).expect("valid pauli");
            Num(r.expectation(&p))
        })
        .collect();
    let dist: BTreeMap<String, Num> = r.distribution().into_iter().map(|(k, v)| (k, Num(v))).collect();
    let doc = serde_json::json!({
        "schema_version": SCHEMA_VERSION,
        "noise": { "zz": flags.zz, "stark": flags.stark, "parity": flags.parity },
        "num_qubits": n,
        "makespan": Num(circuit.makespan()),
        "distribution": dist,
        "z_expectations": z,
        "counts": r.counts,
        "seed": a.seed,
    });
    let text = serde_json::to_string_pretty(&doc).map_err(config)?;
    write_out(a.out.as_deref(), &with_newline(text))
}

/// `a..b`, `a:b:step` or `a,b,c`.
fn parse_depths(s: &str) -> CliResult<Vec<usize>> {
    let bad = || Failure::Config(format!("invalid depth list '{s}'"));
    let num = |t: &str| t.trim().parse::<usize>().map_err(|_| bad());
    if let Some((a, b)) = s.split_once("..") {
        let (a, b) = (num(a)?, num(b.trim_start_matches('='))?);
        if b < a {
            return Err(bad());
        }
        return Ok((a..=b).collect());
    }
    let parts: Vec<&str> = s.split(':').collect();
    if parts.len() == 3 {
        let (a, b, step) = (num(parts[0])?, num(parts[1])?, num(parts[2])?);
        if step == 0 || b < a {
            return Err(bad());
        }
        return Ok((a..=b).step_by(step).collect());
    }
    s.split(',').map(num).collect()
}

/// `start:stop:step` (inclusive) or a comma list, in ns.
fn parse_sweep(s: &str) -> CliResult<Vec<f64>> {
    let bad = || Failure::Config(format!("invalid sweep '{s}'"));
    let num = |t: &str| t.trim().parse::<f64>().ok().filter(|x| x.is_finite()).ok_or_else(bad);
    let parts: Vec<&str> = s.split(':').collect();
    if parts.len() == 3 {
        let (a, b, step) = (num(parts[0])?, num(parts[1])?, num(parts[2])?);
        if !(step > 0.0) || b < a {
            return Err(bad());
        }
        let n = ((b - a) / step + 1e-9).floor() as usize;
        return Ok((0..=n).map(|i| a + i as f64 * step).collect());
    }
    let v: Vec<f64> = s.split(',').map(num).collect::<CliResult<_>>()?;
    if v.iter().any(|x| *x < 0.0) {
        return Err(bad());
    }
    Ok(v)
}

fn cmd_bench(a: &BenchArgs) -> CliResult<()> {
    let name = BenchmarkName::parse(&a.name).map_err(config)?;
    let mut spec = BenchmarkSpec::new(name);
    if let Some(p) = &a.device {
        spec.device = load_device(p)?;
    }
    if let Some(p) = &a.passes {
        spec.pipelines = p.split(',').map(|s| s.trim().to_string()).filter(|s| !s.is_empty()).collect();
    }
    if let Some(d) = &a.depths {
        spec.depths = parse_depths(d)?;
    }
    if let Some(t) = a.twirls {
        spec.n_twirls = t;
    }
    if let Some(t) = &a.tau_sweep {
        spec.tau_sweep = parse_sweep(t)?;
    }
    spec.seed = a.seed;
    spec.flags = NoiseFlags::parse(&a.noise).map_err(config)?;
    spec.validate().map_err(config)?;
    let out = run_benchmark(&spec).map_err(runtime)?;
    let summary = serde_json::json!({
        "schema_version": SCHEMA_VERSION,
        "benchmark": name.as_str(),
        "seed": spec.seed,
        "pipelines": spec.pipelines,
        "summary": out.summary,
    });
    let json = with_newline(serde_json::to_string_pretty(&summary).map_err(config)?);
    match &a.out {
        Some(dir) => {
            std::fs::create_dir_all(dir).map_err(|e| Failure::Runtime(format!("{}: {e}", dir.display())))?;
            write_out(Some(&dir.join(format!("{}.csv", name.as_str()))), &out.to_csv())?;
            write_out(Some(&dir.join(format!("{}.json", name.as_str()))), &json)
        }
        None => write_out(None, &out.to_csv()),
    }
}

fn init_threads() -> CliResult<()> {
    let Ok(v) = std::env::var("CAQ_THREADS") else { return Ok(()) };
    let n: usize = v
        .trim()
        .parse()
        .ok()
        .filter(|n| *n > 0)
        .ok_or_else(|| Failure::Config(format!("CAQ_THREADS must be a positive integer, got '{v}'")))?;
    rayon::ThreadPoolBuilder::new().num_threads(n).build_global().map_err(|e| Failure::Runtime(e.to_string()))
}

fn run(cli: Cli) -> CliResult<()> {
    init_threads()?;
    match &cli.cmd {
        Command::Compile(a) => cmd_compile(a),
        Command::Simulate(a) => cmd_simulate(a),
        Command::Bench(a) => cmd_bench(a),
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            let msg = match &f {
                Failure::Config(m) | Failure::Runtime(m) => m,
            };
            eprintln!("error: {msg}");
            ExitCode::from(f.code())
        }
    }
}
