mod config;
mod states;

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use opsent::amplitude::{
    closed_form_coefficients, state_tensor_superposed, ClosedForm, SpinProjection, SpinWeights, StateTensor,
};
use opsent::correlations::{embed_3d, AnalyzerSetting, Formalism, Qubit2d, Spin1, TripleCorrelator};
use opsent::entanglement::{classify, to_linear_basis, EntanglementReport};
use opsent::kinematics::{build_event, DalitzPoint, Orientation, PhotonTriple};
use opsent::search::{
    find_hdet_zeros, optimize_settings, parse_spin_weights, sample_events, scan_dalitz, BellObjective, HdetSearch,
    Observable, QuantizationPolicy, SampleOptions, ScanSpec, SettingsSearch, Weighting,
};
use serde::{Deserialize, Serialize};

use config::{Format, Resolved, RunConfig};
use states::NamedState;

/// Polarization entanglement of the three photons from ortho-positronium
/// decay.
///
/// Energies are Dalitz fractions x_i = 2 E_i / m in [0, 1] with
/// x1 + x2 + x3 = 2; angles are in radians. Exit codes: 0 success,
/// 1 I/O error, 2 invalid input, 3 numerical failure (no convergence or
/// sampling envelope exceeded).
#[derive(Debug, Parser)]
#[command(name = "opsent", version)]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
#[command(next_help_heading = "Run options")]
pub struct Global {
    /// JSON run configuration (keys: tolerances, format, output, seed,
    /// threads); flags override it
    #[arg(long, global = true, value_name = "FILE")]
    config: Option<PathBuf>,
    /// Output format [default: json; csv for scan; jsonl for sample]
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    /// Write output to this file instead of stdout
    #[arg(short, long, global = true, value_name = "FILE")]
    pub output: Option<PathBuf>,
    /// Master RNG seed for bell restarts and sample [default: 0]
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Worker threads [default: all cores]
    #[arg(long, global = true, env = "OPSENT_THREADS")]
    pub threads: Option<usize>,
    /// Rank-1 threshold on the second Schmidt coefficient of a cut (dimensionless) [default: 1e-9]
    #[arg(long, global = true)]
    pub rank_tol: Option<f64>,
    /// Three-tangle threshold separating GHZ from W class (dimensionless) [default: 1e-10]
    #[arg(long, global = true)]
    pub tangle_tol: Option<f64>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Polarization state of one decay event, with the closed-form comparison
    State(StateArgs),
    /// Entanglement class, hyperdeterminant and three-tangle of a state
    Classify(StateSource),
    /// Evaluate an observable on a grid over the Dalitz triangle
    Scan(ScanArgs),
    /// Search for zeros of the hyperdeterminant and classify them
    Search(SearchArgs),
    /// Maximize a Mermin or Svetlichny combination over analyzer axes
    Bell(BellArgs),
    /// Generate Monte Carlo decay events
    Sample(SampleArgs),
}

#[derive(Debug, Args)]
struct Frame {
    /// ZYZ Euler angle alpha of the event orientation (rad)
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    alpha: f64,
    /// ZYZ Euler angle beta of the event orientation (rad)
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    beta: f64,
    /// ZYZ Euler angle gamma of the event orientation (rad)
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    gamma: f64,
}

impl Frame {
    fn orientation(&self) -> Orientation {
        Orientation::new(self.alpha, self.beta, self.gamma)
    }
}

#[derive(Debug, Args)]
struct Spin {
    /// Positronium spin projection on the lab z axis: -1, 0 or +1
    #[arg(long, default_value = "0", allow_hyphen_values = true)]
    sz: SpinProjection,
    /// Superposition weights "w-1,w0,w+1" of the spin projections, each
    /// "re" or "re:im"; replaces --sz
    #[arg(long, value_name = "WEIGHTS", allow_hyphen_values = true)]
    spin_weights: Option<String>,
}

impl Spin {
    fn weights(&self) -> Result<SpinWeights, Failure> {
        match &self.spin_weights {
            Some(s) => Ok(parse_spin_weights(s)?),
            None => Ok(self.sz.into()),
        }
    }
}

#[derive(Debug, Args)]
struct StateArgs {
    /// Energy fraction of photon 1, 2 E1 / m (dimensionless)
    #[arg(long)]
    x1: f64,
    /// Energy fraction of photon 2, 2 E2 / m (dimensionless)
    #[arg(long)]
    x2: f64,
    #[command(flatten)]
    frame: Frame,
    #[command(flatten)]
    spin: Spin,
}

/// Either a decay event (`--x1 --x2` with orientation and spin) or a
/// named reference state.
#[derive(Debug, Args)]
struct StateSource {
    /// Energy fraction of photon 1, 2 E1 / m (dimensionless)
    #[arg(long, requires = "x2", conflicts_with = "state")]
    x1: Option<f64>,
    /// Energy fraction of photon 2, 2 E2 / m (dimensionless)
    #[arg(long, requires = "x1", conflicts_with = "state")]
    x2: Option<f64>,
    #[command(flatten)]
    frame: Frame,
    #[command(flatten)]
    spin: Spin,
    /// Named state: ghz, w, product, para, singlet:<alpha> (alpha in rad)
    #[arg(long, required_unless_present = "x1")]
    state: Option<String>,
}

enum Source {
    Decay { event: PhotonTriple, state: StateTensor },
    Named(NamedState),
}

impl StateSource {
    fn resolve(&self) -> Result<Source, Failure> {
        if let Some(name) = &self.state {
            return Ok(Source::Named(name.parse()?));
        }
        let (Some(x1), Some(x2)) = (self.x1, self.x2) else {
            return Err(Failure::validation(
                "either --state or --x1 and --x2 are required".into(),
            ));
        };
        let event = build_event(DalitzPoint::new(x1, x2)?, self.frame.orientation())?;
        let state = state_tensor_superposed(&event, &self.spin.weights()?)?;
        Ok(Source::Decay { event, state })
    }
}

#[derive(Debug, Args)]
struct ScanArgs {
    /// Grid points per Dalitz axis (spacing 1 / (n - 1)), at least 2
    #[arg(long, default_value_t = 101)]
    n: usize,
    /// Positronium spin projection on the lab z axis: -1, 0 or +1
    #[arg(long, default_value = "0", allow_hyphen_values = true)]
    sz: SpinProjection,
    #[command(flatten)]
    frame: Frame,
    /// Observable: tangle, hdet, class, weight or correlator
    #[arg(long, default_value = "tangle")]
    observable: String,
    /// Analyzer setting JSON file for --observable correlator
    #[arg(long, value_name = "FILE")]
    setting: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct SearchArgs {
    /// Frame policy: plane-normal (quantization axis along the decay-plane
    /// normal) or fixed-z (search also over plane orientations)
    #[arg(long, default_value = "plane-normal")]
    policy: QuantizationPolicy,
    #[command(flatten)]
    spin: Spin,
    /// Coarse grid points per Dalitz axis
    #[arg(long, default_value_t = 51)]
    grid: usize,
    /// Grid steps in beta over [0, pi] for the fixed-z policy
    #[arg(long, default_value_t = 5)]
    beta_steps: usize,
    /// Grid steps in gamma over [0, 2 pi) for the fixed-z policy
    #[arg(long, default_value_t = 8)]
    gamma_steps: usize,
    /// Coarse-grid |Hdet| below which a local minimum is refined (dimensionless)
    #[arg(long, default_value = "1e-4")]
    trigger: f64,
    /// Refined |Hdet| below which a point counts as a zero (dimensionless)
    #[arg(long, default_value = "1e-10")]
    zero_tol: f64,
    /// Nelder-Mead iteration budget per seed
    #[arg(long, default_value_t = 500)]
    max_iter: usize,
}

#[derive(Debug, Args)]
struct BellArgs {
    #[command(flatten)]
    source: StateSource,
    /// Objective: mermin or svetlichny
    #[arg(long, default_value = "mermin")]
    objective: BellObjective,
    /// Correlator: qubit-2d (Pauli operators on the helicity qubits) or
    /// spin1-3d (spin-1 operators on polarization vectors; decay events only)
    #[arg(long, default_value = "qubit-2d")]
    formalism: String,
    /// Nelder-Mead restarts from random axes
    #[arg(long, default_value_t = 20)]
    restarts: usize,
    /// Analyzer axis "x,y,z" of photon 1, for two-photon states (normalized)
    #[arg(long, allow_hyphen_values = true)]
    a: Option<String>,
    /// Analyzer axis "x,y,z" of photon 2, for two-photon states (normalized)
    #[arg(long, allow_hyphen_values = true)]
    b: Option<String>,
}

#[derive(Debug, Args)]
struct SampleArgs {
    /// Number of events to generate
    #[arg(long, default_value_t = 1000)]
    n: usize,
    /// Weighting: uniform (flat in Dalitz plane and orientation) or
    /// matrix-element (rejection sampling on the decay weight)
    #[arg(long, default_value = "matrix-element")]
    weighting: Weighting,
    /// Fixed spin projection -1, 0 or +1 [default: drawn per event]
    #[arg(long, allow_hyphen_values = true)]
    sz: Option<SpinProjection>,
    /// Uniform events in the envelope prescan
    #[arg(long, default_value_t = 10_000)]
    envelope_points: usize,
    /// Factor applied to the prescan maximum weight
    #[arg(long, default_value_t = 1.2)]
    envelope_safety: f64,
}

/// Error carrying the process exit code.
#[derive(Debug)]
pub struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    pub fn io(message: String) -> Self {
        Self { code: 1, message }
    }

    pub fn validation(message: String) -> Self {
        Self { code: 2, message }
    }
}

impl From<opsent::Error> for Failure {
    fn from(e: opsent::Error) -> Self {
        Self {
            code: if e.is_numerical() { 3 } else { 2 },
            message: e.to_string(),
        }
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Self::io(e.to_string())
    }
}

/// Output of `state`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StateOutput {
    pub event: PhotonTriple,
    pub spin_weights: SpinWeights,
    /// Unnormalized amplitudes in the circular (helicity) basis.
    pub state: StateTensor,
    /// Normalized state in the linear basis.
    pub linear: StateTensor,
    /// Present when the spin state is a single projection.
    pub closed_form: Option<ClosedForm>,
}

/// Output of `bell` for two-photon states.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PairCorrelation {
    pub state: String,
    pub a: [f64; 3],
    pub b: [f64; 3],
    pub value: f64,
    /// Closed-form value for the deformed singlet.
    pub closed_form: Option<f64>,
}

fn open_output(run: &Resolved) -> Result<Box<dyn Write>, Failure> {
    Ok(match &run.output {
        Some(path) => {
            Box::new(BufWriter::new(File::create(path).map_err(|e| {
                Failure::io(format!("cannot create {}: {e}", path.display()))
            })?))
        }
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn write_json<T: Serialize>(run: &Resolved, value: &T) -> Result<(), Failure> {
    let mut out = open_output(run)?;
    serde_json::to_writer_pretty(&mut out, value).map_err(|e| Failure::io(e.to_string()))?;
    writeln!(out)?;
    out.flush()?;
    Ok(())
}

fn cmd_state(args: &StateArgs, run: &Resolved) -> Result<(), Failure> {
    run.format(&[Format::Json], "state")?;
    let event = build_event(DalitzPoint::new(args.x1, args.x2)?, args.frame.orientation())?;
    let weights = args.spin.weights()?;
    let state = state_tensor_superposed(&event, &weights)?;
    let closed_form = match args.spin.spin_weights {
        None => Some(closed_form_coefficients(&event, args.spin.sz)?),
        Some(_) => SpinProjection::ALL
            .into_iter()
            .find(|s| SpinWeights::from(*s) == weights)
            .map(|s| closed_form_coefficients(&event, s))
            .transpose()?,
    };
    let linear = to_linear_basis(&state.normalized()?)?;
    write_json(
        run,
        &StateOutput {
            event,
            spin_weights: weights,
            state,
            linear,
            closed_form,
        },
    )
}

fn cmd_classify(args: &StateSource, run: &Resolved) -> Result<(), Failure> {
    run.format(&[Format::Json], "classify")?;
    let report: EntanglementReport = match args.resolve()? {
        Source::Decay { state, .. } => classify(&state, &run.tolerances)?,
        Source::Named(named) => classify(named.three_photon("classify")?, &run.tolerances)?,
    };
    write_json(run, &report)
}

fn parse_observable(args: &ScanArgs) -> Result<Observable, Failure> {
    Ok(match args.observable.as_str() {
        "tangle" => Observable::Tangle,
        "hdet" => Observable::Hdet,
        "class" => Observable::Class,
        "weight" => Observable::Weight,
        "correlator" => {
            let Some(path) = &args.setting else {
                return Err(Failure::validation("--observable correlator needs --setting".into()));
            };
            let text = std::fs::read_to_string(path)
                .map_err(|e| Failure::io(format!("cannot read {}: {e}", path.display())))?;
            let setting: AnalyzerSetting = serde_json::from_str(&text)
                .map_err(|e| Failure::validation(format!("setting {}: {e}", path.display())))?;
            Observable::Correlator(setting)
        }
        other => {
            return Err(Failure::validation(format!(
                "unknown observable {other:?} (expected tangle, hdet, class, weight or correlator)"
            )))
        }
    })
}

fn cmd_scan(args: &ScanArgs, run: &Resolved) -> Result<(), Failure> {
    let format = run.format(&[Format::Csv, Format::Json], "scan")?;
    let spec = ScanSpec {
        n: args.n,
        spin: args.sz,
        orientation: args.frame.orientation(),
        observable: parse_observable(args)?,
        tolerances: run.tolerances,
    };
    let table = scan_dalitz(&spec)?;
    if table.skipped > 0 {
        eprintln!("scan: {} degenerate grid points skipped", table.skipped);
    }
    match format {
        Format::Csv => {
            let mut out = open_output(run)?;
            table.write_csv(&mut out)?;
            out.flush()?;
            Ok(())
        }
        _ => write_json(run, &table),
    }
}

fn cmd_search(args: &SearchArgs, run: &Resolved) -> Result<(), Failure> {
    run.format(&[Format::Json], "search")?;
    for (name, v) in [("trigger", args.trigger), ("zero-tol", args.zero_tol)] {
        if !(v > 0.0 && v.is_finite()) {
            return Err(Failure::validation(format!(
                "--{name} must be strictly positive, got {v}"
            )));
        }
    }
    let mut search = HdetSearch::new(args.spin.weights()?, args.policy);
    search.grid = args.grid;
    search.orientation_grid = [args.beta_steps, args.gamma_steps];
    search.trigger = args.trigger;
    search.zero_tol = args.zero_tol;
    search.tolerances = run.tolerances;
    search.refine.max_iter = args.max_iter;
    let result = find_hdet_zeros(&search)?;
    eprintln!(
        "search: {} seeds, {} zeros ({} W class), {} not converged",
        result.seeds,
        result.zeros().len(),
        result.w_class().len(),
        result.not_converged
    );
    write_json(run, &result)
}

fn cmd_bell(args: &BellArgs, run: &Resolved) -> Result<(), Failure> {
    run.format(&[Format::Json], "bell")?;
    let formalism: Formalism = args.formalism.replace('-', "_").parse()?;
    let search = SettingsSearch::new(args.objective, args.restarts, run.seed);
    let optimum = match (args.source.resolve()?, formalism) {
        (Source::Named(NamedState::Pair { name, state, alpha }), _) => {
            let (Some(a), Some(b)) = (&args.a, &args.b) else {
                return Err(Failure::validation(format!(
                    "{name} is a two-photon state: give analyzer axes with --a and --b"
                )));
            };
            let (a, b) = (opsent::search::parse_axis(a)?, opsent::search::parse_axis(b)?);
            let value = opsent::correlations::two_qubit_correlation(&state, &a, &b)?;
            let closed_form = alpha.map(|al| opsent::correlations::deformed_correlation_closed(al, &a, &b));
            return write_json(
                run,
                &PairCorrelation {
                    state: name,
                    a: a.into(),
                    b: b.into(),
                    value,
                    closed_form,
                },
            );
        }
        (Source::Named(named), Formalism::Qubit2d) => {
            let state = named.three_photon("bell")?.normalized()?;
            optimize_settings(
                &Qubit2d {
                    state: &state,
                    local_bases: None,
                },
                &search,
            )?
        }
        (Source::Named(_), Formalism::Spin13d) => {
            return Err(Failure::validation(
                "the spin-1 formalism needs photon momenta: give --x1 and --x2 instead of --state".into(),
            ))
        }
        (Source::Decay { state, .. }, Formalism::Qubit2d) => {
            let state = state.normalized()?;
            optimize_settings(
                &Qubit2d {
                    state: &state,
                    local_bases: None,
                },
                &search,
            )?
        }
        (Source::Decay { event, state }, Formalism::Spin13d) => {
            let embedded = embed_3d(&state, &event)?.normalized()?;
            let corr: &(dyn TripleCorrelator + Sync) = &Spin1(&embedded);
            optimize_settings(corr, &search)?
        }
    };
    write_json(run, &optimum)
}

fn cmd_sample(args: &SampleArgs, run: &Resolved) -> Result<(), Failure> {
    let format = run.format(&[Format::Jsonl, Format::Json], "sample")?;
    let mut opts = SampleOptions::new(args.n, args.weighting, run.seed);
    opts.spin = args.sz;
    opts.envelope_points = args.envelope_points;
    opts.envelope_safety = args.envelope_safety;
    let sampled = sample_events(&opts)?;
    eprintln!(
        "sample: {} events from {} trials, acceptance rate {:.6}{}",
        sampled.events.len(),
        sampled.trials,
        sampled.acceptance_rate,
        sampled
            .envelope
            .map(|e| format!(", envelope {e:.6e}"))
            .unwrap_or_default()
    );
    match format {
        Format::Jsonl => {
            let mut out = open_output(run)?;
            for e in &sampled.events {
                serde_json::to_writer(&mut out, e).map_err(|e| Failure::io(e.to_string()))?;
                writeln!(out)?;
            }
            out.flush()?;
            Ok(())
        }
        _ => write_json(run, &sampled.events),
    }
}

fn run(cli: Cli) -> Result<(), Failure> {
    let cfg = match &cli.global.config {
        Some(path) => RunConfig::load(path)?,
        None => RunConfig::default(),
    };
    let run = Resolved::merge(&cli.global, cfg)?;
    if let Some(n) = run.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| Failure::validation(format!("cannot set up {n} threads: {e}")))?;
    }
    match &cli.command {
        Command::State(a) => cmd_state(a, &run),
        Command::Classify(a) => cmd_classify(a, &run),
        Command::Scan(a) => cmd_scan(a, &run),
        Command::Search(a) => cmd_search(a, &run),
        Command::Bell(a) => cmd_bell(a, &run),
        Command::Sample(a) => cmd_sample(a, &run),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
