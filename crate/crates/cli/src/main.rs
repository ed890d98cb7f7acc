//! `qsat`: placements, single-slot solves and full scenario runs.
//!
//! Exit codes: 0 success, 2 config or parse error, 3 I/O error, 4 solver refusal.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use qsat::harness::{aggregate_metrics, export_csv, parse_start, run_scenario, HarnessError, ScenarioConfig};
use qsat::orbital::{format_tle, generate_walker_constellation, WalkerSpec};
use qsat::scheduler::{reduce_3dm_to_qssp, verify_feasible, Capacity, QsspInstance, SolveError, Solver, ThreeDmInstance};
use qsat::topology::{place_population_centers, place_random_on_land, read_population_centers, LandMask};

#[derive(Parser)]
#[command(name = "qsat", version, about = "Satellite entanglement-distribution scheduling simulator")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a scenario and write per_slot, assignments, longevity and stations CSVs.
    Run(RunArgs),
    /// Place ground stations and print them as JSON.
    Place(PlaceArgs),
    /// Solve one instance JSON and print the assignment as JSON.
    SolveOnce(SolveArgs),
    /// Print a Walker constellation as three-line TLE records.
    GenWalker(WalkerArgs),
    /// Reduce a 3D-matching hypergraph to a scheduling instance and print it as JSON.
    #[command(name = "reduce-3dm")]
    Reduce3dm(ReduceArgs),
}

#[derive(Args)]
struct RunArgs {
    /// Scenario config JSON.
    #[arg(long)]
    config: PathBuf,
    /// Overrides the config's solver.
    #[arg(long)]
    solver: Option<Solver>,
    /// Output directory; defaults to the config's output_dir, then ./out.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct PlaceArgs {
    /// Number of stations.
    #[arg(long)]
    count: usize,
    /// Seed for uniform placement on land.
    #[arg(long, conflicts_with = "population", required_unless_present = "population")]
    seed: Option<u64>,
    /// Land mask file; the bundled mask by default.
    #[arg(long, requires = "seed")]
    mask: Option<PathBuf>,
    /// Population CSV; places at the most populous centres.
    #[arg(long)]
    population: Option<PathBuf>,
    /// Receivers per station, a number or "unbounded".
    #[arg(long, default_value = "1", value_parser = parse_capacity)]
    receivers: Capacity,
}

#[derive(Args)]
struct SolveArgs {
    /// Instance JSON.
    #[arg(long)]
    instance: PathBuf,
    #[arg(long)]
    solver: Solver,
    /// Seed for the random and local_greedy solvers.
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Args)]
struct WalkerArgs {
    #[arg(long)]
    planes: u32,
    #[arg(long)]
    sats_per_plane: u32,
    #[arg(long)]
    inclination_deg: f64,
    #[arg(long)]
    altitude_m: f64,
    #[arg(long, default_value_t = 0)]
    phasing: u32,
    /// Element epoch, RFC 3339 or YYYY-MM-DD.
    #[arg(long)]
    epoch: String,
}

#[derive(Args)]
struct ReduceArgs {
    /// Hypergraph JSON: {"v1": [..], "v2": [..], "v3": [..], "edges": [[a, b, c], ..]}.
    #[arg(long)]
    hypergraph: PathBuf,
}

fn parse_capacity(s: &str) -> Result<Capacity, String> {
    if s == "unbounded" {
        return Ok(Capacity::Unbounded);
    }
    s.parse::<u32>()
        .map(Capacity::Finite)
        .map_err(|_| format!("expected a non-negative integer or \"unbounded\", got {s:?}"))
}

struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn parse(message: impl Into<String>) -> Self {
        Self { code: 2, message: message.into() }
    }

    fn io(path: &Path, e: impl std::fmt::Display) -> Self {
        Self { code: 3, message: format!("{}: {e}", path.display()) }
    }

    fn refusal(message: impl Into<String>) -> Self {
        Self { code: 4, message: message.into() }
    }
}

impl From<HarnessError> for Failure {
    fn from(e: HarnessError) -> Self {
        let code = match &e {
            HarnessError::Config(_) | HarnessError::Input { .. } | HarnessError::Propagation { .. } => 2,
            HarnessError::Io { .. } => 3,
            HarnessError::Solve { .. } => 4,
        };
        Self { code, message: e.to_string() }
    }
}

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::io(path, e))
}

fn emit(text: &str) -> Result<(), Failure> {
    let mut out = std::io::stdout().lock();
    out.write_all(text.as_bytes())
        .and_then(|()| out.flush())
        .map_err(|e| Failure::io(Path::new("<stdout>"), e))
}

fn to_json<T: serde::Serialize>(v: &T) -> String {
    serde_json::to_string_pretty(v).expect("plain data serializes") + "\n"
}

fn cmd_run(args: RunArgs) -> Result<(), Failure> {
    let mut cfg = ScenarioConfig::load(&args.config)?;
    if let Some(s) = args.solver {
        cfg.solver = s;
    }
    let out = match (args.out, &cfg.output_dir) {
        (Some(o), _) => o,
        (None, Some(o)) => cfg.resolve(o),
        (None, None) => PathBuf::from("out"),
    };
    let series = run_scenario(&cfg)?;
    let files = export_csv(&series, &out)?;
    let m = aggregate_metrics(&series);
    let fmt = |f: Option<f64>| f.map_or("n/a".to_string(), |v| format!("{v:.4}"));
    eprintln!(
        "{}: {} slots, mean rate {:.4e} ebits/s, mean connections {:.2}, fidelity day {} night {}",
        cfg.solver,
        m.slot_count,
        m.mean_rate,
        m.mean_connections,
        fmt(m.day_fidelity),
        fmt(m.night_fidelity)
    );
    for f in files {
        eprintln!("wrote {}", f.display());
    }
    Ok(())
}

fn cmd_place(args: PlaceArgs) -> Result<(), Failure> {
    let stations = if let Some(path) = &args.population {
        let text = read(path)?;
        let rows = read_population_centers(text.as_bytes()).map_err(|e| Failure::parse(format!("{}: {e}", path.display())))?;
        place_population_centers(args.count, &rows, args.receivers).map_err(|e| Failure::parse(e.to_string()))?
    } else {
        let path = args.mask.clone().unwrap_or_else(|| qsat::bundled_data_dir().join("land_mask.bin"));
        let bytes = fs::read(&path).map_err(|e| Failure::io(&path, e))?;
        let mask = LandMask::from_bytes(bytes).map_err(|e| Failure::parse(format!("{}: {e}", path.display())))?;
        let seed = args.seed.expect("clap requires seed without population");
        place_random_on_land(args.count, seed, &mask, args.receivers).map_err(|e| Failure::parse(e.to_string()))?
    };
    emit(&to_json(&stations))
}

fn cmd_solve_once(args: SolveArgs) -> Result<(), Failure> {
    let text = read(&args.instance)?;
    let inst: QsspInstance =
        serde_json::from_str(&text).map_err(|e| Failure::parse(format!("{}: {e}", args.instance.display())))?;
    let x = args.solver.solve(&inst, args.seed).map_err(|e| match e {
        SolveError::Exact(e) => Failure::refusal(e.to_string()),
    })?;
    let report = verify_feasible(&inst, &x).map_err(|e| Failure::parse(e.to_string()))?;
    if !report.is_feasible() {
        let v: Vec<String> = report.violations.iter().map(ToString::to_string).collect();
        return Err(Failure::parse(format!("solver returned an infeasible assignment: {}", v.join("; "))));
    }
    eprintln!("{}: objective {} with {} connections", args.solver, x.objective, x.total_connections());
    emit(&to_json(&x))
}

fn cmd_gen_walker(args: WalkerArgs) -> Result<(), Failure> {
    if args.planes == 0 || args.sats_per_plane == 0 || !(args.altitude_m > 0.0) {
        return Err(Failure::parse("planes, sats-per-plane and altitude-m must be positive"));
    }
    let epoch = parse_start(&args.epoch).map_err(|e| Failure::parse(e.to_string()))?;
    let spec = WalkerSpec {
        planes: args.planes,
        sats_per_plane: args.sats_per_plane,
        inclination_deg: args.inclination_deg,
        altitude_m: args.altitude_m,
        phasing: args.phasing,
    };
    let mut text = String::new();
    for (k, el) in generate_walker_constellation(&spec, epoch).iter().enumerate() {
        text += &format_tle(el, k as u32 + 1);
    }
    emit(&text)
}

fn cmd_reduce_3dm(args: ReduceArgs) -> Result<(), Failure> {
    let text = read(&args.hypergraph)?;
    let h: ThreeDmInstance =
        serde_json::from_str(&text).map_err(|e| Failure::parse(format!("{}: {e}", args.hypergraph.display())))?;
    let (instance, correspondence) = reduce_3dm_to_qssp(&h).map_err(|e| Failure::parse(e.to_string()))?;
    eprintln!(
        "{} hyperedges -> {} satellites, {} stations, {} pairs",
        h.edges.len(),
        instance.satellites().len(),
        instance.stations().len(),
        instance.pairs().len()
    );
    emit(&to_json(&serde_json::json!({
        "instance": instance,
        "correspondence": correspondence,
    })))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Run(a) => cmd_run(a),
        Command::Place(a) => cmd_place(a),
        Command::SolveOnce(a) => cmd_solve_once(a),
        Command::GenWalker(a) => cmd_gen_walker(a),
        Command::Reduce3dm(a) => cmd_reduce_3dm(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
