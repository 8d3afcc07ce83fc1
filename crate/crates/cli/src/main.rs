use std::fs::File;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, Context};
use clap::{Args, Parser, Subcommand};
use serde::{Deserialize, Serialize};
use num_rational::Ratio;
use serde_json::{json, Value};

use fragmentia::circuit::{FloquetCircuit, Setup};
use fragmentia::clifford::CliffordClass;
use fragmentia::dense::{entropy_realizations, fit_exponent, sff_experiment, EntropyTraces, SffTrace};
use fragmentia::enumeration::{
    exact_1wall_probability, exact_2wall_branches, exact_2wall_probability, montecarlo_wall_prob, one_wall_census,
    two_wall_census, DressingCensus, WallCensus,
};
use fragmentia::walls::{fragment_decomposition, localisation_length, scan_circuit};

const VERSION: &str = concat!(env!("CARGO_PKG_VERSION"), "-", env!("FRAGMENTIA_GIT_DESCRIBE"));

/// Floquet-Clifford wall, entropy and spectral experiments.
#[derive(Parser, Debug)]
#[command(name = "fragmentia", version = VERSION)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "command", rename_all = "kebab-case")]
enum Command {
    /// Monte Carlo and exhaustive k-wall probabilities.
    WallProb(WallProbArgs),
    /// Wall reports and fragment decomposition of sampled circuits.
    Scan(ScanArgs),
    /// Half-chain entanglement entropy traces.
    Entropy(EntropyArgs),
    /// Spectral form factor of first-period unitaries.
    Sff(SffArgs),
    /// Runs a JSON RunConfig.
    #[serde(skip)]
    Run {
        #[arg(long)]
        config: PathBuf,
    },
}

fn default_samples() -> u64 {
    1_000_000
}
fn default_kmax() -> usize {
    3
}
fn default_realizations() -> usize {
    1000
}
fn default_tmax() -> usize {
    200
}
fn default_dt() -> usize {
    1
}
fn default_one() -> usize {
    1
}

#[derive(Args, Debug, Clone, Serialize, Deserialize)]
struct Output {
    /// Output file; `-` writes to stdout and the manifest to stderr.
    #[arg(long, default_value = "-")]
    #[serde(default = "stdout_path")]
    out: PathBuf,
}

fn stdout_path() -> PathBuf {
    PathBuf::from("-")
}

#[derive(Args, Debug, Clone, Serialize, Deserialize)]
struct WallProbArgs {
    #[arg(long)]
    k: usize,
    #[arg(long, default_value_t = default_samples())]
    #[serde(default = "default_samples")]
    samples: u64,
    /// Required unless only `--exact` is requested.
    #[arg(long)]
    #[serde(default)]
    seed: Option<u64>,
    /// Also run the exhaustive dressing census (k = 1, 2).
    #[arg(long)]
    #[serde(default)]
    exact: bool,
    #[command(flatten)]
    #[serde(flatten)]
    output: Output,
}

#[derive(Args, Debug, Clone, Serialize, Deserialize)]
struct ScanArgs {
    #[arg(long, required_unless_present = "circuit")]
    #[serde(default)]
    n: Option<usize>,
    #[arg(long, default_value_t = 0.0)]
    #[serde(default)]
    p: f64,
    #[arg(long, required_unless_present = "circuit")]
    #[serde(default)]
    seed: Option<u64>,
    #[arg(long, default_value_t = default_kmax())]
    #[serde(default = "default_kmax")]
    kmax: usize,
    /// Independent realizations to aggregate.
    #[arg(long, default_value_t = default_one())]
    #[serde(default = "default_one")]
    realizations: usize,
    /// Scan a circuit saved as JSON instead of sampling one.
    #[arg(long, conflicts_with_all = ["n", "seed"])]
    #[serde(default)]
    circuit: Option<PathBuf>,
    #[command(flatten)]
    #[serde(flatten)]
    output: Output,
}

#[derive(Args, Debug, Clone, Serialize, Deserialize)]
struct EnsembleArgs {
    #[arg(long)]
    setup: Setup,
    #[arg(long)]
    n: usize,
    #[arg(long)]
    p: f64,
    #[arg(long, default_value_t = default_realizations())]
    #[serde(default = "default_realizations")]
    realizations: usize,
    #[arg(long, default_value_t = default_tmax())]
    #[serde(default = "default_tmax")]
    tmax: usize,
    #[arg(long)]
    seed: u64,
}

#[derive(Args, Debug, Clone, Serialize, Deserialize)]
struct EntropyArgs {
    #[command(flatten)]
    #[serde(flatten)]
    ensemble: EnsembleArgs,
    /// Write one row per realization and time instead of ensemble statistics.
    #[arg(long)]
    #[serde(default)]
    per_realization: bool,
    #[command(flatten)]
    #[serde(flatten)]
    output: Output,
}

#[derive(Args, Debug, Clone, Serialize, Deserialize)]
struct SffArgs {
    #[command(flatten)]
    #[serde(flatten)]
    ensemble: EnsembleArgs,
    /// Half-width of the smearing window.
    #[arg(long, default_value_t = default_dt())]
    #[serde(default = "default_dt")]
    dt: usize,
    #[command(flatten)]
    #[serde(flatten)]
    output: Output,
}

/// Failure classes mapped onto the exit-code contract.
#[derive(Debug)]
enum Failure {
    Threshold(String),
    Usage(anyhow::Error),
    Guard(anyhow::Error),
    Other(anyhow::Error),
}

impl From<anyhow::Error> for Failure {
    fn from(e: anyhow::Error) -> Self {
        match e.downcast_ref::<fragmentia::Error>() {
            Some(fragmentia::Error::ResourceGuard(_)) => Failure::Guard(e),
            Some(fragmentia::Error::InvalidParameter(_) | fragmentia::Error::Parse(_)) => Failure::Usage(e),
            _ => Failure::Other(e),
        }
    }
}

impl From<fragmentia::Error> for Failure {
    fn from(e: fragmentia::Error) -> Self {
        anyhow::Error::from(e).into()
    }
}

type Outcome = std::result::Result<(), Failure>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Err(e) = configure_threads() {
        eprintln!("error: {e:#}");
        return ExitCode::from(2);
    }
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Threshold(msg)) => {
            eprintln!("threshold breach: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Usage(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
        Err(Failure::Guard(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(3)
        }
        Err(Failure::Other(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}

fn configure_threads() -> anyhow::Result<()> {
    let Ok(v) = std::env::var("FRAGMENTIA_THREADS") else {
        return Ok(());
    };
    let threads: usize = v.parse().with_context(|| format!("FRAGMENTIA_THREADS={v:?}"))?;
    rayon::ThreadPoolBuilder::new().num_threads(threads).build_global()?;
    Ok(())
}

fn run(cmd: Command) -> Outcome {
    match cmd {
        Command::WallProb(a) => wall_prob(&a),
        Command::Scan(a) => scan(&a),
        Command::Entropy(a) => entropy(&a),
        Command::Sff(a) => sff(&a),
        Command::Run { config } => {
            let text = std::fs::read_to_string(&config)
                .with_context(|| format!("reading {}", config.display()))
                .map_err(Failure::Usage)?;
            let cmd: Command = serde_json::from_str(&text)
                .with_context(|| format!("parsing {}", config.display()))
                .map_err(Failure::Usage)?;
            run(cmd)
        }
    }
}

fn writer(path: &Path) -> anyhow::Result<Box<dyn Write>> {
    if path == Path::new("-") {
        Ok(Box::new(io::stdout().lock()))
    } else {
        let f = File::create(path).with_context(|| format!("creating {}", path.display()))?;
        Ok(Box::new(io::BufWriter::new(f)))
    }
}

fn write_csv<const N: usize>(path: &Path, header: [&str; N], rows: &[[String; N]]) -> anyhow::Result<()> {
    let mut w = csv::Writer::from_writer(writer(path)?);
    w.write_record(header)?;
    for r in rows {
        w.write_record(r)?;
    }
    w.flush()?;
    Ok(())
}

/// `<out>.manifest.json` next to a file output, or one line on stderr.
fn write_manifest(path: &Path, command: &str, parameters: &impl Serialize, extra: Value) -> anyhow::Result<()> {
    let manifest = json!({
        "command": command,
        "version": VERSION,
        "parameters": parameters,
        "results": extra,
    });
    if path == Path::new("-") {
        eprintln!("{}", serde_json::to_string(&manifest)?);
    } else {
        let mut name = path.as_os_str().to_owned();
        name.push(".manifest.json");
        std::fs::write(&name, serde_json::to_string_pretty(&manifest)? + "\n")?;
    }
    Ok(())
}

const WALL_HEADER: [&str; 8] = ["k", "method", "samples", "hits", "estimate", "stderr", "exact", "sigma_deviation"];

fn ratio(r: Ratio<i64>) -> f64 {
    *r.numer() as f64 / *r.denom() as f64
}

/// Census rows carry the dressing counts of their template; `samples` and
/// `hits` stay empty for the weighted sum of branches.
fn census_row(k: usize, method: &str, census: Option<DressingCensus>, exact: f64) -> [String; 8] {
    let (samples, hits) = census.map_or((String::new(), String::new()), |c| (c.total.to_string(), c.hits.to_string()));
    [
        k.to_string(),
        method.into(),
        samples,
        hits,
        exact.to_string(),
        "0".into(),
        exact.to_string(),
        String::new(),
    ]
}

fn montecarlo_row(c: &WallCensus) -> [String; 8] {
    let [k, samples, hits, estimate, stderr, exact, dev] = c.csv_record();
    [k, "montecarlo".into(), samples, hits, estimate, stderr, exact, dev]
}

fn wall_prob(a: &WallProbArgs) -> Outcome {
    let mut rows = Vec::new();
    let mut results = serde_json::Map::new();
    if a.exact {
        let exact = match a.k {
            1 => {
                let c = one_wall_census();
                let exact = exact_1wall_probability();
                rows.push(census_row(1, "census", Some(c), ratio(exact)));
                exact
            }
            2 => {
                let (bs, bf) = exact_2wall_branches();
                let swap = two_wall_census(CliffordClass::Swap);
                let fswap = two_wall_census(CliffordClass::Fswap);
                rows.push(census_row(2, "census_swap", Some(swap), ratio(bs)));
                rows.push(census_row(2, "census_fswap", Some(fswap), ratio(bf)));
                eprintln!("swap branch {bs}, fswap branch {bf}");
                let exact = exact_2wall_probability();
                rows.push(census_row(2, "census", None, ratio(exact)));
                exact
            }
            k => return Err(Failure::Usage(anyhow!("no exhaustive census for k = {k}; use k = 1 or 2"))),
        };
        eprintln!("k={} exact probability {exact} = {:.6}", a.k, ratio(exact));
        results.insert("exact".into(), json!(exact.to_string()));
    }
    let mut breach = None;
    match (a.seed, a.exact) {
        (Some(seed), _) => {
            let c = montecarlo_wall_prob(a.k, a.samples, seed)?;
            match c.sigma_deviation() {
                Some(d) => {
                    eprintln!("k={} estimate {:.6} ± {:.6}, {d:+.2}σ from exact", c.k, c.estimate, c.stderr);
                    if d.abs() > 5.0 {
                        breach = Some(format!("estimate {d:.2}σ from the exact value"));
                    }
                }
                None => {
                    eprintln!(
                        "k={} estimate {:.6} ± {:.6}, bounds [{:.6}, {:.6}]",
                        c.k, c.estimate, c.stderr, c.bounds.0, c.bounds.1
                    );
                    if !c.within_bounds() {
                        breach = Some("estimate outside the k-wall bounds".into());
                    }
                }
            }
            results.insert("montecarlo".into(), serde_json::to_value(&c).map_err(anyhow::Error::from)?);
            rows.push(montecarlo_row(&c));
        }
        (None, true) => {}
        (None, false) => return Err(Failure::Usage(anyhow!("--seed is required for Monte Carlo runs"))),
    }
    write_csv(&a.output.out, WALL_HEADER, &rows)?;
    write_manifest(&a.output.out, "wall-prob", a, Value::Object(results))?;
    match breach {
        Some(msg) => Err(Failure::Threshold(msg)),
        None => Ok(()),
    }
}

fn scan(a: &ScanArgs) -> Outcome {
    let circuits: Vec<FloquetCircuit> = match (&a.circuit, a.n, a.seed) {
        (Some(path), _, _) => {
            let text = std::fs::read_to_string(path)
                .with_context(|| format!("reading {}", path.display()))
                .map_err(Failure::Usage)?;
            vec![FloquetCircuit::from_json(&text)?]
        }
        (None, Some(n), Some(seed)) => (0..a.realizations as u64)
            .map(|r| FloquetCircuit::build_realization(n, a.p, seed, r, Default::default()))
            .collect::<fragmentia::Result<_>>()?,
        _ => return Err(Failure::Usage(anyhow!("scan needs --circuit or both --n and --seed"))),
    };
    let mut out = Vec::new();
    let (mut sites, mut fragments, mut unperturbed) = (0usize, 0usize, 0usize);
    for (r, c) in circuits.iter().enumerate() {
        let reports = scan_circuit(c, a.kmax)?;
        let decomposition = fragment_decomposition(c)?;
        unperturbed += reports.iter().filter(|w| w.unperturbed).count();
        sites += c.n();
        fragments += decomposition.fragments.len();
        let walls: Vec<Value> = reports
            .iter()
            .map(|w| serde_json::from_str(&w.to_json_line()).expect("reports are JSON"))
            .collect();
        out.push(json!({
            "realization": r,
            "n": c.n(),
            "walls": walls,
            "fragments": decomposition.fragments,
            "boundaries": decomposition.walls,
        }));
    }
    let mean = sites as f64 / fragments as f64;
    let mu = localisation_length(a.p)?;
    eprintln!("{unperturbed} unperturbed walls; mean fragment size {mean:.2} over {sites} sites (formula {mu:.2})");
    let summary = json!({
        "unperturbed_walls": unperturbed,
        "sites": sites,
        "fragments": fragments,
        "mean_fragment_size": mean,
        "localisation_length": if mu.is_finite() { json!(mu) } else { json!("inf") },
    });
    let mut w = writer(&a.output.out)?;
    serde_json::to_writer_pretty(&mut w, &json!({ "summary": summary, "circuits": out })).map_err(anyhow::Error::from)?;
    writeln!(w).map_err(anyhow::Error::from)?;
    w.flush().map_err(anyhow::Error::from)?;
    drop(w);
    write_manifest(&a.output.out, "scan", a, summary)?;
    Ok(())
}

fn entropy(a: &EntropyArgs) -> Outcome {
    let e = &a.ensemble;
    let realizations = entropy_realizations(e.setup, e.n, e.p, e.realizations, e.tmax, e.seed)?;
    let traces = EntropyTraces::from_realizations(e.setup, e.n, e.p, &realizations)?;
    let (mean, std) = traces.steady_state();
    eprintln!(
        "{} n={} p={}: steady <S> = {mean:.4}, dS = {std:.4}, max S = {:.4}",
        e.setup,
        e.n,
        e.p,
        traces.max_entropy()
    );
    if a.per_realization {
        let rows: Vec<[String; 3]> = realizations
            .iter()
            .flat_map(|r| r.s.iter().enumerate().map(move |(t, s)| [r.realization.to_string(), t.to_string(), s.to_string()]))
            .collect();
        write_csv(&a.output.out, ["realization", "t", "S"], &rows)?;
    } else {
        write_csv(&a.output.out, EntropyTraces::CSV_HEADER, &traces.csv_records())?;
    }
    write_manifest(
        &a.output.out,
        "entropy",
        a,
        json!({
            "cut": traces.cut,
            "steady_mean": mean,
            "steady_std": std,
            "max_entropy": traces.max_entropy(),
            "stabilizer_realizations": traces.stabilizer_realizations,
            "entropy_floor": 1e-14,
        }),
    )?;
    Ok(())
}

fn sff(a: &SffArgs) -> Outcome {
    let e = &a.ensemble;
    let mut trace: SffTrace = sff_experiment(e.setup, e.n, e.p, e.realizations, e.tmax, e.seed)?;
    trace.smear(a.dt, e.seed);
    let hi = ((trace.d as f64).sqrt() as usize).min(e.tmax);
    let exponent = fit_exponent(&trace.smeared, 2, hi).ok();
    if let Some(x) = exponent {
        eprintln!("{} n={} p={}: early-ramp exponent {x:.3} over t in [2, {hi}]", e.setup, e.n, e.p);
    }
    write_csv(&a.output.out, SffTrace::CSV_HEADER, &trace.csv_records())?;
    write_manifest(
        &a.output.out,
        "sff",
        a,
        json!({
            "d": trace.d,
            "k0": trace.k[0],
            "early_ramp_exponent": exponent,
            "smearing": "window sum normalised by the clipped window length",
        }),
    )?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn run_configs_round_trip() {
        let cmd = Command::Entropy(EntropyArgs {
            ensemble: EnsembleArgs {
                setup: Setup::Localisation,
                n: 8,
                p: 0.5,
                realizations: 10,
                tmax: 20,
                seed: 3,
            },
            per_realization: false,
            output: Output { out: "x.csv".into() },
        });
        let text = serde_json::to_string(&cmd).unwrap();
        let back: Command = serde_json::from_str(&text).unwrap();
        assert_eq!(serde_json::to_string(&back).unwrap(), text);
    }

    #[test]
    fn configs_fill_defaults_but_need_a_seed() {
        let cmd: Command =
            serde_json::from_str(r#"{"command":"sff","setup":"transport","n":6,"p":1.0,"seed":1}"#).unwrap();
        let Command::Sff(a) = cmd else { panic!() };
        assert_eq!((a.ensemble.realizations, a.ensemble.tmax, a.dt), (1000, 200, 1));
        assert_eq!(a.output.out, PathBuf::from("-"));
        assert!(serde_json::from_str::<Command>(r#"{"command":"entropy","setup":"transport","n":6,"p":1.0}"#).is_err());
    }

    #[test]
    fn cli_definition_is_consistent() {
        use clap::CommandFactory;
        Cli::command().debug_assert();
    }

    #[test]
    fn bad_flags_fail_to_parse() {
        assert!(Cli::try_parse_from(["fragmentia", "entropy", "--n", "8"]).is_err());
        assert!(Cli::try_parse_from(["fragmentia", "wall-prob", "--k", "x"]).is_err());
    }
}
