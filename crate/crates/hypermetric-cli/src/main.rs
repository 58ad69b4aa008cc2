//! Command-line pipeline: congruence spec or hypergraph file in,
//! deterministic analysis files out.
//!
//! Subcommands mirror the analysis stages: `gen` (spec echo, exact edge
//! counts, optional enumeration), `distmat` (profiles and the distance
//! matrix), `communities` (zero-distance classes, a zero set, residue
//! patterns), `homology` (Vietoris-Rips barcodes, optionally along a
//! vertex-prefix filtration), and `knn` (repeated-split sign-prediction
//! experiment). All randomness flows from explicit seeds, so reruns are
//! byte-identical for any `--jobs` value.

use std::fs::{self, File};
use std::io::{BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_bigint::BigUint;

use hypermetric::community::{builtin_patterns, check_patterns, partition, zero_set};
use hypermetric::congruence::{CongruenceSpec, ImplicitHypergraph};
use hypermetric::knn::{run_experiment, ExperimentConfig, Method};
use hypermetric::matrix::write_profiles_csv;
use hypermetric::persistence::{bar_count, filtration_barcodes, matrix_barcode, FiltrationSpec};
use hypermetric::pipeline::HypergraphSource;
use hypermetric::{DistanceMatrix, Error, ExplicitHypergraph, VertexId};

#[derive(Parser)]
#[command(name = "hypermetric", version, about = "Hypergraph metric analytics")]
struct Cli {
    /// Output directory; created if missing.
    #[arg(long, global = true, default_value = "out")]
    out: PathBuf,

    /// Master seed for experiment randomness.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,

    /// Worker threads (0 = all cores). Outputs do not depend on this.
    #[arg(long, global = true, default_value_t = 0)]
    jobs: usize,

    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct InputArgs {
    /// JSON congruence spec file.
    #[arg(long, value_name = "FILE", conflicts_with = "hypergraph")]
    spec: Option<PathBuf>,

    /// Explicit hypergraph text file.
    #[arg(long, value_name = "FILE")]
    hypergraph: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Echo the spec and report exact edge counts; optionally enumerate.
    Gen {
        /// JSON congruence spec file.
        #[arg(long, value_name = "FILE")]
        spec: PathBuf,
        /// Materialize the hyperedges into hypergraph.txt.
        #[arg(long)]
        enumerate: bool,
        /// Edge-count guard for --enumerate.
        #[arg(long, default_value_t = 1_000_000)]
        cap: u64,
    },
    /// Write the profiles and the pairwise distance matrix.
    Distmat {
        #[command(flatten)]
        input: InputArgs,
    },
    /// Zero-distance communities, the anchor's zero set, residue patterns.
    Communities {
        #[command(flatten)]
        input: InputArgs,
        /// Anchor vertex for the zero set; defaults to the first vertex.
        #[arg(long)]
        anchor: Option<u64>,
    },
    /// Vietoris-Rips barcodes (dimensions 0..=max-dim).
    Homology {
        #[command(flatten)]
        input: InputArgs,
        /// Comma-separated vertex-count prefixes, e.g. 100,300,500,700.
        #[arg(long, value_delimiter = ',')]
        filtration: Option<Vec<usize>>,
        #[arg(long, default_value_t = 1)]
        max_dim: usize,
        /// Persistence cutoff for the important-bar count; defaults to 5%
        /// of the largest finite death.
        #[arg(long)]
        min_persistence: Option<u64>,
        /// Also write an SVG rendering per barcode.
        #[arg(long)]
        svg: bool,
    },
    /// Repeated-split nearest-neighbor sign prediction.
    Knn {
        /// JSON congruence spec file.
        #[arg(long, value_name = "FILE")]
        spec: PathBuf,
        #[arg(long, value_enum, default_value_t = MethodArg::Knnall)]
        method: MethodArg,
        /// Comma-separated neighbor counts.
        #[arg(long, value_delimiter = ',', default_value = "1,2,3,4,5")]
        k: Vec<usize>,
        #[arg(long, default_value_t = 10)]
        trials: usize,
        /// Training fraction of the vertex set.
        #[arg(long, default_value_t = 0.7)]
        split: f64,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum MethodArg {
    Knn1,
    Knnall,
}

impl From<MethodArg> for Method {
    fn from(m: MethodArg) -> Method {
        match m {
            MethodArg::Knn1 => Method::Knn1,
            MethodArg::Knnall => Method::KnnAll,
        }
    }
}

/// Failure with the pipeline stage that produced it; input-shaped
/// problems exit 2, runtime problems exit 1.
struct StageError {
    stage: &'static str,
    error: Error,
    invalid_input: bool,
}

type StageResult<T> = Result<T, StageError>;

trait Staged<T> {
    fn stage(self, stage: &'static str) -> StageResult<T>;
    fn input_stage(self, stage: &'static str) -> StageResult<T>;
}

impl<T> Staged<T> for Result<T, Error> {
    fn stage(self, stage: &'static str) -> StageResult<T> {
        self.map_err(|error| StageError {
            stage,
            error,
            invalid_input: false,
        })
    }

    fn input_stage(self, stage: &'static str) -> StageResult<T> {
        self.map_err(|error| StageError {
            stage,
            error,
            invalid_input: true,
        })
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cli.jobs)
        .build()
        .expect("thread pool");
    match pool.install(|| run(&cli)) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error ({}): {}", e.stage, e.error);
            if e.invalid_input {
                ExitCode::from(2)
            } else {
                ExitCode::FAILURE
            }
        }
    }
}

fn run(cli: &Cli) -> StageResult<()> {
    fs::create_dir_all(&cli.out)
        .map_err(Error::from)
        .stage("create-out-dir")?;
    match &cli.command {
        Command::Gen {
            spec,
            enumerate,
            cap,
        } => cmd_gen(cli, spec, *enumerate, *cap),
        Command::Distmat { input } => cmd_distmat(cli, input),
        Command::Communities { input, anchor } => cmd_communities(cli, input, *anchor),
        Command::Homology {
            input,
            filtration,
            max_dim,
            min_persistence,
            svg,
        } => cmd_homology(cli, input, filtration.as_deref(), *max_dim, *min_persistence, *svg),
        Command::Knn {
            spec,
            method,
            k,
            trials,
            split,
        } => cmd_knn(cli, spec, (*method).into(), k, *trials, *split),
    }
}

fn load_spec(path: &Path) -> StageResult<ImplicitHypergraph> {
    let text = fs::read_to_string(path)
        .map_err(Error::from)
        .input_stage("read-spec")?;
    let spec = CongruenceSpec::from_json(&text).input_stage("parse-spec")?;
    ImplicitHypergraph::build(spec).input_stage("build")
}

fn load_source(input: &InputArgs) -> StageResult<HypergraphSource> {
    match (&input.spec, &input.hypergraph) {
        (Some(spec), None) => Ok(HypergraphSource::Implicit(load_spec(spec)?)),
        (None, Some(path)) => {
            let file = File::open(path).map_err(Error::from).input_stage("read-hypergraph")?;
            let h = ExplicitHypergraph::parse(BufReader::new(file)).input_stage("parse-hypergraph")?;
            Ok(HypergraphSource::Explicit(h))
        }
        _ => Err(StageError {
            stage: "arguments",
            error: Error::InvalidSpec("exactly one of --spec or --hypergraph is required".into()),
            invalid_input: true,
        }),
    }
}

fn create(out: &Path, name: &str) -> StageResult<BufWriter<File>> {
    let path = out.join(name);
    File::create(&path)
        .map(BufWriter::new)
        .map_err(Error::from)
        .stage("write-output")
}

fn cmd_gen(cli: &Cli, spec_path: &Path, enumerate: bool, cap: u64) -> StageResult<()> {
    let ih = load_spec(spec_path)?;
    let summary = ih.edge_count_summary();
    let mut w = create(&cli.out, "summary.txt")?;
    let emit = |w: &mut dyn Write| -> Result<(), Error> {
        writeln!(w, "vertices: {}", ih.vertices().len())?;
        writeln!(w, "max_edge_size: {}", ih.max_edge_size())?;
        let labels: Vec<String> = ih.property_set().iter().map(|l| l.to_string()).collect();
        writeln!(w, "property_set: {}", labels.join(" "))?;
        writeln!(w, "edges_total: {}", summary.total)?;
        for ((size, label), count) in &summary.by_size_label {
            writeln!(w, "size={size} property={label}: {count}")?;
        }
        Ok(())
    };
    emit(&mut w).stage("write-output")?;
    w.flush().map_err(Error::from).stage("write-output")?;
    if enumerate {
        let explicit = ih.enumerate(cap).stage("enumerate")?;
        let mut w = create(&cli.out, "hypergraph.txt")?;
        explicit.write(&mut w).stage("write-output")?;
        w.flush().map_err(Error::from).stage("write-output")?;
    }
    Ok(())
}

fn cmd_distmat(cli: &Cli, input: &InputArgs) -> StageResult<()> {
    let source = load_source(input)?;
    let profiles = source.profiles().stage("profiles")?;
    let matrix = DistanceMatrix::from_profiles(&profiles).stage("distance-matrix")?;
    let mut w = create(&cli.out, "profiles.csv")?;
    write_profiles_csv(&profiles, &mut w).stage("write-output")?;
    w.flush().map_err(Error::from).stage("write-output")?;
    let mut w = create(&cli.out, "distmat.csv")?;
    matrix.write_csv(&mut w).stage("write-output")?;
    w.flush().map_err(Error::from).stage("write-output")?;
    Ok(())
}

fn cmd_communities(cli: &Cli, input: &InputArgs, anchor: Option<u64>) -> StageResult<()> {
    let source = load_source(input)?;
    let profiles = source.profiles().stage("profiles")?;
    let matrix = DistanceMatrix::from_profiles(&profiles).stage("distance-matrix")?;
    let anchor = VertexId(anchor.unwrap_or_else(|| source.vertices()[0].0));
    let zset = zero_set(&matrix, anchor).stage("zero-set")?;
    let part = partition(&matrix);

    let mut w = create(&cli.out, "communities.csv")?;
    part.write_csv(&mut w).stage("write-output")?;
    w.flush().map_err(Error::from).stage("write-output")?;

    let mut w = create(&cli.out, "zero_set.csv")?;
    let emit = |w: &mut dyn Write| -> Result<(), Error> {
        writeln!(w, "vertex")?;
        for v in &zset.members {
            writeln!(w, "{v}")?;
        }
        Ok(())
    };
    emit(&mut w).stage("write-output")?;
    w.flush().map_err(Error::from).stage("write-output")?;

    let mut w = create(&cli.out, "communities_summary.txt")?;
    let emit = |w: &mut dyn Write| -> Result<(), Error> {
        writeln!(w, "vertices: {}", matrix.order())?;
        writeln!(w, "classes: {}", part.class_count())?;
        let reps: Vec<String> = part.representatives().iter().map(|r| r.to_string()).collect();
        writeln!(w, "representatives: {}", reps.join(" "))?;
        for (rep, size) in part.class_sizes() {
            writeln!(w, "class {rep}: {size} members")?;
        }
        writeln!(w, "anchor: {anchor}")?;
        writeln!(w, "zero_set_size: {}", zset.members.len())?;
        if zset.members.is_empty() {
            writeln!(w, "pattern_report: skipped (empty zero set)")?;
        } else {
            let report = check_patterns(&zset.members, &builtin_patterns())?;
            for (name, holds) in report {
                writeln!(w, "pattern [{name}]: {}", if holds { "holds" } else { "fails" })?;
            }
        }
        Ok(())
    };
    emit(&mut w).stage("write-output")?;
    w.flush().map_err(Error::from).stage("write-output")?;
    Ok(())
}

fn cmd_homology(
    cli: &Cli,
    input: &InputArgs,
    filtration: Option<&[usize]>,
    max_dim: usize,
    min_persistence: Option<u64>,
    svg: bool,
) -> StageResult<()> {
    let source = load_source(input)?;
    let total = source.vertices().len();
    let stages: Vec<(usize, hypermetric::persistence::Barcode)> = match filtration {
        Some(cutoffs) => {
            let spec = FiltrationSpec::new(cutoffs.to_vec(), total).input_stage("filtration")?;
            filtration_barcodes(&source, &spec, max_dim).stage("persistence")?
        }
        None => {
            let profiles = source.profiles().stage("profiles")?;
            let matrix = DistanceMatrix::from_profiles(&profiles).stage("distance-matrix")?;
            vec![(total, matrix_barcode(&matrix, max_dim).stage("persistence")?)]
        }
    };
    let mut w = create(&cli.out, "homology_summary.txt")?;
    for (n, barcode) in &stages {
        let name = format!("barcode_{n}.csv");
        let mut bw = create(&cli.out, &name)?;
        barcode.write_csv(&mut bw).stage("write-output")?;
        bw.flush().map_err(Error::from).stage("write-output")?;
        if svg {
            let mut sw = create(&cli.out, &format!("barcode_{n}.svg"))?;
            barcode.write_svg(&mut sw).stage("write-output")?;
            sw.flush().map_err(Error::from).stage("write-output")?;
        }
        let threshold = match min_persistence {
            Some(t) => BigUint::from(t),
            None => barcode.default_importance_threshold(),
        };
        let emit = |w: &mut dyn Write| -> Result<(), Error> {
            writeln!(w, "stage n={n}")?;
            writeln!(w, "  dim0_bars: {}", barcode.dim_intervals(0).count())?;
            if max_dim >= 1 {
                writeln!(w, "  dim1_bars: {}", barcode.dim_intervals(1).count())?;
            }
            writeln!(w, "  importance_threshold: {threshold}")?;
            writeln!(w, "  important_dim0: {}", bar_count(barcode, 0, &threshold))?;
            if max_dim >= 1 {
                writeln!(w, "  important_dim1: {}", bar_count(barcode, 1, &threshold))?;
            }
            Ok(())
        };
        emit(&mut w).stage("write-output")?;
    }
    w.flush().map_err(Error::from).stage("write-output")?;
    Ok(())
}

fn cmd_knn(
    cli: &Cli,
    spec_path: &Path,
    method: Method,
    k_values: &[usize],
    trials: usize,
    split: f64,
) -> StageResult<()> {
    let ih = load_spec(spec_path)?;
    let profiles = ih.analytic_profiles();
    let config = ExperimentConfig {
        method,
        k_values: k_values.to_vec(),
        trials,
        split_fraction: split,
        master_seed: cli.seed,
    };
    let report = run_experiment(&profiles, &config).stage("experiment")?;
    let mut w = create(&cli.out, "knn_table.csv")?;
    report.write_table_csv(&mut w).stage("write-output")?;
    w.flush().map_err(Error::from).stage("write-output")?;

    // predictions from the first trial at the best-average k
    let best_k = report.best_k();
    let mut w = create(&cli.out, "predictions.csv")?;
    report.write_predictions_csv(best_k, &mut w).stage("write-output")?;
    w.flush().map_err(Error::from).stage("write-output")?;

    let mut w = create(&cli.out, "knn_summary.txt")?;
    let emit = |w: &mut dyn Write| -> Result<(), Error> {
        writeln!(w, "method: {}", report.method.name())?;
        writeln!(w, "trials: {trials}")?;
        writeln!(w, "split_fraction: {split}")?;
        writeln!(w, "master_seed: {}", cli.seed)?;
        for (i, k) in report.k_values.iter().enumerate() {
            writeln!(w, "k={k} average_error: {}", report.averages[i])?;
        }
        writeln!(w, "best_k: {best_k}")?;
        writeln!(w, "predictions_for: trial 1, k={best_k}")?;
        Ok(())
    };
    emit(&mut w).stage("write-output")?;
    w.flush().map_err(Error::from).stage("write-output")?;
    Ok(())
}
