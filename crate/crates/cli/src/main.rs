use std::collections::HashSet;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use log::info;
use ptransform::classify::{group_cv, Classifier, CvScheme, ForestParams};
use ptransform::error::check_percentage;
use ptransform::io::{
    load_dataset_csv, load_spectrum_csv, write_diagram_csv, write_matrix_csv, write_pairs_csv,
    write_pgm, write_triples_csv,
};
use ptransform::persistence::{filter_top_k, reduce, to_diagram, transform};
use ptransform::simulate::{
    bench_denoise, denoise, mean_image, recovery_iou, simulate, write_bench_csv, NoiseModel,
    SimulationSpec,
};
use ptransform::{Error, MSImage};

/// Persistence transformation of spectra, peak denoising and classification.
#[derive(Parser, Debug)]
#[command(name = "ptransform", version, about)]
struct Cli {
    /// Worker threads; 0 uses all available cores.
    #[arg(long, global = true, default_value_t = 0)]
    threads: usize,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Compute the persistence transformation of one spectrum.
    Transform(TransformArgs),
    /// Cross-validate a classifier on persistence features.
    Classify(ClassifyArgs),
    /// Simulate a synthetic MS image.
    Simulate(SimulateArgs),
    /// Simulate, add noise and denoise at one or more k levels.
    Denoise(DenoiseArgs),
    /// Time denoising across image sizes.
    Bench(BenchArgs),
}

#[derive(Args, Debug)]
struct TransformArgs {
    /// Spectrum CSV with `mz,intensity` rows.
    #[arg(long = "in")]
    input: PathBuf,
    /// Percentage of the most persistent peaks to keep.
    #[arg(long, default_value_t = 100.0)]
    k: f64,
    /// Feature CSV to write.
    #[arg(long)]
    out: PathBuf,
    /// Write `position_index,mz,birth,death,persistence` instead of the reduced form.
    #[arg(long)]
    full: bool,
    /// Also write the persistence diagram (`birth,death`) of all features here.
    #[arg(long)]
    diagram: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum ClassifierKind {
    /// Logistic regression.
    Lr,
    /// Random forest.
    Rf,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Scheme {
    /// Leave one group out.
    Logo,
    /// Two folds: first half of the sorted groups against the second.
    Ab,
}

#[derive(Args, Debug)]
struct ClassifyArgs {
    /// Spectra CSV: an m/z header row, then one row per spectrum.
    #[arg(long)]
    spectra: PathBuf,
    /// Labels CSV: `label,group` rows with labels 0 or 1.
    #[arg(long)]
    labels: PathBuf,
    #[arg(long, default_value_t = 30.0)]
    k: f64,
    #[arg(long, value_enum, default_value = "rf")]
    classifier: ClassifierKind,
    #[arg(long, value_enum, default_value = "logo")]
    scheme: Scheme,
    /// Logistic decision threshold on the predicted probability.
    #[arg(long, default_value_t = 0.5)]
    threshold: f64,
    #[arg(long, default_value_t = 1000)]
    n_trees: usize,
    /// Candidate features per split; defaults to ceil(sqrt(columns)).
    #[arg(long)]
    mtry: Option<usize>,
    #[arg(long, default_value_t = 1)]
    min_leaf: usize,
    #[arg(long, default_value_t = 1234)]
    seed: u64,
    /// Directory for `folds.csv` and `summary.csv`.
    #[arg(long)]
    out_dir: PathBuf,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum NoiseKind {
    None,
    Gaussian,
    Poisson,
}

#[derive(Args, Debug)]
struct SimArgs {
    /// Pixels per side.
    #[arg(long, default_value_t = 30)]
    size: usize,
    #[arg(long, default_value_t = 500.0)]
    mz_min: f64,
    #[arg(long, default_value_t = 2000.0)]
    mz_max: f64,
    #[arg(long, default_value_t = 3466)]
    n_mz: usize,
    #[arg(long, default_value_t = 50)]
    n_peaks: usize,
    #[arg(long, default_value_t = 0.0)]
    baseline: f64,
    #[arg(long, value_enum, default_value = "none")]
    noise: NoiseKind,
    /// Standard deviation of Gaussian noise.
    #[arg(long, default_value_t = 0.1)]
    sd: f64,
    /// Rate of Poisson noise.
    #[arg(long, default_value_t = 2.0)]
    lambda: f64,
    #[arg(long, default_value_t = 1234)]
    seed: u64,
}

impl SimArgs {
    fn spec(&self) -> SimulationSpec {
        SimulationSpec {
            size: self.size,
            mz_range: (self.mz_min, self.mz_max),
            n_mz: self.n_mz,
            n_peaks: self.n_peaks,
            baseline: self.baseline,
            noise: match self.noise {
                NoiseKind::None => NoiseModel::None,
                NoiseKind::Gaussian => NoiseModel::Gaussian { sd: self.sd },
                NoiseKind::Poisson => NoiseModel::Poisson {
                    lambda: self.lambda,
                },
            },
            seed: self.seed,
        }
    }
}

#[derive(Args, Debug)]
struct SimulateArgs {
    #[command(flatten)]
    sim: SimArgs,
    /// Directory for `ground_truth.pgm`, `noisy.pgm`, `mask.pgm` and `noisy.csv`.
    #[arg(long)]
    out_dir: PathBuf,
}

#[derive(Args, Debug)]
struct DenoiseArgs {
    #[command(flatten)]
    sim: SimArgs,
    /// Comma-separated k levels.
    #[arg(long, value_delimiter = ',', default_value = "10,25,50")]
    k: Vec<f64>,
    /// Directory for the PGM images and `timing.csv`.
    #[arg(long)]
    out_dir: PathBuf,
}

#[derive(Args, Debug)]
struct BenchArgs {
    #[command(flatten)]
    sim: SimArgs,
    /// Comma-separated image sizes; ratios are relative to the first.
    #[arg(long, value_delimiter = ',', default_value = "30,42,60")]
    sizes: Vec<usize>,
    #[arg(long, default_value_t = 10.0)]
    k: f64,
    /// Timed runs per size; the fastest is reported.
    #[arg(long, default_value_t = 3)]
    repeats: usize,
    /// Timing CSV to write.
    #[arg(long)]
    out: PathBuf,
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info"))
        .format_timestamp(None)
        .init();

    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    if let Err(e) = rayon::ThreadPoolBuilder::new()
        .num_threads(cli.threads)
        .build_global()
    {
        eprintln!("error: could not start the thread pool: {e}");
        return ExitCode::from(1);
    }

    let result = match &cli.command {
        Command::Transform(args) => cmd_transform(args),
        Command::Classify(args) => cmd_classify(args),
        Command::Simulate(args) => cmd_simulate(args),
        Command::Denoise(args) => cmd_denoise(args),
        Command::Bench(args) => cmd_bench(args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(if e.is_io() { 2 } else { 1 })
        }
    }
}

fn create_dir(dir: &Path) -> Result<(), Error> {
    std::fs::create_dir_all(dir).map_err(|source| Error::Io {
        path: dir.to_path_buf(),
        source,
    })
}

fn cmd_transform(args: &TransformArgs) -> Result<(), Error> {
    check_percentage(args.k)?;
    let spectrum = load_spectrum_csv(&args.input)?;
    let triples = transform(&spectrum);
    let kept = filter_top_k(&reduce(&triples), args.k)?;
    info!(
        "{} local maxima, {} features kept at k = {}",
        triples.len(),
        kept.len(),
        args.k
    );
    if args.full {
        let positions: HashSet<usize> = kept.iter().map(|p| p.position).collect();
        let selected: Vec<_> = triples
            .iter()
            .filter(|t| positions.contains(&t.position))
            .copied()
            .collect();
        write_triples_csv(&selected, spectrum.mz(), &args.out)?;
    } else {
        write_pairs_csv(&kept, spectrum.mz(), &args.out)?;
    }
    if let Some(path) = &args.diagram {
        write_diagram_csv(&to_diagram(&triples), path)?;
    }
    Ok(())
}

fn cmd_classify(args: &ClassifyArgs) -> Result<(), Error> {
    check_percentage(args.k)?;
    let dataset = load_dataset_csv(&args.spectra, &args.labels)?;
    info!(
        "{} spectra with {} m/z values",
        dataset.len(),
        dataset.mz().len()
    );
    let classifier = match args.classifier {
        ClassifierKind::Lr => Classifier::Logistic {
            threshold: args.threshold,
        },
        ClassifierKind::Rf => Classifier::Forest(ForestParams {
            n_trees: args.n_trees,
            mtry: args.mtry,
            min_leaf: args.min_leaf,
            seed: args.seed,
            bootstrap: true,
        }),
    };
    let scheme = match args.scheme {
        Scheme::Logo => CvScheme::LeaveOneGroupOut,
        Scheme::Ab => CvScheme::TwoFoldAB,
    };
    let report = group_cv(&dataset, scheme, &classifier, args.k)?;
    create_dir(&args.out_dir)?;
    report.write_folds_csv(args.out_dir.join("folds.csv"))?;
    report.write_summary_csv(args.out_dir.join("summary.csv"))?;
    print!("{}", report.table());
    Ok(())
}

fn write_mean_pgm(image: &MSImage, path: PathBuf) -> Result<(), Error> {
    write_pgm(&mean_image(image), &path)?;
    info!("wrote {}", path.display());
    Ok(())
}

fn cmd_simulate(args: &SimulateArgs) -> Result<(), Error> {
    let (truth, noisy) = simulate(&args.sim.spec())?;
    create_dir(&args.out_dir)?;
    write_mean_pgm(&truth.image, args.out_dir.join("ground_truth.pgm"))?;
    write_mean_pgm(&noisy, args.out_dir.join("noisy.pgm"))?;
    write_pgm(&truth.mask.to_grid(), args.out_dir.join("mask.pgm"))?;
    let rows = noisy.pixels().map(<[f64]>::to_vec).collect();
    let matrix = ptransform::features::FeatureMatrix::new(noisy.mz().to_vec(), rows)?;
    write_matrix_csv(&matrix, args.out_dir.join("noisy.csv"))?;
    info!(
        "{0}x{0} image with {1} m/z values",
        noisy.width(),
        noisy.mz().len()
    );
    Ok(())
}

fn cmd_denoise(args: &DenoiseArgs) -> Result<(), Error> {
    for &k in &args.k {
        check_percentage(k)?;
    }
    let (truth, noisy) = simulate(&args.sim.spec())?;
    create_dir(&args.out_dir)?;
    write_mean_pgm(&truth.image, args.out_dir.join("ground_truth.pgm"))?;
    write_mean_pgm(&noisy, args.out_dir.join("noisy.pgm"))?;

    let mut csv = String::from("k,seconds,iou\n");
    println!("{:>8} {:>10} {:>8}", "k", "seconds", "IoU");
    for &k in &args.k {
        let started = Instant::now();
        let denoised = denoise(&noisy, k)?;
        let seconds = started.elapsed().as_secs_f64();
        let iou = recovery_iou(&denoised, &truth.mask);
        write_mean_pgm(&denoised, args.out_dir.join(format!("denoised_k{k}.pgm")))?;
        csv.push_str(&format!("{k},{seconds},{iou}\n"));
        println!("{k:>8} {seconds:>10.3} {iou:>8.3}");
    }
    let path = args.out_dir.join("timing.csv");
    std::fs::write(&path, csv).map_err(|source| Error::Io { path, source })
}

fn cmd_bench(args: &BenchArgs) -> Result<(), Error> {
    check_percentage(args.k)?;
    let rows = bench_denoise(&args.sim.spec(), &args.sizes, args.k, args.repeats)?;
    write_bench_csv(&rows, &args.out)?;
    println!(
        "{:>6} {:>8} {:>10} {:>12} {:>11}",
        "size", "pixels", "seconds", "time ratio", "pixel ratio"
    );
    for r in &rows {
        println!(
            "{:>6} {:>8} {:>10.3} {:>12.2} {:>11.2}",
            r.size, r.pixels, r.seconds, r.time_ratio, r.pixel_ratio
        );
    }
    Ok(())
}
