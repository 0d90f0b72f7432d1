use std::fmt::Write as _;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{error::ErrorKind, Args, Parser, Subcommand};
use spdc::file::{ConstraintsRecord, SensitivityRecord};
use spdc::search::solve_parallel;
use spdc::table::{fmt12, stats_table, sweep_csv, trajectory_csv};
use spdc::{CliError, ConstraintsFile, DesignFile, LoadedDesign};
use spdc_core::designer::{poling_pattern, SolveOptions};
use spdc_core::physics::reference;
use spdc_core::robustness::{scale_design, sweep, width_90};
use spdc_core::sensitivity::{epsilon_from, Axis, SensitivityCoefficients};
use spdc_core::stats::photon_statistics;
use spdc_core::su11::{design_matrix, trajectory};

#[derive(Parser)]
#[command(name = "spdc", version, about = "Simulate and design robust SPDC crystals")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Pair number and hyperboloid coordinates along the crystal, as CSV.
    Simulate {
        design: PathBuf,
        #[command(flatten)]
        deviation: Deviation,
        /// Samples per segment.
        #[arg(long, default_value_t = 50)]
        samples: usize,
    },
    /// Pair number against a deviation axis, as CSV; the 90% width goes to stderr.
    Sweep {
        design: PathBuf,
        #[arg(long)]
        axis: String,
        /// `HALF` for a symmetric range or `MIN,MAX`.
        #[arg(long, allow_hyphen_values = true, default_value = "2.4")]
        range: String,
        #[arg(long, default_value_t = 481)]
        points: usize,
    },
    /// Search anti-symmetric segmentations and write ranked candidate files.
    Design(DesignArgs),
    /// Photon-number distribution of the generated state.
    Stats {
        design: PathBuf,
        #[command(flatten)]
        deviation: Deviation,
        #[arg(long, default_value_t = 10)]
        nmax: usize,
    },
    /// Domain walls of the poled crystal in the two-column text format.
    ExportPoling {
        design: PathBuf,
        /// Material mismatch compensated by the poling, rad/m.
        #[arg(long, allow_hyphen_values = true)]
        dk_material: Option<f64>,
        /// Smallest manufacturable domain, m.
        #[arg(long)]
        min_domain: f64,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Scale lengths by r and couplings and detunings by 1/r.
    Scale {
        design: PathBuf,
        #[arg(long, allow_hyphen_values = true)]
        r: f64,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
}

#[derive(Args)]
#[group(multiple = false)]
struct Deviation {
    /// Detuning error, rad/m.
    #[arg(long, allow_hyphen_values = true)]
    epsilon: Option<f64>,
    /// Temperature deviation, °C.
    #[arg(long = "dT", allow_hyphen_values = true)]
    d_t: Option<f64>,
    /// Signal wavelength deviation, nm.
    #[arg(long, allow_hyphen_values = true)]
    dlambda: Option<f64>,
    /// Signal angle deviation, degrees.
    #[arg(long, allow_hyphen_values = true)]
    dtheta: Option<f64>,
}

#[derive(Args)]
struct DesignArgs {
    /// Number of segments: 2, 4, 6 or 8.
    #[arg(long, default_value_t = 6)]
    segments: usize,
    /// Coupling Ω, rad/m; defaults to the 60 mW, 40 µm reference pump.
    #[arg(long)]
    omega: Option<f64>,
    #[arg(long, default_value_t = 2)]
    order: usize,
    #[arg(long, default_value_t = 1024)]
    starts: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Constraint file; defaults to the reference 20 mm setup.
    #[arg(long)]
    constraints: Option<PathBuf>,
    /// Overrides the target total length of the constraint file, m.
    #[arg(long)]
    target_length: Option<f64>,
    /// Largest start detuning, rad/m.
    #[arg(long, default_value_t = 2.0e4)]
    max_detuning: f64,
    /// Number of candidate files to write.
    #[arg(long, default_value_t = 5)]
    keep: usize,
    #[arg(long, default_value = ".")]
    out_dir: PathBuf,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion | ErrorKind::DisplayHelpOnMissingArgumentOrSubcommand => {
                    ExitCode::SUCCESS
                }
                _ => ExitCode::from(1),
            };
        }
    };
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}

fn run(command: Command) -> Result<(), CliError> {
    match command {
        Command::Simulate { design, deviation, samples } => {
            if samples < 2 {
                return Err(CliError::Usage("--samples must be at least 2".into()));
            }
            let (_, loaded) = DesignFile::load(&design)?;
            let eps = deviation_epsilon(&deviation, &loaded, &design)?;
            emit(None, &trajectory_csv(&trajectory(&loaded.design, eps, samples)?))
        }
        Command::Sweep { design, axis, range, points } => {
            let axis: Axis = axis.parse().map_err(|e: spdc_core::Error| CliError::Usage(e.to_string()))?;
            let range = parse_range(&range)?;
            if range.0 != range.1 && points < 3 {
                return Err(CliError::Usage("--points must be at least 3".into()));
            }
            let (_, loaded) = DesignFile::load(&design)?;
            require_axis(&loaded.sensitivity, axis, &design)?;
            let rows = sweep(&loaded.design, axis, &loaded.sensitivity, range, points)?;
            emit(None, &sweep_csv(&rows))?;
            match width_90(&loaded.design, axis, &loaded.sensitivity, range, points) {
                Ok(w) => eprintln!("width90={}", fmt12(w)),
                Err(e) => eprintln!("width90=nan ({e})"),
            }
            Ok(())
        }
        Command::Design(args) => design(args),
        Command::Stats { design, deviation, nmax } => {
            if nmax < 1 {
                return Err(CliError::Usage("--nmax must be at least 1".into()));
            }
            let (_, loaded) = DesignFile::load(&design)?;
            let eps = deviation_epsilon(&deviation, &loaded, &design)?;
            let m = design_matrix(&loaded.design, eps)?;
            emit(None, &stats_table(&photon_statistics(&m, nmax)))
        }
        Command::ExportPoling { design, dk_material, min_domain, output } => {
            if !(min_domain > 0.0) {
                return Err(CliError::Usage("--min-domain must be positive".into()));
            }
            let (_, loaded) = DesignFile::load(&design)?;
            let dk = dk_material.unwrap_or_else(reference::delta_k_material);
            let pattern = poling_pattern(&loaded.design, dk, min_domain)?;
            emit(output.as_deref(), &spdc::poling::write_pattern(&pattern, &loaded.design.name))
        }
        Command::Scale { design, r, output } => {
            if !(r > 0.0) || !r.is_finite() {
                return Err(CliError::Usage(format!("--r must be positive, got {r}")));
            }
            let (mut file, loaded) = DesignFile::load(&design)?;
            file.design = (&scale_design(&loaded.design, r)?).into();
            emit(output.as_deref(), &file.to_canonical_string())?;
            eprintln!("pump_power_factor={}", fmt12(r.powi(-2)));
            Ok(())
        }
    }
}

fn emit(path: Option<&Path>, text: &str) -> Result<(), CliError> {
    match path {
        Some(p) => std::fs::write(p, text).map_err(|e| CliError::input(p.display().to_string(), e.to_string())),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes()).map_err(|e| CliError::input("<stdout>", e.to_string()))
        }
    }
}

fn parse_range(s: &str) -> Result<(f64, f64), CliError> {
    let bad = || CliError::Usage(format!("--range expects HALF or MIN,MAX, got `{s}`"));
    let parts: Vec<f64> = s.split(',').map(|p| p.trim().parse::<f64>()).collect::<Result<_, _>>().map_err(|_| bad())?;
    let range = match parts[..] {
        [h] if h >= 0.0 => (-h, h),
        [lo, hi] if lo <= hi => (lo, hi),
        _ => return Err(bad()),
    };
    if range.0.is_finite() && range.1.is_finite() {
        Ok(range)
    } else {
        Err(bad())
    }
}

fn require_axis(c: &SensitivityCoefficients, axis: Axis, path: &Path) -> Result<(), CliError> {
    c.coefficient(axis)
        .map(|_| ())
        .map_err(|_| CliError::input(path.display().to_string(), format!("{} is not calibrated", SensitivityRecord::field_name(axis))))
}

fn deviation_epsilon(d: &Deviation, loaded: &LoadedDesign, path: &Path) -> Result<f64, CliError> {
    let (axis, value) = match (d.epsilon, d.d_t, d.dlambda, d.dtheta) {
        (Some(v), ..) => (Axis::Epsilon, v),
        (_, Some(v), ..) => (Axis::Temperature, v),
        (_, _, Some(v), _) => (Axis::Wavelength, v),
        (.., Some(v)) => (Axis::Angle, v),
        _ => return Ok(0.0),
    };
    if !value.is_finite() {
        return Err(CliError::Usage("deviation must be finite".into()));
    }
    require_axis(&loaded.sensitivity, axis, path)?;
    Ok(epsilon_from(&loaded.sensitivity, axis, value)?)
}

fn design(args: DesignArgs) -> Result<(), CliError> {
    if args.starts == 0 {
        return Err(CliError::Usage("--starts must be at least 1".into()));
    }
    if !matches!(args.segments, 2 | 4 | 6 | 8) {
        return Err(CliError::Usage(format!("--segments must be 2, 4, 6 or 8, got {}", args.segments)));
    }
    if !(1..=4).contains(&args.order) {
        return Err(CliError::Usage(format!("--order must be in 1..=4, got {}", args.order)));
    }
    let setup = match &args.constraints {
        Some(p) => ConstraintsFile::read(p)?,
        None => spdc::reference_constraints(),
    };
    let constraints = setup.constraints.to_constraints().map_err(CliError::Numerical)?;
    let coeffs = match &setup.sensitivity {
        Some(s) => s.to_coefficients().map_err(CliError::Numerical)?,
        None => SensitivityCoefficients::reference(),
    };
    let omega = args.omega.unwrap_or_else(reference::omega);
    let mut opts = SolveOptions::new(args.segments, omega);
    opts.order = args.order;
    opts.starts = args.starts;
    opts.seed = args.seed;
    opts.max_detuning = args.max_detuning;
    opts.target_total_length = args.target_length.or(setup.target_total_length_m);
    opts.work_temperature = constraints.flatness.work_temperature;
    opts.validate().map_err(|e| CliError::Usage(e.to_string()))?;

    let result = solve_parallel(&opts, &constraints, &coeffs)?;
    let d = &result.diagnostics;
    eprintln!("starts={} converged={} accepted={}", d.starts, d.converged, d.accepted);
    if result.candidates.is_empty() {
        let why = match d.dominant_failure() {
            Some((check, n)) => format!("`{check}` rejected {n} of {} converged starts", d.converged),
            None => "no start converged".into(),
        };
        return Err(CliError::Numerical(format!("no candidate satisfies the constraints: {why}")));
    }

    std::fs::create_dir_all(&args.out_dir).map_err(|e| CliError::input(args.out_dir.display().to_string(), e.to_string()))?;
    let mut summary = String::from("rank,file,flatness,efficiency_ratio");
    for axis in Axis::physical() {
        let _ = write!(summary, ",width_{0},width_ratio_{0}", axis.name());
    }
    summary.push('\n');
    for (i, c) in result.candidates.iter().take(args.keep).enumerate() {
        let rank = i + 1;
        let mut design = c.design.clone();
        design.name = format!("dmcs-{}seg-rank{rank}", args.segments);
        let detunings: Vec<String> = c.family.half_detunings.iter().map(|v| format!("{v:?}")).collect();
        let meta = [
            ("family", "antisymmetric".to_string()),
            ("half_detunings_rad_per_m", detunings.join(",")),
            ("rank", rank.to_string()),
            ("search_order", args.order.to_string()),
            ("search_seed", args.seed.to_string()),
            ("search_start_index", c.start_index.to_string()),
            ("search_starts", args.starts.to_string()),
        ];
        for (k, v) in meta {
            design.metadata.insert(k.into(), v);
        }
        let mut file = DesignFile::new(&design, &coeffs);
        file.constraints = Some(ConstraintsRecord::from(&constraints));
        let name = format!("candidate_{rank}.json");
        let path = args.out_dir.join(&name);
        std::fs::write(&path, file.to_canonical_string()).map_err(|e| CliError::input(path.display().to_string(), e.to_string()))?;

        let _ = write!(summary, "{rank},{name},{},{}", fmt12(c.report.flatness), fmt12(c.report.efficiency_ratio));
        for axis in Axis::physical() {
            let w = c.report.width(axis).map(fmt12).unwrap_or_else(|| "nan".into());
            let r = c.report.width_ratio(axis).map(fmt12).unwrap_or_else(|| "nan".into());
            let _ = write!(summary, ",{w},{r}");
        }
        summary.push('\n');
    }
    emit(None, &summary)
}
