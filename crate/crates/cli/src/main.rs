use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use holeburn::moments::moment;
use holeburn::states::photon_distribution;
use holeburn::sweep::{
    self, emit, BasisChoice, Family, OutputFormat, PGrid, RowStatus, SweepConfig, SweepResult,
    SweepRow, WitnessSpec,
};
use holeburn::witnesses::WitnessKind;
use holeburn::{BinomialParams, Error, FockSuperposition, MomentOrder};

const EXIT_CONFIG: u8 = 2;
const EXIT_NUMERICAL: u8 = 3;
const EXIT_IO: u8 = 1;

#[derive(Parser, Debug)]
#[command(
    name = "holeburn",
    version,
    about = "Binomial and hole-burned Fock states, moments and nonclassicality witnesses"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Print the amplitudes and photon-number distribution of a state.
    State {
        #[command(flatten)]
        point: PointArgs,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Evaluate one normally-ordered moment <a†^t a^r>.
    Moment {
        #[command(flatten)]
        point: PointArgs,
        /// Power of the creation operator.
        #[arg(long)]
        t: usize,
        /// Power of the annihilation operator.
        #[arg(long)]
        r: usize,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Evaluate one witness at a single (p, M) point.
    Witness {
        #[command(flatten)]
        point: PointArgs,
        #[arg(long)]
        witness: WitnessKind,
        /// Witness order l (antibunching, hosps).
        #[arg(long)]
        order: Option<usize>,
        #[arg(long, default_value = "default")]
        basis: BasisChoice,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Run a witness sweep over a (M, p) grid.
    Sweep {
        /// JSON sweep configuration; flags override its fields.
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        family: Option<Family>,
        /// Maximum photon numbers, comma separated or repeated.
        #[arg(long = "M", value_delimiter = ',')]
        m: Vec<usize>,
        /// p grid as start:stop:step (inclusive).
        #[arg(long = "p-grid")]
        p_grid: Option<PGrid>,
        #[arg(long)]
        hole: Option<usize>,
        #[arg(long, value_delimiter = ',')]
        witness: Vec<WitnessKind>,
        /// Orders for antibunching/hosps, comma separated or repeated.
        #[arg(long, value_delimiter = ',')]
        order: Vec<usize>,
        #[arg(long)]
        basis: Option<BasisChoice>,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        format: Option<OutputFormat>,
        /// Worker threads (defaults to all cores).
        #[arg(long)]
        threads: Option<usize>,
    },
    /// List the figure presets, or run one by name.
    Preset {
        name: Option<String>,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        format: Option<OutputFormat>,
        #[arg(long)]
        threads: Option<usize>,
    },
}

#[derive(Args, Debug)]
struct PointArgs {
    #[arg(long, default_value = "binomial")]
    family: Family,
    #[arg(long = "M")]
    m: usize,
    #[arg(long)]
    p: f64,
    #[arg(long)]
    hole: Option<usize>,
}

#[derive(Args, Debug)]
struct OutputArgs {
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, default_value = "csv")]
    format: OutputFormat,
}

#[derive(Debug)]
enum CliError {
    Lib(Error),
    Io(io::Error),
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Lib(e)
    }
}

impl From<io::Error> for CliError {
    fn from(e: io::Error) -> Self {
        CliError::Io(e)
    }
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Lib(Error::Config(_)) => EXIT_CONFIG,
            CliError::Lib(_) => EXIT_NUMERICAL,
            CliError::Io(_) => EXIT_IO,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Lib(e) => write!(f, "{e}"),
            CliError::Io(e) => write!(f, "I/O error: {e}"),
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}

fn open_output(path: Option<&PathBuf>) -> io::Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p)?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn run(command: Command) -> Result<(), CliError> {
    match command {
        Command::State { point, output } => {
            let state = build_state(&point)?;
            write_state(&state, &output)
        }
        Command::Moment {
            point,
            t,
            r,
            output,
        } => {
            let state = build_state(&point)?;
            let value = moment(&state, MomentOrder::new(t, r)?);
            let mut out = open_output(output.out.as_ref())?;
            match output.format {
                OutputFormat::Csv => {
                    writeln!(out, "t,r,re,im")?;
                    writeln!(
                        out,
                        "{t},{r},{},{}",
                        sweep::format_value(value.re),
                        sweep::format_value(value.im)
                    )?;
                }
                OutputFormat::Json => {
                    let record =
                        serde_json::json!([{ "t": t, "r": r, "re": value.re, "im": value.im }]);
                    writeln!(out, "{}", serde_json::to_string_pretty(&record).unwrap())?;
                }
            }
            out.flush()?;
            Ok(())
        }
        Command::Witness {
            point,
            witness,
            order,
            basis,
            output,
        } => {
            let spec =
                match witness {
                    WitnessKind::Vogel => WitnessSpec::vogel(basis),
                    kind => WitnessSpec {
                        kind,
                        order: Some(order.ok_or_else(|| {
                            Error::Config(format!("--order is required for {kind}"))
                        })?),
                        basis: None,
                    },
                };
            let state = build_state(&point)?;
            let value = match spec.kind {
                WitnessKind::Antibunching => {
                    holeburn::witnesses::antibunching(&state, spec.reported_order())?
                }
                WitnessKind::Hosps => holeburn::witnesses::hosps(&state, spec.reported_order())?,
                WitnessKind::Vogel => holeburn::witnesses::vogel_det(&state, &basis.basis())?,
            }
            .value;
            let result = SweepResult {
                rows: vec![SweepRow {
                    family: point.family,
                    m: point.m,
                    p: point.p,
                    hole: match point.family {
                        Family::Binomial => None,
                        Family::VacuumFiltered => Some(0),
                        Family::HoleBurned => point.hole,
                    },
                    witness: spec.kind,
                    order: spec.reported_order(),
                    value: Some(value),
                    nonclassical: Some(value < 0.0),
                    status: RowStatus::Ok,
                }],
            };
            let mut out = open_output(output.out.as_ref())?;
            emit(&result, output.format, &mut out)?;
            Ok(())
        }
        Command::Sweep {
            config,
            family,
            m,
            p_grid,
            hole,
            witness,
            order,
            basis,
            out,
            format,
            threads,
        } => {
            let base = match config {
                Some(path) => Some(SweepConfig::from_json(
                    &std::fs::read_to_string(&path).map_err(|e| {
                        Error::Config(format!("cannot read {}: {e}", path.display()))
                    })?,
                )?),
                None => None,
            };
            let mut cfg = merge_sweep_config(base, family, m, p_grid, hole)?;
            if !witness.is_empty() {
                cfg.witnesses = witness_specs(&witness, &order, basis.unwrap_or_default())?;
            } else if !order.is_empty() || basis.is_some() {
                return Err(Error::Config("--order/--basis need --witness".into()).into());
            }
            if let Some(path) = out {
                cfg.output_path = Some(path.display().to_string());
            }
            if let Some(format) = format {
                cfg.format = format;
            }
            run_and_emit(&cfg, threads)
        }
        Command::Preset {
            name,
            out,
            format,
            threads,
        } => match name {
            None => {
                let mut stdout = io::stdout().lock();
                for preset in sweep::presets() {
                    writeln!(stdout, "{:<6}  {}", preset.name, preset.description)?;
                }
                Ok(())
            }
            Some(name) => {
                let mut cfg = sweep::preset(&name)?.config;
                cfg.output_path = out.map(|p| p.display().to_string());
                if let Some(format) = format {
                    cfg.format = format;
                }
                run_and_emit(&cfg, threads)
            }
        },
    }
}

fn build_state(point: &PointArgs) -> Result<FockSuperposition, CliError> {
    if point.hole.is_some() && point.family != Family::HoleBurned {
        return Err(Error::Config(format!(
            "--hole only applies to hole_burned, not {}",
            point.family
        ))
        .into());
    }
    let params = BinomialParams::new(point.p, point.m).map_err(|e| Error::Config(e.to_string()))?;
    Ok(point.family.build(params, point.hole)?)
}

fn write_state(state: &FockSuperposition, output: &OutputArgs) -> Result<(), CliError> {
    let probs = photon_distribution(state);
    let mut out = open_output(output.out.as_ref())?;
    match output.format {
        OutputFormat::Csv => {
            writeln!(out, "n,re,im,probability")?;
            for (row, prob) in state.amplitude_rows().iter().zip(&probs) {
                writeln!(
                    out,
                    "{},{},{},{}",
                    row.n,
                    sweep::format_value(row.re),
                    sweep::format_value(row.im),
                    sweep::format_value(*prob)
                )?;
            }
        }
        OutputFormat::Json => {
            let rows: Vec<_> = state
                .amplitude_rows()
                .iter()
                .zip(&probs)
                .map(|(row, prob)| {
                    serde_json::json!({ "n": row.n, "re": row.re, "im": row.im, "probability": prob })
                })
                .collect();
            writeln!(out, "{}", serde_json::to_string_pretty(&rows).unwrap())?;
        }
    }
    out.flush()?;
    Ok(())
}

fn merge_sweep_config(
    base: Option<SweepConfig>,
    family: Option<Family>,
    m: Vec<usize>,
    p_grid: Option<PGrid>,
    hole: Option<usize>,
) -> Result<SweepConfig, Error> {
    let mut cfg = match base {
        Some(cfg) => cfg,
        None => SweepConfig {
            family: family.unwrap_or(Family::Binomial),
            hole_index: None,
            m_values: Vec::new(),
            p_grid: p_grid.ok_or_else(|| Error::Config("--p-grid is required".into()))?,
            witnesses: Vec::new(),
            output_path: None,
            format: OutputFormat::Csv,
        },
    };
    if let Some(family) = family {
        cfg.family = family;
    }
    if !m.is_empty() {
        cfg.m_values = m;
    }
    if let Some(grid) = p_grid {
        cfg.p_grid = grid;
    }
    if hole.is_some() {
        cfg.hole_index = hole;
    }
    Ok(cfg)
}

fn witness_specs(
    kinds: &[WitnessKind],
    orders: &[usize],
    basis: BasisChoice,
) -> Result<Vec<WitnessSpec>, Error> {
    let mut specs = Vec::new();
    for &kind in kinds {
        match kind {
            WitnessKind::Vogel => specs.push(WitnessSpec::vogel(basis)),
            kind if orders.is_empty() => {
                return Err(Error::Config(format!("--order is required for {kind}")))
            }
            kind => specs.extend(orders.iter().map(|&l| WitnessSpec {
                kind,
                order: Some(l),
                basis: None,
            })),
        }
    }
    Ok(specs)
}

fn run_and_emit(cfg: &SweepConfig, threads: Option<usize>) -> Result<(), CliError> {
    let result = match threads {
        Some(n) => sweep::run_sweep_with_threads(cfg, n)?,
        None => sweep::run_sweep(cfg)?,
    };
    let skipped = result.degenerate_count();
    if skipped > 0 {
        eprintln!("note: {skipped} degenerate grid point rows recorded with status `degenerate`");
    }
    let path = cfg.output_path.as_ref().map(PathBuf::from);
    let mut out = open_output(path.as_ref())?;
    emit(&result, cfg.format, &mut out)?;
    Ok(())
}
