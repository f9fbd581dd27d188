//! `odbif`: constants, spectra, kernel tables and branch verification from the command line.

mod render;
mod svg;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use odbif::constants::{self, ProblemDims};
use odbif::profiles::{self, ProfileKind, RadialShape, SolutionField};
use odbif::pullback::{self, GridField, Reduction, TensorGrid};
use odbif::spectra::{self, BesselProfile};
use odbif::verify::{self, SampleGrid};
use odbif::Error;

use render::Report;

pub const SCHEMA: &str = "odbif/1";
const OUT_DIR_ENV: &str = "ODBIF_OUT_DIR";

#[derive(Parser, Debug)]
#[command(
    name = "odbif",
    version,
    about = "Bifurcation constants and branch verification for overdetermined eigenvalue problems on cylinders and slabs"
)]
struct Cli {
    /// Worker threads used for parameter sweeps
    #[arg(long, global = true, default_value_t = 1)]
    threads: usize,
    /// Output format of the report
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Write the report to this file instead of stdout (relative paths resolve against $ODBIF_OUT_DIR)
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Json,
    Csv,
    Text,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum Problem {
    Dirichlet,
    Slab,
}

#[derive(Args, Clone, Debug)]
struct ProblemArgs {
    /// Cylinder (Dirichlet) or slab problem
    #[arg(long, value_enum, default_value_t = Problem::Dirichlet)]
    problem: Problem,
    /// Dimension N of the radial block (cylinder only)
    #[arg(long = "N")]
    dim: Option<usize>,
    /// Number m of periodic variables
    #[arg(long, default_value_t = 1)]
    m: usize,
    /// Mode index n
    #[arg(long)]
    n: usize,
}

#[derive(Args, Clone, Debug)]
struct SweepArgs {
    #[command(flatten)]
    problem: ProblemArgs,
    /// Comma-separated, strictly decreasing s values
    #[arg(long, value_delimiter = ',', default_value = "0.04,0.02,0.01,0.005")]
    s: Vec<f64>,
    /// Sample grid `radial x angular`
    #[arg(long, value_parser = parse_grid, default_value = "201x256")]
    grid: (usize, usize),
    /// Use the non-kernel probe with angular factor cos(2x) instead of the kernel direction
    #[arg(long)]
    control: bool,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Explicit constants of the bifurcation branch
    Constants(ProblemArgs),
    /// Radial Robin eigenvalues (cylinder) or slab eigenvalues
    Spectrum {
        #[arg(long, value_enum, default_value_t = Problem::Dirichlet)]
        problem: Problem,
        #[arg(long = "N", default_value_t = 1)]
        dim: usize,
        #[arg(long, default_value_t = 10)]
        count: usize,
        /// Also report the finite-volume oracle on this many cells
        #[arg(long)]
        oracle_grid: Option<usize>,
    },
    /// Mode table and kernel hits at the bifurcation parameter
    Kernel {
        #[command(flatten)]
        problem: ProblemArgs,
        #[arg(long, default_value_t = 200)]
        kmax: usize,
        #[arg(long, default_value_t = 200)]
        lmax: usize,
        #[arg(long, default_value_t = 1e-8)]
        tol: f64,
        /// Added to the bifurcation value of lambda
        #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
        lambda_shift: f64,
    },
    /// Verification runs
    #[command(subcommand)]
    Verify(VerifyCommand),
    /// Write the first-order domain profile as CSV and/or SVG
    ExportProfile {
        #[command(flatten)]
        problem: ProblemArgs,
        #[arg(long, allow_hyphen_values = true)]
        s: f64,
        #[arg(long)]
        csv: Option<PathBuf>,
        #[arg(long)]
        svg: Option<PathBuf>,
        #[arg(long, default_value_t = 513)]
        points: usize,
        /// Profile frame: physical (boundary at |t| = 1/h) or reference (H = 1 + h_u)
        #[arg(long, value_enum, default_value_t = Frame::Physical)]
        frame: Frame,
    },
    /// Solve the perturbed eigenproblem (m = 1) and write the eigenfield as CSV
    Eigenfield {
        #[command(flatten)]
        problem: ProblemArgs,
        #[arg(long, allow_hyphen_values = true)]
        s: f64,
        #[arg(long, value_parser = parse_grid, default_value = "64x32")]
        grid: (usize, usize),
        #[arg(long)]
        csv: Option<PathBuf>,
    },
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum Frame {
    Physical,
    Reference,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum Probe {
    Kernel,
    Control,
    Radial,
}

#[derive(Subcommand, Debug)]
enum VerifyCommand {
    /// Residual slopes of the first-order branch
    Branch(SweepArgs),
    /// Residual slopes against the lambda-free (non-constant) Neumann condition
    Nonconstant(SweepArgs),
    /// Difference quotients against the analytic linearisation
    Linearization {
        #[command(flatten)]
        problem: ProblemArgs,
        #[arg(long, value_delimiter = ',', default_value = "0.01,0.001,0.0001")]
        eps: Vec<f64>,
        #[arg(long, value_enum, default_value_t = Probe::Kernel)]
        probe: Probe,
        /// Radial wavenumber of the `radial` probe
        #[arg(long, default_value_t = 1.7)]
        wavenumber: f64,
        #[arg(long, value_parser = parse_grid, default_value = "201x256")]
        grid: (usize, usize),
    },
    /// Sign of the transversality pairing
    Transversality(ProblemArgs),
    /// Eigen-solves on perturbed profiles and the decay of the Neumann deviation
    Eigen {
        #[command(flatten)]
        problem: ProblemArgs,
        #[arg(long, value_delimiter = ',', default_value = "0.02,0.01")]
        s: Vec<f64>,
        #[arg(long, value_parser = parse_grid, default_value = "256x128")]
        fine: (usize, usize),
        #[arg(long, value_parser = parse_grid, default_value = "128x64")]
        coarse: (usize, usize),
    },
}

fn parse_grid(s: &str) -> Result<(usize, usize), String> {
    let (a, b) = s
        .split_once(['x', 'X'])
        .ok_or_else(|| format!("expected RADIALxANGULAR, got `{s}`"))?;
    let a = a.trim().parse::<usize>().map_err(|e| e.to_string())?;
    let b = b.trim().parse::<usize>().map_err(|e| e.to_string())?;
    Ok((a, b))
}

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Numerical(String),
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::InvalidInput(_) | Error::Domain(_) => CliError::Usage(e.to_string()),
            _ => CliError::Numerical(e.to_string()),
        }
    }
}

fn resolve(path: &Path) -> PathBuf {
    match std::env::var_os(OUT_DIR_ENV) {
        Some(dir) if path.is_relative() => Path::new(&dir).join(path),
        _ => path.to_path_buf(),
    }
}

fn write_file(path: &Path, contents: &str) -> Result<PathBuf, CliError> {
    let p = resolve(path);
    if let Some(parent) = p.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(parent)
            .map_err(|e| CliError::Numerical(format!("{}: {e}", parent.display())))?;
    }
    std::fs::write(&p, contents)
        .map_err(|e| CliError::Numerical(format!("{}: {e}", p.display())))?;
    Ok(p)
}

fn dims(p: &ProblemArgs) -> Result<ProblemDims, CliError> {
    match p.problem {
        Problem::Dirichlet => {
            let dim = p.dim.ok_or_else(|| {
                CliError::Usage("--N is required for the dirichlet problem".into())
            })?;
            Ok(ProblemDims::new(dim, p.m, p.n)?)
        }
        Problem::Slab => Ok(ProblemDims::new(1, p.m, p.n)?),
    }
}

fn branch_field(p: &ProblemArgs) -> Result<SolutionField, CliError> {
    let d = dims(p)?;
    Ok(match p.problem {
        Problem::Dirichlet => profiles::cylinder_first_order_field(d, 0.0)?,
        Problem::Slab => profiles::slab_first_order_field(d.n, d.m, 0.0)?,
    })
}

fn run(cli: &Cli) -> Result<Report, CliError> {
    match &cli.command {
        Command::Constants(p) => {
            let d = dims(p)?;
            match p.problem {
                Problem::Dirichlet => {
                    let (c, prov) = constants::dirichlet_constants_with_provenance(d)?;
                    let radii = constants::classical_radii(d.dim)?;
                    Ok(render::dirichlet_constants(d, &c, &prov, &radii))
                }
                Problem::Slab => Ok(render::slab_constants(d, &constants::slab_constants(d.n)?)),
            }
        }
        Command::Spectrum {
            problem,
            dim,
            count,
            oracle_grid,
        } => {
            if *count == 0 {
                return Err(CliError::Usage("--count must be >= 1".into()));
            }
            match problem {
                Problem::Dirichlet => {
                    let evs = spectra::nu_eigenvalues(*dim, *count)?;
                    let oracle = match oracle_grid {
                        Some(g) => Some(
                            (1..=*count)
                                .map(|l| spectra::nu_eigenvalue_oracle(*dim, l, *g))
                                .collect::<Result<Vec<_>, _>>()?,
                        ),
                        None => None,
                    };
                    Ok(render::radial_spectrum(
                        *dim,
                        &evs,
                        oracle.as_deref(),
                        *oracle_grid,
                    ))
                }
                Problem::Slab => {
                    let evs: Vec<_> = (0..*count).map(spectra::slab_eigenvalue).collect();
                    Ok(render::slab_spectrum(&evs))
                }
            }
        }
        Command::Kernel {
            problem,
            kmax,
            lmax,
            tol,
            lambda_shift,
        } => {
            let d = dims(problem)?;
            let table = match problem.problem {
                Problem::Dirichlet => {
                    let lambda = constants::dirichlet_constants(d)?.lambda_n + lambda_shift;
                    constants::mode_table(d, lambda, *kmax, *lmax, *tol)?
                }
                Problem::Slab => {
                    let lambda = constants::slab_constants(d.n)?.gamma_n + lambda_shift;
                    constants::slab_mode_table(d.n, lambda, *kmax, *lmax, *tol)?
                }
            };
            Ok(render::kernel(&table, *kmax, *lmax))
        }
        Command::Verify(v) => run_verify(v),
        Command::ExportProfile {
            problem,
            s,
            csv,
            svg,
            points,
            frame,
        } => {
            if *points < 2 {
                return Err(CliError::Usage("--points must be >= 2".into()));
            }
            let field = branch_field(problem)?.with_s(*s);
            let profile = match frame {
                Frame::Physical => field.physical_profile()?,
                Frame::Reference => field.reference_profile()?,
            };
            let line = profile.polyline(*points);
            let csv_path = match (csv, svg) {
                (None, None) => Some(PathBuf::from("profile.csv")),
                _ => csv.clone(),
            };
            let mut written = Vec::new();
            if let Some(path) = csv_path {
                let mut body = String::from("x,h\n");
                for (x, h) in &line {
                    body.push_str(&format!("{x},{h}\n"));
                }
                written.push(write_file(&path, &body)?);
            }
            if let Some(path) = svg {
                let title = format!("{} profile, s = {s}", profile.kind.name());
                written.push(write_file(
                    path,
                    &svg::polyline_plot(&title, "x_1", "h", &line),
                )?);
            }
            Ok(render::exported_profile(&profile, &written))
        }
        Command::Eigenfield {
            problem,
            s,
            grid,
            csv,
        } => {
            let field = branch_field(problem)?.with_s(*s);
            if field.dims.m != 1 {
                return Err(CliError::Usage(
                    "the eigen-solver supports m = 1 only".into(),
                ));
            }
            let g = TensorGrid::for_kind(field.kind, grid.0, grid.1)?;
            let profile = field.reference_profile()?;
            let op = match field.kind {
                ProfileKind::Dirichlet => pullback::assemble_cylinder_operator(
                    &profile,
                    field.dims.dim,
                    field.lambda,
                    field.dims.n,
                    &g,
                    Reduction::EvenInX,
                )?,
                ProfileKind::Slab => pullback::assemble_slab_operator(
                    &profile,
                    field.lambda,
                    field.dims.n,
                    &g,
                    Reduction::EvenInX,
                )?,
            };
            let seed = GridField::sample(&g, |r, x| field.value(r, &[x]));
            let ep = pullback::solve_eigenpair_near(
                &op,
                field.zero_order,
                &seed,
                pullback::DEFAULT_EIGEN_TOL,
            )?;
            let neumann = pullback::boundary_neumann(&ep.field, &profile, field.lambda);
            let path = write_file(
                csv.as_deref().unwrap_or(Path::new("eigenfield.csv")),
                &ep.field.to_csv(),
            )?;
            Ok(render::eigenfield(&field, &g, &ep, &neumann, &path))
        }
    }
}

fn run_verify(v: &VerifyCommand) -> Result<Report, CliError> {
    match v {
        VerifyCommand::Branch(a) | VerifyCommand::Nonconstant(a) => {
            let nonconstant = matches!(v, VerifyCommand::Nonconstant(_));
            let base = branch_field(&a.problem)?;
            let field = if a.control {
                base.with_probe(base.probe, 2)
            } else {
                base
            };
            let metric = if nonconstant {
                verify::NeumannMetric::NonConstant
            } else {
                verify::NeumannMetric::Constant
            };
            let variant = match (nonconstant, a.control) {
                (false, false) => "branch",
                (false, true) => "control",
                (true, false) => "nonconstant",
                (true, true) => "nonconstant-control",
            };
            let grid = SampleGrid {
                n_r: a.grid.0,
                n_x: a.grid.1,
            };
            let report = verify::branch_residual(&field, variant, &a.s, grid, metric)?;
            Ok(render::residual(&report, a.control))
        }
        VerifyCommand::Linearization {
            problem,
            eps,
            probe,
            wavenumber,
            grid,
        } => {
            let base = branch_field(problem)?;
            let field = match probe {
                Probe::Kernel => base,
                Probe::Control => base.with_probe(base.probe, 2),
                Probe::Radial => {
                    let shape = match base.kind {
                        ProfileKind::Dirichlet => {
                            RadialShape::Bessel(BesselProfile::new(base.dims.beta(), *wavenumber))
                        }
                        ProfileKind::Slab => RadialShape::Sine {
                            amplitude: 1.0,
                            frequency: *wavenumber,
                        },
                    };
                    base.with_probe(shape, 1)
                }
            };
            let grid = SampleGrid {
                n_r: grid.0,
                n_x: grid.1,
            };
            let report = verify::linearization_check(&field, eps, grid)?;
            Ok(render::linearization(&report, *probe == Probe::Kernel))
        }
        VerifyCommand::Transversality(p) => {
            let d = dims(p)?;
            let report = match p.problem {
                Problem::Dirichlet => verify::transversality_pairing(d)?,
                Problem::Slab => verify::slab_transversality_pairing(d.n, d.m)?,
            };
            Ok(render::transversality(&report))
        }
        VerifyCommand::Eigen {
            problem,
            s,
            fine,
            coarse,
        } => {
            let field = branch_field(problem)?;
            let flat = verify::flat_eigen_convergence(&field, &[(coarse.0, 8), (fine.0, 8)])?;
            let report = verify::eigen_verification(&field, *fine, *coarse, s)?;
            Ok(render::eigen(&report, &flat))
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if cli.threads == 0 {
        eprintln!("error: --threads must be >= 1");
        return ExitCode::from(2);
    }
    if let Err(e) = rayon::ThreadPoolBuilder::new()
        .num_threads(cli.threads)
        .build_global()
    {
        eprintln!("error: thread pool: {e}");
        return ExitCode::from(3);
    }
    let report = match run(&cli) {
        Ok(r) => r,
        Err(CliError::Usage(msg)) => {
            eprintln!("error: {msg}");
            return ExitCode::from(2);
        }
        Err(CliError::Numerical(msg)) => {
            eprintln!("numerical failure: {msg}");
            return ExitCode::from(3);
        }
    };
    let body = report.render(cli.format);
    match &cli.out {
        Some(path) => {
            if let Err(CliError::Numerical(msg) | CliError::Usage(msg)) = write_file(path, &body) {
                eprintln!("error: {msg}");
                return ExitCode::from(3);
            }
        }
        None => print!("{body}"),
    }
    match report.verdict {
        Some(pass) => {
            if cli.format != Format::Text {
                eprintln!("{}", if pass { "PASS" } else { "FAIL" });
            }
            if pass {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        None => ExitCode::SUCCESS,
    }
}
