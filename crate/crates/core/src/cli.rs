//! Command-line front end. [`run`] parses arguments, dispatches, writes the
//! result and returns the process exit code:
//!
//! | code | meaning |
//! |---|---|
//! | 0 | success |
//! | 2 | invalid arguments or input |
//! | 3 | numerical failure (non-convergence, no bracket) |
//! | 4 | an acceptance check failed |

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

use crate::barrel::{b3_polar_distribution, fit_b3_polar_scale, generating_distribution_closed};
use crate::certify::{
    nnls_certify, threshold_sweep, CertificateReport, CertifySpec, SweepMode, SweepReport,
    ACCEPT_RESIDUAL, DEFAULT_LAT_GRID, DEFAULT_SEED, DEFAULT_T_GRID, REJECT_RESIDUAL,
};
use crate::distributions::SphericalDistributionRS;
use crate::error::Error;
use crate::numerics::QuadratureSpec;
use crate::profiles::{angle_grid, AngleProfile, BarrelParams};
use crate::svg::{Arrow, Plot, Series};
use crate::transforms::generating_distribution_pipeline;
use crate::verify::{run_suite, CheckResult, SUITES};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_NUMERICAL: i32 = 3;
pub const EXIT_ACCEPTANCE: i32 = 4;

/// Environment variable naming the default output directory.
pub const OUT_DIR_ENV: &str = "ZONOPOLAR_OUT_DIR";

pub const PROFILE_SCHEMA: &str = "zonopolar.profile/1";
pub const GENERATE_SCHEMA: &str = "zonopolar.generate/1";
pub const VERIFY_SCHEMA: &str = "zonopolar.verify/1";

#[derive(Debug, Parser)]
#[command(
    name = "zonopolar",
    version,
    about = "Generating distributions and zonoid checks for barrel bodies"
)]
pub struct Cli {
    /// Directory for result files when --output is not given; without
    /// either, results go to standard output.
    #[arg(long, global = true, env = OUT_DIR_ENV)]
    pub out_dir: Option<PathBuf>,

    /// Seed for the randomized checks.
    #[arg(long, global = true, default_value_t = DEFAULT_SEED)]
    pub seed: u64,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Tabulate the norm, support function and polar radial function of B_{n,r}.
    Profile(ProfileArgs),
    /// Generating distribution of a rotationally symmetric norm.
    Generate(GenerateArgs),
    /// Fit the norm by a positive latitude measure and grade the fit.
    Certify(CertifyArgs),
    /// Run the acceptance checks.
    Verify(VerifyArgs),
    /// Bisect for the radius where the polar stops being a zonoid.
    Sweep(SweepArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
    Svg,
    Table,
}

impl Format {
    fn extension(self) -> &'static str {
        match self {
            Format::Csv => "csv",
            Format::Json => "json",
            Format::Svg => "svg",
            Format::Table => "txt",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum NormKind {
    Barrel,
    Euclidean,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum GenerateMode {
    Closed,
    Pipeline,
    Both,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum CliSweepMode {
    ClosedForm,
    Nnls,
}

#[derive(Debug, Args)]
pub struct ProfileArgs {
    #[arg(long, default_value_t = 3)]
    pub n: usize,
    #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
    pub r: f64,
    /// Number of equally spaced angles in [0, pi/2].
    #[arg(long, default_value_t = 91)]
    pub points: usize,
    /// csv, json or svg
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
    #[arg(long)]
    pub output: Option<PathBuf>,
}

/// Where the norm comes from: a barrel radius, the Euclidean norm, or a
/// profile JSON file.
#[derive(Debug, Args)]
pub struct NormArgs {
    #[arg(long, allow_negative_numbers = true)]
    pub r: Option<f64>,
    #[arg(long, value_enum, default_value_t = NormKind::Barrel)]
    pub norm: NormKind,
    /// Profile JSON (for instance a sampled profile); overrides --norm and --r.
    #[arg(long)]
    pub profile: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct GenerateArgs {
    #[command(flatten)]
    pub norm: NormArgs,
    #[arg(long, default_value_t = 4)]
    pub n: usize,
    #[arg(long, value_enum, default_value_t = GenerateMode::Both)]
    pub mode: GenerateMode,
    /// json, csv or svg
    #[arg(long, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    /// Heights tabulated in csv and svg output.
    #[arg(long, default_value_t = 201)]
    pub points: usize,
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct GridArgs {
    #[arg(long, default_value_t = DEFAULT_LAT_GRID)]
    pub lat_grid: usize,
    #[arg(long, default_value_t = DEFAULT_T_GRID)]
    pub t_grid: usize,
    /// Residual at or below which the verdict is positive.
    #[arg(long, default_value_t = ACCEPT_RESIDUAL)]
    pub accept: f64,
    /// Residual at or above which the verdict is negative.
    #[arg(long, default_value_t = REJECT_RESIDUAL)]
    pub reject: f64,
}

impl GridArgs {
    fn spec(&self) -> Result<CertifySpec, String> {
        if self.lat_grid < 2 || self.t_grid < 2 {
            return Err("grids need at least two nodes".into());
        }
        if !(self.accept > 0.0 && self.accept < self.reject) {
            return Err(format!(
                "need 0 < accept < reject, got {} and {}",
                self.accept, self.reject
            ));
        }
        Ok(CertifySpec {
            lat_grid: self.lat_grid,
            t_grid: self.t_grid,
            accept: self.accept,
            reject: self.reject,
        })
    }
}

#[derive(Debug, Args)]
pub struct CertifyArgs {
    #[command(flatten)]
    pub norm: NormArgs,
    #[arg(long, default_value_t = 4)]
    pub n: usize,
    #[command(flatten)]
    pub grid: GridArgs,
    /// json or table
    #[arg(long, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    /// all, or one of the suite names / ids (A1..A9)
    #[arg(long, default_value = "all")]
    pub suite: String,
    /// table or json
    #[arg(long, value_enum, default_value_t = Format::Table)]
    pub format: Format,
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    #[arg(long, value_enum, default_value_t = CliSweepMode::ClosedForm)]
    pub mode: CliSweepMode,
    #[arg(long, default_value_t = 0.5)]
    pub lo: f64,
    #[arg(long, default_value_t = 1.5)]
    pub hi: f64,
    /// Half-width of the final bracket [default: 1e-6 closed-form, 0.02 nnls]
    #[arg(long)]
    pub tol: Option<f64>,
    #[arg(long, default_value_t = 4)]
    pub n: usize,
    #[command(flatten)]
    pub grid: GridArgs,
    /// json or table
    #[arg(long, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProfileRow {
    pub phi: f64,
    pub norm: f64,
    pub support: f64,
    pub radial: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProfileTable {
    pub schema: String,
    pub n: usize,
    pub r: f64,
    pub rows: Vec<ProfileRow>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GenerateDocument {
    pub schema: String,
    pub n: usize,
    pub profile: String,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub r: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub closed: Option<SphericalDistributionRS>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub pipeline: Option<SphericalDistributionRS>,
    /// Largest density difference between the two routes on the csv grid.
    #[serde(
        rename = "maxDensityGap",
        skip_serializing_if = "Option::is_none",
        default
    )]
    pub max_density_gap: Option<f64>,
    #[serde(rename = "isMeasure")]
    pub is_measure: bool,
}

impl GenerateDocument {
    /// The pipeline result when present, else the closed form.
    pub fn primary(&self) -> Option<&SphericalDistributionRS> {
        self.pipeline.as_ref().or(self.closed.as_ref())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerifyDocument {
    pub schema: String,
    pub passed: bool,
    pub checks: Vec<CheckResult>,
}

/// Failure of a subcommand, carrying its exit code.
#[derive(Debug)]
pub struct Failure {
    pub code: i32,
    pub message: String,
}

impl Failure {
    fn usage(message: impl Into<String>) -> Self {
        Failure {
            code: EXIT_USAGE,
            message: message.into(),
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure {
            code: if e.is_numerical() {
                EXIT_NUMERICAL
            } else {
                EXIT_USAGE
            },
            message: e.to_string(),
        }
    }
}

type CmdResult<T> = std::result::Result<T, Failure>;

fn require_format(format: Format, allowed: &[Format], cmd: &str) -> CmdResult<()> {
    if allowed.contains(&format) {
        Ok(())
    } else {
        let names: Vec<&str> = allowed.iter().map(|f| f.extension()).collect();
        Err(Failure::usage(format!(
            "{cmd} supports --format {}",
            names.join(", ").replace("txt", "table")
        )))
    }
}

fn to_json<T: Serialize>(value: &T) -> CmdResult<String> {
    serde_json::to_string_pretty(value)
        .map(|s| s + "\n")
        .map_err(|e| Failure::usage(format!("serialization failed: {e}")))
}

struct Output<'a> {
    path: Option<PathBuf>,
    stdout: &'a mut dyn Write,
}

impl Output<'_> {
    fn emit(&mut self, text: &str) -> CmdResult<()> {
        match &self.path {
            Some(p) => {
                if let Some(dir) = p.parent().filter(|d| !d.as_os_str().is_empty()) {
                    fs::create_dir_all(dir)
                        .map_err(|e| Failure::usage(format!("{}: {e}", dir.display())))?;
                }
                fs::write(p, text).map_err(|e| Failure::usage(format!("{}: {e}", p.display())))
            }
            None => self
                .stdout
                .write_all(text.as_bytes())
                .map_err(|e| Failure::usage(format!("stdout: {e}"))),
        }
    }
}

fn output_path(
    explicit: &Option<PathBuf>,
    out_dir: &Option<PathBuf>,
    stem: &str,
    format: Format,
) -> Option<PathBuf> {
    explicit.clone().or_else(|| {
        out_dir
            .as_ref()
            .map(|d| d.join(format!("{stem}.{}", format.extension())))
    })
}

fn check_radius(r: f64) -> CmdResult<()> {
    if r > 0.0 && r.is_finite() {
        Ok(())
    } else {
        Err(Failure::usage(format!("--r must be positive, got {r}")))
    }
}

fn read_profile(path: &Path) -> CmdResult<AngleProfile> {
    let text =
        fs::read_to_string(path).map_err(|e| Failure::usage(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| Failure::usage(format!("{}: {e}", path.display())))
}

fn resolve_norm(args: &NormArgs) -> CmdResult<AngleProfile> {
    if let Some(p) = &args.profile {
        return read_profile(p);
    }
    match args.norm {
        NormKind::Euclidean => Ok(AngleProfile::euclidean()),
        NormKind::Barrel => {
            let r = args
                .r
                .ok_or_else(|| Failure::usage("--r is required for the barrel norm"))?;
            check_radius(r)?;
            Ok(AngleProfile::barrel_norm(r)?)
        }
    }
}

fn cmd_profile(args: &ProfileArgs) -> CmdResult<(String, &'static str)> {
    require_format(
        args.format,
        &[Format::Csv, Format::Json, Format::Svg],
        "profile",
    )?;
    check_radius(args.r)?;
    let params = BarrelParams::new(args.n, args.r)?;
    if args.points < 2 {
        return Err(Failure::usage("--points must be at least 2"));
    }
    let norm = AngleProfile::barrel_norm(params.r)?;
    let support = AngleProfile::barrel_support(params.r)?;
    let radial = AngleProfile::polar_radial(params.r)?;
    let rows = angle_grid(args.points)
        .into_iter()
        .map(|phi| {
            Ok(ProfileRow {
                phi,
                norm: norm.eval(phi)?,
                support: support.eval(phi)?,
                radial: radial.eval(phi)?,
            })
        })
        .collect::<crate::Result<Vec<_>>>()?;
    let text = match args.format {
        Format::Csv => {
            let mut s = String::from("phi,norm,support,radial\n");
            for r in &rows {
                s.push_str(&format!(
                    "{},{},{},{}\n",
                    r.phi, r.norm, r.support, r.radial
                ));
            }
            s
        }
        Format::Json => to_json(&ProfileTable {
            schema: PROFILE_SCHEMA.into(),
            n: params.n,
            r: params.r,
            rows,
        })?,
        _ => profile_svg(&params, &norm, &radial)?,
    };
    Ok((text, "profile"))
}

/// Meridian sections of the body (boundary at distance `1 / norm`) and of its
/// polar (distance `radial`), drawn in the `(rho, h)` plane.
fn profile_svg(
    params: &BarrelParams,
    norm: &AngleProfile,
    radial: &AngleProfile,
) -> CmdResult<String> {
    let section = |dist: &dyn Fn(f64) -> crate::Result<f64>| -> crate::Result<Vec<(f64, f64)>> {
        (0..=720)
            .map(|k| {
                let theta = 2.0 * std::f64::consts::PI * k as f64 / 720.0;
                let (s, c) = theta.sin_cos();
                // fold into the first quadrant by symmetry
                let phi = s.abs().atan2(c.abs());
                let d = dist(phi)?;
                Ok((d * s, d * c))
            })
            .collect()
    };
    let body = section(&|phi| Ok(1.0 / norm.eval(phi)?))?;
    let polar = section(&|phi| radial.eval(phi))?;
    Ok(Plot {
        title: format!("meridian sections, n = {}, r = {}", params.n, params.r),
        x_label: "horizontal radius".into(),
        y_label: "height".into(),
        series: vec![
            Series {
                label: format!("B_{{{},{}}} (barrel)", params.n, params.r),
                points: body,
            },
            Series {
                label: "polar body".into(),
                points: polar,
            },
        ],
        arrows: vec![],
        equal_aspect: true,
    }
    .render())
}

fn cmd_generate(args: &GenerateArgs) -> CmdResult<(String, &'static str)> {
    require_format(
        args.format,
        &[Format::Json, Format::Csv, Format::Svg],
        "generate",
    )?;
    if args.points < 2 {
        return Err(Failure::usage("--points must be at least 2"));
    }
    let f = resolve_norm(&args.norm)?;
    let r = f
        .radius()
        .filter(|_| matches!(f, AngleProfile::BarrelNorm { .. }));
    let want_closed = args.mode != GenerateMode::Pipeline;
    let want_pipe = args.mode != GenerateMode::Closed;

    let closed = match (want_closed, r, args.n) {
        (false, _, _) => None,
        (true, Some(r), 4) => Some(generating_distribution_closed(r)?),
        (true, Some(r), 3) if r == 1.0 => {
            let scale = fit_b3_polar_scale(&QuadratureSpec::default())?;
            Some(b3_polar_distribution(scale)?)
        }
        (true, Some(_), 3) => {
            return Err(Failure::usage("closed form for n = 3 exists only at r = 1"))
        }
        (true, Some(_), n) => return Err(Failure::usage(format!("no closed form for n = {n}"))),
        // closed form only for barrels; pipeline still runs in `both`
        (true, None, _) if args.mode == GenerateMode::Both => None,
        (true, None, _) => return Err(Failure::usage("closed form needs the barrel norm")),
    };
    let pipeline = match (want_pipe, args.n) {
        (false, _) => None,
        (true, 4) => Some(generating_distribution_pipeline(&f, 4)?),
        // in `both` mode at n = 3 the closed form alone is reported
        (true, _) if closed.is_some() && args.mode == GenerateMode::Both => None,
        (true, n) => return Err(Failure::usage(format!("the pipeline needs n = 4, got {n}"))),
    };
    let heights: Vec<f64> = (0..args.points)
        .map(|k| k as f64 / (args.points - 1) as f64)
        .collect();
    let max_density_gap = match (&closed, &pipeline) {
        (Some(a), Some(b)) => {
            let mut gap: f64 = 0.0;
            for &x in &heights {
                gap = gap.max((a.density.eval(x)? - b.density.eval(x)?).abs());
            }
            Some(gap)
        }
        _ => None,
    };
    let is_measure = closed
        .iter()
        .chain(pipeline.iter())
        .all(SphericalDistributionRS::is_measure);
    let doc = GenerateDocument {
        schema: GENERATE_SCHEMA.into(),
        n: args.n,
        profile: f.kind_name().into(),
        r,
        closed,
        pipeline,
        max_density_gap,
        is_measure,
    };
    let primary = doc
        .primary()
        .ok_or_else(|| Failure::usage("nothing to generate"))?;
    let text = match args.format {
        Format::Json => to_json(&doc)?,
        Format::Csv => {
            let mut s = String::from("kind,x,value,order\n");
            for &x in &heights {
                // the edge of an inverse square-root singularity has no value
                let v = primary.density.eval(x).unwrap_or(f64::NAN);
                s.push_str(&format!("density,{x},{v},\n"));
            }
            for a in &primary.atoms {
                s.push_str(&format!("atom,{},{},\n", a.x, a.weight));
            }
            for d in &primary.delta_derivatives {
                s.push_str(&format!(
                    "delta_derivative,{},{},{}\n",
                    d.x, d.weight, d.order
                ));
            }
            s
        }
        _ => {
            let points = heights
                .iter()
                .map(|&x| (x, primary.density.eval(x).unwrap_or(f64::NAN)))
                .filter(|p| p.1.is_finite())
                .collect();
            Plot {
                title: format!(
                    "generating distribution, {}{}",
                    doc.profile,
                    r.map(|r| format!(" r = {r}")).unwrap_or_default()
                ),
                x_label: "x = cos phi".into(),
                y_label: "density".into(),
                series: vec![Series {
                    label: "density".into(),
                    points,
                }],
                arrows: primary
                    .atoms
                    .iter()
                    .map(|a| Arrow {
                        x: a.x,
                        height: a.weight,
                        label: format!("atom {:.6}", a.weight),
                    })
                    .collect(),
                equal_aspect: false,
            }
            .render()
        }
    };
    Ok((text, "generate"))
}

fn cmd_certify(args: &CertifyArgs) -> CmdResult<(String, &'static str)> {
    require_format(args.format, &[Format::Json, Format::Table], "certify")?;
    let spec = args.grid.spec().map_err(Failure::usage)?;
    let f = resolve_norm(&args.norm)?;
    let report: CertificateReport = nnls_certify(&f, args.n, &spec)?;
    let text = match args.format {
        Format::Json => to_json(&report)?,
        _ => report.table(),
    };
    Ok((text, "certify"))
}

fn sweep_table(rep: &SweepReport) -> String {
    let mut s = format!(
        "mode {:?}  bracket [{}, {}]  tol {:e}\n",
        rep.mode, rep.lo, rep.hi, rep.tol
    );
    s.push_str("probe        zonoid  residual\n");
    for h in &rep.history {
        let res = h
            .residual
            .map(|v| format!("{v:.3e}"))
            .unwrap_or_else(|| "-".into());
        s.push_str(&format!("{:<12.8} {:<7} {res}\n", h.probe, h.zonoid));
    }
    s.push_str(&format!("r* = {:.8}\n", rep.r_star));
    s
}

fn cmd_sweep(args: &SweepArgs) -> CmdResult<(String, &'static str)> {
    require_format(args.format, &[Format::Json, Format::Table], "sweep")?;
    let spec = args.grid.spec().map_err(Failure::usage)?;
    let mode = match args.mode {
        CliSweepMode::ClosedForm => SweepMode::ClosedForm,
        CliSweepMode::Nnls => SweepMode::Nnls,
    };
    let tol = args.tol.unwrap_or(match mode {
        SweepMode::ClosedForm => 1e-6,
        SweepMode::Nnls => 0.02,
    });
    if !(args.lo > 0.0 && args.lo < args.hi) {
        return Err(Failure::usage(format!(
            "need 0 < lo < hi, got [{}, {}]",
            args.lo, args.hi
        )));
    }
    if !(tol > 0.0) {
        return Err(Failure::usage("--tol must be positive"));
    }
    let rep = threshold_sweep(args.lo, args.hi, tol, mode, args.n, &spec)?;
    let text = match args.format {
        Format::Json => to_json(&rep)?,
        _ => sweep_table(&rep),
    };
    Ok((text, "sweep"))
}

fn cmd_verify(args: &VerifyArgs, seed: u64) -> CmdResult<(String, &'static str, bool)> {
    require_format(args.format, &[Format::Table, Format::Json], "verify")?;
    if args.suite != "all"
        && !SUITES
            .iter()
            .any(|(id, s)| *s == args.suite || id.eq_ignore_ascii_case(&args.suite))
    {
        let names: Vec<&str> = SUITES.iter().map(|s| s.1).collect();
        return Err(Failure::usage(format!(
            "unknown suite {}; expected all or one of {}",
            args.suite,
            names.join(", ")
        )));
    }
    let checks = run_suite(&args.suite, seed)?;
    let passed = checks.iter().all(|c| c.passed);
    let text = match args.format {
        Format::Json => to_json(&VerifyDocument {
            schema: VERIFY_SCHEMA.into(),
            passed,
            checks,
        })?,
        _ => {
            let mut s: String = checks.iter().map(|c| format!("{c}\n")).collect();
            let failed = checks.iter().filter(|c| !c.passed).count();
            s.push_str(&format!(
                "{} passed, {failed} failed\n",
                checks.len() - failed
            ));
            s
        }
    };
    Ok((text, "verify", passed))
}

fn dispatch(cli: &Cli, stdout: &mut dyn Write) -> CmdResult<i32> {
    let (text, stem, format, output, code) = match &cli.command {
        Command::Profile(a) => {
            let (t, s) = cmd_profile(a)?;
            (t, s, a.format, &a.output, EXIT_OK)
        }
        Command::Generate(a) => {
            let (t, s) = cmd_generate(a)?;
            (t, s, a.format, &a.output, EXIT_OK)
        }
        Command::Certify(a) => {
            let (t, s) = cmd_certify(a)?;
            (t, s, a.format, &a.output, EXIT_OK)
        }
        Command::Sweep(a) => {
            let (t, s) = cmd_sweep(a)?;
            (t, s, a.format, &a.output, EXIT_OK)
        }
        Command::Verify(a) => {
            let (t, s, ok) = cmd_verify(a, cli.seed)?;
            (
                t,
                s,
                a.format,
                &a.output,
                if ok { EXIT_OK } else { EXIT_ACCEPTANCE },
            )
        }
    };
    let mut out = Output {
        path: output_path(output, &cli.out_dir, stem, format),
        stdout,
    };
    out.emit(&text)?;
    Ok(code)
}

/// Parse `args` (including the program name) and run; returns the exit code.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            let text = e.render().to_string();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = stdout.write_all(text.as_bytes());
                    EXIT_OK
                }
                _ => {
                    let _ = stderr.write_all(text.as_bytes());
                    EXIT_USAGE
                }
            };
        }
    };
    match dispatch(&cli, stdout) {
        Ok(code) => code,
        Err(f) => {
            let _ = writeln!(stderr, "error: {}", f.message);
            f.code
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn call(args: &[&str]) -> (i32, String, String) {
        let mut out = Vec::new();
        let mut err = Vec::new();
        let mut full = vec!["zonopolar"];
        full.extend_from_slice(args);
        let code = run(full, &mut out, &mut err);
        (
            code,
            String::from_utf8(out).unwrap(),
            String::from_utf8(err).unwrap(),
        )
    }

    #[test]
    fn profile_csv_rows() {
        let (code, out, _) = call(&[
            "profile", "--n", "3", "--r", "1", "--points", "5", "--format", "csv",
        ]);
        assert_eq!(code, 0);
        let lines: Vec<&str> = out.lines().collect();
        assert_eq!(lines.len(), 6);
        assert_eq!(lines[0], "phi,norm,support,radial");
        assert_eq!(lines[1], "0,1,1,1");
    }

    #[test]
    fn usage_errors_exit_2() {
        assert_eq!(call(&["profile", "--r", "-1"]).0, EXIT_USAGE);
        assert_eq!(call(&["profile", "--format", "table"]).0, EXIT_USAGE);
        assert_eq!(call(&["profile", "--n", "2"]).0, EXIT_USAGE);
        assert_eq!(call(&["generate"]).0, EXIT_USAGE);
        assert_eq!(call(&["generate", "--r", "0.5", "--n", "5"]).0, EXIT_USAGE);
        assert_eq!(call(&["bogus"]).0, EXIT_USAGE);
        assert_eq!(call(&["verify", "--suite", "nope"]).0, EXIT_USAGE);
        let (code, _, err) = call(&["certify", "--r", "0.8", "--accept", "1", "--reject", "0.5"]);
        assert_eq!(code, EXIT_USAGE);
        assert!(err.contains("accept"));
    }

    #[test]
    fn no_bracket_exits_3() {
        assert_eq!(
            call(&["sweep", "--lo", "1.1", "--hi", "1.5"]).0,
            EXIT_NUMERICAL
        );
    }

    #[test]
    fn help_is_success() {
        let (code, out, _) = call(&["--help"]);
        assert_eq!(code, 0);
        assert!(out.contains("certify"));
    }

    #[test]
    fn format_lists() {
        assert!(require_format(Format::Table, &[Format::Json, Format::Table], "x").is_ok());
        let e = require_format(Format::Svg, &[Format::Json, Format::Table], "x").unwrap_err();
        assert!(e.message.contains("json, table"));
    }
}
