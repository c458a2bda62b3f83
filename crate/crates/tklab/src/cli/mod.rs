//! Command-line interface.
//!
//! Exit codes: `0` — success (and any checked property holds), `1` — a check
//! ran to completion and failed, `2` — unusable invocation or configuration.

mod config;
mod emit;
mod verify;

pub use config::{parse_params, parse_point, OutputFormat, RangeSpec, RunConfig};
pub use emit::{profile_csv, profile_json, write_text};
pub use verify::{verify_battery, CheckRow, VerifyReport, REQUIRED_PROPOSITIONS};

use std::path::PathBuf;
use std::sync::Once;

use clap::{Args, Parser, Subcommand};

use crate::funcspace::{
    make_builtin_potential, make_periodic_field, InvariantPotential, PeriodicScalarField,
    PotentialDescriptor, QuadratureRule,
};
use crate::kahler::ricci_form;
use crate::orbitvol::{
    boundary_decay, consistency_theorem, find_critical_orbit, hamiltonian_residual, j_volume,
    logvol_profile, moment_map,
};
use crate::psh::{hadamard_max, is_psh, levi_form, torus_average, GridSpec};

static THREAD_INIT: Once = Once::new();

/// Cap the global rayon pool from `TKLAB_THREADS` (ignored once any pool
/// exists; malformed values fall back to the default).
fn init_threads() {
    THREAD_INIT.call_once(|| {
        if let Ok(s) = std::env::var("TKLAB_THREADS") {
            if let Ok(k) = s.trim().parse::<usize>() {
                if k >= 1 {
                    let _ = rayon::ThreadPoolBuilder::new().num_threads(k).build_global();
                }
            }
        }
    });
}

#[derive(Parser, Debug)]
#[command(
    name = "tklab",
    version,
    about = "Numerical laboratory for torus-invariant pluripotential theory and toric Kähler geometry"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

/// Potential/field selection shared by every subcommand.
#[derive(Args, Debug, Clone)]
struct Select {
    /// JSON run configuration; explicit flags override its entries
    #[arg(long, value_name = "FILE")]
    config: Option<PathBuf>,
    /// Builtin potential: flat, flat_cylinder, fubini_study, cosh_neg,
    /// sum_exp, fs_cosh
    #[arg(long)]
    potential: Option<String>,
    /// Number of torus factors
    #[arg(long)]
    n: Option<usize>,
    /// Potential parameter, repeatable (e.g. --param shift=1.5)
    #[arg(long = "param", value_name = "KEY=VALUE")]
    params: Vec<String>,
}

impl Select {
    fn load_config(&self) -> Result<RunConfig, String> {
        match &self.config {
            Some(p) => RunConfig::load(p),
            None => Ok(RunConfig::default()),
        }
    }

    fn resolve_potential(&self, cfg: &RunConfig) -> Result<InvariantPotential, String> {
        let desc = if let Some(kind) = &self.potential {
            let n = self
                .n
                .or(cfg.n)
                .or_else(|| cfg.potential.as_ref().map(|d| d.n))
                .ok_or("missing --n for --potential")?;
            PotentialDescriptor { kind: kind.clone(), n, params: parse_params(&self.params)? }
        } else if let Some(d) = &cfg.potential {
            let mut d = d.clone();
            if let Some(n) = self.n {
                d.n = n;
            }
            d.params.extend(parse_params(&self.params)?);
            d
        } else {
            return Err("no potential selected: pass --potential or a config with `potential`".into());
        };
        make_builtin_potential(&desc).map_err(|e| e.to_string())
    }

    /// The field a pointwise command acts on: an explicit `field` from the
    /// config, or the pullback of the selected potential.
    fn resolve_field(&self, cfg: &RunConfig) -> Result<PeriodicScalarField, String> {
        if let Some(fd) = &cfg.field {
            make_periodic_field(fd).map_err(|e| e.to_string())
        } else {
            Ok(PeriodicScalarField::pullback(&self.resolve_potential(cfg)?))
        }
    }
}

#[derive(Args, Debug, Clone)]
struct Output {
    /// Write to this file instead of stdout
    #[arg(long, value_name = "FILE")]
    out: Option<PathBuf>,
    #[arg(long, value_enum)]
    format: Option<OutputFormat>,
}

impl Output {
    fn format_or(&self, cfg: &RunConfig, default: OutputFormat) -> OutputFormat {
        self.format.or(cfg.format).unwrap_or(default)
    }

    fn emit(&self, text: &str) -> Result<(), String> {
        write_text(self.out.as_deref(), text)
    }
}

fn fmt_vec(v: &[f64]) -> String {
    let cells: Vec<String> = v.iter().map(|x| format!("{x:.12e}")).collect();
    format!("[{}]", cells.join(", "))
}

fn matrix_rows(m: &nalgebra::DMatrix<f64>) -> Vec<Vec<f64>> {
    m.row_iter().map(|r| r.iter().cloned().collect()).collect()
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Levi form of a field at a point in log coordinates
    Levi(LeviArgs),
    /// Plurisubharmonicity sweep over a box of log-radii
    PshCheck(PshCheckArgs),
    /// Torus average of a field at fixed log-radii
    Average(AverageArgs),
    /// Hadamard maximum of a field over a torus orbit
    Hadamard(HadamardArgs),
    /// Ricci form of an invariant metric at a point
    Ricci(RicciArgs),
    /// Joint curvature-sign and log-volume-convexity classification
    Classify(ClassifyArgs),
    /// Orbit volume at a point, or a profile over a grid
    Volume(VolumeArgs),
    /// Search for the volume-critical torus orbit
    Critical(CriticalArgs),
    /// Moment map and Hamiltonian residual at a point
    Moment(MomentArgs),
    /// Log-volume decay along a ray towards the boundary
    Decay(DecayArgs),
    /// Run the verification battery
    Verify(VerifyArgs),
}

#[derive(Args, Debug)]
struct LeviArgs {
    #[command(flatten)]
    sel: Select,
    #[command(flatten)]
    out: Output,
    /// Log-radii, comma separated
    #[arg(long, allow_hyphen_values = true)]
    x: String,
    /// Angles, comma separated (default: all zero)
    #[arg(long, allow_hyphen_values = true)]
    y: Option<String>,
}

#[derive(Args, Debug)]
struct PshCheckArgs {
    #[command(flatten)]
    sel: Select,
    #[command(flatten)]
    out: Output,
    /// Per-axis log-radius sweep, lo:hi:step
    #[arg(long, allow_hyphen_values = true)]
    range: Option<String>,
    /// Angle lattice points per variable
    #[arg(long, default_value_t = 8)]
    y_per_angle: usize,
    /// Relative eigenvalue tolerance
    #[arg(long)]
    tol_psd: Option<f64>,
}

#[derive(Args, Debug)]
struct AverageArgs {
    #[command(flatten)]
    sel: Select,
    #[command(flatten)]
    out: Output,
    #[arg(long, allow_hyphen_values = true)]
    x: String,
    /// Starting quadrature points per angle (power of two in [4, 1024])
    #[arg(long)]
    quad_points: Option<usize>,
}

#[derive(Args, Debug)]
struct HadamardArgs {
    #[command(flatten)]
    sel: Select,
    #[command(flatten)]
    out: Output,
    #[arg(long, allow_hyphen_values = true)]
    x: String,
    /// Lattice scan resolution per angle before refinement
    #[arg(long)]
    scan: Option<usize>,
}

#[derive(Args, Debug)]
struct RicciArgs {
    #[command(flatten)]
    sel: Select,
    #[command(flatten)]
    out: Output,
    #[arg(long, allow_hyphen_values = true)]
    x: String,
}

#[derive(Args, Debug)]
struct ClassifyArgs {
    #[command(flatten)]
    sel: Select,
    #[command(flatten)]
    out: Output,
    /// Per-axis box sweep, lo:hi:step (step doubles as the grid spacing)
    #[arg(long, allow_hyphen_values = true)]
    range: Option<String>,
    /// Random segments for the midpoint convexity stage
    #[arg(long, default_value_t = 200)]
    segments: usize,
    #[arg(long)]
    tol_convex: Option<f64>,
}

#[derive(Args, Debug)]
struct VolumeArgs {
    #[command(flatten)]
    sel: Select,
    #[command(flatten)]
    out: Output,
    /// Single point of log-radii
    #[arg(long, conflicts_with = "range", allow_hyphen_values = true)]
    x: Option<String>,
    /// Per-axis grid, lo:hi:step, for a profile
    #[arg(long, allow_hyphen_values = true)]
    range: Option<String>,
}

#[derive(Args, Debug)]
struct CriticalArgs {
    #[command(flatten)]
    sel: Select,
    #[command(flatten)]
    out: Output,
    /// Starting log-radii (default: origin)
    #[arg(long, allow_hyphen_values = true)]
    x0: Option<String>,
    /// Search box half-width around the origin
    #[arg(long, default_value_t = 2.0)]
    half_width: f64,
}

#[derive(Args, Debug)]
struct MomentArgs {
    #[command(flatten)]
    sel: Select,
    #[command(flatten)]
    out: Output,
    #[arg(long, allow_hyphen_values = true)]
    x: String,
}

#[derive(Args, Debug)]
struct DecayArgs {
    #[command(flatten)]
    sel: Select,
    #[command(flatten)]
    out: Output,
    /// Ray direction in log-radius space, comma separated
    #[arg(long, allow_hyphen_values = true)]
    direction: String,
    #[arg(long, default_value_t = 20.0)]
    t_max: f64,
    #[arg(long, default_value_t = 41)]
    steps: usize,
}

#[derive(Args, Debug)]
struct VerifyArgs {
    #[command(flatten)]
    out: Output,
    /// Deliberately negate the Fubini–Study potential to prove the battery
    /// can fail
    #[arg(long)]
    corrupt_fubini_study: bool,
}

/// Entry point. `args` must include the program name.
pub fn run(args: &[String]) -> u8 {
    init_threads();
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                print!("{e}");
                return 0;
            }
            eprintln!("{e}");
            return 2;
        }
    };
    match dispatch(cli.command) {
        Ok(code) => code,
        Err(msg) => {
            eprintln!("error: {msg}");
            2
        }
    }
}

fn range_of(flag: &Option<String>, cfg: &RunConfig) -> Result<RangeSpec, String> {
    let text = flag
        .clone()
        .or_else(|| cfg.range.clone())
        .ok_or("missing --range (or `range` in the config)")?;
    RangeSpec::parse(&text)
}

fn point_of(text: &str, n: usize, what: &str) -> Result<Vec<f64>, String> {
    let p = parse_point(text)?;
    if p.len() != n {
        return Err(format!("{what} has {} coordinates, expected {n}", p.len()));
    }
    Ok(p)
}

fn box_grid(range: &RangeSpec, n: usize) -> Result<GridSpec, String> {
    let axis = range.axis_points();
    let hi = *axis.last().expect("nonempty axis");
    GridSpec::new(vec![range.lo; n], vec![hi; n], vec![axis.len(); n]).map_err(|e| e.to_string())
}

fn dispatch(cmd: Command) -> Result<u8, String> {
    match cmd {
        Command::Levi(a) => {
            let cfg = a.sel.load_config()?;
            let field = a.sel.resolve_field(&cfg)?;
            let x = point_of(&a.x, field.n(), "--x")?;
            let y = match &a.y {
                Some(t) => point_of(t, field.n(), "--y")?,
                None => vec![0.0; field.n()],
            };
            let l = levi_form(&field, &x, &y).map_err(|e| e.to_string())?;
            let ev = l.eigenvalues();
            let text = match a.out.format_or(&cfg, OutputFormat::Text) {
                OutputFormat::Json => {
                    let v = serde_json::json!({
                        "eigenvalues": ev,
                        "trace": l.trace(),
                        "matrix": matrix_rows(&l.matrix),
                    });
                    format!("{}\n", serde_json::to_string_pretty(&v).unwrap())
                }
                _ => format!(
                    "levi eigenvalues: {}\ntrace: {:.12e}\n",
                    fmt_vec(&ev),
                    l.trace()
                ),
            };
            a.out.emit(&text)?;
            Ok(0)
        }

        Command::PshCheck(a) => {
            let cfg = a.sel.load_config()?;
            let field = a.sel.resolve_field(&cfg)?;
            let range = range_of(&a.range, &cfg)?;
            let grid = box_grid(&range, field.n())?;
            let tol = a.tol_psd.or(cfg.tol_psd);
            let v = is_psh(&field, &grid, a.y_per_angle, tol).map_err(|e| e.to_string())?;
            let text = match a.out.format_or(&cfg, OutputFormat::Text) {
                OutputFormat::Json => {
                    let j = serde_json::json!({
                        "holds": v.holds,
                        "min_eigenvalue": v.min_eigenvalue,
                        "witness_x": v.witness_x,
                        "witness_y": v.witness_y,
                        "points_checked": v.points_checked,
                    });
                    format!("{}\n", serde_json::to_string_pretty(&j).unwrap())
                }
                _ => format!(
                    "psh: {}\nmin eigenvalue: {:.12e} at x = {}, y = {}\npoints checked: {}\n",
                    if v.holds { "holds" } else { "FAILS" },
                    v.min_eigenvalue,
                    fmt_vec(&v.witness_x),
                    fmt_vec(&v.witness_y),
                    v.points_checked
                ),
            };
            a.out.emit(&text)?;
            Ok(if v.holds { 0 } else { 1 })
        }

        Command::Average(a) => {
            let cfg = a.sel.load_config()?;
            let field = a.sel.resolve_field(&cfg)?;
            let x = point_of(&a.x, field.n(), "--x")?;
            let start = a.quad_points.or(cfg.quad_points).unwrap_or(16);
            let rule = QuadratureRule::new(field.n(), start).map_err(|e| e.to_string())?;
            let avg = torus_average(&field, &x, &rule).map_err(|e| e.to_string())?;
            let text = match a.out.format_or(&cfg, OutputFormat::Text) {
                OutputFormat::Json => format!(
                    "{}\n",
                    serde_json::to_string_pretty(&serde_json::json!({"average": avg})).unwrap()
                ),
                _ => format!("average: {avg:.12e}\n"),
            };
            a.out.emit(&text)?;
            Ok(0)
        }

        Command::Hadamard(a) => {
            let cfg = a.sel.load_config()?;
            let field = a.sel.resolve_field(&cfg)?;
            let x = point_of(&a.x, field.n(), "--x")?;
            let m = hadamard_max(&field, &x, a.scan).map_err(|e| e.to_string())?;
            let text = match a.out.format_or(&cfg, OutputFormat::Text) {
                OutputFormat::Json => format!(
                    "{}\n",
                    serde_json::to_string_pretty(&serde_json::json!({
                        "max": m.value,
                        "argmax_y": m.argmax_y,
                    }))
                    .unwrap()
                ),
                _ => format!("max: {:.12e}\nargmax y: {}\n", m.value, fmt_vec(&m.argmax_y)),
            };
            a.out.emit(&text)?;
            Ok(0)
        }

        Command::Ricci(a) => {
            let cfg = a.sel.load_config()?;
            let p = a.sel.resolve_potential(&cfg)?;
            let x = point_of(&a.x, p.n(), "--x")?;
            let r = ricci_form(&p, &x).map_err(|e| e.to_string())?;
            let text = match a.out.format_or(&cfg, OutputFormat::Text) {
                OutputFormat::Json => format!(
                    "{}\n",
                    serde_json::to_string_pretty(&serde_json::json!({
                        "matrix": matrix_rows(&r.matrix),
                        "min_eigenvalue": r.min_eigenvalue,
                        "max_eigenvalue": r.max_eigenvalue,
                    }))
                    .unwrap()
                ),
                _ => format!(
                    "ricci eigenvalue range: [{:.12e}, {:.12e}]\nmatrix: {:?}\n",
                    r.min_eigenvalue,
                    r.max_eigenvalue,
                    matrix_rows(&r.matrix)
                ),
            };
            a.out.emit(&text)?;
            Ok(0)
        }

        Command::Classify(a) => {
            let cfg = a.sel.load_config()?;
            let p = a.sel.resolve_potential(&cfg)?;
            let range = range_of(&a.range, &cfg)?;
            let n = p.n();
            let lo = vec![range.lo; n];
            let axis = range.axis_points();
            let hi = vec![*axis.last().expect("nonempty axis"); n];
            let per_axis = axis.len().clamp(3, 9);
            let tol = a.tol_convex.or(cfg.tol_convex);
            let rep = consistency_theorem(&p, &lo, &hi, range.step, per_axis, a.segments, tol)
                .map_err(|e| e.to_string())?;
            let text = match a.out.format_or(&cfg, OutputFormat::Text) {
                OutputFormat::Json => format!(
                    "{}\n",
                    serde_json::to_string_pretty(&serde_json::json!({
                        "ricci_tag": format!("{:?}", rep.ricci.tag),
                        "ricci_range": [rep.ricci.min_eigenvalue, rep.ricci.max_eigenvalue],
                        "logvol_tag": format!("{:?}", rep.logvol.tag),
                        "consistent": rep.consistent,
                    }))
                    .unwrap()
                ),
                _ => format!(
                    "ricci: {:?} (eigenvalues in [{:.6e}, {:.6e}])\nlog-volume: {:?}\nconsistent: {}\n",
                    rep.ricci.tag,
                    rep.ricci.min_eigenvalue,
                    rep.ricci.max_eigenvalue,
                    rep.logvol.tag,
                    rep.consistent
                ),
            };
            a.out.emit(&text)?;
            Ok(if rep.consistent { 0 } else { 1 })
        }

        Command::Volume(a) => {
            let cfg = a.sel.load_config()?;
            let p = a.sel.resolve_potential(&cfg)?;
            if let Some(xt) = &a.x {
                let x = point_of(xt, p.n(), "--x")?;
                let v = j_volume(&p, &x).map_err(|e| e.to_string())?;
                let text = match a.out.format_or(&cfg, OutputFormat::Text) {
                    OutputFormat::Json => format!(
                        "{}\n",
                        serde_json::to_string_pretty(&serde_json::json!({"volume": v})).unwrap()
                    ),
                    _ => format!("volume: {v:.12e}\n"),
                };
                a.out.emit(&text)?;
                return Ok(0);
            }
            let range = range_of(&a.range, &cfg)?;
            let grid = box_grid(&range, p.n())?;
            let profile = logvol_profile(&p, &grid).map_err(|e| e.to_string())?;
            let text = match a.out.format_or(&cfg, OutputFormat::Csv) {
                OutputFormat::Json => profile_json(&profile),
                _ => profile_csv(&profile),
            };
            a.out.emit(&text)?;
            Ok(0)
        }

        Command::Critical(a) => {
            let cfg = a.sel.load_config()?;
            let p = a.sel.resolve_potential(&cfg)?;
            let n = p.n();
            let x0 = match &a.x0 {
                Some(t) => point_of(t, n, "--x0")?,
                None => vec![0.0; n],
            };
            if !(a.half_width > 0.0) {
                return Err("--half-width must be positive".into());
            }
            let lo = vec![-a.half_width; n];
            let hi = vec![a.half_width; n];
            match find_critical_orbit(&p, &x0, &lo, &hi) {
                Ok(r) => {
                    let text = match a.out.format_or(&cfg, OutputFormat::Text) {
                        OutputFormat::Json => format!(
                            "{}\n",
                            serde_json::to_string_pretty(&serde_json::json!({
                                "x_star": r.x_star,
                                "volume": r.volume,
                                "log_volume": r.log_volume,
                                "grad_norm": r.grad_norm,
                                "iterations": r.iterations,
                                "ricci_tag": format!("{:?}", r.ricci_tag),
                                "unique": r.unique,
                            }))
                            .unwrap()
                        ),
                        _ => format!(
                            "critical orbit: {}\nvolume: {:.12e}\ngradient norm: {:.3e}\niterations: {}\nricci: {:?}\nunique: {}\n",
                            fmt_vec(&r.x_star),
                            r.volume,
                            r.grad_norm,
                            r.iterations,
                            r.ricci_tag,
                            r.unique
                        ),
                    };
                    a.out.emit(&text)?;
                    Ok(0)
                }
                Err(e) => {
                    a.out.emit(&format!("no critical orbit: {e}\n"))?;
                    Ok(1)
                }
            }
        }

        Command::Moment(a) => {
            let cfg = a.sel.load_config()?;
            let p = a.sel.resolve_potential(&cfg)?;
            let x = point_of(&a.x, p.n(), "--x")?;
            let mu = moment_map(&p, &x).map_err(|e| e.to_string())?;
            let res = hamiltonian_residual(&p, &x).map_err(|e| e.to_string())?;
            let text = match a.out.format_or(&cfg, OutputFormat::Text) {
                OutputFormat::Json => format!(
                    "{}\n",
                    serde_json::to_string_pretty(&serde_json::json!({
                        "moment": mu,
                        "hamiltonian_residual": res,
                    }))
                    .unwrap()
                ),
                _ => format!("moment: {}\nhamiltonian residual: {res:.3e}\n", fmt_vec(&mu)),
            };
            a.out.emit(&text)?;
            Ok(0)
        }

        Command::Decay(a) => {
            let cfg = a.sel.load_config()?;
            let p = a.sel.resolve_potential(&cfg)?;
            let dir = point_of(&a.direction, p.n(), "--direction")?;
            let r = boundary_decay(&p, &dir, a.t_max, a.steps).map_err(|e| e.to_string())?;
            let text = match a.out.format_or(&cfg, OutputFormat::Text) {
                OutputFormat::Json => format!(
                    "{}\n",
                    serde_json::to_string_pretty(&serde_json::json!({
                        "direction": r.direction,
                        "t_max": r.t_max,
                        "monotone_after": r.monotone_after,
                        "ratio_log": r.ratio_log,
                        "holds": r.holds,
                    }))
                    .unwrap()
                ),
                _ => format!(
                    "decay along {}: {}\nlog-volume drop over the ray: {:.6}\nmonotone after t = {:?}\n",
                    fmt_vec(&r.direction),
                    if r.holds { "holds" } else { "FAILS" },
                    r.ratio_log,
                    r.monotone_after
                ),
            };
            a.out.emit(&text)?;
            Ok(if r.holds { 0 } else { 1 })
        }

        Command::Verify(a) => {
            let report = verify_battery(a.corrupt_fubini_study);
            let format = a.format_or_default();
            let text = match format {
                OutputFormat::Json => {
                    format!("{}\n", serde_json::to_string_pretty(&report).unwrap())
                }
                _ => report.render_text(),
            };
            a.out.emit(&text)?;
            Ok(if report.all_passed() { 0 } else { 1 })
        }
    }
}

impl VerifyArgs {
    fn format_or_default(&self) -> OutputFormat {
        self.out.format.unwrap_or(OutputFormat::Text)
    }
}
