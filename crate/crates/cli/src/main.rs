//! `nonbloch` command-line driver. Every subcommand reads a model file,
//! writes CSV or JSON (to `--out` or stdout) and, when an output path is
//! known, a run manifest next to it.

mod output;

use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use nonbloch::dos::{default_fit_window, FIT_WINDOW};
use nonbloch::spectra::IMAG_TOL;
use nonbloch::threshold::ThresholdOptions;
use nonbloch::transfer::{ep_defectiveness, transfer_matrix};
use nonbloch::{
    coalescence_pairs, dos_curve, gbz, load_model, obc_eigenvalues, phase_boundary, phase_diagram, pt_threshold_with,
    saddle_points, vanhove_exponent, Error, Family64, Precision, ScaleMode, SweepOptions,
};
use num_complex::Complex64;
use serde::Serialize;
use serde_json::{json, Value};

use output::{csv_field, write_output, Grid, Manifest};

#[derive(Parser, Debug, Serialize)]
#[command(name = "nonbloch", version, about = "Non-Bloch band theory of one-dimensional non-Hermitian chains")]
struct Cli {
    /// Worker threads for parallel sweeps (0 = one per core).
    #[arg(long, env = "NONBLOCH_THREADS", default_value_t = 0, global = true)]
    threads: usize,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug, Serialize)]
#[serde(rename_all = "kebab-case")]
enum Command {
    /// Open-boundary eigenvalues, CSV (re_E, im_E).
    Spectrum(SpectrumArgs),
    /// Auxiliary GBZ with GBZ and cusp flags, CSV.
    Gbz(GbzArgs),
    /// Saddle points and coalescing pairs, JSON.
    Saddles(SaddleArgs),
    /// PT-breaking threshold from the discriminant, JSON.
    Threshold(ThresholdArgs),
    /// Threshold as a function of one hopping, CSV (param, gamma_c, accepted_count).
    Boundary(BoundaryArgs),
    /// Complex fraction P on a (param, γ) grid, CSV with header row and column.
    PhaseDiagram(PhaseArgs),
    /// Open-boundary density of states, CSV (E, rho), or an exponent fit with --fit-at.
    Dos(DosArgs),
    /// Transfer-matrix defectiveness of a nearest-neighbor chain, CSV (E, gap, angle).
    Duality(DualityArgs),
}

#[derive(Args, Debug, Serialize)]
struct Io {
    /// Model file (JSON).
    #[arg(long)]
    model: PathBuf,
    /// Override the model's γ.
    #[arg(long, allow_negative_numbers = true)]
    gamma: Option<f64>,
    /// Output file; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Manifest path; defaults to `<out>.manifest.json`.
    #[arg(long)]
    manifest: Option<PathBuf>,
}

#[derive(Args, Debug, Serialize)]
struct OutOnly {
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    manifest: Option<PathBuf>,
}

#[derive(Args, Debug, Serialize)]
struct Solver {
    /// Similarity scale r; `auto` uses the GBZ mean radius, `none` disables it.
    #[arg(long = "scale-r", default_value = "auto")]
    scale_r: String,
    /// Working precision: double, dd or quad.
    #[arg(long, default_value = "quad")]
    precision: String,
    /// |Im E| above which an eigenvalue counts as complex.
    #[arg(long = "imag-tol", default_value_t = IMAG_TOL)]
    imag_tol: f64,
}

#[derive(Args, Debug, Serialize)]
struct SpectrumArgs {
    #[command(flatten)]
    io: Io,
    /// Chain length.
    #[arg(long = "L", short = 'L')]
    l: usize,
    #[command(flatten)]
    solver: Solver,
}

#[derive(Args, Debug, Serialize)]
struct GbzArgs {
    #[command(flatten)]
    io: Io,
    /// Angle samples of the sweep.
    #[arg(long = "n-phi", default_value_t = nonbloch::gbz::N_PHI)]
    n_phi: usize,
}

#[derive(Args, Debug, Serialize)]
struct SaddleArgs {
    #[command(flatten)]
    io: Io,
    /// Relative energy distance below which two saddles coalesce.
    #[arg(long = "coalescence-tol", default_value_t = 1e-5)]
    coalescence_tol: f64,
}

#[derive(Args, Debug, Serialize)]
struct Window {
    #[arg(long = "gamma-min", default_value_t = 0.0, allow_negative_numbers = true)]
    gamma_min: f64,
    #[arg(long = "gamma-max", default_value_t = 1.0)]
    gamma_max: f64,
    #[arg(long = "membership-tol", default_value_t = nonbloch::rootfind::MEMBERSHIP_TOL)]
    membership_tol: f64,
}

#[derive(Args, Debug, Serialize)]
struct ThresholdArgs {
    #[command(flatten)]
    io: Io,
    #[command(flatten)]
    window: Window,
}

#[derive(Args, Debug, Serialize)]
struct BoundaryArgs {
    #[command(flatten)]
    io: Io,
    /// `<param>=<min>:<max>:<count>`, e.g. `t3=-0.4:0.4:21`.
    #[arg(long)]
    sweep: String,
    #[command(flatten)]
    window: Window,
}

#[derive(Args, Debug, Serialize)]
struct PhaseArgs {
    #[command(flatten)]
    io: Io,
    /// Two sweeps, one over gamma and one over a hopping.
    #[arg(long, num_args = 1, required = true)]
    sweep: Vec<String>,
    #[arg(long = "L", short = 'L', default_value_t = 200)]
    l: usize,
    #[command(flatten)]
    solver: Solver,
}

#[derive(Args, Debug, Serialize)]
struct DosArgs {
    #[command(flatten)]
    io: Io,
    #[arg(long, allow_negative_numbers = true)]
    emin: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    emax: Option<f64>,
    #[arg(long, default_value_t = 1001)]
    n: usize,
    /// Fit the power law at this saddle energy instead of tabulating ρ.
    #[arg(long = "fit-at", allow_negative_numbers = true)]
    fit_at: Option<f64>,
    /// Fit offsets `<min>:<max>` from the saddle energy; default is
    /// `1e-4:1e-2` times the bandwidth.
    #[arg(long = "fit-window")]
    fit_window: Option<String>,
}

#[derive(Args, Debug, Serialize)]
struct DualityArgs {
    #[command(flatten)]
    out: OutOnly,
    #[arg(long, allow_negative_numbers = true)]
    tl: f64,
    #[arg(long, allow_negative_numbers = true)]
    tr: f64,
    #[arg(long, allow_negative_numbers = true)]
    emin: f64,
    #[arg(long, allow_negative_numbers = true)]
    emax: f64,
    #[arg(long, default_value_t = 401)]
    n: usize,
}

/// Outcome of a subcommand: the payload and its format.
enum Payload {
    Csv(String),
    Json(Value),
}

type Run = Result<Payload, Error>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    if cli.threads > 0 {
        // Only fails if a pool already exists, which cannot happen here.
        let _ = rayon::ThreadPoolBuilder::new().num_threads(cli.threads).build_global();
    }
    let started = Instant::now();
    let (out, manifest) = destinations(&cli.command);
    let result = dispatch(&cli.command);
    match result {
        Ok(payload) => {
            let text = match payload {
                Payload::Csv(s) => s,
                Payload::Json(v) => serde_json::to_string_pretty(&v).expect("JSON values always serialize") + "\n",
            };
            if let Err(e) = write_output(out.as_deref(), &text) {
                eprintln!("error: {e}");
                return ExitCode::from(2);
            }
            let manifest = manifest.or_else(|| out.as_ref().map(|p| Manifest::default_path(p)));
            if let Some(path) = manifest {
                let m = Manifest::new(&cli, started.elapsed());
                if let Err(e) = m.write(&path) {
                    eprintln!("error: {e}");
                    return ExitCode::from(2);
                }
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(if e.is_domain() { 2 } else { 3 })
        }
    }
}

fn destinations(cmd: &Command) -> (Option<PathBuf>, Option<PathBuf>) {
    let io = match cmd {
        Command::Spectrum(a) => &a.io,
        Command::Gbz(a) => &a.io,
        Command::Saddles(a) => &a.io,
        Command::Threshold(a) => &a.io,
        Command::Boundary(a) => &a.io,
        Command::PhaseDiagram(a) => &a.io,
        Command::Dos(a) => &a.io,
        Command::Duality(a) => return (a.out.out.clone(), a.out.manifest.clone()),
    };
    (io.out.clone(), io.manifest.clone())
}

fn dispatch(cmd: &Command) -> Run {
    match cmd {
        Command::Spectrum(a) => spectrum(a),
        Command::Gbz(a) => gbz_cmd(a),
        Command::Saddles(a) => saddles(a),
        Command::Threshold(a) => threshold(a),
        Command::Boundary(a) => boundary(a),
        Command::PhaseDiagram(a) => phase(a),
        Command::Dos(a) => dos(a),
        Command::Duality(a) => duality(a),
    }
}

fn family(io: &Io) -> Result<Family64, Error> {
    let fam = load_model(&io.model)?;
    Ok(match io.gamma {
        Some(g) if !g.is_finite() => return Err(Error::domain("--gamma must be finite")),
        Some(g) => fam.with_gamma(g),
        None => fam,
    })
}

fn positive(name: &str, x: f64) -> Result<f64, Error> {
    if x > 0.0 && x.is_finite() {
        Ok(x)
    } else {
        Err(Error::domain(format!("{name} must be positive, got {x}")))
    }
}

fn scale_mode(s: &str) -> Result<ScaleMode, Error> {
    match s {
        "auto" => Ok(ScaleMode::Auto),
        "none" | "off" => Ok(ScaleMode::None),
        _ => {
            let r: f64 = s.parse().map_err(|_| Error::domain(format!("--scale-r: expected auto, none or a number, got '{s}'")))?;
            Ok(ScaleMode::Fixed(positive("--scale-r", r)?))
        }
    }
}

fn sweep_options(l: usize, s: &Solver) -> Result<SweepOptions, Error> {
    Ok(SweepOptions {
        size: l,
        imag_tol: positive("--imag-tol", s.imag_tol)?,
        scale: scale_mode(&s.scale_r)?,
        precision: s.precision.parse::<Precision>()?,
    })
}

/// `min:max:count` with `count >= 2`.
fn parse_grid(spec: &str) -> Result<Vec<f64>, Error> {
    let bad = || Error::domain(format!("grid '{spec}' must be min:max:count with count >= 2"));
    let parts: Vec<&str> = spec.split(':').collect();
    let [a, b, n] = parts.as_slice() else { return Err(bad()) };
    let a: f64 = a.trim().parse().map_err(|_| bad())?;
    let b: f64 = b.trim().parse().map_err(|_| bad())?;
    let n: usize = n.trim().parse().map_err(|_| bad())?;
    if n < 2 || !a.is_finite() || !b.is_finite() {
        return Err(bad());
    }
    Ok((0..n).map(|k| a + (b - a) * k as f64 / (n - 1) as f64).collect())
}

/// `<param>=<grid>`.
fn parse_sweep(spec: &str) -> Result<(String, Vec<f64>), Error> {
    let (name, grid) = spec
        .split_once('=')
        .ok_or_else(|| Error::domain(format!("sweep '{spec}' must look like t3=-0.4:0.4:21")))?;
    Ok((name.trim().to_string(), parse_grid(grid)?))
}

fn is_gamma(name: &str) -> bool {
    matches!(name, "gamma" | "γ" | "g")
}

fn cplx(z: Complex64) -> Value {
    json!([z.re, z.im])
}

fn spectrum(a: &SpectrumArgs) -> Run {
    let fam = family(&a.io)?;
    let opts = sweep_options(a.l, &a.solver)?;
    let sr = obc_eigenvalues(&fam.hamiltonian(), a.l, opts.scale, opts.precision)?;
    let mut g = Grid::new(&["re_E", "im_E"]);
    for z in &sr.eigenvalues {
        g.row([csv_field(z.re), csv_field(z.im)]);
    }
    Ok(Payload::Csv(g.finish()))
}

fn gbz_cmd(a: &GbzArgs) -> Run {
    let fam = family(&a.io)?;
    let set = gbz(&fam.hamiltonian(), a.n_phi)?;
    let mut g = Grid::new(&["theta", "re_beta", "im_beta", "abs_beta", "re_E", "im_E", "branch_id", "is_gbz", "is_cusp"]);
    for p in &set.points {
        g.row([
            csv_field(p.theta),
            csv_field(p.beta.re),
            csv_field(p.beta.im),
            csv_field(p.beta.norm()),
            csv_field(p.energy.re),
            csv_field(p.energy.im),
            p.branch_id.to_string(),
            p.is_gbz.to_string(),
            p.is_cusp.to_string(),
        ]);
    }
    Ok(Payload::Csv(g.finish()))
}

fn saddles(a: &SaddleArgs) -> Run {
    let fam = family(&a.io)?;
    let s = saddle_points(&fam.hamiltonian())?;
    let pairs = coalescence_pairs(&s, positive("--coalescence-tol", a.coalescence_tol)?);
    let list: Vec<Value> = s
        .iter()
        .map(|p| {
            json!({
                "beta_s": cplx(p.beta_s),
                "energy_s": cplx(p.energy_s),
                "order_k": p.order_k,
                "on_gbz": p.on_gbz,
                "modulus_gap": finite_or_null(p.modulus_gap),
                "cluster_id": p.cluster_id,
                "multiplicity": p.multiplicity,
                "ep_limit": p.ep_limit,
            })
        })
        .collect();
    let pairs: Vec<Value> = pairs
        .iter()
        .map(|c| json!({"i": c.i, "j": c.j, "energy_distance": c.energy_distance, "shares_beta": c.shares_beta}))
        .collect();
    Ok(Payload::Json(json!({"gamma": fam.gamma, "saddles": list, "coalescences": pairs})))
}

fn finite_or_null(x: f64) -> Value {
    if x.is_finite() {
        json!(x)
    } else {
        Value::Null
    }
}

fn threshold_options(w: &Window) -> Result<ThresholdOptions, Error> {
    Ok(ThresholdOptions { membership_tol: positive("--membership-tol", w.membership_tol)?, ..ThresholdOptions::default() })
}

fn threshold(a: &ThresholdArgs) -> Run {
    let fam = family(&a.io)?;
    let opts = threshold_options(&a.window)?;
    let res = pt_threshold_with(&fam, (a.window.gamma_min, a.window.gamma_max), &opts)?;
    let cands: Vec<Value> = res
        .candidates
        .iter()
        .map(|c| {
            json!({
                "gamma": c.gamma,
                "degenerate_energy": cplx(c.degenerate_energy),
                "membership_gap": finite_or_null(c.membership_gap),
                "real_energy": c.real_energy,
                "refinement": format!("{:?}", c.refinement).to_lowercase(),
                "ep_limit": c.ep_limit,
                "accepted": c.accepted,
            })
        })
        .collect();
    Ok(Payload::Json(json!({
        "gamma_c": res.gamma_c,
        "degenerate_energy": res.critical().map(|c| cplx(c.degenerate_energy)),
        "diagnostic": res.diagnostic,
        "discriminant_degree": res.discriminant_degree,
        "candidates": cands,
    })))
}

fn boundary(a: &BoundaryArgs) -> Run {
    let fam = family(&a.io)?;
    let (param, values) = parse_sweep(&a.sweep)?;
    if is_gamma(&param) {
        return Err(Error::domain("boundary sweeps a hopping, not gamma"));
    }
    let opts = threshold_options(&a.window)?;
    let pts = phase_boundary(&fam, &param, &values, (a.window.gamma_min, a.window.gamma_max), &opts)?;
    let mut g = Grid::new(&[param.as_str(), "gamma_c", "accepted_count"]);
    for p in &pts {
        g.row([csv_field(p.value), p.gamma_c.map(csv_field).unwrap_or_default(), p.accepted.to_string()]);
    }
    Ok(Payload::Csv(g.finish()))
}

fn phase(a: &PhaseArgs) -> Run {
    let fam = family(&a.io)?;
    let sweeps: Vec<(String, Vec<f64>)> = a.sweep.iter().map(|s| parse_sweep(s)).collect::<Result<_, _>>()?;
    let (gammas, (param, values)) = match sweeps.as_slice() {
        [x, y] if is_gamma(&x.0) && !is_gamma(&y.0) => (x.1.clone(), y.clone()),
        [x, y] if is_gamma(&y.0) && !is_gamma(&x.0) => (y.1.clone(), x.clone()),
        _ => return Err(Error::domain("phase-diagram needs exactly two sweeps: gamma=a:b:n and one hopping")),
    };
    let opts = sweep_options(a.l, &a.solver)?;
    let pd = phase_diagram(&fam, &gammas, &param, &values, &opts)?;
    let corner = format!("{param}\\gamma");
    let mut header = vec![corner];
    header.extend(gammas.iter().map(|&g| csv_field(g)));
    let mut g = Grid::with_header(header);
    for (v, row) in pd.param_values.iter().zip(&pd.p) {
        g.row(std::iter::once(csv_field(*v)).chain(row.iter().map(|p| p.map(csv_field).unwrap_or_default())));
    }
    Ok(Payload::Csv(g.finish()))
}

fn dos(a: &DosArgs) -> Run {
    let fam = family(&a.io)?;
    let h = fam.hamiltonian();
    if let Some(e_s) = a.fit_at {
        let window = match &a.fit_window {
            Some(w) => {
                let (lo, hi) = w
                    .split_once(':')
                    .and_then(|(x, y)| Some((x.trim().parse::<f64>().ok()?, y.trim().parse::<f64>().ok()?)))
                    .ok_or_else(|| Error::domain(format!("--fit-window '{w}' must be min:max")))?;
                (lo, hi)
            }
            None => default_fit_window(&h)?,
        };
        let fit = vanhove_exponent(&h, e_s, window)?;
        return Ok(Payload::Json(json!({
            "alpha": fit.alpha,
            "r_squared": fit.r_squared,
            "k_predicted": fit.k_predicted(),
            "side": fit.side,
            "samples": fit.samples,
            "window": [window.0, window.1],
        })));
    }
    let (lo, hi) = match (a.emin, a.emax) {
        (Some(lo), Some(hi)) => (lo, hi),
        (None, None) => nonbloch::dos::band_edges(&h)?,
        _ => return Err(Error::domain("give both --emin and --emax, or neither for the band edges")),
    };
    let curve = dos_curve(&h, lo, hi, a.n)?;
    let mut g = Grid::new(&["E", "rho"]);
    for (e, r) in curve.energies.iter().zip(&curve.rho) {
        g.row([csv_field(*e), csv_field(*r)]);
    }
    Ok(Payload::Csv(g.finish()))
}

fn duality(a: &DualityArgs) -> Run {
    if a.n < 2 || !(a.emin < a.emax) {
        return Err(Error::domain("duality needs emin < emax and n >= 2"));
    }
    let mut g = Grid::new(&["E", "gap", "angle"]);
    for k in 0..a.n {
        let e = a.emin + (a.emax - a.emin) * k as f64 / (a.n - 1) as f64;
        let d = ep_defectiveness(&transfer_matrix(a.tl, a.tr, Complex64::new(e, 0.0))?);
        g.row([csv_field(e), csv_field(d.eigenvalue_gap), csv_field(d.eigenvector_angle)]);
    }
    Ok(Payload::Csv(g.finish()))
}

/// Library constants in effect for a run, recorded in the manifest.
fn constants() -> Value {
    let t = ThresholdOptions::default();
    json!({
        "imag_tol_default": IMAG_TOL,
        "membership_tol": nonbloch::rootfind::MEMBERSHIP_TOL,
        "tie_tol": nonbloch::rootfind::TIE_TOL,
        "cluster_radius": nonbloch::rootfind::CLUSTER_RADIUS,
        "order_tol": nonbloch::saddle::ORDER_TOL,
        "ep_limit": nonbloch::saddle::EP_LIMIT,
        "g_trim": nonbloch::resultant::G_TRIM,
        "d_trim": nonbloch::resultant::D_TRIM,
        "gamma_imag_tol": t.gamma_imag_tol,
        "energy_imag_tol": t.energy_imag_tol,
        "seed_radius": t.seed_radius,
        "n_phi_default": nonbloch::gbz::N_PHI,
        "cusp_factor": nonbloch::gbz::CUSP_FACTOR,
        "smooth_window": nonbloch::gbz::SMOOTH_WINDOW,
        "dos_singular_tol": nonbloch::dos::SINGULAR_TOL,
        "dos_exclusion": nonbloch::dos::EXCLUSION,
        "dos_fit_window_bandwidths": [FIT_WINDOW.0, FIT_WINDOW.1],
    })
}
