//! `toric`: experiment driver for toric Bézier patches.

mod input;
mod output;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use toric_core::degeneration::{distance_schedule, DEFAULT_GRID_CURVE, DEFAULT_GRID_SURFACE};
use toric_core::ipf::{homogenize, preferred_blending_with, DEFAULT_MAX_ITER, DEFAULT_TOL};
use toric_core::triangulation::regular_triangulation_generic;
use toric_core::{
    certify_all_weights_injective, control_polytope, is_regular, projected_injectivity,
    regular_triangulation, CompatibilityStatus, ControlPoints, DegenerationSchedule,
    LiftingFunction, PointConfig, ToricPatch, WeightVector,
};

use output::{columns, num};

const EXIT_INCOMPATIBLE: u8 = 2;
const EXIT_ALL_DEGENERATE: u8 = 3;
const EXIT_PARSE: u8 = 64;
const EXIT_DOMAIN: u8 = 65;
const EXIT_IO: u8 = 74;

#[derive(Debug)]
pub enum CliError {
    Parse(String),
    Domain(String),
    Io(String),
}

macro_rules! domain_from {
    ($($t:ty),*) => {$(
        impl From<$t> for CliError {
            fn from(e: $t) -> Self {
                CliError::Domain(e.to_string())
            }
        }
    )*};
}

domain_from!(
    toric_core::GeometryError,
    toric_core::BlendError,
    toric_core::IpfError,
    toric_core::InjectivityError,
    toric_core::TriangulationError,
    toric_core::DegenerationError
);

#[derive(Parser)]
#[command(name = "toric", version, about = "Toric Bézier patch experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Sample blending vectors over the domain.
    Blend(Opts),
    /// Linear-precision blending vectors at query points.
    Ipf(Opts),
    /// Certify injectivity for all weights, optionally after a projection.
    CheckInjective(Opts),
    /// Regular triangulation from a lifting, or a regularity test.
    Triangulate(Opts),
    /// Distances along a toric degeneration.
    Degenerate(Opts),
    /// Sample the patch map F over the domain.
    Sample(Opts),
}

#[derive(Args, Clone)]
struct Opts {
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    controls: Option<PathBuf>,
    #[arg(long)]
    weights: Option<PathBuf>,
    #[arg(long)]
    lifting: Option<PathBuf>,
    /// Samples per axis (d = 1) or per edge / box axis (d ≥ 2).
    #[arg(long)]
    grid: Option<usize>,
    #[arg(long, value_delimiter = ',')]
    t: Vec<f64>,
    #[arg(long)]
    tol: Option<f64>,
    #[arg(long, default_value = ".")]
    out: PathBuf,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    projection: Option<PathBuf>,
    /// Query points for `ipf`; random interior points are drawn otherwise.
    #[arg(long)]
    query: Option<PathBuf>,
    /// Number of random `ipf` queries.
    #[arg(long, default_value_t = 10)]
    count: usize,
    #[arg(long)]
    max_iter: Option<usize>,
    /// Triangulation to test for regularity.
    #[arg(long)]
    triangulation: Option<PathBuf>,
    /// Curve lifting i(m−i) (full) or i(m−i)/2 (halved) when no --lifting is given.
    #[arg(long, value_enum)]
    schedule: Option<Schedule>,
    /// Perturb non-generic liftings instead of failing.
    #[arg(long)]
    perturb: bool,
}

#[derive(Clone, Copy, ValueEnum)]
enum Schedule {
    Full,
    Halved,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_PARSE } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli.command) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            let (code, msg) = match e {
                CliError::Parse(m) => (EXIT_PARSE, format!("parse error: {m}")),
                CliError::Domain(m) => (EXIT_DOMAIN, format!("error: {m}")),
                CliError::Io(m) => (EXIT_IO, format!("io error: {m}")),
            };
            eprintln!("{msg}");
            ExitCode::from(code)
        }
    }
}

fn run(cmd: Command) -> Result<u8, CliError> {
    match cmd {
        Command::Blend(o) => blend(&o),
        Command::Ipf(o) => ipf(&o),
        Command::CheckInjective(o) => check_injective(&o),
        Command::Triangulate(o) => triangulate(&o),
        Command::Degenerate(o) => degenerate(&o),
        Command::Sample(o) => sample(&o),
    }
}

fn load_config(o: &Opts) -> Result<PointConfig, CliError> {
    input::config(input::required(&o.config, "config")?)
}

fn default_grid(o: &Opts, d: usize) -> Result<usize, CliError> {
    let g = o.grid.unwrap_or(if d == 1 {
        DEFAULT_GRID_CURVE
    } else {
        DEFAULT_GRID_SURFACE
    });
    if g < 2 {
        return Err(CliError::Parse(format!(
            "--grid must be at least 2, got {g}"
        )));
    }
    Ok(g)
}

/// A uniform grid on Δ for d = 1, otherwise the grid^d box grid clipped to Δ.
fn grid_points(patch: &ToricPatch, grid: usize) -> Vec<Vec<f64>> {
    let d = patch.dim();
    let pts = patch.config().points();
    let lo: Vec<f64> = (0..d)
        .map(|i| pts.iter().map(|p| p[i]).fold(f64::INFINITY, f64::min))
        .collect();
    let hi: Vec<f64> = (0..d)
        .map(|i| pts.iter().map(|p| p[i]).fold(f64::NEG_INFINITY, f64::max))
        .collect();
    let total = grid.pow(d as u32);
    (0..total)
        .filter_map(|mut k| {
            let x: Vec<f64> = (0..d)
                .map(|i| {
                    let j = k % grid;
                    k /= grid;
                    lo[i] + (hi[i] - lo[i]) * j as f64 / (grid - 1) as f64
                })
                .collect();
            patch.polytope().contains(&x, 1e-12).then_some(x)
        })
        .collect()
}

type Mesh = (Vec<Vec<f64>>, Vec<[usize; 3]>);

/// Barycentric mesh of a triangulation of the vertices of a polygon Δ.
#[allow(clippy::needless_range_loop)]
fn domain_mesh(patch: &ToricPatch, k: usize) -> Result<Mesh, CliError> {
    let cfg = patch.config();
    let vpts: Vec<Vec<f64>> = patch
        .polytope()
        .vertices
        .iter()
        .map(|&i| cfg.point(i).to_vec())
        .collect();
    let vconf = PointConfig::new(2, vpts.clone())?;
    let (t, _) = regular_triangulation_generic(&vconf, &LiftingFunction::zeros(vpts.len()))?;
    let mut verts = Vec::new();
    let mut faces = Vec::new();
    for s in t.simplices() {
        let (a, b, c) = (&vpts[s[0]], &vpts[s[1]], &vpts[s[2]]);
        let mut index = vec![vec![0usize; k + 1]; k + 1];
        for i in 0..=k {
            for j in 0..=k - i {
                let (u, v) = (i as f64 / k as f64, j as f64 / k as f64);
                index[i][j] = verts.len();
                verts.push(vec![
                    a[0] + u * (b[0] - a[0]) + v * (c[0] - a[0]),
                    a[1] + u * (b[1] - a[1]) + v * (c[1] - a[1]),
                ]);
            }
        }
        for i in 0..k {
            for j in 0..k - i {
                faces.push([index[i][j], index[i + 1][j], index[i][j + 1]]);
                if j + 1 < k - i {
                    faces.push([index[i + 1][j], index[i + 1][j + 1], index[i][j + 1]]);
                }
            }
        }
    }
    Ok((verts, faces))
}

fn surface_obj(
    patch: &ToricPatch,
    w: &WeightVector,
    b: &ControlPoints,
    k: usize,
) -> Result<String, CliError> {
    let (dom, faces) = domain_mesh(patch, k)?;
    let verts: Vec<Vec<f64>> = dom
        .iter()
        .map(|x| patch.patch_eval(w, b, x))
        .collect::<Result<_, _>>()?;
    Ok(output::obj(&verts, &faces))
}

fn curve_svg(
    patch: &ToricPatch,
    w: &WeightVector,
    b: &ControlPoints,
    tube: Option<f64>,
) -> Result<String, CliError> {
    let cfg = patch.config();
    let (lo, hi) = (
        cfg.point(patch.polytope().vertices[0])[0],
        cfg.point(patch.polytope().vertices[1])[0],
    );
    let curve: Vec<Vec<f64>> = (0..=400)
        .map(|i| patch.patch_eval(w, b, &[lo + (hi - lo) * i as f64 / 400.0]))
        .collect::<Result<_, _>>()?;
    let mut order: Vec<usize> = (0..cfg.len()).collect();
    order.sort_by(|&i, &j| cfg.point(i)[0].total_cmp(&cfg.point(j)[0]));
    let polygon: Vec<Vec<f64>> = order.iter().map(|&i| b.point(i).to_vec()).collect();
    Ok(output::svg_curve(&curve, &polygon, tube))
}

fn blend(o: &Opts) -> Result<u8, CliError> {
    let cfg = load_config(o)?;
    let (d, n) = (cfg.dim(), cfg.len());
    let w = input::weights(o.weights.as_deref(), n)?;
    let patch = ToricPatch::new(cfg)?;
    let grid = default_grid(o, d)?;
    let rows: Vec<Vec<String>> = grid_points(&patch, grid)
        .iter()
        .map(|x| {
            let z = patch.blend(&w, x)?;
            Ok(x.iter().chain(z.coords()).map(|&v| num(v)).collect())
        })
        .collect::<Result<_, CliError>>()?;
    let mut header = columns("x", d);
    header.extend(columns("z", n));
    let path = output::write(&o.out, "blend.csv", &output::csv(&header, &rows))?;
    println!("blend: {} samples -> {}", rows.len(), path.display());
    Ok(0)
}

fn sample(o: &Opts) -> Result<u8, CliError> {
    let cfg = load_config(o)?;
    let (d, n) = (cfg.dim(), cfg.len());
    let b = input::controls(input::required(&o.controls, "controls")?, n)?;
    let w = input::weights(o.weights.as_deref(), n)?;
    let patch = ToricPatch::new(cfg)?;
    let grid = default_grid(o, d)?;
    let rows: Vec<Vec<String>> = grid_points(&patch, grid)
        .iter()
        .map(|x| {
            let f = patch.patch_eval(&w, &b, x)?;
            Ok(x.iter().chain(&f).map(|&v| num(v)).collect())
        })
        .collect::<Result<_, CliError>>()?;
    let mut header = columns("x", d);
    header.extend(columns("F", b.ambient_dim()));
    let path = output::write(&o.out, "sample.csv", &output::csv(&header, &rows))?;
    println!("sample: {} samples -> {}", rows.len(), path.display());
    if d == 1 && b.ambient_dim() == 2 {
        let path = output::write(&o.out, "curve.svg", &curve_svg(&patch, &w, &b, o.tol)?)?;
        println!("sample: curve -> {}", path.display());
    }
    if d == 2 && b.ambient_dim() == 3 {
        let path = output::write(&o.out, "patch.obj", &surface_obj(&patch, &w, &b, grid - 1)?)?;
        println!("sample: surface -> {}", path.display());
    }
    Ok(0)
}

/// Interior points as random convex combinations with all weights positive.
fn random_interior(cfg: &PointConfig, count: usize, seed: u64) -> Vec<Vec<f64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            let e: Vec<f64> = (0..cfg.len())
                .map(|_| -(1.0 - rng.gen::<f64>()).ln() + 1e-3)
                .collect();
            let s: f64 = e.iter().sum();
            let mut y = vec![0.0; cfg.dim()];
            for (ei, a) in e.iter().zip(cfg.points()) {
                for (yj, aj) in y.iter_mut().zip(a) {
                    *yj += ei / s * aj;
                }
            }
            y
        })
        .collect()
}

fn ipf(o: &Opts) -> Result<u8, CliError> {
    let cfg = load_config(o)?;
    let (d, n) = (cfg.dim(), cfg.len());
    let w = input::weights(o.weights.as_deref(), n)?;
    let queries = match &o.query {
        Some(p) => input::point_list(p)?,
        None => random_interior(&cfg, o.count, o.seed),
    };
    if let Some(q) = queries.iter().find(|q| q.len() != d) {
        return Err(CliError::Parse(format!("query {q:?} is not in R^{d}")));
    }
    let patch = ToricPatch::new(cfg)?;
    let h = homogenize(patch.config(), patch.polytope());
    let tol = o.tol.unwrap_or(DEFAULT_TOL);
    let max_iter = o.max_iter.unwrap_or(DEFAULT_MAX_ITER);
    let mut rows = Vec::new();
    let mut worst: f64 = 0.0;
    for y in &queries {
        let r = preferred_blending_with(&patch, &h, &w, y, tol, max_iter)?;
        worst = worst.max(r.final_error);
        let mut row: Vec<String> = y.iter().chain(r.p.coords()).map(|&v| num(v)).collect();
        row.push(r.iterations.to_string());
        row.push(num(r.final_error));
        rows.push(row);
    }
    let mut header = columns("y", d);
    header.extend(columns("p", n));
    header.push("iterations".into());
    header.push("final_error".into());
    let path = output::write(&o.out, "ipf.csv", &output::csv(&header, &rows))?;
    println!(
        "ipf: {} queries, max error {:.3e} -> {}",
        rows.len(),
        worst,
        path.display()
    );
    Ok(0)
}

fn check_injective(o: &Opts) -> Result<u8, CliError> {
    let cfg = load_config(o)?;
    let b = input::controls(input::required(&o.controls, "controls")?, cfg.len())?;
    let projected = o.projection.is_some();
    let verdict = match &o.projection {
        Some(p) => projected_injectivity(&cfg, &b, &input::projection(p)?)?,
        None => {
            if b.ambient_dim() != cfg.dim() {
                return Err(CliError::Domain(format!(
                    "controls live in R^{} but exponents in R^{}; supply --projection",
                    b.ambient_dim(),
                    cfg.dim()
                )));
            }
            certify_all_weights_injective(&cfg, &b)?
        }
    };
    let json = serde_json::to_string(&verdict).expect("verdict serializes");
    output::write(&o.out, "verdict.json", &(json + "\n"))?;
    println!("status: {:?}", verdict.status);
    if let Some(s) = verdict.global_sign {
        println!("global sign: {s:+}");
    }
    if let Some((i, j)) = &verdict.witness {
        println!("witness: {i:?} {j:?}");
    }
    let scope = if projected {
        "for the given weights"
    } else {
        "for all positive weights"
    };
    match verdict.status {
        CompatibilityStatus::Compatible => {
            println!("certified injective {scope}");
            Ok(0)
        }
        CompatibilityStatus::Incompatible => {
            if projected {
                println!("certificate inconclusive");
            } else {
                println!(
                    "certificate inconclusive: some positive weights give a non-injective patch"
                );
            }
            Ok(EXIT_INCOMPATIBLE)
        }
        CompatibilityStatus::AllDegenerate => {
            println!("certificate inconclusive: every orientation product vanishes");
            Ok(EXIT_ALL_DEGENERATE)
        }
    }
}

fn control_obj(o: &Opts, cfg: &PointConfig, t: &toric_core::Triangulation) -> Result<(), CliError> {
    let Some(cp) = &o.controls else {
        return Ok(());
    };
    let b = input::controls(cp, cfg.len())?;
    if cfg.dim() == 2 && b.ambient_dim() == 3 {
        let emb = control_polytope(t, &b);
        let faces: Vec<[usize; 3]> = emb
            .combinatorics
            .simplices()
            .iter()
            .map(|s| [s[0], s[1], s[2]])
            .collect();
        let path = output::write(
            &o.out,
            "control_polytope.obj",
            &output::obj(b.points(), &faces),
        )?;
        println!("control polytope -> {}", path.display());
    }
    Ok(())
}

fn triangulate(o: &Opts) -> Result<u8, CliError> {
    let cfg = load_config(o)?;
    if let Some(tp) = &o.triangulation {
        let t = input::triangulation(tp)?;
        let v = is_regular(&cfg, &t)?;
        let json = serde_json::to_string(&v).expect("verdict serializes");
        output::write(&o.out, "regularity.json", &(json + "\n"))?;
        println!("regular: {}", v.regular);
        if let Some(wit) = &v.witness {
            let vals: Vec<String> = wit.values().iter().map(|&x| num(x)).collect();
            println!("witness lifting: [{}]", vals.join(","));
        }
        control_obj(o, &cfg, &t)?;
        return Ok(0);
    }
    let lambda = input::lifting(input::required(&o.lifting, "lifting")?)?;
    let t = if o.perturb {
        regular_triangulation_generic(&cfg, &lambda)?.0
    } else {
        regular_triangulation(&cfg, &lambda)?
    };
    let json = serde_json::to_string(&t).expect("triangulation serializes");
    output::write(&o.out, "triangulation.json", &format!("{json}\n"))?;
    println!("{json}");
    control_obj(o, &cfg, &t)?;
    Ok(0)
}

fn curve_lifting(n: usize, schedule: Schedule) -> LiftingFunction {
    let m = n - 1;
    let k = match schedule {
        Schedule::Full => 1.0,
        Schedule::Halved => 0.5,
    };
    LiftingFunction::new((0..n).map(|i| k * (i * (m - i)) as f64).collect())
        .expect("finite lifting")
}

fn degenerate(o: &Opts) -> Result<u8, CliError> {
    let cfg = load_config(o)?;
    let (d, n) = (cfg.dim(), cfg.len());
    let b = input::controls(input::required(&o.controls, "controls")?, n)?;
    let w = input::weights(o.weights.as_deref(), n)?;
    let lambda = match (&o.lifting, o.schedule) {
        (Some(p), _) => input::lifting(p)?,
        (None, Some(s)) if d == 1 => curve_lifting(n, s),
        (None, Some(_)) => {
            return Err(CliError::Parse("--schedule applies to curves only".into()));
        }
        (None, None) => {
            return Err(CliError::Parse(
                "--lifting or --schedule is required".into(),
            ));
        }
    };
    if lambda.len() != n {
        return Err(CliError::Domain(format!(
            "{} lifting values for {n} exponents",
            lambda.len()
        )));
    }
    let t_values = if o.t.is_empty() {
        vec![1.0]
    } else {
        o.t.clone()
    };
    let schedule = DegenerationSchedule::new(w, lambda.clone(), t_values)?;
    let (tri, _) = regular_triangulation_generic(&cfg, &lambda)?;
    let patch = ToricPatch::new(cfg)?;
    let complex = control_polytope(&tri, &b);
    let grid = default_grid(o, d)?;
    let reports = distance_schedule(&patch, &schedule, &b, &complex, grid)?;
    let header: Vec<String> = [
        "t",
        "sup_patch_to_complex",
        "sup_complex_to_patch",
        "samples",
    ]
    .iter()
    .map(|s| s.to_string())
    .collect();
    let rows: Vec<Vec<String>> = reports
        .iter()
        .map(|r| {
            vec![
                num(r.t),
                num(r.sup_patch_to_complex),
                num(r.sup_complex_to_patch),
                r.samples.to_string(),
            ]
        })
        .collect();
    let path = output::write(&o.out, "degenerate.csv", &output::csv(&header, &rows))?;
    for r in &reports {
        println!(
            "t = {}: patch->complex {:.6e}, complex->patch {:.6e} ({} samples)",
            r.t, r.sup_patch_to_complex, r.sup_complex_to_patch, r.samples
        );
    }
    println!(
        "degenerate: {} reports -> {}",
        reports.len(),
        path.display()
    );
    for (k, &t) in schedule.t_values.iter().enumerate() {
        let wt = schedule.weights_at(t)?;
        if d == 1 && b.ambient_dim() == 2 {
            write_artifact(
                &o.out,
                &format!("degenerate_{k}.svg"),
                &curve_svg(&patch, &wt, &b, o.tol)?,
            )?;
        }
        if d == 2 && b.ambient_dim() == 3 {
            write_artifact(
                &o.out,
                &format!("degenerate_{k}.obj"),
                &surface_obj(&patch, &wt, &b, grid - 1)?,
            )?;
        }
    }
    Ok(0)
}

fn write_artifact(dir: &Path, name: &str, contents: &str) -> Result<(), CliError> {
    let path = output::write(dir, name, contents)?;
    println!("artifact -> {}", path.display());
    Ok(())
}
