//! One function per subcommand. Each writes only under its output directory.

use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use serde::Serialize;

use nwtopo::dataset::{generate_dataset, DatasetKind};
use nwtopo::optimizer::{self, OptimizerConfig, RunTrajectory};
use nwtopo::persistence::{diagram, write_diagram};
use nwtopo::smoothing::{grid_dump, write_grid, FieldPreset};
use nwtopo::{bandwidth, load_points, save_points, Error, RngSeed};

use crate::args::{BenchArgs, DiagramArgs, FieldsArgs, GenerateArgs, RunArgs, SweepArgs};
use crate::config::{resolve_out, RunConfigFile};
use crate::CliError;

fn prepare(dir: &Path) -> Result<(), CliError> {
    fs::create_dir_all(dir).map_err(|e| CliError::Runtime(format!("cannot create {}: {e}", dir.display())))
}

fn write_file(path: &Path, body: impl FnOnce(&mut BufWriter<File>) -> std::io::Result<()>) -> Result<(), CliError> {
    let io = |e: std::io::Error| CliError::Runtime(format!("cannot write {}: {e}", path.display()));
    let mut out = BufWriter::new(File::create(path).map_err(io)?);
    body(&mut out).map_err(io)?;
    out.flush().map_err(io)
}

fn write_manifest<T: Serialize>(dir: &Path, manifest: &T) -> Result<(), CliError> {
    write_file(&dir.join("manifest.json"), |out| {
        serde_json::to_writer_pretty(&mut *out, manifest)?;
        writeln!(out)
    })
}

fn save(cloud: &nwtopo::PointCloud, path: PathBuf) -> Result<(), CliError> {
    save_points(cloud, path).map_err(CliError::from_core)
}

/// Resolves the output directory and defaults, and loads the initial cloud.
fn start_run(config: &RunConfigFile) -> Result<(RunConfigFile, PathBuf, nwtopo::PointCloud), CliError> {
    let dir = resolve_out(None, config.output_dir.as_deref());
    let resolved = config.resolved(dir.clone());
    let cloud = resolved.load_dataset()?;
    Ok((resolved, dir, cloud))
}

fn write_trajectory(dir: &Path, stem: &str, t: &RunTrajectory) -> Result<(), CliError> {
    write_file(&dir.join(format!("{stem}.csv")), |out| t.write_csv(out))
}

#[derive(Serialize)]
struct GenerateManifest<'a> {
    command: &'a str,
    kind: &'a str,
    n: usize,
    noise: f64,
    seed: u64,
}

pub fn generate(args: &GenerateArgs) -> Result<(), CliError> {
    let kind = DatasetKind::parse(&args.kind, None).map_err(CliError::from_core)?;
    if matches!(kind, DatasetKind::FromFile(_)) {
        return Err(CliError::Config("generate only samples synthetic kinds".into()));
    }
    let cloud = generate_dataset(&kind, args.n, args.noise, RngSeed(args.seed)).map_err(CliError::from_core)?;
    let dir = resolve_out(args.out.out.as_deref(), None);
    prepare(&dir)?;
    write_manifest(
        &dir,
        &GenerateManifest {
            command: "generate",
            kind: kind.name(),
            n: args.n,
            noise: args.noise,
            seed: args.seed,
        },
    )?;
    save(&cloud, dir.join("points.csv"))?;
    println!("wrote {} points to {}", cloud.len(), dir.join("points.csv").display());
    Ok(())
}

pub fn run(args: &RunArgs) -> Result<(), CliError> {
    let (config, dir, cloud) = start_run(&args.config()?)?;
    let opt = config.optimizer_config();
    opt.validate(cloud.len()).map_err(CliError::from_core)?;
    prepare(&dir)?;
    write_manifest(&dir, &config)?;
    save(&cloud, dir.join("points.csv"))?;
    let trajectory = match optimizer::run(&cloud, &opt) {
        Ok(t) => t,
        Err(Error::RunAborted { epoch, source, partial }) => {
            write_trajectory(&dir, "trajectory", &partial)?;
            save(&partial.final_cloud, dir.join("final.csv"))?;
            return Err(CliError::Runtime(format!("run aborted at epoch {epoch}: {source}")));
        }
        Err(e) => return Err(CliError::from_core(e)),
    };
    write_trajectory(&dir, "trajectory", &trajectory)?;
    save(&trajectory.final_cloud, dir.join("final.csv"))?;
    for (epoch, snap) in &trajectory.snapshots {
        save(snap, dir.join(format!("snap_{epoch}.csv")))?;
    }
    match trajectory.best_loss() {
        Some(best) => println!("{}: best loss {best:?} over {} epochs", opt.method.name(), opt.epochs),
        None => println!("{}: no epochs run", opt.method.name()),
    }
    Ok(())
}

pub fn bench(args: &BenchArgs) -> Result<(), CliError> {
    let (config, dir, cloud) = start_run(&args.config()?)?;
    let configs = config.bench_configs();
    for c in &configs {
        c.validate(cloud.len()).map_err(CliError::from_core)?;
    }
    let manifest = RunConfigFile {
        methods: Some(config.bench_entries()),
        ..config
    };
    prepare(&dir)?;
    write_manifest(&dir, &manifest)?;
    save(&cloud, dir.join("points.csv"))?;
    let rows = optimizer::bench(&cloud, &configs).map_err(CliError::from_core)?;
    write_file(&dir.join("table.csv"), |out| optimizer::write_bench_csv(&rows, out))?;
    for (i, row) in rows.iter().enumerate() {
        write_trajectory(&dir, &format!("trajectory_{i}_{}", row.method.name()), &row.trajectory)?;
    }
    for row in &rows {
        println!("{:<8} {:<8} best loss {:?}", row.method.name(), row.sampler.name(), row.best_loss);
    }
    Ok(())
}

pub fn sweep_sigma(args: &SweepArgs) -> Result<(), CliError> {
    let (config, dir, cloud) = start_run(&args.config()?)?;
    let grid = config.sweep_grid();
    let base = config.optimizer_config();
    for &sigma in &grid {
        OptimizerConfig { sigma, ..base.clone() }
            .validate(cloud.len())
            .map_err(CliError::from_core)?;
    }
    let manifest = RunConfigFile {
        sigmas: Some(grid.clone()),
        ..config
    };
    prepare(&dir)?;
    write_manifest(&dir, &manifest)?;
    save(&cloud, dir.join("points.csv"))?;
    let runs = bandwidth::sigma_sweep(&cloud, &base, &grid).map_err(CliError::from_core)?;
    for (sigma, t) in &runs {
        write_trajectory(&dir, &format!("sigma_{sigma:?}"), t)?;
    }
    write_file(&dir.join("summary.csv"), |out| {
        writeln!(out, "sigma,best_loss,mean_epoch_seconds")?;
        for (sigma, t) in &runs {
            let best = t.best_loss().unwrap_or(f64::NAN);
            writeln!(out, "{sigma:?},{best:?},{:?}", t.mean_epoch_seconds().unwrap_or(0.0))?;
        }
        Ok(())
    })?;
    for (sigma, t) in &runs {
        println!("sigma {sigma:?}: best loss {:?}", t.best_loss().unwrap_or(f64::NAN));
    }
    Ok(())
}

#[derive(Serialize)]
struct FieldsManifest<'a> {
    command: &'a str,
    preset: &'a str,
    seed: u64,
    sigma: f64,
    jitter: Option<f64>,
    nx: usize,
    ny: usize,
}

pub fn fields(args: &FieldsArgs) -> Result<(), CliError> {
    let mut preset = FieldPreset::by_name(&args.preset, RngSeed(args.seed)).map_err(CliError::from_core)?;
    if let Some(sigma) = args.sigma {
        if !(sigma > 0.0 && sigma.is_finite()) {
            return Err(CliError::Config("sigma must be a positive real".into()));
        }
        preset.sigma = sigma;
    }
    if args.nx == 0 || args.ny == 0 {
        return Err(CliError::Config("grid resolution must be at least 1 x 1".into()));
    }
    let nw = preset.nw_field().map_err(CliError::from_core)?;
    let kernel = preset.kernel_field(args.jitter).map_err(CliError::from_core)?;
    let rows = grid_dump(&nw, &kernel, preset.window, (args.nx, args.ny)).map_err(CliError::from_core)?;
    let dir = resolve_out(args.out.out.as_deref(), None);
    prepare(&dir)?;
    write_manifest(
        &dir,
        &FieldsManifest {
            command: "fields",
            preset: &preset.name,
            seed: args.seed,
            sigma: preset.sigma,
            jitter: args.jitter,
            nx: args.nx,
            ny: args.ny,
        },
    )?;
    write_file(&dir.join("fields.csv"), |out| write_grid(&rows, out))?;
    write_file(&dir.join("anchors.csv"), |out| {
        writeln!(out, "x,y,gx,gy")?;
        for (a, g) in preset.anchors.iter().zip(&preset.gradients) {
            writeln!(out, "{:?},{:?},{:?},{:?}", a[0], a[1], g[0], g[1])?;
        }
        Ok(())
    })?;
    println!("wrote {} grid rows to {}", rows.len(), dir.join("fields.csv").display());
    Ok(())
}

#[derive(Serialize)]
struct DiagramManifest<'a> {
    command: &'a str,
    points: &'a Path,
    k: usize,
    threshold: Option<f64>,
    simplex_cap: usize,
    keep_zero: bool,
}

pub fn diagram_cmd(args: &DiagramArgs) -> Result<(), CliError> {
    let cloud = load_points(&args.points).map_err(CliError::from_core)?;
    let threshold = args.threshold.unwrap_or(f64::INFINITY);
    let mut pairs = diagram(&cloud, args.k, threshold, args.simplex_cap).map_err(CliError::from_core)?;
    if !args.keep_zero {
        pairs.retain(|p| !p.is_zero_persistence());
    }
    let dir = resolve_out(args.out.out.as_deref(), None);
    prepare(&dir)?;
    write_manifest(
        &dir,
        &DiagramManifest {
            command: "diagram",
            points: &args.points,
            k: args.k,
            threshold: args.threshold.filter(|t| t.is_finite()),
            simplex_cap: args.simplex_cap,
            keep_zero: args.keep_zero,
        },
    )?;
    write_file(&dir.join("diagram.csv"), |out| write_diagram(&pairs, out))?;
    println!("wrote {} pairs to {}", pairs.len(), dir.join("diagram.csv").display());
    Ok(())
}
