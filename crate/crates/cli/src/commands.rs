use std::path::{Path, PathBuf};
use std::time::{Instant, SystemTime, UNIX_EPOCH};

use eqop::eval::{evaluate, export_grid, run_theory_checks, topology_demo, TheoryOptions};
use eqop::formats::{read_checkpoint, read_dataset, read_file, read_manifest, write_atomic, write_checkpoint, write_dataset};
use eqop::group::GroupElement;
use eqop::imaging::{gen_shapes, load_idx, DatasetBundle, ImageGrid, PairMode, Provenance, RotationMethod, TransformSpec};
use eqop::models::{check_compatible, train, Model, TrainConfig};
use eqop::Execution;
use serde::Serialize;

use crate::args::{DataKind, EvalArgs, GenDataArgs, PairModeArg, RotationArg, TrainArgs, VerifyArgs};
use crate::error::{CliError, CliResult};

pub const DATASET_FILE: &str = "dataset.eqds";
pub const CHECKPOINT_FILE: &str = "model.eqck";
pub const HISTORY_FILE: &str = "history.jsonl";
pub const MANIFEST_FILE: &str = "manifest.json";

#[derive(Debug, Serialize)]
struct Artifact {
    path: String,
    sha256: String,
}

/// Provenance record written at the end of a run.
#[derive(Debug, Serialize)]
struct RunManifest {
    command: &'static str,
    tool_version: &'static str,
    config: TrainConfig,
    config_hash: String,
    dataset: Artifact,
    checkpoint: Artifact,
    #[serde(skip_serializing_if = "Option::is_none")]
    report: Option<String>,
    started_unix: u64,
    wall_clock_seconds: f64,
}

fn create_dir(dir: &Path) -> CliResult<()> {
    std::fs::create_dir_all(dir).map_err(|e| CliError::Io(format!("{}: {e}", dir.display())))
}

fn unix_now() -> u64 {
    SystemTime::now().duration_since(UNIX_EPOCH).map_or(0, |d| d.as_secs())
}

/// A dataset argument may name the directory written by `gen-data` or the
/// container inside it.
fn dataset_path(p: &Path) -> PathBuf {
    if p.is_dir() {
        p.join(DATASET_FILE)
    } else {
        p.to_path_buf()
    }
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> CliResult<()> {
    let text = serde_json::to_string_pretty(value).map_err(|e| CliError::Io(e.to_string()))?;
    Ok(write_atomic(path, text.as_bytes())?)
}

pub fn gen_data(a: &GenDataArgs, exec: Execution) -> CliResult<()> {
    let count = a.count as usize;
    let (base, source, size) = match a.kind {
        DataKind::Shapes => (gen_shapes(count, a.seed, a.size as usize, exec)?, "shapes", a.size as usize),
        DataKind::Mnist => {
            let images = a.idx_images.as_deref().expect("required by clap");
            let (mut imgs, _) = load_idx(images, a.idx_labels.as_deref())?;
            if imgs.len() < count {
                return Err(CliError::Usage(format!(
                    "--count {count} exceeds the {} images in {}",
                    imgs.len(),
                    images.display()
                )));
            }
            imgs.truncate(count);
            let size = imgs[0].height();
            (imgs, "mnist", size)
        }
    };
    let method = match a.rotation {
        RotationArg::Bilinear => RotationMethod::Bilinear,
        RotationArg::Exact90 => RotationMethod::Exact90,
    };
    let transforms = TransformSpec::new(a.rot as usize, a.tx as usize, a.ty as usize)?.with_method(method);
    transforms.validate()?;
    let provenance = Provenance {
        source: source.into(),
        seed: a.seed,
        base_count: count,
        size,
        transforms,
        pair_mode: match a.pair_mode {
            PairModeArg::Orbit => PairMode::Orbit,
            PairModeArg::Base => PairMode::BaseOnly,
        },
        cap: a.cap,
    };
    let data = DatasetBundle::assemble(&base, provenance, exec)?;
    create_dir(&a.out)?;
    let path = a.out.join(DATASET_FILE);
    let m = write_dataset(&data, &path)?;
    println!(
        "wrote {} ({} train / {} val / {} test pairs, group orders {:?})",
        path.display(),
        m.counts.train,
        m.counts.val,
        m.counts.test,
        m.group_orders
    );
    Ok(())
}

fn load_config(a: &TrainArgs) -> CliResult<TrainConfig> {
    let text = read_file(&a.config)?;
    let text = String::from_utf8(text)
        .map_err(|_| CliError::Usage(format!("{} is not UTF-8", a.config.display())))?;
    let mut cfg = TrainConfig::from_json(&text)?;
    if let Some(v) = a.epochs {
        cfg.epochs = v;
    }
    if let Some(v) = a.lr {
        cfg.lr = v;
    }
    if let Some(v) = a.batch {
        cfg.batch = v;
    }
    if let Some(v) = a.seed {
        cfg.seed = v;
    }
    if let Some(v) = a.latent_dim {
        cfg.latent_dim = v;
    }
    if let Some(v) = a.init_scale {
        cfg.init_scale = v;
    }
    cfg.validate()?;
    Ok(cfg)
}

pub fn train_cmd(a: &TrainArgs) -> CliResult<()> {
    let started = Instant::now();
    let started_unix = unix_now();
    let cfg = load_config(a)?;
    let data_path = dataset_path(&a.data);
    let data = read_dataset(&data_path)?;
    let data_hash = read_manifest(&data_path)?.sha256;
    check_compatible(&data, &cfg)?;
    let outcome = train(&data, &cfg)?;
    create_dir(&a.out)?;
    let ckpt = a.out.join(CHECKPOINT_FILE);
    let sidecar = write_checkpoint(&ckpt, &outcome.model, outcome.optimizer.clone(), outcome.best_epoch)?;
    write_atomic(&a.out.join(HISTORY_FILE), outcome.history_jsonl().as_bytes())?;
    let manifest = RunManifest {
        command: "train",
        tool_version: env!("CARGO_PKG_VERSION"),
        config_hash: cfg.hash(),
        config: cfg,
        dataset: Artifact {
            path: data_path.display().to_string(),
            sha256: data_hash,
        },
        checkpoint: Artifact {
            path: ckpt.display().to_string(),
            sha256: sidecar.sha256,
        },
        report: None,
        started_unix,
        wall_clock_seconds: started.elapsed().as_secs_f64(),
    };
    write_json(&a.out.join(MANIFEST_FILE), &manifest)?;
    if let Some(last) = outcome.history.last() {
        println!("final val loss {:.6} (epoch {})", last.val_loss, last.epoch);
    }
    println!("best epoch {}; checkpoint {}", outcome.best_epoch, ckpt.display());
    Ok(())
}

/// One row per operator stage: the latent transform of `x` by every index
/// of that stage, the other stages held at 0.
fn orbit_strip(model: &Model, x: &ImageGrid) -> CliResult<(Vec<ImageGrid>, usize, usize)> {
    let stages = model.config.stage_count();
    let orders: Vec<usize> = (0..stages).map(|s| model.operators(s).len()).collect();
    let cols = orders.iter().copied().max().unwrap_or(1);
    let mut cells = Vec::with_capacity(stages * cols);
    for (s, &k) in orders.iter().enumerate() {
        for j in 0..cols {
            if j < k {
                let mut idx = vec![0; stages];
                idx[s] = j;
                cells.push(model.apply_latent_transform(x, &GroupElement::new(idx))?);
            } else {
                cells.push(ImageGrid::zeros(x.height(), x.width()));
            }
        }
    }
    Ok((cells, stages, cols))
}

pub fn eval_cmd(a: &EvalArgs, exec: Execution) -> CliResult<()> {
    let started = Instant::now();
    let started_unix = unix_now();
    let (model, sidecar) = read_checkpoint(&a.checkpoint)?;
    let data_path = dataset_path(&a.data);
    let data = read_dataset(&data_path)?;
    let data_hash = read_manifest(&data_path)?.sha256;
    model.config.check_data(&data.spec, data.pixel_dim())?;
    if data.pixel_dim() != model.params.pixel_dim() {
        return Err(CliError::Usage(format!(
            "dataset images have {} pixels, checkpoint expects {}",
            data.pixel_dim(),
            model.params.pixel_dim()
        )));
    }
    let report = evaluate(&model, &data.test, exec)?;
    if let Some(dir) = a.out.parent().filter(|d| !d.as_os_str().is_empty()) {
        create_dir(dir)?;
    }
    write_atomic(&a.out, report.to_json().as_bytes())?;

    if let Some(dir) = &a.grids {
        create_dir(dir)?;
        let n = a.grid_samples.min(data.test.len());
        let stride = (data.test.len() / n.max(1)).max(1);
        for i in 0..n {
            let x = &data.test[i * stride].x1;
            let (cells, rows, cols) = orbit_strip(&model, x)?;
            export_grid(&cells, rows, cols, &dir.join(format!("orbit_{i:03}.pgm")))?;
        }
        println!("wrote {n} orbit strips to {}", dir.display());
    }

    let manifest = RunManifest {
        command: "eval",
        tool_version: env!("CARGO_PKG_VERSION"),
        config_hash: sidecar.config_hash.clone(),
        config: sidecar.config,
        dataset: Artifact {
            path: data_path.display().to_string(),
            sha256: data_hash,
        },
        checkpoint: Artifact {
            path: a.checkpoint.display().to_string(),
            sha256: sidecar.sha256,
        },
        report: Some(a.out.display().to_string()),
        started_unix,
        wall_clock_seconds: started.elapsed().as_secs_f64(),
    };
    write_json(&a.out.with_extension("manifest.json"), &manifest)?;
    println!(
        "test mse {:.6}, equivariance residual {:.4}{}",
        report.test_mse,
        report.equivariance_residual,
        report
            .weak_inference_accuracy
            .map_or(String::new(), |w| format!(", weak inference agreement {w:.3}"))
    );
    Ok(())
}

pub fn verify_cmd(a: &VerifyArgs, exec: Execution) -> CliResult<()> {
    let opts = TheoryOptions {
        max_order: a.max_order,
        flip_sign: a.inject_fault,
        exec,
    };
    let report = run_theory_checks(&opts)?;
    print!("{}", report.render());
    print!("{}", topology_demo()?.text);
    let failures = report.failures();
    if failures.is_empty() {
        return Ok(());
    }
    let list = failures
        .iter()
        .map(|c| format!("  {} (max deviation {:.3e})", c.name, c.max_deviation))
        .collect::<Vec<_>>()
        .join("\n");
    Err(CliError::Verification(format!("{} check(s) failed:\n{list}", failures.len())))
}
