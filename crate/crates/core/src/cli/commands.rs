use std::path::{Path, PathBuf};

use super::config::{as_config, require_file, RunConfig};
use crate::artifacts::{
    encoder_to_text, generator_to_text, image_grid, load_encoder, load_generator, metrics_csv,
    trace_csv, Raster,
};
use crate::circuits::{
    build_generator, decode_generated, decode_sampled, gan_circuit_cost, hardware_cost,
    CircuitCost, EncoderMode, EncoderParams, GeneratorParams, Scheme,
};
use crate::data::{filter_classes, fit_pca, load_idx, PcaModel, Sample};
use crate::error::{Error, Result};
use crate::noise::MAX_DENSITY_QUBITS;
use crate::training::{
    ablation_run, noise_sweep, pretrain_encoder, train_gan, ABLATION_HEADER, SWEEP_HEADER,
};

/// Files produced by a command, written together once all compute is done.
#[derive(Default)]
struct Outputs {
    files: Vec<(String, Vec<u8>)>,
    manifest: toml::Table,
}

impl Outputs {
    fn new(command: &str, cfg: &RunConfig) -> Self {
        let mut run = toml::Table::new();
        run.insert("command".into(), command.into());
        run.insert("seed".into(), toml::Value::Integer(cfg.seed as i64));
        run.insert("version".into(), env!("CARGO_PKG_VERSION").into());
        let mut manifest = toml::Table::new();
        manifest.insert("run".into(), run.into());
        Self {
            files: Vec::new(),
            manifest,
        }
    }

    fn add(&mut self, role: &str, name: &str, bytes: impl Into<Vec<u8>>) {
        self.files.push((name.to_owned(), bytes.into()));
        self.section("artifacts").insert(role.into(), name.into());
    }

    fn section(&mut self, name: &str) -> &mut toml::Table {
        self.manifest
            .entry(name)
            .or_insert_with(|| toml::Table::new().into())
            .as_table_mut()
            .expect("manifest sections are tables")
    }

    fn images(&mut self, cfg: &RunConfig, raster: &Raster, stem: &str) -> Result<()> {
        self.add("images", &format!("{stem}.pgm"), raster.to_pgm());
        if cfg.png {
            self.add("images_png", &format!("{stem}.png"), raster.to_png()?);
        }
        Ok(())
    }

    fn write(mut self, cfg: &RunConfig) -> Result<()> {
        let config: toml::Table =
            toml::from_str(&cfg.to_toml()).map_err(|e| Error::Config(e.to_string()))?;
        self.manifest.insert("config".into(), config.into());
        std::fs::create_dir_all(&cfg.out)?;
        for (name, bytes) in &self.files {
            std::fs::write(cfg.out.join(name), bytes)?;
        }
        let text = toml::to_string(&self.manifest).map_err(|e| Error::Config(e.to_string()))?;
        std::fs::write(cfg.out.join("manifest.toml"), text)?;
        log::info!(
            "wrote {} artifacts to {}",
            self.files.len() + 1,
            cfg.out.display()
        );
        Ok(())
    }
}

fn int(v: usize) -> toml::Value {
    toml::Value::Integer(v as i64)
}

fn cost_table(cost: &CircuitCost) -> toml::Table {
    let mut t = toml::Table::new();
    t.insert("qubits".into(), int(cost.qubits));
    t.insert("one_qubit_gates".into(), int(cost.one_qubit_gates));
    t.insert("two_qubit_gates".into(), int(cost.two_qubit_gates));
    t.insert("parameters".into(), int(cost.parameters));
    t
}

/// Records the built circuit's gate counts and the closed-form IQGAN cost.
fn record_costs(out: &mut Outputs, generator: &GeneratorParams) -> Result<()> {
    let built = gan_circuit_cost(generator)?;
    let mut circuit = cost_table(&built);
    circuit.insert("ansatz".into(), generator.ansatz.name().into());
    out.manifest.insert("circuit".into(), circuit.into());
    let formula = hardware_cost(Scheme::Iqgan, generator.n, generator.blocks)?;
    let mut hw = cost_table(&CircuitCost {
        qubits: formula.qubits,
        one_qubit_gates: formula.one_qubit_gates,
        two_qubit_gates: formula.two_qubit_gates,
        parameters: formula.parameters,
    });
    hw.insert("scheme".into(), formula.scheme.name().into());
    out.manifest.insert("hardware_cost".into(), hw.into());
    Ok(())
}

fn load_samples(cfg: &RunConfig) -> Result<Vec<Sample>> {
    let (images, labels) = cfg.data_paths()?;
    let samples = load_idx(images, labels)?;
    Ok(match cfg.max_per_class {
        None => samples,
        Some(cap) => {
            let mut seen = [0usize; 10];
            samples
                .into_iter()
                .filter(|s| {
                    seen[s.label as usize] += 1;
                    seen[s.label as usize] <= cap
                })
                .collect()
        }
    })
}

fn pixels(samples: &[Sample]) -> Vec<Vec<f64>> {
    samples.iter().map(|s| s.pixels.clone()).collect()
}

/// Images the PCA is fitted on: `pca_classes`, or every sample.
fn reference_pixels(cfg: &RunConfig, samples: &[Sample]) -> Result<Vec<Vec<f64>>> {
    let chosen = if cfg.pca_classes.is_empty() {
        samples.to_vec()
    } else {
        filter_classes(samples, &cfg.pca_classes)
    };
    if chosen.is_empty() {
        return Err(Error::Degenerate("no samples for the PCA fit".into()));
    }
    Ok(pixels(&chosen))
}

fn class_pixels(samples: &[Sample], classes: &[u8]) -> Result<Vec<Vec<f64>>> {
    let chosen = filter_classes(samples, classes);
    if chosen.is_empty() {
        return Err(Error::Degenerate(format!(
            "no samples with labels {classes:?}"
        )));
    }
    Ok(pixels(&chosen))
}

fn project_all(pca: &PcaModel, images: &[Vec<f64>]) -> Result<Vec<Vec<f64>>> {
    images.iter().map(|p| pca.project(p)).collect()
}

/// The configured PCA file, or a fresh fit on the reference images.
fn pca_model(cfg: &RunConfig, samples: &[Sample]) -> Result<PcaModel> {
    match &cfg.pca {
        Some(path) => PcaModel::load(path),
        None => fit_pca(&reference_pixels(cfg, samples)?, cfg.n),
    }
}

fn load_pca_checked(path: &Path, n: usize) -> Result<PcaModel> {
    let pca = PcaModel::load(path)?;
    if pca.k() != n {
        return Err(Error::Config(format!(
            "PCA file {} has {} components but n = {n}",
            path.display(),
            pca.k()
        )));
    }
    Ok(pca)
}

/// How the GAN phase obtains its encoder.
enum EncoderSource {
    Ready(EncoderParams),
    Pretrain,
}

fn encoder_source(cfg: &RunConfig) -> Result<EncoderSource> {
    let n = cfg.n;
    match cfg.encoder_mode()? {
        EncoderMode::Fixed => Ok(EncoderSource::Ready(EncoderParams::fixed(n))),
        EncoderMode::Trainable => {
            if let Some(path) = &cfg.theta_s {
                require_file(path, "encoder file")?;
                let enc = load_encoder(path)?;
                if enc.mode != EncoderMode::Trainable || enc.n() != n {
                    return Err(Error::Config(format!(
                        "encoder file {} holds a {} encoder with {} scales; need trainable with {n}",
                        path.display(),
                        enc.mode,
                        enc.n()
                    )));
                }
                if !enc.pretrained && !cfg.allow_unpretrained {
                    return Err(Error::Config(format!(
                        "encoder file {} is not marked pretrained",
                        path.display()
                    )));
                }
                Ok(EncoderSource::Ready(enc))
            } else if !cfg.pretrain_classes.is_empty() {
                check_pretrain_classes(cfg, &cfg.pretrain_classes)?;
                cfg.pretrain_config()?;
                Ok(EncoderSource::Pretrain)
            } else if cfg.allow_unpretrained {
                Ok(EncoderSource::Ready(EncoderParams::unit(n)))
            } else {
                Err(Error::Config(
                    "the trainable encoder needs pretrained scales: pass theta_s from `iqgan pretrain`, set \
                     pretrain_classes, or set allow_unpretrained"
                        .into(),
                ))
            }
        }
    }
}

fn check_pretrain_classes(cfg: &RunConfig, classes: &[u8]) -> Result<()> {
    RunConfig::check_classes(classes, "pretrain classes")?;
    if classes.len() < 2 {
        return Err(Error::Config(format!(
            "pretraining needs at least 2 classes, got {classes:?}"
        )));
    }
    if cfg.n > MAX_DENSITY_QUBITS {
        return Err(Error::Config(format!(
            "pretraining supports n ≤ {MAX_DENSITY_QUBITS}, got n = {}",
            cfg.n
        )));
    }
    Ok(())
}

fn resolve_encoder(
    source: EncoderSource,
    cfg: &RunConfig,
    samples: &[Sample],
    pca: &PcaModel,
    out: &mut Outputs,
) -> Result<EncoderParams> {
    match source {
        EncoderSource::Ready(enc) => Ok(enc),
        EncoderSource::Pretrain => {
            let classes = cfg
                .pretrain_classes
                .iter()
                .map(|&c| project_all(pca, &class_pixels(samples, &[c])?))
                .collect::<Result<Vec<_>>>()?;
            let result = pretrain_encoder(
                &classes,
                &EncoderParams::unit(cfg.n),
                &cfg.pretrain_config()?,
            )?;
            out.add(
                "pretrain_trace",
                "pretrain_trace.csv",
                trace_csv(&result.trace),
            );
            Ok(result.encoder)
        }
    }
}

/// Checks shared by the data-driven commands, before anything is loaded.
fn validate_data_command(cfg: &RunConfig) -> Result<()> {
    cfg.check_out()?;
    cfg.data_paths()?;
    RunConfig::check_classes(&cfg.classes, "classes")?;
    RunConfig::check_classes(&cfg.pca_classes, "pca classes")?;
    if cfg.classes.is_empty() {
        return Err(Error::Config("no target classes given".into()));
    }
    if cfg.max_per_class == Some(0) {
        return Err(Error::Config("max_per_class must be at least 1".into()));
    }
    if cfg.count == 0 {
        return Err(Error::Config("count must be at least 1".into()));
    }
    if let Some(path) = &cfg.pca {
        require_file(path, "PCA file")?;
        load_pca_checked(path, cfg.n)?;
    }
    Ok(())
}

/// Square side length when `dim` is a perfect square, else a single row.
fn image_shape(dim: usize) -> (usize, usize) {
    let side = (dim as f64).sqrt().round() as usize;
    if side * side == dim {
        (side, side)
    } else {
        (1, dim)
    }
}

/// Decoded generator output: one exact image, or `count` finite-shot ones.
fn generated_images(
    cfg: &RunConfig,
    encoder: &EncoderParams,
    generator: &GeneratorParams,
    pca: &PcaModel,
) -> Result<Vec<Vec<f64>>> {
    let state = build_generator(generator)?.run(None)?;
    let clamp = |img: Vec<f64>| {
        img.into_iter()
            .map(|p| p.clamp(0.0, 1.0))
            .collect::<Vec<_>>()
    };
    match cfg.shots {
        None => Ok(vec![clamp(decode_generated(&state, encoder, pca)?)]),
        Some(shots) => (0..cfg.count as u64)
            .map(|j| {
                decode_sampled(&state, encoder, pca, shots, cfg.seed.wrapping_add(j)).map(clamp)
            })
            .collect(),
    }
}

pub fn cmd_pretrain(cfg: &RunConfig) -> Result<()> {
    let classes = if cfg.pretrain_classes.is_empty() {
        &cfg.classes
    } else {
        &cfg.pretrain_classes
    };
    validate_data_command(cfg)?;
    check_pretrain_classes(cfg, classes)?;
    let pcfg = cfg.pretrain_config()?;
    if cfg.encoder_mode()? != EncoderMode::Trainable {
        return Err(Error::Config(
            "only the trainable encoder is pretrained".into(),
        ));
    }
    let init = match &cfg.theta_s {
        Some(path) => {
            require_file(path, "encoder file")?;
            let enc = load_encoder(path)?;
            if enc.n() != cfg.n {
                return Err(Error::Config(format!(
                    "encoder file has {} scales but n = {}",
                    enc.n(),
                    cfg.n
                )));
            }
            enc
        }
        None => EncoderParams::unit(cfg.n),
    };

    let samples = load_samples(cfg)?;
    let pca = pca_model(cfg, &samples)?;
    let grouped = classes
        .iter()
        .map(|&c| project_all(&pca, &class_pixels(&samples, &[c])?))
        .collect::<Result<Vec<_>>>()?;
    let result = pretrain_encoder(&grouped, &init, &pcfg)?;
    log::info!(
        "separation {:.6} -> {:.6}",
        result.initial_objective,
        result.final_objective
    );

    let mut out = Outputs::new("pretrain", cfg);
    out.add("encoder", "encoder.txt", encoder_to_text(&result.encoder));
    out.add(
        "pretrain_trace",
        "pretrain_trace.csv",
        trace_csv(&result.trace),
    );
    out.add("pca", "pca.txt", pca.to_text());
    let results = out.section("results");
    results.insert("initial_objective".into(), result.initial_objective.into());
    results.insert("final_objective".into(), result.final_objective.into());
    out.write(cfg)
}

pub fn cmd_train(cfg: &RunConfig) -> Result<()> {
    validate_data_command(cfg)?;
    let tcfg = cfg.train_config()?;
    let source = encoder_source(cfg)?;

    let samples = load_samples(cfg)?;
    let pca = pca_model(cfg, &samples)?;
    let target_pixels = class_pixels(&samples, &cfg.classes)?;
    let coords = project_all(&pca, &target_pixels)?;
    let mut out = Outputs::new("train", cfg);
    let encoder = resolve_encoder(source, cfg, &samples, &pca, &mut out)?;
    let outcome = train_gan(&coords, &encoder, &tcfg)?;

    let generated = generated_images(cfg, &outcome.encoder, &outcome.generator, &pca)?;
    let per_row = cfg.count.min(target_pixels.len());
    let mut tiles: Vec<Vec<f64>> = target_pixels[..per_row].to_vec();
    tiles.extend(generated);
    let (rows, cols) = image_shape(pca.dim());
    let grid = image_grid(&tiles, rows, cols, per_row)?;

    out.add("encoder", "encoder.txt", encoder_to_text(&outcome.encoder));
    out.add(
        "generator",
        "generator.txt",
        generator_to_text(&outcome.generator),
    );
    out.add("pca", "pca.txt", pca.to_text());
    out.add("metrics", "metrics.csv", metrics_csv(&outcome.records));
    out.images(cfg, &grid, "samples")?;
    record_costs(&mut out, &outcome.generator)?;
    let results = out.section("results");
    results.insert("final_fidelity".into(), outcome.final_fidelity().into());
    results.insert("samples".into(), int(coords.len()));
    out.write(cfg)
}

pub fn cmd_generate(cfg: &RunConfig) -> Result<()> {
    cfg.check_out()?;
    if cfg.count == 0 {
        return Err(Error::Config("count must be at least 1".into()));
    }
    let path = |explicit: &Option<PathBuf>, file: &str, what: &str| -> Result<PathBuf> {
        let p = cfg.artifact(explicit, file).ok_or_else(|| {
            Error::Config(format!(
                "no {what} given (set it or point `run` at a training output)"
            ))
        })?;
        require_file(&p, what)?;
        Ok(p)
    };
    let encoder = load_encoder(path(&cfg.theta_s, "encoder.txt", "encoder file")?)?;
    let generator = load_generator(path(&cfg.theta_g, "generator.txt", "generator file")?)?;
    let pca = PcaModel::load(path(&cfg.pca, "pca.txt", "PCA file")?)?;
    if encoder.n() != generator.n || pca.k() != generator.n {
        return Err(Error::Format(format!(
            "artifacts disagree on n: encoder {}, generator {}, PCA {}",
            encoder.n(),
            generator.n,
            pca.k()
        )));
    }

    let images = generated_images(cfg, &encoder, &generator, &pca)?;
    let (rows, cols) = image_shape(pca.dim());
    let grid = image_grid(&images, rows, cols, images.len())?;
    let mut out = Outputs::new("generate", cfg);
    out.images(cfg, &grid, "generated")?;
    out.section("results")
        .insert("images".into(), int(images.len()));
    out.write(cfg)
}

pub fn cmd_cost(scheme: Scheme, n: usize, b: usize, csv: bool) -> Result<String> {
    let r = hardware_cost(scheme, n, b).map_err(as_config)?;
    Ok(if csv {
        format!("qubits,1qg,2qg,params\n{}\n", r.csv_row())
    } else {
        format!(
            "{:<8} {:>6} {:>8} {:>8} {:>6}\n{:<8} {:>6} {:>8} {:>8} {:>6}\n",
            "scheme",
            "qubits",
            "1q-gates",
            "2q-gates",
            "params",
            r.scheme.name(),
            r.qubits,
            r.one_qubit_gates,
            r.two_qubit_gates,
            r.parameters
        )
    })
}

pub fn cmd_ablate(cfg: &RunConfig) -> Result<()> {
    validate_data_command(cfg)?;
    let tcfg = cfg.train_config()?;
    let ansatzes = cfg.ablation_ansatz()?;
    let mut distinct = ansatzes.clone();
    distinct.sort_by_key(|a| a.name());
    distinct.dedup();
    if distinct.len() < 2 || distinct.len() != ansatzes.len() {
        return Err(Error::Config(
            "ablation needs at least 2 distinct ansatz kinds".into(),
        ));
    }
    if cfg.ablation_seeds.len() < 3 {
        return Err(Error::Config("ablation needs at least 3 seeds".into()));
    }
    let source = encoder_source(cfg)?;

    let samples = load_samples(cfg)?;
    let pca = pca_model(cfg, &samples)?;
    let coords = project_all(&pca, &class_pixels(&samples, &cfg.classes)?)?;
    let mut out = Outputs::new("ablate", cfg);
    let encoder = resolve_encoder(source, cfg, &samples, &pca, &mut out)?;
    let rows = ablation_run(&coords, &encoder, &tcfg, &ansatzes, &cfg.ablation_seeds)?;

    let mut csv = format!("{ABLATION_HEADER}\n");
    for r in &rows {
        csv.push_str(&r.csv_row());
        csv.push('\n');
    }
    out.add("ablation", "ablation.csv", csv);
    out.add("encoder", "encoder.txt", encoder_to_text(&encoder));
    out.write(cfg)
}

pub fn cmd_noise_sweep(cfg: &RunConfig) -> Result<()> {
    validate_data_command(cfg)?;
    let tcfg = cfg.train_config()?;
    let scfg = cfg.sweep_config()?;
    if cfg.pca.is_some() {
        return Err(Error::Config(
            "the noise sweep fits its own PCA per input size; remove `pca`".into(),
        ));
    }

    let samples = load_samples(cfg)?;
    let reference = reference_pixels(cfg, &samples)?;
    let target = class_pixels(&samples, &cfg.classes)?;
    let rows = noise_sweep(&reference, &target, &scfg, &tcfg)?;

    let mut csv = format!("{SWEEP_HEADER}\n");
    for r in &rows {
        csv.push_str(&r.csv_row());
        csv.push('\n');
    }
    let mut out = Outputs::new("noise-sweep", cfg);
    out.add("sweep", "sweep.csv", csv);
    out.write(cfg)
}
