use std::fmt::Write as _;
use std::path::Path;

use avlab::estimators::{empirical_spectrum, noav_dropped};
use avlab::experiments::{run_experiment, summarize, Comparison, ExperimentResult, Preset};
use avlab::processes::{exact_kernel, simulate, ProcessModel};
use avlab::theory::{stationary_spectrum, theoretical_spectrum, DenseOracle, ORACLE_MAX_LEN};
use avlab::{AvError, TimeSeries, Variant};

use crate::args::{
    CheckArgs, EstimateArgs, ExperimentArgs, ModelArgs, ModelKind, SimulateArgs, TheoryArgs,
    TheoryMode,
};
use crate::config::config_from_value;
use crate::csvio::{emit, fmt_opt, fmt_real, read_column, series_csv, spectrum_csv};
use crate::error::{CliError, CliResult};
use crate::manifest::{sha256_hex, unix_now, RunManifest, MANIFEST_FILE, MANIFEST_VERSION};

fn need<T>(v: Option<T>, flag: &str, model: &str) -> CliResult<T> {
    v.ok_or_else(|| CliError::Usage(format!("--{flag} is required for --model {model}")))
}

/// Resolves model flags into a model and its series length.
pub fn build_model(a: &ModelArgs) -> CliResult<(ProcessModel, usize)> {
    if a.variance_file.is_some() && a.model != ModelKind::NsWhiteNoise {
        return Err(CliError::Usage(
            "--variance-file applies to --model ns-white-noise only".into(),
        ));
    }
    let model = match a.model {
        ModelKind::NsWhiteNoise => {
            let variances = a
                .variance_file
                .as_deref()
                .map(|p| read_column(p, "variance"))
                .transpose()?;
            ProcessModel::NsWhiteNoise { variances }
        }
        ModelKind::WhiteNoise => ProcessModel::WhiteNoise { sigma2: a.sigma2 },
        ModelKind::BiasInstability => ProcessModel::BiasInstability {
            sigma2: a.sigma2,
            block_length: need(a.block_length, "block-length", "bias-instability")?,
            num_blocks: need(a.blocks, "blocks", "bias-instability")?,
        },
        ModelKind::BlockAr1 => ProcessModel::BlockAr1 {
            phi: need(a.phi, "phi", "block-ar1")?,
            sigma2: a.sigma2,
            block_length: need(a.block_length, "block-length", "block-ar1")?,
            num_blocks: need(a.blocks, "blocks", "block-ar1")?,
        },
        ModelKind::Ar1 => ProcessModel::StationaryAr1 {
            phi: need(a.phi, "phi", "ar1")?,
            sigma2: a.sigma2,
        },
    };
    let len = match (model.fixed_len(), a.len) {
        (_, Some(len)) => len,
        (Some(len), None) => len,
        (None, None) => {
            return Err(CliError::Usage(format!(
                "--T is required for --model {}",
                model.name()
            )))
        }
    };
    model.validate(len)?;
    Ok((model, len))
}

pub fn simulate_cmd(a: &SimulateArgs) -> CliResult<()> {
    let (model, len) = build_model(&a.model)?;
    let x = simulate(&model, len, a.seed)?;
    emit(a.out.as_deref(), &series_csv(&x))
}

pub fn estimate_cmd(a: &EstimateArgs) -> CliResult<()> {
    let values = read_column(&a.input, "x")?;
    let x = TimeSeries::new(values).map_err(|e| match e {
        AvError::InvalidLength { .. } | AvError::NonFinite { .. } => CliError::Data(e.to_string()),
        other => other.into(),
    })?;
    let variant: Variant = a.variant.into();
    let spectrum = empirical_spectrum(&x, variant)?;
    if variant == Variant::Noav {
        for n in spectrum.windows() {
            let dropped = noav_dropped(x.len(), n);
            if dropped > 0 {
                eprintln!("n = {n}: {dropped} trailing observations dropped");
            }
        }
    }
    emit(a.out.as_deref(), &spectrum_csv(&spectrum))
}

pub fn theory_cmd(a: &TheoryArgs) -> CliResult<()> {
    let (model, len) = build_model(&a.model)?;
    let spectrum = match a.mode {
        TheoryMode::Stationary => {
            let acvf = model.stationary_acvf().ok_or_else(|| {
                CliError::Config(format!(
                    "--mode stationary needs a stationary model, `{}` is not",
                    model.name()
                ))
            })?;
            stationary_spectrum(&acvf, len)?
        }
        TheoryMode::NsMoav | TheoryMode::NsNoav => {
            let variant = if a.mode == TheoryMode::NsMoav {
                Variant::Moav
            } else {
                Variant::Noav
            };
            theoretical_spectrum(&exact_kernel(&model, len)?, len, variant)?
        }
    };
    emit(a.out.as_deref(), &spectrum_csv(&spectrum))
}

/// Outcome of `check`: whether every scale stayed within tolerance.
pub fn check_cmd(a: &CheckArgs) -> CliResult<bool> {
    let (model, len) = build_model(&a.model)?;
    if len > ORACLE_MAX_LEN {
        return Err(CliError::Resource(format!(
            "check builds a dense {len}×{len} covariance; the cap is T = {ORACLE_MAX_LEN}"
        )));
    }
    let variant: Variant = a.variant.into();
    let kernel = exact_kernel(&model, len)?;
    let lemma = theoretical_spectrum(&kernel, len, variant)?;
    let oracle = DenseOracle::new(&kernel, len)?;

    let mut out = String::from("n,lemma,oracle,abs_diff\n");
    let mut worst = 0.0_f64;
    for e in lemma.entries() {
        let o = oracle.allan_variance(e.n, variant)?;
        let diff = (e.av - o).abs();
        worst = worst.max(diff);
        let _ = writeln!(
            out,
            "{},{},{},{}",
            e.n,
            fmt_real(e.av),
            fmt_real(o),
            fmt_real(diff)
        );
    }
    emit(a.out.as_deref(), &out)?;
    let ok = worst <= a.tol;
    eprintln!(
        "max abs diff {worst:e} {} tolerance {:e}",
        if ok { "within" } else { "exceeds" },
        a.tol
    );
    Ok(ok)
}

fn load_config(path: &Path) -> CliResult<avlab::experiments::ExperimentConfig> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
    let value: serde_json::Value = serde_json::from_str(&text)
        .map_err(|e| CliError::Config(format!("{}: not valid JSON: {e}", path.display())))?;
    if value.get("manifest_version").is_some() {
        let config = value
            .get("config")
            .ok_or_else(|| CliError::Config("manifest has no `config` entry".into()))?;
        return config_from_value(config);
    }
    config_from_value(&value)
}

fn is_ours(name: &str) -> bool {
    const FIXED: &[&str] = &[
        "theory_ns.csv",
        "comparison.csv",
        "empirical_mean.csv",
        "summary.csv",
        "ar1_fits.csv",
        MANIFEST_FILE,
    ];
    if FIXED.contains(&name) {
        return true;
    }
    name.strip_prefix("rep_")
        .and_then(|s| s.strip_suffix(".csv"))
        .is_some_and(|d| d.len() >= 4 && d.bytes().all(|b| b.is_ascii_digit()))
}

/// Removes files left by an earlier run so the directory holds one manifest
/// and only the files it lists.
fn prepare_dir(dir: &Path) -> CliResult<()> {
    std::fs::create_dir_all(dir).map_err(|e| CliError::write(dir, e))?;
    let entries = std::fs::read_dir(dir).map_err(|e| CliError::write(dir, e))?;
    for entry in entries.flatten() {
        let name = entry.file_name();
        if name.to_str().is_some_and(is_ours) && entry.path().is_file() {
            std::fs::remove_file(entry.path()).map_err(|e| CliError::write(&entry.path(), e))?;
        }
    }
    Ok(())
}

fn data_files(res: &ExperimentResult) -> Vec<(String, String)> {
    let mut files = Vec::new();
    for (r, s) in res.replicates.iter().enumerate() {
        files.push((format!("rep_{r:04}.csv"), spectrum_csv(s)));
    }
    files.push(("theory_ns.csv".into(), spectrum_csv(&res.theory)));
    if let Some(c) = &res.comparison {
        files.push(("comparison.csv".into(), spectrum_csv(c)));
    }

    let rows = summarize(res);
    let mut mean = String::from("n,av\n");
    let mut summary = String::from("n,theory_ns,comparison,emp_mean,emp_sd,emp_se,rel_gap\n");
    for row in &rows {
        let _ = writeln!(mean, "{},{}", row.n, fmt_real(row.emp_mean));
        let _ = writeln!(
            summary,
            "{},{},{},{},{},{},{}",
            row.n,
            fmt_real(row.theory_ns),
            fmt_opt(row.comparison),
            fmt_real(row.emp_mean),
            fmt_opt(row.emp_sd),
            fmt_opt(row.emp_se),
            fmt_opt(row.rel_gap),
        );
    }
    files.push(("empirical_mean.csv".into(), mean));
    files.push(("summary.csv".into(), summary));

    if res.config.comparison == Comparison::FittedAr1 {
        let mut fits = String::from("replicate,seed,phi,sigma2,log_likelihood,at_boundary\n");
        for (r, fit) in res.fits.iter().enumerate() {
            let seed = res.config.replicate_seed(r);
            match fit {
                Some(f) => {
                    let _ = writeln!(
                        fits,
                        "{r},{seed},{},{},{},{}",
                        fmt_real(f.phi),
                        fmt_real(f.sigma2),
                        fmt_real(f.log_likelihood),
                        f.at_boundary
                    );
                }
                None => {
                    let _ = writeln!(fits, "{r},{seed},,,,");
                }
            }
        }
        files.push(("ar1_fits.csv".into(), fits));
    }
    files
}

pub fn experiment_cmd(a: &ExperimentArgs, argv: &[String]) -> CliResult<()> {
    let started = unix_now();
    let mut cfg = match (&a.preset, &a.config) {
        (Some(name), None) => Preset::from_name(name)
            .ok_or_else(|| {
                CliError::Usage(format!(
                    "unknown preset `{name}` (expected fig1, fig2 or fig3)"
                ))
            })?
            .config(0),
        (None, Some(path)) => load_config(path)?,
        _ => {
            return Err(CliError::Usage(
                "give exactly one of --preset and --config".into(),
            ))
        }
    };
    if let Some(seed) = a.seed {
        cfg.base_seed = seed;
    }
    if let Some(r) = a.replicates {
        cfg.replicates = r;
    }
    cfg.validate()?;

    let result = run_experiment(&cfg)?;
    for (r, e) in &result.fit_failures {
        eprintln!("replicate {r}: AR(1) fit failed: {e}");
    }

    prepare_dir(&a.out)?;
    let mut outputs = std::collections::BTreeMap::new();
    for (name, contents) in data_files(&result) {
        let path = a.out.join(&name);
        std::fs::write(&path, &contents).map_err(|e| CliError::write(&path, e))?;
        outputs.insert(name, sha256_hex(contents.as_bytes()));
    }
    let manifest = RunManifest {
        manifest_version: MANIFEST_VERSION,
        tool: "avlab".into(),
        version: env!("CARGO_PKG_VERSION").into(),
        command: "experiment".into(),
        args: argv.to_vec(),
        base_seed: cfg.base_seed,
        config: cfg,
        started_unix: started,
        finished_unix: unix_now(),
        outputs,
    };
    manifest.write(&a.out)?;
    eprintln!(
        "wrote {} data files and {MANIFEST_FILE} to {}",
        manifest.outputs.len(),
        a.out.display()
    );
    Ok(())
}
