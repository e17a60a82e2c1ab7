//! Experiment config files.
//!
//! ```json
//! {"model": {"kind": "block-ar1", "phi": 0.9, "sigma2": 1.0,
//!            "block_length": 10, "num_blocks": 100},
//!  "length": 1000, "replicates": 50, "base_seed": 1,
//!  "variant": "moav", "comparison": "stationary-ar1-no-blocks"}
//! ```
//!
//! `length` may be omitted when the model fixes it. Defaults: 50 replicates,
//! seed 0, `moav`, comparison `none`.

use avlab::experiments::{Comparison, ExperimentConfig, DEFAULT_REPLICATES};
use avlab::processes::ProcessModel;
use avlab::Variant;
use serde_json::{Map, Value};

use crate::error::{CliError, CliResult};

const TOP_KEYS: &[&str] = &[
    "model",
    "length",
    "replicates",
    "base_seed",
    "variant",
    "comparison",
];

fn model_keys(kind: &str) -> Option<&'static [&'static str]> {
    Some(match kind {
        "ns-white-noise" => &["kind", "variances"],
        "white-noise" => &["kind", "sigma2"],
        "bias-instability" => &["kind", "sigma2", "block_length", "num_blocks"],
        "block-ar1" => &["kind", "phi", "sigma2", "block_length", "num_blocks"],
        "ar1" => &["kind", "phi", "sigma2"],
        _ => return None,
    })
}

struct Problems(Vec<(String, String)>);

impl Problems {
    fn push(&mut self, key: impl Into<String>, why: impl Into<String>) {
        self.0.push((key.into(), why.into()));
    }
}

fn uint(obj: &Map<String, Value>, key: &str, problems: &mut Problems) -> Option<u64> {
    let v = obj.get(key)?;
    match v.as_u64() {
        Some(u) => Some(u),
        None => {
            problems.push(key, format!("expected a non-negative integer, got {v}"));
            None
        }
    }
}

fn enum_value<T: serde::de::DeserializeOwned>(
    obj: &Map<String, Value>,
    key: &str,
    problems: &mut Problems,
) -> Option<T> {
    let v = obj.get(key)?;
    match serde_json::from_value(v.clone()) {
        Ok(t) => Some(t),
        Err(e) => {
            problems.push(key, e.to_string());
            None
        }
    }
}

fn parse_model(v: &Value, problems: &mut Problems) -> Option<ProcessModel> {
    let Some(obj) = v.as_object() else {
        problems.push("model", "expected an object");
        return None;
    };
    let Some(kind) = obj.get("kind").and_then(Value::as_str) else {
        problems.push("model.kind", "missing or not a string");
        return None;
    };
    let Some(allowed) = model_keys(kind) else {
        problems.push("model.kind", format!("unknown model `{kind}`"));
        return None;
    };
    let before = problems.0.len();
    for key in obj.keys().filter(|k| !allowed.contains(&k.as_str())) {
        problems.push(
            format!("model.{key}"),
            format!("not a parameter of `{kind}`"),
        );
    }
    let model = serde_json::from_value::<ProcessModel>(v.clone());
    match model {
        Ok(m) if problems.0.len() == before => Some(m),
        Ok(_) => None,
        Err(e) => {
            problems.push("model", e.to_string());
            None
        }
    }
}

/// Builds a validated config from a parsed JSON value. Every offending key
/// is reported, not only the first.
pub fn config_from_value(value: &Value) -> CliResult<ExperimentConfig> {
    let Some(obj) = value.as_object() else {
        return Err(CliError::Config("config must be a JSON object".into()));
    };
    let mut problems = Problems(Vec::new());
    for key in obj.keys().filter(|k| !TOP_KEYS.contains(&k.as_str())) {
        problems.push(key.clone(), "unknown key");
    }

    let model = match obj.get("model") {
        Some(v) => parse_model(v, &mut problems),
        None => {
            problems.push("model", "missing");
            None
        }
    };
    let length = uint(obj, "length", &mut problems).map(|u| u as usize);
    let replicates = uint(obj, "replicates", &mut problems).map(|u| u as usize);
    if replicates == Some(0) {
        problems.push("replicates", "must be at least 1");
    }
    let base_seed = uint(obj, "base_seed", &mut problems);
    let variant: Option<Variant> = enum_value(obj, "variant", &mut problems);
    let comparison: Option<Comparison> = enum_value(obj, "comparison", &mut problems);

    let length = match (&model, length) {
        (_, Some(len)) => Some(len),
        (Some(m), None) => match m.fixed_len() {
            Some(len) => Some(len),
            None => {
                problems.push("length", "missing, and the model does not fix it");
                None
            }
        },
        (None, None) => None,
    };

    if !problems.0.is_empty() {
        return Err(config_error(&problems));
    }
    let cfg = ExperimentConfig {
        model: model.expect("no problems reported"),
        length: length.expect("no problems reported"),
        replicates: replicates.unwrap_or(DEFAULT_REPLICATES),
        base_seed: base_seed.unwrap_or(0),
        variant: variant.unwrap_or(Variant::Moav),
        comparison: comparison.unwrap_or(Comparison::None),
    };
    cfg.validate()
        .map_err(|e| CliError::Config(format!("invalid config: {e}")))?;
    Ok(cfg)
}

fn config_error(problems: &Problems) -> CliError {
    let keys: Vec<&str> = problems.0.iter().map(|(k, _)| k.as_str()).collect();
    let mut msg = format!("invalid config; offending keys: {}", keys.join(", "));
    for (k, why) in &problems.0 {
        msg.push_str(&format!("\n  {k}: {why}"));
    }
    CliError::Config(msg)
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    fn message(v: Value) -> String {
        match config_from_value(&v).unwrap_err() {
            CliError::Config(m) => m,
            other => panic!("expected a configuration error, got {other:?}"),
        }
    }

    #[test]
    fn full_config_round_trips() {
        let cfg = config_from_value(&json!({
            "model": {"kind": "block-ar1", "phi": 0.9, "sigma2": 1.0,
                      "block_length": 10, "num_blocks": 100},
            "length": 1000, "replicates": 20, "base_seed": 1,
            "variant": "noav", "comparison": "stationary-ar1-no-blocks"
        }))
        .unwrap();
        assert_eq!(cfg.length, 1000);
        assert_eq!(cfg.replicates, 20);
        assert_eq!(cfg.variant, Variant::Noav);
        let back = config_from_value(&serde_json::to_value(&cfg).unwrap()).unwrap();
        assert_eq!(back, cfg);
    }

    #[test]
    fn defaults_and_implied_length() {
        let cfg = config_from_value(&json!({
            "model": {"kind": "bias-instability", "sigma2": 1.0,
                      "block_length": 10, "num_blocks": 25}
        }))
        .unwrap();
        assert_eq!(cfg.length, 250);
        assert_eq!(cfg.replicates, DEFAULT_REPLICATES);
        assert_eq!(cfg.base_seed, 0);
        assert_eq!(cfg.comparison, Comparison::None);
    }

    #[test]
    fn lists_every_offending_key() {
        let m = message(json!({
            "model": {"kind": "ar1", "phi": 0.5, "sigma2": 1.0, "blocks": 3},
            "length": -4, "replicates": 0, "variant": "both", "colour": "red"
        }));
        for key in ["model.blocks", "length", "replicates", "variant", "colour"] {
            assert!(m.contains(key), "`{key}` missing from: {m}");
        }
    }

    #[test]
    fn missing_model_and_length() {
        let m = message(json!({"replicates": 3}));
        assert!(m.contains("model"), "{m}");
        let m = message(json!({"model": {"kind": "white-noise", "sigma2": 1.0}}));
        assert!(m.contains("length"), "{m}");
        let m = message(json!({"model": {"kind": "pink-noise"}, "length": 10}));
        assert!(m.contains("model.kind"), "{m}");
    }

    #[test]
    fn semantic_checks_are_configuration_errors() {
        let m = message(json!({
            "model": {"kind": "white-noise", "sigma2": 1.0},
            "length": 100, "comparison": "stationary-ar1-no-blocks"
        }));
        assert!(m.contains("invalid config"), "{m}");
        let m =
            message(json!({"model": {"kind": "ar1", "phi": 1.5, "sigma2": 1.0}, "length": 100}));
        assert!(m.contains("phi"), "{m}");
    }
}
