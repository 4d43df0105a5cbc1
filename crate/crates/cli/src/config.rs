//! Scenario files: TOML or JSON, optionally layered over a built-in preset.

use std::path::Path;

use ftfreq_core::{presets, Scenario};
use serde_json::Value;

use crate::error::{CliError, Result};

/// Preset used as the base when a file names none.
pub const DEFAULT_PRESET: &str = "ref-proposed";

/// Reads, resolves and validates a scenario file. Files ending in `.json`
/// are JSON; anything else is TOML.
pub fn load(path: &Path) -> Result<Scenario> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    let is_json = path
        .extension()
        .is_some_and(|e| e.eq_ignore_ascii_case("json"));
    let doc: Value = if is_json {
        serde_json::from_str(&text).map_err(|e| parse_error(path, e))?
    } else {
        toml::from_str(&text).map_err(|e| parse_error(path, e))?
    };
    let sc = resolve(doc).map_err(|msg| CliError::Parse {
        path: path.into(),
        msg,
    })?;
    sc.validate()?;
    Ok(sc)
}

fn parse_error(path: &Path, e: impl std::fmt::Display) -> CliError {
    CliError::Parse {
        path: path.into(),
        msg: e.to_string(),
    }
}

/// Overlays `doc` on the preset it names (or [`DEFAULT_PRESET`]).
pub fn resolve(mut doc: Value) -> std::result::Result<Scenario, String> {
    let obj = doc
        .as_object_mut()
        .ok_or_else(|| "scenario must be a table/object".to_string())?;
    let name = match obj.remove("preset") {
        None => DEFAULT_PRESET.to_string(),
        Some(Value::String(s)) => s,
        Some(other) => return Err(format!("`preset` must be a string, got {other}")),
    };
    let base =
        presets::named(&name).ok_or_else(|| CliError::UnknownPreset(name.clone()).to_string())?;
    let mut merged = serde_json::to_value(&base).map_err(|e| e.to_string())?;
    merge(&mut merged, doc);
    serde_json::from_value(merged).map_err(|e| e.to_string())
}

/// Recursive overlay: tables merge key by key, everything else replaces.
fn merge(base: &mut Value, over: Value) {
    match (base, over) {
        (Value::Object(b), Value::Object(o)) => {
            for (k, v) in o {
                match b.get_mut(&k) {
                    Some(slot) => merge(slot, v),
                    None => {
                        b.insert(k, v);
                    }
                }
            }
        }
        (slot, v) => *slot = v,
    }
}
