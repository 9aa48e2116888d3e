use crate::args::SUBCOMMANDS;
use crate::error::CliError;
use serde_json::{Map, Value};
use std::fs;

/// Flag value of `--name` in either `--name v` or `--name=v` form.
fn find_flag(argv: &[String], name: &str) -> Option<String> {
    let long = format!("--{name}");
    let eq = format!("--{name}=");
    let mut it = argv.iter();
    while let Some(a) = it.next() {
        if *a == long {
            return it.next().cloned();
        }
        if let Some(v) = a.strip_prefix(&eq) {
            return Some(v.to_string());
        }
    }
    None
}

fn flag_name(key: &str) -> String {
    if key.len() == 1 && key.chars().all(|c| c.is_ascii_uppercase()) {
        key.to_string()
    } else {
        key.replace('_', "-")
    }
}

fn scalar(key: &str, v: &Value) -> Result<String, CliError> {
    match v {
        Value::String(s) => Ok(s.clone()),
        Value::Number(n) => Ok(n.to_string()),
        _ => Err(CliError::Usage(format!(
            "config key '{key}': expected a string or number in list"
        ))),
    }
}

/// Flags equivalent to a flat config object, in key order, leaving out
/// those in `given`.
pub fn config_flags(obj: &Map<String, Value>, given: &[String]) -> Result<Vec<String>, CliError> {
    let mut out = Vec::new();
    for (k, v) in obj {
        let flag = format!("--{}", flag_name(k));
        if k == "config" || given.contains(&flag) {
            continue;
        }
        match v {
            Value::Null | Value::Bool(false) => {}
            Value::Bool(true) => out.push(flag),
            Value::Array(items) => {
                let parts = items.iter().map(|x| scalar(k, x)).collect::<Result<Vec<_>, _>>()?;
                out.push(flag);
                out.push(parts.join(","));
            }
            Value::Object(_) => {
                return Err(CliError::Usage(format!(
                    "config key '{k}': nested objects are not allowed"
                )))
            }
            other => {
                out.push(flag);
                out.push(scalar(k, other)?);
            }
        }
    }
    Ok(out)
}

/// Splice the flags of `--config FILE` in right after the subcommand, so
/// that flags given explicitly come later and override them. A run manifest
/// is accepted as a config: its `config` member is used.
pub fn expand(argv: Vec<String>) -> Result<(Vec<String>, Option<Value>), CliError> {
    let Some(path) = find_flag(&argv[1..], "config") else {
        return Ok((argv, None));
    };
    let text = fs::read_to_string(&path).map_err(|e| CliError::Usage(format!("config {path}: {e}")))?;
    let value: Value = serde_json::from_str(&text).map_err(|e| CliError::Usage(format!("config {path}: {e}")))?;
    let obj = match &value {
        Value::Object(o) => match o.get("config") {
            Some(Value::Object(inner)) => inner.clone(),
            _ => o.clone(),
        },
        _ => return Err(CliError::Usage(format!("config {path}: expected a JSON object"))),
    };
    let Some(pos) = argv.iter().skip(1).position(|a| SUBCOMMANDS.contains(&a.as_str())) else {
        return Ok((argv, Some(Value::Object(obj))));
    };
    let idx = pos + 1;
    let given: Vec<String> = argv[1..]
        .iter()
        .filter(|a| a.starts_with("--"))
        .map(|a| a.split('=').next().unwrap_or(a).to_string())
        .collect();
    let flags = config_flags(&obj, &given)?;
    let mut out = argv[..=idx].to_vec();
    out.extend(flags);
    out.extend_from_slice(&argv[idx + 1..]);
    Ok((out, Some(Value::Object(obj))))
}
