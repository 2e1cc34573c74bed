use std::collections::BTreeSet;
use std::path::Path;

use serde::de::DeserializeOwned;
use serde::Serialize;
use serde_json::{Map, Value};

use crate::CliError;

fn object(value: Value, what: &str) -> Result<Map<String, Value>, CliError> {
    match value {
        Value::Object(m) => Ok(m),
        _ => Err(CliError::Config(format!("{what} must be a JSON object"))),
    }
}

/// Overlays the flags given on the command line onto the keys of a JSON config file. Keys
/// unknown to the subcommand are rejected.
pub fn merge<T: Serialize + DeserializeOwned>(cli: &T, file: Option<&Path>) -> Result<T, CliError> {
    let Some(path) = file else { return Ok(serde_json::from_value(serde_json::to_value(cli)?)?) };
    let text = std::fs::read_to_string(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    let from_file = object(serde_json::from_str(&text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?, "config")?;
    let flags = object(serde_json::to_value(cli)?, "arguments")?;
    let known: BTreeSet<&String> = flags.keys().collect();
    if let Some(k) = from_file.keys().find(|k| !known.contains(k)) {
        return Err(CliError::Config(format!("unknown key `{k}` in {}", path.display())));
    }
    let mut merged = from_file.clone();
    for (k, v) in flags {
        if !v.is_null() {
            merged.insert(k, v);
        }
    }
    serde_json::from_value(Value::Object(merged)).map_err(|e| CliError::Config(e.to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde::Deserialize;

    #[derive(Debug, Default, PartialEq, Serialize, Deserialize)]
    struct Args {
        a: Option<f64>,
        b: Option<String>,
        flag: Option<bool>,
    }

    #[test]
    fn flags_override_file() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("c.json");
        std::fs::write(&path, r#"{"a": 1.5, "b": "file", "flag": true}"#).unwrap();
        let cli = Args { a: None, b: Some("cli".into()), flag: Some(false) };
        let m = merge(&cli, Some(&path)).unwrap();
        assert_eq!(m, Args { a: Some(1.5), b: Some("cli".into()), flag: Some(false) });
    }

    #[test]
    fn unknown_keys_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("c.json");
        std::fs::write(&path, r#"{"c": 1}"#).unwrap();
        assert!(matches!(merge(&Args::default(), Some(&path)), Err(CliError::Config(_))));
    }
}
