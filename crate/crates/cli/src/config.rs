//! `--config file.toml`: top-level keys are flag names (with `-` or `_`),
//! spliced in right after the subcommand so that flags given on the command
//! line override them.

use std::ffi::OsString;
use std::path::PathBuf;

use toml::Value;

use crate::Failure;

const NESTED: &[&str] = &["rates"];

/// Returns `args` with the config file's flags inserted, or `args` unchanged
/// when no `--config` is present.
pub fn merge(args: Vec<OsString>) -> Result<Vec<OsString>, Failure> {
    let Some(path) = find_config(&args) else {
        return Ok(args);
    };
    let text = std::fs::read_to_string(&path)
        .map_err(|e| Failure::Usage(format!("cannot read config {}: {e}", path.display())))?;
    let table: toml::Table =
        text.parse().map_err(|e| Failure::Usage(format!("invalid config {}: {e}", path.display())))?;
    let mut flags = Vec::new();
    for (key, value) in table {
        let flag = format!("--{}", key.replace('_', "-"));
        if flag == "--config" {
            continue;
        }
        match value {
            Value::Boolean(true) => flags.push(OsString::from(flag)),
            Value::Boolean(false) => {}
            Value::Array(items) => {
                let parts = items.iter().map(scalar).collect::<Result<Vec<_>, _>>()?;
                flags.push(flag.into());
                flags.push(parts.join(",").into());
            }
            other => {
                flags.push(flag.into());
                flags.push(scalar(&other)?.into());
            }
        }
    }
    let at = subcommand_end(&args);
    let mut merged = args[..at].to_vec();
    merged.extend(flags);
    merged.extend_from_slice(&args[at..]);
    Ok(merged)
}

fn scalar(v: &Value) -> Result<String, Failure> {
    match v {
        Value::String(s) => Ok(s.clone()),
        Value::Integer(i) => Ok(i.to_string()),
        Value::Float(f) => Ok(crate::output::num(*f)),
        Value::Boolean(b) => Ok(b.to_string()),
        other => Err(Failure::Usage(format!("unsupported config value {other}"))),
    }
}

fn find_config(args: &[OsString]) -> Option<PathBuf> {
    let mut it = args.iter().skip(1);
    while let Some(a) = it.next() {
        let a = a.to_string_lossy();
        if a == "--config" {
            return it.next().map(PathBuf::from);
        }
        if let Some(p) = a.strip_prefix("--config=") {
            return Some(PathBuf::from(p));
        }
    }
    None
}

/// Index just past the subcommand path (`curve`, or `rates ion`).
fn subcommand_end(args: &[OsString]) -> usize {
    let mut i = 1;
    let mut skip_value = false;
    while i < args.len() {
        let a = args[i].to_string_lossy();
        if skip_value {
            skip_value = false;
        } else if a == "--config" || a == "--output" || a == "-o" || a == "--format" {
            skip_value = true;
        } else if !a.starts_with('-') {
            if NESTED.contains(&a.as_ref()) && i + 1 < args.len() && !args[i + 1].to_string_lossy().starts_with('-') {
                return i + 2;
            }
            return i + 1;
        }
        i += 1;
    }
    args.len()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn os(v: &[&str]) -> Vec<OsString> {
        v.iter().map(OsString::from).collect()
    }

    #[test]
    fn finds_subcommand_end() {
        assert_eq!(subcommand_end(&os(&["p", "curve", "--n", "3"])), 2);
        assert_eq!(subcommand_end(&os(&["p", "--config", "c.toml", "rates", "ion", "--se", "1"])), 5);
        assert_eq!(subcommand_end(&os(&["p", "--format", "json", "fit"])), 4);
    }

    #[test]
    fn splices_flags_before_user_flags() {
        let dir = std::env::temp_dir().join(format!("patchnoise-config-{}", std::process::id()));
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("c.toml");
        std::fs::write(&path, "zeta = 1e-6\nnormalized = true\nheights = [1e-7, 2e-7]\n").unwrap();
        let args = os(&["p", "curve", "--config", path.to_str().unwrap(), "--n", "5"]);
        let merged: Vec<String> = merge(args).unwrap().into_iter().map(|s| s.into_string().unwrap()).collect();
        assert_eq!(merged[..2], ["p", "curve"]);
        assert!(merged.contains(&"--normalized".to_string()));
        assert!(merged.contains(&"1e-7,2e-7".to_string()));
        let zeta = merged.iter().position(|a| a == "--zeta").unwrap();
        let n = merged.iter().position(|a| a == "--n").unwrap();
        assert!(zeta < n);
    }
}
