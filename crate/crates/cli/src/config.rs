//! Optional TOML config: top-level keys are flag names and act as
//! defaults that explicit command-line flags override.

use std::path::Path;

use anyhow::{bail, Context, Result};

/// Removes `--config PATH` (or `--config=PATH`) from `args` and splices
/// the file's keys in as flags right after the subcommand words.
pub fn expand(mut args: Vec<String>) -> Result<Vec<String>> {
    let Some(pos) = args.iter().position(|a| a == "--config" || a.starts_with("--config=")) else {
        return Ok(args);
    };
    let path = if let Some(p) = args[pos].strip_prefix("--config=") {
        let p = p.to_string();
        args.remove(pos);
        p
    } else {
        if pos + 1 >= args.len() {
            bail!("--config needs a path");
        }
        let p = args.remove(pos + 1);
        args.remove(pos);
        p
    };
    let flags = load(Path::new(&path))?;
    // Subcommand words: `game` takes a second one.
    let mut at = 1;
    if args.get(1).is_some_and(|a| !a.starts_with('-')) {
        at = 2;
        if args[1] == "game" && args.get(2).is_some_and(|a| !a.starts_with('-')) {
            at = 3;
        }
    }
    let at = at.min(args.len());
    args.splice(at..at, flags);
    Ok(args)
}

fn load(path: &Path) -> Result<Vec<String>> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading config {}", path.display()))?;
    let table: toml::Table = text.parse().with_context(|| format!("parsing config {}", path.display()))?;
    let mut out = Vec::new();
    for (key, value) in table {
        let flag = format!("--{}", key.replace('_', "-"));
        match value {
            toml::Value::Boolean(true) => out.push(flag),
            toml::Value::Boolean(false) => {}
            toml::Value::String(s) => out.extend([flag, s]),
            toml::Value::Integer(i) => out.extend([flag, i.to_string()]),
            toml::Value::Float(f) => out.extend([flag, f.to_string()]),
            other => bail!("config key `{key}` has unsupported value {other}"),
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn strs(v: &[&str]) -> Vec<String> {
        v.iter().map(|s| s.to_string()).collect()
    }

    #[test]
    fn splices_after_subcommands() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("c.toml");
        std::fs::write(&p, "seed = 7\nworkers = 2\nallow_unpromised = true\n").unwrap();
        let args = strs(&["qfa", "game", "memory", "--config", p.to_str().unwrap(), "--q", "3"]);
        let out = expand(args).unwrap();
        assert_eq!(&out[..3], &strs(&["qfa", "game", "memory"])[..]);
        assert!(out.windows(2).any(|w| w == ["--seed", "7"]));
        assert!(out.contains(&"--allow-unpromised".to_string()));
        assert_eq!(out.last().unwrap(), "3");
    }

    #[test]
    fn no_config_is_identity() {
        let args = strs(&["qfa", "verify", "all"]);
        assert_eq!(expand(args.clone()).unwrap(), args);
    }
}
