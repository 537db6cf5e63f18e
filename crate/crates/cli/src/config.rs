//! `key = value` run files, merged underneath whatever was given on the command line.

use std::ffi::OsString;

use clap::error::ErrorKind;
use clap::{ArgAction, Command};

/// Parses the body of a run file. Blank lines, `#` comments and `[section]` headers are skipped.
pub fn parse(text: &str) -> Result<Vec<(String, String)>, String> {
    let mut out = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') || line.starts_with('[') {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| format!("line {}: expected key = value", i + 1))?;
        let key = k.trim().replace('_', "-");
        if key.is_empty() {
            return Err(format!("line {}: empty key", i + 1));
        }
        let mut val = v.trim();
        if val.len() >= 2 && val.starts_with('"') && val.ends_with('"') {
            val = &val[1..val.len() - 1];
        }
        out.push((key, val.to_string()));
    }
    Ok(out)
}

fn config_path(args: &[String]) -> Option<String> {
    let mut it = args.iter();
    while let Some(a) = it.next() {
        if a == "--config" {
            return it.next().cloned();
        }
        if let Some(p) = a.strip_prefix("--config=") {
            return Some(p.to_string());
        }
    }
    None
}

fn given(args: &[String], long: &str) -> bool {
    let flag = format!("--{long}");
    let prefix = format!("--{long}=");
    args.iter().any(|a| *a == flag || a.starts_with(&prefix))
}

/// Appends every run-file setting whose flag is absent from `argv`.
pub fn merge(argv: Vec<OsString>, cmd: &Command) -> Result<Vec<OsString>, clap::Error> {
    let args: Vec<String> = argv
        .iter()
        .map(|a| a.to_string_lossy().into_owned())
        .collect();
    let Some(path) = config_path(&args[1..]) else {
        return Ok(argv);
    };
    let mut cmd = cmd.clone();
    let text = std::fs::read_to_string(&path)
        .map_err(|e| cmd.error(ErrorKind::Io, format!("cannot read config {path}: {e}")))?;
    let entries = parse(&text).map_err(|e| cmd.error(ErrorKind::InvalidValue, format!("{path}: {e}")))?;

    let sub = args[1..]
        .iter()
        .find_map(|a| cmd.find_subcommand(a).cloned());
    let mut out = argv;
    for (key, val) in entries {
        let arg = cmd
            .get_arguments()
            .chain(sub.iter().flat_map(|s| s.get_arguments()))
            .find(|a| a.get_long() == Some(key.as_str()) && key != "config")
            .cloned();
        let Some(arg) = arg else {
            return Err(cmd.error(ErrorKind::UnknownArgument, format!("unknown config key {key:?} in {path}")));
        };
        if given(&args, &key) {
            continue;
        }
        match arg.get_action() {
            ArgAction::SetTrue => {
                let on = match val.as_str() {
                    "true" | "1" | "yes" => true,
                    "false" | "0" | "no" => false,
                    _ => {
                        return Err(cmd.error(
                            ErrorKind::InvalidValue,
                            format!("config key {key:?} expects true or false"),
                        ))
                    }
                };
                if on {
                    out.push(format!("--{key}").into());
                }
            }
            _ => {
                out.push(format!("--{key}").into());
                out.push(val.into());
            }
        }
    }
    Ok(out)
}
