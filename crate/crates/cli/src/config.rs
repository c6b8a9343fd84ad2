//! Layered configuration: defaults, then a JSON file, then flags. The
//! resolved configuration is written next to the outputs.

use std::fs;
use std::path::{Path, PathBuf};

use serde::de::DeserializeOwned;
use serde::Serialize;
use serde_json::{Map, Value};

use fracvar::csvio::write_signals;
use fracvar::SampledSignal;

use crate::error::{config, CliResult};

pub const OUT_DIR_ENV: &str = "FRACVAR_OUT_DIR";

/// Merges `file` (if any) and `flags` into a `T`. Relative paths listed in
/// `path_keys` are taken relative to the file's directory when they come
/// from the file.
pub fn resolve<T: DeserializeOwned, F: Serialize>(
    file: Option<&Path>,
    path_keys: &[&str],
    flags: &F,
) -> CliResult<T> {
    let mut merged = Map::new();
    if let Some(path) = file {
        let text = fs::read_to_string(path)
            .map_err(|e| config(format!("cannot read config file {}: {e}", path.display())))?;
        let value: Value = serde_json::from_str(&text)
            .map_err(|e| config(format!("invalid JSON in {}: {e}", path.display())))?;
        let Value::Object(mut obj) = value else {
            return Err(config(format!("{} must hold a JSON object", path.display())));
        };
        let base = path.parent().unwrap_or(Path::new(""));
        for key in path_keys {
            if let Some(Value::String(s)) = obj.get(*key) {
                if Path::new(s).is_relative() {
                    let joined = base.join(s).to_string_lossy().into_owned();
                    obj.insert(key.to_string(), Value::String(joined));
                }
            }
        }
        merged = obj;
    }
    let Value::Object(overrides) = serde_json::to_value(flags).map_err(config)? else {
        unreachable!("flag structs serialize to objects");
    };
    for (k, v) in overrides {
        if !v.is_null() {
            merged.insert(k, v);
        }
    }
    if !merged.contains_key("out") {
        let dir = std::env::var(OUT_DIR_ENV).unwrap_or_else(|_| "out".to_string());
        merged.insert("out".into(), Value::String(dir));
    }
    serde_json::from_value(Value::Object(merged)).map_err(|e| config(format!("invalid configuration: {e}")))
}

pub fn require<T: Clone>(value: &Option<T>, key: &str) -> CliResult<T> {
    value
        .clone()
        .ok_or_else(|| config(format!("missing setting `{key}` (give it as a flag or in the config file)")))
}

/// Output directory with helpers that write deterministic artifacts.
pub struct Outputs {
    dir: PathBuf,
}

impl Outputs {
    pub fn create(dir: &Path) -> CliResult<Self> {
        fs::create_dir_all(dir)
            .map_err(|e| config(format!("cannot create output directory {}: {e}", dir.display())))?;
        Ok(Outputs { dir: dir.to_path_buf() })
    }

    fn path(&self, name: &str) -> PathBuf {
        self.dir.join(name)
    }

    pub fn json<T: Serialize>(&self, name: &str, value: &T) -> CliResult<()> {
        let mut text = serde_json::to_string_pretty(value).map_err(config)?;
        text.push('\n');
        self.text(name, &text)
    }

    pub fn text(&self, name: &str, text: &str) -> CliResult<()> {
        let p = self.path(name);
        fs::write(&p, text).map_err(|e| config(format!("cannot write {}: {e}", p.display())))
    }

    pub fn signals(&self, name: &str, columns: &[(&str, &SampledSignal)]) -> CliResult<()> {
        let mut buf = Vec::new();
        write_signals(&mut buf, columns).map_err(config)?;
        self.text(name, &String::from_utf8(buf).expect("csv output is UTF-8"))
    }

    /// Writes `columns` as a headed CSV of plain numbers.
    pub fn table(&self, name: &str, header: &[&str], rows: &[Vec<f64>]) -> CliResult<()> {
        let mut text = header.join(",");
        text.push('\n');
        for row in rows {
            let cells: Vec<String> = row
                .iter()
                .map(|&x| if x.is_nan() { String::new() } else { fracvar::csvio::format_number(x) })
                .collect();
            text.push_str(&cells.join(","));
            text.push('\n');
        }
        self.text(name, &text)
    }

    pub fn file(&self, name: &str) -> PathBuf {
        self.path(name)
    }
}

/// Reads a signal CSV, naming the path in any error.
pub fn read_csv(path: &Path) -> CliResult<(fracvar::Grid, Vec<String>, Vec<SampledSignal>)> {
    let file = fs::File::open(path).map_err(|e| config(format!("cannot open {}: {e}", path.display())))?;
    fracvar::csvio::read_signals(file).map_err(|e| config(format!("{}: {e}", path.display())))
}
