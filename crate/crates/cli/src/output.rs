use std::io::Write;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use infocorr::{Error, Result};

/// Everything needed to rerun a command, embedded in its output.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub command: String,
    /// Arguments after the program name, verbatim.
    pub args: Vec<String>,
    pub version: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub scenario: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub prior: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub g_grid: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub alpha_grid: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mode: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub level: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub filter: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    pub outputs: Vec<PathBuf>,
}

impl RunManifest {
    pub fn new(command: &str, args: &[String]) -> Self {
        Self {
            command: command.to_string(),
            args: args.to_vec(),
            version: env!("CARGO_PKG_VERSION").to_string(),
            ..Default::default()
        }
    }

    /// Single comment line for text and CSV outputs.
    pub fn comment(&self) -> String {
        format!("# manifest {}\n", serde_json::to_string(self).expect("manifest serializes"))
    }

    /// Finds the manifest in a JSON output or in a `# manifest` line.
    pub fn extract(text: &str) -> Result<Self> {
        if let Some(line) = text.lines().find_map(|l| l.strip_prefix("# manifest ")) {
            return Ok(serde_json::from_str(line)?);
        }
        let v: serde_json::Value = serde_json::from_str(text)?;
        let m = v.get("manifest").ok_or_else(|| Error::Parse("no manifest in file".into()))?;
        Ok(serde_json::from_value(m.clone())?)
    }
}

/// Writes to a sibling temporary file and renames it into place, or prints
/// to stdout without a path.
pub fn emit(path: Option<&Path>, body: &str) -> Result<()> {
    match path {
        None => {
            std::io::stdout().write_all(body.as_bytes())?;
            Ok(())
        }
        Some(p) => {
            let mut tmp = p.as_os_str().to_owned();
            tmp.push(".partial");
            let tmp = PathBuf::from(tmp);
            std::fs::write(&tmp, body)?;
            std::fs::rename(&tmp, p)?;
            Ok(())
        }
    }
}

pub fn csv_body<T: Serialize>(manifest: &RunManifest, rows: &[T]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in rows {
        w.serialize(r).map_err(|e| Error::Parse(format!("csv: {e}")))?;
    }
    let data = w.into_inner().map_err(|e| Error::Parse(format!("csv: {e}")))?;
    Ok(manifest.comment() + &String::from_utf8(data).expect("csv is utf-8"))
}

pub fn json_body<T: Serialize>(manifest: &RunManifest, result: &T) -> Result<String> {
    let mut v = serde_json::to_value(result)?;
    if let serde_json::Value::Object(m) = &mut v {
        m.insert("manifest".into(), serde_json::to_value(manifest)?);
    }
    Ok(serde_json::to_string_pretty(&v)? + "\n")
}
