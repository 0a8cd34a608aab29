//! Output envelopes: every JSON document and CSV file carries the tool
//! version, the RNG seed and the resolved run spec.

use std::fs;
use std::io::{self, Write};
use std::path::Path;

use serde::Serialize;

use crate::spec::RunSpec;

pub const TOOL: &str = "linkforge";
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Serialize)]
struct Envelope<'a, T: Serialize> {
    tool: &'static str,
    version: &'static str,
    seed: u64,
    spec: &'a RunSpec,
    result: &'a T,
}

pub fn json<T: Serialize>(spec: &RunSpec, result: &T) -> io::Result<String> {
    let env = Envelope { tool: TOOL, version: VERSION, seed: spec.seed(), spec, result };
    let mut text = serde_json::to_string_pretty(&env)?;
    text.push('\n');
    Ok(text)
}

/// CSV with `#` comment lines naming version, seed and spec.
pub fn csv<R: Serialize>(spec: &RunSpec, rows: &[R]) -> io::Result<String> {
    let mut out = format!(
        "# {TOOL} {VERSION}\n# seed: {}\n# spec: {}\n",
        spec.seed(),
        serde_json::to_string(spec)?
    );
    let mut w = csv::Writer::from_writer(Vec::new());
    for row in rows {
        w.serialize(row).map_err(io::Error::other)?;
    }
    let body = w.into_inner().map_err(|e| io::Error::other(e.to_string()))?;
    out.push_str(&String::from_utf8(body).map_err(io::Error::other)?);
    Ok(out)
}

/// Write to `path`, or stdout when there is none.
pub fn emit(path: Option<&Path>, text: &str) -> io::Result<()> {
    match path {
        Some(p) => {
            if let Some(dir) = p.parent().filter(|d| !d.as_os_str().is_empty()) {
                fs::create_dir_all(dir)?;
            }
            fs::write(p, text)
        }
        // a closed reader (`| head`) is not an error
        None => match io::stdout().lock().write_all(text.as_bytes()) {
            Err(e) if e.kind() == io::ErrorKind::BrokenPipe => Ok(()),
            other => other,
        },
    }
}
