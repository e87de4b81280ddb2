use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Duration;

use nonbloch::{load_model, Error, ModelFile};
use serde_json::{json, Value};

use crate::{constants, Cli, Command};

/// Round-trip safe: 17 significant digits.
pub fn csv_field(x: f64) -> String {
    if x == 0.0 {
        // Avoid "-0" noise in diffs.
        return "0".to_string();
    }
    if x.is_finite() {
        format!("{x:.16e}")
    } else {
        x.to_string()
    }
}

/// CSV text with `\n` line endings.
pub struct Grid {
    text: String,
}

impl Grid {
    pub fn new(header: &[&str]) -> Self {
        Self::with_header(header.iter().map(|s| s.to_string()).collect())
    }

    pub fn with_header(header: Vec<String>) -> Self {
        let mut text = header.join(",");
        text.push('\n');
        Self { text }
    }

    pub fn row<I: IntoIterator<Item = String>>(&mut self, fields: I) {
        let fields: Vec<String> = fields.into_iter().collect();
        self.text.push_str(&fields.join(","));
        self.text.push('\n');
    }

    pub fn finish(self) -> String {
        self.text
    }
}

pub fn write_output(path: Option<&Path>, text: &str) -> Result<(), Error> {
    match path {
        Some(p) => std::fs::write(p, text).map_err(|e| Error::domain(format!("cannot write {}: {e}", p.display()))),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes()).and_then(|_| out.flush()).map_err(|e| Error::domain(format!("stdout: {e}")))
        }
    }
}

pub struct Manifest {
    value: Value,
}

impl Manifest {
    pub fn default_path(out: &Path) -> PathBuf {
        let mut s = out.as_os_str().to_owned();
        s.push(".manifest.json");
        PathBuf::from(s)
    }

    pub fn new(cli: &Cli, wall: Duration) -> Self {
        let model = model_path(&cli.command).and_then(|p| load_model(p).ok()).map(|f| ModelFile::from_family(&f));
        let threads = rayon::current_num_threads();
        let value = json!({
            "tool": env!("CARGO_PKG_NAME"),
            "version": env!("CARGO_PKG_VERSION"),
            "command": cli.command,
            "threads": cli.threads,
            "threads_in_use": threads,
            "model": model,
            "constants": constants(),
            "wall_time_s": wall.as_secs_f64(),
        });
        Self { value }
    }

    pub fn write(&self, path: &Path) -> Result<(), Error> {
        let text = serde_json::to_string_pretty(&self.value).expect("manifest serializes") + "\n";
        std::fs::write(path, text).map_err(|e| Error::domain(format!("cannot write {}: {e}", path.display())))
    }
}

fn model_path(cmd: &Command) -> Option<&Path> {
    Some(match cmd {
        Command::Spectrum(a) => &a.io.model,
        Command::Gbz(a) => &a.io.model,
        Command::Saddles(a) => &a.io.model,
        Command::Threshold(a) => &a.io.model,
        Command::Boundary(a) => &a.io.model,
        Command::PhaseDiagram(a) => &a.io.model,
        Command::Dos(a) => &a.io.model,
        Command::Duality(_) => return None,
    })
}
