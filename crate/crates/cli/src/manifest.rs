use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use flashcap::KeyValues;

/// Flat key-value record of one run: enough to repeat it exactly.
pub struct RunManifest {
    pub command: &'static str,
    pub config: KeyValues,
    pub seed: Option<u64>,
    pub outputs: Vec<(&'static str, PathBuf)>,
}

impl RunManifest {
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "command = {}", self.command);
        let _ = writeln!(out, "version = {}", env!("CARGO_PKG_VERSION"));
        match self.seed {
            Some(s) => {
                let _ = writeln!(out, "seed = {s}");
            }
            None => out.push_str("seed = none\n"),
        }
        for (name, path) in &self.outputs {
            let _ = writeln!(out, "output.{name} = {}", path.display());
        }
        for (k, v) in self.config.iter() {
            let _ = writeln!(out, "config.{k} = {v}");
        }
        out
    }

    /// Where the manifest goes when no explicit path was given: next to the
    /// first output file, or nowhere (stderr) when the run wrote none.
    pub fn default_path(&self) -> Option<PathBuf> {
        self.outputs.first().map(|(_, p)| sibling(p))
    }
}

fn sibling(p: &Path) -> PathBuf {
    let mut name = p.file_name().map(|n| n.to_os_string()).unwrap_or_default();
    name.push(".manifest");
    p.with_file_name(name)
}
