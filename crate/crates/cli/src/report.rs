use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::time::Instant;

use sha2::{Digest, Sha256};

/// What a command did, written as JSON with `--report`. Everything except
/// `elapsed_ms` is a function of the inputs.
pub struct RunReport {
    command: &'static str,
    started: Instant,
    model_digest: Option<String>,
    fields: BTreeMap<String, String>,
    outputs: Vec<PathBuf>,
}

pub fn digest(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

impl RunReport {
    pub fn new(command: &'static str) -> Self {
        Self {
            command,
            started: Instant::now(),
            model_digest: None,
            fields: BTreeMap::new(),
            outputs: Vec::new(),
        }
    }

    pub fn model(&mut self, bytes: &[u8]) {
        self.model_digest = Some(digest(bytes));
    }

    pub fn set(&mut self, key: &str, value: impl ToString) {
        self.fields.insert(key.to_string(), value.to_string());
    }

    pub fn output(&mut self, path: &Path) {
        self.outputs.push(path.to_path_buf());
    }

    fn to_json(&self) -> String {
        let quote = |s: &str| {
            let mut out = String::from("\"");
            for c in s.chars() {
                match c {
                    '"' => out.push_str("\\\""),
                    '\\' => out.push_str("\\\\"),
                    '\n' => out.push_str("\\n"),
                    c if (c as u32) < 0x20 => out.push_str(&format!("\\u{:04x}", c as u32)),
                    c => out.push(c),
                }
            }
            out.push('"');
            out
        };
        let mut parts = vec![format!("\"command\": {}", quote(self.command))];
        if let Some(d) = &self.model_digest {
            parts.push(format!("\"model_sha256\": {}", quote(d)));
        }
        let fields: Vec<String> = self
            .fields
            .iter()
            .map(|(k, v)| format!("{}: {}", quote(k), quote(v)))
            .collect();
        parts.push(format!("\"results\": {{{}}}", fields.join(", ")));
        let outs: Vec<String> = self
            .outputs
            .iter()
            .map(|p| quote(&p.display().to_string()))
            .collect();
        parts.push(format!("\"outputs\": [{}]", outs.join(", ")));
        parts.push(format!(
            "\"elapsed_ms\": {}",
            self.started.elapsed().as_millis()
        ));
        format!("{{{}}}\n", parts.join(", "))
    }

    pub fn finish(&self, path: Option<&Path>) -> std::io::Result<()> {
        match path {
            Some(p) => std::fs::write(p, self.to_json()),
            None => Ok(()),
        }
    }
}
