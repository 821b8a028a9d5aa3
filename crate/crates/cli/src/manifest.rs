use std::time::Instant;

use serde::Serialize;
use sha2::{Digest, Sha256};

#[derive(Clone, Debug, Serialize)]
pub struct InputHash {
    pub path: String,
    pub sha256: String,
}

/// Provenance block attached to every output.
#[derive(Clone, Debug, Serialize)]
pub struct RunManifest {
    pub subcommand: String,
    pub argv: Vec<String>,
    pub seed: Option<u64>,
    pub version: &'static str,
    pub inputs: Vec<InputHash>,
    pub wall_time_ms: u64,
}

pub struct ManifestBuilder {
    subcommand: String,
    argv: Vec<String>,
    seed: Option<u64>,
    inputs: Vec<InputHash>,
    started: Instant,
}

impl ManifestBuilder {
    pub fn new(subcommand: &str, argv: Vec<String>) -> Self {
        Self {
            subcommand: subcommand.to_string(),
            argv,
            seed: None,
            inputs: Vec::new(),
            started: Instant::now(),
        }
    }

    pub fn seed(&mut self, seed: u64) {
        self.seed = Some(seed);
    }

    pub fn input(&mut self, path: &str, bytes: &[u8]) {
        let digest = Sha256::digest(bytes);
        self.inputs.push(InputHash {
            path: path.to_string(),
            sha256: digest.iter().map(|b| format!("{b:02x}")).collect(),
        });
    }

    pub fn finish(self) -> RunManifest {
        RunManifest {
            subcommand: self.subcommand,
            argv: self.argv,
            seed: self.seed,
            version: env!("CARGO_PKG_VERSION"),
            inputs: self.inputs,
            wall_time_ms: self.started.elapsed().as_millis() as u64,
        }
    }
}
