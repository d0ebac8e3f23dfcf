//! Run manifests: the exact invocation, its resolved configuration and a
//! digest of the output it produced.

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

/// Resolved settings of a run; absent fields did not apply.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub m: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub p: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub alpha: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub n: Option<u32>,
    pub starts: usize,
    pub seed: u64,
    pub sweep_tol: f64,
    pub max_sweeps: usize,
    pub format: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub command: String,
    /// Arguments after the program name; replaying them reproduces the output.
    pub args: Vec<String>,
    pub config: RunConfig,
    pub version: String,
    pub output_sha256: String,
}

impl RunManifest {
    pub fn new(command: &str, args: Vec<String>, config: RunConfig, output: &str) -> Self {
        RunManifest {
            command: command.to_string(),
            args,
            config,
            version: env!("CARGO_PKG_VERSION").to_string(),
            output_sha256: sha256_hex(output.as_bytes()),
        }
    }

    pub fn matches(&self, output: &str) -> bool {
        self.output_sha256 == sha256_hex(output.as_bytes())
    }
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn digest_is_standard_sha256() {
        assert_eq!(sha256_hex(b"abc"), "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
    }

    #[test]
    fn matches_only_identical_output() {
        let m = RunManifest::new("bound", vec!["bound".into()], RunConfig::default(), "1.0\n");
        assert!(m.matches("1.0\n"));
        assert!(!m.matches("1.0"));
        let json = serde_json::to_string(&m).unwrap();
        assert_eq!(serde_json::from_str::<RunManifest>(&json).unwrap(), m);
    }
}
