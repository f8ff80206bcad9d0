//! Run settings from the environment and the manifest embedded in JSON
//! outputs.

use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::calkin::{Window, WindowConfig};
use crate::error::{Error, Result};
use crate::findim::FindimConfig;
use crate::graph::XiChoice;
use crate::tower::TowerConfig;

pub const SCHEMA: &str = "wck/1";

/// Tolerances and seed, from `WCK_TOL` (`norm[,rank]`) and `WCK_SEED`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Settings {
    pub norm_tol: f64,
    pub rank_tol: f64,
    pub seed: u64,
}

impl Default for Settings {
    fn default() -> Self {
        Settings {
            norm_tol: 1e-9,
            rank_tol: 1e-8,
            seed: 0,
        }
    }
}

impl Settings {
    /// Parses `norm[,rank]`.
    pub fn parse_tol(text: &str) -> Result<(f64, Option<f64>)> {
        let mut parts = text.split(',').map(str::trim);
        let parse = |s: &str| -> Result<f64> {
            let v: f64 = s
                .parse()
                .map_err(|_| Error::Parse(format!("bad tolerance `{s}`")))?;
            if v > 0.0 && v < 1.0 {
                Ok(v)
            } else {
                Err(Error::Parse(format!("tolerance {v} outside (0, 1)")))
            }
        };
        let norm = parse(parts.next().unwrap_or(""))?;
        let rank = parts.next().map(parse).transpose()?;
        if parts.next().is_some() {
            return Err(Error::Parse(format!("too many fields in tolerance `{text}`")));
        }
        Ok((norm, rank))
    }

    /// Environment values overridden by explicit ones.
    pub fn resolve(tol: Option<&str>, seed: Option<u64>) -> Result<Settings> {
        let mut s = Settings::default();
        let env_tol = std::env::var("WCK_TOL").ok();
        if let Some(t) = tol.or(env_tol.as_deref()) {
            let (n, r) = Settings::parse_tol(t)?;
            s.norm_tol = n;
            if let Some(r) = r {
                s.rank_tol = r;
            }
        }
        s.seed = match seed {
            Some(v) => v,
            None => match std::env::var("WCK_SEED") {
                Ok(v) => v
                    .trim()
                    .parse()
                    .map_err(|_| Error::Parse(format!("bad WCK_SEED `{v}`")))?,
                Err(_) => 0,
            },
        };
        Ok(s)
    }

    pub fn tower_config(&self, stages: usize, xi: XiChoice) -> TowerConfig {
        TowerConfig {
            stages,
            xi,
            base_shift: 0,
            window: WindowConfig {
                norm_tol: self.norm_tol,
                rank_tol: self.rank_tol,
                ..Default::default()
            },
            findim: FindimConfig {
                rank_tol: self.rank_tol,
                ..Default::default()
            },
            seed: self.seed,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct InputDigest {
    pub path: String,
    pub sha256: String,
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes)
        .iter()
        .map(|b| format!("{b:02x}"))
        .collect()
}

/// Provenance of one run. No wall-clock fields, so equal inputs give
/// byte-identical output.
#[derive(Clone, Debug, Serialize)]
pub struct RunManifest {
    pub schema: &'static str,
    pub tool_version: &'static str,
    pub command: String,
    pub inputs: Vec<InputDigest>,
    pub settings: Settings,
    pub window: Option<Window>,
    pub xi: Vec<String>,
}

impl RunManifest {
    pub fn new(command: &str, settings: Settings) -> Self {
        RunManifest {
            schema: SCHEMA,
            tool_version: env!("CARGO_PKG_VERSION"),
            command: command.to_string(),
            inputs: Vec::new(),
            settings,
            window: None,
            xi: Vec::new(),
        }
    }

    pub fn add_input(&mut self, path: &str, bytes: &[u8]) {
        self.inputs.push(InputDigest {
            path: path.to_string(),
            sha256: sha256_hex(bytes),
        });
    }

    /// `{"manifest": …, "result": …}` as pretty JSON.
    pub fn wrap<T: Serialize>(&self, result: &T) -> String {
        #[derive(Serialize)]
        struct Out<'a, T> {
            manifest: &'a RunManifest,
            result: &'a T,
        }
        serde_json::to_string_pretty(&Out {
            manifest: self,
            result,
        })
        .expect("serializable output")
    }
}
