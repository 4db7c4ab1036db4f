// Copyright 2026 The splitauth Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;
use std::time::Duration;

use thiserror::Error;

use crate::crypto::SplitMode;

pub const DEFAULT_FETCH_TIMEOUT: Duration = Duration::from_millis(2000);

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Role {
    Gateway,
    ShareServer,
}

impl FromStr for Role {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "gateway" => Ok(Role::Gateway),
            "shareserver" => Ok(Role::ShareServer),
            other => Err(format!(
                "unknown role '{other}' (expected gateway or shareserver)"
            )),
        }
    }
}

impl fmt::Display for Role {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Role::Gateway => "gateway",
            Role::ShareServer => "shareserver",
        })
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ConfigError {
    #[error("gateway share count {n} must equal 1 + {peers} peers")]
    ShareCountMismatch { n: usize, peers: usize },
    #[error("{n} shares is not supported in {mode} mode")]
    UnsupportedShareCount { n: usize, mode: SplitMode },
    #[error("share servers take no peers")]
    ShareServerPeers,
}

#[derive(Debug, Clone)]
pub struct NodeConfig {
    pub role: Role,
    /// `host:port`; port 0 picks an ephemeral port.
    pub listen: String,
    /// Share servers holding indices 2..=n, in index order. Gateway only.
    pub peers: Vec<String>,
    pub split_mode: SplitMode,
    pub n: usize,
    pub store_path: PathBuf,
    pub fetch_timeout: Duration,
    /// Seeds the gateway's randomness instead of the OS source. Test and demo
    /// use only.
    pub seed: Option<u64>,
}

impl NodeConfig {
    pub fn gateway(
        listen: impl Into<String>,
        peers: Vec<String>,
        split_mode: SplitMode,
        store_path: impl Into<PathBuf>,
    ) -> Self {
        Self {
            role: Role::Gateway,
            listen: listen.into(),
            n: peers.len() + 1,
            peers,
            split_mode,
            store_path: store_path.into(),
            fetch_timeout: DEFAULT_FETCH_TIMEOUT,
            seed: None,
        }
    }

    pub fn share_server(listen: impl Into<String>, store_path: impl Into<PathBuf>) -> Self {
        Self {
            role: Role::ShareServer,
            listen: listen.into(),
            peers: Vec::new(),
            split_mode: SplitMode::default(),
            n: 1,
            store_path: store_path.into(),
            fetch_timeout: DEFAULT_FETCH_TIMEOUT,
            seed: None,
        }
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        match self.role {
            Role::Gateway => {
                if self.n != self.peers.len() + 1 {
                    return Err(ConfigError::ShareCountMismatch {
                        n: self.n,
                        peers: self.peers.len(),
                    });
                }
                if !self.split_mode.supports(self.n) {
                    return Err(ConfigError::UnsupportedShareCount {
                        n: self.n,
                        mode: self.split_mode,
                    });
                }
            }
            Role::ShareServer => {
                if !self.peers.is_empty() {
                    return Err(ConfigError::ShareServerPeers);
                }
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gateway_counts_itself() {
        let cfg = NodeConfig::gateway(
            "127.0.0.1:0",
            vec!["127.0.0.1:1".into()],
            SplitMode::Segment,
            "g.jsonl",
        );
        assert_eq!(cfg.n, 2);
        assert!(cfg.validate().is_ok());
        let mut bad = cfg.clone();
        bad.n = 3;
        assert!(bad.validate().is_err());
    }

    #[test]
    fn segment_limit() {
        let peers = (0..32).map(|i| format!("127.0.0.1:{}", 1000 + i)).collect();
        let cfg = NodeConfig::gateway("127.0.0.1:0", peers, SplitMode::Segment, "g.jsonl");
        assert_eq!(
            cfg.validate(),
            Err(ConfigError::UnsupportedShareCount {
                n: 33,
                mode: SplitMode::Segment
            })
        );
    }

    #[test]
    fn share_server_has_no_peers() {
        let mut cfg = NodeConfig::share_server("127.0.0.1:0", "s.jsonl");
        assert!(cfg.validate().is_ok());
        cfg.peers.push("127.0.0.1:1".into());
        assert_eq!(cfg.validate(), Err(ConfigError::ShareServerPeers));
    }

    #[test]
    fn role_parse() {
        assert_eq!("gateway".parse::<Role>().unwrap(), Role::Gateway);
        assert_eq!("shareserver".parse::<Role>().unwrap(), Role::ShareServer);
        assert!("Gateway".parse::<Role>().is_err());
    }
}
