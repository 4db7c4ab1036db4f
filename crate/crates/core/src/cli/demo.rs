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

//! A whole deployment inside one process.

use std::io::{BufRead, Write};
use std::net::SocketAddr;
use std::time::Duration;

use anyhow::Context;
use rand::rngs::OsRng;
use rand::RngCore;
use tempfile::TempDir;

use super::repl::{repl, ReplOptions, TcpExchange};
use crate::crypto::SplitMode;
use crate::node::{Node, NodeConfig, NodeHandle};
use crate::rng;

/// `n - 1` share servers and a gateway on loopback, with stores in a
/// temporary directory that disappears on drop.
pub struct DemoCluster {
    gateway: NodeHandle,
    peers: Vec<NodeHandle>,
    dir: TempDir,
}

impl DemoCluster {
    pub fn start(n: usize, mode: SplitMode, seed: Option<u64>) -> anyhow::Result<Self> {
        anyhow::ensure!(
            mode.supports(n),
            "{n} shares is not supported in {mode} mode"
        );
        let dir = tempfile::tempdir().context("creating store directory")?;
        let mut peers = Vec::with_capacity(n - 1);
        for i in 2..=n {
            let config =
                NodeConfig::share_server("127.0.0.1:0", dir.path().join(format!("share{i}.jsonl")));
            peers.push(Node::bind(config)?.spawn()?);
        }
        let addrs = peers.iter().map(|p| p.addr().to_string()).collect();
        let mut config =
            NodeConfig::gateway("127.0.0.1:0", addrs, mode, dir.path().join("gateway.jsonl"));
        config.seed = seed;
        let gateway = Node::bind(config)?.spawn()?;
        Ok(Self {
            gateway,
            peers,
            dir,
        })
    }

    pub fn gateway_addr(&self) -> SocketAddr {
        self.gateway.addr()
    }

    pub fn peer_addrs(&self) -> Vec<SocketAddr> {
        self.peers.iter().map(NodeHandle::addr).collect()
    }

    pub fn store_dir(&self) -> &std::path::Path {
        self.dir.path()
    }
}

/// Starts a cluster and runs the interactive client against it. With a seed,
/// both gateway and client randomness are reproducible.
pub fn demo<R: BufRead, W: Write>(
    n: usize,
    mode: SplitMode,
    seed: Option<u64>,
    input: R,
    output: &mut W,
    options: ReplOptions,
) -> anyhow::Result<i32> {
    let cluster = DemoCluster::start(n, mode, seed)?;
    let mut link =
        TcpExchange::connect(&cluster.gateway_addr().to_string(), Duration::from_secs(2))
            .context("connecting to demo gateway")?;
    let mut seeded;
    let mut os = OsRng;
    let client: &mut dyn RngCore = match seed {
        Some(s) => {
            seeded = rng::client_rng(s);
            &mut seeded
        }
        None => &mut os,
    };
    Ok(repl(input, output, &mut link, client, options)?)
}
