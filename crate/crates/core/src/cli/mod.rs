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

//! Command-line front end: interactive client, node runner, in-process demo
//! and the attack lab.

pub mod attacklab;
pub mod demo;
pub mod repl;

use std::io::{self, IsTerminal};
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Duration;

use anyhow::Context;
use clap::{Parser, Subcommand};
use rand::rngs::OsRng;

pub use attacklab::{attacklab, load_dictionary};
pub use demo::{demo, DemoCluster};
pub use repl::{repl, Exchange, ExchangeError, ReplOptions, SimExchange, TcpExchange};

use crate::crypto::SplitMode;
use crate::node::{run_node, NodeConfig, Role, DEFAULT_FETCH_TIMEOUT};

#[derive(Debug, Parser)]
#[command(
    name = "splitauth",
    version,
    about = "Password authentication with the verifier split across servers"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Interactive client against a running gateway.
    Client {
        #[arg(long, value_name = "HOST:PORT")]
        gateway: String,
    },
    /// Run a gateway or share server.
    Serve {
        #[arg(long)]
        role: Role,
        #[arg(long, value_name = "HOST:PORT")]
        listen: String,
        /// Share server address, repeated in share index order. Gateway only.
        #[arg(long = "peer", value_name = "HOST:PORT")]
        peers: Vec<String>,
        #[arg(long, default_value = "segment")]
        mode: SplitMode,
        #[arg(long, value_name = "PATH")]
        store: PathBuf,
        #[arg(long, default_value_t = DEFAULT_FETCH_TIMEOUT.as_millis() as u64)]
        timeout_ms: u64,
    },
    /// Start a loopback cluster in this process and open the client on it.
    Demo {
        #[arg(long, default_value_t = 2)]
        n: usize,
        #[arg(long, default_value = "segment")]
        mode: SplitMode,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Run every adversary against simulated deployments and print the table.
    Attacklab {
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, value_name = "PATH")]
        dict: PathBuf,
        #[arg(long, value_name = "PATH")]
        csv: Option<PathBuf>,
    },
}

fn repl_options() -> ReplOptions {
    ReplOptions {
        echo_input: !io::stdin().is_terminal(),
    }
}

pub fn run(cli: Cli) -> anyhow::Result<i32> {
    match cli.command {
        Command::Client { gateway } => {
            let mut out = io::stdout().lock();
            let mut link = match TcpExchange::connect(&gateway, DEFAULT_FETCH_TIMEOUT) {
                Ok(link) => link,
                Err(e) => {
                    log::debug!("connect {gateway}: {e}");
                    println!("Service unavailable");
                    return Ok(1);
                }
            };
            Ok(repl(
                io::stdin().lock(),
                &mut out,
                &mut link,
                &mut OsRng,
                repl_options(),
            )?)
        }
        Command::Serve {
            role,
            listen,
            peers,
            mode,
            store,
            timeout_ms,
        } => {
            let mut config = match role {
                Role::Gateway => NodeConfig::gateway(listen, peers, mode, store),
                Role::ShareServer => {
                    anyhow::ensure!(peers.is_empty(), "share servers take no --peer");
                    NodeConfig::share_server(listen, store)
                }
            };
            config.fetch_timeout = Duration::from_millis(timeout_ms);
            run_node(config).context("node failed")?;
            Ok(0)
        }
        Command::Demo { n, mode, seed } => {
            let mut out = io::stdout().lock();
            demo(n, mode, seed, io::stdin().lock(), &mut out, repl_options())
        }
        Command::Attacklab { seed, dict, csv } => {
            attacklab(seed, &dict, csv.as_deref(), &mut io::stdout().lock())?;
            Ok(0)
        }
    }
}

/// Entry point for the binary.
pub fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    match run(Cli::parse()) {
        Ok(code) => ExitCode::from(code.clamp(0, 255) as u8),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
