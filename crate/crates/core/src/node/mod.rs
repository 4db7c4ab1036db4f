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

//! Networked runtime: durable share stores, configuration, and the TCP
//! gateway and share-server services.

pub mod cluster;
pub mod config;
pub mod server;
pub mod store;

pub use cluster::{drive_gateway, fetch_shares, gateway_register, PeerError, ShareCluster};
pub use config::{ConfigError, NodeConfig, Role, DEFAULT_FETCH_TIMEOUT};
pub use server::{run_node, Node, NodeError, NodeHandle, TcpCluster};
pub use store::{ShareStore, StoreError};
