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

//! TCP runtime for gateway and share-server nodes.
//!
//! Each accepted connection gets its own thread and carries a stream of
//! frames. The gateway reaches its peers with one short-lived connection per
//! request, bounded by the configured fetch timeout.

use std::collections::HashMap;
use std::io;
use std::net::{Shutdown, SocketAddr, TcpListener, TcpStream, ToSocketAddrs};
use std::sync::atomic::{AtomicBool, AtomicU64, Ordering};
use std::sync::{Arc, Mutex};
use std::thread::{self, JoinHandle};
use std::time::Duration;

use rand::RngCore;
use rand_chacha::ChaCha20Rng;
use thiserror::Error;

use super::cluster::{drive_gateway, PeerError, ShareCluster};
use super::config::{ConfigError, NodeConfig, Role};
use super::store::{ShareStore, StoreError};
use crate::crypto::{DigestShare, SplitMode};
use crate::protocol::{
    read_message, shareserver_on_message, write_message, GatewayConnection, Message,
};
use crate::rng;

#[derive(Debug, Error)]
pub enum NodeError {
    #[error("invalid configuration: {0}")]
    Config(#[from] ConfigError),
    #[error("cannot open store: {0}")]
    Store(#[from] StoreError),
    #[error("cannot bind {addr}: {source}")]
    Bind {
        addr: String,
        #[source]
        source: io::Error,
    },
    #[error(transparent)]
    Io(#[from] io::Error),
}

enum RngSource {
    Os,
    Seeded(Box<Mutex<ChaCha20Rng>>),
}

impl RngSource {
    fn connection_rng(&self) -> Box<dyn RngCore + Send> {
        match self {
            RngSource::Os => Box::new(rand::rngs::OsRng),
            RngSource::Seeded(master) => {
                Box::new(rng::connection_rng(&mut master.lock().expect("rng lock")))
            }
        }
    }
}

#[derive(Default)]
struct Connections {
    next_id: AtomicU64,
    open: Mutex<HashMap<u64, TcpStream>>,
}

impl Connections {
    fn track(&self, stream: &TcpStream) -> Option<u64> {
        let id = self.next_id.fetch_add(1, Ordering::Relaxed);
        let clone = stream.try_clone().ok()?;
        self.open.lock().expect("conn lock").insert(id, clone);
        Some(id)
    }

    fn forget(&self, id: Option<u64>) {
        if let Some(id) = id {
            self.open.lock().expect("conn lock").remove(&id);
        }
    }

    fn close_all(&self) {
        for (_, stream) in self.open.lock().expect("conn lock").drain() {
            let _ = stream.shutdown(Shutdown::Both);
        }
    }
}

struct Shared {
    config: NodeConfig,
    store: Mutex<ShareStore>,
    rng: RngSource,
    connections: Connections,
    shutdown: AtomicBool,
}

/// A bound, not yet serving, node.
pub struct Node {
    listener: TcpListener,
    shared: Arc<Shared>,
}

impl Node {
    pub fn bind(config: NodeConfig) -> Result<Self, NodeError> {
        config.validate()?;
        let store = ShareStore::open(&config.store_path)?;
        let listener = TcpListener::bind(&config.listen).map_err(|source| NodeError::Bind {
            addr: config.listen.clone(),
            source,
        })?;
        let rng = match config.seed {
            Some(seed) => RngSource::Seeded(Box::new(Mutex::new(rng::gateway_master(seed)))),
            None => RngSource::Os,
        };
        log::info!(
            "{} listening on {} (store {}, {} shares loaded)",
            config.role,
            listener.local_addr()?,
            config.store_path.display(),
            store.len()
        );
        Ok(Self {
            listener,
            shared: Arc::new(Shared {
                config,
                store: Mutex::new(store),
                rng,
                connections: Connections::default(),
                shutdown: AtomicBool::new(false),
            }),
        })
    }

    pub fn local_addr(&self) -> io::Result<SocketAddr> {
        self.listener.local_addr()
    }

    /// Accept loop. Returns only after [`NodeHandle::shutdown`] or on an
    /// accept error.
    pub fn serve(self) -> Result<(), NodeError> {
        for stream in self.listener.incoming() {
            if self.shared.shutdown.load(Ordering::SeqCst) {
                break;
            }
            let stream = match stream {
                Ok(s) => s,
                Err(e) => {
                    log::warn!("accept failed: {e}");
                    continue;
                }
            };
            let shared = Arc::clone(&self.shared);
            thread::spawn(move || {
                let id = shared.connections.track(&stream);
                let peer = stream.peer_addr().ok();
                if let Err(e) = handle_connection(&shared, stream) {
                    log::debug!("connection {peer:?} ended: {e}");
                }
                shared.connections.forget(id);
            });
        }
        Ok(())
    }

    /// Serves on a background thread.
    pub fn spawn(self) -> io::Result<NodeHandle> {
        let addr = self.local_addr()?;
        let shared = Arc::clone(&self.shared);
        let thread = thread::spawn(move || {
            if let Err(e) = self.serve() {
                log::error!("node stopped: {e}");
            }
        });
        Ok(NodeHandle {
            addr,
            shared,
            thread: Some(thread),
        })
    }
}

/// Running node; shuts down on drop.
pub struct NodeHandle {
    addr: SocketAddr,
    shared: Arc<Shared>,
    thread: Option<JoinHandle<()>>,
}

impl NodeHandle {
    pub fn addr(&self) -> SocketAddr {
        self.addr
    }

    /// Stops accepting, closes open connections and waits for the accept loop.
    pub fn shutdown(mut self) {
        self.stop();
    }

    fn stop(&mut self) {
        let Some(thread) = self.thread.take() else {
            return;
        };
        self.shared.shutdown.store(true, Ordering::SeqCst);
        // wake the blocking accept
        let _ = TcpStream::connect_timeout(&self.addr, Duration::from_millis(500));
        let _ = thread.join();
        self.shared.connections.close_all();
    }
}

impl Drop for NodeHandle {
    fn drop(&mut self) {
        self.stop();
    }
}

/// Binds and serves forever.
pub fn run_node(config: NodeConfig) -> Result<(), NodeError> {
    Node::bind(config)?.serve()
}

fn handle_connection(
    shared: &Shared,
    mut stream: TcpStream,
) -> Result<(), crate::protocol::ReadError> {
    stream.set_nodelay(true)?;
    match shared.config.role {
        Role::ShareServer => {
            while let Some(request) = read_message(&mut stream)? {
                let reply = {
                    let mut store = shared.store.lock().expect("store lock");
                    shareserver_on_message(request, &mut *store)
                };
                write_message(&mut stream, &reply)?;
            }
        }
        Role::Gateway => {
            let mut conn = GatewayConnection::new();
            let mut rng = shared.rng.connection_rng();
            let mut cluster = TcpCluster {
                local: &shared.store,
                peers: &shared.config.peers,
                timeout: shared.config.fetch_timeout,
            };
            let mode: SplitMode = shared.config.split_mode;
            while let Some(message) = read_message(&mut stream)? {
                for reply in drive_gateway(&mut conn, message, &mut cluster, mode, &mut rng) {
                    write_message(&mut stream, &reply)?;
                }
            }
        }
    }
    Ok(())
}

/// Peers reached over TCP, one connection per request.
pub struct TcpCluster<'a> {
    local: &'a Mutex<ShareStore>,
    peers: &'a [String],
    timeout: Duration,
}

impl TcpCluster<'_> {
    fn exchange(&self, peer: usize, request: &Message) -> Result<Message, PeerError> {
        let transport = |source: io::Error| PeerError::Transport {
            peer,
            source: source.into(),
        };
        let addr = self.peers[peer]
            .to_socket_addrs()
            .map_err(transport)?
            .next()
            .ok_or_else(|| transport(io::Error::new(io::ErrorKind::NotFound, "no address")))?;
        let mut stream = TcpStream::connect_timeout(&addr, self.timeout).map_err(transport)?;
        stream
            .set_read_timeout(Some(self.timeout))
            .map_err(transport)?;
        stream
            .set_write_timeout(Some(self.timeout))
            .map_err(transport)?;
        stream.set_nodelay(true).map_err(transport)?;
        write_message(&mut stream, request)
            .map_err(|source| PeerError::Transport { peer, source })?;
        read_message(&mut stream)
            .map_err(|source| PeerError::Transport { peer, source })?
            .ok_or(PeerError::Closed { peer })
    }
}

impl ShareCluster for TcpCluster<'_> {
    fn peer_count(&self) -> usize {
        self.peers.len()
    }

    fn local_insert(&mut self, username: &str, share: DigestShare) -> Result<(), StoreError> {
        self.local
            .lock()
            .expect("store lock")
            .insert_new(username, share)
    }

    fn local_get(&mut self, username: &str) -> Option<DigestShare> {
        self.local
            .lock()
            .expect("store lock")
            .get(username)
            .cloned()
    }

    fn local_delete(&mut self, username: &str) -> Result<(), StoreError> {
        self.local
            .lock()
            .expect("store lock")
            .delete(username)
            .map(|_| ())
    }

    fn call_peer(&mut self, peer: usize, request: &Message) -> Result<Message, PeerError> {
        self.exchange(peer, request)
    }

    fn call_all_peers(&mut self, request: &Message) -> Vec<Result<Message, PeerError>> {
        let this = &*self;
        thread::scope(|scope| {
            let handles: Vec<_> = (0..this.peers.len())
                .map(|peer| scope.spawn(move || this.exchange(peer, request)))
                .collect();
            handles
                .into_iter()
                .map(|h| h.join().expect("peer fetch thread panicked"))
                .collect()
        })
    }
}
