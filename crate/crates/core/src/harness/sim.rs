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

//! In-process cluster that runs the real state machines and stores with
//! every message passed through the wire codec and logged.

use rand_chacha::ChaCha20Rng;
use thiserror::Error;

use crate::crypto::{DigestShare, SplitMode};
use crate::node::{drive_gateway, PeerError, ShareCluster, ShareStore, StoreError};
use crate::protocol::{
    decode_frame, encode_frame, shareserver_on_message, ClientError, ClientEvent, ClientSession,
    Direction, FrameError, GatewayConnection, GatewaySession, Message,
};
use crate::rng;

#[derive(Debug, Error)]
pub enum SimError {
    #[error("connection is closed")]
    Closed,
    #[error("gateway rejected frame: {0}")]
    Frame(#[from] FrameError),
    #[error(transparent)]
    Client(#[from] ClientError),
    #[error("{0} shares is not supported in {1} mode")]
    Config(usize, SplitMode),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Link {
    /// Client connection, by connection id.
    Client(u64),
    /// Gateway to peer (0-based).
    Peer(usize),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LogEntry {
    pub link: Link,
    pub direction: Direction,
    pub frame: Vec<u8>,
}

/// Raw frames of one client/gateway exchange, in order.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Transcript {
    pub frames: Vec<(Direction, Vec<u8>)>,
}

impl Transcript {
    pub fn push(&mut self, direction: Direction, frame: Vec<u8>) {
        self.frames.push((direction, frame));
    }

    /// Decoded messages. Frames that fail to decode are skipped.
    pub fn messages(&self) -> Vec<(Direction, Message)> {
        self.frames
            .iter()
            .filter_map(|(dir, frame)| {
                decode_frame(frame)
                    .ok()
                    .flatten()
                    .map(|(msg, _)| (*dir, msg))
            })
            .collect()
    }

    /// First client-sent frame of the given wire type.
    pub fn sent_frame(&self, kind: &str) -> Option<&[u8]> {
        self.frames.iter().find_map(|(dir, frame)| {
            let (msg, _) = decode_frame(frame).ok()??;
            (*dir == Direction::ToServer && msg.kind() == kind).then_some(frame.as_slice())
        })
    }
}

/// A client connection to the simulated gateway.
pub struct SimConnection {
    id: u64,
    gateway: GatewayConnection,
    rng: ChaCha20Rng,
    closed: bool,
}

impl SimConnection {
    pub fn id(&self) -> u64 {
        self.id
    }

    pub fn gateway_session(&self) -> Option<&GatewaySession> {
        self.gateway.session()
    }

    pub fn close(&mut self) {
        self.closed = true;
    }

    pub fn is_closed(&self) -> bool {
        self.closed
    }
}

/// Result of a scripted client operation.
#[derive(Debug)]
pub struct ClientRun {
    pub transcript: Transcript,
    pub client: ClientSession,
    pub event: Option<ClientEvent>,
}

/// Deterministic gateway plus `n - 1` share servers.
///
/// All randomness comes from the seed: the gateway derives one generator per
/// connection from its master stream, exactly as a seeded live gateway does,
/// and the scripted client draws from its own stream.
pub struct SimCluster {
    n: usize,
    mode: SplitMode,
    gateway_master: ChaCha20Rng,
    client_rng: ChaCha20Rng,
    gateway_store: ShareStore,
    peers: Vec<ShareStore>,
    down: Vec<bool>,
    log: Vec<LogEntry>,
    next_conn: u64,
}

impl SimCluster {
    pub fn new(n: usize, mode: SplitMode, seed: u64) -> Result<Self, SimError> {
        if !mode.supports(n) {
            return Err(SimError::Config(n, mode));
        }
        Ok(Self {
            n,
            mode,
            gateway_master: rng::gateway_master(seed),
            client_rng: rng::client_rng(seed),
            gateway_store: ShareStore::in_memory(),
            peers: (1..n).map(|_| ShareStore::in_memory()).collect(),
            down: vec![false; n - 1],
            log: Vec::new(),
            next_conn: 0,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn mode(&self) -> SplitMode {
        self.mode
    }

    pub fn log(&self) -> &[LogEntry] {
        &self.log
    }

    /// Store of node `node`: 0 is the gateway, `i` is peer `i - 1`.
    pub fn store(&self, node: usize) -> &ShareStore {
        match node {
            0 => &self.gateway_store,
            i => &self.peers[i - 1],
        }
    }

    /// Marks a peer (0-based) unreachable.
    pub fn set_peer_down(&mut self, peer: usize, down: bool) {
        self.down[peer] = down;
    }

    pub fn client_rng(&mut self) -> &mut ChaCha20Rng {
        &mut self.client_rng
    }

    pub fn connect(&mut self) -> SimConnection {
        let id = self.next_conn;
        self.next_conn += 1;
        SimConnection {
            id,
            gateway: GatewayConnection::new(),
            rng: rng::connection_rng(&mut self.gateway_master),
            closed: false,
        }
    }

    /// Delivers one raw frame to the gateway and returns its reply frames.
    /// A frame the gateway cannot decode closes the connection.
    pub fn send_frame(
        &mut self,
        conn: &mut SimConnection,
        frame: &[u8],
    ) -> Result<Vec<Vec<u8>>, SimError> {
        if conn.closed {
            return Err(SimError::Closed);
        }
        let link = Link::Client(conn.id);
        self.record(link, Direction::ToServer, frame.to_vec());
        let message = match decode_frame(frame) {
            Ok(Some((msg, []))) => msg,
            Ok(_) => {
                conn.closed = true;
                return Err(FrameError::Malformed("expected exactly one frame".into()).into());
            }
            Err(e) => {
                conn.closed = true;
                return Err(e.into());
            }
        };
        let mut peers = SimPeers {
            local: &mut self.gateway_store,
            peers: &mut self.peers,
            down: &self.down,
            log: &mut self.log,
        };
        let replies = drive_gateway(
            &mut conn.gateway,
            message,
            &mut peers,
            self.mode,
            &mut conn.rng,
        );
        let mut frames = Vec::with_capacity(replies.len());
        for reply in replies {
            let frame = encode_frame(&reply).expect("gateway replies are valid");
            self.record(link, Direction::ToClient, frame.clone());
            frames.push(frame);
        }
        Ok(frames)
    }

    pub fn send(
        &mut self,
        conn: &mut SimConnection,
        message: &Message,
    ) -> Result<Vec<Message>, SimError> {
        let frame = encode_frame(message)?;
        self.send_frame(conn, &frame)?
            .iter()
            .map(|f| Ok(decode_frame(f)?.expect("whole frame").0))
            .collect()
    }

    pub fn register(
        &mut self,
        conn: &mut SimConnection,
        username: &str,
        password: &str,
    ) -> Result<ClientRun, SimError> {
        let (client, first) = ClientSession::start_register(username, password)?;
        self.run_client(conn, client, first)
    }

    pub fn login(
        &mut self,
        conn: &mut SimConnection,
        username: &str,
        password: &str,
    ) -> Result<ClientRun, SimError> {
        let (client, first) = ClientSession::start_login(username, password, &mut self.client_rng)?;
        self.run_client(conn, client, first)
    }

    pub fn logout(
        &mut self,
        conn: &mut SimConnection,
        run: &mut ClientRun,
    ) -> Result<Option<ClientEvent>, SimError> {
        let msg = run.client.logout()?;
        let mut transcript = Transcript::default();
        let replies = self.exchange(conn, &msg, &mut transcript)?;
        let mut event = None;
        for reply in replies {
            event = run.client.on_message(reply)?.event;
        }
        run.transcript.frames.extend(transcript.frames);
        Ok(event)
    }

    fn run_client(
        &mut self,
        conn: &mut SimConnection,
        mut client: ClientSession,
        first: Message,
    ) -> Result<ClientRun, SimError> {
        let mut transcript = Transcript::default();
        let mut outgoing = Some(first);
        let mut event = None;
        while let Some(msg) = outgoing.take() {
            for reply in self.exchange(conn, &msg, &mut transcript)? {
                let step = client.on_message(reply)?;
                outgoing = step.reply;
                event = step.event.or(event);
            }
        }
        Ok(ClientRun {
            transcript,
            client,
            event,
        })
    }

    fn exchange(
        &mut self,
        conn: &mut SimConnection,
        msg: &Message,
        transcript: &mut Transcript,
    ) -> Result<Vec<Message>, SimError> {
        let frame = encode_frame(msg)?;
        transcript.push(Direction::ToServer, frame.clone());
        let replies = self.send_frame(conn, &frame)?;
        let mut out = Vec::with_capacity(replies.len());
        for reply in replies {
            out.push(decode_frame(&reply)?.expect("whole frame").0);
            transcript.push(Direction::ToClient, reply);
        }
        Ok(out)
    }

    fn record(&mut self, link: Link, direction: Direction, frame: Vec<u8>) {
        self.log.push(LogEntry {
            link,
            direction,
            frame,
        });
    }
}

struct SimPeers<'a> {
    local: &'a mut ShareStore,
    peers: &'a mut [ShareStore],
    down: &'a [bool],
    log: &'a mut Vec<LogEntry>,
}

impl SimPeers<'_> {
    fn record(&mut self, peer: usize, direction: Direction, frame: &[u8]) {
        self.log.push(LogEntry {
            link: Link::Peer(peer),
            direction,
            frame: frame.to_vec(),
        });
    }
}

impl ShareCluster for SimPeers<'_> {
    fn peer_count(&self) -> usize {
        self.peers.len()
    }

    fn local_insert(&mut self, username: &str, share: DigestShare) -> Result<(), StoreError> {
        self.local.insert_new(username, share)
    }

    fn local_get(&mut self, username: &str) -> Option<DigestShare> {
        self.local.get(username).cloned()
    }

    fn local_delete(&mut self, username: &str) -> Result<(), StoreError> {
        self.local.delete(username).map(|_| ())
    }

    fn call_peer(&mut self, peer: usize, request: &Message) -> Result<Message, PeerError> {
        if self.down[peer] {
            return Err(PeerError::Closed { peer });
        }
        let frame = encode_frame(request).expect("gateway requests are valid");
        self.record(peer, Direction::ToServer, &frame);
        let (request, _) = decode_frame(&frame)
            .expect("round trip")
            .expect("whole frame");
        let reply = shareserver_on_message(request, &mut self.peers[peer]);
        let frame = encode_frame(&reply).expect("share server replies are valid");
        self.record(peer, Direction::ToClient, &frame);
        Ok(decode_frame(&frame)
            .expect("round trip")
            .expect("whole frame")
            .0)
    }
}
