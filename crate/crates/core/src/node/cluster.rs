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

//! Executes gateway effects against the local store and the share servers.
//!
//! [`ShareCluster`] abstracts how peers are reached, so the TCP runtime and
//! the in-process simulator run the same registration and fetch logic.

use rand::RngCore;
use thiserror::Error;

use super::store::StoreError;
use crate::crypto::{split_digest, DigestShare, PasswordDigest, SplitMode};
use crate::protocol::{
    FetchOutcome, GatewayConnection, GatewayEffect, Message, ReadError, RegisterOutcome,
};

#[derive(Debug, Error)]
pub enum PeerError {
    #[error("peer {peer} unreachable: {source}")]
    Transport {
        peer: usize,
        #[source]
        source: ReadError,
    },
    #[error("peer {peer} closed the connection")]
    Closed { peer: usize },
}

pub trait ShareCluster {
    /// Number of remote share servers; the local store holds index 1.
    fn peer_count(&self) -> usize;

    fn local_insert(&mut self, username: &str, share: DigestShare) -> Result<(), StoreError>;

    fn local_get(&mut self, username: &str) -> Option<DigestShare>;

    fn local_delete(&mut self, username: &str) -> Result<(), StoreError>;

    /// One request/response exchange with peer `peer` (0-based; it holds share
    /// index `peer + 2`).
    fn call_peer(&mut self, peer: usize, request: &Message) -> Result<Message, PeerError>;

    /// Sends `request` to every peer. Results are in peer order.
    fn call_all_peers(&mut self, request: &Message) -> Vec<Result<Message, PeerError>> {
        (0..self.peer_count())
            .map(|peer| self.call_peer(peer, request))
            .collect()
    }
}

/// Splits `digest` into `1 + peer_count` shares and stores them all, or none.
///
/// Share 1 is inserted locally first, which also serves as the duplicate
/// check. On any peer failure every share stored so far is removed again.
pub fn gateway_register<C, R>(
    cluster: &mut C,
    username: &str,
    digest: &PasswordDigest,
    mode: SplitMode,
    rng: &mut R,
) -> RegisterOutcome
where
    C: ShareCluster + ?Sized,
    R: RngCore + ?Sized,
{
    let n = cluster.peer_count() + 1;
    let shares = match split_digest(digest, n, mode, rng) {
        Ok(shares) => shares,
        Err(e) => {
            log::error!("cannot split for {n} nodes: {e}");
            return RegisterOutcome::Aborted;
        }
    };
    let mut shares = shares.into_iter();
    let local = shares.next().expect("n >= 1");
    match cluster.local_insert(username, local) {
        Ok(()) => {}
        Err(StoreError::Exists) => return RegisterOutcome::Duplicate,
        Err(e) => {
            log::error!("local share write failed: {e}");
            return RegisterOutcome::Aborted;
        }
    }

    let mut stored = Vec::new();
    for (peer, share) in shares.enumerate() {
        match cluster.call_peer(peer, &Message::share_put(username, &share)) {
            Ok(Message::SharePutOk) => stored.push(peer),
            outcome => {
                log::warn!("registration of {username:?} failed at peer {peer}: {outcome:?}");
                compensate(cluster, username, &stored);
                return RegisterOutcome::Aborted;
            }
        }
    }
    RegisterOutcome::Stored
}

fn compensate<C: ShareCluster + ?Sized>(cluster: &mut C, username: &str, peers: &[usize]) {
    let delete = Message::ShareDelete {
        username: username.to_owned(),
    };
    for &peer in peers {
        if let Err(e) = cluster.call_peer(peer, &delete) {
            log::error!("compensating delete on peer {peer} failed: {e}");
        }
    }
    if let Err(e) = cluster.local_delete(username) {
        log::error!("compensating local delete failed: {e}");
    }
}

/// Collects every node's share for `username`.
pub fn fetch_shares<C: ShareCluster + ?Sized>(cluster: &mut C, username: &str) -> FetchOutcome {
    let mut shares: Vec<DigestShare> = cluster.local_get(username).into_iter().collect();
    let request = Message::ShareGet {
        username: username.to_owned(),
    };
    for result in cluster.call_all_peers(&request) {
        match result {
            Ok(Message::ShareData {
                index,
                total,
                mode,
                payload,
            }) => shares.push(DigestShare {
                index,
                total,
                mode,
                payload,
            }),
            Ok(Message::ShareMissing) => {}
            other => {
                log::warn!("share fetch for {username:?} failed: {other:?}");
                return FetchOutcome::Unavailable;
            }
        }
    }
    if shares.is_empty() {
        FetchOutcome::Unknown
    } else {
        FetchOutcome::Shares(shares)
    }
}

/// Feeds one client message through the gateway machine, executing effects
/// until only replies remain. Returns the replies in order.
pub fn drive_gateway<C, R>(
    conn: &mut GatewayConnection,
    message: Message,
    cluster: &mut C,
    mode: SplitMode,
    rng: &mut R,
) -> Vec<Message>
where
    C: ShareCluster + ?Sized,
    R: RngCore + ?Sized,
{
    let mut replies = Vec::new();
    let mut pending = conn.on_client_message(message, rng);
    while !pending.is_empty() {
        let mut next = Vec::new();
        for effect in pending {
            match effect {
                GatewayEffect::Reply(msg) => replies.push(msg),
                GatewayEffect::SplitAndStore { username, digest } => {
                    let outcome = gateway_register(cluster, &username, &digest, mode, rng);
                    next.extend(conn.on_register_outcome(outcome));
                }
                GatewayEffect::FetchShares { username } => {
                    let outcome = fetch_shares(cluster, &username);
                    next.extend(conn.on_shares(outcome));
                }
            }
        }
        pending = next;
    }
    replies
}
