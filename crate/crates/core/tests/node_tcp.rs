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

//! Gateway and share servers over loopback TCP.

use std::fs;
use std::path::Path;
use std::time::Duration;

use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;

use splitauth::cli::{Exchange, TcpExchange};
use splitauth::crypto::{compute_digest, recombine_shares, split_digest, DigestShare, SplitMode};
use splitauth::node::{
    fetch_shares, Node, NodeConfig, NodeHandle, PeerError, ShareCluster, ShareStore, StoreError,
};
use splitauth::protocol::{
    shareserver_on_message, ClientEvent, ClientSession, FetchOutcome, Message,
};

fn share_server(dir: &Path, name: &str) -> NodeHandle {
    let config = NodeConfig::share_server("127.0.0.1:0", dir.join(name));
    Node::bind(config).unwrap().spawn().unwrap()
}

fn gateway(dir: &Path, peers: &[&NodeHandle], mode: SplitMode, listen: &str) -> NodeHandle {
    let addrs = peers.iter().map(|p| p.addr().to_string()).collect();
    let mut config = NodeConfig::gateway(listen, addrs, mode, dir.join("gateway.jsonl"));
    config.fetch_timeout = Duration::from_millis(500);
    Node::bind(config).unwrap().spawn().unwrap()
}

fn drive(
    gw: &NodeHandle,
    first: Message,
    mut client: ClientSession,
) -> (Option<ClientEvent>, ClientSession) {
    let mut link = TcpExchange::connect(&gw.addr().to_string(), Duration::from_secs(2)).unwrap();
    let mut outgoing = Some(first);
    let mut event = None;
    while let Some(msg) = outgoing.take() {
        let reply = link.exchange(&msg).unwrap();
        let step = client.on_message(reply).unwrap();
        outgoing = step.reply;
        event = step.event.or(event);
    }
    (event, client)
}

fn register(gw: &NodeHandle, user: &str, password: &str) -> Option<ClientEvent> {
    let (client, first) = ClientSession::start_register(user, password).unwrap();
    drive(gw, first, client).0
}

fn login(gw: &NodeHandle, user: &str, password: &str, seed: u64) -> Option<ClientEvent> {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    let (client, first) = ClientSession::start_login(user, password, &mut rng).unwrap();
    drive(gw, first, client).0
}

fn rejected(reason: &str) -> Option<ClientEvent> {
    Some(ClientEvent::Rejected {
        reason: reason.into(),
    })
}

#[test]
fn two_node_register_login() {
    let dir = tempfile::tempdir().unwrap();
    let peer = share_server(dir.path(), "share2.jsonl");
    let gw = gateway(dir.path(), &[&peer], SplitMode::Segment, "127.0.0.1:0");
    assert_eq!(register(&gw, "Alex", "0504"), Some(ClientEvent::Registered));
    assert_eq!(
        register(&gw, "Alex", "1111"),
        rejected("username already exists")
    );
    assert_eq!(
        login(&gw, "Alex", "0504", 1),
        Some(ClientEvent::LoginSucceeded)
    );
    assert_eq!(login(&gw, "Alex", "6451", 2), rejected("invalid"));
    assert_eq!(login(&gw, "Zed", "0504", 3), rejected("invalid"));
}

#[test]
fn logout_then_login_again_on_one_connection() {
    let dir = tempfile::tempdir().unwrap();
    let peer = share_server(dir.path(), "share2.jsonl");
    let gw = gateway(dir.path(), &[&peer], SplitMode::Xor, "127.0.0.1:0");
    register(&gw, "Alex", "0504");
    let mut link = TcpExchange::connect(&gw.addr().to_string(), Duration::from_secs(2)).unwrap();
    let mut rng = ChaCha20Rng::seed_from_u64(4);
    for _ in 0..2 {
        let (mut client, first) = ClientSession::start_login("Alex", "0504", &mut rng).unwrap();
        let mut outgoing = Some(first);
        while let Some(msg) = outgoing.take() {
            outgoing = client
                .on_message(link.exchange(&msg).unwrap())
                .unwrap()
                .reply;
        }
        let reply = link.exchange(&client.logout().unwrap()).unwrap();
        assert_eq!(
            client.on_message(reply).unwrap().event,
            Some(ClientEvent::LoggedOut)
        );
    }
    assert_eq!(link.transcript().frames.len(), 12);
}

#[test]
fn share_server_down_is_unavailable() {
    let dir = tempfile::tempdir().unwrap();
    let peer = share_server(dir.path(), "share2.jsonl");
    let gw = gateway(dir.path(), &[&peer], SplitMode::Segment, "127.0.0.1:0");
    register(&gw, "Alex", "0504");
    peer.shutdown();
    assert_eq!(login(&gw, "Alex", "0504", 5), rejected("unavailable"));
    assert_eq!(
        register(&gw, "Rony", "6451"),
        rejected("registration aborted")
    );
    let store = ShareStore::open(dir.path().join("gateway.jsonl")).unwrap();
    assert!(
        store.get("Rony").is_none(),
        "aborted registration left a local share"
    );
}

#[test]
fn gateway_restart_keeps_accounts() {
    let dir = tempfile::tempdir().unwrap();
    let peer = share_server(dir.path(), "share2.jsonl");
    let gw = gateway(dir.path(), &[&peer], SplitMode::Xor, "127.0.0.1:0");
    assert_eq!(register(&gw, "Alex", "0504"), Some(ClientEvent::Registered));
    let addr = gw.addr().to_string();
    gw.shutdown();
    let gw = gateway(dir.path(), &[&peer], SplitMode::Xor, &addr);
    assert_eq!(
        login(&gw, "Alex", "0504", 6),
        Some(ClientEvent::LoginSucceeded)
    );
}

#[test]
fn conflicting_peer_share_rolls_back() {
    let dir = tempfile::tempdir().unwrap();
    let peer = share_server(dir.path(), "share2.jsonl");
    let mut link = TcpExchange::connect(&peer.addr().to_string(), Duration::from_secs(2)).unwrap();
    let planted = Message::SharePut {
        username: "Alex".into(),
        index: 2,
        total: 2,
        mode: SplitMode::Segment,
        payload: vec![0; 16],
    };
    assert_eq!(link.exchange(&planted).unwrap(), Message::SharePutOk);

    let gw = gateway(dir.path(), &[&peer], SplitMode::Segment, "127.0.0.1:0");
    assert_eq!(
        register(&gw, "Alex", "0504"),
        rejected("registration aborted")
    );
    let store = ShareStore::open(dir.path().join("gateway.jsonl")).unwrap();
    assert!(store.get("Alex").is_none());
    let text = fs::read_to_string(dir.path().join("gateway.jsonl")).unwrap();
    assert!(text.lines().last().unwrap().contains(r#""op":"del""#));
}

#[test]
fn no_store_holds_a_whole_digest() {
    for (n, mode) in [
        (2, SplitMode::Segment),
        (2, SplitMode::Xor),
        (3, SplitMode::Xor),
        (3, SplitMode::Segment),
    ] {
        let dir = tempfile::tempdir().unwrap();
        let peers: Vec<NodeHandle> = (2..=n)
            .map(|i| share_server(dir.path(), &format!("share{i}.jsonl")))
            .collect();
        let gw = gateway(
            dir.path(),
            &peers.iter().collect::<Vec<_>>(),
            mode,
            "127.0.0.1:0",
        );
        for (user, pw) in [("Alex", "0504"), ("Rony", "6451")] {
            assert_eq!(register(&gw, user, pw), Some(ClientEvent::Registered));
            let full = compute_digest(pw).unwrap().to_hex();
            for entry in fs::read_dir(dir.path()).unwrap() {
                let text = fs::read_to_string(entry.unwrap().path()).unwrap();
                assert!(text.contains(user));
                assert!(
                    !text.contains(&full),
                    "n={n} {mode}: a store holds {user}'s digest"
                );
            }
        }
    }
}

#[test]
fn single_node_baseline_stores_the_digest() {
    let dir = tempfile::tempdir().unwrap();
    let gw = gateway(dir.path(), &[], SplitMode::Segment, "127.0.0.1:0");
    register(&gw, "Alex", "0504");
    let text = fs::read_to_string(dir.path().join("gateway.jsonl")).unwrap();
    assert!(text.contains(&compute_digest("0504").unwrap().to_hex()));
    assert_eq!(
        login(&gw, "Alex", "0504", 7),
        Some(ClientEvent::LoginSucceeded)
    );
}

/// Answers peer requests from in-memory stores, handing results back in a
/// chosen order.
struct Shuffled {
    local: ShareStore,
    peers: Vec<ShareStore>,
    order: Vec<usize>,
}

impl ShareCluster for Shuffled {
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
        Ok(shareserver_on_message(
            request.clone(),
            &mut self.peers[peer],
        ))
    }

    fn call_all_peers(&mut self, request: &Message) -> Vec<Result<Message, PeerError>> {
        let order = self.order.clone();
        order
            .into_iter()
            .map(|p| self.call_peer(p, request))
            .collect()
    }
}

#[test]
fn fetch_order_does_not_matter() {
    let mut rng = ChaCha20Rng::seed_from_u64(8);
    let digest = compute_digest("0504").unwrap();
    for mode in [SplitMode::Segment, SplitMode::Xor] {
        let shares = split_digest(&digest, 4, mode, &mut rng).unwrap();
        let orders = [
            [0, 1, 2],
            [2, 1, 0],
            [1, 2, 0],
            [0, 2, 1],
            [1, 0, 2],
            [2, 0, 1],
        ];
        for order in orders {
            let mut local = ShareStore::in_memory();
            local.put("Alex", shares[0].clone()).unwrap();
            let peers = shares[1..]
                .iter()
                .map(|s| {
                    let mut st = ShareStore::in_memory();
                    st.put("Alex", s.clone()).unwrap();
                    st
                })
                .collect();
            let mut cluster = Shuffled {
                local,
                peers,
                order: order.to_vec(),
            };
            let FetchOutcome::Shares(got) = fetch_shares(&mut cluster, "Alex") else {
                panic!("fetch failed");
            };
            assert_eq!(
                recombine_shares(&got).unwrap(),
                digest,
                "{mode} order {order:?}"
            );
        }
    }
}
