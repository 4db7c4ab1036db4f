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

//! The simulator and a seeded loopback deployment must agree byte for byte.

use std::time::Duration;

use splitauth::cli::{repl, DemoCluster, ReplOptions, SimExchange, TcpExchange};
use splitauth::crypto::{DigestShare, SplitMode};
use splitauth::harness::{SimCluster, Transcript};
use splitauth::node::ShareStore;
use splitauth::rng;

const SCRIPT: &str =
    "register\nAlex\n0504\nregister\nRony\n6451\nlogin\nAlex\n0504\nlogout\nlogin\nAlex\n6451\n";

fn shares(store: &ShareStore) -> Vec<(String, DigestShare)> {
    let mut all: Vec<_> = store
        .iter()
        .map(|(u, s)| (u.to_owned(), s.clone()))
        .collect();
    all.sort_by(|a, b| a.0.cmp(&b.0));
    all
}

fn simulated(
    n: usize,
    mode: SplitMode,
    seed: u64,
) -> (String, Transcript, Vec<Vec<(String, DigestShare)>>) {
    let mut sim = SimCluster::new(n, mode, seed).unwrap();
    let mut out = Vec::new();
    let transcript = {
        let mut link = SimExchange::new(&mut sim);
        let mut client = rng::client_rng(seed);
        repl(
            SCRIPT.as_bytes(),
            &mut out,
            &mut link,
            &mut client,
            ReplOptions { echo_input: true },
        )
        .unwrap();
        link.transcript().clone()
    };
    let stores = (0..n).map(|i| shares(sim.store(i))).collect();
    (String::from_utf8(out).unwrap(), transcript, stores)
}

fn live(
    n: usize,
    mode: SplitMode,
    seed: u64,
) -> (String, Transcript, Vec<Vec<(String, DigestShare)>>) {
    let cluster = DemoCluster::start(n, mode, Some(seed)).unwrap();
    let mut link =
        TcpExchange::connect(&cluster.gateway_addr().to_string(), Duration::from_secs(2)).unwrap();
    let mut client = rng::client_rng(seed);
    let mut out = Vec::new();
    repl(
        SCRIPT.as_bytes(),
        &mut out,
        &mut link,
        &mut client,
        ReplOptions { echo_input: true },
    )
    .unwrap();
    let dir = cluster.store_dir().to_owned();
    let mut files = vec![dir.join("gateway.jsonl")];
    files.extend((2..=n).map(|i| dir.join(format!("share{i}.jsonl"))));
    let stores = files
        .iter()
        .map(|f| shares(&ShareStore::open(f).unwrap()))
        .collect();
    (
        String::from_utf8(out).unwrap(),
        link.transcript().clone(),
        stores,
    )
}

#[test]
fn sim_and_live_agree() {
    for (n, mode, seed) in [
        (2, SplitMode::Segment, 0),
        (2, SplitMode::Xor, 1),
        (3, SplitMode::Xor, 2),
        (1, SplitMode::Segment, 3),
    ] {
        let (sim_out, sim_frames, sim_stores) = simulated(n, mode, seed);
        let (live_out, live_frames, live_stores) = live(n, mode, seed);
        assert_eq!(sim_out, live_out, "n={n} {mode}");
        assert_eq!(sim_frames.frames.len(), 14);
        assert_eq!(sim_frames, live_frames, "n={n} {mode}");
        assert_eq!(sim_stores, live_stores, "n={n} {mode}");
    }
}

#[test]
fn dialogue_does_not_depend_on_deployment() {
    let (reference, _, _) = simulated(2, SplitMode::Segment, 0);
    for (n, mode) in [
        (1, SplitMode::Segment),
        (3, SplitMode::Xor),
        (5, SplitMode::Segment),
    ] {
        assert_eq!(simulated(n, mode, 9).0, reference);
    }
}

#[test]
fn same_seed_same_log() {
    let run = |seed| {
        let mut sim = SimCluster::new(3, SplitMode::Xor, seed).unwrap();
        {
            let mut link = SimExchange::new(&mut sim);
            let mut client = rng::client_rng(seed);
            repl(
                SCRIPT.as_bytes(),
                &mut Vec::new(),
                &mut link,
                &mut client,
                ReplOptions::default(),
            )
            .unwrap();
        }
        sim.log().to_vec()
    };
    assert_eq!(run(4), run(4));
    assert_ne!(run(4), run(5));
}
