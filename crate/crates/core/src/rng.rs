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

//! Seeded randomness for demos and the simulator.
//!
//! One seed fans out into independent ChaCha20 streams, one per role, so the
//! in-process simulator and a live seeded deployment draw identical values.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;

const GATEWAY_STREAM: u64 = 1;
const CLIENT_STREAM: u64 = 2;
const HARNESS_STREAM: u64 = 3;

fn stream(seed: u64, id: u64) -> ChaCha20Rng {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    rng.set_stream(id);
    rng
}

/// Master generator a gateway derives per-connection generators from.
pub fn gateway_master(seed: u64) -> ChaCha20Rng {
    stream(seed, GATEWAY_STREAM)
}

pub fn client_rng(seed: u64) -> ChaCha20Rng {
    stream(seed, CLIENT_STREAM)
}

/// Adversary-side randomness and experiment choices.
pub fn harness_rng(seed: u64) -> ChaCha20Rng {
    stream(seed, HARNESS_STREAM)
}

/// Generator for the next accepted connection.
pub fn connection_rng(master: &mut ChaCha20Rng) -> ChaCha20Rng {
    ChaCha20Rng::from_seed(master.gen())
}
