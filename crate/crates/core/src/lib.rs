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

//! Split-verifier password authentication across a gateway and share servers.
//!
//! A password's SHA-256 digest is split into one share per node, so no single
//! store holds the verifier. Login is two-step: the gateway recombines the
//! shares, then the client answers a fresh nonce challenge with a proof keyed
//! by the digest. Both sides finish with mutual proofs and a shared session
//! key.
//!
//! * [`crypto`]: digests, splitting, nonces, proofs, session keys
//! * [`protocol`]: wire messages, framing, sans-I/O state machines
//! * [`node`]: share stores and the TCP runtime
//! * [`harness`]: deterministic simulator and attack experiments
//! * [`cli`]: terminal client, demo cluster and attack lab

pub mod cli;
pub mod crypto;
pub mod harness;
pub mod node;
pub mod protocol;
pub mod rng;
