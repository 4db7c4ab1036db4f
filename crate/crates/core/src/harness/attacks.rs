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

//! The four adversaries, measured against a [`SimCluster`].
//!
//! Success criteria:
//! * replay, impersonation: the gateway answers `LoginOk`.
//! * compromise, eavesdrop: exactly one dictionary word is consistent with
//!   the captured material and it is the true password.

use std::fmt;

use rand::RngCore;

use super::sim::{SimCluster, Transcript};
use crate::crypto::{
    compute_digest, compute_login_proof, generate_nonce, recombine_shares, DigestShare,
    PasswordDigest, Proof, SplitMode,
};
use crate::protocol::{Direction, Message};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum AttackKind {
    Replay,
    Impersonation,
    Compromise,
    EavesdropLogin,
    EavesdropRegister,
}

impl AttackKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            AttackKind::Replay => "replay",
            AttackKind::Impersonation => "impersonation",
            AttackKind::Compromise => "compromise",
            AttackKind::EavesdropLogin => "eavesdrop-login",
            AttackKind::EavesdropRegister => "eavesdrop-register",
        }
    }
}

impl fmt::Display for AttackKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AttackReport {
    pub attack: AttackKind,
    pub n: usize,
    pub mode: SplitMode,
    pub compromised: usize,
    pub dictionary_size: usize,
    pub trials: usize,
    pub successes: usize,
    pub notes: String,
}

impl AttackReport {
    fn new(attack: AttackKind, n: usize, mode: SplitMode) -> Self {
        Self {
            attack,
            n,
            mode,
            compromised: 0,
            dictionary_size: 0,
            trials: 0,
            successes: 0,
            notes: String::new(),
        }
    }

    /// Labels a transcript-only result with the deployment it came from.
    pub fn for_config(mut self, n: usize, mode: SplitMode) -> Self {
        self.n = n;
        self.mode = mode;
        self
    }

    pub fn rate(&self) -> f64 {
        if self.trials == 0 {
            0.0
        } else {
            self.successes as f64 / self.trials as f64
        }
    }
}

/// Re-sends the recorded `Login` and `ChallengeResponse` frames on a fresh
/// connection, `trials` times.
pub fn replay_attack(
    cluster: &mut SimCluster,
    transcript: &Transcript,
    trials: usize,
) -> AttackReport {
    let mut report = AttackReport::new(AttackKind::Replay, cluster.n(), cluster.mode());
    report.trials = trials;
    let (Some(login), Some(response)) = (
        transcript.sent_frame("login"),
        transcript.sent_frame("challenge_response"),
    ) else {
        report.notes = "transcript lacks a login exchange".into();
        return report;
    };
    let mut challenged = 0;
    for _ in 0..trials {
        let mut conn = cluster.connect();
        let Ok(replies) = cluster.send_frame(&mut conn, login) else {
            continue;
        };
        if replies.iter().any(|f| frame_kind(f) == Some("challenge")) {
            challenged += 1;
        }
        if let Ok(replies) = cluster.send_frame(&mut conn, response) {
            if replies.iter().any(|f| frame_kind(f) == Some("login_ok")) {
                report.successes += 1;
            }
        }
        conn.close();
    }
    report.notes = format!("{challenged}/{trials} replayed logins drew a fresh challenge");
    report
}

/// An adversary with no secrets: random client nonce, random 32-byte proof.
pub fn impersonation_attack<R: RngCore + ?Sized>(
    cluster: &mut SimCluster,
    username: &str,
    trials: usize,
    rng: &mut R,
) -> AttackReport {
    let mut report = AttackReport::new(AttackKind::Impersonation, cluster.n(), cluster.mode());
    report.trials = trials;
    let mut challenged_total = 0;
    for _ in 0..trials {
        let mut conn = cluster.connect();
        let login = Message::Login {
            username: username.to_owned(),
            client_nonce: generate_nonce(rng),
        };
        let challenged = cluster
            .send(&mut conn, &login)
            .map(|r| matches!(r.as_slice(), [Message::Challenge { .. }]))
            .unwrap_or(false);
        if !challenged {
            continue;
        }
        challenged_total += 1;
        let mut guess = [0u8; 32];
        rng.fill_bytes(&mut guess);
        let response = Message::ChallengeResponse {
            proof: Proof::from_bytes(guess),
        };
        if let Ok(replies) = cluster.send(&mut conn, &response) {
            if matches!(replies.as_slice(), [Message::LoginOk { .. }]) {
                report.successes += 1;
            }
        }
    }
    report.notes =
        format!("{challenged_total}/{trials} attempts challenged, answered with random proofs");
    report
}

/// Whether `candidate` agrees with every captured share.
///
/// Segment shares pin down their byte range. An incomplete xor share set
/// constrains nothing: any digest is reachable by some choice of the missing
/// shares.
pub fn shares_consistent(candidate: &PasswordDigest, shares: &[DigestShare]) -> bool {
    let Some(first) = shares.first() else {
        return true;
    };
    match first.mode {
        SplitMode::Segment => shares.iter().all(|s| {
            let offset = s.mode.payload_offset(s.index, s.total);
            candidate
                .as_bytes()
                .get(offset..offset + s.payload.len())
                .is_some_and(|slice| slice == s.payload.as_slice())
        }),
        SplitMode::Xor => {
            if shares.len() < first.total {
                true
            } else {
                recombine_shares(shares).is_ok_and(|d| d == *candidate)
            }
        }
    }
}

/// Reads the stores of `compromised` nodes (0 = gateway) and searches the
/// dictionary for passwords consistent with the captured shares.
pub fn compromise_attack(
    cluster: &SimCluster,
    username: &str,
    compromised: &[usize],
    dictionary: &[String],
    truth: &str,
) -> AttackReport {
    let mut report = AttackReport::new(AttackKind::Compromise, cluster.n(), cluster.mode());
    report.compromised = compromised.len();
    report.dictionary_size = dictionary.len();
    report.trials = 1;
    let shares: Vec<DigestShare> = compromised
        .iter()
        .filter(|&&node| node < cluster.n())
        .filter_map(|&node| cluster.store(node).get(username).cloned())
        .collect();
    let captured: usize = shares.iter().map(|s| s.payload.len()).sum();
    let candidates = dictionary_search(dictionary, |d| shares_consistent(d, &shares));
    report.successes = usize::from(identified(&candidates, truth));
    report.notes = format!(
        "{} share(s), {captured} bytes captured; {} of {} words consistent",
        shares.len(),
        candidates.len(),
        dictionary.len()
    );
    report
}

/// Offline search over a passively captured transcript.
///
/// A registration transcript exposes the unsalted digest directly; a login
/// transcript exposes both nonces and a proof keyed by the digest, which is
/// enough to test each guess.
pub fn eavesdrop_dictionary_attack(
    transcript: &Transcript,
    dictionary: &[String],
    truth: &str,
) -> AttackReport {
    let messages = transcript.messages();
    let registered = messages.iter().find_map(|(dir, m)| match (dir, m) {
        (Direction::ToServer, Message::Register { digest, .. }) => Some(*digest),
        _ => None,
    });
    let client_nonce = messages.iter().find_map(|(_, m)| match m {
        Message::Login { client_nonce, .. } => Some(*client_nonce),
        _ => None,
    });
    let server_nonce = messages.iter().find_map(|(_, m)| match m {
        Message::Challenge { server_nonce } => Some(*server_nonce),
        _ => None,
    });
    let proof = messages.iter().find_map(|(_, m)| match m {
        Message::ChallengeResponse { proof } => Some(*proof),
        _ => None,
    });

    let (kind, candidates) = if let Some(target) = registered {
        (
            AttackKind::EavesdropRegister,
            dictionary_search(dictionary, |d| *d == target),
        )
    } else if let (Some(nc), Some(ns), Some(proof)) = (client_nonce, server_nonce, proof) {
        (
            AttackKind::EavesdropLogin,
            dictionary_search(dictionary, |d| compute_login_proof(&ns, &nc, d) == proof),
        )
    } else {
        (AttackKind::EavesdropLogin, Vec::new())
    };

    let mut report = AttackReport::new(kind, 0, SplitMode::default());
    report.dictionary_size = dictionary.len();
    report.trials = 1;
    report.successes = usize::from(identified(&candidates, truth));
    report.notes = format!(
        "{} of {} words match the captured material",
        candidates.len(),
        dictionary.len()
    );
    report
}

fn dictionary_search(
    dictionary: &[String],
    mut matches: impl FnMut(&PasswordDigest) -> bool,
) -> Vec<&str> {
    dictionary
        .iter()
        .filter(|w| compute_digest(w).is_ok_and(|d| matches(&d)))
        .map(String::as_str)
        .collect()
}

fn identified(candidates: &[&str], truth: &str) -> bool {
    matches!(candidates, [only] if *only == truth)
}

fn frame_kind(frame: &[u8]) -> Option<&'static str> {
    crate::protocol::decode_frame(frame)
        .ok()
        .flatten()
        .map(|(m, _)| m.kind())
}
