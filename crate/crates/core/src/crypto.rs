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

//! Deterministic primitives: password digests, digest splitting and
//! recombination, nonces, proof and session-key derivation.
//!
//! Everything here is a pure function of its inputs. Randomness is always
//! passed in explicitly so callers choose between the OS source and a seeded
//! generator.

use std::fmt;

use rand::RngCore;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

pub const DIGEST_LEN: usize = 32;
pub const NONCE_LEN: usize = 16;
pub const PROOF_LEN: usize = 32;
pub const SESSION_KEY_LEN: usize = 32;

/// Largest share count the segment split supports: one byte per share.
pub const MAX_SEGMENT_SHARES: usize = DIGEST_LEN;

const DOMAIN_LOGIN_PROOF: u8 = 0x01;
const DOMAIN_SESSION_KEY: u8 = 0x02;
const DOMAIN_SERVER_PROOF: u8 = 0x03;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CryptoError {
    #[error("password must not be empty")]
    EmptyPassword,
    #[error("share count {n} is out of range for {mode} mode")]
    ShareCount { n: usize, mode: SplitMode },
    #[error("share set is empty")]
    EmptyShareSet,
    #[error("share {index} is missing")]
    MissingShare { index: usize },
    #[error("share {index} appears more than once")]
    DuplicateShare { index: usize },
    #[error("share {index} is out of range 1..={total}")]
    IndexOutOfRange { index: usize, total: usize },
    #[error("shares disagree on total or mode")]
    InconsistentShares,
    #[error("share {index} payload is {actual} bytes, expected {expected}")]
    PayloadLength {
        index: usize,
        expected: usize,
        actual: usize,
    },
}

/// SHA-256 of a password's UTF-8 bytes. This is the verifier; it is only
/// ever stored in split form.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct PasswordDigest([u8; DIGEST_LEN]);

impl PasswordDigest {
    pub const fn from_bytes(bytes: [u8; DIGEST_LEN]) -> Self {
        Self(bytes)
    }

    pub fn as_bytes(&self) -> &[u8; DIGEST_LEN] {
        &self.0
    }

    pub fn to_hex(&self) -> String {
        hex::encode(self.0)
    }
}

impl fmt::Debug for PasswordDigest {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "PasswordDigest({})", self.to_hex())
    }
}

/// 128-bit per-session freshness value.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct Nonce([u8; NONCE_LEN]);

impl Nonce {
    pub const fn from_bytes(bytes: [u8; NONCE_LEN]) -> Self {
        Self(bytes)
    }

    pub fn as_bytes(&self) -> &[u8; NONCE_LEN] {
        &self.0
    }

    pub fn to_hex(&self) -> String {
        hex::encode(self.0)
    }
}

impl fmt::Debug for Nonce {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Nonce({})", self.to_hex())
    }
}

/// Login or server proof.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct Proof([u8; PROOF_LEN]);

impl Proof {
    pub const fn from_bytes(bytes: [u8; PROOF_LEN]) -> Self {
        Self(bytes)
    }

    pub fn as_bytes(&self) -> &[u8; PROOF_LEN] {
        &self.0
    }

    pub fn to_hex(&self) -> String {
        hex::encode(self.0)
    }
}

impl fmt::Debug for Proof {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Proof({})", self.to_hex())
    }
}

/// Shared secret derived on both ends after a successful login. Never sent
/// on the wire, and its `Debug` output is redacted.
#[derive(Clone, PartialEq, Eq)]
pub struct SessionKey([u8; SESSION_KEY_LEN]);

impl SessionKey {
    pub fn as_bytes(&self) -> &[u8; SESSION_KEY_LEN] {
        &self.0
    }
}

impl fmt::Debug for SessionKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("SessionKey(..)")
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SplitMode {
    /// Contiguous byte slices of the digest.
    #[default]
    Segment,
    /// Additive sharing: all payloads XOR to the digest.
    Xor,
}

impl SplitMode {
    pub fn as_str(&self) -> &'static str {
        match self {
            SplitMode::Segment => "segment",
            SplitMode::Xor => "xor",
        }
    }

    /// Whether `n` shares is a valid split for this mode.
    pub fn supports(&self, n: usize) -> bool {
        match self {
            SplitMode::Segment => (1..=MAX_SEGMENT_SHARES).contains(&n),
            SplitMode::Xor => n >= 1,
        }
    }

    /// Payload length of share `index` (1-based) in a set of `total`.
    pub fn payload_len(&self, index: usize, total: usize) -> usize {
        match self {
            SplitMode::Segment => {
                let base = DIGEST_LEN / total;
                if index <= DIGEST_LEN % total {
                    base + 1
                } else {
                    base
                }
            }
            SplitMode::Xor => DIGEST_LEN,
        }
    }

    /// Byte offset of segment `index` within the digest. Always 0 for xor.
    pub fn payload_offset(&self, index: usize, total: usize) -> usize {
        match self {
            SplitMode::Segment => (1..index).map(|i| self.payload_len(i, total)).sum(),
            SplitMode::Xor => 0,
        }
    }
}

impl fmt::Display for SplitMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for SplitMode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "segment" => Ok(SplitMode::Segment),
            "xor" => Ok(SplitMode::Xor),
            other => Err(format!(
                "unknown split mode '{other}' (expected segment or xor)"
            )),
        }
    }
}

/// One fragment of a split digest.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DigestShare {
    pub index: usize,
    pub total: usize,
    pub mode: SplitMode,
    pub payload: Vec<u8>,
}

impl DigestShare {
    /// Checks index range, mode/total compatibility and payload length.
    pub fn validate(&self) -> Result<(), CryptoError> {
        if !self.mode.supports(self.total) {
            return Err(CryptoError::ShareCount {
                n: self.total,
                mode: self.mode,
            });
        }
        if self.index == 0 || self.index > self.total {
            return Err(CryptoError::IndexOutOfRange {
                index: self.index,
                total: self.total,
            });
        }
        let expected = self.mode.payload_len(self.index, self.total);
        if self.payload.len() != expected {
            return Err(CryptoError::PayloadLength {
                index: self.index,
                expected,
                actual: self.payload.len(),
            });
        }
        Ok(())
    }
}

pub fn compute_digest(password: &str) -> Result<PasswordDigest, CryptoError> {
    if password.is_empty() {
        return Err(CryptoError::EmptyPassword);
    }
    Ok(PasswordDigest(Sha256::digest(password.as_bytes()).into()))
}

/// Splits a digest into `n` shares.
///
/// Segment mode hands out contiguous slices, with the first `32 mod n`
/// shares one byte longer. Xor mode draws shares `1..n` from `rng` and sets
/// the last share so that all payloads XOR to the digest; segment mode does
/// not touch `rng`.
pub fn split_digest<R: RngCore + ?Sized>(
    digest: &PasswordDigest,
    n: usize,
    mode: SplitMode,
    rng: &mut R,
) -> Result<Vec<DigestShare>, CryptoError> {
    if !mode.supports(n) {
        return Err(CryptoError::ShareCount { n, mode });
    }
    let shares = match mode {
        SplitMode::Segment => {
            let mut offset = 0;
            (1..=n)
                .map(|index| {
                    let len = mode.payload_len(index, n);
                    let payload = digest.0[offset..offset + len].to_vec();
                    offset += len;
                    DigestShare {
                        index,
                        total: n,
                        mode,
                        payload,
                    }
                })
                .collect()
        }
        SplitMode::Xor => {
            let mut last = digest.0;
            let mut shares = Vec::with_capacity(n);
            for index in 1..n {
                let mut payload = vec![0u8; DIGEST_LEN];
                rng.fill_bytes(&mut payload);
                for (acc, b) in last.iter_mut().zip(&payload) {
                    *acc ^= b;
                }
                shares.push(DigestShare {
                    index,
                    total: n,
                    mode,
                    payload,
                });
            }
            shares.push(DigestShare {
                index: n,
                total: n,
                mode,
                payload: last.to_vec(),
            });
            shares
        }
    };
    Ok(shares)
}

/// Rebuilds the digest from a complete share set, in any order.
pub fn recombine_shares(shares: &[DigestShare]) -> Result<PasswordDigest, CryptoError> {
    let first = shares.first().ok_or(CryptoError::EmptyShareSet)?;
    let (total, mode) = (first.total, first.mode);
    if shares.iter().any(|s| s.total != total || s.mode != mode) {
        return Err(CryptoError::InconsistentShares);
    }
    if !mode.supports(total) {
        return Err(CryptoError::ShareCount { n: total, mode });
    }

    let mut slots: Vec<Option<&DigestShare>> = vec![None; total];
    for share in shares {
        if share.index == 0 || share.index > total {
            return Err(CryptoError::IndexOutOfRange {
                index: share.index,
                total,
            });
        }
        let slot = &mut slots[share.index - 1];
        if slot.is_some() {
            return Err(CryptoError::DuplicateShare { index: share.index });
        }
        *slot = Some(share);
    }
    let ordered = slots
        .iter()
        .enumerate()
        .map(|(i, s)| s.ok_or(CryptoError::MissingShare { index: i + 1 }))
        .collect::<Result<Vec<_>, _>>()?;
    for share in &ordered {
        share.validate()?;
    }

    let mut out = [0u8; DIGEST_LEN];
    match mode {
        SplitMode::Segment => {
            let mut offset = 0;
            for share in ordered {
                out[offset..offset + share.payload.len()].copy_from_slice(&share.payload);
                offset += share.payload.len();
            }
        }
        SplitMode::Xor => {
            for share in ordered {
                for (acc, b) in out.iter_mut().zip(&share.payload) {
                    *acc ^= b;
                }
            }
        }
    }
    Ok(PasswordDigest(out))
}

pub fn generate_nonce<R: RngCore + ?Sized>(rng: &mut R) -> Nonce {
    let mut bytes = [0u8; NONCE_LEN];
    rng.fill_bytes(&mut bytes);
    Nonce(bytes)
}

fn transcript_hash(
    domain: u8,
    server_nonce: &Nonce,
    client_nonce: &Nonce,
    digest: &PasswordDigest,
) -> [u8; 32] {
    let mut hasher = Sha256::new();
    hasher.update([domain]);
    hasher.update(server_nonce.0);
    hasher.update(client_nonce.0);
    hasher.update(digest.0);
    hasher.finalize().into()
}

/// Client's answer to a challenge: `SHA-256(0x01 || ns || nc || digest)`.
pub fn compute_login_proof(
    server_nonce: &Nonce,
    client_nonce: &Nonce,
    digest: &PasswordDigest,
) -> Proof {
    Proof(transcript_hash(
        DOMAIN_LOGIN_PROOF,
        server_nonce,
        client_nonce,
        digest,
    ))
}

/// Gateway's proof of holding the verifier: `SHA-256(0x03 || ns || nc || digest)`.
pub fn compute_server_proof(
    server_nonce: &Nonce,
    client_nonce: &Nonce,
    digest: &PasswordDigest,
) -> Proof {
    Proof(transcript_hash(
        DOMAIN_SERVER_PROOF,
        server_nonce,
        client_nonce,
        digest,
    ))
}

/// `SHA-256(0x02 || ns || nc || digest)`
pub fn derive_session_key(
    server_nonce: &Nonce,
    client_nonce: &Nonce,
    digest: &PasswordDigest,
) -> SessionKey {
    SessionKey(transcript_hash(
        DOMAIN_SESSION_KEY,
        server_nonce,
        client_nonce,
        digest,
    ))
}

/// Equality that inspects every byte even after a mismatch. Lengths are
/// treated as public.
pub fn constant_time_eq(a: &[u8], b: &[u8]) -> bool {
    if a.len() != b.len() {
        return false;
    }
    let diff = a.iter().zip(b).fold(0u8, |acc, (x, y)| acc | (x ^ y));
    std::hint::black_box(diff) == 0
}
