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

use serde::de::{self, Deserializer};
use serde::{Deserialize, Serialize, Serializer};
use thiserror::Error;

use crate::crypto::{
    CryptoError, DigestShare, Nonce, PasswordDigest, Proof, SplitMode, DIGEST_LEN, NONCE_LEN,
    PROOF_LEN,
};

pub const MAX_USERNAME_CHARS: usize = 64;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MessageError {
    #[error("username must be 1..={MAX_USERNAME_CHARS} characters without control characters")]
    InvalidUsername,
    #[error("invalid share: {0}")]
    InvalidShare(#[from] CryptoError),
}

/// Everything that crosses a socket. Serialized as a JSON object whose first
/// member is `"type"`; byte fields travel as lowercase hex.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum Message {
    Register {
        username: String,
        #[serde(rename = "digest_hex")]
        digest: PasswordDigest,
    },
    RegisterOk,
    RegisterErr {
        reason: String,
    },
    Login {
        username: String,
        #[serde(rename = "client_nonce_hex")]
        client_nonce: Nonce,
    },
    Challenge {
        #[serde(rename = "server_nonce_hex")]
        server_nonce: Nonce,
    },
    ChallengeResponse {
        #[serde(rename = "proof_hex")]
        proof: Proof,
    },
    LoginOk {
        #[serde(rename = "server_proof_hex")]
        server_proof: Proof,
    },
    LoginErr {
        reason: String,
    },
    Logout,
    LogoutOk,
    SharePut {
        username: String,
        index: usize,
        total: usize,
        mode: SplitMode,
        #[serde(rename = "payload_hex", with = "hex_bytes")]
        payload: Vec<u8>,
    },
    SharePutOk,
    SharePutErr {
        reason: String,
    },
    ShareGet {
        username: String,
    },
    ShareData {
        index: usize,
        total: usize,
        mode: SplitMode,
        #[serde(rename = "payload_hex", with = "hex_bytes")]
        payload: Vec<u8>,
    },
    ShareMissing,
    /// Compensating removal issued when a registration is rolled back.
    ShareDelete {
        username: String,
    },
    ShareDeleteOk,
}

impl Message {
    /// The snake_case wire tag.
    pub fn kind(&self) -> &'static str {
        match self {
            Message::Register { .. } => "register",
            Message::RegisterOk => "register_ok",
            Message::RegisterErr { .. } => "register_err",
            Message::Login { .. } => "login",
            Message::Challenge { .. } => "challenge",
            Message::ChallengeResponse { .. } => "challenge_response",
            Message::LoginOk { .. } => "login_ok",
            Message::LoginErr { .. } => "login_err",
            Message::Logout => "logout",
            Message::LogoutOk => "logout_ok",
            Message::SharePut { .. } => "share_put",
            Message::SharePutOk => "share_put_ok",
            Message::SharePutErr { .. } => "share_put_err",
            Message::ShareGet { .. } => "share_get",
            Message::ShareData { .. } => "share_data",
            Message::ShareMissing => "share_missing",
            Message::ShareDelete { .. } => "share_delete",
            Message::ShareDeleteOk => "share_delete_ok",
        }
    }

    /// Field-level invariants that the type system does not already enforce.
    pub fn validate(&self) -> Result<(), MessageError> {
        match self {
            Message::Register { username, .. }
            | Message::Login { username, .. }
            | Message::ShareGet { username }
            | Message::ShareDelete { username } => validate_username(username),
            Message::SharePut {
                username,
                index,
                total,
                mode,
                payload,
            } => {
                validate_username(username)?;
                share_from_parts(*index, *total, *mode, payload).validate()?;
                Ok(())
            }
            Message::ShareData {
                index,
                total,
                mode,
                payload,
            } => {
                share_from_parts(*index, *total, *mode, payload).validate()?;
                Ok(())
            }
            _ => Ok(()),
        }
    }

    pub fn share_put(username: &str, share: &DigestShare) -> Self {
        Message::SharePut {
            username: username.to_owned(),
            index: share.index,
            total: share.total,
            mode: share.mode,
            payload: share.payload.clone(),
        }
    }

    pub fn share_data(share: &DigestShare) -> Self {
        Message::ShareData {
            index: share.index,
            total: share.total,
            mode: share.mode,
            payload: share.payload.clone(),
        }
    }
}

fn share_from_parts(index: usize, total: usize, mode: SplitMode, payload: &[u8]) -> DigestShare {
    DigestShare {
        index,
        total,
        mode,
        payload: payload.to_vec(),
    }
}

pub fn validate_username(username: &str) -> Result<(), MessageError> {
    let chars = username.chars().count();
    if chars == 0 || chars > MAX_USERNAME_CHARS || username.chars().any(char::is_control) {
        return Err(MessageError::InvalidUsername);
    }
    Ok(())
}

fn decode_lower_hex(s: &str) -> Result<Vec<u8>, String> {
    if !s.len().is_multiple_of(2) {
        return Err("odd-length hex".into());
    }
    if !s.bytes().all(|b| matches!(b, b'0'..=b'9' | b'a'..=b'f')) {
        return Err("hex must be lowercase 0-9a-f".into());
    }
    hex::decode(s).map_err(|e| e.to_string())
}

mod hex_bytes {
    use super::*;

    pub fn serialize<S: Serializer>(bytes: &[u8], s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&hex::encode(bytes))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<u8>, D::Error> {
        let s = String::deserialize(d)?;
        decode_lower_hex(&s).map_err(de::Error::custom)
    }
}

macro_rules! hex_array_serde {
    ($ty:ty, $len:expr) => {
        impl Serialize for $ty {
            fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
                s.serialize_str(&self.to_hex())
            }
        }

        impl<'de> Deserialize<'de> for $ty {
            fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
                let s = String::deserialize(d)?;
                let bytes = decode_lower_hex(&s).map_err(de::Error::custom)?;
                let arr: [u8; $len] = bytes.try_into().map_err(|v: Vec<u8>| {
                    de::Error::custom(format!("expected {} bytes, got {}", $len, v.len()))
                })?;
                Ok(<$ty>::from_bytes(arr))
            }
        }
    };
}

hex_array_serde!(PasswordDigest, DIGEST_LEN);
hex_array_serde!(Nonce, NONCE_LEN);
hex_array_serde!(Proof, PROOF_LEN);

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn usernames() {
        assert!(validate_username("Alex").is_ok());
        assert!(validate_username(&"é".repeat(64)).is_ok());
        assert!(validate_username("").is_err());
        assert!(validate_username(&"a".repeat(65)).is_err());
        assert!(validate_username("bad\nname").is_err());
        assert!(validate_username("tab\tname").is_err());
    }

    #[test]
    fn hex_must_be_lowercase_and_sized() {
        let upper = format!(
            r#"{{"type":"challenge","server_nonce_hex":"{}"}}"#,
            "AB".repeat(16)
        );
        assert!(serde_json::from_str::<Message>(&upper).is_err());
        let short = format!(
            r#"{{"type":"challenge","server_nonce_hex":"{}"}}"#,
            "ab".repeat(15)
        );
        assert!(serde_json::from_str::<Message>(&short).is_err());
        let odd = format!(
            r#"{{"type":"challenge","server_nonce_hex":"{}a"}}"#,
            "ab".repeat(16)
        );
        assert!(serde_json::from_str::<Message>(&odd).is_err());
        let ok = format!(
            r#"{{"type":"challenge","server_nonce_hex":"{}"}}"#,
            "ab".repeat(16)
        );
        assert_eq!(
            serde_json::from_str::<Message>(&ok).unwrap(),
            Message::Challenge {
                server_nonce: Nonce::from_bytes([0xab; 16])
            }
        );
    }

    #[test]
    fn share_payload_length_checked() {
        let put = Message::SharePut {
            username: "Alex".into(),
            index: 2,
            total: 3,
            mode: SplitMode::Segment,
            payload: vec![0; 11],
        };
        assert!(put.validate().is_ok());
        let bad = Message::SharePut {
            username: "Alex".into(),
            index: 3,
            total: 3,
            mode: SplitMode::Segment,
            payload: vec![0; 11],
        };
        assert!(bad.validate().is_err());
        let xor = Message::ShareData {
            index: 1,
            total: 2,
            mode: SplitMode::Xor,
            payload: vec![0; 16],
        };
        assert!(xor.validate().is_err());
    }

    #[test]
    fn unknown_fields_rejected() {
        let extra = format!(
            r#"{{"type":"challenge_response","proof_hex":"{}","x":1}}"#,
            "00".repeat(32)
        );
        assert!(serde_json::from_str::<Message>(&extra).is_err());
        assert!(serde_json::from_str::<Message>(r#"{"type":"nope"}"#).is_err());
    }
}
