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

//! Client side of registration and login.

use rand::RngCore;
use thiserror::Error;

use super::message::{validate_username, Message, MessageError};
use crate::crypto::{
    compute_digest, compute_login_proof, compute_server_proof, constant_time_eq,
    derive_session_key, generate_nonce, CryptoError, Nonce, PasswordDigest, SessionKey,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ClientStage {
    Idle,
    AwaitRegisterAck,
    AwaitChallenge,
    AwaitLoginOk,
    Authenticated,
    Failed,
}

impl ClientStage {
    pub fn is_terminal(&self) -> bool {
        matches!(self, ClientStage::Failed)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ClientEvent {
    Registered,
    LoginSucceeded,
    /// The gateway's proof did not verify: it does not hold our verifier.
    ServerAuthFailed,
    /// The gateway answered with `RegisterErr` or `LoginErr`.
    Rejected {
        reason: String,
    },
    LoggedOut,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ClientError {
    #[error(transparent)]
    Message(#[from] MessageError),
    #[error(transparent)]
    Crypto(#[from] CryptoError),
    #[error("unexpected {message} while in stage {stage:?}")]
    ProtocolViolation {
        stage: ClientStage,
        message: &'static str,
    },
    #[error("session is not authenticated")]
    NotAuthenticated,
}

/// What the caller should do after feeding a message in.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct ClientStep {
    pub reply: Option<Message>,
    pub event: Option<ClientEvent>,
}

#[derive(Debug, Clone)]
pub struct ClientSession {
    stage: ClientStage,
    username: String,
    digest: PasswordDigest,
    client_nonce: Option<Nonce>,
    server_nonce: Option<Nonce>,
    session_key: Option<SessionKey>,
}

impl ClientSession {
    fn new(username: &str, password: &str, stage: ClientStage) -> Result<Self, ClientError> {
        validate_username(username)?;
        Ok(Self {
            stage,
            username: username.to_owned(),
            digest: compute_digest(password)?,
            client_nonce: None,
            server_nonce: None,
            session_key: None,
        })
    }

    /// Begins registration. Only the digest leaves the client.
    pub fn start_register(username: &str, password: &str) -> Result<(Self, Message), ClientError> {
        let session = Self::new(username, password, ClientStage::AwaitRegisterAck)?;
        let msg = Message::Register {
            username: session.username.clone(),
            digest: session.digest,
        };
        Ok((session, msg))
    }

    pub fn start_login<R: RngCore + ?Sized>(
        username: &str,
        password: &str,
        rng: &mut R,
    ) -> Result<(Self, Message), ClientError> {
        let mut session = Self::new(username, password, ClientStage::AwaitChallenge)?;
        let nonce = generate_nonce(rng);
        session.client_nonce = Some(nonce);
        let msg = Message::Login {
            username: session.username.clone(),
            client_nonce: nonce,
        };
        Ok((session, msg))
    }

    pub fn stage(&self) -> ClientStage {
        self.stage
    }

    pub fn username(&self) -> &str {
        &self.username
    }

    pub fn client_nonce(&self) -> Option<&Nonce> {
        self.client_nonce.as_ref()
    }

    pub fn server_nonce(&self) -> Option<&Nonce> {
        self.server_nonce.as_ref()
    }

    /// Present only while `Authenticated`.
    pub fn session_key(&self) -> Option<&SessionKey> {
        self.session_key.as_ref()
    }

    /// Asks the gateway to end an authenticated session.
    pub fn logout(&self) -> Result<Message, ClientError> {
        if self.stage != ClientStage::Authenticated {
            return Err(ClientError::NotAuthenticated);
        }
        Ok(Message::Logout)
    }

    pub fn on_message(&mut self, message: Message) -> Result<ClientStep, ClientError> {
        use ClientStage::*;

        if self.stage.is_terminal() {
            return Err(self.violation(&message));
        }
        let step = match (self.stage, message) {
            (_, Message::LoginErr { reason }) | (_, Message::RegisterErr { reason }) => {
                self.fail();
                event(ClientEvent::Rejected { reason })
            }
            (AwaitRegisterAck, Message::RegisterOk) => {
                self.stage = Idle;
                event(ClientEvent::Registered)
            }
            (AwaitChallenge, Message::Challenge { server_nonce }) => {
                let client_nonce = self.client_nonce.expect("login session has a client nonce");
                self.server_nonce = Some(server_nonce);
                self.stage = AwaitLoginOk;
                ClientStep {
                    reply: Some(Message::ChallengeResponse {
                        proof: compute_login_proof(&server_nonce, &client_nonce, &self.digest),
                    }),
                    event: None,
                }
            }
            (AwaitLoginOk, Message::LoginOk { server_proof }) => {
                let (ns, nc) = self.nonces();
                let expected = compute_server_proof(&ns, &nc, &self.digest);
                if constant_time_eq(expected.as_bytes(), server_proof.as_bytes()) {
                    self.session_key = Some(derive_session_key(&ns, &nc, &self.digest));
                    self.stage = Authenticated;
                    event(ClientEvent::LoginSucceeded)
                } else {
                    self.fail();
                    event(ClientEvent::ServerAuthFailed)
                }
            }
            (Authenticated, Message::LogoutOk) => {
                self.session_key = None;
                self.stage = Idle;
                event(ClientEvent::LoggedOut)
            }
            (_, other) => {
                let err = self.violation(&other);
                self.fail();
                return Err(err);
            }
        };
        Ok(step)
    }

    fn nonces(&self) -> (Nonce, Nonce) {
        (
            self.server_nonce.expect("challenge received"),
            self.client_nonce.expect("login session has a client nonce"),
        )
    }

    fn fail(&mut self) {
        self.stage = ClientStage::Failed;
        self.session_key = None;
    }

    fn violation(&self, message: &Message) -> ClientError {
        ClientError::ProtocolViolation {
            stage: self.stage,
            message: message.kind(),
        }
    }
}

fn event(e: ClientEvent) -> ClientStep {
    ClientStep {
        reply: None,
        event: Some(e),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::crypto::Proof;
    use rand::SeedableRng;
    use rand_chacha::ChaCha20Rng;
    use sha2::{Digest, Sha256};

    // Independent recomputation: raw SHA-256 over 0x01 || ns || nc || SHA-256(password).
    fn oracle_login_proof(ns: &[u8; 16], nc: &[u8; 16], password: &str) -> [u8; 32] {
        let digest = Sha256::digest(password.as_bytes());
        let mut buf = vec![0x01];
        buf.extend_from_slice(ns);
        buf.extend_from_slice(nc);
        buf.extend_from_slice(&digest);
        Sha256::digest(&buf).into()
    }

    #[test]
    fn register_carries_digest() {
        let (session, msg) = ClientSession::start_register("Alex", "0504").unwrap();
        assert_eq!(session.stage(), ClientStage::AwaitRegisterAck);
        match msg {
            Message::Register { username, digest } => {
                assert_eq!(username, "Alex");
                assert_eq!(
                    digest.to_hex(),
                    "9514bda5f1da3a11c1ec2b4d40252bcc327a89cc4cc0f01f673048a551333d08"
                );
            }
            other => panic!("unexpected {other:?}"),
        }
        let (_, msg) = ClientSession::start_register("Rony", "6451").unwrap();
        assert!(matches!(msg, Message::Register { ref username, .. } if username == "Rony"));
    }

    #[test]
    fn invalid_inputs_rejected() {
        assert!(ClientSession::start_register("", "x").is_err());
        assert!(ClientSession::start_register("Alex", "").is_err());
        let mut rng = ChaCha20Rng::seed_from_u64(0);
        assert!(ClientSession::start_login("", "x", &mut rng).is_err());
    }

    #[test]
    fn login_nonces_differ() {
        let mut rng = ChaCha20Rng::seed_from_u64(5);
        let (a, msg) = ClientSession::start_login("Alex", "0504", &mut rng).unwrap();
        let (b, _) = ClientSession::start_login("Alex", "6451", &mut rng).unwrap();
        assert!(matches!(msg, Message::Login { .. }));
        assert_ne!(a.client_nonce(), b.client_nonce());
        assert_eq!(a.stage(), ClientStage::AwaitChallenge);
    }

    #[test]
    fn challenge_response_matches_oracle() {
        let mut rng = ChaCha20Rng::seed_from_u64(11);
        let (mut session, _) = ClientSession::start_login("Alex", "0504", &mut rng).unwrap();
        let ns = Nonce::from_bytes([0x42; 16]);
        let step = session
            .on_message(Message::Challenge { server_nonce: ns })
            .unwrap();
        let nc = *session.client_nonce().unwrap().as_bytes();
        let expected = oracle_login_proof(&[0x42; 16], &nc, "0504");
        assert_eq!(
            step.reply,
            Some(Message::ChallengeResponse {
                proof: Proof::from_bytes(expected)
            })
        );
        assert_eq!(session.stage(), ClientStage::AwaitLoginOk);
    }

    #[test]
    fn forged_server_proof_fails() {
        let mut rng = ChaCha20Rng::seed_from_u64(12);
        let (mut session, _) = ClientSession::start_login("Alex", "0504", &mut rng).unwrap();
        session
            .on_message(Message::Challenge {
                server_nonce: generate_nonce(&mut rng),
            })
            .unwrap();
        let mut forged = [0u8; 32];
        rng.fill_bytes(&mut forged);
        let step = session
            .on_message(Message::LoginOk {
                server_proof: Proof::from_bytes(forged),
            })
            .unwrap();
        assert_eq!(step.event, Some(ClientEvent::ServerAuthFailed));
        assert_eq!(session.stage(), ClientStage::Failed);
        assert!(session.session_key().is_none());
    }

    #[test]
    fn genuine_server_proof_authenticates() {
        let mut rng = ChaCha20Rng::seed_from_u64(13);
        let (mut session, _) = ClientSession::start_login("Alex", "0504", &mut rng).unwrap();
        let ns = generate_nonce(&mut rng);
        session
            .on_message(Message::Challenge { server_nonce: ns })
            .unwrap();
        let nc = *session.client_nonce().unwrap();
        let d = compute_digest("0504").unwrap();
        let step = session
            .on_message(Message::LoginOk {
                server_proof: compute_server_proof(&ns, &nc, &d),
            })
            .unwrap();
        assert_eq!(step.event, Some(ClientEvent::LoginSucceeded));
        assert_eq!(
            session.session_key(),
            Some(&derive_session_key(&ns, &nc, &d))
        );

        assert_eq!(session.logout().unwrap(), Message::Logout);
        let step = session.on_message(Message::LogoutOk).unwrap();
        assert_eq!(step.event, Some(ClientEvent::LoggedOut));
        assert_eq!(session.stage(), ClientStage::Idle);
        assert!(session.session_key().is_none());
    }

    #[test]
    fn out_of_order_is_violation() {
        let (mut session, _) = ClientSession::start_register("Alex", "0504").unwrap();
        session.on_message(Message::RegisterOk).unwrap();
        assert_eq!(session.stage(), ClientStage::Idle);
        let err = session
            .on_message(Message::Challenge {
                server_nonce: Nonce::from_bytes([0; 16]),
            })
            .unwrap_err();
        assert!(matches!(
            err,
            ClientError::ProtocolViolation {
                stage: ClientStage::Idle,
                ..
            }
        ));
        assert_eq!(session.stage(), ClientStage::Failed);
        assert!(session.on_message(Message::RegisterOk).is_err());
    }

    #[test]
    fn login_ok_cannot_skip_challenge() {
        let mut rng = ChaCha20Rng::seed_from_u64(14);
        let (mut session, _) = ClientSession::start_login("Alex", "0504", &mut rng).unwrap();
        assert!(session
            .on_message(Message::LoginOk {
                server_proof: Proof::from_bytes([0; 32])
            })
            .is_err());
        assert_eq!(session.stage(), ClientStage::Failed);
    }

    #[test]
    fn rejection_is_terminal() {
        let mut rng = ChaCha20Rng::seed_from_u64(15);
        let (mut session, _) = ClientSession::start_login("Alex", "6451", &mut rng).unwrap();
        let step = session
            .on_message(Message::LoginErr {
                reason: "invalid".into(),
            })
            .unwrap();
        assert_eq!(
            step.event,
            Some(ClientEvent::Rejected {
                reason: "invalid".into()
            })
        );
        assert_eq!(session.stage(), ClientStage::Failed);
    }
}
