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

//! Gateway side of one client connection.
//!
//! The machine never performs I/O. Storage and share fetches are requested as
//! [`GatewayEffect`]s; the runtime executes them and feeds the outcome back
//! through [`GatewayConnection::on_register_outcome`] and
//! [`GatewayConnection::on_shares`].

use rand::RngCore;

use super::message::Message;
use crate::crypto::{
    compute_login_proof, compute_server_proof, constant_time_eq, derive_session_key,
    generate_nonce, recombine_shares, DigestShare, Nonce, PasswordDigest, Proof, SessionKey,
};

pub const REASON_INVALID: &str = "invalid";
pub const REASON_PROTOCOL: &str = "protocol";
pub const REASON_UNAVAILABLE: &str = "unavailable";
pub const REASON_DUPLICATE: &str = "username already exists";
pub const REASON_ABORTED: &str = "registration aborted";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GatewayStage {
    AwaitShares,
    AwaitResponse,
    Granted,
    Denied,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum GatewayEffect {
    SplitAndStore {
        username: String,
        digest: PasswordDigest,
    },
    FetchShares {
        username: String,
    },
    Reply(Message),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RegisterOutcome {
    Stored,
    Duplicate,
    Aborted,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum FetchOutcome {
    /// Every reachable node answered and at least one held a share.
    Shares(Vec<DigestShare>),
    /// No node holds a share for the user.
    Unknown,
    /// A node could not be reached in time.
    Unavailable,
}

/// One login attempt.
#[derive(Debug, Clone)]
pub struct GatewaySession {
    stage: GatewayStage,
    username: String,
    client_nonce: Nonce,
    server_nonce: Nonce,
    expected_digest: Option<PasswordDigest>,
    dummy: bool,
    session_key: Option<SessionKey>,
}

impl GatewaySession {
    fn new<R: RngCore + ?Sized>(username: String, client_nonce: Nonce, rng: &mut R) -> Self {
        Self {
            stage: GatewayStage::AwaitShares,
            username,
            client_nonce,
            server_nonce: generate_nonce(rng),
            expected_digest: None,
            dummy: false,
            session_key: None,
        }
    }

    pub fn stage(&self) -> GatewayStage {
        self.stage
    }

    pub fn username(&self) -> &str {
        &self.username
    }

    pub fn client_nonce(&self) -> &Nonce {
        &self.client_nonce
    }

    pub fn server_nonce(&self) -> &Nonce {
        &self.server_nonce
    }

    pub fn expected_digest(&self) -> Option<&PasswordDigest> {
        self.expected_digest.as_ref()
    }

    /// True when the username had no recombinable verifier and the challenge
    /// was a decoy.
    pub fn is_dummy(&self) -> bool {
        self.dummy
    }

    /// Present only while `Granted`.
    pub fn session_key(&self) -> Option<&SessionKey> {
        self.session_key.as_ref()
    }

    fn verify(&mut self, proof: &Proof) -> Message {
        let verified = match (&self.expected_digest, self.dummy) {
            (Some(digest), false) => {
                let expected = compute_login_proof(&self.server_nonce, &self.client_nonce, digest);
                constant_time_eq(expected.as_bytes(), proof.as_bytes()).then_some(*digest)
            }
            _ => None,
        };
        match verified {
            Some(digest) => {
                self.stage = GatewayStage::Granted;
                self.session_key = Some(derive_session_key(
                    &self.server_nonce,
                    &self.client_nonce,
                    &digest,
                ));
                Message::LoginOk {
                    server_proof: compute_server_proof(
                        &self.server_nonce,
                        &self.client_nonce,
                        &digest,
                    ),
                }
            }
            None => {
                self.deny();
                login_err(REASON_INVALID)
            }
        }
    }

    fn deny(&mut self) {
        self.stage = GatewayStage::Denied;
        self.session_key = None;
    }
}

/// Per-connection gateway state. Holds at most one login attempt and at most
/// one registration in flight.
#[derive(Debug, Clone, Default)]
pub struct GatewayConnection {
    login: Option<GatewaySession>,
    pending_register: Option<String>,
}

impl GatewayConnection {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn session(&self) -> Option<&GatewaySession> {
        self.login.as_ref()
    }

    fn busy(&self) -> bool {
        self.pending_register.is_some()
            || matches!(
                self.login.as_ref().map(GatewaySession::stage),
                Some(GatewayStage::AwaitShares | GatewayStage::AwaitResponse)
            )
    }

    fn stage(&self) -> Option<GatewayStage> {
        self.login.as_ref().map(GatewaySession::stage)
    }

    pub fn on_client_message<R: RngCore + ?Sized>(
        &mut self,
        message: Message,
        rng: &mut R,
    ) -> Vec<GatewayEffect> {
        match message {
            Message::Register { username, digest } if !self.busy() => {
                self.pending_register = Some(username.clone());
                vec![GatewayEffect::SplitAndStore { username, digest }]
            }
            Message::Register { .. } => reply(Message::RegisterErr {
                reason: REASON_PROTOCOL.into(),
            }),
            Message::Login {
                username,
                client_nonce,
            } if !self.busy() && self.stage() != Some(GatewayStage::Granted) => {
                self.login = Some(GatewaySession::new(username.clone(), client_nonce, rng));
                vec![GatewayEffect::FetchShares { username }]
            }
            Message::ChallengeResponse { proof }
                if self.stage() == Some(GatewayStage::AwaitResponse) =>
            {
                let session = self.login.as_mut().expect("stage implies session");
                reply(session.verify(&proof))
            }
            Message::Logout if self.stage() == Some(GatewayStage::Granted) => {
                self.login = None;
                reply(Message::LogoutOk)
            }
            _ => self.protocol_error(),
        }
    }

    pub fn on_register_outcome(&mut self, outcome: RegisterOutcome) -> Vec<GatewayEffect> {
        if self.pending_register.take().is_none() {
            return Vec::new();
        }
        reply(match outcome {
            RegisterOutcome::Stored => Message::RegisterOk,
            RegisterOutcome::Duplicate => Message::RegisterErr {
                reason: REASON_DUPLICATE.into(),
            },
            RegisterOutcome::Aborted => Message::RegisterErr {
                reason: REASON_ABORTED.into(),
            },
        })
    }

    /// Completes step one of a login. Unknown users and unrecombinable share
    /// sets both get a decoy challenge; only an unreachable node ends the
    /// attempt here.
    pub fn on_shares(&mut self, outcome: FetchOutcome) -> Vec<GatewayEffect> {
        let Some(session) = self
            .login
            .as_mut()
            .filter(|s| s.stage == GatewayStage::AwaitShares)
        else {
            return Vec::new();
        };
        match outcome {
            FetchOutcome::Unavailable => {
                session.deny();
                return reply(login_err(REASON_UNAVAILABLE));
            }
            FetchOutcome::Unknown => session.dummy = true,
            FetchOutcome::Shares(shares) => match recombine_shares(&shares) {
                Ok(digest) => session.expected_digest = Some(digest),
                Err(_) => session.dummy = true,
            },
        }
        session.stage = GatewayStage::AwaitResponse;
        reply(Message::Challenge {
            server_nonce: session.server_nonce,
        })
    }

    fn protocol_error(&mut self) -> Vec<GatewayEffect> {
        if let Some(session) = self.login.as_mut() {
            session.deny();
        }
        reply(login_err(REASON_PROTOCOL))
    }
}

fn login_err(reason: &str) -> Message {
    Message::LoginErr {
        reason: reason.into(),
    }
}

fn reply(message: Message) -> Vec<GatewayEffect> {
    vec![GatewayEffect::Reply(message)]
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::crypto::{compute_digest, split_digest, SplitMode};
    use rand::SeedableRng;
    use rand_chacha::ChaCha20Rng;

    fn shares_for(password: &str, rng: &mut ChaCha20Rng) -> Vec<DigestShare> {
        split_digest(
            &compute_digest(password).unwrap(),
            2,
            SplitMode::Segment,
            rng,
        )
        .unwrap()
    }

    fn challenged(
        conn: &mut GatewayConnection,
        username: &str,
        fetch: FetchOutcome,
        rng: &mut ChaCha20Rng,
    ) -> (Nonce, Nonce) {
        let nc = generate_nonce(rng);
        let effects = conn.on_client_message(
            Message::Login {
                username: username.into(),
                client_nonce: nc,
            },
            rng,
        );
        assert_eq!(
            effects,
            vec![GatewayEffect::FetchShares {
                username: username.into()
            }]
        );
        let effects = conn.on_shares(fetch);
        let ns = conn.session().unwrap().server_nonce;
        assert_eq!(effects, reply(Message::Challenge { server_nonce: ns }));
        (ns, nc)
    }

    #[test]
    fn correct_password_granted() {
        let mut rng = ChaCha20Rng::seed_from_u64(1);
        let mut conn = GatewayConnection::new();
        let shares = shares_for("0504", &mut rng);
        let (ns, nc) = challenged(&mut conn, "Alex", FetchOutcome::Shares(shares), &mut rng);
        let d = compute_digest("0504").unwrap();
        let effects = conn.on_client_message(
            Message::ChallengeResponse {
                proof: compute_login_proof(&ns, &nc, &d),
            },
            &mut rng,
        );
        assert_eq!(
            effects,
            reply(Message::LoginOk {
                server_proof: compute_server_proof(&ns, &nc, &d)
            })
        );
        let session = conn.session().unwrap();
        assert_eq!(session.stage(), GatewayStage::Granted);
        assert_eq!(
            session.session_key(),
            Some(&derive_session_key(&ns, &nc, &d))
        );

        assert_eq!(
            conn.on_client_message(Message::Logout, &mut rng),
            reply(Message::LogoutOk)
        );
        assert!(conn.session().is_none());
    }

    #[test]
    fn wrong_password_denied() {
        let mut rng = ChaCha20Rng::seed_from_u64(2);
        let mut conn = GatewayConnection::new();
        let shares = shares_for("0504", &mut rng);
        let (ns, nc) = challenged(&mut conn, "Alex", FetchOutcome::Shares(shares), &mut rng);
        let wrong = compute_digest("6451").unwrap();
        let effects = conn.on_client_message(
            Message::ChallengeResponse {
                proof: compute_login_proof(&ns, &nc, &wrong),
            },
            &mut rng,
        );
        assert_eq!(effects, reply(login_err(REASON_INVALID)));
        assert_eq!(conn.session().unwrap().stage(), GatewayStage::Denied);
        assert!(conn.session().unwrap().session_key().is_none());
    }

    #[test]
    fn unknown_user_gets_decoy() {
        let mut rng = ChaCha20Rng::seed_from_u64(3);
        let mut conn = GatewayConnection::new();
        let (ns, nc) = challenged(&mut conn, "Zed", FetchOutcome::Unknown, &mut rng);
        assert!(conn.session().unwrap().is_dummy());
        // even a proof computed over an all-zero digest must fail
        let effects = conn.on_client_message(
            Message::ChallengeResponse {
                proof: compute_login_proof(&ns, &nc, &PasswordDigest::from_bytes([0; 32])),
            },
            &mut rng,
        );
        assert_eq!(effects, reply(login_err(REASON_INVALID)));
    }

    #[test]
    fn partial_share_set_is_decoy() {
        let mut rng = ChaCha20Rng::seed_from_u64(4);
        let mut conn = GatewayConnection::new();
        let mut shares = shares_for("0504", &mut rng);
        shares.pop();
        challenged(&mut conn, "Alex", FetchOutcome::Shares(shares), &mut rng);
        assert!(conn.session().unwrap().is_dummy());
    }

    #[test]
    fn unavailable_is_distinct() {
        let mut rng = ChaCha20Rng::seed_from_u64(5);
        let mut conn = GatewayConnection::new();
        conn.on_client_message(
            Message::Login {
                username: "Alex".into(),
                client_nonce: generate_nonce(&mut rng),
            },
            &mut rng,
        );
        assert_eq!(
            conn.on_shares(FetchOutcome::Unavailable),
            reply(login_err(REASON_UNAVAILABLE))
        );
        assert_eq!(conn.session().unwrap().stage(), GatewayStage::Denied);
    }

    #[test]
    fn register_flow() {
        let mut rng = ChaCha20Rng::seed_from_u64(6);
        let mut conn = GatewayConnection::new();
        let digest = compute_digest("0504").unwrap();
        let effects = conn.on_client_message(
            Message::Register {
                username: "Alex".into(),
                digest,
            },
            &mut rng,
        );
        assert_eq!(
            effects,
            vec![GatewayEffect::SplitAndStore {
                username: "Alex".into(),
                digest
            }]
        );
        assert_eq!(
            conn.on_register_outcome(RegisterOutcome::Stored),
            reply(Message::RegisterOk)
        );
        conn.on_client_message(
            Message::Register {
                username: "Alex".into(),
                digest,
            },
            &mut rng,
        );
        assert_eq!(
            conn.on_register_outcome(RegisterOutcome::Duplicate),
            reply(Message::RegisterErr {
                reason: REASON_DUPLICATE.into()
            })
        );
        assert!(conn.on_register_outcome(RegisterOutcome::Stored).is_empty());
    }

    #[test]
    fn out_of_order_denies() {
        let mut rng = ChaCha20Rng::seed_from_u64(7);
        let mut conn = GatewayConnection::new();
        let effects = conn.on_client_message(
            Message::ChallengeResponse {
                proof: Proof::from_bytes([0; 32]),
            },
            &mut rng,
        );
        assert_eq!(effects, reply(login_err(REASON_PROTOCOL)));

        let shares = shares_for("0504", &mut rng);
        conn.on_client_message(
            Message::Login {
                username: "Alex".into(),
                client_nonce: generate_nonce(&mut rng),
            },
            &mut rng,
        );
        // a second login while the first awaits shares
        let effects = conn.on_client_message(
            Message::Login {
                username: "Alex".into(),
                client_nonce: generate_nonce(&mut rng),
            },
            &mut rng,
        );
        assert_eq!(effects, reply(login_err(REASON_PROTOCOL)));
        assert_eq!(conn.session().unwrap().stage(), GatewayStage::Denied);
        // late shares are ignored once denied
        assert!(conn.on_shares(FetchOutcome::Shares(shares)).is_empty());
        assert_eq!(
            conn.on_client_message(Message::ShareMissing, &mut rng),
            reply(login_err(REASON_PROTOCOL))
        );
    }

    #[test]
    fn server_nonce_fixed_for_session() {
        let mut rng = ChaCha20Rng::seed_from_u64(8);
        let mut conn = GatewayConnection::new();
        conn.on_client_message(
            Message::Login {
                username: "Alex".into(),
                client_nonce: generate_nonce(&mut rng),
            },
            &mut rng,
        );
        let before = conn.session().unwrap().server_nonce;
        conn.on_shares(FetchOutcome::Unknown);
        assert_eq!(conn.session().unwrap().server_nonce, before);
    }
}
