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

//! Share-server request handling over an abstract store.

use std::fmt::Display;

use super::message::Message;
use crate::crypto::DigestShare;

pub const REASON_EXISTS: &str = "exists";
pub const REASON_MALFORMED: &str = "malformed";
pub const REASON_STORAGE: &str = "storage";
pub const REASON_UNSUPPORTED: &str = "unsupported";

#[derive(Debug)]
pub enum PutError<E> {
    /// The user already has a different share on this node.
    Conflict,
    Storage(E),
}

/// Minimal store surface a share server needs.
pub trait ShareBackend {
    type Error: Display;

    fn get_share(&self, username: &str) -> Option<DigestShare>;

    /// Stores `share`. Re-putting an identical share is a no-op success.
    fn put_share(
        &mut self,
        username: &str,
        share: DigestShare,
    ) -> Result<(), PutError<Self::Error>>;

    /// Removes the user's share, returning whether one existed.
    fn delete_share(&mut self, username: &str) -> Result<bool, Self::Error>;
}

pub fn shareserver_on_message<S: ShareBackend + ?Sized>(
    message: Message,
    store: &mut S,
) -> Message {
    match message {
        Message::SharePut {
            username,
            index,
            total,
            mode,
            payload,
        } => {
            let share = DigestShare {
                index,
                total,
                mode,
                payload,
            };
            if share.validate().is_err() {
                return put_err(REASON_MALFORMED);
            }
            match store.put_share(&username, share) {
                Ok(()) => Message::SharePutOk,
                Err(PutError::Conflict) => put_err(REASON_EXISTS),
                Err(PutError::Storage(e)) => {
                    log::error!("share store write failed: {e}");
                    put_err(REASON_STORAGE)
                }
            }
        }
        Message::ShareGet { username } => match store.get_share(&username) {
            Some(share) => Message::share_data(&share),
            None => Message::ShareMissing,
        },
        Message::ShareDelete { username } => match store.delete_share(&username) {
            Ok(_) => Message::ShareDeleteOk,
            Err(e) => {
                log::error!("share store delete failed: {e}");
                put_err(REASON_STORAGE)
            }
        },
        _ => put_err(REASON_UNSUPPORTED),
    }
}

fn put_err(reason: &str) -> Message {
    Message::SharePutErr {
        reason: reason.into(),
    }
}
