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

//! Durable per-node share storage.
//!
//! The on-disk format is JSON lines, appended only:
//!
//! ```text
//! {"username":"Alex","index":1,"total":2,"mode":"segment","payload":"9514..."}
//! {"op":"del","username":"Alex"}
//! ```
//!
//! Replaying the file in order rebuilds the map: the last put for a username
//! wins and a delete record removes it. A torn final line (no trailing
//! newline) is discarded on open.

use std::collections::BTreeMap;
use std::fs::{File, OpenOptions};
use std::io::{self, Read, Write};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::crypto::{CryptoError, DigestShare, SplitMode};
use crate::protocol::{PutError, ShareBackend};

#[derive(Debug, Error)]
pub enum StoreError {
    #[error("a different share already exists for this user")]
    Exists,
    #[error("invalid share: {0}")]
    Invalid(#[from] CryptoError),
    #[error("store I/O failed: {0}")]
    Io(#[from] io::Error),
    #[error("store file corrupt at line {line}: {reason}")]
    Corrupt { line: usize, reason: String },
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct PutRecord {
    username: String,
    index: usize,
    total: usize,
    mode: SplitMode,
    payload: String,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
enum DeleteOp {
    Del,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct DeleteRecord {
    op: DeleteOp,
    username: String,
}

#[derive(Debug, Deserialize)]
#[serde(untagged)]
enum Record {
    Delete(DeleteRecord),
    Put(PutRecord),
}

/// Map of username to this node's share, optionally backed by a file.
#[derive(Debug, Default)]
pub struct ShareStore {
    shares: BTreeMap<String, DigestShare>,
    file: Option<File>,
    path: Option<PathBuf>,
}

impl ShareStore {
    /// A store without persistence, used by the simulator.
    pub fn in_memory() -> Self {
        Self::default()
    }

    /// Opens (creating if needed) the record file at `path` and replays it.
    pub fn open(path: impl AsRef<Path>) -> Result<Self, StoreError> {
        let path = path.as_ref();
        let mut file = OpenOptions::new()
            .read(true)
            .append(true)
            .create(true)
            .open(path)?;
        let mut contents = String::new();
        file.read_to_string(&mut contents)?;

        let mut shares = BTreeMap::new();
        let mut lines = contents.split_inclusive('\n').enumerate().peekable();
        let mut good_len = 0;
        while let Some((i, raw)) = lines.next() {
            let complete = raw.ends_with('\n');
            let line = raw.trim_end_matches('\n');
            let parsed = if line.trim().is_empty() {
                Ok(None)
            } else {
                parse_record(line).map(Some)
            };
            match parsed {
                Ok(record) => {
                    if let Some(record) = record {
                        apply(&mut shares, record);
                    }
                    good_len += raw.len();
                }
                Err(_) if !complete && lines.peek().is_none() => {
                    log::warn!("discarding torn trailing record in {}", path.display());
                    file.set_len(good_len as u64)?;
                }
                Err(reason) => {
                    return Err(StoreError::Corrupt {
                        line: i + 1,
                        reason,
                    })
                }
            }
        }
        if good_len > 0 && !contents[..good_len].ends_with('\n') {
            // complete final record that lacked its newline
            file.write_all(b"\n")?;
        }

        Ok(Self {
            shares,
            file: Some(file),
            path: Some(path.to_owned()),
        })
    }

    pub fn path(&self) -> Option<&Path> {
        self.path.as_deref()
    }

    pub fn get(&self, username: &str) -> Option<&DigestShare> {
        self.shares.get(username)
    }

    pub fn len(&self) -> usize {
        self.shares.len()
    }

    pub fn is_empty(&self) -> bool {
        self.shares.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &DigestShare)> {
        self.shares.iter().map(|(k, v)| (k.as_str(), v))
    }

    /// Stores a share. An identical existing share is accepted without a new
    /// record; a different one is refused with [`StoreError::Exists`].
    pub fn put(&mut self, username: &str, share: DigestShare) -> Result<(), StoreError> {
        share.validate()?;
        match self.shares.get(username) {
            Some(existing) if *existing == share => Ok(()),
            Some(_) => Err(StoreError::Exists),
            None => self.append_put(username, share),
        }
    }

    /// Like [`put`](Self::put) but refuses any existing share, identical or not.
    pub fn insert_new(&mut self, username: &str, share: DigestShare) -> Result<(), StoreError> {
        share.validate()?;
        if self.shares.contains_key(username) {
            return Err(StoreError::Exists);
        }
        self.append_put(username, share)
    }

    /// Appends a delete record if the user has a share.
    pub fn delete(&mut self, username: &str) -> Result<bool, StoreError> {
        if !self.shares.contains_key(username) {
            return Ok(false);
        }
        let record = DeleteRecord {
            op: DeleteOp::Del,
            username: username.to_owned(),
        };
        self.append_line(&serde_json::to_string(&record).expect("record serializes"))?;
        self.shares.remove(username);
        Ok(true)
    }

    fn append_put(&mut self, username: &str, share: DigestShare) -> Result<(), StoreError> {
        let record = PutRecord {
            username: username.to_owned(),
            index: share.index,
            total: share.total,
            mode: share.mode,
            payload: hex::encode(&share.payload),
        };
        self.append_line(&serde_json::to_string(&record).expect("record serializes"))?;
        self.shares.insert(username.to_owned(), share);
        Ok(())
    }

    fn append_line(&mut self, line: &str) -> Result<(), StoreError> {
        if let Some(file) = self.file.as_mut() {
            let mut buf = Vec::with_capacity(line.len() + 1);
            buf.extend_from_slice(line.as_bytes());
            buf.push(b'\n');
            file.write_all(&buf)?;
            file.sync_data()?;
        }
        Ok(())
    }
}

fn parse_record(line: &str) -> Result<Record, String> {
    let record: Record = serde_json::from_str(line).map_err(|e| e.to_string())?;
    if let Record::Put(put) = &record {
        to_share(put)?.validate().map_err(|e| e.to_string())?;
    }
    Ok(record)
}

fn to_share(put: &PutRecord) -> Result<DigestShare, String> {
    if put.payload.bytes().any(|b| b.is_ascii_uppercase()) {
        return Err("payload hex must be lowercase".into());
    }
    Ok(DigestShare {
        index: put.index,
        total: put.total,
        mode: put.mode,
        payload: hex::decode(&put.payload).map_err(|e| e.to_string())?,
    })
}

fn apply(shares: &mut BTreeMap<String, DigestShare>, record: Record) {
    match record {
        Record::Delete(del) => {
            shares.remove(&del.username);
        }
        Record::Put(put) => {
            let share = to_share(&put).expect("validated during parse");
            shares.insert(put.username, share);
        }
    }
}

impl ShareBackend for ShareStore {
    type Error = StoreError;

    fn get_share(&self, username: &str) -> Option<DigestShare> {
        self.get(username).cloned()
    }

    fn put_share(
        &mut self,
        username: &str,
        share: DigestShare,
    ) -> Result<(), PutError<StoreError>> {
        self.put(username, share).map_err(|e| match e {
            StoreError::Exists => PutError::Conflict,
            other => PutError::Storage(other),
        })
    }

    fn delete_share(&mut self, username: &str) -> Result<bool, StoreError> {
        self.delete(username)
    }
}
