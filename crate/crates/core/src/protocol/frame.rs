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

//! Length-prefixed framing: a 4-byte big-endian payload length followed by
//! the compact JSON encoding of one [`Message`].

use std::io::{self, Read, Write};

use thiserror::Error;

use super::message::{Message, MessageError};

/// Largest accepted payload, in bytes.
pub const MAX_FRAME_LEN: usize = 1 << 20;

const HEADER_LEN: usize = 4;

#[derive(Debug, Error)]
pub enum FrameError {
    #[error("frame of {0} bytes exceeds the {MAX_FRAME_LEN} byte limit")]
    Oversize(usize),
    #[error("malformed frame: {0}")]
    Malformed(String),
    #[error("invalid message: {0}")]
    Invalid(#[from] MessageError),
}

#[derive(Debug, Error)]
pub enum ReadError {
    #[error(transparent)]
    Io(#[from] io::Error),
    #[error(transparent)]
    Frame(#[from] FrameError),
}

pub fn encode_frame(message: &Message) -> Result<Vec<u8>, FrameError> {
    message.validate()?;
    let payload = serde_json::to_vec(message).map_err(|e| FrameError::Malformed(e.to_string()))?;
    if payload.len() > MAX_FRAME_LEN {
        return Err(FrameError::Oversize(payload.len()));
    }
    let mut frame = Vec::with_capacity(HEADER_LEN + payload.len());
    frame.extend_from_slice(&(payload.len() as u32).to_be_bytes());
    frame.extend_from_slice(&payload);
    Ok(frame)
}

/// Decodes one frame from the front of `buf`.
///
/// Returns `Ok(None)` when the buffer does not yet hold a whole frame; in that
/// case nothing is consumed. Any error is fatal for the connection.
pub fn decode_frame(buf: &[u8]) -> Result<Option<(Message, &[u8])>, FrameError> {
    let Some(header) = buf.get(..HEADER_LEN) else {
        return Ok(None);
    };
    let len = u32::from_be_bytes(header.try_into().expect("4-byte header")) as usize;
    if len > MAX_FRAME_LEN {
        return Err(FrameError::Oversize(len));
    }
    let Some(payload) = buf.get(HEADER_LEN..HEADER_LEN + len) else {
        return Ok(None);
    };
    let message = decode_payload(payload)?;
    Ok(Some((message, &buf[HEADER_LEN + len..])))
}

fn decode_payload(payload: &[u8]) -> Result<Message, FrameError> {
    let message: Message =
        serde_json::from_slice(payload).map_err(|e| FrameError::Malformed(e.to_string()))?;
    message.validate()?;
    Ok(message)
}

/// Reads one message from a blocking stream. `Ok(None)` means the peer closed
/// the stream cleanly between frames.
pub fn read_message<R: Read>(reader: &mut R) -> Result<Option<Message>, ReadError> {
    let mut header = [0u8; HEADER_LEN];
    let mut filled = 0;
    while filled < HEADER_LEN {
        match reader.read(&mut header[filled..]) {
            Ok(0) if filled == 0 => return Ok(None),
            Ok(0) => return Err(io::Error::from(io::ErrorKind::UnexpectedEof).into()),
            Ok(k) => filled += k,
            Err(e) if e.kind() == io::ErrorKind::Interrupted => {}
            Err(e) => return Err(e.into()),
        }
    }
    let len = u32::from_be_bytes(header) as usize;
    if len > MAX_FRAME_LEN {
        return Err(FrameError::Oversize(len).into());
    }
    let mut payload = vec![0u8; len];
    reader.read_exact(&mut payload)?;
    Ok(Some(decode_payload(&payload)?))
}

pub fn write_message<W: Write>(writer: &mut W, message: &Message) -> Result<Vec<u8>, ReadError> {
    let frame = encode_frame(message)?;
    writer.write_all(&frame)?;
    writer.flush()?;
    Ok(frame)
}
