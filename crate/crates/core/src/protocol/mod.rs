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

//! Wire schema, framing, and the sans-I/O state machines for the client,
//! gateway and share-server roles.

pub mod client;
pub mod frame;
pub mod gateway;
pub mod message;
pub mod shareserver;

pub use client::{ClientError, ClientEvent, ClientSession, ClientStage, ClientStep};
pub use frame::{
    decode_frame, encode_frame, read_message, write_message, FrameError, ReadError, MAX_FRAME_LEN,
};
pub use gateway::{
    FetchOutcome, GatewayConnection, GatewayEffect, GatewaySession, GatewayStage, RegisterOutcome,
};
pub use message::{validate_username, Message, MessageError};
pub use shareserver::{shareserver_on_message, PutError, ShareBackend};

/// Which way a frame travelled.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Direction {
    ToServer,
    ToClient,
}
