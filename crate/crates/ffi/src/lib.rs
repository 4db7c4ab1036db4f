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

//! C ABI for splitauth.
//!
//! Every fallible function returns an [`SaStatus`]. On failure a message is
//! available from [`sa_last_error`] on the same thread. Objects handed out
//! through `**out` parameters are owned by the caller and must be released
//! with the matching `*_free` function.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;
use std::slice;

use rand::rngs::OsRng;

use splitauth::crypto::{
    self, DigestShare, Nonce, PasswordDigest, SplitMode, DIGEST_LEN, NONCE_LEN, PROOF_LEN,
    SESSION_KEY_LEN,
};
use splitauth::harness::run_comparison_report;
use splitauth::protocol::{
    decode_frame, encode_frame, ClientEvent, ClientSession, ClientStage, FrameError, Message,
};

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SaStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    InvalidUtf8 = 3,
    Crypto = 4,
    /// More bytes are needed before a whole frame is available.
    Incomplete = 5,
    Oversize = 6,
    Malformed = 7,
    Protocol = 8,
    NotAuthenticated = 9,
    Harness = 10,
    Panic = 99,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SaSplitMode {
    Segment = 0,
    Xor = 1,
}

impl From<SaSplitMode> for SplitMode {
    fn from(m: SaSplitMode) -> Self {
        match m {
            SaSplitMode::Segment => SplitMode::Segment,
            SaSplitMode::Xor => SplitMode::Xor,
        }
    }
}

impl From<SplitMode> for SaSplitMode {
    fn from(m: SplitMode) -> Self {
        match m {
            SplitMode::Segment => SaSplitMode::Segment,
            SplitMode::Xor => SaSplitMode::Xor,
        }
    }
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SaClientStage {
    Idle = 0,
    AwaitRegisterAck = 1,
    AwaitChallenge = 2,
    AwaitLoginOk = 3,
    Authenticated = 4,
    Failed = 5,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SaClientEvent {
    None = 0,
    Registered = 1,
    LoginSucceeded = 2,
    ServerAuthFailed = 3,
    Rejected = 4,
    LoggedOut = 5,
}

/// Rust-allocated bytes. Release with [`sa_buffer_free`].
#[repr(C)]
pub struct SaBuffer {
    pub data: *mut u8,
    pub len: usize,
}

impl SaBuffer {
    fn empty() -> Self {
        Self {
            data: ptr::null_mut(),
            len: 0,
        }
    }

    fn from_vec(v: Vec<u8>) -> Self {
        let boxed = v.into_boxed_slice();
        let len = boxed.len();
        let data = Box::into_raw(boxed) as *mut u8;
        Self { data, len }
    }
}

/// Opaque list of digest shares.
pub struct SaShareSet {
    shares: Vec<DigestShare>,
}

/// Opaque client protocol session.
pub struct SaClient {
    session: ClientSession,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: impl Into<String>) {
    let msg = CString::new(msg.into().replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(msg));
}

fn fail(status: SaStatus, msg: impl Into<String>) -> SaStatus {
    set_error(msg);
    status
}

fn guard(f: impl FnOnce() -> SaStatus) -> SaStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(status) => status,
        Err(_) => fail(SaStatus::Panic, "internal panic"),
    }
}

/// Message for the most recent failure on this thread, or NULL. Valid until
/// the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn sa_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

unsafe fn read_str<'a>(p: *const c_char) -> Result<&'a str, SaStatus> {
    if p.is_null() {
        return Err(fail(SaStatus::NullPointer, "null string"));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| fail(SaStatus::InvalidUtf8, "string is not UTF-8"))
}

unsafe fn read_array<const N: usize>(p: *const u8) -> Result<[u8; N], SaStatus> {
    if p.is_null() {
        return Err(fail(SaStatus::NullPointer, "null byte pointer"));
    }
    let mut out = [0u8; N];
    ptr::copy_nonoverlapping(p, out.as_mut_ptr(), N);
    Ok(out)
}

unsafe fn write_array<const N: usize>(p: *mut u8, bytes: &[u8; N]) -> Result<(), SaStatus> {
    if p.is_null() {
        return Err(fail(SaStatus::NullPointer, "null output pointer"));
    }
    ptr::copy_nonoverlapping(bytes.as_ptr(), p, N);
    Ok(())
}

unsafe fn read_bytes<'a>(p: *const u8, len: usize) -> Result<&'a [u8], SaStatus> {
    if len == 0 {
        return Ok(&[]);
    }
    if p.is_null() {
        return Err(fail(SaStatus::NullPointer, "null byte pointer"));
    }
    Ok(slice::from_raw_parts(p, len))
}

macro_rules! tri {
    ($e:expr) => {
        match $e {
            Ok(v) => v,
            Err(status) => return status,
        }
    };
}

fn crypto_err(e: crypto::CryptoError) -> SaStatus {
    fail(SaStatus::Crypto, e.to_string())
}

fn frame_err(e: FrameError) -> SaStatus {
    let status = match e {
        FrameError::Oversize(_) => SaStatus::Oversize,
        _ => SaStatus::Malformed,
    };
    fail(status, e.to_string())
}

/// Writes SHA-256 of `password` (UTF-8, non-empty) to `out[32]`.
///
/// # Safety
/// `password` is a NUL-terminated string; `out` has room for 32 bytes.
#[no_mangle]
pub unsafe extern "C" fn sa_compute_digest(password: *const c_char, out: *mut u8) -> SaStatus {
    guard(|| {
        let password = tri!(read_str(password));
        let digest = tri!(crypto::compute_digest(password).map_err(crypto_err));
        tri!(write_array::<DIGEST_LEN>(out, digest.as_bytes()));
        SaStatus::Ok
    })
}

/// Splits `digest[32]` into `n` shares using OS randomness.
///
/// # Safety
/// `digest` points to 32 bytes; `out` is writable.
#[no_mangle]
pub unsafe extern "C" fn sa_split_digest(
    digest: *const u8,
    n: usize,
    mode: SaSplitMode,
    out: *mut *mut SaShareSet,
) -> SaStatus {
    guard(|| {
        if out.is_null() {
            return fail(SaStatus::NullPointer, "null output pointer");
        }
        let digest = PasswordDigest::from_bytes(tri!(read_array::<DIGEST_LEN>(digest)));
        let shares =
            tri!(crypto::split_digest(&digest, n, mode.into(), &mut OsRng).map_err(crypto_err));
        *out = Box::into_raw(Box::new(SaShareSet { shares }));
        SaStatus::Ok
    })
}

/// An empty share set, to be filled with [`sa_share_set_push`].
#[no_mangle]
pub extern "C" fn sa_share_set_new() -> *mut SaShareSet {
    Box::into_raw(Box::new(SaShareSet { shares: Vec::new() }))
}

/// # Safety
/// `set` is NULL or a live share set.
#[no_mangle]
pub unsafe extern "C" fn sa_share_set_len(set: *const SaShareSet) -> usize {
    set.as_ref().map_or(0, |s| s.shares.len())
}

/// Describes share `i`. `payload` is borrowed from the set and stays valid
/// until the set is modified or freed.
///
/// # Safety
/// `set` is a live share set; every output pointer is writable.
#[no_mangle]
pub unsafe extern "C" fn sa_share_set_get(
    set: *const SaShareSet,
    i: usize,
    index: *mut usize,
    total: *mut usize,
    mode: *mut SaSplitMode,
    payload: *mut *const u8,
    payload_len: *mut usize,
) -> SaStatus {
    guard(|| {
        let Some(set) = set.as_ref() else {
            return fail(SaStatus::NullPointer, "null share set");
        };
        if index.is_null()
            || total.is_null()
            || mode.is_null()
            || payload.is_null()
            || payload_len.is_null()
        {
            return fail(SaStatus::NullPointer, "null output pointer");
        }
        let Some(share) = set.shares.get(i) else {
            return fail(SaStatus::InvalidArgument, format!("share {i} out of range"));
        };
        *index = share.index;
        *total = share.total;
        *mode = share.mode.into();
        *payload = share.payload.as_ptr();
        *payload_len = share.payload.len();
        SaStatus::Ok
    })
}

/// Appends a copy of the described share after checking its shape.
///
/// # Safety
/// `set` is a live share set; `payload` points to `payload_len` bytes.
#[no_mangle]
pub unsafe extern "C" fn sa_share_set_push(
    set: *mut SaShareSet,
    index: usize,
    total: usize,
    mode: SaSplitMode,
    payload: *const u8,
    payload_len: usize,
) -> SaStatus {
    guard(|| {
        let Some(set) = set.as_mut() else {
            return fail(SaStatus::NullPointer, "null share set");
        };
        let share = DigestShare {
            index,
            total,
            mode: mode.into(),
            payload: tri!(read_bytes(payload, payload_len)).to_vec(),
        };
        tri!(share.validate().map_err(crypto_err));
        set.shares.push(share);
        SaStatus::Ok
    })
}

/// Rebuilds the digest from a complete share set into `out[32]`.
///
/// # Safety
/// `set` is a live share set; `out` has room for 32 bytes.
#[no_mangle]
pub unsafe extern "C" fn sa_recombine(set: *const SaShareSet, out: *mut u8) -> SaStatus {
    guard(|| {
        let Some(set) = set.as_ref() else {
            return fail(SaStatus::NullPointer, "null share set");
        };
        let digest = tri!(crypto::recombine_shares(&set.shares).map_err(crypto_err));
        tri!(write_array::<DIGEST_LEN>(out, digest.as_bytes()));
        SaStatus::Ok
    })
}

/// # Safety
/// `set` is NULL or a share set not yet freed.
#[no_mangle]
pub unsafe extern "C" fn sa_share_set_free(set: *mut SaShareSet) {
    if !set.is_null() {
        drop(Box::from_raw(set));
    }
}

/// Fills `out[16]` from the OS random source.
///
/// # Safety
/// `out` has room for 16 bytes.
#[no_mangle]
pub unsafe extern "C" fn sa_generate_nonce(out: *mut u8) -> SaStatus {
    guard(|| {
        let nonce = crypto::generate_nonce(&mut OsRng);
        tri!(write_array::<NONCE_LEN>(out, nonce.as_bytes()));
        SaStatus::Ok
    })
}

type Derive = fn(&Nonce, &Nonce, &PasswordDigest) -> [u8; 32];

unsafe fn derive(
    server_nonce: *const u8,
    client_nonce: *const u8,
    digest: *const u8,
    out: *mut u8,
    f: Derive,
) -> SaStatus {
    guard(|| {
        let ns = Nonce::from_bytes(tri!(read_array::<NONCE_LEN>(server_nonce)));
        let nc = Nonce::from_bytes(tri!(read_array::<NONCE_LEN>(client_nonce)));
        let d = PasswordDigest::from_bytes(tri!(read_array::<DIGEST_LEN>(digest)));
        tri!(write_array::<32>(out, &f(&ns, &nc, &d)));
        SaStatus::Ok
    })
}

/// Client login proof into `out[32]`.
///
/// # Safety
/// Nonces point to 16 bytes, `digest` to 32, `out` has room for 32.
#[no_mangle]
pub unsafe extern "C" fn sa_login_proof(
    server_nonce: *const u8,
    client_nonce: *const u8,
    digest: *const u8,
    out: *mut u8,
) -> SaStatus {
    derive(server_nonce, client_nonce, digest, out, |ns, nc, d| {
        let p = crypto::compute_login_proof(ns, nc, d);
        let mut b = [0u8; PROOF_LEN];
        b.copy_from_slice(p.as_bytes());
        b
    })
}

/// Server proof into `out[32]`.
///
/// # Safety
/// As [`sa_login_proof`].
#[no_mangle]
pub unsafe extern "C" fn sa_server_proof(
    server_nonce: *const u8,
    client_nonce: *const u8,
    digest: *const u8,
    out: *mut u8,
) -> SaStatus {
    derive(server_nonce, client_nonce, digest, out, |ns, nc, d| {
        *crypto::compute_server_proof(ns, nc, d).as_bytes()
    })
}

/// Session key into `out[32]`.
///
/// # Safety
/// As [`sa_login_proof`].
#[no_mangle]
pub unsafe extern "C" fn sa_session_key(
    server_nonce: *const u8,
    client_nonce: *const u8,
    digest: *const u8,
    out: *mut u8,
) -> SaStatus {
    derive(server_nonce, client_nonce, digest, out, |ns, nc, d| {
        *crypto::derive_session_key(ns, nc, d).as_bytes()
    })
}

/// Constant-time comparison of two `len`-byte regions.
///
/// # Safety
/// `a` and `b` each point to `len` readable bytes.
#[no_mangle]
pub unsafe extern "C" fn sa_ct_eq(a: *const u8, b: *const u8, len: usize) -> bool {
    match (read_bytes(a, len), read_bytes(b, len)) {
        (Ok(a), Ok(b)) => crypto::constant_time_eq(a, b),
        _ => false,
    }
}

/// Frames a JSON message. The JSON must parse as a known message; the frame
/// carries its canonical compact form.
///
/// # Safety
/// `json` is a NUL-terminated string; `out` is writable.
#[no_mangle]
pub unsafe extern "C" fn sa_frame_encode(json: *const c_char, out: *mut SaBuffer) -> SaStatus {
    guard(|| {
        if out.is_null() {
            return fail(SaStatus::NullPointer, "null output pointer");
        }
        let json = tri!(read_str(json));
        let message: Message = match serde_json::from_str(json) {
            Ok(m) => m,
            Err(e) => return fail(SaStatus::Malformed, e.to_string()),
        };
        let frame = tri!(encode_frame(&message).map_err(frame_err));
        *out = SaBuffer::from_vec(frame);
        SaStatus::Ok
    })
}

/// Decodes the first frame in `bytes`, writing its JSON body to `json` and
/// the number of bytes used to `consumed`. Returns `Incomplete` when more
/// input is needed.
///
/// # Safety
/// `bytes` points to `len` bytes; `json` and `consumed` are writable.
#[no_mangle]
pub unsafe extern "C" fn sa_frame_decode(
    bytes: *const u8,
    len: usize,
    json: *mut SaBuffer,
    consumed: *mut usize,
) -> SaStatus {
    guard(|| {
        if json.is_null() || consumed.is_null() {
            return fail(SaStatus::NullPointer, "null output pointer");
        }
        let input = tri!(read_bytes(bytes, len));
        match decode_frame(input) {
            Ok(Some((_, rest))) => {
                let used = input.len() - rest.len();
                *json = SaBuffer::from_vec(input[4..used].to_vec());
                *consumed = used;
                SaStatus::Ok
            }
            Ok(None) => fail(SaStatus::Incomplete, "incomplete frame"),
            Err(e) => frame_err(e),
        }
    })
}

/// # Safety
/// `buf` was returned by this library and not yet freed.
#[no_mangle]
pub unsafe extern "C" fn sa_buffer_free(buf: SaBuffer) {
    if !buf.data.is_null() {
        drop(Box::from_raw(ptr::slice_from_raw_parts_mut(
            buf.data, buf.len,
        )));
    }
}

unsafe fn start_client(
    out: *mut *mut SaClient,
    first: *mut SaBuffer,
    start: impl FnOnce() -> Result<(ClientSession, Message), splitauth::protocol::ClientError>,
) -> SaStatus {
    if out.is_null() || first.is_null() {
        return fail(SaStatus::NullPointer, "null output pointer");
    }
    let (session, message) = match start() {
        Ok(v) => v,
        Err(e) => return fail(SaStatus::InvalidArgument, e.to_string()),
    };
    let frame = tri!(encode_frame(&message).map_err(frame_err));
    *out = Box::into_raw(Box::new(SaClient { session }));
    *first = SaBuffer::from_vec(frame);
    SaStatus::Ok
}

/// Begins a login. `first_frame` receives the `login` frame to send.
///
/// # Safety
/// Strings are NUL-terminated; output pointers are writable.
#[no_mangle]
pub unsafe extern "C" fn sa_client_start_login(
    username: *const c_char,
    password: *const c_char,
    out: *mut *mut SaClient,
    first_frame: *mut SaBuffer,
) -> SaStatus {
    guard(|| {
        let username = tri!(read_str(username));
        let password = tri!(read_str(password));
        start_client(out, first_frame, || {
            ClientSession::start_login(username, password, &mut OsRng)
        })
    })
}

/// Begins a registration. `first_frame` receives the `register` frame.
///
/// # Safety
/// As [`sa_client_start_login`].
#[no_mangle]
pub unsafe extern "C" fn sa_client_start_register(
    username: *const c_char,
    password: *const c_char,
    out: *mut *mut SaClient,
    first_frame: *mut SaBuffer,
) -> SaStatus {
    guard(|| {
        let username = tri!(read_str(username));
        let password = tri!(read_str(password));
        start_client(out, first_frame, || {
            ClientSession::start_register(username, password)
        })
    })
}

/// Feeds one whole frame from the gateway. `reply` receives the frame to send
/// back (empty when none) and `event` what happened. For
/// `SA_CLIENT_EVENT_REJECTED` the gateway's reason is left in
/// [`sa_last_error`].
///
/// # Safety
/// `client` is live; `frame` points to `len` bytes; outputs are writable.
#[no_mangle]
pub unsafe extern "C" fn sa_client_on_frame(
    client: *mut SaClient,
    frame: *const u8,
    len: usize,
    reply: *mut SaBuffer,
    event: *mut SaClientEvent,
) -> SaStatus {
    guard(|| {
        let Some(client) = client.as_mut() else {
            return fail(SaStatus::NullPointer, "null client");
        };
        if reply.is_null() || event.is_null() {
            return fail(SaStatus::NullPointer, "null output pointer");
        }
        *reply = SaBuffer::empty();
        *event = SaClientEvent::None;
        let input = tri!(read_bytes(frame, len));
        let message = match decode_frame(input) {
            Ok(Some((m, []))) => m,
            Ok(Some(_)) => return fail(SaStatus::InvalidArgument, "trailing bytes after frame"),
            Ok(None) => return fail(SaStatus::Incomplete, "incomplete frame"),
            Err(e) => return frame_err(e),
        };
        let step = match client.session.on_message(message) {
            Ok(step) => step,
            Err(e) => return fail(SaStatus::Protocol, e.to_string()),
        };
        if let Some(next) = step.reply {
            *reply = SaBuffer::from_vec(tri!(encode_frame(&next).map_err(frame_err)));
        }
        *event = match step.event {
            None => SaClientEvent::None,
            Some(ClientEvent::Registered) => SaClientEvent::Registered,
            Some(ClientEvent::LoginSucceeded) => SaClientEvent::LoginSucceeded,
            Some(ClientEvent::ServerAuthFailed) => SaClientEvent::ServerAuthFailed,
            Some(ClientEvent::Rejected { reason }) => {
                set_error(reason);
                SaClientEvent::Rejected
            }
            Some(ClientEvent::LoggedOut) => SaClientEvent::LoggedOut,
        };
        SaStatus::Ok
    })
}

/// # Safety
/// `client` is live.
#[no_mangle]
pub unsafe extern "C" fn sa_client_stage(client: *const SaClient) -> SaClientStage {
    match client.as_ref().map(|c| c.session.stage()) {
        Some(ClientStage::Idle) => SaClientStage::Idle,
        Some(ClientStage::AwaitRegisterAck) => SaClientStage::AwaitRegisterAck,
        Some(ClientStage::AwaitChallenge) => SaClientStage::AwaitChallenge,
        Some(ClientStage::AwaitLoginOk) => SaClientStage::AwaitLoginOk,
        Some(ClientStage::Authenticated) => SaClientStage::Authenticated,
        Some(ClientStage::Failed) | None => SaClientStage::Failed,
    }
}

/// Copies the session key to `out[32]` once authenticated.
///
/// # Safety
/// `client` is live; `out` has room for 32 bytes.
#[no_mangle]
pub unsafe extern "C" fn sa_client_session_key(client: *const SaClient, out: *mut u8) -> SaStatus {
    guard(|| {
        let Some(client) = client.as_ref() else {
            return fail(SaStatus::NullPointer, "null client");
        };
        let Some(key) = client.session.session_key() else {
            return fail(SaStatus::NotAuthenticated, "session is not authenticated");
        };
        tri!(write_array::<SESSION_KEY_LEN>(out, key.as_bytes()));
        SaStatus::Ok
    })
}

/// The `logout` frame for an authenticated session.
///
/// # Safety
/// `client` is live; `out` is writable.
#[no_mangle]
pub unsafe extern "C" fn sa_client_logout(client: *const SaClient, out: *mut SaBuffer) -> SaStatus {
    guard(|| {
        let Some(client) = client.as_ref() else {
            return fail(SaStatus::NullPointer, "null client");
        };
        if out.is_null() {
            return fail(SaStatus::NullPointer, "null output pointer");
        }
        let message = match client.session.logout() {
            Ok(m) => m,
            Err(e) => return fail(SaStatus::NotAuthenticated, e.to_string()),
        };
        *out = SaBuffer::from_vec(tri!(encode_frame(&message).map_err(frame_err)));
        SaStatus::Ok
    })
}

/// # Safety
/// `client` is NULL or a client not yet freed.
#[no_mangle]
pub unsafe extern "C" fn sa_client_free(client: *mut SaClient) {
    if !client.is_null() {
        drop(Box::from_raw(client));
    }
}

/// Runs the attack comparison over a newline-separated dictionary and
/// returns the text report. Release it with [`sa_string_free`].
///
/// # Safety
/// `dictionary` is a NUL-terminated string; `out` is writable.
#[no_mangle]
pub unsafe extern "C" fn sa_attacklab_report(
    seed: u64,
    dictionary: *const c_char,
    out: *mut *mut c_char,
) -> SaStatus {
    guard(|| {
        if out.is_null() {
            return fail(SaStatus::NullPointer, "null output pointer");
        }
        let words: Vec<String> = tri!(read_str(dictionary))
            .lines()
            .map(|l| l.trim_end_matches('\r'))
            .filter(|l| !l.is_empty())
            .map(str::to_owned)
            .collect();
        let report = match run_comparison_report(seed, &words) {
            Ok(r) => r,
            Err(e) => return fail(SaStatus::Harness, e.to_string()),
        };
        match CString::new(report.render_text()) {
            Ok(s) => {
                *out = s.into_raw();
                SaStatus::Ok
            }
            Err(e) => fail(SaStatus::Harness, e.to_string()),
        }
    })
}

/// # Safety
/// `s` is NULL or a string returned by this library and not yet freed.
#[no_mangle]
pub unsafe extern "C" fn sa_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}
