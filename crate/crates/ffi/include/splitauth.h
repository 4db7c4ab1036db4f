#ifndef SPLITAUTH_H
#define SPLITAUTH_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum {
  SA_CLIENT_EVENT_NONE = 0,
  SA_CLIENT_EVENT_REGISTERED = 1,
  SA_CLIENT_EVENT_LOGIN_SUCCEEDED = 2,
  SA_CLIENT_EVENT_SERVER_AUTH_FAILED = 3,
  SA_CLIENT_EVENT_REJECTED = 4,
  SA_CLIENT_EVENT_LOGGED_OUT = 5,
} SaClientEvent;

typedef enum {
  SA_CLIENT_STAGE_IDLE = 0,
  SA_CLIENT_STAGE_AWAIT_REGISTER_ACK = 1,
  SA_CLIENT_STAGE_AWAIT_CHALLENGE = 2,
  SA_CLIENT_STAGE_AWAIT_LOGIN_OK = 3,
  SA_CLIENT_STAGE_AUTHENTICATED = 4,
  SA_CLIENT_STAGE_FAILED = 5,
} SaClientStage;

typedef enum {
  SA_SPLIT_MODE_SEGMENT = 0,
  SA_SPLIT_MODE_XOR = 1,
} SaSplitMode;

typedef enum {
  SA_STATUS_OK = 0,
  SA_STATUS_NULL_POINTER = 1,
  SA_STATUS_INVALID_ARGUMENT = 2,
  SA_STATUS_INVALID_UTF8 = 3,
  SA_STATUS_CRYPTO = 4,
  /**
   * More bytes are needed before a whole frame is available.
   */
  SA_STATUS_INCOMPLETE = 5,
  SA_STATUS_OVERSIZE = 6,
  SA_STATUS_MALFORMED = 7,
  SA_STATUS_PROTOCOL = 8,
  SA_STATUS_NOT_AUTHENTICATED = 9,
  SA_STATUS_HARNESS = 10,
  SA_STATUS_PANIC = 99,
} SaStatus;

/**
 * Opaque client protocol session.
 */
typedef struct SaClient SaClient;

/**
 * Opaque list of digest shares.
 */
typedef struct SaShareSet SaShareSet;

/**
 * Rust-allocated bytes. Release with [`sa_buffer_free`].
 */
typedef struct {
  uint8_t *data;
  size_t len;
} SaBuffer;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the most recent failure on this thread, or NULL. Valid until
 * the next failing call on the same thread.
 */
const char *sa_last_error(void);

/**
 * Writes SHA-256 of `password` (UTF-8, non-empty) to `out[32]`.
 *
 * # Safety
 * `password` is a NUL-terminated string; `out` has room for 32 bytes.
 */
SaStatus sa_compute_digest(const char *password, uint8_t *out);

/**
 * Splits `digest[32]` into `n` shares using OS randomness.
 *
 * # Safety
 * `digest` points to 32 bytes; `out` is writable.
 */
SaStatus sa_split_digest(const uint8_t *digest, size_t n, SaSplitMode mode, SaShareSet **out);

/**
 * An empty share set, to be filled with [`sa_share_set_push`].
 */
SaShareSet *sa_share_set_new(void);

/**
 * # Safety
 * `set` is NULL or a live share set.
 */
size_t sa_share_set_len(const SaShareSet *set);

/**
 * Describes share `i`. `payload` is borrowed from the set and stays valid
 * until the set is modified or freed.
 *
 * # Safety
 * `set` is a live share set; every output pointer is writable.
 */
SaStatus sa_share_set_get(const SaShareSet *set,
                          size_t i,
                          size_t *index,
                          size_t *total,
                          SaSplitMode *mode,
                          const uint8_t **payload,
                          size_t *payload_len);

/**
 * Appends a copy of the described share after checking its shape.
 *
 * # Safety
 * `set` is a live share set; `payload` points to `payload_len` bytes.
 */
SaStatus sa_share_set_push(SaShareSet *set,
                           size_t index,
                           size_t total,
                           SaSplitMode mode,
                           const uint8_t *payload,
                           size_t payload_len);

/**
 * Rebuilds the digest from a complete share set into `out[32]`.
 *
 * # Safety
 * `set` is a live share set; `out` has room for 32 bytes.
 */
SaStatus sa_recombine(const SaShareSet *set, uint8_t *out);

/**
 * # Safety
 * `set` is NULL or a share set not yet freed.
 */
void sa_share_set_free(SaShareSet *set);

/**
 * Fills `out[16]` from the OS random source.
 *
 * # Safety
 * `out` has room for 16 bytes.
 */
SaStatus sa_generate_nonce(uint8_t *out);

/**
 * Client login proof into `out[32]`.
 *
 * # Safety
 * Nonces point to 16 bytes, `digest` to 32, `out` has room for 32.
 */
SaStatus sa_login_proof(const uint8_t *server_nonce,
                        const uint8_t *client_nonce,
                        const uint8_t *digest,
                        uint8_t *out);

/**
 * Server proof into `out[32]`.
 *
 * # Safety
 * As [`sa_login_proof`].
 */
SaStatus sa_server_proof(const uint8_t *server_nonce,
                         const uint8_t *client_nonce,
                         const uint8_t *digest,
                         uint8_t *out);

/**
 * Session key into `out[32]`.
 *
 * # Safety
 * As [`sa_login_proof`].
 */
SaStatus sa_session_key(const uint8_t *server_nonce,
                        const uint8_t *client_nonce,
                        const uint8_t *digest,
                        uint8_t *out);

/**
 * Constant-time comparison of two `len`-byte regions.
 *
 * # Safety
 * `a` and `b` each point to `len` readable bytes.
 */
bool sa_ct_eq(const uint8_t *a, const uint8_t *b, size_t len);

/**
 * Frames a JSON message. The JSON must parse as a known message; the frame
 * carries its canonical compact form.
 *
 * # Safety
 * `json` is a NUL-terminated string; `out` is writable.
 */
SaStatus sa_frame_encode(const char *json, SaBuffer *out);

/**
 * Decodes the first frame in `bytes`, writing its JSON body to `json` and
 * the number of bytes used to `consumed`. Returns `Incomplete` when more
 * input is needed.
 *
 * # Safety
 * `bytes` points to `len` bytes; `json` and `consumed` are writable.
 */
SaStatus sa_frame_decode(const uint8_t *bytes, size_t len, SaBuffer *json, size_t *consumed);

/**
 * # Safety
 * `buf` was returned by this library and not yet freed.
 */
void sa_buffer_free(SaBuffer buf);

/**
 * Begins a login. `first_frame` receives the `login` frame to send.
 *
 * # Safety
 * Strings are NUL-terminated; output pointers are writable.
 */
SaStatus sa_client_start_login(const char *username,
                               const char *password,
                               SaClient **out,
                               SaBuffer *first_frame);

/**
 * Begins a registration. `first_frame` receives the `register` frame.
 *
 * # Safety
 * As [`sa_client_start_login`].
 */
SaStatus sa_client_start_register(const char *username,
                                  const char *password,
                                  SaClient **out,
                                  SaBuffer *first_frame);

/**
 * Feeds one whole frame from the gateway. `reply` receives the frame to send
 * back (empty when none) and `event` what happened. For
 * `SA_CLIENT_EVENT_REJECTED` the gateway's reason is left in
 * [`sa_last_error`].
 *
 * # Safety
 * `client` is live; `frame` points to `len` bytes; outputs are writable.
 */
SaStatus sa_client_on_frame(SaClient *client,
                            const uint8_t *frame,
                            size_t len,
                            SaBuffer *reply,
                            SaClientEvent *event);

/**
 * # Safety
 * `client` is live.
 */
SaClientStage sa_client_stage(const SaClient *client);

/**
 * Copies the session key to `out[32]` once authenticated.
 *
 * # Safety
 * `client` is live; `out` has room for 32 bytes.
 */
SaStatus sa_client_session_key(const SaClient *client, uint8_t *out);

/**
 * The `logout` frame for an authenticated session.
 *
 * # Safety
 * `client` is live; `out` is writable.
 */
SaStatus sa_client_logout(const SaClient *client, SaBuffer *out);

/**
 * # Safety
 * `client` is NULL or a client not yet freed.
 */
void sa_client_free(SaClient *client);

/**
 * Runs the attack comparison over a newline-separated dictionary and
 * returns the text report. Release it with [`sa_string_free`].
 *
 * # Safety
 * `dictionary` is a NUL-terminated string; `out` is writable.
 */
SaStatus sa_attacklab_report(uint64_t seed, const char *dictionary, char **out);

/**
 * # Safety
 * `s` is NULL or a string returned by this library and not yet freed.
 */
void sa_string_free(char *s);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* SPLITAUTH_H */
