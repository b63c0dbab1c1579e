#ifndef TBAUDIT_H
#define TBAUDIT_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

// Result code of every fallible call.
typedef enum TbStatus {
  TB_STATUS_OK = 0,
  TB_STATUS_NULL_POINTER = 1,
  TB_STATUS_INVALID_ARGUMENT = 2,
  // Malformed or inconsistent cipher/layer description.
  TB_STATUS_SPEC_ERROR = 3,
  TB_STATUS_SINGULAR = 4,
  TB_STATUS_NOT_BIJECTIVE = 5,
  // A search or enumeration was refused as too large.
  TB_STATUS_CAP_EXCEEDED = 6,
  TB_STATUS_PANIC = 7,
} TbStatus;

// Outcome of an audit.
typedef enum TbVerdict {
  TB_VERDICT_SECURE = 0,
  TB_VERDICT_VULNERABLE = 1,
  TB_VERDICT_INCONCLUSIVE = 2,
} TbVerdict;

typedef struct TbCipher TbCipher;

typedef struct TbLayer TbLayer;

typedef struct TbSBox TbSBox;

// Single-brick measurements.
typedef struct TbSBoxMetrics {
  uint32_t m;
  // Differential uniformity δ.
  uint32_t delta;
  // `ceil(log2 δ)`.
  uint32_t r;
  uint32_t min_derivative_image;
  uint32_t nonlinearity;
  bool has_linear_component;
  uint32_t anti_invariance_order;
  // False when `anti_invariance_order` is only a lower bound.
  bool anti_invariance_exact;
} TbSBoxMetrics;

typedef struct TbAuditOptions {
  // Accept bricks through the derivative-image condition as well.
  bool condition1prime;
  // Let the full layer product break a wall.
  bool relaxed_j;
  // Run the exhaustive chain search up to this dimension; 0 disables it.
  uint32_t exhaustive_cap;
} TbAuditOptions;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message of the last failing call on this thread; empty if none. The
// pointer stays valid until the next failing call on the same thread.
const char *tb_last_error(void);

// # Safety
// `s` must come from this library or be null.
void tb_string_free(char *s);

// Brick from a lookup table of `len = 2^m` entries.
//
// # Safety
// `table` must point to `len` readable entries; the out-pointer must be writable.
enum TbStatus tb_sbox_new(const uint16_t *table, size_t len, struct TbSBox **out_box);

// Builtin brick: `"inverse_gf2m"` (2 <= m <= 8), `"present"` (m = 4) or
// `"identity"`.
//
// # Safety
// `name` must be a NUL-terminated string; the out-pointer must be writable.
enum TbStatus tb_sbox_builtin(const char *name, uint32_t m, struct TbSBox **out_box);

// # Safety
// `s` must come from a `tb_sbox_*` constructor or be null.
void tb_sbox_free(struct TbSBox *s);

// # Safety
// `s` must be a live handle; `metrics` must be writable.
enum TbStatus tb_sbox_analyze(const struct TbSBox *s, struct TbSBoxMetrics *metrics);

// Full analysis as a JSON report document.
//
// # Safety
// `s` must be a live handle; `json` must be writable.
enum TbStatus tb_sbox_report_json(const struct TbSBox *s, char **json);

// Builtin layer: `"rotation"`, `"identity"`, `"aes_sr_mc"` (m = 8, b = 16)
// or `"butterfly"` (b = 2).
//
// # Safety
// `name` must be a NUL-terminated string; the out-pointer must be writable.
enum TbStatus tb_layer_builtin(const char *name,
                               uint32_t m,
                               uint32_t b,
                               struct TbLayer **out_layer);

// Layer from a JSON layer file (`{"layout": .., "layer": ..}`).
//
// # Safety
// `json` must be a NUL-terminated string; the out-pointer must be writable.
enum TbStatus tb_layer_from_json(const char *json, struct TbLayer **out_layer);

// # Safety
// `l` must come from a `tb_layer_*` constructor or be null.
void tb_layer_free(struct TbLayer *l);

// No proper wall is mapped onto itself.
//
// # Safety
// `l` must be a live handle; `result` must be writable.
enum TbStatus tb_layer_is_proper(const struct TbLayer *l, bool *result);

// No proper wall is mapped onto any wall.
//
// # Safety
// `l` must be a live handle; `result` must be writable.
enum TbStatus tb_layer_is_strongly_proper(const struct TbLayer *l, bool *result);

// Strong properness of `copies` repetitions of the layer.
//
// # Safety
// `l` must be a live handle; `result` must be writable.
enum TbStatus tb_layer_family_strongly_proper(const struct TbLayer *l,
                                              uint32_t copies,
                                              bool relaxed_j,
                                              bool *result);

// Cipher from a JSON cipher description.
//
// # Safety
// `json` must be a NUL-terminated string; the out-pointer must be writable.
enum TbStatus tb_cipher_from_json(const char *json, struct TbCipher **out_cipher);

// `rounds` rounds of GF(2^m) inversion bricks and brick rotation.
//
// # Safety
// the out-pointer must be writable.
enum TbStatus tb_cipher_rotation(uint32_t m,
                                 uint32_t b,
                                 uint32_t rounds,
                                 struct TbCipher **out_cipher);

// # Safety
// `c` must come from a `tb_cipher_*` constructor or be null.
void tb_cipher_free(struct TbCipher *c);

// Block size in bits, or 0 for a null handle.
//
// # Safety
// `c` must be a live handle or null.
size_t tb_cipher_block_bits(const struct TbCipher *c);

// Number of rounds, or 0 for a null handle.
//
// # Safety
// `c` must be a live handle or null.
size_t tb_cipher_rounds(const struct TbCipher *c);

// Encrypt one block. Blocks are `ceil(d / 8)` bytes, least significant
// byte first; `keys` holds one such block per round.
//
// # Safety
// `keys` must hold `rounds * block_len` bytes, `input` and `output`
// `block_len` bytes each.
enum TbStatus tb_cipher_encrypt(const struct TbCipher *c,
                                const uint8_t *keys,
                                size_t keys_len,
                                const uint8_t *input,
                                uint8_t *output,
                                size_t block_len);

// Run the audit. `options` may be null for the defaults. On success
// `verdict` holds the status and, if `json` is non-null, `*json` the
// report document.
//
// # Safety
// Pointers must be live or null as documented.
enum TbStatus tb_cipher_audit(const struct TbCipher *c,
                              const struct TbAuditOptions *options,
                              enum TbVerdict *verdict,
                              char **json);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* TBAUDIT_H */
