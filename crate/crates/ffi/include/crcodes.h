#ifndef CRCODES_H
#define CRCODES_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

// Result codes of every fallible call.
typedef enum CrcStatus {
  CRC_STATUS_OK = 0,
  CRC_STATUS_NULL_POINTER = 1,
  CRC_STATUS_INVALID_UTF8 = 2,
  CRC_STATUS_PARSE = 3,
  CRC_STATUS_INFEASIBLE = 4,
  CRC_STATUS_BUDGET = 5,
  CRC_STATUS_BUFFER_TOO_SMALL = 6,
  CRC_STATUS_INTERNAL = 7,
  CRC_STATUS_INVALID_ARGUMENT = 8,
} CrcStatus;

// A set of words in H(n,q).
typedef struct CrcCode CrcCode;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message of the last failed call on this thread; valid until the next call.
const char *crc_last_error(void);

// Library version as a static string.
const char *crc_version(void);

// Parses a code file ("n q" header, one word per line).
//
// # Safety
// `text` must be a NUL-terminated string and `out` a valid pointer.
enum CrcStatus crc_code_parse(const char *text, struct CrcCode **out);

// The 416-word code D in H(13,2).
//
// # Safety
// `out` must be a valid pointer.
enum CrcStatus crc_code_d(struct CrcCode **out);

// Full-weight words of the Hamming code with redundancy `m` over GF(`q`).
//
// # Safety
// `out` must be a valid pointer.
enum CrcStatus crc_code_hamming_retraction(size_t m, size_t q, struct CrcCode **out);

// Releases a code; null is ignored.
//
// # Safety
// `code` must come from this library and not be used afterwards.
void crc_code_free(struct CrcCode *code);

// Space and size of a code.
//
// # Safety
// `code` must be a live handle; the outputs must be valid pointers.
enum CrcStatus crc_code_shape(const struct CrcCode *code, size_t *n, size_t *q, size_t *len);

// Minimum distance between distinct codewords.
//
// # Safety
// `code` must be a live handle and `out` a valid pointer.
enum CrcStatus crc_code_min_distance(const struct CrcCode *code, size_t *out);

// Whether the code is completely regular. When it is, its covering radius
// goes to `radius` and, if `capacity` ≥ radius, the array to `b` and `c`.
// A too-small capacity still fills `radius` and returns `BufferTooSmall`.
//
// # Safety
// `code` must be a live handle; `b` and `c` must hold `capacity` values
// (or be null when `capacity` is 0).
enum CrcStatus crc_verify_cr(const struct CrcCode *code,
                             bool *is_cr,
                             size_t *radius,
                             uint32_t *b,
                             uint32_t *c,
                             size_t capacity);

// The CR verdict as JSON; release with [`crc_string_free`].
//
// # Safety
// `code` must be a live handle and `out` a valid pointer.
enum CrcStatus crc_verify_cr_json(const struct CrcCode *code, char **out);

// The code in the code-file format; release with [`crc_string_free`].
//
// # Safety
// `code` must be a live handle and `out` a valid pointer.
enum CrcStatus crc_code_write(const struct CrcCode *code, char **out);

// Classifies binary equitable partitions with the given quotient matrix
// ("a,b;c,d" rows), length `n` and anchor cell `d`. `schedule` may be null
// or "r0,r2;r0,r2;...". The JSON report goes to `out`.
//
// # Safety
// String arguments must be NUL-terminated (or null where allowed) and `out` valid.
enum CrcStatus crc_classify_json(const char *quotient,
                                 size_t n,
                                 size_t d,
                                 const char *schedule,
                                 size_t threads,
                                 char **out);

// Releases a string returned by this library; null is ignored.
//
// # Safety
// `s` must come from this library and not be used afterwards.
void crc_string_free(char *s);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* CRCODES_H */
