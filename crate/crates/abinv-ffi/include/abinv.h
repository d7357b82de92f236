/* C interface to the abinv 3-manifold invariant calculators. */

#pragma once

/* Generated with cbindgen:0.29.4 */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

// Result of every fallible call, mirroring the command-line exit codes.
typedef enum AbinvStatus {
  // The call succeeded; out-parameters are populated.
  ABINV_STATUS_OK = 0,
  // A verification suite ran to completion and some check failed; the
  // JSON report is still written to the out-parameter.
  ABINV_STATUS_VERIFICATION_FAILED = 1,
  // The manifold description or a parameter could not be parsed.
  ABINV_STATUS_PARSE_ERROR = 2,
  // The input violates a documented invariant (including brute-force
  // enumeration caps).
  ABINV_STATUS_INPUT_ERROR = 3,
  // The presentation does not carry the data this computation needs.
  ABINV_STATUS_UNSUPPORTED_PRESENTATION = 4,
  // No invariant of the requested kind exists at the requested level.
  ABINV_STATUS_NO_INVARIANT_AT_LEVEL = 5,
  // A required pointer argument was null, or a string was not UTF-8.
  ABINV_STATUS_NULL_ARGUMENT = 6,
  // An internal panic was caught; this is a bug in the library.
  ABINV_STATUS_INTERNAL_ERROR = 7,
} AbinvStatus;

// Invariant families accepted by [`abinv_invariant`].
typedef enum AbinvInvariant {
  // Chiral partition function; `parameter` is the coupling `k >= 1`.
  ABINV_INVARIANT_CHIRAL_PARTITION = 0,
  // Doubled partition function; `parameter` is the coupling `k >= 1`.
  ABINV_INVARIANT_DOUBLED_PARTITION = 1,
  // Surgery invariant; `parameter` is the level `N >= 1`.
  ABINV_INVARIANT_SURGERY_INVARIANT = 2,
  // State sum; `parameter` is the level `n >= 1`.
  ABINV_INVARIANT_STATE_SUM = 3,
} AbinvInvariant;

// Prefactor convention for the surgery invariant.
typedef enum AbinvNormalization {
  // Reduced normalization: unit on the standard sphere, blow-up stable.
  ABINV_NORMALIZATION_REDUCED = 0,
  // Literal surgery formula with the full Gauss-sum prefactor.
  ABINV_NORMALIZATION_RAW = 1,
} AbinvNormalization;

// Verification suites accepted by [`abinv_verify`].
typedef enum AbinvSuite {
  // Partition-function identities over a lens-space grid.
  ABINV_SUITE_PARTITION_IDENTITIES = 0,
  // Surgery invariant vs the rescaled chiral partition function.
  ABINV_SUITE_SURGERY_VS_PARTITION = 1,
  // State sum vs cohomology count vs doubled partition function.
  ABINV_SUITE_STATE_SUM_VS_COHOMOLOGY = 2,
  // Braiding/twist/duality axioms of the cyclic label categories.
  ABINV_SUITE_RIBBON_AXIOMS = 3,
  // Blow-up stability of the surgery invariant.
  ABINV_SUITE_BLOWUP_STABILITY = 4,
} AbinvSuite;

// Opaque manifold handle; create with [`abinv_manifold_parse`], release
// with [`abinv_manifold_free`].
typedef struct AbinvManifold AbinvManifold;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Parses a manifold description — a well-known name (`s3`, `s1xs2`, `rp3`,
// `rp3-heegaard`, `lens(p,q)`), inline JSON, or a path to a JSON file —
// into a fresh handle written to `*out_manifold`.
//
// # Safety
// `spec` must point to a NUL-terminated string and `out_manifold` to
// writable storage for one pointer; both must stay valid for the call.
enum AbinvStatus abinv_manifold_parse(const char *spec, struct AbinvManifold **out_manifold);

// Releases a handle returned by [`abinv_manifold_parse`]; a null pointer
// is ignored.
//
// # Safety
// `manifold` must be null or a pointer previously returned by
// [`abinv_manifold_parse`] that has not been freed already.
void abinv_manifold_free(struct AbinvManifold *manifold);

// Writes the homology summary of the manifold (first Betti number, torsion
// chain, linking pairing when available) to `*out_json`.
//
// # Safety
// `manifold` must be a live handle from [`abinv_manifold_parse`] and
// `out_json` writable storage for one pointer.
enum AbinvStatus abinv_homology(const struct AbinvManifold *manifold, char **out_json);

// Evaluates one invariant of the manifold and writes the JSON envelope
// (value, closed forms, cross-checks) to `*out_json`.  `parameter` is the
// coupling for the partition functions and the level otherwise;
// `normalization` only affects the surgery invariant.
//
// # Safety
// `manifold` must be a live handle from [`abinv_manifold_parse`] and
// `out_json` writable storage for one pointer.
enum AbinvStatus abinv_invariant(const struct AbinvManifold *manifold,
                                 enum AbinvInvariant which,
                                 uint64_t parameter,
                                 enum AbinvNormalization normalization,
                                 char **out_json);

// Runs a verification suite and writes its JSON report to `*out_json`.
// `manifold` may be null to use the suite's default fixtures; `pmax`,
// `kmax`, and `nmax` bound the generated parameter grids (values at or
// below zero select the defaults 6 / 6 / 12).  Returns `Ok` when every
// check passed and `VerificationFailed` — with the report still written —
// when the suite ran and some check failed.
//
// # Safety
// `manifold` must be null or a live handle from [`abinv_manifold_parse`],
// and `out_json` writable storage for one pointer.
enum AbinvStatus abinv_verify(enum AbinvSuite suite,
                              const struct AbinvManifold *manifold,
                              int64_t pmax,
                              int64_t kmax,
                              int64_t nmax,
                              enum AbinvNormalization normalization,
                              char **out_json);

// The structured error object of the most recent failing call on this
// thread, or null if no call has failed yet.  The pointer stays valid
// until the next failing call on the same thread; do not free it.
const char *abinv_last_error_json(void);

// Releases a string written to an out-parameter by this library; a null
// pointer is ignored.
//
// # Safety
// `text` must be null or a pointer received through an out-parameter of
// this library that has not been freed already.
void abinv_string_free(char *text);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus
