#ifndef FDCERT_H
#define FDCERT_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>

/*
 Certificate flag bits, as in [`FdcertCertificate::flags`].
 */
#define FDCERT_FLAG_P2_CLAMPED (1 << 0)

#define FDCERT_FLAG_Q2_CLAMPED (1 << 1)

#define FDCERT_FLAG_RADICAND_CLAMPED (1 << 2)

#define FDCERT_FLAG_OVERLAP_CLAMPED (1 << 3)

#define FDCERT_FLAG_FIDELITY_ONLY_CLAMPED (1 << 4)

#define FDCERT_FLAG_RU_CLAMPED (1 << 5)

#define FDCERT_FLAG_RU_RADICAND_CLAMPED (1 << 6)

#define FDCERT_FLAG_LOW_DIMENSION (1 << 7)

#define FDCERT_FLAG_FD_LOOSER_THAN_FIDELITY_ONLY (1 << 8)

#define FDCERT_FLAG_DEVIATION_TRUNCATED (1 << 9)

#define FDCERT_FLAG_INFIDELITY_CLAMPED (1 << 10)

/*
 Result code of every fallible call.
 */
typedef enum FdcertStatus {
  FDCERT_STATUS_OK = 0,
  FDCERT_STATUS_NULL_POINTER = 1,
  FDCERT_STATUS_INVALID_ARGUMENT = 2,
  FDCERT_STATUS_DIMENSION_MISMATCH = 3,
  FDCERT_STATUS_NOT_UNITARY = 4,
  /*
   Eigensolver or other numerical breakdown.
   */
  FDCERT_STATUS_NUMERICAL = 5,
  /*
   `(F, D)` admits no witness unitary.
   */
  FDCERT_STATUS_INADMISSIBLE = 6,
  FDCERT_STATUS_UNSUPPORTED = 7,
  FDCERT_STATUS_PANIC = 8,
} FdcertStatus;

/*
 Which bound the hybrid certificate selected.
 */
typedef enum FdcertBoundSource {
  FDCERT_BOUND_SOURCE_RU = 0,
  FDCERT_BOUND_SOURCE_FD = 1,
  FDCERT_BOUND_SOURCE_FIDELITY_ONLY = 2,
} FdcertBoundSource;

/*
 Opaque unitary error operator.
 */
typedef struct FdcertUnitary FdcertUnitary;

typedef struct FdcertMoments {
  size_t dim;
  double fidelity;
  double deviation;
  /*
   `1 - F`, computed without cancellation.
   */
  double infidelity;
  double second_moment;
  /*
   `|tr X|^2`.
   */
  double p2;
  /*
   `|tr X^2 + (tr X)^2|^2`.
   */
  double q2;
} FdcertMoments;

typedef struct FdcertCertificate {
  size_t dim;
  double fidelity;
  double deviation;
  double infidelity;
  /*
   NaN unless certified from a unitary.
   */
  double d_exact;
  double b_fidelity_only;
  /*
   NaN when no unitarity was supplied.
   */
  double b_ru;
  /*
   NaN for `d < 4`.
   */
  double b_fd;
  /*
   NaN for `d < 4`.
   */
  double c_value;
  double b_hybrid;
  enum FdcertBoundSource hybrid_source;
  uint32_t flags;
} FdcertCertificate;

typedef struct FdcertEstimate {
  size_t states;
  uint64_t shots;
  uint64_t seed;
  double f_hat;
  double e2_hat;
  double f2_hat;
  double d2_hat;
  double d_hat;
  bool truncated;
} FdcertEstimate;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/*
 Message of the last failed call on this thread, or "" after a success.
 Valid until the next library call on the same thread.
 */
const char *fdcert_last_error_message(void);

/*
 Library version as a static NUL-terminated string.
 */
const char *fdcert_version(void);

/*
 Builds a unitary from `2 * dim * dim` row-major interleaved doubles.

 # Safety
 `entries` must point to `2 * dim * dim` readable doubles; `out` must be writable.
 */
enum FdcertStatus fdcert_unitary_from_interleaved(const double *entries,
                                                  size_t dim,
                                                  struct FdcertUnitary **out);

/*
 `diag(1, 1, 1, e^{i phi})`.

 # Safety
 `out` must be writable.
 */
enum FdcertStatus fdcert_unitary_cz_error(double phi, struct FdcertUnitary **out);

/*
 Error unitary of the over-rotated Clifford+T Toffoli.

 # Safety
 `out` must be writable.
 */
enum FdcertStatus fdcert_unitary_toffoli_error(double epsilon, struct FdcertUnitary **out);

/*
 Error unitary of the over-rotated `n`-qubit QFT, `2 <= n <= 10`.

 # Safety
 `out` must be writable.
 */
enum FdcertStatus fdcert_unitary_qft_error(size_t qubits,
                                           double epsilon,
                                           struct FdcertUnitary **out);

/*
 Releases a handle; null is ignored.

 # Safety
 `u` must be null or a live handle from this library, not used afterwards.
 */
void fdcert_unitary_free(struct FdcertUnitary *u);

/*
 # Safety
 `u` must be a live handle; `out` must be writable.
 */
enum FdcertStatus fdcert_unitary_dim(const struct FdcertUnitary *u, size_t *out);

/*
 Copies the entries as row-major interleaved doubles into `buffer`, which
 must hold `len >= 2 * dim * dim` values.

 # Safety
 `u` must be a live handle; `buffer` must be writable for `len` doubles.
 */
enum FdcertStatus fdcert_unitary_copy_entries(const struct FdcertUnitary *u,
                                              double *buffer,
                                              size_t len);

/*
 Haar moments and trace invariants of `u`.

 # Safety
 `u` must be a live handle; `out` must be writable.
 */
enum FdcertStatus fdcert_moments(const struct FdcertUnitary *u, struct FdcertMoments *out);

/*
 Minimum of `|<psi|X|psi>|` over pure states.

 # Safety
 `u` must be a live handle; `out` must be writable.
 */
enum FdcertStatus fdcert_min_overlap_exact(const struct FdcertUnitary *u, double *out);

/*
 Exact diamond distance to the identity channel.

 # Safety
 `u` must be a live handle; `out` must be writable.
 */
enum FdcertStatus fdcert_diamond_exact(const struct FdcertUnitary *u, double *out);

/*
 Every certificate for `u`; pass NaN as `unitarity` to omit the `(r, u)` bound.

 # Safety
 `u` must be a live handle; `out` must be writable.
 */
enum FdcertStatus fdcert_certify_unitary(const struct FdcertUnitary *u,
                                         double unitarity,
                                         struct FdcertCertificate *out);

/*
 Certificates from `(F, D)` alone; `d_exact` is NaN.

 # Safety
 `out` must be writable.
 */
enum FdcertStatus fdcert_certify_moments(double fidelity,
                                         double deviation,
                                         size_t dim,
                                         double unitarity,
                                         struct FdcertCertificate *out);

/*
 `c(F, D)`, `d >= 4`.

 # Safety
 `out` must be writable.
 */
enum FdcertStatus fdcert_certified_overlap(double fidelity,
                                           double deviation,
                                           size_t dim,
                                           double *out);

/*
 `sqrt(1 - c(F, D)^2)`, `d >= 4`.

 # Safety
 `out` must be writable.
 */
enum FdcertStatus fdcert_bound_fd(double fidelity, double deviation, size_t dim, double *out);

/*
 `min(1, sqrt(d(d+1) r))`.

 # Safety
 `out` must be writable.
 */
enum FdcertStatus fdcert_bound_fidelity_only(double infidelity, size_t dim, double *out);

/*
 Bound from infidelity and unitarity.

 # Safety
 `out` must be writable.
 */
enum FdcertStatus fdcert_bound_ru(double infidelity, double unitarity, size_t dim, double *out);

/*
 A unitary with moments `(F, D)` whose minimum overlap equals `c(F, D)`.
 Fails with `FDCERT_STATUS_INADMISSIBLE` when no two-angle witness exists.

 # Safety
 `out` must be writable.
 */
enum FdcertStatus fdcert_tightness_witness(double fidelity,
                                           double deviation,
                                           size_t dim,
                                           struct FdcertUnitary **out);

/*
 Simulates the sampling protocol on `u` and returns the unbiased estimates.

 # Safety
 `u` must be a live handle; `out` must be writable.
 */
enum FdcertStatus fdcert_estimate(const struct FdcertUnitary *u,
                                  size_t states,
                                  uint64_t shots,
                                  uint64_t seed,
                                  struct FdcertEstimate *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* FDCERT_H */
