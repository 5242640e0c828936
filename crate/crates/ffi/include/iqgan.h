#ifndef IQGAN_H
#define IQGAN_H

/* Generated by cbindgen from src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum {
  IQGAN_STATUS_OK = 0,
  IQGAN_STATUS_NULL_POINTER = 1,
  /**
   * Bad argument or configuration value.
   */
  IQGAN_STATUS_INVALID_ARGUMENT = 2,
  /**
   * Unreadable or malformed file.
   */
  IQGAN_STATUS_DATA_ERROR = 3,
  IQGAN_STATUS_NUMERIC_ERROR = 4,
  /**
   * An output buffer has the wrong length.
   */
  IQGAN_STATUS_BUFFER_SIZE = 5,
  IQGAN_STATUS_PANIC = 6,
} IqganStatus;

typedef enum {
  IQGAN_GATE_KIND_H = 0,
  IQGAN_GATE_KIND_RX = 1,
  IQGAN_GATE_KIND_RY = 2,
  IQGAN_GATE_KIND_RZ = 3,
  IQGAN_GATE_KIND_CNOT = 4,
  IQGAN_GATE_KIND_ISWAP = 5,
  IQGAN_GATE_KIND_CRX = 6,
  /**
   * Angles (phi, theta, omega).
   */
  IQGAN_GATE_KIND_CROT = 7,
  /**
   * Targets (control, a, b).
   */
  IQGAN_GATE_KIND_CSWAP = 8,
} IqganGateKind;

typedef enum {
  IQGAN_SCHEME_QUGAN21 = 0,
  IQGAN_SCHEME_EQ_GAN = 1,
  IQGAN_SCHEME_IQGAN = 2,
} IqganScheme;

typedef enum {
  IQGAN_ANSATZ_CNOT = 0,
  IQGAN_ANSATZ_ISWAP = 1,
  IQGAN_ANSATZ_CRX = 2,
  IQGAN_ANSATZ_CROT = 3,
  IQGAN_ANSATZ_NO_ENTANGLER = 4,
} IqganAnsatz;

/**
 * Opaque PCA model handle.
 */
typedef struct IqganPca IqganPca;

/**
 * Opaque statevector handle.
 */
typedef struct IqganState IqganState;

typedef struct {
  size_t qubits;
  size_t one_qubit_gates;
  size_t two_qubit_gates;
  size_t parameters;
} IqganCostReport;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the most recent failure on this thread, or null. The pointer
 * stays valid until the next call into this library from the same thread.
 */
const char *iqgan_last_error_message(void);

/**
 * Static, NUL-terminated library version.
 */
const char *iqgan_version(void);

/**
 * Allocates |0…0⟩ on `num_qubits` qubits.
 *
 * # Safety
 * `out` must be valid for writing one pointer.
 */
IqganStatus iqgan_state_new(size_t num_qubits, IqganState **out);

/**
 * # Safety
 * `state` must be null or a handle from [`iqgan_state_new`] not yet freed.
 */
void iqgan_state_free(IqganState *state);

/**
 * # Safety
 * `state` must be a live handle; `out` valid for one write.
 */
IqganStatus iqgan_state_num_qubits(const IqganState *state, size_t *out);

/**
 * Applies one gate in place.
 *
 * # Safety
 * `state` must be a live handle; `targets` must hold `num_targets` values
 * and `params` `num_params` values.
 */
IqganStatus iqgan_state_apply_gate(IqganState *state,
                                   IqganGateKind kind,
                                   const size_t *targets,
                                   size_t num_targets,
                                   const double *params,
                                   size_t num_params);

/**
 * Copies the amplitudes into `re` and `im`, each of length `len = 2^n`.
 *
 * # Safety
 * `state` must be a live handle; `re` and `im` must hold `len` writable values.
 */
IqganStatus iqgan_state_amplitudes(const IqganState *state, double *re, double *im, size_t len);

/**
 * Probability of reading 0 on `qubit`.
 *
 * # Safety
 * `state` must be a live handle; `out` valid for one write.
 */
IqganStatus iqgan_state_zero_probability(const IqganState *state, size_t qubit, double *out);

/**
 * `|⟨a|b⟩|²`.
 *
 * # Safety
 * `a` and `b` must be live handles; `out` valid for one write.
 */
IqganStatus iqgan_fidelity(const IqganState *a, const IqganState *b, double *out);

/**
 * Closed-form resource counts of a GAN scheme.
 *
 * # Safety
 * `out` must be valid for one write.
 */
IqganStatus iqgan_hardware_cost(IqganScheme scheme, size_t n, size_t b, IqganCostReport *out);

/**
 * Ancilla zero-probability of the SWAP test between the trainable encoding
 * of `x` (scales `theta_s`) and the generator output.
 *
 * # Safety
 * `x` and `theta_s` must hold `n` values, `theta_g` `theta_g_len` values;
 * `out` valid for one write.
 */
IqganStatus iqgan_swap_test_p0(const double *x,
                               const double *theta_s,
                               size_t n,
                               IqganAnsatz kind,
                               size_t blocks,
                               const double *theta_g,
                               size_t theta_g_len,
                               double *out);

/**
 * Exact fidelity loss over a row-major `batch_len × n` batch.
 *
 * # Safety
 * `batch` must hold `batch_len·n` values, `theta_s` `n` values, `theta_g`
 * `theta_g_len` values; `out` valid for one write.
 */
IqganStatus iqgan_gan_loss(const double *batch,
                           size_t batch_len,
                           size_t n,
                           const double *theta_s,
                           IqganAnsatz kind,
                           size_t blocks,
                           const double *theta_g,
                           size_t theta_g_len,
                           double *out);

/**
 * Loads a PCA model written by the `iqgan` tool.
 *
 * # Safety
 * `path` must be a NUL-terminated string; `out` valid for one write.
 */
IqganStatus iqgan_pca_load(const char *path, IqganPca **out);

/**
 * # Safety
 * `pca` must be null or a handle from [`iqgan_pca_load`] not yet freed.
 */
void iqgan_pca_free(IqganPca *pca);

/**
 * Input dimension and number of components.
 *
 * # Safety
 * `pca` must be a live handle; `dim` and `k` valid for one write each.
 */
IqganStatus iqgan_pca_dims(const IqganPca *pca, size_t *dim, size_t *k);

/**
 * Projects `x` (length `dim`) to `out` (length `k`), clamped to [−1, 1].
 *
 * # Safety
 * `pca` must be a live handle; buffers must hold the stated lengths.
 */
IqganStatus iqgan_pca_project(const IqganPca *pca,
                              const double *x,
                              size_t x_len,
                              double *out,
                              size_t out_len);

/**
 * Maps `k` coordinates back to a `dim`-pixel image (unclamped).
 *
 * # Safety
 * `pca` must be a live handle; buffers must hold the stated lengths.
 */
IqganStatus iqgan_pca_reconstruct(const IqganPca *pca,
                                  const double *v,
                                  size_t v_len,
                                  double *out,
                                  size_t out_len);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* IQGAN_H */
