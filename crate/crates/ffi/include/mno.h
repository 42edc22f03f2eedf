#ifndef MNO_H
#define MNO_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum MnoStatus {
  MNO_STATUS_OK = 0,
  MNO_STATUS_NULL_POINTER = 1,
  MNO_STATUS_INVALID_ARGUMENT = 2,
  MNO_STATUS_CONFIG = 3,
  MNO_STATUS_NUMERICAL = 4,
  MNO_STATUS_IO = 5,
  MNO_STATUS_PANIC = 6,
} MnoStatus;

// A hierarchical data set.
typedef struct MnoDataset MnoDataset;

// A trained model.
typedef struct MnoModel MnoModel;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Library version as a static NUL-terminated string.
const char *mno_version(void);

// Message of the last failed call on this thread; empty after a success.
// Valid until the next call into the library on the same thread.
const char *mno_last_error_message(void);

// `min(max(v, −a), a)`.
enum MnoStatus mno_clip(double a, double v, double *result);

// Dirichlet Green kernel `K_a(x, y)` on `[0, a]`.
enum MnoStatus mno_green_kernel(double a, double x, double y, double *result);

// Natural log of the sup-norm covering number of a ReLU network class with
// scalar output. `-inf` encodes a covering number of 0.
enum MnoStatus mno_log_net_covering(size_t d_in,
                                    size_t depth,
                                    size_t width,
                                    size_t sparsity,
                                    double kappa,
                                    double output_r,
                                    double x_inf_norm,
                                    double eta,
                                    double *result);

// Right-hand side of the expected generalization-error bound.
enum MnoStatus mno_generalization_bound_rhs(double eps,
                                            double eta,
                                            double n_alpha,
                                            double n_u,
                                            double n_x,
                                            double sigma,
                                            double beta_v,
                                            double ln_n_eta,
                                            double ln_n_scaled,
                                            double *result);

// Accuracy `ε`, scale `η` and rate `4ε²` as functions of `n_alpha`.
enum MnoStatus mno_rate_schedule(double n_alpha,
                                 size_t d_w,
                                 size_t d_u,
                                 size_t d_v,
                                 double beta_v,
                                 double *eps,
                                 double *eta,
                                 double *rate);

// Parses a model from its JSON text.
enum MnoStatus mno_model_from_json(const char *json, struct MnoModel **model);

// Loads a model from a JSON file.
enum MnoStatus mno_model_load(const char *path, struct MnoModel **model);

// Releases a model; null is ignored.
//
// # Safety
// `model` must come from `mno_model_from_json` or `mno_model_load` and not
// have been freed already.
void mno_model_free(struct MnoModel *model);

// Input sizes `(n_cW, n_cU, d_V)` the model expects.
enum MnoStatus mno_model_dims(const struct MnoModel *model,
                              size_t *n_cw,
                              size_t *n_cu,
                              size_t *d_v);

// Model output at one `(ᾱ, ū, x)`; clipped unless `clipped` is 0.
enum MnoStatus mno_model_forward(const struct MnoModel *model,
                                 const double *alpha,
                                 size_t alpha_len,
                                 const double *u,
                                 size_t u_len,
                                 const double *x,
                                 size_t x_len,
                                 int32_t clipped,
                                 double *result);

// Loads a data set from a JSON file.
enum MnoStatus mno_dataset_load(const char *path, struct MnoDataset **dataset);

// Releases a data set; null is ignored.
//
// # Safety
// `dataset` must come from `mno_dataset_load` and not have been freed.
void mno_dataset_free(struct MnoDataset *dataset);

// Number of observations `n_α n_u n_x`.
enum MnoStatus mno_dataset_len(const struct MnoDataset *dataset, size_t *len);

// Mean clipped squared loss of the model on the data set.
enum MnoStatus mno_model_empirical_risk(const struct MnoModel *model,
                                        const struct MnoDataset *dataset,
                                        double *result);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* MNO_H */
