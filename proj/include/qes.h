/* C interface of the quasi-exact oscillator library.
 *
 * All functions return a qes_status code; results are handed back as
 * heap-allocated JSON strings that the caller releases with
 * qes_string_free().  Models are opaque handles.  The last error message
 * of the calling thread is available through qes_last_error().
 */
#ifndef QES_H
#define QES_H

#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef enum qes_status {
  QES_OK = 0,
  QES_INVALID_ARGUMENT = 1, /* malformed sizes, flags, or preconditions */
  QES_DOMAIN_ERROR = 2,     /* mathematically inadmissible input (f_q <= 0, ...) */
  QES_DEGENERATE = 3,       /* zero-order state without the required structure */
  QES_NO_CONVERGENCE = 4,   /* no Newton start converged */
  QES_BAD_JSON = 5,         /* unparsable or schema-violating JSON input */
  QES_VERIFY_FAILED = 6,    /* verification residuals above the threshold */
  QES_INTERNAL = 7          /* unexpected failure */
} qes_status;

typedef struct qes_model qes_model;

/* Model from the exponent tail f_0..f_q (len = q+1, f_q > 0), truncation
 * degree N >= 0 and channel parameter p (parity 0/1, or a large real). */
qes_status qes_model_create(int q, int n, double p, const double* f, int len,
                            qes_model** out);

/* Model from the dominant couplings g_{q+1}..g_{2q+1} (len = q+1) instead
 * of the tail; the tail is recovered by the downward square-root chain. */
qes_status qes_model_create_from_couplings(int q, int n, double p, const double* g,
                                           int len, qes_model** out);

void qes_model_destroy(qes_model* model);

/* {meta, g_q, matrix, shift_diagonals} */
qes_status qes_model_describe_json(const qes_model* model, char** out_json);

/* options_json: {"method":"auto|harmonic|sextic|n0|newton",
 *                "starts":int, "seed":uint} (null or "{}" for defaults).
 * out: {meta, method, solutions:[...], diagnostic?} */
qes_status qes_solve_json(const qes_model* model, const char* options_json,
                          char** out_json);

/* options_json: {"scheme":"linear|decadic", "order":int, "shift_c":double,
 *                "compare":bool, "starts":int, "seed":uint}.
 * The linear scheme expands the model itself in 1/(2p + shift_c); the
 * decadic scheme requires q = N = 2 with a unit leading tail coefficient.
 * out: {meta, states:[{zero_order, corrections, evaluated_plet,
 *       recovered_plet, comparison_to_newton?}]} */
qes_status qes_perturb_json(const qes_model* model, const char* options_json,
                            char** out_json);

/* solution_json: one solution object as emitted by qes_solve_json.
 * Returns QES_OK when both the recurrence and the pointwise equation
 * residuals stay below tol; QES_VERIFY_FAILED otherwise.  The report in
 * out_json carries both residuals either way. */
qes_status qes_verify_json(const qes_model* model, const char* solution_json,
                           double tol, char** out_json);

void qes_string_free(char* s);

const char* qes_status_name(qes_status status);

/* Message of the most recent failure on this thread ("" if none). */
const char* qes_last_error(void);

#ifdef __cplusplus
} /* extern "C" */
#endif

#endif /* QES_H */
