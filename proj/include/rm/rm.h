/* C interface to the continued-fraction and matrix-field engine.
 * Every call returns an rm_status; results come back as JSON (or CSV) text owned by an
 * rm_result handle. rm_last_error() holds the message of the most recent failure on the
 * calling thread. */
#ifndef RM_H
#define RM_H

#include <stddef.h>

#ifdef __cplusplus
extern "C" {
#endif

#if defined(_WIN32)
#define RM_API __declspec(dllexport)
#else
#define RM_API __attribute__((visibility("default")))
#endif

typedef enum rm_status {
    RM_OK = 0,
    RM_NO_RESULT = 1,
    RM_ERR_INVALID_ARGUMENT = 2,
    RM_ERR_SYNTAX = 3,
    RM_ERR_UNKNOWN_VARIABLE = 4,
    RM_ERR_ARITY = 5,
    RM_ERR_RING_MISMATCH = 6,
    RM_ERR_DIVERGENCE = 7,
    RM_ERR_ZERO_DENOMINATOR = 8,
    RM_ERR_TERMINATED = 9,
    RM_ERR_ALL_ZERO = 10,
    RM_ERR_UNKNOWN_CONSTANT = 11,
    RM_ERR_PRECISION_UNACHIEVABLE = 12,
    RM_ERR_PRECISION_TOO_LOW = 13,
    RM_ERR_NO_MATCH = 14,
    RM_ERR_LOW_CONFIDENCE = 15,
    RM_ERR_SINGULAR_STEP = 16,
    RM_ERR_NON_POSITIVE = 17,
    RM_ERR_SINGULAR_U = 18,
    RM_ERR_NOT_POLYNOMIAL = 19,
    RM_ERR_ELIMINATION_DEGENERATE = 20,
    RM_ERR_DEGENERATE_PARAMS = 21,
    RM_ERR_CONDITION_VIOLATED = 22,
    RM_ERR_UNKNOWN_FIELD = 23,
    RM_ERR_DEFECTIVE_LIMIT = 24,
    RM_ERR_INSUFFICIENT_PRECISION = 25,
    RM_ERR_SINGULAR_SYSTEM = 26,
    RM_ERR_STUCK = 27,
    RM_ERR_INDEX_RANGE = 28,
    RM_ERR_UNKNOWN_CHUNK = 29,
    RM_ERR_LEASE_EXPIRED = 30,
    RM_ERR_MALFORMED_RESULT = 31,
    RM_ERR_IO = 32,
    RM_ERR_NETWORK = 33,
    RM_ERR_INTERNAL = 34
} rm_status;

typedef struct rm_result rm_result;
typedef struct rm_pcf rm_pcf;
typedef struct rm_field rm_field;
typedef struct rm_coordinator rm_coordinator;

RM_API const char* rm_status_string(rm_status status);
RM_API const char* rm_last_error(void);

RM_API const char* rm_result_text(const rm_result* result);
RM_API void rm_result_free(rm_result* result);

/* Polynomial continued fractions. */
RM_API rm_status rm_pcf_new(const char* a, const char* b, rm_pcf** out);
RM_API void rm_pcf_free(rm_pcf* pcf);
/* accel: "none", "richardson" or "auto" (NULL = auto). */
RM_API rm_status rm_pcf_eval(const rm_pcf* pcf, long depth, long digits, const char* accel,
                             rm_result** out);
RM_API rm_status rm_pcf_fr(const rm_pcf* pcf, long max_depth, rm_result** out);
/* kind/params as accepted by `family`; params is a JSON object. */
RM_API rm_status rm_family(const char* kind, const char* params_json, rm_pcf** out);
RM_API rm_status rm_pcf_json(const rm_pcf* pcf, rm_result** out);

/* Constants and integer relations. constants is a comma separated list. */
RM_API rm_status rm_constant(const char* name, long digits, int verify, rm_result** out);
RM_API rm_status rm_match_value(const char* value, const char* constants, int margin,
                                int products, rm_result** out);
RM_API rm_status rm_match_pcf(const rm_pcf* pcf, long depth, const char* constants, int margin,
                              int products, rm_result** out);

/* Matrix fields. spec is a catalog name, a JSON document or a path to a JSON file. */
RM_API rm_status rm_field_load(const char* spec, rm_field** out);
RM_API void rm_field_free(rm_field* field);
RM_API rm_status rm_field_json(const rm_field* field, rm_result** out);
RM_API rm_status rm_field_construct(int degree, const char* c, const char* family, rm_field** out);
/* shifts: comma separated rationals, one per variable, e.g. "1/3,0". */
RM_API rm_status rm_field_shift(const rm_field* field, const char* shifts, rm_field** out);
/* u: JSON array of four polynomial texts over the field's variables. */
RM_API rm_status rm_field_coboundary(const rm_field* field, const char* u, rm_field** out);
RM_API rm_status rm_field_verify(const rm_field* field, int grid, rm_result** out);
RM_API rm_status rm_field_limit(const rm_field* field, const char* start, const char* dir,
                                long steps, long digits, rm_result** out);
RM_API rm_status rm_field_topcf(const rm_field* field, const char* dir, rm_result** out);

/* Irrationality measures. constant: catalog name (Möbius-matched to the field limit) or
 * "limit" (the field's own deep limit). */
RM_API rm_status rm_delta_map(const rm_field* field, int xmax, int ymax, const char* constant,
                              rm_result** csv_out);
RM_API rm_status rm_delta_closed(const rm_field* field, const char* dir, long steps,
                                 rm_result** out);
RM_API rm_status rm_delta_empirical(const rm_field* field, const char* dir, const char* constant,
                                    long steps, rm_result** out);
RM_API rm_status rm_delta_optimize(const rm_field* field, const char* method, int horizon,
                                   const char* constant, long steps, rm_result** out);
/* r: comma separated R values for s=2..5; mode "fixed", "lattice" or "search" (NULL = search). */
RM_API rm_status rm_zeta5_combine(const char* r, long depth, const char* mode, rm_result** out);

/* Distributed search. config is a JSON object (see README). */
RM_API rm_status rm_coordinator_start(const char* config_json, rm_coordinator** out);
RM_API int rm_coordinator_port(const rm_coordinator* c);
/* Blocks until every chunk is complete or timeout_seconds elapse (<=0: no timeout). */
RM_API rm_status rm_coordinator_wait(rm_coordinator* c, double timeout_seconds);
RM_API rm_status rm_coordinator_status(const rm_coordinator* c, rm_result** out);
RM_API void rm_coordinator_stop(rm_coordinator* c);
/* Runs until the server reports drained. options is a JSON object or NULL. */
RM_API rm_status rm_worker_run(const char* server, int parallelism, const char* options_json,
                               rm_result** out);
/* Safe to call from a signal handler: running workers abandon their chunk and return. */
RM_API void rm_worker_request_stop(void);

#ifdef __cplusplus
}
#endif

#endif
