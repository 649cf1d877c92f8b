#ifndef COMMONNET_H
#define COMMONNET_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum CnStatus {
  CN_STATUS_OK = 0,
  CN_STATUS_NULL_POINTER = 1,
  CN_STATUS_INVALID_UTF8 = 2,
  CN_STATUS_INVALID_ARGUMENT = 3,
  CN_STATUS_INVALID_PMF = 4,
  CN_STATUS_INVALID_NETWORK = 5,
  CN_STATUS_UNKNOWN_NAME = 6,
  CN_STATUS_PRECONDITION = 7,
  CN_STATUS_PARSE = 8,
  CN_STATUS_INTERNAL = 9,
} CnStatus;

typedef enum CnScheme {
  CN_SCHEME_MULTICAST = 0,
  CN_SCHEME_INDEPENDENT = 1,
  CN_SCHEME_SEPARATION = 2,
  CN_SCHEME_SEPARATION_L = 3,
} CnScheme;

typedef enum CnVerdict {
  CN_VERDICT_FEASIBLE = 0,
  CN_VERDICT_INFEASIBLE = 1,
  CN_VERDICT_CUT_CONDITIONS_HOLD = 2,
} CnVerdict;

/*
 Opaque network.
 */
typedef struct CnNetwork CnNetwork;

/*
 Opaque joint pmf.
 */
typedef struct CnPmf CnPmf;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/*
 Message of the last failing call on this thread, or null. The pointer
 stays valid until the next failing call on the same thread.
 */
const char *cn_last_error(void);

/*
 Releases a string returned by this library. Null is ignored.

 # Safety
 `s` must come from this library and not have been freed.
 */
void cn_string_free(char *s);

/*
 Parses a pmf from its JSON form.

 # Safety
 `json` must be a nul-terminated string; `out` must be writable.
 */
enum CnStatus cn_pmf_from_json(const char *json, struct CnPmf **out);

/*
 # Safety
 `pmf` must come from `cn_pmf_from_json` and not have been freed.
 */
void cn_pmf_free(struct CnPmf *pmf);

/*
 Joint entropy in bits of the listed variables.

 # Safety
 Pointers must be valid; `vars` nul-terminated.
 */
enum CnStatus cn_pmf_entropy(const struct CnPmf *pmf, const char *vars, double *out);

/*
 `H(a | b)` in bits.

 # Safety
 Pointers must be valid; strings nul-terminated.
 */
enum CnStatus cn_pmf_conditional_entropy(const struct CnPmf *pmf,
                                         const char *a,
                                         const char *b,
                                         double *out);

/*
 `I(a; b)` in bits.

 # Safety
 Pointers must be valid; strings nul-terminated.
 */
enum CnStatus cn_pmf_mutual_information(const struct CnPmf *pmf,
                                        const char *a,
                                        const char *b,
                                        double *out);

/*
 Entropy of the common part of the listed variables.

 # Safety
 Pointers must be valid; `vars` nul-terminated.
 */
enum CnStatus cn_gk_entropy(const struct CnPmf *pmf, const char *vars, double *out);

/*
 Component partition of the listed variables as JSON. Free the result
 with `cn_string_free`.

 # Safety
 Pointers must be valid; `vars` nul-terminated.
 */
enum CnStatus cn_decompose_json(const struct CnPmf *pmf, const char *vars, char **out);

/*
 Parses a network from its JSON form.

 # Safety
 `json` must be a nul-terminated string; `out` must be writable.
 */
enum CnStatus cn_network_from_json(const char *json, struct CnNetwork **out);

/*
 # Safety
 `net` must come from `cn_network_from_json` and not have been freed.
 */
void cn_network_free(struct CnNetwork *net);

/*
 Min-cut value from the listed nodes to `to`.

 # Safety
 Pointers must be valid; strings nul-terminated.
 */
enum CnStatus cn_network_min_cut(const struct CnNetwork *net,
                                 const char *from,
                                 const char *to,
                                 uint64_t *out);

/*
 Runs a feasibility check. The verdict goes to `verdict` and, when
 `report` is not null, the full report as JSON goes to `report`.

 # Safety
 Handles must be valid; `verdict` writable; `report` null or writable.
 */
enum CnStatus cn_check(const struct CnNetwork *net,
                       const struct CnPmf *pmf,
                       enum CnScheme scheme,
                       enum CnVerdict *verdict,
                       char **report);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* COMMONNET_H */
