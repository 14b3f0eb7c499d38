#ifndef ETK_H
#define ETK_H

#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

#if defined(__GNUC__)
#define ETK_API __attribute__((visibility("default")))
#else
#define ETK_API
#endif

/* Status codes. Values match etk::ErrorCode. */
typedef enum etk_status {
  ETK_OK = 0,
  ETK_INVALID_ARGUMENT = 10,
  ETK_PARSE_ERROR = 11,
  ETK_OUT_OF_VALIDITY = 12,
  ETK_TAIL_TOO_CLOSE = 13,
  ETK_DEGENERATE_DOMAIN = 14,
  ETK_WITNESS_TOO_CLOSE = 15,
  ETK_SEPARATION_VIOLATED = 16,
  ETK_BELOW_THRESHOLD = 17,
  ETK_HYPOTHESIS_FAILED = 18,
  ETK_NOT_SIMPLY_CONNECTED = 19,
  ETK_DISCONNECTED = 20,
  ETK_ON_TARGET = 21,
  ETK_NEEDS_REFINEMENT = 22,
  ETK_BOUNDARY_HIT = 23,
  ETK_REFINEMENT_BUDGET_EXCEEDED = 24,
  ETK_MARGIN_TOO_SMALL = 25,
  ETK_INCONCLUSIVE = 26,
  ETK_CERTIFICATION_FAILED = 27,
  ETK_NOT_ENOUGH_PREIMAGES = 28,
  ETK_SUBDIVISION_BUDGET_EXCEEDED = 29,
  ETK_ENUMERATION_BUDGET_EXCEEDED = 30,
  ETK_PRECONDITION_VIOLATED = 31,
  ETK_NOT_FOUND = 40, /* search finished without a certificate */
  ETK_INTERNAL = 99
} etk_status;

typedef struct etk_function etk_function;
typedef struct etk_certificate etk_certificate;

ETK_API const char* etk_version(void);
/* Message of the last failing call on this thread; never NULL. */
ETK_API const char* etk_last_error(void);
/* Frees strings returned through char** out-parameters. */
ETK_API void etk_string_free(char* s);

ETK_API etk_status etk_function_create(const char* function_json, etk_function** out);
ETK_API void etk_function_destroy(etk_function* f);
ETK_API etk_status etk_function_evaluate(const etk_function* f, double re, double im, double* out_re, double* out_im);
/* Preimages of w in the domain given as JSON. */
ETK_API etk_status etk_count_preimages(const etk_function* f, const char* domain_json, double w_re, double w_im,
                                       int* count);

/* Runs the self-covering search; options_json may be NULL. ETK_NOT_FOUND leaves *out NULL. */
ETK_API etk_status etk_covering_search(const etk_function* f, int n_cover, const char* options_json,
                                       etk_certificate** out);
ETK_API void etk_certificate_destroy(etk_certificate* c);
ETK_API etk_status etk_certificate_json(const etk_certificate* c, char** json_out);

/* Counts eps-separated backward orbits of length k*m and the resulting entropy bound. */
ETK_API etk_status etk_entropy_bound(const etk_function* f, const etk_certificate* c, int m, int k, unsigned threads,
                                     uint64_t* orbit_count, double* measured, double* floor);

/* Runs a CLI command ("covering-search", "entropy", "example-product") on a JSON config.
   *exit_code gets 0, 2 or 3; *summary is a one-line summary (free with etk_string_free).
   Returns ETK_OK whenever the command ran, whatever its exit code. */
ETK_API etk_status etk_run(const char* command, const char* config_json, int* exit_code, char** summary);

#ifdef __cplusplus
}
#endif

#endif
