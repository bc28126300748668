#ifndef ENTROFLOW_H
#define ENTROFLOW_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define EF_API __declspec(dllexport)
#else
#define EF_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

/* Status codes double as CLI exit codes. */
typedef int ef_status;
#define EF_OK 0           /* success, witness found, all checks passed */
#define EF_NEGATIVE 1     /* definitive negative: infeasible, no code, not admissible */
#define EF_PRECONDITION 2 /* precondition-negative, e.g. not a polymatroid */
#define EF_BUDGET 3       /* search budget exhausted */
#define EF_USAGE 64       /* malformed input or bad arguments */
#define EF_CAPACITY 65    /* problem too large for the exact LP */
#define EF_INTERNAL 70    /* unexpected failure */

typedef struct ef_problem ef_problem;
typedef struct ef_code ef_code;
typedef struct ef_gadget ef_gadget;
typedef struct ef_report ef_report;

typedef struct ef_options {
  int max_support;      /* check-entropic: per-variable alphabet bound */
  double tol;           /* entropy comparison tolerance */
  uint64_t budget;      /* enumeration budget; 0 selects the built-in default */
  int alphabet_max;     /* search-code: edge and randomness alphabet bound */
  int randomness;       /* search-code: allow private randomness (0/1) */
  int threads;          /* search parallelism */
  uint64_t seed;        /* randomized property bundles */
  int trials;           /* randomized property bundles; 0 selects a default */
  int minimize;         /* lp-bound: minimize instead of maximize */
  int timing;           /* include the timing field in reports */
} ef_options;

EF_API void ef_options_init(ef_options* options);

EF_API const char* ef_version(void);
EF_API const char* ef_status_name(ef_status status);
/* Message of the last failing call on this thread; never NULL. */
EF_API const char* ef_last_error(void);
EF_API void ef_string_free(char* text);

/* Problems (network-model JSON). */
EF_API ef_status ef_problem_from_json(const char* text, ef_problem** out);
EF_API ef_status ef_problem_to_json(const ef_problem* problem, char** out);
EF_API void ef_problem_free(ef_problem* problem);

/* Codes, interpreted against a problem. */
EF_API ef_status ef_code_from_json(const ef_problem* problem, const char* text, ef_code** out);
EF_API ef_status ef_code_to_json(const ef_problem* problem, const ef_code* code, char** out);
EF_API void ef_code_free(ef_code* code);

/* Reports: a JSON document and a human-readable rendering. */
EF_API const char* ef_report_json(const ef_report* report);
EF_API const char* ef_report_text(const ef_report* report);
EF_API void ef_report_free(ef_report* report);

/* Each command stores its report in *report (also on EF_NEGATIVE,
   EF_PRECONDITION, EF_BUDGET and EF_CAPACITY) and returns its status. */

/* h_json: entropy vector text form. */
EF_API ef_status ef_check_entropic(const char* h_json, const ef_options* options, ef_report** report);

/* Optimum of an information expression over the Shannon LP. objective NULL
   or empty checks feasibility. ground: comma-separated T_/W_/V_ names
   restricting to a subnetwork, or NULL. */
EF_API ef_status ef_lp_bound(const ef_problem* problem, const char* objective, const char* ground,
                             const ef_options* options, ef_report** report);
/* chain_json: {"aliases": {...}, "stages": [{"name", "ground", "imports", "claims"}]} */
EF_API ef_status ef_lp_verify_chain(const ef_problem* problem, const char* chain_json, const ef_options* options,
                                    ef_report** report);
EF_API ef_status ef_lp_export(const ef_problem* problem, const char* ground, char** out);

/* *found (optional) receives the first admissible code. */
EF_API ef_status ef_search_code(const ef_problem* problem, const ef_options* options, ef_report** report,
                                ef_code** found);
EF_API ef_status ef_check_code(const ef_problem* problem, const ef_code* code, const ef_options* options,
                               ef_report** report);

/* Gadgets. c and d are rational strings. */
EF_API ef_status ef_gadget_incremental(const char* h_json, ef_gadget** out);
EF_API ef_status ef_gadget_secure(const char* c, const char* d, ef_gadget** out);
EF_API ef_status ef_gadget_adhere(const ef_problem* inner, ef_gadget** out);
EF_API ef_status ef_gadget_problem(const ef_gadget* gadget, ef_problem** out);
EF_API ef_status ef_gadget_contract_json(const ef_gadget* gadget, char** out);
EF_API ef_status ef_gadget_check(const ef_gadget* gadget, const ef_options* options, ef_report** report);
EF_API void ef_gadget_free(ef_gadget* gadget);

/* Named experiments: prop1, thm1 (args {"h": <vector>}), thm2 (args
   {"q": <distribution>}), thm4-demo, and the seeded bundles soundness,
   derandomize, delta-linearity, min-cut. Unknown names give EF_USAGE. */
EF_API ef_status ef_verify(const char* name, const char* args_json, const ef_options* options, ef_report** report);

#ifdef __cplusplus
}
#endif

#endif
