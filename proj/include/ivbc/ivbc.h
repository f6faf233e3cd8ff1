/* ivbc — blockchain-backed intelligent-vehicle data sharing simulator.
 *
 * C interface of the shared library. All functions return an ivbc_status;
 * every output string is heap-allocated and must be released with
 * ivbc_string_free. A failing call leaves outputs untouched and records a
 * message retrievable via ivbc_last_error (thread local).
 */
#ifndef IVBC_H
#define IVBC_H

#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef enum ivbc_status {
    IVBC_OK = 0,
    IVBC_ERR_USAGE = 1,         /* bad arguments (null pointers, unknown names) */
    IVBC_ERR_IO = 2,            /* file system or storage failure */
    IVBC_ERR_SCENARIO = 3,      /* scenario or configuration invalid */
    IVBC_ERR_AUDIT = 4,         /* run finished but an invariant failed */
    IVBC_ERR_ACCESS_DENIED = 5, /* role lacks scope for the request */
    IVBC_ERR_NOT_FOUND = 6,     /* unknown vehicle or record */
    IVBC_ERR_INTERNAL = 7
} ivbc_status;

/* An opened run directory (read-only view over its record logs). */
typedef struct ivbc_run ivbc_run;

const char* ivbc_version(void);
const char* ivbc_status_name(ivbc_status status);

/* Message of the most recent failure on this thread ("" when none). */
const char* ivbc_last_error(void);

void ivbc_string_free(char* s);

/* JSON array of the builtin scenario names. */
ivbc_status ivbc_scenario_list(char** out_json);

/* Executes a scenario (builtin name or file path) and persists the run
 * under out_dir. config_path may be NULL for defaults; seed overrides the
 * configured seed when has_seed is nonzero. On success *out_summary_json
 * holds the run summary. Returns IVBC_ERR_AUDIT when the run completed
 * but an invariant failed (the summary is still produced). */
ivbc_status ivbc_scenario_run(const char* scenario, const char* config_path, int has_seed,
                              uint64_t seed, const char* out_dir, char** out_summary_json);

ivbc_status ivbc_run_open(const char* run_dir, ivbc_run** out_run);
void ivbc_run_close(ivbc_run* run);

/* Chain dump: one JSON object per line, genesis first. */
ivbc_status ivbc_run_export_chain(const ivbc_run* run, char** out_jsonl);
/* Event log of the run, one JSON object per line. */
ivbc_status ivbc_run_export_events(const ivbc_run* run, char** out_jsonl);
/* Final ledger snapshot: hex id -> balance map plus supply. */
ivbc_status ivbc_run_export_ledger(const ivbc_run* run, char** out_json);

/* Role-gated history of one vehicle (transactions and messages) within
 * [from_tick, to_tick]; pass to_tick = -1 for no upper bound. Roles:
 * owner | hospital | insurance | police | public. */
ivbc_status ivbc_run_query(const ivbc_run* run, const char* role, const char* vehicle_hex,
                           int64_t from_tick, int64_t to_tick, char** out_jsonl);

/* Reputation counters of one vehicle, recomputed from the stored records. */
ivbc_status ivbc_run_report(const ivbc_run* run, const char* role, const char* vehicle_hex,
                            char** out_json);

/* Re-validates the whole run directory. IVBC_OK when clean, IVBC_ERR_AUDIT
 * with a findings report otherwise. */
ivbc_status ivbc_run_audit(const ivbc_run* run, char** out_json);

/* Audit without an open handle; also usable when the directory is too
 * damaged to load (the damage becomes a finding). */
ivbc_status ivbc_audit_dir(const char* run_dir, char** out_json);

#ifdef __cplusplus
} /* extern "C" */
#endif

#endif /* IVBC_H */
