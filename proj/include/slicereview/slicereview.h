#ifndef SLICEREVIEW_SLICEREVIEW_H
#define SLICEREVIEW_SLICEREVIEW_H

#include <stddef.h>

#if defined(_WIN32)
#  if defined(SLICEREVIEW_BUILDING_LIBRARY)
#    define SR_API __declspec(dllexport)
#  else
#    define SR_API __declspec(dllimport)
#  endif
#else
#  define SR_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

/* Status codes. Values are stable. */
typedef enum sr_status {
  SR_OK = 0,
  SR_ERR_CONFIG = 1,
  SR_ERR_IO = 2,
  SR_ERR_SNAPSHOT = 3,
  SR_ERR_DIFF_PARSE = 4,
  SR_ERR_SOURCE_PARSE = 5,
  SR_ERR_RENDER_PARSE = 6,
  SR_ERR_BACKEND = 7,
  SR_ERR_COMMENT_PARSE = 8,
  SR_ERR_DATASET = 9,
  SR_ERR_INVALID_ARGUMENT = 10,
  SR_ERR_INTERNAL = 11
} sr_status;

typedef struct sr_config sr_config;
typedef struct sr_report sr_report;

/* Library version, e.g. "0.3.0". Static storage. */
SR_API const char* sr_version(void);

/* Message of the last failed call on this thread, or "" when none. Valid
   until the next call on the same thread. */
SR_API const char* sr_last_error(void);

/* Strings returned through char** out-parameters are owned by the caller. */
SR_API void sr_string_free(char* s);

/* A config with every default applied. */
SR_API sr_status sr_config_new(sr_config** out);
/* Reads an INI or JSON config file. */
SR_API sr_status sr_config_load(const char* path, sr_config** out);
/* Overrides one option by "section.key" name, e.g. "filter.top_k". */
SR_API sr_status sr_config_set(sr_config* cfg, const char* key, const char* value);
/* Effective config as JSON (as echoed into reports). */
SR_API sr_status sr_config_to_json(const sr_config* cfg, char** out_json);
/* Checks ranges and the presence of the dataset and backend files. */
SR_API sr_status sr_config_validate(const sr_config* cfg);
SR_API void sr_config_free(sr_config* cfg);

/* Runs the whole pipeline, writing artifacts under run.output. On
   SR_ERR_DATASET with a non-NULL *out no MR completed but the report is
   still available. */
SR_API sr_status sr_run_pipeline(const sr_config* cfg, sr_report** out);

/* Recomputes metrics from comments stored under output_dir by an earlier
   run, without any model calls. */
SR_API sr_status sr_eval(const sr_config* cfg, const char* output_dir, sr_report** out);

/* Loads a report.json. */
SR_API sr_status sr_report_load(const char* path, sr_report** out);
/* Writes report.json and report.txt into dir. */
SR_API sr_status sr_report_write(const sr_report* report, const char* dir);
SR_API sr_status sr_report_to_json(const sr_report* report, char** out_json);
SR_API sr_status sr_report_to_text(const sr_report* report, char** out_text);
/* Metric by name: "KBI", "FAR1", "CPI1", "FAR2", "CPI2", "LSR". *defined
   is 0 for an undefined metric ("--"). */
SR_API sr_status sr_report_metric(const sr_report* report, const char* name, double* value, int* defined);
SR_API void sr_report_free(sr_report* report);

/* Slices one diff against a repository snapshot. option is one of diff,
   function, leftflow, fullflow; mode is none, relative or inline. The JSON
   holds the slices, each with its rendered text. */
SR_API sr_status sr_slice(const char* repo, const char* commit_id, const char* diff_path, const char* option,
                          const char* mode, const char* frontend, char** out_json);

/* Statement index of the same inputs as JSON. */
SR_API sr_status sr_dump_ast(const char* repo, const char* commit_id, const char* diff_path, const char* frontend,
                             char** out_json);

/* Harmonic index of kbi and 100 - far. Returns 0 with *defined = 0 when
   undefined. */
SR_API sr_status sr_compute_cpi(double kbi, double far, double* cpi, int* defined);

#ifdef __cplusplus
}
#endif

#endif
