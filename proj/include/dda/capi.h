#ifndef DDA_CAPI_H
#define DDA_CAPI_H

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

#if defined(_WIN32)
#define DDA_API __declspec(dllexport)
#else
#define DDA_API __attribute__((visibility("default")))
#endif

/* Status values double as process exit codes. */
typedef enum dda_status {
  DDA_OK = 0,
  DDA_ERR_CONFIG = 2,
  DDA_ERR_PRECONDITION = 3,
  DDA_ERR_NUMERICAL = 4,
  DDA_ERR_IO = 5
} dda_status;

/* Message for the last failing call on this thread; empty string if none. */
DDA_API const char* dda_last_error(void);

typedef struct dda_config dda_config;

DDA_API dda_status dda_config_load(const char* path, dda_config** out);
DDA_API dda_status dda_config_parse(const char* json_text, dda_config** out);
DDA_API void dda_config_free(dda_config* cfg);

DDA_API dda_status dda_config_set_seed(dda_config* cfg, uint64_t seed);
DDA_API dda_status dda_config_set_out_dir(dda_config* cfg, const char* dir);
/* Overrides T for every configured algorithm. */
DDA_API dda_status dda_config_set_rounds(dda_config* cfg, long T);
/* Keeps only the named algorithms (comma separated list). */
DDA_API dda_status dda_config_select_algorithms(dda_config* cfg, const char* names);

/* Returned strings are heap allocated; release with dda_string_free. */
DDA_API dda_status dda_config_serialize(const dda_config* cfg, char** json_out);
DDA_API void dda_string_free(char* s);

/* Commands. base_dir resolves relative paths inside the config; text output
 * that a CLI would print lands in *log_out when non-NULL. */
DDA_API dda_status dda_check(const dda_config* cfg, const char* base_dir, char** log_out);
DDA_API dda_status dda_reference(const dda_config* cfg, const char* base_dir,
                                 char** log_out);
DDA_API dda_status dda_run(const dda_config* cfg, const char* base_dir, char** log_out,
                           int* any_failed);
DDA_API dda_status dda_sweep(const dda_config* cfg, const char* base_dir,
                             const double* grid, size_t grid_len, char** log_out);

#ifdef __cplusplus
}
#endif

#endif /* DDA_CAPI_H */
