#ifndef HOROFLOW_H
#define HOROFLOW_H

/* C interface to the horoflow library. Objects are opaque handles released
 * with the matching *_free function. Every function returning int returns
 * HF_OK or an error code; the message of the last failure on the calling
 * thread is available from hf_last_error(). */

#include <stddef.h>

#if defined(_WIN32)
#define HF_API __declspec(dllexport)
#else
#define HF_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

enum hf_status {
  HF_OK = 0,
  HF_ERR_VALIDATION = 2, /* malformed input or violated certificate */
  HF_ERR_BUDGET = 3,     /* numerical budget exhausted */
  HF_ERR_DOMAIN = 4,     /* operation undefined for this input */
  HF_ERR_ARGUMENT = 5,   /* null or out-of-range argument */
  HF_ERR_INTERNAL = 6
};

enum hf_verdict { HF_NO = 0, HF_YES = 1, HF_UNRESOLVED = -1 };

typedef struct hf_group hf_group;
typedef struct hf_measure hf_measure;
typedef struct hf_result hf_result;

HF_API const char* hf_version(void);
HF_API const char* hf_last_error(void);
/* Strings returned through char** belong to the caller. */
HF_API void hf_string_free(char* s);

/* ---- groups */

/* Built-in name ("schottky2", "cusp1") or path to a JSON group spec. */
HF_API int hf_group_open(const char* name_or_path, hf_group** out);
HF_API int hf_group_from_json(const char* spec_json, hf_group** out);
HF_API void hf_group_free(hf_group* g);
HF_API int hf_group_rank(const hf_group* g, size_t* rank);
HF_API int hf_group_has_parabolics(const hf_group* g, int* yes);
/* Certificate of the ping-pong construction. */
HF_API int hf_group_region_margin(const hf_group* g, double* margin);
/* Slope of ln N(T') on [T/2, T] and the RMS residual of the fit. */
HF_API int hf_critical_exponent(const hf_group* g, double T, double* delta, double* residual);
/* Reduces the half-plane point x + iy into the fundamental domain. */
HF_API int hf_reduce_point(const hf_group* g, double x, double y, double* rx, double* ry, size_t* word_length);
/* Disc angle of a boundary point specifier such as "first-endpoint:auto",
 * "fixed-point:ab" or "angle:1.5". */
HF_API int hf_boundary_point(const hf_group* g, const char* spec, double* angle);
HF_API int hf_is_first_endpoint(const hf_group* g, double angle, int depth, int* verdict);

/* ---- Patterson measures */

/* Atoms at exponent s on the word sphere of the given length, or on the
 * distance shell [ball_radius - shell_width, ball_radius] when
 * sphere_length <= 0. */
HF_API int hf_patterson(const hf_group* g, double s, int sphere_length, double ball_radius, double shell_width,
                        hf_measure** out);
HF_API void hf_measure_free(hf_measure* m);
HF_API size_t hf_measure_size(const hf_measure* m);
HF_API int hf_measure_atom(const hf_measure* m, size_t k, double* angle, double* weight);
/* Mass of the counterclockwise closed arc [start, start + length]. */
HF_API int hf_measure_arc_mass(const hf_measure* m, double start, double length, double* mass);

/* ---- commands */

HF_API size_t hf_command_count(void);
HF_API const char* hf_command_name(size_t k);
HF_API int hf_default_config(const char* command, char** json);
/* Defaults merged with config_json (may be NULL or ""); unknown keys fail. */
HF_API int hf_resolve_config(const char* command, const char* config_json, char** json);
HF_API int hf_run(const char* command, const char* config_json, hf_result** out);
HF_API const char* hf_result_summary(const hf_result* r); /* JSON */
HF_API const char* hf_result_csv(const hf_result* r);
HF_API const char* hf_result_svg(const hf_result* r);
/* 1 when every tolerance check passed. */
HF_API int hf_result_pass(const hf_result* r);
HF_API void hf_result_free(hf_result* r);

#ifdef __cplusplus
}
#endif

#endif
