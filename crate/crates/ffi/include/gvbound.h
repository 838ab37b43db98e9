#ifndef GVBOUND_H
#define GVBOUND_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

// Which bound a GV-MR point realises.
typedef enum GvbBound {
  GVB_BOUND_MR = 0,
  GVB_BOUND_LOWER_BOUND = 1,
  GVB_BOUND_ZERO = 2,
} GvbBound;

typedef enum GvbSegment {
  GVB_SEGMENT_GV = 0,
  GVB_SEGMENT_A = 1,
  GVB_SEGMENT_B = 2,
  GVB_SEGMENT_TAIL = 3,
  GVB_SEGMENT_SIMPLE = 4,
} GvbSegment;

// Result of every call.
typedef enum GvbStatus {
  GVB_STATUS_OK = 0,
  GVB_STATUS_NULL_POINTER = 1,
  GVB_STATUS_INVALID_ARGUMENT = 2,
  GVB_STATUS_MALFORMED_GRAPH = 3,
  GVB_STATUS_UNSUPPORTED = 4,
  GVB_STATUS_NO_CONVERGENCE = 5,
  GVB_STATUS_NUMERIC_FAILURE = 6,
  GVB_STATUS_IO = 7,
  GVB_STATUS_PANIC = 8,
} GvbStatus;

// Opaque rate-distance curve.
typedef struct GvbCurve GvbCurve;

// Opaque constrained system with its solver settings.
typedef struct GvbSystem GvbSystem;

// Solver settings; obtain defaults from [`gvb_solver_config_default`].
typedef struct GvbSolverConfig {
  double power_tol;
  uintptr_t power_max_iter;
  double newton_tol;
  uintptr_t newton_max_iter;
  double shift;
  double x_lo;
  double x_hi;
} GvbSolverConfig;

typedef struct GvbGvPoint {
  double delta;
  double y;
  double t_tilde;
  double rate;
  // True when `delta` is at or beyond the largest distance with positive rate.
  bool clamped;
} GvbGvPoint;

typedef struct GvbMrPoint {
  double delta;
  double p;
  // Infinite when the point sits at the limit `x -> ∞`.
  double x;
  double y;
  double rate;
  enum GvbBound bound;
} GvbMrPoint;

typedef struct GvbCurvePoint {
  enum GvbSegment segment;
  double param;
  double delta;
  double rate;
} GvbCurvePoint;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message for the last failed call on this thread; empty after a success.
// The pointer stays valid until the next call on this thread.
const char *gvb_last_error_message(void);

// Library version as a static NUL-terminated string.
const char *gvb_version(void);

// # Safety
// `out` must be null or point to writable memory for one config.
enum GvbStatus gvb_solver_config_default(struct GvbSolverConfig *out);

// Builds a system from `swcc:L,w`, `rll:d,k`, `secc:L,w` or `file:<path>`.
//
// # Safety
// `spec` must be a NUL-terminated string and `out` a writable handle slot.
enum GvbStatus gvb_system_new(const char *spec, struct GvbSystem **out);

// Builds a system from graph JSON text:
// `{"s": 1, "states": ["a"], "edges": [{"from": "a", "to": "a", "label": "0"}]}`.
//
// # Safety
// `json` must be a NUL-terminated string and `out` a writable handle slot.
enum GvbStatus gvb_system_from_json(const char *json, struct GvbSystem **out);

// # Safety
// `sys` must be null or a handle from this library that has not been freed.
void gvb_system_free(struct GvbSystem *sys);

// # Safety
// `sys` must be a live handle and `config` a readable config.
enum GvbStatus gvb_system_set_config(struct GvbSystem *sys, const struct GvbSolverConfig *config);

// Number of states and edges and the label length.
//
// # Safety
// `sys` must be a live handle; the outputs must be writable or null.
enum GvbStatus gvb_system_shape(const struct GvbSystem *sys,
                                uintptr_t *states,
                                uintptr_t *edges,
                                uintptr_t *label_bits);

// Capacity in bits per symbol.
//
// # Safety
// `sys` must be a live handle and `out` writable.
enum GvbStatus gvb_capacity(const struct GvbSystem *sys, double *out);

// GV bound at relative distance `delta`.
//
// # Safety
// `sys` must be a live handle and `out` writable.
enum GvbStatus gvb_gv_fixed(const struct GvbSystem *sys, double delta, struct GvbGvPoint *out);

// GV-MR bound at relative distance `delta`. `weight` selects the marked
// labels by Hamming weight; pass a negative value for the default subset.
//
// # Safety
// `sys` must be a live handle and `out` writable.
enum GvbStatus gvb_mr_fixed(const struct GvbSystem *sys,
                            double delta,
                            int32_t weight,
                            struct GvbMrPoint *out);

// GV curve with `n` parameter values, sorted by distance.
//
// # Safety
// `sys` must be a live handle and `out` a writable handle slot.
enum GvbStatus gvb_gv_curve(const struct GvbSystem *sys, uintptr_t n, struct GvbCurve **out);

// GV-MR curve with `n` points; `weight` as in [`gvb_mr_fixed`].
//
// # Safety
// `sys` must be a live handle and `out` a writable handle slot.
enum GvbStatus gvb_mr_curve(const struct GvbSystem *sys,
                            uintptr_t n,
                            int32_t weight,
                            struct GvbCurve **out);

// Number of points in a curve; zero for a null handle.
//
// # Safety
// `curve` must be null or a live curve handle.
uintptr_t gvb_curve_len(const struct GvbCurve *curve);

// Largest distance with positive rate.
//
// # Safety
// `curve` must be a live curve handle and `out` writable.
enum GvbStatus gvb_curve_delta_max(const struct GvbCurve *curve, double *out);

// Point `index` of a curve.
//
// # Safety
// `curve` must be a live curve handle and `out` writable.
enum GvbStatus gvb_curve_point(const struct GvbCurve *curve,
                               uintptr_t index,
                               struct GvbCurvePoint *out);

// # Safety
// `curve` must be null or a curve handle that has not been freed.
void gvb_curve_free(struct GvbCurve *curve);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* GVBOUND_H */
