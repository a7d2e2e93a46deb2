// SPDX-FileCopyrightText: Copyright (c) 2026 The fevis authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "errors.hpp"
#include "expr.hpp"
#include "mesh.hpp"
#include "space.hpp"
#include "vec.hpp"

namespace fevis {

/// Axis-aligned rectangle in the plane, as (min, max) corners.
struct Window {
  std::array<double, 2> lo{0.0, 0.0};
  std::array<double, 2> hi{1.0, 1.0};
};

/// Row-major scalar raster: values[row * width + col], row 0 at the smallest
/// y (sample grids) or the bottom of the image plane (renders).  Grids made
/// by sample2d remember the world rectangle they sampled.
struct ImageGrid {
  int width = 0;
  int height = 0;
  std::vector<double> values;
  std::optional<Window> window;
};

/// Closed-form field: an expression evaluated over an axis-aligned box.
/// Useful as ground truth next to a finite-element field on the same region.
struct AnalyticField {
  Expr expr;
  int dim = 3;
  Vec3 lo{0.0, 0.0, 0.0};
  Vec3 hi{1.0, 1.0, 1.0};
};

inline AnalyticField analytic_field(Expr expr, int dim, const Vec3& lo, const Vec3& hi) {
  if (dim != 2 && dim != 3)
    throw ValidationError("analytic_field: dimension must be 2 or 3, got " +
                          std::to_string(dim));
  for (int d = 0; d < dim; ++d)
    if (!(lo[static_cast<std::size_t>(d)] < hi[static_cast<std::size_t>(d)]))
      throw ValidationError("analytic_field: box must have positive extent on axis " +
                            std::to_string(d));
  return AnalyticField{std::move(expr), dim, lo, hi};
}

/// Same, with the box taken from a mesh's bounding box.
inline AnalyticField analytic_field(Expr expr, const Mesh& mesh) {
  const auto [lo, hi] = mesh_bounds(mesh);
  return AnalyticField{std::move(expr), mesh.dim, lo, hi};
}

/// Uniform evaluation interface used by the samplers below: nullopt outside
/// the field's domain, the value inside.
inline std::optional<double> try_eval(const AnalyticField& f, const Vec3& p) {
  for (int d = 0; d < f.dim; ++d) {
    const std::size_t sd = static_cast<std::size_t>(d);
    if (p[sd] < f.lo[sd] - kBaryTol || p[sd] > f.hi[sd] + kBaryTol) return std::nullopt;
  }
  return eval_expr(f.expr, p);
}

inline std::optional<double> try_eval(const FEField& f, const Vec3& p) {
  const auto cell = locate(f, p);
  if (!cell) return std::nullopt;
  return eval_in_cell(f, *cell, p);
}

inline std::pair<Vec3, Vec3> field_bounds(const AnalyticField& f) { return {f.lo, f.hi}; }
inline std::pair<Vec3, Vec3> field_bounds(const FEField& f) {
  return mesh_bounds(f.space->mesh);
}

/// Sample a 2-D field at pixel centers of a world rectangle: column i maps to
/// x = lo_x + (i + 0.5)/width * (hi_x - lo_x), row j likewise in y with row 0
/// at the smallest y.  Pixels whose center falls outside the field's domain
/// take the background value.
template <class Field>
ImageGrid sample2d(const Field& field, int width, int height, const Window& window,
                   double background = 0.0) {
  if (width < 1 || height < 1)
    throw ValidationError("sample2d: resolution must be positive, got " +
                          std::to_string(width) + "x" + std::to_string(height));
  if (!(window.lo[0] < window.hi[0]) || !(window.lo[1] < window.hi[1]))
    throw ValidationError("sample2d: window must have positive extent");
  ImageGrid grid;
  grid.width = width;
  grid.height = height;
  grid.window = window;
  grid.values.resize(static_cast<std::size_t>(width) * static_cast<std::size_t>(height));
  for (int j = 0; j < height; ++j)
    for (int i = 0; i < width; ++i) {
      const Vec3 p{window.lo[0] + (i + 0.5) / width * (window.hi[0] - window.lo[0]),
                   window.lo[1] + (j + 0.5) / height * (window.hi[1] - window.lo[1]),
                   0.0};
      const auto v = try_eval(field, p);
      grid.values[static_cast<std::size_t>(j) * static_cast<std::size_t>(width) +
                  static_cast<std::size_t>(i)] = v ? *v : background;
    }
  return grid;
}

/// Same, with the window defaulting to the field's bounding rectangle.
template <class Field>
ImageGrid sample2d(const Field& field, int width, int height) {
  const auto [lo, hi] = field_bounds(field);
  return sample2d(field, width, height, Window{{lo[0], lo[1]}, {hi[0], hi[1]}});
}

/// Pinhole camera.  fov_deg is the full vertical field of view; horizontal
/// extent follows from the aspect ratio.  Rays are marched from near to far.
struct Camera {
  Vec3 eye{1.0, 1.0, 5.0};
  Vec3 look_at{1.0, 1.0, 1.0};
  Vec3 up{0.0, 1.0, 0.0};
  double fov_deg = 30.0;
  int width = 200;
  int height = 200;
  double near = 0.0;
  double far = 10.0;
};

/// Restrict ray samples to a ball (used to cut a field open along a sphere).
struct ClipSphere {
  Vec3 center{0.0, 0.0, 0.0};
  double radius = 1.0;
};

struct RenderConfig {
  double step = 0.01;              ///< ray sampling interval
  std::optional<ClipSphere> clip;  ///< keep only samples inside this ball
  double background = 0.0;         ///< pixel value when no sample lands in the field
  int threads = 1;
};

namespace detail {

struct RayFrame {
  Vec3 forward, right, true_up;
  double tan_half_fov, aspect;
};

inline RayFrame camera_frame(const Camera& cam) {
  if (cam.width < 1 || cam.height < 1)
    throw ValidationError("camera: resolution must be positive, got " +
                          std::to_string(cam.width) + "x" + std::to_string(cam.height));
  if (!(cam.fov_deg > 0.0) || !(cam.fov_deg < 180.0))
    throw ValidationError("camera: field of view must lie in (0, 180) degrees, got " +
                          std::to_string(cam.fov_deg));
  if (!(cam.far > cam.near) || cam.near < 0.0)
    throw ValidationError("camera: need 0 <= near < far, got near " +
                          std::to_string(cam.near) + ", far " + std::to_string(cam.far));
  const Vec3 gaze = vec_sub(cam.look_at, cam.eye);
  if (norm(gaze) < 1e-14)
    throw ValidationError("camera: eye and look-at coincide");
  RayFrame frame;
  frame.forward = normalized(gaze);
  const Vec3 side = cross(frame.forward, cam.up);
  if (norm(side) < 1e-12)
    throw ValidationError("camera: up direction is parallel to the viewing direction");
  frame.right = normalized(side);
  frame.true_up = cross(frame.right, frame.forward);
  frame.tan_half_fov = std::tan(cam.fov_deg * M_PI / 360.0);
  frame.aspect = static_cast<double>(cam.width) / static_cast<double>(cam.height);
  return frame;
}

} // namespace detail

/// Maximum-intensity projection: march each ray from near to far in fixed steps
/// and keep the largest field value seen.  Pixels whose ray never hits the
/// field keep the background value.  Deterministic for any thread count:
/// pixels are independent and each is computed exactly once.
template <class Field>
ImageGrid mip_render(const Field& field, const Camera& cam, const RenderConfig& cfg) {
  const detail::RayFrame frame = detail::camera_frame(cam);
  if (!(cfg.step > 0.0))
    throw ValidationError("mip_render: step must be positive, got " +
                          std::to_string(cfg.step));
  if (cfg.clip && !(cfg.clip->radius > 0.0))
    throw ValidationError("mip_render: clip sphere radius must be positive, got " +
                          std::to_string(cfg.clip->radius));

  ImageGrid grid;
  grid.width = cam.width;
  grid.height = cam.height;
  grid.values.assign(
      static_cast<std::size_t>(cam.width) * static_cast<std::size_t>(cam.height),
      cfg.background);

  const int nsteps = static_cast<int>((cam.far - cam.near) / cfg.step + 1e-9) + 1;

  auto render_row = [&](int j) {
    const double ndc_y =
        (2.0 * (j + 0.5) / cam.height - 1.0) * frame.tan_half_fov;
    for (int i = 0; i < cam.width; ++i) {
      const double ndc_x =
          (2.0 * (i + 0.5) / cam.width - 1.0) * frame.tan_half_fov * frame.aspect;
      Vec3 dir = frame.forward;
      dir = vec_add(dir, vec_scale(ndc_x, frame.right));
      dir = vec_add(dir, vec_scale(ndc_y, frame.true_up));
      dir = normalized(dir);
      double best = cfg.background;
      for (int s = 0; s < nsteps; ++s) {
        const double t = cam.near + s * cfg.step;
        const Vec3 p = vec_add(cam.eye, vec_scale(t, dir));
        if (cfg.clip && distance(p, cfg.clip->center) >= cfg.clip->radius) continue;
        const auto v = try_eval(field, p);
        if (v && *v > best) best = *v;
      }
      grid.values[static_cast<std::size_t>(j) * static_cast<std::size_t>(cam.width) +
                  static_cast<std::size_t>(i)] = best;
    }
  };

  const int nthreads = std::max(1, std::min(cfg.threads, 64));
  if (nthreads == 1) {
    for (int j = 0; j < cam.height; ++j) render_row(j);
  } else {
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(nthreads));
    for (int t = 0; t < nthreads; ++t)
      pool.emplace_back([&, t]() {
        for (int j = t; j < cam.height; j += nthreads) render_row(j);
      });
    for (auto& th : pool) th.join();
  }
  return grid;
}

/// Pixel-wise absolute difference of two equally sized rasters.
inline ImageGrid diff_image(const ImageGrid& a, const ImageGrid& b) {
  if (a.width != b.width || a.height != b.height)
    throw ValidationError("diff_image: image sizes differ (" + std::to_string(a.width) +
                          "x" + std::to_string(a.height) + " vs " +
                          std::to_string(b.width) + "x" + std::to_string(b.height) + ")");
  ImageGrid out;
  out.width = a.width;
  out.height = a.height;
  out.values.resize(a.values.size());
  for (std::size_t i = 0; i < a.values.size(); ++i)
    out.values[i] = std::abs(a.values[i] - b.values[i]);
  return out;
}

} // namespace fevis
