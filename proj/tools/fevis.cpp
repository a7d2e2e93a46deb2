// SPDX-FileCopyrightText: Copyright (c) 2026 The fevis authors
// SPDX-License-Identifier: Apache-2.0
//
// Command-line front door: one subcommand per pipeline stage.
//
//   interp     expression -> field file
//   sample     field -> 2-D raster (NRRD / PGM)
//   mip        field -> maximum-intensity projection (NRRD / PGM)
//   helmholtz  manufactured Helmholtz solve -> field file (+ raster)
//   diff       two rasters -> difference statistics (+ raster)
//   degrade    field -> piecewise-linear field on the same mesh
//
// Exit codes: 0 success, 1 validation error, 2 numerical error, 3 I/O error.

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <string>
#include <tuple>
#include <variant>
#include <vector>

#include <CLI11.hpp>

#include <fevis/fevis.hpp>

namespace {

using namespace fevis;

// ---------------------------------------------------------------------------
// Flag parsing helpers
// ---------------------------------------------------------------------------

std::vector<double> parse_doubles(const std::string& text, char sep, const char* what) {
  std::vector<double> out;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t next = text.find(sep, pos);
    if (next == std::string::npos) next = text.size();
    const std::string token = text.substr(pos, next - pos);
    char* end = nullptr;
    const double v = std::strtod(token.c_str(), &end);
    if (token.empty() || end != token.c_str() + token.size())
      throw ValidationError(std::string(what) + ": cannot parse number '" + token +
                            "' in '" + text + "'");
    out.push_back(v);
    pos = next + 1;
    if (next == text.size()) break;
  }
  return out;
}

Vec3 parse_vec3(const std::string& text, const char* what) {
  const auto v = parse_doubles(text, ',', what);
  if (v.size() != 3)
    throw ValidationError(std::string(what) + ": expected 3 comma-separated numbers, got '" +
                          text + "'");
  return {v[0], v[1], v[2]};
}

/// "square:8x8" or "box:4x4x4", with optional comma-separated edge lengths.
Mesh mesh_from_spec(const std::string& spec, const std::string& lengths_text) {
  const auto colon = spec.find(':');
  const std::string kind = spec.substr(0, colon);
  std::vector<int> counts;
  if (colon != std::string::npos) {
    std::size_t pos = colon + 1;
    while (pos <= spec.size()) {
      std::size_t next = spec.find('x', pos);
      if (next == std::string::npos) next = spec.size();
      const std::string token = spec.substr(pos, next - pos);
      char* end = nullptr;
      const long v = std::strtol(token.c_str(), &end, 10);
      if (token.empty() || end != token.c_str() + token.size())
        throw ValidationError("mesh spec: cannot parse count '" + token + "' in '" +
                              spec + "'");
      counts.push_back(static_cast<int>(v));
      pos = next + 1;
      if (next == spec.size()) break;
    }
  }
  if (kind == "square" && counts.size() == 2) {
    std::array<double, 2> lengths{1.0, 1.0};
    if (!lengths_text.empty()) {
      const auto l = parse_doubles(lengths_text, ',', "--lengths");
      if (l.size() != 2)
        throw ValidationError("--lengths: a square mesh needs 2 lengths, got '" +
                              lengths_text + "'");
      lengths = {l[0], l[1]};
    }
    return unit_square_mesh(counts[0], counts[1], lengths);
  }
  if (kind == "box" && counts.size() == 3) {
    std::array<double, 3> lengths{1.0, 1.0, 1.0};
    if (!lengths_text.empty()) {
      const auto l = parse_doubles(lengths_text, ',', "--lengths");
      if (l.size() != 3)
        throw ValidationError("--lengths: a box mesh needs 3 lengths, got '" +
                              lengths_text + "'");
      lengths = {l[0], l[1], l[2]};
    }
    return box_mesh(counts[0], counts[1], counts[2], lengths);
  }
  throw ValidationError("mesh spec must look like square:8x8 or box:4x4x4, got '" + spec +
                        "'");
}

/// "200" (square) or "320x200".
std::pair<int, int> parse_resolution(const std::string& text) {
  const auto x = text.find('x');
  auto to_int = [&](const std::string& token) {
    char* end = nullptr;
    const long v = std::strtol(token.c_str(), &end, 10);
    if (token.empty() || end != token.c_str() + token.size())
      throw ValidationError("--res: cannot parse '" + text + "'");
    return static_cast<int>(v);
  };
  if (x == std::string::npos) {
    const int r = to_int(text);
    return {r, r};
  }
  return {to_int(text.substr(0, x)), to_int(text.substr(x + 1))};
}

// ---------------------------------------------------------------------------
// Field sources and image sinks
// ---------------------------------------------------------------------------

using AnyField = std::variant<FEField, AnalyticField>;

int field_dim(const AnyField& f) {
  return std::visit(
      [](const auto& field) {
        if constexpr (std::is_same_v<std::decay_t<decltype(field)>, FEField>)
          return field.space->mesh.dim;
        else
          return field.dim;
      },
      f);
}

/// Exactly one of --field FILE and --expr EXPR (with --mesh) names the field.
AnyField open_field_source(const std::string& field_path, const std::string& expr_text,
                           const std::string& mesh_spec, const std::string& lengths_text) {
  const bool have_file = !field_path.empty();
  const bool have_expr = !expr_text.empty();
  if (have_file == have_expr)
    throw ValidationError(
        "provide exactly one field source: --field FILE, or --expr EXPR with --mesh SPEC");
  if (have_file) return load_field(field_path);
  if (mesh_spec.empty())
    throw ValidationError("--expr needs --mesh to define the evaluation domain");
  Mesh mesh = mesh_from_spec(mesh_spec, lengths_text);
  const int dim = mesh.dim;
  return analytic_field(parse(expr_text, dim), mesh);
}

std::string swap_extension(const std::string& path, const std::string& ext) {
  const auto slash = path.find_last_of('/');
  const auto dot = path.find_last_of('.');
  if (dot == std::string::npos || (slash != std::string::npos && dot < slash))
    return path + ext;
  return path.substr(0, dot) + ext;
}

/// format: "nrrd" writes --out as NRRD, "pgm" writes it as PGM, "both" writes
/// the NRRD at --out plus a PGM with the extension swapped.
void write_raster(const ImageGrid& grid, const std::string& out, const std::string& format) {
  if (format == "nrrd") {
    write_nrrd(out, grid);
  } else if (format == "pgm") {
    write_pgm(out, grid);
  } else if (format == "both") {
    write_nrrd(out, grid);
    write_pgm(swap_extension(out, ".pgm"), grid);
  } else {
    throw ValidationError("--format must be nrrd, pgm, or both, got '" + format + "'");
  }
}

std::ostream& full_precision(std::ostream& os) {
  return os << std::setprecision(17);
}

// ---------------------------------------------------------------------------
// Config files
// ---------------------------------------------------------------------------

/// If the invocation carries --config FILE after its subcommand, read the
/// file's key=value lines and append them as --key value arguments for every
/// key the command line does not already set.  Appending (rather than
/// replacing) keeps explicit flags authoritative, and unknown keys fail in
/// the regular flag parser with its usual message.
void merge_config_defaults(std::vector<std::string>& args) {
  static const char* subcommands[] = {"interp", "sample", "mip",
                                      "helmholtz", "diff", "degrade"};
  std::size_t sub_at = args.size();
  for (std::size_t i = 0; i < args.size() && sub_at == args.size(); ++i)
    for (const char* name : subcommands)
      if (args[i] == name) sub_at = i;
  if (sub_at == args.size()) return;

  std::string path;
  for (std::size_t i = sub_at + 1; i < args.size(); ++i) {
    if (args[i] == "--config" && i + 1 < args.size()) path = args[i + 1];
    else if (args[i].rfind("--config=", 0) == 0) path = args[i].substr(9);
  }
  if (path.empty()) return;

  std::ifstream in(path);
  if (!in) throw IoError("cannot open config file '" + path + "'");

  auto trim = [](std::string s) {
    const auto from = s.find_first_not_of(" \t\r");
    const auto to = s.find_last_not_of(" \t\r");
    return from == std::string::npos ? std::string() : s.substr(from, to - from + 1);
  };

  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string text = trim(line);
    if (text.empty() || text[0] == '#') continue;
    const auto eq = text.find('=');
    if (eq == std::string::npos)
      throw ValidationError("config file '" + path + "' line " +
                            std::to_string(line_no) + ": expected key=value, got '" +
                            text + "'");
    const std::string key = trim(text.substr(0, eq));
    std::string value = trim(text.substr(eq + 1));
    if (key.empty())
      throw ValidationError("config file '" + path + "' line " +
                            std::to_string(line_no) + ": empty key");
    if (value.size() >= 2 && (value.front() == '"' || value.front() == '\'') &&
        value.back() == value.front())
      value = value.substr(1, value.size() - 2);

    const std::string flag = "--" + key;
    bool given = false;
    for (std::size_t i = sub_at + 1; i < args.size() && !given; ++i)
      given = args[i] == flag || args[i].rfind(flag + "=", 0) == 0;
    if (!given) {
      args.push_back(flag);
      args.push_back(value);
    }
  }
}

// ---------------------------------------------------------------------------
// Subcommands
// ---------------------------------------------------------------------------

struct InterpArgs {
  std::string mesh, lengths, expr, out, config;
  int degree = 1;
};

void run_interp(const InterpArgs& a) {
  Mesh mesh = mesh_from_spec(a.mesh, a.lengths);
  auto space = function_space(mesh, "P", a.degree);
  FEField field = interpolate(space, parse(a.expr, mesh.dim));
  save_field(a.out, field);
  std::cout << "dofs: " << space->global_dof_count << "\n";
}

struct SampleArgs {
  std::string field, expr, mesh, lengths, config;
  std::string res = "200";
  std::string window;
  std::string out;
  std::string format = "nrrd";
};

void run_sample(const SampleArgs& a) {
  AnyField field = open_field_source(a.field, a.expr, a.mesh, a.lengths);
  if (field_dim(field) != 2)
    throw ValidationError("sample: the field must be 2-D (use mip for 3-D fields)");
  const auto [w, h] = parse_resolution(a.res);
  std::optional<Window> window;
  if (!a.window.empty()) {
    const auto v = parse_doubles(a.window, ',', "--window");
    if (v.size() != 4)
      throw ValidationError("--window: expected min_x,min_y,max_x,max_y, got '" + a.window +
                            "'");
    window = Window{{v[0], v[1]}, {v[2], v[3]}};
  }
  const ImageGrid grid = std::visit(
      [&](const auto& f) { return window ? sample2d(f, w, h, *window) : sample2d(f, w, h); },
      field);
  write_raster(grid, a.out, a.format);
}

struct MipArgs {
  std::string field, expr, mesh, lengths, config;
  std::string eye = "1,1,5", lookat = "1,1,1", up = "0,1,0";
  double fov = 30.0, near_t = 0.0, far_t = 10.0, step = 0.01;
  std::string res = "200";
  std::string clip_center;
  double clip_radius = 0.0;
  double background = 0.0;
  int threads = 1;
  std::string out;
  std::string format = "nrrd";
};

void run_mip(const MipArgs& a) {
  AnyField field = open_field_source(a.field, a.expr, a.mesh, a.lengths);
  if (field_dim(field) != 3)
    throw ValidationError("mip: the field must be 3-D (use sample for 2-D fields)");
  Camera cam;
  cam.eye = parse_vec3(a.eye, "--eye");
  cam.look_at = parse_vec3(a.lookat, "--lookat");
  cam.up = parse_vec3(a.up, "--up");
  cam.fov_deg = a.fov;
  cam.near = a.near_t;
  cam.far = a.far_t;
  std::tie(cam.width, cam.height) = parse_resolution(a.res);

  RenderConfig cfg;
  cfg.step = a.step;
  cfg.background = a.background;
  cfg.threads = a.threads;
  if (a.clip_radius > 0.0) {
    const Vec3 center =
        a.clip_center.empty() ? cam.look_at : parse_vec3(a.clip_center, "--clip-center");
    cfg.clip = ClipSphere{center, a.clip_radius};
  } else if (!a.clip_center.empty()) {
    throw ValidationError("--clip-center needs --clip-radius to enable clipping");
  }

  const ImageGrid grid =
      std::visit([&](const auto& f) { return mip_render(f, cam, cfg); }, field);
  write_raster(grid, a.out, a.format);
}

struct HelmholtzArgs {
  int n = 10;
  int degree = 1;
  std::string config;
  std::string out;
  std::string image;
  std::string res = "100";
  std::string format = "nrrd";
};

void run_helmholtz(const HelmholtzArgs& a) {
  Mesh mesh = unit_square_mesh(a.n, a.n);
  SolveStats stats;
  FEField u = solve_helmholtz(mesh, a.degree, &stats);

  const Expr exact = parse(kHelmholtzExact, 2);
  const double err = l2_error(u, [&](const Vec3& x) { return eval_expr(exact, x); });

  std::cout << "dofs: " << u.space->global_dof_count << "\n";
  std::cout << "l2_error: " << full_precision << err << "\n";
  std::cout << "cg_iterations: " << stats.cg_iterations << "\n";
  std::cout << "cg_residual: " << full_precision << stats.cg_rel_residual << "\n";

  if (!a.out.empty()) save_field(a.out, u);
  if (!a.image.empty()) {
    const auto [w, h] = parse_resolution(a.res);
    write_raster(sample2d(u, w, h), a.image, a.format);
  }
}

struct DiffArgs {
  std::string a, b;
  std::string out, config;
};

void run_diff(const DiffArgs& args) {
  const ImageGrid a = read_nrrd(args.a);
  const ImageGrid b = read_nrrd(args.b);
  const ImageGrid d = diff_image(a, b);
  double max_v = 0.0, sum = 0.0;
  for (double v : d.values) {
    max_v = std::max(max_v, v);
    sum += v;
  }
  const double mean = d.values.empty() ? 0.0 : sum / static_cast<double>(d.values.size());
  std::cout << "max: " << full_precision << max_v << " mean: " << mean << "\n";
  if (!args.out.empty()) write_nrrd(args.out, d);
}

struct DegradeArgs {
  std::string field;
  std::string mode = "interpolate";
  std::string out, config;
};

void run_degrade(const DegradeArgs& a) {
  FEField u = load_field(a.field);
  FEField lin = degrade_to_linear(u, degrade_mode_from_string(a.mode));
  save_field(a.out, lin);
  std::cout << "dofs: " << lin.space->global_dof_count << "\n";
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"fevis: build, solve, degrade, and render piecewise-polynomial fields",
               "fevis"};
  app.require_subcommand(1);

  InterpArgs interp_args;
  auto* interp = app.add_subcommand("interp", "Interpolate an expression into a field file");
  interp->add_option("--mesh", interp_args.mesh, "Mesh spec, square:NXxNY or box:NXxNYxNZ")
      ->required();
  interp->add_option("--lengths", interp_args.lengths,
                     "Domain edge lengths, comma-separated (default all 1)");
  interp->add_option("--degree", interp_args.degree, "Polynomial degree (1-10)")
      ->capture_default_str();
  interp->add_option("--expr", interp_args.expr, "Expression in x[0], x[1](, x[2])")
      ->required();
  interp->add_option("--out", interp_args.out, "Output field file")->required();
  interp->add_option("--config", interp_args.config,
                     "Read flag defaults from a key=value file (explicit flags win)");
  interp->callback([&] { run_interp(interp_args); });

  SampleArgs sample_args;
  auto* sample = app.add_subcommand("sample", "Sample a 2-D field on a pixel grid");
  sample->add_option("--field", sample_args.field, "Input field file");
  sample->add_option("--expr", sample_args.expr, "Analytic expression instead of --field");
  sample->add_option("--mesh", sample_args.mesh, "Domain for --expr (square:NXxNY)");
  sample->add_option("--lengths", sample_args.lengths, "Domain edge lengths for --mesh");
  sample->add_option("--res", sample_args.res, "Resolution, N or WxH")->capture_default_str();
  sample->add_option("--window", sample_args.window,
                     "World rectangle min_x,min_y,max_x,max_y (default: field bounds)");
  sample->add_option("--out", sample_args.out, "Output image file")->required();
  sample->add_option("--format", sample_args.format, "nrrd, pgm, or both")
      ->capture_default_str();
  sample->add_option("--config", sample_args.config,
                     "Read flag defaults from a key=value file (explicit flags win)");
  sample->callback([&] { run_sample(sample_args); });

  MipArgs mip_args;
  auto* mip = app.add_subcommand("mip", "Maximum-intensity projection of a 3-D field");
  mip->add_option("--field", mip_args.field, "Input field file");
  mip->add_option("--expr", mip_args.expr, "Analytic expression instead of --field");
  mip->add_option("--mesh", mip_args.mesh, "Domain for --expr (box:NXxNYxNZ)");
  mip->add_option("--lengths", mip_args.lengths, "Domain edge lengths for --mesh");
  mip->add_option("--eye", mip_args.eye, "Camera position x,y,z")->capture_default_str();
  mip->add_option("--lookat", mip_args.lookat, "Camera target x,y,z")->capture_default_str();
  mip->add_option("--up", mip_args.up, "Camera up direction x,y,z")->capture_default_str();
  mip->add_option("--fov", mip_args.fov, "Vertical field of view in degrees")
      ->capture_default_str();
  mip->add_option("--near", mip_args.near_t, "Ray start distance")->capture_default_str();
  mip->add_option("--far", mip_args.far_t, "Ray end distance")->capture_default_str();
  mip->add_option("--step", mip_args.step, "Ray-march step length")->capture_default_str();
  mip->add_option("--res", mip_args.res, "Resolution, N or WxH")->capture_default_str();
  mip->add_option("--clip-center", mip_args.clip_center,
                  "Clip-sphere center x,y,z (default: --lookat)");
  mip->add_option("--clip-radius", mip_args.clip_radius,
                  "Clip-sphere radius; 0 disables clipping")
      ->capture_default_str();
  mip->add_option("--background", mip_args.background, "Value for rays that miss the field")
      ->capture_default_str();
  mip->add_option("--threads", mip_args.threads, "Worker threads (1 = deterministic serial)")
      ->capture_default_str();
  mip->add_option("--out", mip_args.out, "Output image file")->required();
  mip->add_option("--format", mip_args.format, "nrrd, pgm, or both")->capture_default_str();
  mip->add_option("--config", mip_args.config, "Read flag defaults from a key=value file (explicit flags win)");
  mip->callback([&] { run_mip(mip_args); });

  HelmholtzArgs helmholtz_args;
  auto* helmholtz = app.add_subcommand(
      "helmholtz", "Solve -lap(u) + u = f on the unit square (manufactured forcing)");
  helmholtz->add_option("--n", helmholtz_args.n, "Mesh subdivisions per side")
      ->capture_default_str();
  helmholtz->add_option("--degree", helmholtz_args.degree, "Polynomial degree (1-10)")
      ->capture_default_str();
  helmholtz->add_option("--out", helmholtz_args.out, "Output field file");
  helmholtz->add_option("--image", helmholtz_args.image, "Also sample the solution here");
  helmholtz->add_option("--res", helmholtz_args.res, "Resolution for --image")
      ->capture_default_str();
  helmholtz->add_option("--format", helmholtz_args.format, "nrrd, pgm, or both")
      ->capture_default_str();
  helmholtz->add_option("--config", helmholtz_args.config,
                        "Read flag defaults from a key=value file (explicit flags win)");
  helmholtz->callback([&] { run_helmholtz(helmholtz_args); });

  DiffArgs diff_args;
  auto* diff = app.add_subcommand("diff", "Compare two NRRD rasters");
  diff->add_option("a", diff_args.a, "First image")->required();
  diff->add_option("b", diff_args.b, "Second image")->required();
  diff->add_option("--out", diff_args.out, "Write the absolute difference here");
  diff->add_option("--config", diff_args.config, "Read flag defaults from a key=value file (explicit flags win)");
  diff->callback([&] { run_diff(diff_args); });

  DegradeArgs degrade_args;
  auto* degrade = app.add_subcommand("degrade", "Reduce a field to piecewise linear");
  degrade->add_option("--field", degrade_args.field, "Input field file")->required();
  degrade->add_option("--mode", degrade_args.mode, "interpolate or project")
      ->capture_default_str();
  degrade->add_option("--out", degrade_args.out, "Output field file")->required();
  degrade->add_option("--config", degrade_args.config,
                      "Read flag defaults from a key=value file (explicit flags win)");
  degrade->callback([&] { run_degrade(degrade_args); });

  std::vector<std::string> args(argv + 1, argv + argc);
  try {
    merge_config_defaults(args);
    std::reverse(args.begin(), args.end());  // CLI11 consumes back to front
    app.parse(std::move(args));
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  } catch (const fevis::ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const fevis::IoError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const fevis::NumericError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
