// hopflab: command-line runner for the Gauss-map degree and transgression suites.
//
// Exit codes: 0 all verifications pass, 1 a verification failed (reports are
// still written), 2 input or configuration error.

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>

#include "CLI11.hpp"
#include "hopf/connection.hpp"
#include "hopf/corpus.hpp"
#include "hopf/degree.hpp"
#include "hopf/error.hpp"
#include "hopf/euler.hpp"
#include "hopf/mesh.hpp"
#include "hopf/parallel.hpp"
#include "hopf/report.hpp"
#include "hopf/transgression.hpp"

namespace {

using namespace hopf;

struct Globals {
  std::string grid;
  std::string backend;
  std::uint64_t seed = 1;
  int threads = 0;
  double tol = 0.1;
  std::string report_path;
  std::string csv_path;
  bool timings = false;
};

std::vector<int> parse_grid(const std::string& text) {
  std::vector<int> out;
  std::stringstream ss(text);
  std::string part;
  while (std::getline(ss, part, 'x')) {
    std::size_t used = 0;
    int value = 0;
    try {
      value = std::stoi(part, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != part.size() || part.empty() || value <= 0) throw InputError("--grid expects AxB[xC], got '" + text + "'");
    out.push_back(value);
  }
  if (out.empty() || out.size() > 3) throw InputError("--grid expects AxB[xC], got '" + text + "'");
  return out;
}

corpus::Shape build_shape(const std::string& name, const Globals& g) {
  corpus::BuildOptions options;
  if (!g.grid.empty()) options.resolution = parse_grid(g.grid);
  if (!g.backend.empty()) options.backend = g.backend;
  return corpus::build(name, options);
}

report::ShapeReport blank_report(const corpus::Shape& s) {
  report::ShapeReport r;
  r.record = s.record;
  r.expected_degree = s.record.expected_degree.value;
  r.parity_case = s.surface.ambient_dim % 2 == 1 ? "odd: chi(H)/2" : "even: chi(W)";
  return r;
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot write '" + path + "'");
  out << text;
}

int emit(report::ShapeReport r, const Globals& g) {
  report::finalize(r, g.tol);
  report::Report rep;
  rep.seed = g.seed;
  rep.tol = g.tol;
  rep.timings = g.timings;
  rep.shapes.push_back(std::move(r));
  if (!g.report_path.empty()) write_file(g.report_path, report::to_json(rep));
  if (!g.csv_path.empty()) write_file(g.csv_path, report::to_csv(rep));
  for (const auto& f : rep.shapes.front().failures) std::printf("FAIL %s\n", f.c_str());
  return rep.pass() ? 0 : 1;
}

void print_estimate(const degree::DegreeEstimate& e, int expected, double tol) {
  std::printf("%-9s value %.12g  error %.3g  rounded %d  expected %d  %s\n", e.estimator.c_str(), e.value, e.error,
              e.rounded, expected, report::estimate_matches(e, expected, tol) ? "pass" : "fail");
  for (const auto& n : e.diagnostics.notes) std::printf("          note: %s\n", n.c_str());
}

int cmd_list() {
  std::printf("%-13s %2s %-9s %-7s %-7s %s\n", "shape", "n", "repr", "chi_H", "chi_W", "description");
  for (const auto& name : corpus::catalog()) {
    std::string chi_h = "-", chi_w = "-", repr = "?", n = "?";
    try {
      const auto s = corpus::build(name);
      n = std::to_string(s.record.ambient_dim);
      repr = std::string(surfaces::to_string(s.record.representation));
      if (s.record.chi_h) chi_h = std::to_string(s.record.chi_h->value);
      if (s.record.chi_w) chi_w = std::to_string(s.record.chi_w->value);
    } catch (const std::exception& e) {
      repr = "unavailable";
    }
    std::printf("%-13s %2s %-9s %-7s %-7s %s\n", name.c_str(), n.c_str(), repr.c_str(), chi_h.c_str(), chi_w.c_str(),
                corpus::describe(name).c_str());
  }
  return 0;
}

int cmd_degree(const std::string& name, const std::string& estimator, int preimage_grid, const Globals& g) {
  const auto shape = build_shape(name, g);
  const auto& h = shape.surface;
  auto r = blank_report(shape);
  const bool all = estimator == "all";
  std::vector<std::string> wanted;
  if (all) {
    switch (h.representation) {
      case surfaces::Representation::mesh: wanted = {"mesh"}; break;
      case surfaces::Representation::implicit: wanted = {"preimage", "gk"}; break;
      case surfaces::Representation::chart:
        if (h.ambient_dim % 2 == 1) {
          wanted = {"preimage", "gk", "pfaffian"};
        } else if (h.ambient_dim == 2) {
          wanted = {"preimage", "tpf", "winding"};
        } else {
          wanted = {"preimage", "tpf"};
        }
        break;
    }
  } else {
    wanted = {estimator};
  }
  for (const auto& w : wanted) {
    degree::DegreeEstimate e;
    if (w == "preimage") {
      e = degree::degree_preimage(h, g.seed, preimage_grid);
    } else if (w == "gk") {
      e = degree::degree_gk(h);
    } else if (w == "pfaffian") {
      e = degree::degree_pfaffian(h);
    } else if (w == "tpf") {
      e = transgression::hopf_even_degree(h);
    } else if (w == "winding") {
      e = degree::winding_number(h);
    } else {
      if (h.representation != surfaces::Representation::mesh) throw InputError("mesh estimator needs a mesh shape");
      e = degree::degree_mesh(*h.mesh);
    }
    print_estimate(e, r.expected_degree, g.tol);
    r.estimates.push_back(std::move(e));
  }
  return emit(std::move(r), g);
}

int cmd_euler(const std::string& name, const std::string& method, int preimage_grid, const Globals& g) {
  const auto shape = build_shape(name, g);
  const auto& h = shape.surface;
  const auto& rec = shape.record;
  auto r = blank_report(shape);
  if (method == "mesh" || (method == "auto" && h.representation == surfaces::Representation::mesh)) {
    surfaces::TriMesh m;
    if (h.representation == surfaces::Representation::mesh) {
      m = *h.mesh;
    } else if (h.representation == surfaces::Representation::implicit) {
      m = surfaces::marching_tetrahedra(*h.level_set, h.implicit_mesh_cells);
    } else if (h.ambient_dim == 3) {
      m = surfaces::triangulate_chart(*h.chart, 32, 64);
    } else {
      throw InputError("euler --method mesh needs a surface in R^3");
    }
    const int chi = euler::chi_mesh(m);
    std::printf("chi_H (mesh V-E+F = %d-%d+%d) = %d, annotated %s\n", m.vertex_count(), m.edge_count, m.face_count(),
                chi, rec.chi_h ? std::to_string(rec.chi_h->value).c_str() : "-");
    if (rec.chi_h) r.chi.push_back({"chi_H", "mesh", chi, rec.chi_h->value});
  } else {
    std::mt19937_64 rng(g.seed);
    const Vec v = degree::random_direction(h.ambient_dim, rng);
    const auto m = euler::chi_morse(h, v, g.seed, preimage_grid);
    for (const auto& c : m.points) {
      std::printf("  critical point height %+.9f index %d %s\n", c.height, c.index, c.inward ? "inward" : "outward");
    }
    std::printf("chi_H (morse) = %d   inward count = %d   rejected directions = %d\n", m.chi, m.solid_chi,
                m.rejected_directions);
    if (rec.chi_h) r.chi.push_back({"chi_H", "morse", m.chi, rec.chi_h->value});
    if (rec.chi_w) r.chi.push_back({"chi_W", "morse-inward", m.solid_chi, rec.chi_w->value});
  }
  return emit(std::move(r), g);
}

int cmd_transgress(const std::string& name, int points, const Globals& g) {
  const auto shape = build_shape(name, g);
  const auto& h = shape.surface;
  auto r = blank_report(shape);
  auto e = transgression::hopf_even_degree(h);
  report::TpfChecks t;
  t.integral = -e.value;
  t.expected = -r.expected_degree;
  std::printf("integral TPf = %.15g  (error %.3g, expected %d)\n", t.integral, e.error, -r.expected_degree);
  if (h.representation == surfaces::Representation::chart) {
    const auto c = transgression::closedness_residual(h, points, g.seed);
    t.closedness = c.max_residual;
    r.checks.push_back({"tpf_closedness", c.max_residual, 1e-4});
    double nat = 0.0;
    for (const auto& u : transgression::sample_parameters(*h.chart, points, g.seed + 1)) {
      nat = std::max(nat, transgression::naturality_residual(h, u));
    }
    t.naturality = nat;
    r.checks.push_back({"tpf_naturality", nat, 1e-6});
    const auto sym = transgression::sphere_symmetry(h, points, g.seed);
    std::printf("closedness residual = %.3g over %d points\nnaturality residual = %.3g\n", c.max_residual, c.points,
                nat);
    std::printf("TPf density: mean %.12g, max deviation %.3g\n", sym.mean, sym.max_deviation);
  }
  r.estimates.push_back(std::move(e));
  r.tpf = t;
  return emit(std::move(r), g);
}

int cmd_lemma1(const std::string& name, int points, const Globals& g) {
  const auto shape = build_shape(name, g);
  const auto& h = shape.surface;
  auto r = blank_report(shape);
  const auto& chart = h.require_chart();
  const int m = chart.param_dim();
  const auto params = transgression::sample_parameters(chart, points, g.seed);
  std::mt19937_64 rng(g.seed ^ 0x9e3779b97f4a7c15ULL);
  std::normal_distribution<double> normal;
  double max = 0.0;
  for (int f = 0; f < 3; ++f) {
    const auto field = connection::SphereField::member(h.ambient_dim, 1000 + f);
    double field_max = 0.0;
    for (const auto& u : params) {
      std::array<double, 3> y{};
      for (int i = 0; i < m; ++i) y[i] = normal(rng);
      field_max = std::max(field_max, connection::lemma1_residual(h, u, field, std::span<const double>(y.data(), m)));
    }
    std::printf("field %d: max residual %.3g over %d points\n", f, field_max, points);
    max = std::max(max, field_max);
  }
  r.lemma1_max = max;
  r.checks.push_back({"lemma1_residual", max, 1e-6});
  return emit(std::move(r), g);
}

int cmd_verify_all(const std::string& config_path, const Globals& g) {
  std::vector<corpus::ConfigEntry> entries = corpus::default_corpus();
  report::VerifyOptions options;
  options.seed = g.seed;
  options.tol = g.tol;
  options.timings = g.timings;
  if (!config_path.empty()) {
    const auto cfg = corpus::load_config(config_path);
    entries = cfg.shapes;
    if (cfg.seed) options.seed = *cfg.seed;
  }
  if (!g.grid.empty()) throw InputError("verify-all takes per-shape resolutions from --config, not --grid");
  if (!g.backend.empty()) {
    for (auto& e : entries) {
      if (!e.options.backend) e.options.backend = g.backend;
    }
  }
  const auto rep = report::verify_all(entries, options);
  for (const auto& s : rep.shapes) {
    std::printf("%-13s %s", s.record.name.c_str(), s.pass() ? "pass" : "FAIL");
    for (const auto& e : s.estimates) std::printf("  %s=%.6g", e.estimator.c_str(), e.value);
    if (g.timings) std::printf("  (%.2fs)", s.seconds);
    std::printf("\n");
    for (const auto& f : s.failures) std::printf("    %s\n", f.c_str());
  }
  if (!g.report_path.empty()) write_file(g.report_path, report::to_json(rep));
  if (!g.csv_path.empty()) write_file(g.csv_path, report::to_csv(rep));
  return rep.pass() ? 0 : 1;
}

int cmd_export_mesh(const std::string& name, int cells, const std::string& out_path, const Globals& g) {
  const auto shape = build_shape(name, g);
  const auto& h = shape.surface;
  surfaces::TriMesh m;
  if (h.representation == surfaces::Representation::mesh) {
    m = *h.mesh;
  } else if (h.level_set && h.ambient_dim == 3) {
    m = surfaces::marching_tetrahedra(*h.level_set, cells);
  } else {
    throw InputError("export-mesh needs a shape in R^3");
  }
  m = surfaces::validate_mesh(std::move(m));
  write_file(out_path, surfaces::to_off(m));
  std::printf("wrote %s: V=%d E=%d F=%d chi=%d\n", out_path.c_str(), m.vertex_count(), m.edge_count, m.face_count(),
              euler::chi_mesh(m));
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Gauss-map degree, Euler characteristic and transgression verification"};
  app.require_subcommand(1);
  app.fallthrough();
  Globals g;
  app.add_option("--grid", g.grid, "quadrature resolution AxB[xC]");
  app.add_option("--backend", g.backend, "jet backend")->check(CLI::IsMember({"analytic", "dual", "fd"}));
  app.add_option("--seed", g.seed, "random seed");
  app.add_option("--threads", g.threads, "worker threads (default HOPF_THREADS or 1)")->check(CLI::PositiveNumber);
  app.add_option("--tol", g.tol, "accepted |value - rounded| for quadrature estimators")->check(CLI::NonNegativeNumber);
  app.add_option("--report", g.report_path, "write the JSON report here");
  app.add_option("--csv", g.csv_path, "write the CSV summary here");
  app.add_flag("--timings", g.timings, "include wall-clock timings in the report");

  auto* list = app.add_subcommand("list", "list the shape catalog");

  std::string shape, estimator = "all", method = "auto", config_path, out_path;
  int preimage_grid = 64, points = 200, cells = 60;

  auto* deg = app.add_subcommand("degree", "estimate the Gauss-map degree");
  deg->add_option("shape", shape)->required();
  deg->add_option("--estimator", estimator)
      ->check(CLI::IsMember({"all", "preimage", "gk", "pfaffian", "tpf", "winding", "mesh"}));
  deg->add_option("--preimage-grid", preimage_grid, "samples per axis for the preimage seed grid")
      ->check(CLI::Range(4, 4096));

  auto* eul = app.add_subcommand("euler", "Euler characteristic oracles");
  eul->add_option("shape", shape)->required();
  eul->add_option("--method", method)->check(CLI::IsMember({"auto", "mesh", "morse"}));
  eul->add_option("--preimage-grid", preimage_grid)->check(CLI::Range(4, 4096));

  auto* tra = app.add_subcommand("transgress", "integral, closedness and naturality of the transgression form");
  tra->add_option("shape", shape)->required();
  tra->add_option("--points", points, "sample points for pointwise checks")->check(CLI::Range(1, 100000));

  auto* lem = app.add_subcommand("lemma1", "pulled-back projection connection vs Levi-Civita");
  lem->add_option("shape", shape)->required();
  lem->add_option("--points", points)->check(CLI::Range(1, 100000));

  auto* ver = app.add_subcommand("verify-all", "run every suite over the corpus");
  ver->add_option("--config", config_path, "JSON shape config");

  auto* exp = app.add_subcommand("export-mesh", "write an OFF mesh of a shape in R^3");
  exp->add_option("shape", shape)->required();
  exp->add_option("--cells", cells, "marching-tetrahedra cells along the longest axis")->check(CLI::Range(4, 1024));
  exp->add_option("--out", out_path)->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }
  if (g.threads > 0) hopf::parallel::set_thread_count(g.threads);

  try {
    if (*list) return cmd_list();
    if (*deg) return cmd_degree(shape, estimator, preimage_grid, g);
    if (*eul) return cmd_euler(shape, method, preimage_grid, g);
    if (*tra) return cmd_transgress(shape, points, g);
    if (*lem) return cmd_lemma1(shape, points, g);
    if (*ver) return cmd_verify_all(config_path, g);
    if (*exp) return cmd_export_mesh(shape, cells, out_path, g);
  } catch (const hopf::InputError& e) {
    std::fprintf(stderr, "input error: %s\n", e.what());
    return 2;
  } catch (const hopf::MeshIngestError& e) {
    std::fprintf(stderr, "input error: %s\n", e.what());
    return 2;
  } catch (const hopf::UnsupportedParityError& e) {
    std::fprintf(stderr, "input error: %s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "verification error: %s\n", e.what());
    return 1;
  }
  return 2;
}
