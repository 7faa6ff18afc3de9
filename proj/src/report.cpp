#include "hopf/report.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <random>
#include <sstream>

#include "hopf/connection.hpp"
#include "hopf/error.hpp"
#include "hopf/euler.hpp"
#include "hopf/mesh.hpp"
#include "hopf/parallel.hpp"
#include "hopf/transgression.hpp"

namespace hopf::report {

using surfaces::Representation;

std::string format_number(double x) {
  if (!std::isfinite(x)) return "null";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

bool Report::pass() const {
  for (const auto& s : shapes) {
    if (!s.pass()) return false;
  }
  return true;
}

bool estimate_matches(const degree::DegreeEstimate& e, int expected, double tol) {
  return e.rounded == expected && e.consistent(tol);
}

namespace {

template <class F>
void attempt(ShapeReport& r, const std::string& what, F&& fn) {
  try {
    fn();
  } catch (const std::exception& e) {
    r.failures.push_back(what + ": " + e.what());
  }
}

void run_estimators(const corpus::Shape& shape, const VerifyOptions& o, ShapeReport& r,
                    const degree::PreimageFinder* finder) {
  const auto& h = shape.surface;
  const int n = h.ambient_dim;
  const std::span<const int> grid(o.grid);
  auto add = [&](const std::string& name, auto&& fn) {
    attempt(r, "estimator " + name, [&] { r.estimates.push_back(fn()); });
  };
  switch (h.representation) {
    case Representation::mesh:
      add("mesh", [&] { return degree::degree_mesh(*h.mesh); });
      return;
    case Representation::implicit:
      add("preimage", [&] { return degree::degree_preimage(*finder, n, o.seed); });
      add("gk", [&] { return degree::degree_gk(h, grid); });
      return;
    case Representation::chart:
      add("preimage", [&] { return degree::degree_preimage(*finder, n, o.seed); });
      if (n % 2 == 1) {
        add("gk", [&] { return degree::degree_gk(h, grid); });
        add("pfaffian", [&] { return degree::degree_pfaffian(h, grid); });
      } else {
        add("tpf", [&] { return transgression::hopf_even_degree(h, grid); });
        if (n == 2) add("winding", [&] { return degree::winding_number(h); });
      }
      return;
  }
}

void run_chi_oracles(const corpus::Shape& shape, const VerifyOptions& o, ShapeReport& r,
                     const degree::PreimageFinder* finder) {
  const auto& rec = shape.record;
  const auto& h = shape.surface;
  if (h.representation == Representation::mesh) {
    r.chi.push_back({"chi_H", "mesh", euler::chi_mesh(*h.mesh), rec.chi_h->value});
    return;
  }
  attempt(r, "morse", [&] {
    std::mt19937_64 rng(o.seed);
    const Vec v = degree::random_direction(h.ambient_dim, rng);
    const auto m = euler::chi_morse(*finder, h, v, o.seed);
    if (rec.chi_h) r.chi.push_back({"chi_H", "morse", m.chi, rec.chi_h->value});
    if (rec.chi_w) r.chi.push_back({"chi_W", "morse-inward", m.solid_chi, rec.chi_w->value});
  });
}

void run_lemma1(const corpus::Shape& shape, const VerifyOptions& o, ShapeReport& r) {
  const auto& h = shape.surface;
  attempt(r, "lemma1", [&] {
    const auto& chart = h.require_chart();
    const int m = chart.param_dim();
    const auto params = transgression::sample_parameters(chart, o.lemma1_points, o.seed);
    std::vector<std::array<double, 3>> ys(params.size());
    std::mt19937_64 rng(o.seed ^ 0x9e3779b97f4a7c15ULL);
    std::normal_distribution<double> normal;
    for (auto& y : ys) {
      for (int i = 0; i < m; ++i) y[i] = normal(rng);
    }
    std::vector<connection::SphereField> fields;
    for (int f = 0; f < 3; ++f) fields.push_back(connection::SphereField::member(h.ambient_dim, 1000 + f));
    std::vector<double> worst(params.size());
    parallel::for_each_index(params.size(), [&](std::size_t i) {
      double w = 0.0;
      for (const auto& field : fields) {
        w = std::max(w, connection::lemma1_residual(h, params[i], field, std::span<const double>(ys[i].data(), m)));
      }
      worst[i] = w;
    });
    double max = 0.0;
    for (double w : worst) max = std::max(max, w);
    r.lemma1_max = max;
    r.checks.push_back({"lemma1_residual", max, 1e-6});
  });
}

void run_tpf(const corpus::Shape& shape, const VerifyOptions& o, ShapeReport& r) {
  const auto& h = shape.surface;
  TpfChecks t;
  t.expected = -shape.record.expected_degree.value;
  bool have_integral = false;
  for (const auto& e : r.estimates) {
    if (e.estimator == "tpf") {
      t.integral = -e.value;
      have_integral = true;
    }
  }
  if (!have_integral) return;
  attempt(r, "closedness", [&] {
    const auto c = transgression::closedness_residual(h, o.tpf_points, o.seed);
    t.closedness = c.max_residual;
    r.checks.push_back({"tpf_closedness", c.max_residual, 1e-4});
  });
  attempt(r, "naturality", [&] {
    const auto params = transgression::sample_parameters(h.require_chart(), o.tpf_points, o.seed + 1);
    std::vector<double> res(params.size());
    parallel::for_each_index(params.size(),
                             [&](std::size_t i) { res[i] = transgression::naturality_residual(h, params[i]); });
    double max = 0.0;
    for (double x : res) max = std::max(max, x);
    t.naturality = max;
    r.checks.push_back({"tpf_naturality", max, 1e-6});
  });
  r.tpf = t;
}

}  // namespace

void finalize(ShapeReport& r, double tol) {
  r.degree_pass = !r.estimates.empty();
  for (const auto& e : r.estimates) {
    if (!estimate_matches(e, r.expected_degree, tol)) {
      r.degree_pass = false;
      r.failures.push_back("estimator " + e.estimator + " gave " + format_number(e.value) + ", expected " +
                           std::to_string(r.expected_degree));
    }
  }
  for (const auto& c : r.chi) {
    if (!c.pass()) {
      r.failures.push_back(c.quantity + " by " + c.method + " = " + std::to_string(c.value) + ", expected " +
                           std::to_string(c.expected));
    }
  }
  for (const auto& c : r.checks) {
    if (!c.pass()) r.failures.push_back(c.name + " = " + format_number(c.value) + " exceeds " + format_number(c.limit));
  }
}

ShapeReport verify_shape(const corpus::Shape& shape, const VerifyOptions& o) {
  const auto start = std::chrono::steady_clock::now();
  const auto& h = shape.surface;
  ShapeReport r;
  r.record = shape.record;
  r.expected_degree = shape.record.expected_degree.value;
  r.parity_case = h.ambient_dim % 2 == 1 ? "odd: chi(H)/2" : "even: chi(W)";

  std::optional<degree::PreimageFinder> finder;
  if (h.representation != Representation::mesh) {
    attempt(r, "preimage grid", [&] { finder.emplace(h, o.preimage_grid); });
  }
  const degree::PreimageFinder* fp = finder ? &*finder : nullptr;
  if (h.representation == Representation::mesh || fp) {
    run_estimators(shape, o, r, fp);
    run_chi_oracles(shape, o, r, fp);
  }
  if (h.representation == Representation::chart) {
    run_lemma1(shape, o, r);
    if (h.ambient_dim % 2 == 0) run_tpf(shape, o, r);
  }

  finalize(r, o.tol);
  r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return r;
}

Report verify_all(const std::vector<corpus::ConfigEntry>& entries, const VerifyOptions& options) {
  std::vector<corpus::Shape> shapes;
  shapes.reserve(entries.size());
  for (const auto& e : entries) shapes.push_back(corpus::build(e.name, e.options));
  Report report;
  report.seed = options.seed;
  report.tol = options.tol;
  report.timings = options.timings;
  report.shapes.resize(shapes.size());
  parallel::for_each_index(shapes.size(),
                           [&](std::size_t i) { report.shapes[i] = verify_shape(shapes[i], options); });
  return report;
}

// ---------------------------------------------------------------------------
// Serialization

namespace {

std::string quote(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    switch (c) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\n': out += "\\n"; break;
      case '\t': out += "\\t"; break;
      default:
        if (static_cast<unsigned char>(c) < 0x20) {
          char buf[8];
          std::snprintf(buf, sizeof buf, "\\u%04x", c);
          out += buf;
        } else {
          out += c;
        }
    }
  }
  return out + "\"";
}

// Minimal pretty printer with insertion-ordered keys.
class Writer {
 public:
  void open(char bracket) {
    prefix();
    out_ << bracket;
    first_.push_back(true);
  }
  void close(char bracket) {
    const bool empty = first_.back();
    first_.pop_back();
    if (!empty) newline();
    out_ << bracket;
  }
  void key(const std::string& k) {
    prefix();
    out_ << quote(k) << ": ";
    pending_key_ = true;
  }
  void raw(const std::string& v) {
    prefix();
    out_ << v;
  }
  void str(const std::string& v) { raw(quote(v)); }
  void num(double v) { raw(format_number(v)); }
  void integer(long long v) { raw(std::to_string(v)); }
  void boolean(bool v) { raw(v ? "true" : "false"); }

  template <class T>
  void field(const std::string& k, const T& v) {
    key(k);
    if constexpr (std::is_same_v<T, bool>) {
      boolean(v);
    } else if constexpr (std::is_integral_v<T>) {
      integer(static_cast<long long>(v));
    } else if constexpr (std::is_floating_point_v<T>) {
      num(v);
    } else {
      str(v);
    }
  }

  std::string text() const { return out_.str() + "\n"; }

 private:
  void newline() {
    out_ << '\n';
    for (std::size_t i = 0; i < first_.size(); ++i) out_ << "  ";
  }
  void prefix() {
    if (pending_key_) {
      pending_key_ = false;
      return;
    }
    if (first_.empty()) return;
    if (!first_.back()) out_ << ',';
    first_.back() = false;
    newline();
  }

  std::ostringstream out_;
  std::vector<bool> first_;
  bool pending_key_ = false;
};

void write_annotation(Writer& w, const std::string& k, const std::optional<corpus::Annotation>& a) {
  w.key(k);
  if (!a) {
    w.raw("null");
    return;
  }
  w.open('{');
  w.field("value", a->value);
  w.field("provenance", std::string(corpus::to_string(a->provenance)));
  w.field("note", a->note);
  w.close('}');
}

void write_estimate(Writer& w, const degree::DegreeEstimate& e, int expected, double tol) {
  w.open('{');
  w.field("estimator", e.estimator);
  w.field("value", e.value);
  w.field("error", e.error);
  w.field("rounded", e.rounded);
  w.field("expected", expected);
  w.field("verdict", std::string(estimate_matches(e, expected, tol) ? "pass" : "fail"));
  w.key("diagnostics");
  w.open('{');
  w.field("nodes", e.diagnostics.nodes);
  w.field("preimages", e.diagnostics.preimages);
  w.field("draws", e.diagnostics.draws);
  w.field("rejected_draws", e.diagnostics.rejected_draws);
  w.key("resolution");
  w.open('[');
  for (int x : e.diagnostics.resolution) w.integer(x);
  w.close(']');
  w.key("notes");
  w.open('[');
  for (const auto& s : e.diagnostics.notes) w.str(s);
  w.close(']');
  w.close('}');
  w.close('}');
}

void write_optional(Writer& w, const std::string& k, const std::optional<double>& v) {
  w.key(k);
  if (v) {
    w.num(*v);
  } else {
    w.raw("null");
  }
}

}  // namespace

std::string to_json(const Report& r) {
  Writer w;
  w.open('{');
  w.field("schema", kSchema);
  w.field("tool", std::string(kToolVersion));
  w.field("seed", static_cast<long long>(r.seed));
  w.field("verdict", std::string(r.pass() ? "pass" : "fail"));
  w.key("shapes");
  w.open('[');
  for (const auto& s : r.shapes) {
    const auto& rec = s.record;
    w.open('{');
    w.field("name", rec.name);
    w.field("ambient_dim", rec.ambient_dim);
    w.field("representation", std::string(surfaces::to_string(rec.representation)));
    w.key("params");
    w.open('{');
    for (const auto& [k, v] : rec.params) w.field(k, v);
    w.close('}');
    if (!rec.file.empty()) w.field("file", rec.file);
    write_annotation(w, "chi_H", rec.chi_h);
    write_annotation(w, "chi_W", rec.chi_w);
    write_annotation(w, "expected_degree", rec.expected_degree);
    w.field("parity_case", s.parity_case);
    w.key("estimates");
    w.open('[');
    for (const auto& e : s.estimates) write_estimate(w, e, s.expected_degree, r.tol);
    w.close(']');
    w.field("degree_verdict", std::string(s.degree_pass ? "pass" : "fail"));
    w.key("chi_oracles");
    w.open('[');
    for (const auto& c : s.chi) {
      w.open('{');
      w.field("quantity", c.quantity);
      w.field("method", c.method);
      w.field("value", c.value);
      w.field("expected", c.expected);
      w.field("verdict", std::string(c.pass() ? "pass" : "fail"));
      w.close('}');
    }
    w.close(']');
    write_optional(w, "lemma1_max_residual", s.lemma1_max);
    w.key("tpf");
    if (s.tpf) {
      w.open('{');
      w.field("integral", s.tpf->integral);
      w.field("expected", s.tpf->expected);
      write_optional(w, "closedness_residual", s.tpf->closedness);
      write_optional(w, "naturality_residual", s.tpf->naturality);
      w.close('}');
    } else {
      w.raw("null");
    }
    w.key("checks");
    w.open('[');
    for (const auto& c : s.checks) {
      w.open('{');
      w.field("name", c.name);
      w.field("value", c.value);
      w.field("limit", c.limit);
      w.field("verdict", std::string(c.pass() ? "pass" : "fail"));
      w.close('}');
    }
    w.close(']');
    w.key("failures");
    w.open('[');
    for (const auto& f : s.failures) w.str(f);
    w.close(']');
    if (r.timings) w.field("seconds", s.seconds);
    w.field("verdict", std::string(s.pass() ? "pass" : "fail"));
    w.close('}');
  }
  w.close(']');
  w.close('}');
  return w.text();
}

std::string to_csv(const Report& r) {
  std::ostringstream out;
  out << "shape,estimator,value,error,expected,verdict\n";
  auto row = [&](const std::string& shape, const std::string& est, const std::string& value, const std::string& error,
                 const std::string& expected, bool pass) {
    out << shape << ',' << est << ',' << value << ',' << error << ',' << expected << ',' << (pass ? "pass" : "fail")
        << '\n';
  };
  for (const auto& s : r.shapes) {
    const auto& name = s.record.name;
    for (const auto& e : s.estimates) {
      row(name, e.estimator, format_number(e.value), format_number(e.error), std::to_string(s.expected_degree),
          estimate_matches(e, s.expected_degree, r.tol));
    }
    for (const auto& c : s.chi) {
      row(name, c.quantity + ":" + c.method, std::to_string(c.value), "0", std::to_string(c.expected), c.pass());
    }
    for (const auto& c : s.checks) {
      row(name, c.name, format_number(c.value), "", "<=" + format_number(c.limit), c.pass());
    }
    if (s.tpf) {
      row(name, "tpf_integral", format_number(s.tpf->integral), "", format_number(s.tpf->expected), s.degree_pass);
    }
  }
  return out.str();
}

}  // namespace hopf::report
