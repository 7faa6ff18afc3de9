#pragma once

// Shape catalog: constructors with analytic jets, level functions, and
// ground-truth annotations.

#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "hopf/surfaces.hpp"

namespace hopf::corpus {

enum class Provenance { topological, derived_oracle, combinatorial };
std::string_view to_string(Provenance p);

struct Annotation {
  int value = 0;
  Provenance provenance = Provenance::derived_oracle;
  std::string note;
};

using Params = std::vector<std::pair<std::string, double>>;

struct ShapeRecord {
  std::string name;
  int ambient_dim = 0;
  surfaces::Representation representation = surfaces::Representation::chart;
  Params params;
  std::string file;  // mesh path, if any
  std::optional<Annotation> chi_h;
  std::optional<Annotation> chi_w;
  Annotation expected_degree;

  double param(std::string_view key) const;
};

struct Shape {
  surfaces::Hypersurface surface;
  ShapeRecord record;
};

/// Parameter overrides for build(); unknown keys are an input error.
struct BuildOptions {
  Params params;
  std::string file;
  std::vector<int> resolution;
  std::optional<std::string> backend;
};

/// Names accepted by build(), in catalog order.
const std::vector<std::string>& catalog();
std::string describe(std::string_view name);

/// Builds, validates parameters, checks that the annotated degree matches
/// the one predicted from the annotated chi values, scans chart shapes for self-intersections and verifies
/// outward orientation. Throws InputError on any violation.
Shape build(std::string_view name, const BuildOptions& options = {});

/// Expected degree implied by the annotations (chi(H)/2 for odd n, chi(W) for even n).
int predicted_degree(const ShapeRecord& r);

/// Minimum distance between chart samples at distinct grid parameters.
double embeddedness_gap(const surfaces::Chart& c, int per_axis);
/// True if the sampled closed curve (n = 2) has crossing non-adjacent segments.
bool curve_self_intersects(const surfaces::Chart& c, int samples);
/// Number of seeded sample points whose normal failed the outward test.
int outward_failures(const surfaces::Hypersurface& h, int samples, std::uint64_t seed);

struct ConfigEntry {
  std::string name;
  BuildOptions options;
};

struct Config {
  std::vector<ConfigEntry> shapes;
  std::optional<std::uint64_t> seed;
};

/// JSON document: {"seed": N, "shapes": [{"name", "params", "resolution", "backend", "file"}]}
/// or a bare array of shape entries. Relative mesh paths resolve against `base_dir`.
Config parse_config(std::string_view json_text, const std::string& base_dir = ".");
Config load_config(const std::string& path);

/// The default verification corpus.
std::vector<ConfigEntry> default_corpus();

/// Directory holding shipped data files.
std::string data_dir();

}  // namespace hopf::corpus
