#include <map>
#include <sstream>

#include "doctest.h"
#include "hopf/corpus.hpp"
#include "hopf/parallel.hpp"
#include "hopf/report.hpp"
#include "json.hpp"

using namespace hopf;
using namespace hopf::report;

namespace {

std::vector<corpus::ConfigEntry> small_corpus() {
  return {{"circle", {}}, {"bumpy_circle", {}}, {"torus", {}}, {"icosphere", {}}, {"tube_s1xs2", {}}};
}

std::vector<std::vector<std::string>> csv_rows(const std::string& text) {
  std::vector<std::vector<std::string>> rows;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    std::vector<std::string> cells;
    std::string cell;
    std::istringstream ls(line);
    while (std::getline(ls, cell, ',')) cells.push_back(cell);
    if (!line.empty() && line.back() == ',') cells.emplace_back();
    rows.push_back(cells);
  }
  return rows;
}

}  // namespace

TEST_CASE("numbers use 17 significant digits") {
  CHECK(format_number(0.1) == "0.10000000000000001");
  CHECK(format_number(-1.0) == "-1");
  CHECK(format_number(1.0 / 3.0) == "0.33333333333333331");
  CHECK(format_number(std::nan("")) == "null");
}

TEST_CASE("verdict requires rounding to the expected integer within max(error, tol)") {
  degree::DegreeEstimate e;
  e.value = 0.95;
  e.rounded = 1;
  e.error = 0.0;
  CHECK(estimate_matches(e, 1, 0.1));
  CHECK_FALSE(estimate_matches(e, 1, 0.01));
  CHECK_FALSE(estimate_matches(e, 0, 0.1));

  ShapeReport r;
  r.expected_degree = 1;
  r.estimates.push_back(e);
  r.chi.push_back({"chi_H", "mesh", 2, 2});
  r.checks.push_back({"lemma1_residual", 1e-7, 1e-6});
  finalize(r, 0.1);
  CHECK(r.degree_pass);
  CHECK(r.pass());
  r.checks.push_back({"tpf_closedness", 1e-3, 1e-4});
  finalize(r, 0.1);
  CHECK_FALSE(r.pass());
}

TEST_CASE("verify_all: passes on a small corpus, JSON schema and CSV agree") {
  VerifyOptions o;
  o.lemma1_points = 50;
  o.tpf_points = 6;
  const auto rep = verify_all(small_corpus(), o);
  CHECK(rep.pass());
  const std::string json = to_json(rep);
  const auto doc = nlohmann::json::parse(json);
  CHECK(doc["schema"] == 1);
  CHECK(doc["verdict"] == "pass");
  CHECK(doc["shapes"].size() == 5);
  CHECK(json.find("seconds") == std::string::npos);

  // Every CSV estimator row carries exactly the JSON number text.
  std::map<std::pair<std::string, std::string>, std::string> json_values;
  for (const auto& s : doc["shapes"]) {
    for (const auto& e : s["estimates"]) {
      json_values[{s["name"], e["estimator"]}] = format_number(e["value"].get<double>());
    }
  }
  const auto rows = csv_rows(to_csv(rep));
  REQUIRE(rows.size() > 1);
  CHECK(rows[0] == std::vector<std::string>{"shape", "estimator", "value", "error", "expected", "verdict"});
  int matched = 0;
  for (std::size_t i = 1; i < rows.size(); ++i) {
    REQUIRE(rows[i].size() == 6);
    if (auto it = json_values.find({rows[i][0], rows[i][1]}); it != json_values.end()) {
      CHECK(rows[i][2] == it->second);
      ++matched;
    }
  }
  CHECK(matched == static_cast<int>(json_values.size()));
}

TEST_CASE("reports are byte-identical across thread counts") {
  VerifyOptions o;
  o.lemma1_points = 40;
  o.tpf_points = 4;
  parallel::set_thread_count(1);
  const auto a = to_json(verify_all(small_corpus(), o));
  parallel::set_thread_count(3);
  const auto b = to_json(verify_all(small_corpus(), o));
  parallel::set_thread_count(1);
  CHECK(a == b);
}

TEST_CASE("timings appear only on request") {
  VerifyOptions o;
  o.timings = true;
  const auto rep = verify_all({{"icosphere", {}}}, o);
  CHECK(to_json(rep).find("\"seconds\"") != std::string::npos);
}

TEST_CASE("computation errors become failures, not exceptions") {
  auto s = corpus::build("circle");
  s.surface.level_set.reset();
  VerifyOptions o;
  o.lemma1_points = 10;
  const auto r = verify_shape(s, o);
  CHECK_FALSE(r.pass());
  bool closedness_failed = false;
  for (const auto& f : r.failures) closedness_failed |= f.rfind("closedness", 0) == 0;
  CHECK(closedness_failed);
}
