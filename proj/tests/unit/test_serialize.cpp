// Copyright 2026 The cwl Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <sstream>

#include "cwl/serialize.hpp"
#include "doctest.h"

using namespace cwl;

TEST_CASE("configuration defaults and round trip") {
  const RunConfig def = parse_config(Json::object());
  CHECK(def.system.alpha == cplx(0.9, 0.0));
  CHECK(def.metrology.N_b == 100.0);
  const Json doc = Json::parse(R"({
    "system": {"alpha": [0.5, 0.25], "Gamma": 2.0, "gamma_D": 0.1, "M": 2,
               "numerics": {"rtol": 1e-9}},
    "bin": {"t0": 1.5, "tau": 2.0},
    "grid": {"half_width": 3.0, "spacing": 0.1},
    "metrology": {"N_b": 16, "crb": true, "crb_N_b": [4, 9]},
    "sweep": {"axes": [{"name": "alpha", "values": [0.1, 0.2]}], "objective": "jz_improvement"}
  })");
  const RunConfig c = parse_config(doc);
  CHECK(c.system.alpha == cplx(0.5, 0.25));
  CHECK(c.system.M == 2);
  CHECK(c.system.numerics.rtol == 1e-9);
  CHECK(c.bin.t0 == 1.5);
  CHECK(c.grid.spacing == 0.1);
  CHECK(c.metrology.crb_N_b == std::vector<double>{4, 9});
  REQUIRE(c.sweep.axes.size() == 1);
  CHECK(c.sweep.axes[0].first == "alpha");
  const Json again = config_to_json(c);
  CHECK(config_to_json(parse_config(again)) == again);
}

TEST_CASE("configuration errors") {
  CHECK_THROWS_AS(parse_config(Json::parse(R"({"sytem": {}})")), ConfigError);
  CHECK_THROWS_AS(parse_config(Json::parse(R"({"system": {"alhpa": 1}})")), ConfigError);
  CHECK_THROWS_AS(parse_config(Json::parse(R"({"system": {"M": -1}})")), ConfigError);
  CHECK_THROWS_AS(parse_config(Json::parse(R"({"bin": {"tau": 0}})")), ConfigError);
  CHECK_THROWS_AS(parse_config(Json::parse(R"({"system": {"alpha": "big"}})")), ConfigError);
  CHECK_THROWS_AS(parse_config(Json::parse(R"([1, 2])")), ConfigError);
  CHECK_THROWS_AS(load_config("/nonexistent/cwl.json"), ConfigError);
}

TEST_CASE("matrix JSON round trip is exact") {
  Matrix m(3, 3);
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) m(i, j) = cplx(1.0 / (i + 3 * j + 1.0), std::sqrt(2.0) * (i - j) / 7.0);
  const Json doc = matrix_to_json(m);
  CHECK(doc["format"] == "cwl-density-matrix");
  CHECK(doc["rows"] == 3);
  CHECK(doc["order"] == "row-major");
  CHECK(doc["data"][1][0] == m(0, 1).real());
  const Matrix back = matrix_from_json(Json::parse(doc.dump()));
  CHECK((back - m).norm() == 0.0);
  Json bad = doc;
  bad["rows"] = 4;
  CHECK_THROWS_AS(matrix_from_json(bad), ConfigError);
}

TEST_CASE("CSV formatting") {
  CHECK(format_double(0.1) == "0.10000000000000001");
  CHECK(format_double(1.0) == "1");
  CHECK(std::stod(format_double(1.0 / 3.0)) == 1.0 / 3.0);
  std::ostringstream os;
  CsvWriter w(os);
  w.header({"a", "b"});
  w.row(std::vector<double>{1.5, -2.0});
  CHECK(os.str() == "a,b\n1.5,-2\n");
}

TEST_CASE("content hash is 64-bit FNV-1a") {
  CHECK(content_hash("") == "cbf29ce484222325");
  CHECK(content_hash("a") == "af63dc4c8601ec8c");
  CHECK(content_hash("foobar") == "85944171f73967e8");
}
