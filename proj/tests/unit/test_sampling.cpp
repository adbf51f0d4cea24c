#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "relaycap/sampling.hpp"

using namespace relaycap;

namespace {

StateEnsemble parse(const std::string& text) {
  std::istringstream in(text);
  return parse_ensemble(in, "test.csv");
}

std::string parse_error(const std::string& text) {
  try {
    parse(text);
  } catch (const ParseError& e) {
    return e.what();
  }
  return "";
}

}  // namespace

TEST_CASE("Rayleigh ensemble moments") {
  const StateEnsemble e = generate_rayleigh_ensemble(100000, 3, 0.1, 0.5, 2.0);
  REQUIRE(e.size() == 100000);
  CHECK(e[0].weight == doctest::Approx(1e-5).epsilon(1e-12));
  const double m1 = expectation(e, [](const FadingState& s) { return s.g1; });
  const double m2 = expectation(e, [](const FadingState& s) { return s.g2; });
  const double m3 = expectation(e, [](const FadingState& s) { return s.g3; });
  CHECK(std::abs(m1 - 0.1) <= 0.02 * 0.1);
  CHECK(std::abs(m2 - 0.5) <= 0.02 * 0.5);
  CHECK(std::abs(m3 - 2.0) <= 0.02 * 2.0);
  // Second moment of an exponential is twice its squared mean.
  const double s1 = expectation(e, [](const FadingState& s) { return s.g1 * s.g1; });
  CHECK(std::abs(s1 - 0.02) <= 0.05 * 0.02);
}

TEST_CASE("Rayleigh ensemble is a pure function of its seed") {
  const StateEnsemble a = generate_rayleigh_ensemble(50, 9, 0.1, 0.1, 1.0);
  const StateEnsemble b = generate_rayleigh_ensemble(50, 9, 0.1, 0.1, 1.0);
  const StateEnsemble c = generate_rayleigh_ensemble(50, 10, 0.1, 0.1, 1.0);
  bool differs = false;
  for (std::size_t k = 0; k < a.size(); ++k) {
    CHECK(a[k].g1 == b[k].g1);
    CHECK(a[k].g2 == b[k].g2);
    CHECK(a[k].g3 == b[k].g3);
    differs = differs || a[k].g1 != c[k].g1;
  }
  CHECK(differs);
}

TEST_CASE("link gains scale the fading draws") {
  const StateEnsemble a = generate_rayleigh_ensemble(20, 4, 1.0, 1.0, 1.0);
  const StateEnsemble b = generate_rayleigh_ensemble(20, 4, 0.1, 3.0, 7.0);
  for (std::size_t k = 0; k < a.size(); ++k) {
    CHECK(b[k].g1 == doctest::Approx(0.1 * a[k].g1).epsilon(1e-15));
    CHECK(b[k].g2 == doctest::Approx(3.0 * a[k].g2).epsilon(1e-15));
    CHECK(b[k].g3 == doctest::Approx(7.0 * a[k].g3).epsilon(1e-15));
  }
}

TEST_CASE("generator arguments are validated") {
  CHECK_THROWS_AS(generate_rayleigh_ensemble(0, 1, 1, 1, 1), DomainError);
  CHECK_THROWS_AS(generate_rayleigh_ensemble(10, 1, 0, 1, 1), DomainError);
  CHECK_THROWS_AS(generate_rayleigh_ensemble(10, 1, 1, -1, 1), DomainError);
}

TEST_CASE("parse_ensemble reads states in order") {
  const StateEnsemble e = parse("weight,g1,g2,g3\n0.25,1,2,3\n0.75,0.5,0,4.5\n");
  REQUIRE(e.size() == 2);
  CHECK(e[0].weight == 0.25);
  CHECK(e[1].g1 == 0.5);
  CHECK(e[1].g2 == 0.0);
  CHECK(e[1].g3 == 4.5);
}

TEST_CASE("near-unit weight sums are renormalized") {
  const StateEnsemble e = parse("weight,g1,g2,g3\n0.5,1,1,1\n0.5004,1,1,1\n");
  CHECK(e[0].weight + e[1].weight == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(e[0].weight == doctest::Approx(0.5 / 1.0004));
}

TEST_CASE("parse errors name the offending line") {
  CHECK(parse_error("") == "test.csv: empty file");
  CHECK(parse_error("w,g1,g2,g3\n1,1,1,1\n").find("test.csv:1:") == 0);
  CHECK(parse_error("weight,g1,g2,g3\n0.5,1,1,1\n0.5,1,x,1\n").find("test.csv:3:") == 0);
  CHECK(parse_error("weight,g1,g2,g3\n1,1,1\n").find("test.csv:2: expected 4 columns") == 0);
  CHECK(parse_error("weight,g1,g2,g3\n1,1,-1,1\n").find("test.csv:2: column") == 0);
  CHECK(parse_error("weight,g1,g2,g3\n0,1,1,1\n1,1,1,1\n").find("test.csv:2: weight") == 0);
  CHECK(parse_error("weight,g1,g2,g3\n0.5,1,1,1\n0.4,1,1,1\n").find("weights sum") !=
        std::string::npos);
  CHECK(parse_error("weight,g1,g2,g3\n").find("no states") != std::string::npos);
  CHECK_THROWS_AS(load_ensemble("/nonexistent/ensemble.csv"), ParseError);
}

TEST_CASE("write then load round-trips") {
  const StateEnsemble e = generate_rayleigh_ensemble(7, 2, 0.1, 0.1, 1.0);
  const auto path = std::filesystem::temp_directory_path() / "relaycap_roundtrip.csv";
  {
    std::ofstream f(path);
    write_ensemble(f, e);
  }
  const StateEnsemble back = load_ensemble(path);
  std::filesystem::remove(path);
  REQUIRE(back.size() == e.size());
  for (std::size_t k = 0; k < e.size(); ++k) {
    CHECK(back[k].g1 == e[k].g1);
    CHECK(back[k].g3 == e[k].g3);
    CHECK(back[k].weight == doctest::Approx(e[k].weight).epsilon(1e-15));
  }
}

TEST_CASE("expectation") {
  const StateEnsemble e({{0.25, 1, 0, 0}, {0.75, 3, 0, 0}});
  CHECK(expectation(e, [](const FadingState& s) { return s.g1; }) == 2.5);
  CHECK(expectation(e, [](const FadingState&) { return 1.0; }) == 1.0);
  CHECK_THROWS_AS(expectation(e, [](const FadingState&) { return std::nan(""); }), DomainError);
}
