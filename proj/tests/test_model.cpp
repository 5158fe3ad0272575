#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <limits>
#include <stdexcept>
#include <vector>

#include "perturbmap/errors.hpp"
#include "perturbmap/extended_real.hpp"
#include "perturbmap/model.hpp"
#include "perturbmap/model_io.hpp"

using namespace perturbmap;

namespace {

// Two variables with |X1|=2, |X2|=3:
//   theta(a,b) = u0(a) + u1(b) + 0.2*a*b - 0.15*[a==b]
DiscreteModel tiny_model() {
  DiscreteModel m(std::vector<std::vector<double>>{{0.0, 1.0}, {0.0, 1.0, 2.0}});
  m.add_unary(0, 0, 0.5);
  m.add_unary(0, 1, -0.25);
  m.add_unary(1, 0, 0.1);
  m.add_unary(1, 2, -0.3);
  for (std::int32_t a = 0; a < 2; ++a) {
    for (std::int32_t b = 0; b < 3; ++b) {
      m.add_pairwise(0, 1, a, b, 0.2 * a * b);
    }
  }
  m.add_pairwise(0, 1, 0, 0, -0.15);
  m.add_pairwise(0, 1, 1, 1, -0.15);
  return m;
}

// Independently evaluated scores of tiny_model in lexicographic order
// (a=0..1, b=0..2).
const double kTinyScores[6] = {0.45, 0.5, 0.2, -0.15, -0.2, -0.15000000000000002};
const double kTinyLogZ = 1.94284587614553;

}  // namespace

TEST_CASE("construction validates domains") {
  CHECK_NOTHROW(DiscreteModel({{0.0, 1.0}}));
  CHECK_NOTHROW(DiscreteModel({}));  // zero variables is legal
  CHECK_THROWS_AS(DiscreteModel({{0.0}, {}}), std::invalid_argument);
  CHECK_THROWS_AS(DiscreteModel({{0.0, std::nan("")}}), std::invalid_argument);
}

TEST_CASE("label lookup maps values to indices") {
  DiscreteModel m(std::vector<std::vector<double>>{{-1.0, 1.0}});
  CHECK(m.label_index(0, -1.0) == 0);
  CHECK(m.label_index(0, 1.0) == 1);
  CHECK(m.label_value(0, 1) == 1.0);
  CHECK_THROWS_AS(m.label_index(0, 0.5), std::invalid_argument);
  CHECK_THROWS_AS(m.label_value(0, 2), std::invalid_argument);
  CHECK_THROWS_AS(m.domain(3), std::invalid_argument);
}

TEST_CASE("potential evaluates constant plus unary plus pairwise") {
  const DiscreteModel m = tiny_model();
  Configuration x = {0, 0};
  int k = 0;
  for (std::int32_t a = 0; a < 2; ++a) {
    for (std::int32_t b = 0; b < 3; ++b) {
      x = {a, b};
      CHECK(m.potential(x) == doctest::Approx(kTinyScores[k]).epsilon(1e-15));
      ++k;
    }
  }
}

TEST_CASE("potential validates the configuration") {
  const DiscreteModel m = tiny_model();
  CHECK_THROWS_AS(m.potential(Configuration{0}), std::invalid_argument);
  CHECK_THROWS_AS(m.potential(Configuration{0, 1, 0}), std::invalid_argument);
  CHECK_THROWS_AS(m.potential(Configuration{0, 3}), std::invalid_argument);
  CHECK_THROWS_AS(m.potential(Configuration{-1, 0}), std::invalid_argument);
}

TEST_CASE("score mutation accumulates and rejects bad input") {
  DiscreteModel m(std::vector<std::vector<double>>{{0.0, 1.0}, {0.0, 1.0}});
  m.add_unary(0, 1, 0.5);
  m.add_unary(0, 1, 0.25);
  CHECK(m.unary(0, 1) == doctest::Approx(0.75).epsilon(1e-15));
  m.add_pairwise(0, 1, 1, 1, 1.0);
  m.add_pairwise(0, 1, 1, 1, 2.0);
  CHECK(m.pairwise_factors().size() == 1);
  CHECK(m.pairwise_factors()[0].score(1, 1) == doctest::Approx(3.0).epsilon(1e-15));

  CHECK_THROWS_AS(m.add_unary(5, 0, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(m.add_unary(0, 7, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(m.add_unary(0, 0, std::nan("")), std::invalid_argument);
  CHECK_THROWS_AS(m.add_pairwise(1, 0, 0, 0, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(m.add_pairwise(0, 0, 0, 0, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(m.add_pairwise(0, 1, 0, 5, 1.0), std::invalid_argument);
  const double inf = std::numeric_limits<double>::infinity();
  CHECK_THROWS_AS(m.add_constant(inf), std::invalid_argument);
}

TEST_CASE("factor insertion order does not change the potential") {
  DiscreteModel a(std::vector<std::vector<double>>{{0.0, 1.0}, {0.0, 1.0}, {0.0, 1.0}});
  DiscreteModel b(std::vector<std::vector<double>>{{0.0, 1.0}, {0.0, 1.0}, {0.0, 1.0}});
  a.add_pairwise(0, 1, 1, 1, 0.7);
  a.add_pairwise(1, 2, 1, 1, -0.4);
  a.add_unary(2, 0, 0.3);
  b.add_unary(2, 0, 0.3);
  b.add_pairwise(1, 2, 1, 1, -0.4);
  b.add_pairwise(0, 1, 1, 1, 0.7);
  Configuration x = first_configuration(a);
  do {
    CHECK(a.potential(x) == doctest::Approx(b.potential(x)).epsilon(1e-15));
  } while (next_configuration(a, x));
}

TEST_CASE("enumeration walks lexicographic order and ranks agree") {
  const DiscreteModel m = tiny_model();
  Configuration x = first_configuration(m);
  CHECK(x == Configuration{0, 0});
  std::vector<Configuration> seen;
  do {
    CHECK(configuration_rank(m, x) == seen.size());
    seen.push_back(x);
  } while (next_configuration(m, x));
  CHECK(seen.size() == 6);
  CHECK(seen[1] == Configuration{0, 1});
  CHECK(seen[2] == Configuration{0, 2});
  CHECK(seen[3] == Configuration{1, 0});
  CHECK(seen[5] == Configuration{1, 2});
  // After the wrap the configuration is back at the start.
  CHECK(x == Configuration{0, 0});
}

TEST_CASE("configuration_count clamps at the cap") {
  DiscreteModel big(std::vector<std::vector<double>>(40, {0.0, 1.0}));
  CHECK(big.configuration_count(1000) == 1001);
  CHECK_THROWS_AS(big.require_enumerable(1000), ResourceLimitError);

  const DiscreteModel m = tiny_model();
  CHECK(m.configuration_count() == 6);
  CHECK_NOTHROW(m.require_enumerable(6));
  CHECK_THROWS_AS(m.require_enumerable(5), ResourceLimitError);
}

TEST_CASE("log partition matches the frozen reference") {
  const DiscreteModel m = tiny_model();
  CHECK(log_partition_exact(m) == doctest::Approx(kTinyLogZ).epsilon(1e-12));
}

TEST_CASE("gibbs probabilities are softmax weights and sum to one") {
  const DiscreteModel m = tiny_model();
  CHECK(gibbs_probability(m, {1, 2}) ==
        doctest::Approx(0.12333563794506018).epsilon(1e-12));
  double total = 0.0;
  Configuration x = first_configuration(m);
  do {
    total += gibbs_probability(m, x);
  } while (next_configuration(m, x));
  CHECK(total == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("uniform score shifts leave the distribution invariant") {
  DiscreteModel shifted = tiny_model();
  // Same constant into every label of variable 0, plus a global offset.
  shifted.add_unary(0, 0, 1.75);
  shifted.add_unary(0, 1, 1.75);
  shifted.add_constant(-3.0);
  const DiscreteModel base = tiny_model();
  Configuration x = first_configuration(base);
  do {
    CHECK(gibbs_probability(shifted, x) ==
          doctest::Approx(gibbs_probability(base, x)).epsilon(1e-12));
  } while (next_configuration(base, x));
}

TEST_CASE("forbidden configurations score -inf and drop out of Z") {
  DiscreteModel m = tiny_model();
  m.forbid({1, 2});
  m.forbid({1, 2});  // duplicates collapse
  CHECK(m.forbidden().size() == 1);
  CHECK(m.is_forbidden(Configuration{1, 2}));
  CHECK_FALSE(m.is_forbidden(Configuration{1, 1}));
  CHECK(is_neg_inf(m.potential(Configuration{1, 2})));
  CHECK(gibbs_probability(m, {1, 2}) == 0.0);

  // Z now sums the remaining five configurations.
  double acc = 0.0;
  for (int k = 0; k < 5; ++k) acc += std::exp(kTinyScores[k]);
  CHECK(log_partition_exact(m) == doctest::Approx(std::log(acc)).epsilon(1e-12));

  double total = 0.0;
  Configuration x = first_configuration(m);
  do {
    total += gibbs_probability(m, x);
  } while (next_configuration(m, x));
  CHECK(total == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("a fully forbidden model has no partition function") {
  DiscreteModel m(std::vector<std::vector<double>>{{0.0, 1.0}});
  m.forbid({0});
  m.forbid({1});
  CHECK_THROWS_AS(log_partition_exact(m), InfeasibleModelError);
}

TEST_CASE("log partition respects the enumeration cap") {
  DiscreteModel big(std::vector<std::vector<double>>(25, {0.0, 1.0}));
  CHECK_THROWS_AS(log_partition_exact(big, 1 << 20), ResourceLimitError);
}

TEST_CASE("zero-variable models have one empty configuration") {
  DiscreteModel m(std::vector<std::vector<double>>{});
  m.add_constant(0.25);
  CHECK(m.configuration_count() == 1);
  CHECK(m.potential(Configuration{}) == doctest::Approx(0.25).epsilon(1e-15));
  CHECK(log_partition_exact(m) == doctest::Approx(0.25).epsilon(1e-15));
  Configuration x = first_configuration(m);
  CHECK(x.empty());
  CHECK_FALSE(next_configuration(m, x));
}

TEST_CASE("conditional slice pins a prefix and keeps suffix potentials") {
  const DiscreteModel m = tiny_model();
  const Configuration prefix = {1};
  const DiscreteModel slice = conditional_slice(m, prefix);
  CHECK(slice.num_variables() == 1);
  CHECK(slice.domain(0) == std::vector<double>{0.0, 1.0, 2.0});
  const double expected[3] = {-0.15, -0.19999999999999998, -0.15000000000000002};
  for (std::int32_t b = 0; b < 3; ++b) {
    CHECK(slice.potential(Configuration{b}) ==
          doctest::Approx(expected[b]).epsilon(1e-15));
  }
}

TEST_CASE("empty and full prefixes are the identity and a point mass") {
  const DiscreteModel m = tiny_model();
  const DiscreteModel copy = conditional_slice(m, {});
  Configuration x = first_configuration(m);
  do {
    CHECK(copy.potential(x) == doctest::Approx(m.potential(x)).epsilon(1e-15));
  } while (next_configuration(m, x));

  const Configuration full = {1, 2};
  const DiscreteModel point = conditional_slice(m, full);
  CHECK(point.num_variables() == 0);
  CHECK(point.potential(Configuration{}) ==
        doctest::Approx(m.potential(full)).epsilon(1e-15));
}

TEST_CASE("slicing composes") {
  const DiscreteModel m = tiny_model();
  const DiscreteModel once = conditional_slice(m, Configuration{1});
  const DiscreteModel twice = conditional_slice(once, Configuration{2});
  const DiscreteModel direct = conditional_slice(m, Configuration{1, 2});
  CHECK(twice.potential(Configuration{}) ==
        doctest::Approx(direct.potential(Configuration{})).epsilon(1e-15));
}

TEST_CASE("slices propagate forbidden configurations") {
  DiscreteModel m = tiny_model();
  m.forbid({1, 2});
  const DiscreteModel slice = conditional_slice(m, Configuration{1});
  CHECK(is_neg_inf(slice.potential(Configuration{2})));
  CHECK(std::isfinite(slice.potential(Configuration{0})));

  // A prefix that can no longer be extended feasibly yields an all-forbidden
  // slice rather than an error.
  DiscreteModel blocked(std::vector<std::vector<double>>{{0.0, 1.0}, {0.0, 1.0}});
  blocked.forbid({0, 0});
  blocked.forbid({0, 1});
  const DiscreteModel dead = conditional_slice(blocked, Configuration{0});
  CHECK(is_neg_inf(dead.potential(Configuration{0})));
  CHECK(is_neg_inf(dead.potential(Configuration{1})));
}

TEST_CASE("slice prefix validation") {
  const DiscreteModel m = tiny_model();
  CHECK_THROWS_AS(conditional_slice(m, Configuration{0, 0, 0}), std::invalid_argument);
  CHECK_THROWS_AS(conditional_slice(m, Configuration{5}), std::invalid_argument);
}

TEST_CASE("json round trip preserves the model") {
  DiscreteModel m = tiny_model();
  m.forbid({1, 2});
  const nlohmann::json doc = model_to_json(m);
  const DiscreteModel back = model_from_json(doc);
  CHECK(back.num_variables() == m.num_variables());
  Configuration x = first_configuration(m);
  do {
    if (m.is_forbidden(x)) {
      CHECK(back.is_forbidden(x));
    } else {
      CHECK(back.potential(x) == doctest::Approx(m.potential(x)).epsilon(1e-15));
    }
  } while (next_configuration(m, x));
}

TEST_CASE("json labels are domain values, not indices") {
  const nlohmann::json doc = {
      {"domains", {{-1.0, 1.0}, {-1.0, 1.0}}},
      {"unary", {{{"var", 0}, {"label", 1.0}, {"score", 0.7}}}},
      {"pairwise",
       {{{"var_i", 0}, {"var_j", 1}, {"label_i", -1.0}, {"label_j", -1.0}, {"score", 0.5}}}},
  };
  const DiscreteModel m = model_from_json(doc);
  CHECK(m.potential(Configuration{1, 0}) == doctest::Approx(0.7).epsilon(1e-15));
  CHECK(m.potential(Configuration{0, 0}) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(m.potential(Configuration{0, 1}) == doctest::Approx(0.0).epsilon(1e-15));
}

TEST_CASE("malformed json documents are rejected") {
  CHECK_THROWS_AS(model_from_json(nlohmann::json::array()), std::invalid_argument);
  CHECK_THROWS_AS(model_from_json(nlohmann::json::object()), std::invalid_argument);
  CHECK_THROWS_AS(model_from_json({{"domains", {{0.0, 1.0}}}, {"extra", 1}}),
                  std::invalid_argument);
  // Unknown label value.
  CHECK_THROWS_AS(model_from_json({{"domains", {{0.0, 1.0}}},
                                   {"unary", {{{"var", 0}, {"label", 7.0}, {"score", 1.0}}}}}),
                  std::invalid_argument);
  // Wrong forbidden length.
  CHECK_THROWS_AS(model_from_json({{"domains", {{0.0, 1.0}}}, {"forbidden", {{0.0, 1.0}}}}),
                  std::invalid_argument);
  // Duplicate domain value makes labels ambiguous.
  CHECK_THROWS_AS(model_from_json({{"domains", {{1.0, 1.0}}}}), std::invalid_argument);
}

TEST_CASE("models carrying a constant have no json form") {
  DiscreteModel m = tiny_model();
  m.add_constant(1.0);
  CHECK_THROWS_AS(model_to_json(m), std::invalid_argument);
  // Conditional slices usually carry one.
  const DiscreteModel slice = conditional_slice(tiny_model(), Configuration{1});
  CHECK_THROWS_AS(model_to_json(slice), std::invalid_argument);
}

TEST_CASE("model files load and save") {
  namespace fs = std::filesystem;
  const fs::path path = fs::temp_directory_path() / "perturbmap_test_model.json";
  DiscreteModel m = tiny_model();
  save_model_file(m, path.string());
  const DiscreteModel back = load_model_file(path.string());
  CHECK(log_partition_exact(back) == doctest::Approx(kTinyLogZ).epsilon(1e-12));
  fs::remove(path);

  CHECK_THROWS_AS(load_model_file("/nonexistent/path/model.json"), std::invalid_argument);

  const fs::path bad = fs::temp_directory_path() / "perturbmap_test_bad.json";
  {
    FILE* f = std::fopen(bad.string().c_str(), "w");
    std::fputs("{ not json", f);
    std::fclose(f);
  }
  CHECK_THROWS_AS(load_model_file(bad.string()), std::invalid_argument);
  fs::remove(bad);
}
