#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <random>
#include <string>

#include "medtext/ensemble.hpp"
#include "medtext/error.hpp"

using namespace medtext;

namespace {

ModelVotes votes(const std::string& model,
                 std::map<std::string, std::string> labels) {
  return {model, std::move(labels)};
}

}  // namespace

TEST_CASE("strict majority wins") {
  std::vector<ModelVotes> models = {
      votes("m1", {{"p1", "true"}}),  votes("m2", {{"p1", "true"}}),
      votes("m3", {{"p1", "false"}}), votes("m4", {{"p1", "true"}}),
      votes("m5", {{"p1", "false"}}),
  };
  auto results = majority_vote(models, "m1");
  REQUIRE(results.size() == 1);
  CHECK(results[0].label == "true");
  CHECK_FALSE(results[0].tie_broken);
  CHECK(results[0].votes.at("true") == 3);
  CHECK(results[0].votes.at("false") == 2);
}

TEST_CASE("a single model is passed through") {
  auto results = majority_vote({votes("only", {{"p1", "neutral"},
                                               {"p2", "entailment"}})},
                               "only");
  REQUIRE(results.size() == 2);
  CHECK(results[0].pair_id == "p1");  // sorted by pair id
  CHECK(results[0].label == "neutral");
  CHECK(results[1].label == "entailment");
  CHECK_FALSE(results[0].tie_broken);
}

TEST_CASE("ties defer to the designated model") {
  std::vector<ModelVotes> models = {
      votes("m1", {{"p1", "true"}}),
      votes("m2", {{"p1", "true"}}),
      votes("m3", {{"p1", "false"}}),
      votes("m4", {{"p1", "false"}}),
  };
  auto by_m3 = majority_vote(models, "m3");
  CHECK(by_m3[0].label == "false");
  CHECK(by_m3[0].tie_broken);

  auto by_m1 = majority_vote(models, "m1");
  CHECK(by_m1[0].label == "true");
  CHECK(by_m1[0].tie_broken);
}

TEST_CASE("tie-break model outside the tie falls back alphabetically") {
  // neutral and entailment tie at 2; the breaker voted contradiction
  std::vector<ModelVotes> models = {
      votes("m1", {{"p1", "neutral"}}),
      votes("m2", {{"p1", "neutral"}}),
      votes("m3", {{"p1", "entailment"}}),
      votes("m4", {{"p1", "entailment"}}),
      votes("m5", {{"p1", "contradiction"}}),
  };
  auto results = majority_vote(models, "m5");
  CHECK(results[0].label == "entailment");  // alphabetically first tied label
  CHECK(results[0].tie_broken);
}

TEST_CASE("vote bookkeeping") {
  std::vector<ModelVotes> models = {
      votes("m1", {{"p1", "true"}, {"p2", "false"}}),
      votes("m2", {{"p1", "false"}, {"p2", "false"}}),
      votes("m3", {{"p1", "true"}, {"p2", "true"}}),
  };
  auto results = majority_vote(models, "m1");
  REQUIRE(results.size() == 2);
  for (const auto& r : results) {
    std::size_t total = 0;
    for (const auto& [label, n] : r.votes) total += n;
    CHECK(total == models.size());
  }
  auto labels = vote_results_to_labels(results, "ensemble");
  REQUIRE(labels.size() == 2);
  CHECK(labels[0].pair_id == "p1");
  CHECK(labels[0].model_name == "ensemble");
}

TEST_CASE("duplicating a unanimous opinion changes nothing") {
  std::vector<ModelVotes> models = {
      votes("m1", {{"p1", "true"}, {"p2", "false"}}),
      votes("m2", {{"p1", "true"}, {"p2", "false"}}),
  };
  auto before = majority_vote(models, "m1");
  models.push_back(votes("m3", models[0].labels));
  auto after = majority_vote(models, "m1");
  REQUIRE(before.size() == after.size());
  for (std::size_t i = 0; i < before.size(); ++i) {
    CHECK(before[i].label == after[i].label);
    CHECK(before[i].tie_broken == after[i].tie_broken);
  }
}

TEST_CASE("an odd panel over two labels never needs the tie-break") {
  std::mt19937_64 rng(99);
  for (int trial = 0; trial < 1000; ++trial) {
    std::vector<ModelVotes> models;
    for (int m = 0; m < 5; ++m) {
      std::map<std::string, std::string> labels;
      for (int p = 0; p < 4; ++p)
        labels["p" + std::to_string(p)] = (rng() % 2) ? "true" : "false";
      models.push_back(votes("m" + std::to_string(m), std::move(labels)));
    }
    for (const auto& r : majority_vote(models, "m0"))
      CHECK_FALSE(r.tie_broken);
  }
}

TEST_CASE("ensemble input validation") {
  SUBCASE("no models") {
    CHECK_THROWS_AS(majority_vote({}, "m1"), DataError);
  }
  SUBCASE("unknown tie-break model") {
    CHECK_THROWS_WITH_AS(majority_vote({votes("m1", {{"p1", "true"}})}, "zz"),
                         doctest::Contains("zz"), DataError);
  }
  SUBCASE("coverage size mismatch") {
    std::vector<ModelVotes> models = {
        votes("m1", {{"p1", "true"}, {"p2", "true"}}),
        votes("m2", {{"p1", "true"}}),
    };
    CHECK_THROWS_WITH_AS(majority_vote(models, "m1"), doctest::Contains("covers"),
                         DataError);
    std::vector<ModelVotes> reversed = {models[1], models[0]};
    CHECK_THROWS_AS(majority_vote(reversed, "m2"), DataError);
  }
  SUBCASE("same size, different pairs") {
    std::vector<ModelVotes> models = {
        votes("m1", {{"p1", "true"}, {"p2", "true"}}),
        votes("m2", {{"p1", "true"}, {"p3", "true"}}),
    };
    CHECK_THROWS_WITH_AS(majority_vote(models, "m1"), doctest::Contains("p3"),
                         DataError);
  }
}
