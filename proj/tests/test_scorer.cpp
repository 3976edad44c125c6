#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <string>

#include "medtext/error.hpp"
#include "medtext/scorer.hpp"
#include "testutil.hpp"

using namespace medtext;

namespace {

double sum(const Probs& p) {
  double s = 0.0;
  for (const auto& [k, v] : p) s += v;
  return s;
}

bool valid_distribution(const Probs& p) {
  for (const auto& [k, v] : p)
    if (v < 0.0 || v > 1.0 + 1e-12) return false;
  return std::abs(sum(p) - 1.0) < 1e-9;
}

}  // namespace

TEST_CASE("overlap rqe endpoints") {
  OverlapScorerConfig cfg;
  auto same = overlap_score("the patient has uveitis", "patient has uveitis",
                            TaskKind::rqe, cfg);  // stopwords drop "the"
  CHECK(same.at("true") == doctest::Approx(1.0));
  CHECK(same.at("false") == doctest::Approx(0.0));

  auto disjoint = overlap_score("uveitis treatment", "peanut allergy",
                                TaskKind::rqe, cfg);
  CHECK(disjoint.at("true") == doctest::Approx(0.0));
}

TEST_CASE("overlap rqe one-third jaccard at temperature one") {
  OverlapScorerConfig cfg;
  // content sets {x, y} and {y, z}: intersection 1, union 3
  auto p = overlap_score("x y", "y z", TaskKind::rqe, cfg);
  CHECK(p.at("true") == doctest::Approx(1.0 / 3));
  CHECK(p.at("false") == doctest::Approx(2.0 / 3));
  CHECK(valid_distribution(p));
}

TEST_CASE("overlap rqe temperature sharpening") {
  // J = 1/3; with temperature t the scores are J^(1/t) vs (1-J)^(1/t),
  // renormalized
  OverlapScorerConfig cfg;
  cfg.temperature = 2.0;
  auto p = overlap_score("x y", "y z", TaskKind::rqe, cfg);
  const double pos = std::pow(1.0 / 3, 0.5);
  const double neg = std::pow(2.0 / 3, 0.5);
  CHECK(p.at("true") == doctest::Approx(pos / (pos + neg)).epsilon(1e-12));
  CHECK(valid_distribution(p));

  // higher temperature flattens towards 1/2
  OverlapScorerConfig flat;
  flat.temperature = 100.0;
  auto q = overlap_score("x y", "y z", TaskKind::rqe, flat);
  CHECK(std::abs(q.at("true") - 0.5) < std::abs(p.at("true") - 0.5));
}

TEST_CASE("overlap nli splits the remainder between neutral and contradiction") {
  OverlapScorerConfig cfg;
  auto p = overlap_score("x y", "y z", TaskKind::nli, cfg);
  CHECK(p.at("entailment") == doctest::Approx(1.0 / 3));
  CHECK(p.at("neutral") == doctest::Approx(1.0 / 3));
  CHECK(p.at("contradiction") == doctest::Approx(1.0 / 3));

  auto q = overlap_score("fever and chills", "fever and chills", TaskKind::nli, cfg);
  CHECK(q.at("entailment") == doctest::Approx(1.0));
  CHECK(q.at("neutral") == doctest::Approx(0.0));
  CHECK(valid_distribution(q));
}

TEST_CASE("overlap is symmetric and set-based") {
  OverlapScorerConfig cfg;
  auto ab = overlap_score("fever chills nausea", "fever headache", TaskKind::rqe, cfg);
  auto ba = overlap_score("fever headache", "fever chills nausea", TaskKind::rqe, cfg);
  CHECK(ab.at("true") == doctest::Approx(ba.at("true")).epsilon(1e-15));

  // repeated tokens and case do not matter
  auto rep = overlap_score("Fever fever FEVER chills nausea", "fever headache",
                           TaskKind::rqe, cfg);
  CHECK(rep.at("true") == doctest::Approx(ab.at("true")).epsilon(1e-15));
}

TEST_CASE("overlap edge cases") {
  OverlapScorerConfig cfg;
  // both sides empty after filtering counts as full overlap
  auto empty = overlap_score("", "", TaskKind::rqe, cfg);
  CHECK(empty.at("true") == doctest::Approx(1.0));
  auto stop_only = overlap_score("the a of", "is was", TaskKind::rqe, cfg);
  CHECK(stop_only.at("true") == doctest::Approx(1.0));

  // punctuation-only tokens are dropped
  auto punct = overlap_score("fever .", "fever", TaskKind::rqe, cfg);
  CHECK(punct.at("true") == doctest::Approx(1.0));

  // one empty side overlaps nothing
  auto one_sided = overlap_score("", "fever", TaskKind::rqe, cfg);
  CHECK(one_sided.at("true") == doctest::Approx(0.0));
}

TEST_CASE("overlap rejects non-positive temperature") {
  OverlapScorerConfig cfg;
  cfg.temperature = 0.0;
  CHECK_THROWS_AS(overlap_score("x", "y", TaskKind::rqe, cfg), DataError);
  cfg.temperature = -1.0;
  CHECK_THROWS_AS(overlap_score("x", "y", TaskKind::rqe, cfg), DataError);
}

TEST_CASE("overlap scorer object carries task and name") {
  OverlapScorer scorer(TaskKind::nli, {});
  CHECK(scorer.name() == "overlap");
  CHECK(scorer.task() == TaskKind::nli);
  auto p = scorer.score({"x y", "y z", std::nullopt});
  CHECK(p.at("entailment") == doctest::Approx(1.0 / 3));
}

TEST_CASE("bundled stopword file matches the built-in list") {
  auto from_file =
      load_stopwords(std::filesystem::path(MEDTEXT_SOURCE_DIR) / "data" /
                     "stopwords_en.txt");
  CHECK(from_file == OverlapScorerConfig::default_stopwords());
}

TEST_CASE("external scorer serves stored predictions by pair id") {
  std::vector<PredictionRecord> records = {
      {"p1", "mtdnn", {{"false", 0.2}, {"true", 0.8}}},
      {"p2", "mtdnn", {{"false", 0.9}, {"true", 0.1}}},
      {"p1", "bert", {{"false", 0.6}, {"true", 0.4}}},
  };

  ExternalScorer scorer(TaskKind::rqe, records, "mtdnn");
  CHECK(scorer.name() == "mtdnn");
  auto p = scorer.score({"ignored", "ignored", "p1"});
  CHECK(p.at("true") == doctest::Approx(0.8));

  SUBCASE("unknown pair id") {
    CHECK_THROWS_WITH_AS(scorer.score({"", "", "p9"}), doctest::Contains("p9"),
                         DataError);
  }
  SUBCASE("missing pair id") {
    CHECK_THROWS_AS(scorer.score({"a", "b", std::nullopt}), DataError);
  }
  SUBCASE("empty model name requires a single-model file") {
    CHECK_THROWS_WITH_AS(ExternalScorer(TaskKind::rqe, records, ""),
                         doctest::Contains("--model"), DataError);
    std::vector<PredictionRecord> single = {records[0], records[1]};
    ExternalScorer ok(TaskKind::rqe, single, "");
    CHECK(ok.name() == "mtdnn");
  }
  SUBCASE("model without records") {
    CHECK_THROWS_AS(ExternalScorer(TaskKind::rqe, records, "nonesuch"), DataError);
  }
}
