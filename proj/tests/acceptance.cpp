// Acceptance gate: nine checks, one PASS/FAIL line each, non-zero exit if
// any fail. Tolerances are pinned next to each check.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <iostream>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "medtext/augment.hpp"
#include "medtext/constrain.hpp"
#include "medtext/corpus.hpp"
#include "medtext/ensemble.hpp"
#include "medtext/error.hpp"
#include "medtext/evaluate.hpp"
#include "medtext/preprocess.hpp"
#include "medtext/rank.hpp"
#include "testutil.hpp"

using namespace medtext;
namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

namespace {

constexpr double kBm25Tol = 1e-9;       // library vs. independent oracle
constexpr double kExactRatioTol = 1e-12;  // accuracy vs. closed-form ratio
constexpr double kSixDecimalTol = 5e-7;   // agreement to six printed decimals
constexpr double kStatsTol = 1e-9;        // dataset-stat averages

int g_failed = 0;

// Collects failure details; empty means the criterion holds.
struct Checker {
  std::vector<std::string> problems;
  void expect(bool ok, const std::string& what) {
    if (!ok) problems.push_back(what);
  }
};

void criterion(const std::string& name,
               const std::function<void(Checker&)>& body) {
  Checker c;
  try {
    body(c);
  } catch (const std::exception& e) {
    c.problems.push_back(std::string("unexpected exception: ") + e.what());
  }
  if (c.problems.empty()) {
    std::cout << "PASS " << name << "\n";
  } else {
    ++g_failed;
    std::cout << "FAIL " << name << " (" << c.problems.size() << " problem"
              << (c.problems.size() == 1 ? "" : "s") << ")\n";
    for (const auto& p : c.problems) std::cout << "       - " << p << "\n";
  }
}

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

LabeledSentencePair make_pair(std::string id, std::string a, std::string b,
                              std::string label) {
  LabeledSentencePair p;
  p.id = std::move(id);
  p.text_a = std::move(a);
  p.text_b = std::move(b);
  p.label = std::move(label);
  return p;
}

// ---------------------------------------------------------------- 1
void abbreviation_goldens(Checker& c) {
  const auto start = Clock::now();

  const auto cxr = make_pair(
      "p1", "Her CXR was clear and it did not appear she had an infection.",
      "Chest X-Ray showed infiltrates.", "contradiction");
  const Gazetteer none;
  auto local = expand(cxr, none, ExpandConfig{});
  c.expect(local.pair.text_a ==
               "Her Chest X-Ray was clear and it did not appear she had an "
               "infection.",
           "local-context premise: got \"" + local.pair.text_a + "\"");

  const auto micu = make_pair(
      "p2", "On arrival to the MICU , patient is hemodynamically stable .",
      "The patient was transferred out of intensive care.", "contradiction");
  Gazetteer gz;
  gz.entries.push_back({"MICU", "Medical Intensive Care Unit"});
  auto viaGz = expand(micu, gz, ExpandConfig{});
  c.expect(viaGz.pair.text_a ==
               "On arrival to the Medical Intensive Care Unit , patient is "
               "hemodynamically stable .",
           "gazetteer premise: got \"" + viaGz.pair.text_a + "\"");

  // when both strategies can fire, local context must win
  Gazetteer rival;
  rival.entries.push_back({"CXR", "chest radiograph"});
  auto both = expand(cxr, rival, ExpandConfig{});
  c.expect(both.pair.text_a.find("Chest X-Ray") != std::string::npos,
           "local context did not take precedence: \"" + both.pair.text_a + "\"");
  c.expect(both.pair.text_a.find("chest radiograph") == std::string::npos,
           "gazetteer expansion leaked through: \"" + both.pair.text_a + "\"");

  const double took = seconds_since(start);
  c.expect(took < 1.0, "runtime " + std::to_string(took) + "s >= 1s");
}

// ---------------------------------------------------------------- 2
void candidate_generation(Checker& c) {
  const auto start = Clock::now();
  std::set<std::string> got;
  for (const auto& cand :
       gen_candidates(tokenize("Chest X-Ray showed infiltrates"), 2, 6))
    got.insert(cand.acronym);
  for (const std::string want :
       {"CXR", "CXRS", "XRS", "CXRSI", "XRSI", "RSI"})
    c.expect(got.count(want) == 1, "missing acronym candidate " + want);
  const double took = seconds_since(start);
  c.expect(took < 1.0, "runtime " + std::to_string(took) + "s >= 1s");
}

// ---------------------------------------------------------------- 3
void prior_property(Checker& c) {
  // frozen greedy walk-through: h1 would argmax to entailment but h2 beats
  // it, contradiction then goes to h3, h1 is left with neutral
  PremiseGroup worked;
  worked.group_id = "g";
  worked.members = {
      {"h1", {{"contradiction", 0.25}, {"entailment", 0.40}, {"neutral", 0.35}}},
      {"h2", {{"contradiction", 0.25}, {"entailment", 0.45}, {"neutral", 0.30}}},
      {"h3", {{"contradiction", 0.70}, {"entailment", 0.10}, {"neutral", 0.20}}},
  };
  auto assigned = apply_prior(worked);
  c.expect(assigned.at("h2") == "entailment" &&
               assigned.at("h3") == "contradiction" &&
               assigned.at("h1") == "neutral",
           "worked example mismatch: h1=" + assigned.at("h1") +
               " h2=" + assigned.at("h2") + " h3=" + assigned.at("h3"));

  std::mt19937_64 rng(20240816);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const std::vector<std::string> labels = {"contradiction", "entailment",
                                           "neutral"};
  std::size_t bad_perm = 0, bad_max = 0;
  const std::size_t trials = 10000;
  for (std::size_t t = 0; t < trials; ++t) {
    PremiseGroup group;
    group.group_id = "g";
    std::map<std::string, double> entail;
    for (const std::string id : {"a", "b", "c"}) {
      double p0 = unit(rng) + 1e-9, p1 = unit(rng) + 1e-9,
             p2 = unit(rng) + 1e-9;
      const double z = p0 + p1 + p2;
      Probs probs{{"contradiction", p0 / z},
                  {"entailment", p1 / z},
                  {"neutral", p2 / z}};
      entail[id] = probs["entailment"];
      group.members.push_back({id, std::move(probs)});
    }
    auto out = apply_prior(group);
    std::multiset<std::string> seen;
    for (const auto& [id, label] : out) seen.insert(label);
    if (seen != std::multiset<std::string>(labels.begin(), labels.end()))
      ++bad_perm;
    std::string winner;
    for (const auto& [id, label] : out)
      if (label == "entailment") winner = id;
    for (const auto& [id, p] : entail)
      if (p > entail[winner] + 1e-15) ++bad_max;
  }
  c.expect(bad_perm == 0, std::to_string(bad_perm) + "/" +
                              std::to_string(trials) +
                              " groups not a label permutation");
  c.expect(bad_max == 0, std::to_string(bad_max) + "/" + std::to_string(trials) +
                             " groups where entailment was not the max pick");
}

// ---------------------------------------------------------------- 4
namespace oracle {

// direct transcription of the scoring function, coded independently of
// the library implementation (its own df/tf/avgdl scans)
double idf(const std::string& term,
           const std::vector<std::vector<std::string>>& docs) {
  double n = 0;
  for (const auto& d : docs)
    if (std::find(d.begin(), d.end(), term) != d.end()) n += 1;
  const double N = static_cast<double>(docs.size());
  return std::log((N - n + 0.5) / (n + 0.5));
}

double bm25(const std::vector<std::string>& query,
            const std::vector<std::string>& doc, double k1, double b,
            const std::vector<std::vector<std::string>>& docs) {
  double total_len = 0;
  for (const auto& d : docs) total_len += static_cast<double>(d.size());
  const double avgdl =
      docs.empty() ? 0.0 : total_len / static_cast<double>(docs.size());
  const double dl = static_cast<double>(doc.size());
  double score = 0;
  for (const auto& q : query) {
    double tf = 0;
    for (const auto& w : doc)
      if (w == q) tf += 1;
    const double denom = tf + k1 * (1.0 - b + b * dl / avgdl);
    score += idf(q, docs) * (tf * (k1 + 1.0)) / denom;
  }
  return score;
}

}  // namespace oracle

void bm25_oracle(Checker& c) {
  std::mt19937_64 rng(71);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<std::string> vocab;
  for (int i = 0; i < 12; ++i) vocab.push_back("t" + std::to_string(i));
  auto pick = [&](std::size_t n) { return vocab[rng() % n]; };

  double worst = 0;
  const std::size_t corpora = 1000;
  std::size_t checked = 0;
  for (std::size_t t = 0; t < corpora; ++t) {
    const std::size_t ndocs = 1 + rng() % 10;
    std::vector<std::vector<std::string>> docs(ndocs);
    for (auto& d : docs) {
      const std::size_t len = 1 + rng() % 20;
      for (std::size_t i = 0; i < len; ++i) d.push_back(pick(vocab.size()));
    }
    std::vector<std::string> query;
    const std::size_t qlen = 1 + rng() % 8;
    for (std::size_t i = 0; i < qlen; ++i) query.push_back(pick(vocab.size()));

    Bm25Params params;  // defaults k1=1.2, b=0.75 on even trials
    if (t % 2 == 1) {
      params.k1 = 0.1 + 2.9 * unit(rng);
      params.b = unit(rng);
    }
    const CorpusStats stats = build_stats(docs);
    for (const auto& doc : docs) {
      const double lib = bm25(query, doc, params, stats);
      const double ref = oracle::bm25(query, doc, params.k1, params.b, docs);
      worst = std::max(worst, std::abs(lib - ref));
      ++checked;
    }
  }
  c.expect(worst <= kBm25Tol, "worst |library - oracle| = " +
                                  std::to_string(worst) + " over " +
                                  std::to_string(checked) + " scores");

  // b = 0 kills the length normalization: padding a document with terms
  // outside the query must not move its score at all
  std::size_t unequal = 0;
  for (std::size_t t = 0; t < 200; ++t) {
    std::vector<std::string> base;
    const std::size_t len = 1 + rng() % 10;
    for (std::size_t i = 0; i < len; ++i)
      base.push_back(pick(vocab.size() - 2));  // keep two terms for padding
    std::vector<std::string> padded = base;
    const std::size_t pad = 1 + rng() % 8;
    for (std::size_t i = 0; i < pad; ++i) padded.push_back(vocab[10 + rng() % 2]);

    std::vector<std::vector<std::string>> docs = {base, padded};
    const std::size_t extras = rng() % 3;
    for (std::size_t extra = 0; extra < extras; ++extra)
      docs.push_back({pick(vocab.size() - 2)});
    std::vector<std::string> query;
    const std::size_t qlen = 1 + rng() % 5;
    for (std::size_t i = 0; i < qlen; ++i) query.push_back(pick(vocab.size() - 2));

    const Bm25Params flat{1.2, 0.0};
    const CorpusStats stats = build_stats(docs);
    if (bm25(query, base, flat, stats) != bm25(query, padded, flat, stats))
      ++unequal;
  }
  c.expect(unequal == 0,
           std::to_string(unequal) +
               "/200 padded documents changed score under b = 0");
}

// ---------------------------------------------------------------- 5
void eval_golden(Checker& c) {
  const std::vector<std::string> labels = {"contradiction", "entailment",
                                           "neutral"};
  const std::size_t counts[3][3] = {
      {396, 43, 26}, {30, 353, 82}, {23, 85, 357}};
  std::map<std::string, std::string> gold, pred;
  std::size_t next = 0;
  for (std::size_t g = 0; g < 3; ++g)
    for (std::size_t p = 0; p < 3; ++p)
      for (std::size_t k = 0; k < counts[g][p]; ++k) {
        const std::string id = "pair-" + std::to_string(next++);
        gold[id] = labels[g];
        pred[id] = labels[p];
      }

  const EvalReport report = evaluate(gold, pred, TaskKind::nli);
  c.expect(report.matrix.total() == 1395,
           "matrix total " + std::to_string(report.matrix.total()));
  const double want = 1106.0 / 1395.0;
  c.expect(std::abs(report.accuracy - want) < kExactRatioTol,
           "accuracy " + std::to_string(report.accuracy) + " != 1106/1395");
  c.expect(std::abs(report.accuracy - 0.792832) < kSixDecimalTol,
           "accuracy does not round to 0.792832");
}

// ---------------------------------------------------------------- 6
void augmentation_doubling(Checker& c) {
  std::vector<LabeledSentencePair> pairs;
  std::vector<ConceptAnnotation> anns;
  for (int i = 0; i < 230; ++i) {
    const std::string phrase = "cond" + std::to_string(i);
    auto p = make_pair("q" + std::to_string(i),
                       "Do patients with " + phrase + " recover?",
                       "Can " + phrase + " be cured?",
                       i % 2 == 0 ? "true" : "false");
    pairs.push_back(p);
    ConceptAnnotation a;
    a.pair_id = p.id;
    a.side = Side::a;
    a.span_start = 17;
    a.span_end = 17 + phrase.size();
    a.surface = phrase;
    a.canonical_name = "condition " + std::to_string(i);
    a.concept_type = "Disease or Syndrome";
    anns.push_back(a);
  }

  const auto combined = augment_dataset(pairs, anns);
  c.expect(combined.size() == 460,
           "expected 460 pairs, got " + std::to_string(combined.size()));
  std::map<std::string, std::size_t> by_label;
  for (const auto& p : combined) by_label[p.label.value_or("-")]++;
  c.expect(by_label["true"] == 230 && by_label["false"] == 230,
           "label counts true=" + std::to_string(by_label["true"]) + " false=" +
               std::to_string(by_label["false"]) + ", wanted 230/230");
  bool order_ok = combined.size() == 460;
  for (std::size_t i = 0; order_ok && i < 230; ++i) {
    order_ok = combined[i].id == pairs[i].id &&
               combined[230 + i].id == pairs[i].id + "#umls";
  }
  c.expect(order_ok, "originals-then-augmented ordering broken");

  // template golden
  auto pcd = make_pair("rqe1", "What are the treatments for primary ciliary dyskinesia?",
                       "Is primary ciliary dyskinesia curable?", "true");
  std::vector<ConceptAnnotation> pcd_anns(2);
  pcd_anns[0] = {"rqe1", Side::a, 28, 54, "primary ciliary dyskinesia",
                 "kartaganer syndrome", "Disease or Syndrome"};
  pcd_anns[1] = {"rqe1", Side::b, 3, 29, "primary ciliary dyskinesia",
                 "kartaganer syndrome", "Disease or Syndrome"};
  auto aug = augment_pair(pcd, pcd_anns);
  c.expect(aug.has_value() &&
               aug->text_a == "What are the treatments for kartaganer syndrome, "
                              "a Disease or Syndrome?" &&
               aug->text_b == "Is kartaganer syndrome, a Disease or Syndrome "
                              "curable?",
           "template replacement mismatch");
}

// ---------------------------------------------------------------- 7
void majority_vote_check(Checker& c) {
  auto voter = [](std::string name,
                  std::map<std::string, std::string> labels) {
    ModelVotes v;
    v.model_name = std::move(name);
    v.labels = std::move(labels);
    return v;
  };

  // strict majority, hand-counted
  std::vector<ModelVotes> strict = {
      voter("m0", {{"p1", "true"}}),  voter("m1", {{"p1", "true"}}),
      voter("m2", {{"p1", "true"}}),  voter("m3", {{"p1", "false"}}),
      voter("m4", {{"p1", "false"}}),
  };
  auto res = majority_vote(strict, "m0");
  c.expect(res.size() == 1 && res[0].label == "true" && !res[0].tie_broken &&
               res[0].votes.at("true") == 3 && res[0].votes.at("false") == 2,
           "strict-majority fixture mismatch");

  // 2-2 tie defers to the tie-break model
  std::vector<ModelVotes> tied = {
      voter("m0", {{"p1", "true"}}),
      voter("m1", {{"p1", "true"}}),
      voter("m2", {{"p1", "false"}}),
      voter("m3", {{"p1", "false"}}),
  };
  auto t1 = majority_vote(tied, "m2");
  auto t2 = majority_vote(tied, "m0");
  c.expect(t1.size() == 1 && t1[0].label == "false" && t1[0].tie_broken,
           "tie fixture (breaker m2) mismatch");
  c.expect(t2.size() == 1 && t2[0].label == "true" && t2[0].tie_broken,
           "tie fixture (breaker m0) mismatch");

  // an odd voter count over two labels can never tie
  std::mt19937_64 rng(5);
  std::size_t broke = 0;
  const std::size_t trials = 10000;
  for (std::size_t t = 0; t < trials; ++t) {
    std::vector<ModelVotes> models;
    for (int m = 0; m < 5; ++m) {
      std::map<std::string, std::string> labels;
      for (const std::string pid : {"a", "b", "c"})
        labels[pid] = (rng() & 1) ? "true" : "false";
      models.push_back(voter("m" + std::to_string(m), std::move(labels)));
    }
    for (const auto& r : majority_vote(models, "m0"))
      if (r.tie_broken) ++broke;
  }
  c.expect(broke == 0, std::to_string(broke) + " tie-breaks in " +
                           std::to_string(trials) +
                           " random 5-model binary votes");
}

// ---------------------------------------------------------------- 8
void loader_corpus(Checker& c) {
  TempDir tmp;

  const auto base_pairs = std::vector<LabeledSentencePair>{
      make_pair("p1", "Is primary ciliary dyskinesia curable?",
                "The naïve café test.", "true")};

  struct Bad {
    std::string name;
    std::string content;
    std::function<void(const fs::path&)> load;
  };
  auto load_nli = [](const fs::path& p) {
    load_pairs(p, TaskKind::nli, sniff_pair_format(p));
  };
  auto load_pred_nli = [](const fs::path& p) { load_predictions(p, TaskKind::nli); };
  auto load_pred_rqe = [](const fs::path& p) { load_predictions(p, TaskKind::rqe); };
  auto load_ann = [&](const fs::path& p) { load_annotations(p, base_pairs); };

  const std::vector<Bad> corpus = {
      {"bad_json.jsonl", "{oops\n", load_nli},
      {"missing_text_b.jsonl",
       "{\"id\":\"p1\",\"text_a\":\"a\",\"label\":\"entailment\"}\n", load_nli},
      {"empty_text_a.jsonl",
       "{\"id\":\"p1\",\"text_a\":\"\",\"text_b\":\"b\",\"label\":\"neutral\"}\n",
       load_nli},
      {"empty_pair_id.jsonl",
       "{\"id\":\"\",\"text_a\":\"a\",\"text_b\":\"b\",\"label\":\"neutral\"}\n",
       load_nli},
      {"alien_label.jsonl",
       "{\"id\":\"p1\",\"text_a\":\"a\",\"text_b\":\"b\",\"label\":\"true\"}\n",
       load_nli},
      {"duplicate_id.jsonl",
       "{\"id\":\"p1\",\"text_a\":\"a\",\"text_b\":\"b\",\"label\":\"neutral\"}\n"
       "{\"id\":\"p1\",\"text_a\":\"c\",\"text_b\":\"d\",\"label\":\"neutral\"}\n",
       load_nli},
      {"four_cols.tsv", "p1\tg1\ttext a\ttext b\n", load_nli},
      {"six_cols.tsv", "p1\tg1\ta\tb\tneutral\textra\n", load_nli},
      {"bad_provenance.jsonl",
       "{\"id\":\"p1\",\"text_a\":\"a\",\"text_b\":\"b\",\"label\":\"neutral\","
       "\"provenance\":\"wikipedia\"}\n",
       load_nli},
      {"probs_sum_high.jsonl",
       "{\"pair_id\":\"p1\",\"model_name\":\"m\",\"probs\":{\"contradiction\":0.5,"
       "\"entailment\":0.4,\"neutral\":0.2}}\n",
       load_pred_nli},
      {"probs_negative.jsonl",
       "{\"pair_id\":\"p1\",\"model_name\":\"m\",\"probs\":{\"contradiction\":-0.1,"
       "\"entailment\":0.6,\"neutral\":0.5}}\n",
       load_pred_nli},
      {"probs_missing_class.jsonl",
       "{\"pair_id\":\"p1\",\"model_name\":\"m\",\"probs\":{\"contradiction\":0.5,"
       "\"entailment\":0.5}}\n",
       load_pred_nli},
      {"probs_extra_class.jsonl",
       "{\"pair_id\":\"p1\",\"model_name\":\"m\",\"probs\":{\"false\":0.3,"
       "\"true\":0.5,\"maybe\":0.2}}\n",
       load_pred_rqe},
      {"probs_dup_model_pair.jsonl",
       "{\"pair_id\":\"p1\",\"model_name\":\"m\",\"probs\":{\"false\":0.5,\"true\":0.5}}\n"
       "{\"pair_id\":\"p1\",\"model_name\":\"m\",\"probs\":{\"false\":0.4,\"true\":0.6}}\n",
       load_pred_rqe},
      {"probs_empty_model.jsonl",
       "{\"pair_id\":\"p1\",\"model_name\":\"\",\"probs\":{\"false\":0.5,\"true\":0.5}}\n",
       load_pred_rqe},
      {"ann_span_oob.jsonl",
       "{\"pair_id\":\"p1\",\"side\":\"a\",\"span_start\":0,\"span_end\":99,"
       "\"surface\":\"x\",\"canonical_name\":\"y\",\"concept_type\":\"t\"}\n",
       load_ann},
      {"ann_surface_mismatch.jsonl",
       "{\"pair_id\":\"p1\",\"side\":\"a\",\"span_start\":0,\"span_end\":2,"
       "\"surface\":\"Si\",\"canonical_name\":\"y\",\"concept_type\":\"t\"}\n",
       load_ann},
      {"ann_overlap.jsonl",
       "{\"pair_id\":\"p1\",\"side\":\"a\",\"span_start\":3,\"span_end\":10,"
       "\"surface\":\"primary\",\"canonical_name\":\"y\",\"concept_type\":\"t\"}\n"
       "{\"pair_id\":\"p1\",\"side\":\"a\",\"span_start\":5,\"span_end\":29,"
       "\"surface\":\"imary ciliary dyskinesia\",\"canonical_name\":\"y\","
       "\"concept_type\":\"t\"}\n",
       load_ann},
      {"ann_empty_span.jsonl",
       "{\"pair_id\":\"p1\",\"side\":\"a\",\"span_start\":4,\"span_end\":4,"
       "\"surface\":\"\",\"canonical_name\":\"y\",\"concept_type\":\"t\"}\n",
       load_ann},
      {"ann_bad_side.jsonl",
       "{\"pair_id\":\"p1\",\"side\":\"c\",\"span_start\":0,\"span_end\":2,"
       "\"surface\":\"Is\",\"canonical_name\":\"y\",\"concept_type\":\"t\"}\n",
       load_ann},
      {"ann_unknown_pair.jsonl",
       "{\"pair_id\":\"zz\",\"side\":\"a\",\"span_start\":0,\"span_end\":2,"
       "\"surface\":\"Is\",\"canonical_name\":\"y\",\"concept_type\":\"t\"}\n",
       load_ann},
      {"answers_dup.jsonl",
       "{\"question_id\":\"q\",\"answer_id\":\"a\",\"text\":\"x\",\"source\":\"chiqa\"}\n"
       "{\"question_id\":\"q\",\"answer_id\":\"a\",\"text\":\"y\",\"source\":\"chiqa\"}\n",
       [](const fs::path& p) { load_answers(p); }},
      {"answers_empty_text.jsonl",
       "{\"question_id\":\"q\",\"answer_id\":\"a\",\"text\":\"\",\"source\":\"chiqa\"}\n",
       [](const fs::path& p) { load_answers(p); }},
      {"answers_bad_relevance.jsonl",
       "{\"question_id\":\"q\",\"answer_id\":\"a\",\"text\":\"x\",\"source\":\"chiqa\","
       "\"relevance\":\"yes\"}\n",
       [](const fs::path& p) { load_answers(p); }},
      {"answers_missing_source.jsonl",
       "{\"question_id\":\"q\",\"answer_id\":\"a\",\"text\":\"x\"}\n",
       [](const fs::path& p) { load_answers(p); }},
      {"questions_dup.jsonl",
       "{\"question_id\":\"q\",\"text\":\"a?\"}\n{\"question_id\":\"q\",\"text\":\"b?\"}\n",
       [](const fs::path& p) { load_questions(p); }},
      {"questions_empty_text.jsonl", "{\"question_id\":\"q\",\"text\":\"\"}\n",
       [](const fs::path& p) { load_questions(p); }},
      {"gazetteer_one_col.tsv", "CXR\n",
       [](const fs::path& p) { load_gazetteer(p); }},
      {"gazetteer_empty_abbrev.tsv", "\tchest radiograph\n",
       [](const fs::path& p) { load_gazetteer(p); }},
      {"labels_dup.jsonl",
       "{\"pair_id\":\"p1\",\"label\":\"true\"}\n{\"pair_id\":\"p1\",\"label\":\"false\"}\n",
       [](const fs::path& p) { load_labels(p); }},
      {"qqp_bad_flag.tsv",
       "id\tqid1\tqid2\tquestion1\tquestion2\tis_duplicate\n"
       "7\t1\t2\tleft q\tright q\t2\n",
       [](const fs::path& p) { load_qqp_tsv(p); }},
      {"qqp_five_fields.tsv",
       "id\tqid1\tqid2\tquestion1\tquestion2\tis_duplicate\n"
       "7\t1\t2\tleft q\tright q\n",
       [](const fs::path& p) { load_qqp_tsv(p); }},
  };

  std::size_t rejected = 0;
  for (const auto& bad : corpus) {
    const fs::path p = tmp.file(bad.name, bad.content);
    try {
      bad.load(p);
      c.expect(false, bad.name + " was accepted");
    } catch (const DataError&) {
      ++rejected;
    }
  }
  c.expect(rejected == corpus.size(),
           std::to_string(rejected) + "/" + std::to_string(corpus.size()) +
               " malformed files rejected");
  c.expect(corpus.size() >= 20, "corpus smaller than 20 files");

  // well-formed fixtures at the published dataset sizes
  {
    std::string tsv;
    const char* labels[3] = {"entailment", "contradiction", "neutral"};
    for (int g = 0; g < 3744; ++g)
      for (int j = 0; j < 3; ++j)
        tsv += "g" + std::to_string(g) + "h" + std::to_string(j) + "\tg" +
               std::to_string(g) + "\tpremise number " + std::to_string(g) +
               "\thypothesis " + std::to_string(j) + " for premise " +
               std::to_string(g) + "\t" + labels[j] + "\n";
    const fs::path p = tmp.file("nli_train.tsv", tsv);
    const auto pairs = load_pairs(p, TaskKind::nli, sniff_pair_format(p));
    std::map<std::string, std::size_t> per_label;
    for (const auto& pr : pairs) per_label[pr.label.value_or("-")]++;
    c.expect(pairs.size() == 11232,
             "nli train size " + std::to_string(pairs.size()) + " != 11232");
    c.expect(per_label["entailment"] == 3744 &&
                 per_label["contradiction"] == 3744 &&
                 per_label["neutral"] == 3744,
             "nli per-class counts are not 3744 each");
  }
  {
    std::string jsonl;
    for (int i = 0; i < 8588; ++i) {
      const bool truthy = i < 4655;
      jsonl += "{\"id\":\"r" + std::to_string(i) +
               "\",\"text_a\":\"chq number " + std::to_string(i) +
               "\",\"text_b\":\"faq number " + std::to_string(i) +
               "\",\"label\":\"" + (truthy ? "true" : "false") + "\"}\n";
    }
    const fs::path p = tmp.file("rqe_train.jsonl", jsonl);
    const auto pairs = load_pairs(p, TaskKind::rqe, sniff_pair_format(p));
    std::map<std::string, std::size_t> per_label;
    for (const auto& pr : pairs) per_label[pr.label.value_or("-")]++;
    c.expect(pairs.size() == 8588,
             "rqe train size " + std::to_string(pairs.size()) + " != 8588");
    c.expect(per_label["true"] == 4655 && per_label["false"] == 3933,
             "rqe per-class counts are not 4655/3933");
  }
  {
    // one model's validation predictions: 465 premises, 3 hypotheses each
    std::string jsonl;
    std::vector<LabeledSentencePair> pairs;
    for (int g = 0; g < 465; ++g)
      for (int j = 0; j < 3; ++j) {
        const std::string id = "v" + std::to_string(g) + "h" + std::to_string(j);
        jsonl += "{\"pair_id\":\"" + id +
                 "\",\"model_name\":\"m\",\"probs\":{\"contradiction\":0.2,"
                 "\"entailment\":0.5,\"neutral\":0.3}}\n";
        auto pr = make_pair(id, "premise " + std::to_string(g),
                            "hypothesis " + std::to_string(j), "neutral");
        pr.group_id = "v" + std::to_string(g);
        pairs.push_back(pr);
      }
    const fs::path p = tmp.file("val_preds.jsonl", jsonl);
    const auto preds = load_predictions(p, TaskKind::nli);
    c.expect(preds.size() == 1395,
             "prediction count " + std::to_string(preds.size()) + " != 1395");
    const auto grouping = group_by_premise(preds, pairs);
    c.expect(grouping.groups.size() == 465 && grouping.malformed.empty(),
             "grouping gives " + std::to_string(grouping.groups.size()) +
                 " well-formed groups, wanted 465");
  }
  {
    // 25 questions, 9 answers each, token lengths averaging exactly 420.4
    std::string questions, answers;
    std::size_t written = 0;
    for (int q = 0; q < 25; ++q) {
      questions += "{\"question_id\":\"q" + std::to_string(q) +
                   "\",\"text\":\"question number " + std::to_string(q) +
                   "?\"}\n";
      for (int a = 0; a < 9; ++a) {
        const std::size_t tokens = written < 90 ? 421 : 420;
        ++written;
        std::string text = "w";
        for (std::size_t t = 1; t < tokens; ++t) text += " w";
        answers += "{\"question_id\":\"q" + std::to_string(q) +
                   "\",\"answer_id\":\"a" + std::to_string(a) +
                   "\",\"text\":\"" + text + "\",\"source\":\"chiqa\"}\n";
      }
    }
    const auto qs = load_questions(tmp.file("questions.jsonl", questions));
    const auto as = load_answers(tmp.file("answers.jsonl", answers));
    const auto stats = dataset_stats(as);
    c.expect(qs.size() == 25, "question count " + std::to_string(qs.size()));
    c.expect(stats.question_count == 25 &&
                 std::abs(stats.avg_answer_count - 9.0) < kStatsTol,
             "answer-count stats mismatch");
    c.expect(std::abs(stats.avg_answer_length - 420.4) < kStatsTol,
             "avg answer length " + std::to_string(stats.avg_answer_length) +
                 " != 420.4");
  }
}

// ---------------------------------------------------------------- 9
void end_to_end_determinism(Checker& c) {
  TempDir tmp;
  const fs::path src = fs::path(MEDTEXT_SOURCE_DIR) / "fixtures" / "demo";
  const fs::path a = tmp.path / "a";
  const fs::path b = tmp.path / "b";
  fs::copy(src, a, fs::copy_options::recursive);
  fs::copy(src, b, fs::copy_options::recursive);
  fs::remove_all(a / "out");
  fs::remove_all(b / "out");

  auto run = [&](const fs::path& dir) {
    const std::string cmd = std::string("\"") + MEDTEXT_CLI_PATH +
                            "\" pipeline --config \"" +
                            (dir / "demo.toml").string() + "\" > /dev/null 2>&1";
    return std::system(cmd.c_str());
  };
  c.expect(run(a) == 0, "first pipeline run failed");

  std::map<std::string, std::string> first;
  for (const auto& entry : fs::directory_iterator(a / "out"))
    first[entry.path().filename().string()] = slurp(entry.path());
  c.expect(first.size() == 11, "expected 11 output files, got " +
                                   std::to_string(first.size()));

  c.expect(run(a) == 0, "repeat pipeline run failed");
  for (const auto& [name, bytes] : first)
    c.expect(slurp(a / "out" / name) == bytes, name + " changed on re-run");

  c.expect(run(b) == 0, "second-directory pipeline run failed");
  for (const auto& [name, bytes] : first)
    c.expect(slurp(b / "out" / name) == bytes,
             name + " differs across directories");
}

}  // namespace

int main() {
  criterion("abbreviation expansion goldens", abbreviation_goldens);
  criterion("acronym candidate generation", candidate_generation);
  criterion("dataset prior property", prior_property);
  criterion("bm25 oracle equivalence", bm25_oracle);
  criterion("confusion-matrix accuracy golden", eval_golden);
  criterion("umls augmentation doubling", augmentation_doubling);
  criterion("majority vote behaviour", majority_vote_check);
  criterion("loader validation corpus", loader_corpus);
  criterion("end-to-end determinism", end_to_end_determinism);

  if (g_failed == 0) {
    std::cout << "acceptance: all 9 criteria passed\n";
    return 0;
  }
  std::cout << "acceptance: " << g_failed << " of 9 criteria FAILED\n";
  return 1;
}
