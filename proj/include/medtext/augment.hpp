#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "medtext/corpus.hpp"

namespace medtext {

inline constexpr std::string_view kDefaultTemplate = "{canonical}, a {type}";

struct AugmentConfig {
  std::string template_text{kDefaultTemplate};
  std::uint64_t seed = 0;
  std::size_t qqp_target_size = 9000;
};

// The template must contain {canonical} and {type} exactly once each.
void validate_template(const std::string& template_text);

// Replaces every annotated span (right-to-left, so earlier offsets stay
// valid) with the filled template. Returns nothing for an unannotated
// pair. Output id is "<id>#umls", provenance umls_augmented.
std::optional<LabeledSentencePair> augment_pair(
    const LabeledSentencePair& pair, const std::vector<ConceptAnnotation>& annotations,
    const std::string& template_text = std::string(kDefaultTemplate));

// Originals in input order, then the augmented block in input order.
std::vector<LabeledSentencePair> augment_dataset(
    const std::vector<LabeledSentencePair>& pairs,
    const std::vector<ConceptAnnotation>& annotations,
    const std::string& template_text = std::string(kDefaultTemplate));

// Exactly `target` pairs chosen without replacement; deterministic for a
// given seed; survivors keep their input order.
std::vector<LabeledSentencePair> subsample(const std::vector<LabeledSentencePair>& pairs,
                                           std::size_t target, std::uint64_t seed);

enum class TrainVariant {
  orig,
  data_aug,
  orig_plus_dataaug_plus_qqp,
  dataaug_plus_qqp,
  paraphrase,
};

TrainVariant parse_variant(std::string_view name);
std::string_view variant_name(TrainVariant variant);

struct AssembleSources {
  std::optional<std::vector<LabeledSentencePair>> train;
  std::optional<std::vector<LabeledSentencePair>> validation;
  std::optional<std::vector<ConceptAnnotation>> annotations;
  std::optional<std::vector<LabeledSentencePair>> qqp;
  std::optional<std::vector<LabeledSentencePair>> paraphrase;
};

// Builds one training-set variant:
//   orig                        train as-is
//   data_aug                    validation + its augmented copies (no train)
//   orig_plus_dataaug_plus_qqp  train ++ data_aug ++ qqp subsample
//   dataaug_plus_qqp            data_aug ++ qqp subsample
//   paraphrase                  data_aug ++ paraphrase pairs
std::vector<LabeledSentencePair> assemble_training_set(TrainVariant variant,
                                                       const AssembleSources& sources,
                                                       const AugmentConfig& config);

// Native QQP dump: header line, then id qid1 qid2 question1 question2
// is_duplicate, tab-separated. is_duplicate becomes the true/false label.
std::vector<LabeledSentencePair> load_qqp_tsv(const std::filesystem::path& path);
bool looks_like_qqp_tsv(const std::filesystem::path& path);

}  // namespace medtext
