#include "medtext/augment.hpp"

#include <algorithm>
#include <map>
#include <random>
#include <unordered_set>

#include "medtext/error.hpp"
#include "medtext/io.hpp"
#include "medtext/unicode.hpp"

namespace medtext {
namespace {

std::string fill_template(const std::string& template_text,
                          const ConceptAnnotation& annotation) {
  std::string out = template_text;
  const auto put = [&](const std::string& placeholder, const std::string& value) {
    out.replace(out.find(placeholder), placeholder.size(), value);
  };
  put("{canonical}", annotation.canonical_name);
  put("{type}", annotation.concept_type);
  return out;
}

// Splices [span_start, span_end) scalar-offset replacements, rightmost first.
std::string replace_spans(const std::string& text,
                          std::vector<const ConceptAnnotation*> spans,
                          const std::string& template_text) {
  std::sort(spans.begin(), spans.end(),
            [](const ConceptAnnotation* x, const ConceptAnnotation* y) {
              return x->span_start > y->span_start;
            });
  for (std::size_t i = 1; i < spans.size(); ++i) {
    if (spans[i]->span_end > spans[i - 1]->span_start)
      throw DataError("overlapping annotations on pair \"" + spans[i]->pair_id + "\"");
  }
  const auto cps = decode_utf8(text);
  std::string out = text;
  for (const ConceptAnnotation* a : spans) {
    if (a->span_end > cps.size())
      throw DataError("annotation span exceeds text on pair \"" + a->pair_id + "\"");
    const std::size_t byte_start = cps[a->span_start].byte_offset;
    const std::size_t byte_end =
        a->span_end < cps.size() ? cps[a->span_end].byte_offset : text.size();
    out.replace(byte_start, byte_end - byte_start, fill_template(template_text, *a));
  }
  return out;
}

std::size_t count_of(const std::string& haystack, const std::string& needle) {
  std::size_t count = 0;
  for (std::size_t pos = haystack.find(needle); pos != std::string::npos;
       pos = haystack.find(needle, pos + 1))
    ++count;
  return count;
}

const std::vector<LabeledSentencePair>& require_source(
    const std::optional<std::vector<LabeledSentencePair>>& source,
    TrainVariant variant, const char* name) {
  if (!source || source->empty())
    throw DataError("variant " + std::string(variant_name(variant)) +
                    ": missing source \"" + std::string(name) + "\"");
  return *source;
}

void check_unique_ids(const std::vector<LabeledSentencePair>& pairs) {
  std::unordered_set<std::string> seen;
  for (const auto& pair : pairs)
    if (!seen.insert(pair.id).second)
      throw DataError("assembled dataset repeats pair id \"" + pair.id + "\"");
}

}  // namespace

void validate_template(const std::string& template_text) {
  if (count_of(template_text, "{canonical}") != 1 ||
      count_of(template_text, "{type}") != 1)
    throw DataError("template must contain {canonical} and {type} exactly once");
}

std::optional<LabeledSentencePair> augment_pair(
    const LabeledSentencePair& pair, const std::vector<ConceptAnnotation>& annotations,
    const std::string& template_text) {
  validate_template(template_text);
  std::vector<const ConceptAnnotation*> side_a, side_b;
  for (const auto& a : annotations) {
    if (a.pair_id != pair.id) continue;
    (a.side == Side::a ? side_a : side_b).push_back(&a);
  }
  if (side_a.empty() && side_b.empty()) return std::nullopt;

  LabeledSentencePair out = pair;
  out.id += "#umls";
  out.provenance = Provenance::umls_augmented;
  out.text_a = replace_spans(pair.text_a, std::move(side_a), template_text);
  out.text_b = replace_spans(pair.text_b, std::move(side_b), template_text);
  return out;
}

std::vector<LabeledSentencePair> augment_dataset(
    const std::vector<LabeledSentencePair>& pairs,
    const std::vector<ConceptAnnotation>& annotations,
    const std::string& template_text) {
  validate_template(template_text);
  std::map<std::string, std::vector<ConceptAnnotation>> by_pair;
  for (const auto& a : annotations) by_pair[a.pair_id].push_back(a);

  std::vector<LabeledSentencePair> out = pairs;
  for (const auto& pair : pairs) {
    auto it = by_pair.find(pair.id);
    if (it == by_pair.end()) continue;
    if (auto augmented = augment_pair(pair, it->second, template_text))
      out.push_back(std::move(*augmented));
  }
  return out;
}

std::vector<LabeledSentencePair> subsample(const std::vector<LabeledSentencePair>& pairs,
                                           std::size_t target, std::uint64_t seed) {
  if (target > pairs.size())
    throw DataError("subsample target " + std::to_string(target) +
                    " exceeds dataset size " + std::to_string(pairs.size()));
  // Partial Fisher-Yates over the index array; mt19937_64 keeps the draw
  // identical across platforms, unlike the distribution helpers.
  std::vector<std::size_t> indices(pairs.size());
  for (std::size_t i = 0; i < indices.size(); ++i) indices[i] = i;
  std::mt19937_64 rng(seed);
  for (std::size_t i = 0; i < target; ++i) {
    const std::size_t j = i + static_cast<std::size_t>(rng() % (indices.size() - i));
    std::swap(indices[i], indices[j]);
  }
  indices.resize(target);
  std::sort(indices.begin(), indices.end());
  std::vector<LabeledSentencePair> out;
  out.reserve(target);
  for (std::size_t idx : indices) out.push_back(pairs[idx]);
  return out;
}

TrainVariant parse_variant(std::string_view name) {
  if (name == "orig") return TrainVariant::orig;
  if (name == "data_aug") return TrainVariant::data_aug;
  if (name == "orig_plus_dataaug_plus_qqp") return TrainVariant::orig_plus_dataaug_plus_qqp;
  if (name == "dataaug_plus_qqp") return TrainVariant::dataaug_plus_qqp;
  if (name == "paraphrase") return TrainVariant::paraphrase;
  throw DataError("unknown training-set variant \"" + std::string(name) + "\"");
}

std::string_view variant_name(TrainVariant variant) {
  switch (variant) {
    case TrainVariant::orig: return "orig";
    case TrainVariant::data_aug: return "data_aug";
    case TrainVariant::orig_plus_dataaug_plus_qqp: return "orig_plus_dataaug_plus_qqp";
    case TrainVariant::dataaug_plus_qqp: return "dataaug_plus_qqp";
    case TrainVariant::paraphrase: return "paraphrase";
  }
  return "orig";
}

std::vector<LabeledSentencePair> assemble_training_set(TrainVariant variant,
                                                       const AssembleSources& sources,
                                                       const AugmentConfig& config) {
  validate_template(config.template_text);
  auto data_aug = [&]() {
    const auto& validation = require_source(sources.validation, variant, "validation");
    if (!sources.annotations)
      throw DataError("variant " + std::string(variant_name(variant)) +
                      ": missing source \"annotations\"");
    return augment_dataset(validation, *sources.annotations, config.template_text);
  };
  auto qqp_sample = [&]() {
    const auto& qqp = require_source(sources.qqp, variant, "qqp");
    return subsample(qqp, config.qqp_target_size, config.seed);
  };

  std::vector<LabeledSentencePair> out;
  auto append = [&](std::vector<LabeledSentencePair> block) {
    for (auto& pair : block) out.push_back(std::move(pair));
  };

  switch (variant) {
    case TrainVariant::orig:
      append(require_source(sources.train, variant, "train"));
      break;
    case TrainVariant::data_aug:
      append(data_aug());
      break;
    case TrainVariant::orig_plus_dataaug_plus_qqp:
      append(require_source(sources.train, variant, "train"));
      append(data_aug());
      append(qqp_sample());
      break;
    case TrainVariant::dataaug_plus_qqp:
      append(data_aug());
      append(qqp_sample());
      break;
    case TrainVariant::paraphrase: {
      append(data_aug());
      auto block = require_source(sources.paraphrase, variant, "paraphrase");
      for (auto& pair : block) pair.provenance = Provenance::paraphrase;
      append(std::move(block));
      break;
    }
  }
  check_unique_ids(out);
  return out;
}

bool looks_like_qqp_tsv(const std::filesystem::path& path) {
  if (path.extension() != ".tsv") return false;
  const std::string content = read_file(path);
  const std::string header = content.substr(0, content.find('\n'));
  return header.rfind("id\t", 0) == 0 &&
         header.find("is_duplicate") != std::string::npos;
}

std::vector<LabeledSentencePair> load_qqp_tsv(const std::filesystem::path& path) {
  const std::string content = read_file(path);
  std::vector<LabeledSentencePair> pairs;
  std::unordered_set<std::string> seen;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= content.size()) {
    std::size_t nl = content.find('\n', pos);
    std::string line = content.substr(pos, nl == std::string::npos ? nl : nl - pos);
    pos = nl == std::string::npos ? content.size() + 1 : nl + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line_no == 1) continue;  // header

    std::vector<std::string> fields;
    std::size_t field_pos = 0;
    while (true) {
      std::size_t tab = line.find('\t', field_pos);
      fields.push_back(line.substr(field_pos, tab == std::string::npos ? tab : tab - field_pos));
      if (tab == std::string::npos) break;
      field_pos = tab + 1;
    }
    const std::string context = path.string() + ":" + std::to_string(line_no);
    if (fields.size() != 6)
      throw DataError(context + ": expected 6 tab-separated fields, got " +
                      std::to_string(fields.size()));
    if (fields[5] != "0" && fields[5] != "1")
      throw DataError(context + ": is_duplicate must be 0 or 1");
    LabeledSentencePair pair;
    pair.id = "qqp-" + fields[0];
    pair.text_a = fields[3];
    pair.text_b = fields[4];
    pair.label = fields[5] == "1" ? "true" : "false";
    pair.provenance = Provenance::qqp;
    if (pair.text_a.empty() || pair.text_b.empty())
      throw DataError(context + ": empty question text");
    if (!seen.insert(pair.id).second)
      throw DataError(context + ": duplicate id \"" + pair.id + "\"");
    pairs.push_back(std::move(pair));
  }
  return pairs;
}

}  // namespace medtext
