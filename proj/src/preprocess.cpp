#include "medtext/preprocess.hpp"

#include <algorithm>
#include <cctype>
#include <cstring>
#include <unordered_map>

#include <json.hpp>

#include "medtext/error.hpp"
#include "medtext/unicode.hpp"

namespace medtext {
namespace {

bool is_space_cp(char32_t cp) {
  return cp < 128 && std::isspace(static_cast<int>(cp));
}

bool is_punct_cp(char32_t cp) {
  return cp < 128 && std::ispunct(static_cast<int>(cp));
}

bool is_letter_cp(char32_t cp) {
  if (cp < 128) return std::isalpha(static_cast<int>(cp)) != 0;
  return true;  // non-ASCII is treated as word material
}

std::string upper_ascii(std::string s) {
  for (char& c : s) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  return s;
}

std::string strip_periods(const std::string& s) {
  std::string out;
  out.reserve(s.size());
  for (char c : s)
    if (c != '.') out += c;
  return out;
}

bool has_ascii_upper(const std::string& s) {
  return std::any_of(s.begin(), s.end(), [](unsigned char c) { return std::isupper(c); });
}

bool has_internal_period(const std::string& s) {
  if (s.size() < 3) return false;
  return s.find('.', 1) < s.size() - 1;
}

// One planned text edit; token_index identifies the token being rewritten.
struct Replacement {
  std::size_t token_index = 0;
  std::size_t cp_start = 0;
  std::size_t cp_end = 0;
  std::string original;
  std::string joined;    // window tokens joined by single spaces
  std::string rendered;  // same window with punctuation rejoined
  ExpandStrategy strategy = ExpandStrategy::local_context;
};

std::string join_window(const TokenizedSentence& sentence, std::size_t begin,
                        std::size_t end) {
  std::string out;
  for (std::size_t i = begin; i < end; ++i) {
    if (i > begin) out += ' ';
    out += sentence[i].text;
  }
  return out;
}

std::string apply_replacements(const std::string& text,
                               std::vector<Replacement> plan, bool rendered) {
  if (plan.empty()) return text;
  std::sort(plan.begin(), plan.end(),
            [](const Replacement& x, const Replacement& y) { return x.cp_start > y.cp_start; });
  const auto cps = decode_utf8(text);
  std::string out = text;
  for (const auto& rep : plan) {
    const std::size_t byte_start = cps.at(rep.cp_start).byte_offset;
    const std::size_t byte_end =
        rep.cp_end < cps.size() ? cps[rep.cp_end].byte_offset : text.size();
    out.replace(byte_start, byte_end - byte_start, rendered ? rep.rendered : rep.joined);
  }
  return out;
}

// Candidates sorted so the first acronym match is the leftmost-longest one.
std::vector<AbbrevCandidate> sorted_candidates(const TokenizedSentence& sentence,
                                               std::size_t min_len, std::size_t max_len) {
  auto cands = gen_candidates(sentence, min_len, max_len);
  std::sort(cands.begin(), cands.end(),
            [](const AbbrevCandidate& x, const AbbrevCandidate& y) {
              if (x.span_begin != y.span_begin) return x.span_begin < y.span_begin;
              return x.span_end > y.span_end;
            });
  return cands;
}

std::vector<Replacement> plan_local_side(const TokenizedSentence& own,
                                         const TokenizedSentence& other,
                                         const std::vector<AbbrevCandidate>& other_cands,
                                         std::size_t min_len) {
  std::vector<Replacement> plan;
  for (std::size_t i = 0; i < own.size(); ++i) {
    const std::string& text = own[i].text;
    if (own[i].cp_end - own[i].cp_start < min_len) continue;
    if (!has_ascii_upper(text) && !has_internal_period(text)) continue;
    const std::string key = upper_ascii(strip_periods(text));
    if (key.empty()) continue;
    for (const auto& cand : other_cands) {
      if (cand.acronym != key) continue;
      Replacement rep;
      rep.token_index = i;
      rep.cp_start = own[i].cp_start;
      rep.cp_end = own[i].cp_end;
      rep.original = text;
      rep.joined = join_window(other, cand.span_begin, cand.span_end);
      rep.rendered = detokenize_window(other, cand.span_begin, cand.span_end);
      rep.strategy = ExpandStrategy::local_context;
      plan.push_back(std::move(rep));
      break;
    }
  }
  return plan;
}

std::vector<Replacement> plan_gazetteer_side(const TokenizedSentence& own,
                                             const std::unordered_map<std::string, std::string>& lookup,
                                             const std::set<std::size_t>& skip) {
  std::vector<Replacement> plan;
  for (std::size_t i = 0; i < own.size(); ++i) {
    if (skip.count(i)) continue;
    auto it = lookup.find(upper_ascii(own[i].text));
    if (it == lookup.end()) continue;
    Replacement rep;
    rep.token_index = i;
    rep.cp_start = own[i].cp_start;
    rep.cp_end = own[i].cp_end;
    rep.original = own[i].text;
    rep.joined = it->second;
    rep.rendered = it->second;
    rep.strategy = ExpandStrategy::gazetteer;
    plan.push_back(std::move(rep));
  }
  return plan;
}

std::unordered_map<std::string, std::string> gazetteer_lookup(const Gazetteer& gz) {
  std::unordered_map<std::string, std::string> lookup;
  for (const auto& entry : gz.entries)
    lookup.emplace(upper_ascii(entry.abbreviation), entry.expansion);  // first entry wins
  return lookup;
}

ExpandResult assemble(const LabeledSentencePair& pair,
                      std::vector<Replacement> plan_a, std::vector<Replacement> plan_b,
                      bool rendered) {
  auto by_index = [](const Replacement& x, const Replacement& y) {
    return x.token_index < y.token_index;
  };
  std::sort(plan_a.begin(), plan_a.end(), by_index);
  std::sort(plan_b.begin(), plan_b.end(), by_index);

  ExpandResult result;
  result.pair = pair;
  result.pair.text_a = apply_replacements(pair.text_a, plan_a, rendered);
  result.pair.text_b = apply_replacements(pair.text_b, plan_b, rendered);

  auto record = [&](const std::vector<Replacement>& plan, Side side,
                    std::set<std::size_t>& replaced, ExpandStrategy want) {
    for (const auto& rep : plan) {
      replaced.insert(rep.token_index);
      if (rep.strategy != want) continue;
      ExpansionTrace trace;
      trace.pair_id = pair.id;
      trace.side = side;
      trace.replaced_token = rep.original;
      trace.replacement = rendered ? rep.rendered : rep.joined;
      trace.strategy = rep.strategy;
      result.traces.push_back(std::move(trace));
    }
  };
  // Local-context traces first, then gazetteer, each side a before side b.
  record(plan_a, Side::a, result.replaced.a, ExpandStrategy::local_context);
  record(plan_b, Side::b, result.replaced.b, ExpandStrategy::local_context);
  record(plan_a, Side::a, result.replaced.a, ExpandStrategy::gazetteer);
  record(plan_b, Side::b, result.replaced.b, ExpandStrategy::gazetteer);
  return result;
}

}  // namespace

TokenizedSentence tokenize(std::string_view text) {
  TokenizedSentence tokens;
  const auto cps = decode_utf8(text);
  std::size_t i = 0;
  auto slice = [&](std::size_t first, std::size_t last) {  // cp indices, half-open
    const std::size_t b0 = cps[first].byte_offset;
    const std::size_t b1 = cps[last - 1].byte_offset + cps[last - 1].byte_size;
    tokens.push_back({std::string(text.substr(b0, b1 - b0)), first, last});
  };
  while (i < cps.size()) {
    if (is_space_cp(cps[i].value)) {
      ++i;
    } else if (is_punct_cp(cps[i].value)) {
      slice(i, i + 1);
      ++i;
    } else {
      std::size_t j = i;
      while (j < cps.size() && !is_space_cp(cps[j].value) && !is_punct_cp(cps[j].value)) ++j;
      slice(i, j);
      i = j;
    }
  }
  return tokens;
}

bool is_word_token(const Token& token) {
  const auto cps = decode_utf8(token.text);
  return !cps.empty() && is_letter_cp(cps.front().value);
}

bool is_punct_token(const Token& token) {
  const auto cps = decode_utf8(token.text);
  if (cps.empty()) return false;
  return std::all_of(cps.begin(), cps.end(),
                     [](const CodePoint& cp) { return is_punct_cp(cp.value); });
}

std::vector<std::string> split_sentences(std::string_view text) {
  auto is_ws = [](char c) {
    return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v';
  };
  std::vector<std::string> sentences;
  std::size_t start = 0;
  while (start < text.size() && is_ws(text[start])) ++start;
  std::size_t pos = start;
  while (pos < text.size()) {
    const char c = text[pos];
    if ((c == '.' || c == '!' || c == '?') &&
        (pos + 1 >= text.size() || is_ws(text[pos + 1]))) {
      sentences.emplace_back(text.substr(start, pos + 1 - start));
      ++pos;
      while (pos < text.size() && is_ws(text[pos])) ++pos;
      start = pos;
    } else {
      ++pos;
    }
  }
  if (start < text.size()) {
    std::size_t end = text.size();
    while (end > start && is_ws(text[end - 1])) --end;
    if (end > start) sentences.emplace_back(text.substr(start, end - start));
  }
  return sentences;
}

std::vector<AbbrevCandidate> gen_candidates(const TokenizedSentence& sentence,
                                            std::size_t min_len, std::size_t max_len) {
  std::vector<AbbrevCandidate> candidates;
  // Runs of word-token indices; punctuation is transparent, anything else
  // (numbers, mixed tokens) ends the run.
  std::vector<std::vector<std::size_t>> runs(1);
  for (std::size_t i = 0; i < sentence.size(); ++i) {
    if (is_word_token(sentence[i])) {
      runs.back().push_back(i);
    } else if (!is_punct_token(sentence[i])) {
      if (!runs.back().empty()) runs.emplace_back();
    }
  }
  for (const auto& run : runs) {
    for (std::size_t start = 0; start < run.size(); ++start) {
      std::string acronym;
      for (std::size_t len = 1; len <= max_len && start + len <= run.size(); ++len) {
        const Token& word = sentence[run[start + len - 1]];
        const auto cps = decode_utf8(word.text);
        const char32_t first = cps.front().value;
        if (first < 128) {
          acronym += static_cast<char>(std::toupper(static_cast<int>(first)));
        } else {
          acronym += word.text.substr(0, cps.front().byte_size);
        }
        if (len < min_len) continue;
        AbbrevCandidate cand;
        cand.acronym = acronym;
        cand.span_begin = run[start];
        cand.span_end = run[start + len - 1] + 1;
        cand.word_count = len;
        candidates.push_back(std::move(cand));
      }
    }
  }
  return candidates;
}

std::string_view strategy_name(ExpandStrategy s) {
  return s == ExpandStrategy::local_context ? "local_context" : "gazetteer";
}

std::string detokenize_window(const TokenizedSentence& sentence,
                              std::size_t begin, std::size_t end) {
  std::string out;
  for (std::size_t i = begin; i < end; ++i) {
    const Token& cur = sentence[i];
    if (i > begin) {
      const Token& prev = sentence[i - 1];
      bool no_space = cur.text.size() == 1 &&
                      std::strchr(".,;:?!", cur.text[0]) != nullptr;
      // Hyphen written without surrounding spaces: glue both sides back.
      if (cur.text == "-" && i + 1 < end && prev.cp_end == cur.cp_start &&
          cur.cp_end == sentence[i + 1].cp_start)
        no_space = true;
      if (prev.text == "-" && i >= begin + 2 &&
          sentence[i - 2].cp_end == prev.cp_start && prev.cp_end == cur.cp_start)
        no_space = true;
      if (!no_space) out += ' ';
    }
    out += cur.text;
  }
  return out;
}

namespace {

void check_window_bounds(std::size_t min_len, std::size_t max_len) {
  if (min_len < 2 || min_len > max_len)
    throw DataError("window bounds must satisfy 2 <= min_len <= max_len, got " +
                    std::to_string(min_len) + ".." + std::to_string(max_len));
}

}  // namespace

ExpandResult expand_local_context(const LabeledSentencePair& pair,
                                  std::size_t min_len, std::size_t max_len) {
  check_window_bounds(min_len, max_len);
  const auto tok_a = tokenize(pair.text_a);
  const auto tok_b = tokenize(pair.text_b);
  const auto cand_a = sorted_candidates(tok_a, min_len, max_len);
  const auto cand_b = sorted_candidates(tok_b, min_len, max_len);
  return assemble(pair, plan_local_side(tok_a, tok_b, cand_b, min_len),
                  plan_local_side(tok_b, tok_a, cand_a, min_len),
                  /*rendered=*/false);
}

ExpandResult expand_gazetteer(const LabeledSentencePair& pair, const Gazetteer& gz,
                              const TokenPositions& already_replaced) {
  const auto lookup = gazetteer_lookup(gz);
  return assemble(pair,
                  plan_gazetteer_side(tokenize(pair.text_a), lookup, already_replaced.a),
                  plan_gazetteer_side(tokenize(pair.text_b), lookup, already_replaced.b),
                  /*rendered=*/false);
}

ExpandResult expand(const LabeledSentencePair& pair, const Gazetteer& gz,
                    const ExpandConfig& config) {
  check_window_bounds(config.min_len, config.max_len);
  const auto tok_a = tokenize(pair.text_a);
  const auto tok_b = tokenize(pair.text_b);
  const auto cand_a = sorted_candidates(tok_a, config.min_len, config.max_len);
  const auto cand_b = sorted_candidates(tok_b, config.min_len, config.max_len);

  auto plan_a = plan_local_side(tok_a, tok_b, cand_b, config.min_len);
  auto plan_b = plan_local_side(tok_b, tok_a, cand_a, config.min_len);

  TokenPositions taken;
  for (const auto& rep : plan_a) taken.a.insert(rep.token_index);
  for (const auto& rep : plan_b) taken.b.insert(rep.token_index);

  const auto lookup = gazetteer_lookup(gz);
  for (auto& rep : plan_gazetteer_side(tok_a, lookup, taken.a)) plan_a.push_back(std::move(rep));
  for (auto& rep : plan_gazetteer_side(tok_b, lookup, taken.b)) plan_b.push_back(std::move(rep));

  return assemble(pair, std::move(plan_a), std::move(plan_b), config.rejoin_punctuation);
}

std::string traces_to_jsonl(const std::vector<ExpansionTrace>& traces) {
  std::string out;
  for (const auto& trace : traces) {
    nlohmann::json obj;
    obj["pair_id"] = trace.pair_id;
    obj["side"] = std::string(side_name(trace.side));
    obj["replaced_token"] = trace.replaced_token;
    obj["replacement"] = trace.replacement;
    obj["strategy"] = std::string(strategy_name(trace.strategy));
    out += obj.dump();
    out += '\n';
  }
  return out;
}

}  // namespace medtext
