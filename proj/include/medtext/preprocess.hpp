#pragma once

#include <cstddef>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "medtext/corpus.hpp"

namespace medtext {

struct Token {
  std::string text;
  std::size_t cp_start = 0;  // Unicode scalar offsets into the source text
  std::size_t cp_end = 0;

  bool operator==(const Token&) const = default;
};

using TokenizedSentence = std::vector<Token>;

// Whitespace split, then every punctuation character (hyphens included)
// becomes its own token. Offsets let callers splice the original text.
TokenizedSentence tokenize(std::string_view text);

// Token with at least one letter first; used to form acronym windows.
bool is_word_token(const Token& token);
// Token made only of punctuation characters; transparent to windows.
bool is_punct_token(const Token& token);

// Sentences end at . ! ? followed by whitespace or end of text; the
// delimiter stays with its sentence.
std::vector<std::string> split_sentences(std::string_view text);

struct AbbrevCandidate {
  std::string acronym;          // uppercased first letters of the window words
  std::size_t span_begin = 0;   // token index range in the source sentence,
  std::size_t span_end = 0;     // half-open; may cover skipped punctuation
  std::size_t word_count = 0;
};

// Every window of min_len..max_len consecutive word tokens. Punctuation
// tokens inside a window are skipped for the acronym but remain inside
// the span; any other non-word token breaks the window.
std::vector<AbbrevCandidate> gen_candidates(const TokenizedSentence& sentence,
                                            std::size_t min_len, std::size_t max_len);

enum class ExpandStrategy { local_context, gazetteer };
std::string_view strategy_name(ExpandStrategy s);

struct ExpansionTrace {
  std::string pair_id;
  Side side = Side::a;         // side whose token was replaced
  std::string replaced_token;
  std::string replacement;     // text that was spliced in
  ExpandStrategy strategy = ExpandStrategy::local_context;
};

struct TokenPositions {
  std::set<std::size_t> a;
  std::set<std::size_t> b;
};

struct ExpandConfig {
  std::size_t min_len = 2;
  std::size_t max_len = 6;
  // When true, replacements drop spaces before . , ; : ? ! and re-glue
  // hyphens that were written without spaces ("X - Ray" -> "X-Ray").
  bool rejoin_punctuation = true;
};

struct ExpandResult {
  LabeledSentencePair pair;
  std::vector<ExpansionTrace> traces;
  TokenPositions replaced;  // token indices (per side) that were rewritten
};

// Renders the token range [begin, end) as readable text: tokens joined by
// single spaces, then spaces removed before . , ; : ? ! and around hyphens
// that were adjacent to their neighbours in the source offsets.
std::string detokenize_window(const TokenizedSentence& sentence,
                              std::size_t begin, std::size_t end);

// Replaces acronym-looking tokens by the matching word window from the
// other side of the pair. Replacement text is the window joined by single
// spaces; expand() below optionally rejoins punctuation instead.
ExpandResult expand_local_context(const LabeledSentencePair& pair,
                                  std::size_t min_len, std::size_t max_len);

// Replaces tokens that match a gazetteer abbreviation (case-insensitive)
// by the first expansion in file order, skipping already-replaced indices.
ExpandResult expand_gazetteer(const LabeledSentencePair& pair, const Gazetteer& gz,
                              const TokenPositions& already_replaced);

// Local context first, gazetteer on what remains.
ExpandResult expand(const LabeledSentencePair& pair, const Gazetteer& gz,
                    const ExpandConfig& config);

std::string traces_to_jsonl(const std::vector<ExpansionTrace>& traces);

}  // namespace medtext
