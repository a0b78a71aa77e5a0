#ifndef NERSYNTH_NER_TRANSITIONS_HPP
#define NERSYNTH_NER_TRANSITIONS_HPP

#include <string>
#include <vector>

#include "nersynth/corpus.hpp"

namespace nersynth::ner {

enum class Action { Begin, In, Last, Unit, Out };

// Action ids: 0 = OUT, then per label {BEGIN, IN, LAST, UNIT}.
struct Transition {
  Action action = Action::Out;
  int label = -1;  // index into the tag inventory; -1 for OUT

  bool operator==(const Transition&) const = default;
};

inline int action_count(std::size_t n_labels) {
  return 1 + 4 * static_cast<int>(n_labels);
}

int transition_id(const Transition& t);
Transition transition_from_id(int id);
std::string transition_name(const Transition& t, const LabelSet& labels);

constexpr int kSentinel = -1;

// Entity in token coordinates, [first, last_excl).
struct TokenEntity {
  std::size_t first = 0;
  std::size_t last_excl = 0;
  int label = -1;
};

// Parser state: current position plus the two auxiliary token indices the
// scorer keys on.
struct ParserState {
  std::size_t position = 0;
  int open_label = -1;           // label of the open entity, -1 when closed
  std::size_t open_start = 0;    // first token of the open entity
  int last_entity_start = kSentinel;  // first token of the most recent entity
  std::vector<TokenEntity> committed;

  bool entity_open() const { return open_label >= 0; }
};

bool is_legal(const ParserState& state, const Transition& t,
              std::size_t n_tokens, std::size_t n_labels);

// Applies a legal transition; advances position by one. Committed spans are
// in token coordinates [first_token, last_token+1).
void apply(ParserState& state, const Transition& t);

// Oracle sequence for token-aligned spans. Throws MisalignedSpan when a span
// boundary falls strictly inside a token.
std::vector<Transition> gold_transitions(const std::vector<TokenSpan>& tokens,
                                         const std::vector<Span>& spans,
                                         const LabelSet& labels);

// Replays a transition sequence into character-offset spans.
std::vector<Span> decode_transitions(const std::vector<TokenSpan>& tokens,
                                     const std::vector<Transition>& transitions,
                                     const LabelSet& labels);

}  // namespace nersynth::ner

#endif
