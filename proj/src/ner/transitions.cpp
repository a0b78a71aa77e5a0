#include "nersynth/ner/transitions.hpp"

#include <algorithm>

namespace nersynth::ner {

int transition_id(const Transition& t) {
  if (t.action == Action::Out) return 0;
  int base = 1 + 4 * t.label;
  switch (t.action) {
    case Action::Begin: return base + 0;
    case Action::In: return base + 1;
    case Action::Last: return base + 2;
    case Action::Unit: return base + 3;
    default: return 0;
  }
}

Transition transition_from_id(int id) {
  if (id == 0) return {Action::Out, -1};
  int k = id - 1;
  static constexpr Action kActions[4] = {Action::Begin, Action::In,
                                         Action::Last, Action::Unit};
  return {kActions[k % 4], k / 4};
}

std::string transition_name(const Transition& t, const LabelSet& labels) {
  switch (t.action) {
    case Action::Out: return "OUT";
    case Action::Begin: return "BEGIN(" + labels.labels[t.label] + ")";
    case Action::In: return "IN(" + labels.labels[t.label] + ")";
    case Action::Last: return "LAST(" + labels.labels[t.label] + ")";
    case Action::Unit: return "UNIT(" + labels.labels[t.label] + ")";
  }
  return "?";
}

bool is_legal(const ParserState& state, const Transition& t,
              std::size_t n_tokens, std::size_t n_labels) {
  if (state.position >= n_tokens) return false;
  if (t.action != Action::Out &&
      (t.label < 0 || t.label >= static_cast<int>(n_labels)))
    return false;
  const bool last_token = state.position + 1 == n_tokens;
  if (state.entity_open()) {
    // An open entity must be continued or closed with the same label.
    if (t.action == Action::In) return t.label == state.open_label && !last_token;
    if (t.action == Action::Last) return t.label == state.open_label;
    return false;
  }
  switch (t.action) {
    case Action::Begin: return !last_token;  // could never close
    case Action::Unit: return true;
    case Action::Out: return true;
    default: return false;
  }
}

void apply(ParserState& state, const Transition& t) {
  switch (t.action) {
    case Action::Begin:
      state.open_label = t.label;
      state.open_start = state.position;
      state.last_entity_start = static_cast<int>(state.position);
      break;
    case Action::In:
      break;
    case Action::Last:
      state.committed.push_back(
          {state.open_start, state.position + 1, state.open_label});
      state.open_label = -1;
      break;
    case Action::Unit:
      state.committed.push_back({state.position, state.position + 1, t.label});
      state.last_entity_start = static_cast<int>(state.position);
      break;
    case Action::Out:
      break;
  }
  ++state.position;
}

std::vector<Transition> gold_transitions(const std::vector<TokenSpan>& tokens,
                                         const std::vector<Span>& spans,
                                         const LabelSet& labels) {
  // Map span char boundaries to token boundaries; reject misaligned spans.
  struct TokSpan {
    std::size_t first, last;  // token indices, inclusive
    int label;
  };
  std::vector<TokSpan> tspans;
  for (const Span& s : spans) {
    int label = labels.index_of(s.label);
    if (label < 0) throw Error("gold_transitions: unknown label " + s.label);
    std::size_t first = tokens.size(), last = 0;
    bool start_ok = false, end_ok = false;
    for (const TokenSpan& t : tokens) {
      if (t.start == s.start) {
        first = t.token_index;
        start_ok = true;
      }
      if (t.end == s.end) {
        last = t.token_index;
        end_ok = true;
      }
    }
    if (!start_ok || !end_ok)
      throw MisalignedSpan("span (" + std::to_string(s.start) + "," +
                           std::to_string(s.end) +
                           ") does not align with token boundaries");
    tspans.push_back({first, last, label});
  }
  std::sort(tspans.begin(), tspans.end(),
            [](const TokSpan& a, const TokSpan& b) { return a.first < b.first; });

  std::vector<Transition> out;
  std::size_t k = 0;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    if (k < tspans.size() && i == tspans[k].first) {
      if (tspans[k].first == tspans[k].last) {
        out.push_back({Action::Unit, tspans[k].label});
        ++k;
      } else {
        out.push_back({Action::Begin, tspans[k].label});
      }
    } else if (k < tspans.size() && i > tspans[k].first && i < tspans[k].last) {
      out.push_back({Action::In, tspans[k].label});
    } else if (k < tspans.size() && i == tspans[k].last) {
      out.push_back({Action::Last, tspans[k].label});
      ++k;
    } else {
      out.push_back({Action::Out, -1});
    }
  }
  return out;
}

std::vector<Span> decode_transitions(const std::vector<TokenSpan>& tokens,
                                     const std::vector<Transition>& transitions,
                                     const LabelSet& labels) {
  ParserState state;
  for (const Transition& t : transitions) {
    if (!is_legal(state, t, tokens.size(), labels.size()))
      throw Error("illegal transition " + transition_name(t, labels) +
                  " at position " + std::to_string(state.position));
    apply(state, t);
  }
  if (state.entity_open()) throw Error("unclosed entity at end of sentence");
  std::vector<Span> spans;
  for (const TokenEntity& e : state.committed)
    spans.push_back({tokens[e.first].start, tokens[e.last_excl - 1].end,
                     labels.labels[e.label]});
  std::sort(spans.begin(), spans.end(),
            [](const Span& a, const Span& b) { return a.start < b.start; });
  return spans;
}

}  // namespace nersynth::ner
