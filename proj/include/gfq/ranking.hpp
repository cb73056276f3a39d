#pragma once

// Step 3: order Q_G so the first question reveals the least information the
// student does not already know. A question's reveal score counts its
// constituents (distinct normalized texts) contained in R, the set of target
// answers of the surviving candidates.

#include <algorithm>
#include <limits>
#include <set>
#include <vector>

#include "gfq/backends.hpp"
#include "gfq/core.hpp"
#include "gfq/generation.hpp"
#include "gfq/treebank.hpp"

namespace gfq {

// Sentinel for questions whose parse failed; sorts after every real score.
inline constexpr int kUnparseableScore = std::numeric_limits<int>::max();

struct RevealTrace {
  std::string question_id;
  std::vector<NormalizedPhrase> constituents_checked;  // distinct, in order
  std::vector<NormalizedPhrase> matched;
  int score = 0;
  bool parse_failed = false;
};

// R: normalized target answers of the Step-2 survivors.
inline std::set<NormalizedPhrase> build_reveal_set(
    const std::vector<CandidateQuestion>& candidates) {
  std::set<NormalizedPhrase> out;
  for (const auto& c : candidates) out.insert(normalize(c.target_span.text));
  return out;
}

inline int reveal_score(const CandidateQuestion& candidate,
                        const std::set<NormalizedPhrase>& reveal_set,
                        const BackendSuite& suite,
                        RevealTrace* trace = nullptr) {
  if (trace) {
    *trace = {};
    trace->question_id = candidate.id();
  }
  std::vector<ParseTree> trees;
  try {
    trees = suite.parser->parse(candidate.question);
  } catch (const std::exception&) {
    if (trace) {
      trace->parse_failed = true;
      trace->score = kUnparseableScore;
    }
    return kUnparseableScore;
  }

  std::set<NormalizedPhrase> seen;
  int score = 0;
  for (const AnswerSpan& span : question_constituents(trees)) {
    NormalizedPhrase phrase = normalize(span.text);
    if (phrase.empty() || !seen.insert(phrase).second) continue;
    if (trace) trace->constituents_checked.push_back(phrase);
    bool hit = std::any_of(
        reveal_set.begin(), reveal_set.end(),
        [&](const NormalizedPhrase& r) { return contains(r, phrase); });
    if (hit) {
      ++score;
      if (trace) trace->matched.push_back(phrase);
    }
  }
  if (trace) trace->score = score;
  return score;
}

// Stable sort by (reveal score, source order); scores recorded on the
// candidates, a `ranked` tag appended.
inline std::vector<CandidateQuestion> rank_candidates(
    const std::vector<CandidateQuestion>& candidates,
    const BackendSuite& suite, std::vector<RevealTrace>* traces = nullptr) {
  std::set<NormalizedPhrase> reveal_set = build_reveal_set(candidates);
  std::vector<CandidateQuestion> out = candidates;
  for (auto& c : out) {
    RevealTrace trace;
    c.reveal_score = reveal_score(c, reveal_set, suite,
                                  traces ? &trace : nullptr);
    c.stage_history.push_back(Stage::ranked);
    if (traces) traces->push_back(std::move(trace));
  }
  std::stable_sort(out.begin(), out.end(),
                   [](const CandidateQuestion& a, const CandidateQuestion& b) {
                     if (*a.reveal_score != *b.reveal_score)
                       return *a.reveal_score < *b.reveal_score;
                     return a.source_order < b.source_order;
                   });
  return out;
}

}  // namespace gfq
