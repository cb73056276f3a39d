#pragma once

// Step 2: common-ground removal. A candidate survives iff the QA backend
// finds its question unanswerable from the student text. Any answer at all,
// right or wrong, counts as common ground.

#include <vector>

#include "gfq/backends.hpp"
#include "gfq/generation.hpp"
#include "gfq/util.hpp"

namespace gfq {

struct RemovedCandidate {
  TokenizedText question;
  SourceOrder source_order;
  TokenizedText qa_answer;  // the student-text answer that caused removal
};

struct GapFilterTrace {
  std::vector<RemovedCandidate> removed;
};

// Produces Q_G: an order-preserving subsequence of the input.
inline std::vector<CandidateQuestion> filter_common_ground(
    const std::vector<CandidateQuestion>& candidates,
    const TokenizedText& student, const BackendSuite& suite,
    GapFilterTrace* trace = nullptr) {
  std::vector<CandidateQuestion> survivors;
  for (const auto& c : candidates) {
    QAVerdict verdict;
    try {
      verdict = suite.qa->answer(student, c.question);
    } catch (const BackendError& e) {
      throw StageError("gap_filter", "question '" + c.question.raw + "'",
                       e.what());
    }
    if (verdict.answerable()) {
      if (trace)
        trace->removed.push_back(
            {c.question, c.source_order, verdict.answer_text});
      continue;
    }
    CandidateQuestion kept = c;
    kept.stage_history.push_back(Stage::survived_common_ground);
    survivors.push_back(std::move(kept));
  }
  return survivors;
}

}  // namespace gfq
