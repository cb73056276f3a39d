#pragma once

// Step 1: run the question generator over every extracted answer span of the
// source text, deduplicate, and keep only questions whose answer the QA
// backend recovers from the source (round-trip filter).

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "gfq/backends.hpp"
#include "gfq/core.hpp"
#include "gfq/treebank.hpp"
#include "gfq/util.hpp"

namespace gfq {

enum class Stage { generated, survived_common_ground, ranked };

inline const char* to_string(Stage s) {
  switch (s) {
    case Stage::generated: return "generated";
    case Stage::survived_common_ground: return "survived_common_ground";
    case Stage::ranked: return "ranked";
  }
  return "?";
}

// (answer-span pre-order position, beam rank); unique per run and the
// tie-break order everywhere downstream.
struct SourceOrder {
  int span_index = 0;
  int beam_rank = 0;

  friend auto operator<=>(const SourceOrder&, const SourceOrder&) = default;
};

struct CandidateQuestion {
  TokenizedText question;
  AnswerSpan target_span;
  SourceOrder source_order;
  std::vector<Stage> stage_history;
  std::optional<int> reveal_score;  // set by ranking

  std::string id() const {
    return "q" + std::to_string(source_order.span_index) + "." +
           std::to_string(source_order.beam_rank);
  }
};

// Harmonic mean of precision/recall over normalized token multisets.
inline double token_f1(const NormalizedPhrase& a, const NormalizedPhrase& b) {
  if (a.empty() && b.empty()) return 1.0;
  if (a.empty() || b.empty()) return 0.0;
  std::map<std::string, int> counts;
  for (const auto& t : a.tokens) ++counts[t];
  int common = 0;
  for (const auto& t : b.tokens) {
    auto it = counts.find(t);
    if (it != counts.end() && it->second > 0) {
      --it->second;
      ++common;
    }
  }
  if (common == 0) return 0.0;
  double precision = static_cast<double>(common) / b.tokens.size();
  double recall = static_cast<double>(common) / a.tokens.size();
  return 2.0 * precision * recall / (precision + recall);
}

struct DroppedCandidate {
  TokenizedText question;
  SourceOrder source_order;
  LabeledSpan span;
  std::string reason;  // duplicate | round_trip_unanswerable | round_trip_f1
  std::optional<SourceOrder> duplicate_of;
  std::optional<double> f1;
  std::optional<TokenizedText> qa_answer;
};

struct GenerationTrace {
  std::vector<SpanExclusion> span_exclusions;
  std::vector<DroppedCandidate> dropped;
  int spans_considered = 0;
};

// Produces Q_T. Candidates come out ordered by source_order; every survivor
// is answerable from the source with token-F1 >= theta against its target.
inline std::vector<CandidateQuestion> generate_candidates(
    const TokenizedText& source, const BackendSuite& suite, double theta,
    GenerationTrace* trace = nullptr) {
  std::vector<ParseTree> trees;
  try {
    trees = suite.parser->parse(source);
  } catch (const BackendError& e) {
    throw StageError("generation", "parsing source text", e.what());
  }
  ExtractionResult extraction = extract_answer_spans_traced(trees);
  if (trace) {
    trace->span_exclusions = extraction.excluded;
    trace->spans_considered = static_cast<int>(extraction.spans.size());
  }

  std::vector<CandidateQuestion> raw;
  for (size_t i = 0; i < extraction.spans.size(); ++i) {
    const AnswerSpan& span = extraction.spans[i];
    std::vector<TokenizedText> questions;
    try {
      questions = suite.qg->generate(source, span);
    } catch (const BackendError& e) {
      throw StageError("generation",
                       "span [" + std::to_string(span.begin) + "," +
                           std::to_string(span.end) + ") '" + span.text.raw +
                           "'",
                       e.what());
    }
    for (size_t rank = 0; rank < questions.size(); ++rank) {
      CandidateQuestion c;
      c.question = questions[rank];
      c.question.role = TextRole::question;
      c.target_span = span;
      c.source_order = {static_cast<int>(i), static_cast<int>(rank)};
      c.stage_history = {Stage::generated};
      raw.push_back(std::move(c));
    }
  }

  // Dedup on normalized question text; the earliest source_order wins.
  std::map<NormalizedPhrase, SourceOrder> first_seen;
  std::vector<CandidateQuestion> unique;
  for (auto& c : raw) {
    NormalizedPhrase key = normalize(c.question);
    auto [it, inserted] = first_seen.emplace(key, c.source_order);
    if (!inserted) {
      if (trace)
        trace->dropped.push_back(
            {c.question,
             c.source_order,
             {c.target_span.label, c.target_span.begin, c.target_span.end},
             "duplicate",
             it->second,
             std::nullopt,
             std::nullopt});
      continue;
    }
    unique.push_back(std::move(c));
  }

  std::vector<CandidateQuestion> kept;
  for (auto& c : unique) {
    QAVerdict verdict;
    try {
      verdict = suite.qa->answer(source, c.question);
    } catch (const BackendError& e) {
      throw StageError("generation",
                       "round-trip for '" + c.question.raw + "'", e.what());
    }
    LabeledSpan where{c.target_span.label, c.target_span.begin,
                      c.target_span.end};
    if (!verdict.answerable()) {
      if (trace)
        trace->dropped.push_back({c.question, c.source_order, where,
                                  "round_trip_unanswerable", std::nullopt,
                                  std::nullopt, std::nullopt});
      continue;
    }
    double f1 =
        token_f1(normalize(c.target_span.text), normalize(verdict.answer_text));
    if (f1 < theta) {
      if (trace)
        trace->dropped.push_back({c.question, c.source_order, where,
                                  "round_trip_f1", std::nullopt, f1,
                                  verdict.answer_text});
      continue;
    }
    kept.push_back(std::move(c));
  }
  return kept;
}

}  // namespace gfq
