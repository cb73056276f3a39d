#pragma once

// End-to-end orchestration of the three stages, plus the output-selection
// modes the paper compares: step1 picks a seeded-random candidate from Q_T,
// step2 the first survivor of Q_G, step3 the top-ranked survivor.

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "gfq/backends.hpp"
#include "gfq/gap_filter.hpp"
#include "gfq/generation.hpp"
#include "gfq/ranking.hpp"
#include "gfq/util.hpp"

namespace gfq {

enum class SelectionMode { step1, step2, step3 };

inline const char* to_string(SelectionMode m) {
  switch (m) {
    case SelectionMode::step1: return "step1";
    case SelectionMode::step2: return "step2";
    case SelectionMode::step3: return "step3";
  }
  return "?";
}

inline std::optional<SelectionMode> selection_mode_from_string(
    std::string_view s) {
  if (s == "step1") return SelectionMode::step1;
  if (s == "step2") return SelectionMode::step2;
  if (s == "step3") return SelectionMode::step3;
  return std::nullopt;
}

enum class BackendKind { oracle, remote };

inline const char* to_string(BackendKind k) {
  return k == BackendKind::oracle ? "oracle" : "remote";
}

struct PipelineConfig {
  SelectionMode mode = SelectionMode::step3;
  std::uint64_t seed = 0;
  double theta = 0.6;  // round-trip token-F1 threshold
  BackendKind backends = BackendKind::oracle;
  std::string remote_url;

  void validate() const {
    if (theta < 0.0 || theta > 1.0)
      throw std::invalid_argument("theta must lie in [0,1]");
  }
};

enum class PipelineStatus { ok, no_gap };

inline const char* to_string(PipelineStatus s) {
  return s == PipelineStatus::ok ? "ok" : "no_gap";
}

struct PipelineTraces {
  GenerationTrace generation;
  GapFilterTrace gap_filter;
  std::vector<RevealTrace> reveal;
};

struct PipelineResult {
  PipelineStatus status = PipelineStatus::no_gap;
  std::vector<CandidateQuestion> q_t;
  std::vector<CandidateQuestion> q_g;
  std::vector<CandidateQuestion> ranked;
  std::optional<CandidateQuestion> selected;
  PipelineTraces traces;
  PipelineConfig config;
  BackendDescriptor backend;
};

// Pure selection over an already-populated result.
inline std::optional<CandidateQuestion> select_output(
    const PipelineResult& result, const PipelineConfig& config) {
  switch (config.mode) {
    case SelectionMode::step1: {
      if (result.q_t.empty()) return std::nullopt;
      SplitMix64 rng{config.seed};
      return result.q_t[rng.next() % result.q_t.size()];
    }
    case SelectionMode::step2:
      if (result.q_g.empty()) return std::nullopt;
      return result.q_g.front();
    case SelectionMode::step3:
      if (result.ranked.empty()) return std::nullopt;
      return result.ranked.front();
  }
  return std::nullopt;
}

// Runs generation -> gap filter -> ranking. Reveal scoring (and its parser
// fan-out) only happens in step3 mode; step1/step2 carry Q_G through
// unscored. Empty candidate sets are a no_gap status, never an error.
inline PipelineResult run(const TokenizedText& source,
                          const TokenizedText& student,
                          const PipelineConfig& config,
                          const BackendSuite& suite) {
  config.validate();
  if (source.empty()) throw std::invalid_argument("source text is empty");

  PipelineResult result;
  result.config = config;
  result.backend = suite.descriptor;

  result.q_t =
      generate_candidates(source, suite, config.theta, &result.traces.generation);
  result.q_g = filter_common_ground(result.q_t, student, suite,
                                    &result.traces.gap_filter);
  if (config.mode == SelectionMode::step3 && !result.q_g.empty()) {
    result.ranked = rank_candidates(result.q_g, suite, &result.traces.reveal);
  } else {
    result.ranked = result.q_g;
  }

  const auto& relevant =
      config.mode == SelectionMode::step1 ? result.q_t : result.q_g;
  result.status =
      relevant.empty() ? PipelineStatus::no_gap : PipelineStatus::ok;
  if (result.status == PipelineStatus::ok)
    result.selected = select_output(result, config);
  return result;
}

}  // namespace gfq
