#pragma once

// NLI corpus ingestion: line-delimited records in the SNLI field layout
// (sentence1, sentence2, gold_label, pairID). The evaluation set keeps
// gold-entailment pairs whose reverse direction is not entailed, so the
// premise strictly out-informs the hypothesis.

#include <algorithm>
#include <cstdint>
#include <fstream>
#include <istream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "gfq/backends.hpp"
#include "gfq/core.hpp"
#include "gfq/util.hpp"

namespace gfq {

struct EntailmentPair {
  std::string pair_id;
  TokenizedText premise;     // T_C, the complete text
  TokenizedText hypothesis;  // T_S, the student text
  NLILabel gold_label = NLILabel::neutral;
};

struct LineError {
  int line = 0;
  std::string message;
};

struct CorpusLoadResult {
  std::vector<EntailmentPair> pairs;
  int skipped_no_consensus = 0;  // gold_label "-"
  std::vector<LineError> errors;
};

inline CorpusLoadResult parse_pairs(std::istream& in) {
  CorpusLoadResult result;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    nlohmann::json doc = nlohmann::json::parse(line, nullptr, false);
    if (doc.is_discarded()) {
      result.errors.push_back({lineno, "invalid json"});
      continue;
    }
    std::string missing;
    for (const char* field : {"sentence1", "sentence2", "gold_label", "pairID"})
      if (!doc.contains(field) || !doc[field].is_string()) {
        missing = field;
        break;
      }
    if (!missing.empty()) {
      result.errors.push_back({lineno, "missing field " + missing});
      continue;
    }
    std::string label = doc["gold_label"].get<std::string>();
    if (label == "-") {
      ++result.skipped_no_consensus;
      continue;
    }
    auto parsed = nli_label_from_string(label);
    if (!parsed) {
      result.errors.push_back({lineno, "unknown gold_label '" + label + "'"});
      continue;
    }
    EntailmentPair pair;
    pair.pair_id = doc["pairID"].get<std::string>();
    pair.premise = tokenize(doc["sentence1"].get<std::string>(),
                            TextRole::source);
    pair.hypothesis = tokenize(doc["sentence2"].get<std::string>(),
                               TextRole::student);
    pair.gold_label = *parsed;
    result.pairs.push_back(std::move(pair));
  }
  return result;
}

inline CorpusLoadResult load_pairs(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open corpus file: " + path);
  return parse_pairs(in);
}

inline std::vector<EntailmentPair> filter_entailed(
    const std::vector<EntailmentPair>& pairs) {
  std::vector<EntailmentPair> out;
  for (const auto& p : pairs)
    if (p.gold_label == NLILabel::entailment) out.push_back(p);
  return out;
}

struct BidirectionalDrop {
  EntailmentPair pair;
  NLILabel reverse_label = NLILabel::entailment;
};

struct BidirectionalResult {
  std::vector<EntailmentPair> kept;
  std::vector<BidirectionalDrop> dropped;
};

// Drops a pair iff the reverse direction (hypothesis as premise) is also
// entailed. Forward gold labels are trusted; only the reverse runs the model.
inline BidirectionalResult filter_bidirectional(
    const std::vector<EntailmentPair>& pairs, const BackendSuite& suite) {
  BidirectionalResult result;
  for (const auto& p : pairs) {
    NLILabel reverse;
    try {
      reverse = suite.nli->classify(p.hypothesis, p.premise);
    } catch (const BackendError& e) {
      throw StageError("corpus", "pair " + p.pair_id, e.what());
    }
    if (reverse == NLILabel::entailment) {
      result.dropped.push_back({p, reverse});
    } else {
      result.kept.push_back(p);
    }
  }
  return result;
}

// Seeded sampling as a separate step; output keeps corpus order.
inline std::vector<EntailmentPair> sample_pairs(
    const std::vector<EntailmentPair>& pairs, size_t n, std::uint64_t seed) {
  if (n >= pairs.size()) return pairs;
  std::vector<size_t> idx(pairs.size());
  for (size_t i = 0; i < idx.size(); ++i) idx[i] = i;
  std::uint64_t state = seed;
  for (size_t i = 0; i < n; ++i) {
    size_t j = i + static_cast<size_t>(splitmix64_next(state) %
                                       (idx.size() - i));
    std::swap(idx[i], idx[j]);
  }
  idx.resize(n);
  std::sort(idx.begin(), idx.end());
  std::vector<EntailmentPair> out;
  out.reserve(n);
  for (size_t i : idx) out.push_back(pairs[i]);
  return out;
}

}  // namespace gfq
