#pragma once

// Human-evaluation harness: export rating tasks, import 1-5 rater scores,
// aggregate per-model means, and compare models with the Wilcoxon
// signed-rank test (exact below n=26, normal approximation above).

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "gfq/core.hpp"
#include "gfq/util.hpp"

namespace gfq {

enum class ModelId { step1, step2, step3, human };

inline const char* to_string(ModelId m) {
  switch (m) {
    case ModelId::step1: return "step1";
    case ModelId::step2: return "step2";
    case ModelId::step3: return "step3";
    case ModelId::human: return "human";
  }
  return "?";
}

inline std::optional<ModelId> model_id_from_string(std::string_view s) {
  if (s == "step1") return ModelId::step1;
  if (s == "step2") return ModelId::step2;
  if (s == "step3") return ModelId::step3;
  if (s == "human") return ModelId::human;
  return std::nullopt;
}

struct RatingTask {
  std::string pair_id;
  std::string source_text;
  std::string student_text;
  ModelId model = ModelId::step1;
  std::string question;
};

struct RatingRecord {
  std::string pair_id;
  ModelId model = ModelId::step1;
  std::string question;
  std::string rater_id;
  int score = 0;  // 1..5
};

namespace detail {

inline std::string tsv_escape(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  for (char c : s) {
    switch (c) {
      case '\t': out += "\\t"; break;
      case '\n': out += "\\n"; break;
      case '\r': out += "\\r"; break;
      case '\\': out += "\\\\"; break;
      default: out += c;
    }
  }
  return out;
}

inline std::string tsv_unescape(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  for (size_t i = 0; i < s.size(); ++i) {
    if (s[i] == '\\' && i + 1 < s.size()) {
      switch (s[++i]) {
        case 't': out += '\t'; break;
        case 'n': out += '\n'; break;
        case 'r': out += '\r'; break;
        case '\\': out += '\\'; break;
        default: out += '\\'; out += s[i];
      }
    } else {
      out += s[i];
    }
  }
  return out;
}

inline std::vector<std::string> tsv_fields(const std::string& line) {
  std::vector<std::string> out;
  size_t start = 0;
  for (size_t i = 0; i <= line.size(); ++i) {
    if (i == line.size() || line[i] == '\t') {
      out.push_back(line.substr(start, i - start));
      start = i + 1;
    }
  }
  return out;
}

}  // namespace detail

// Writes one tab-separated row per task under a header. With blind_seed the
// presentation order is a seeded shuffle, so raters cannot read model
// identity off row position; fields are unchanged.
inline size_t export_rating_tasks(std::vector<RatingTask> tasks,
                                  const std::string& path,
                                  std::optional<std::uint64_t> blind_seed =
                                      std::nullopt) {
  if (blind_seed) {
    std::uint64_t state = *blind_seed;
    for (size_t i = tasks.size(); i > 1; --i)
      std::swap(tasks[i - 1],
                tasks[static_cast<size_t>(splitmix64_next(state) % i)]);
  }
  std::ofstream out(path);
  if (!out) throw IoError("cannot write rating tasks: " + path);
  out << "pair_id\tsource_text\tstudent_text\tmodel_id\tquestion\n";
  for (const auto& t : tasks) {
    out << detail::tsv_escape(t.pair_id) << '\t'
        << detail::tsv_escape(t.source_text) << '\t'
        << detail::tsv_escape(t.student_text) << '\t' << to_string(t.model)
        << '\t' << detail::tsv_escape(t.question) << '\n';
  }
  if (!out) throw IoError("write failed: " + path);
  return tasks.size();
}

inline std::vector<RatingTask> load_rating_tasks(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open rating tasks: " + path);
  std::string header;
  if (!std::getline(in, header))
    throw DataError(path + ": empty rating task file");
  std::vector<std::string> cols = detail::tsv_fields(header);
  std::map<std::string, size_t> col_index;
  for (size_t i = 0; i < cols.size(); ++i) col_index[cols[i]] = i;
  for (const char* req :
       {"pair_id", "source_text", "student_text", "model_id", "question"})
    if (!col_index.count(req))
      throw DataError(path + ": missing column " + req);

  std::vector<RatingTask> tasks;
  std::string line;
  int lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::vector<std::string> f = detail::tsv_fields(line);
    if (f.size() < cols.size())
      throw DataError(path + ":" + std::to_string(lineno) + ": short row");
    RatingTask t;
    t.pair_id = detail::tsv_unescape(f[col_index["pair_id"]]);
    t.source_text = detail::tsv_unescape(f[col_index["source_text"]]);
    t.student_text = detail::tsv_unescape(f[col_index["student_text"]]);
    auto model = model_id_from_string(f[col_index["model_id"]]);
    if (!model)
      throw DataError(path + ":" + std::to_string(lineno) +
                      ": unknown model_id " + f[col_index["model_id"]]);
    t.model = *model;
    t.question = detail::tsv_unescape(f[col_index["question"]]);
    tasks.push_back(std::move(t));
  }
  return tasks;
}

struct RatingsLoadResult {
  std::vector<RatingRecord> records;
  std::vector<LineErrorRef> errors;
};

// Rating files carry at least pair_id, model_id, question, rater_id, score;
// column order is free. Bad rows are collected, not fatal.
inline RatingsLoadResult load_ratings(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open ratings file: " + path);
  std::string header;
  if (!std::getline(in, header)) throw DataError(path + ": empty ratings file");
  std::vector<std::string> cols = detail::tsv_fields(header);
  std::map<std::string, size_t> col_index;
  for (size_t i = 0; i < cols.size(); ++i) col_index[cols[i]] = i;
  for (const char* req :
       {"pair_id", "model_id", "question", "rater_id", "score"})
    if (!col_index.count(req))
      throw DataError(path + ": missing column " + req);

  RatingsLoadResult result;
  std::string line;
  int lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::vector<std::string> f = detail::tsv_fields(line);
    if (f.size() < cols.size()) {
      result.errors.push_back({lineno, "short row"});
      continue;
    }
    RatingRecord r;
    r.pair_id = detail::tsv_unescape(f[col_index["pair_id"]]);
    auto model = model_id_from_string(f[col_index["model_id"]]);
    if (!model) {
      result.errors.push_back(
          {lineno, "unknown model_id " + f[col_index["model_id"]]});
      continue;
    }
    r.model = *model;
    r.question = detail::tsv_unescape(f[col_index["question"]]);
    r.rater_id = detail::tsv_unescape(f[col_index["rater_id"]]);
    try {
      r.score = std::stoi(f[col_index["score"]]);
    } catch (const std::exception&) {
      result.errors.push_back({lineno, "non-numeric score"});
      continue;
    }
    if (r.score < 1 || r.score > 5) {
      result.errors.push_back(
          {lineno, "score out of range: " + std::to_string(r.score)});
      continue;
    }
    result.records.push_back(std::move(r));
  }
  return result;
}

struct ModelScore {
  ModelId model = ModelId::step1;
  int question_count = 0;
  double mean = 0.0;  // mean over question-level rater means
  int excluded_questions = 0;
};

struct PairwiseTest {
  ModelId model_a = ModelId::step1;
  ModelId model_b = ModelId::step1;
  double w = 0.0;
  double p = 1.0;
  int n_effective = 0;
};

struct ScoreTable {
  std::vector<ModelScore> models;
  std::vector<PairwiseTest> tests;
};

inline std::string format_mean(double mean) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", mean);
  return buf;
}

namespace detail {

using QuestionKey = std::tuple<ModelId, std::string, std::string>;

inline std::map<QuestionKey, std::vector<int>> group_by_question(
    const std::vector<RatingRecord>& records) {
  std::map<QuestionKey, std::vector<int>> groups;
  for (const auto& r : records)
    groups[{r.model, r.pair_id, r.question}].push_back(r.score);
  return groups;
}

}  // namespace detail

// Per model: mean of per-question rater means. Under a balanced design this
// equals the grand mean of ratings.
inline ScoreTable aggregate_scores(const std::vector<RatingRecord>& records) {
  auto groups = detail::group_by_question(records);
  std::map<ModelId, std::pair<int, double>> acc;  // count, sum of means
  std::map<ModelId, int> excluded;
  for (const auto& [key, scores] : groups) {
    ModelId model = std::get<0>(key);
    if (scores.empty()) {
      ++excluded[model];
      continue;
    }
    double sum = 0;
    for (int s : scores) sum += s;
    auto& [count, total] = acc[model];
    ++count;
    total += sum / scores.size();
  }
  ScoreTable table;
  for (const auto& [model, ct] : acc) {
    ModelScore ms;
    ms.model = model;
    ms.question_count = ct.first;
    ms.mean = ct.first ? ct.second / ct.first : 0.0;
    ms.excluded_questions = excluded.count(model) ? excluded[model] : 0;
    table.models.push_back(ms);
  }
  return table;
}

enum class Sidedness { two_sided, one_sided_greater };

struct WilcoxonResult {
  double w = 0.0;       // sum of ranks of positive differences
  double p = 1.0;
  int n_effective = 0;  // nonzero differences
  bool exact = false;
};

namespace detail {

// Average ranks of |d|, ties sharing their group mean. Returned doubled so
// all ranks are integers (a tie group's mean is a half-integer at worst).
inline std::vector<long> doubled_ranks(const std::vector<double>& absd) {
  size_t n = absd.size();
  std::vector<size_t> order(n);
  for (size_t i = 0; i < n; ++i) order[i] = i;
  std::sort(order.begin(), order.end(),
            [&](size_t a, size_t b) { return absd[a] < absd[b]; });
  std::vector<long> r2(n, 0);
  size_t i = 0;
  while (i < n) {
    size_t j = i;
    while (j < n && absd[order[j]] == absd[order[i]]) ++j;
    long doubled = static_cast<long>(i + 1 + j);  // 2 * (lo + hi) / 2
    for (size_t k = i; k < j; ++k) r2[order[k]] = doubled;
    i = j;
  }
  return r2;
}

// Exact null distribution of the doubled rank sum: dist[s] counts sign
// assignments whose positive doubled-ranks sum to s. 2^n fits a double
// exactly for the n <= 25 regime this runs in.
inline std::vector<double> signed_rank_distribution(
    const std::vector<long>& r2) {
  long total = 0;
  for (long r : r2) total += r;
  std::vector<double> dist(static_cast<size_t>(total) + 1, 0.0);
  dist[0] = 1.0;
  long reached = 0;
  for (long r : r2) {
    reached += r;
    for (long s = reached; s >= r; --s) dist[static_cast<size_t>(s)] +=
        dist[static_cast<size_t>(s - r)];
  }
  return dist;
}

inline double normal_upper_tail(double z) {
  return 0.5 * std::erfc(z / std::sqrt(2.0));
}

}  // namespace detail

inline WilcoxonResult wilcoxon_signed_rank(
    const std::vector<double>& x, const std::vector<double>& y,
    Sidedness sidedness = Sidedness::two_sided) {
  if (x.size() != y.size())
    throw std::invalid_argument("wilcoxon: paired samples differ in length");
  if (x.empty()) throw std::invalid_argument("wilcoxon: empty samples");

  std::vector<double> d;
  d.reserve(x.size());
  for (size_t i = 0; i < x.size(); ++i)
    if (x[i] != y[i]) d.push_back(x[i] - y[i]);
  if (d.empty()) throw std::domain_error("wilcoxon: no nonzero differences");

  size_t n = d.size();
  std::vector<double> absd(n);
  for (size_t i = 0; i < n; ++i) absd[i] = std::fabs(d[i]);
  std::vector<long> r2 = detail::doubled_ranks(absd);

  long w2 = 0;
  for (size_t i = 0; i < n; ++i)
    if (d[i] > 0) w2 += r2[i];

  WilcoxonResult result;
  result.w = w2 / 2.0;
  result.n_effective = static_cast<int>(n);

  if (n <= 25) {
    result.exact = true;
    std::vector<double> dist = detail::signed_rank_distribution(r2);
    double total = std::ldexp(1.0, static_cast<int>(n));  // 2^n
    double ge = 0, le = 0;
    for (size_t s = 0; s < dist.size(); ++s) {
      if (static_cast<long>(s) >= w2) ge += dist[s];
      if (static_cast<long>(s) <= w2) le += dist[s];
    }
    double pg = ge / total, pl = le / total;
    result.p = sidedness == Sidedness::one_sided_greater
                   ? pg
                   : std::min(1.0, 2.0 * std::min(pg, pl));
    return result;
  }

  // Normal approximation with tie correction and continuity correction.
  double dn = static_cast<double>(n);
  double mean = dn * (dn + 1.0) / 4.0;
  double var = dn * (dn + 1.0) * (2.0 * dn + 1.0) / 24.0;
  std::map<long, int> tie_sizes;
  for (long r : r2) ++tie_sizes[r];
  for (const auto& [rank, t] : tie_sizes)
    var -= (static_cast<double>(t) * t * t - t) / 48.0;
  double sd = std::sqrt(var);
  double w = result.w;
  if (sidedness == Sidedness::one_sided_greater) {
    result.p = detail::normal_upper_tail((w - mean - 0.5) / sd);
  } else {
    double z = (std::fabs(w - mean) - 0.5) / sd;
    if (z < 0) z = 0;
    result.p = std::min(1.0, 2.0 * detail::normal_upper_tail(z));
  }
  return result;
}

// Pairs per-question rater means (or raw ratings with per_rating) shared by
// both models, keyed by pair id (plus rater id in per-rating mode).
inline PairwiseTest compare_models(const std::vector<RatingRecord>& records,
                                   ModelId a, ModelId b,
                                   Sidedness sidedness = Sidedness::two_sided,
                                   bool per_rating = false) {
  std::vector<double> xs, ys;
  if (per_rating) {
    std::map<std::tuple<std::string, std::string>,
             std::pair<std::optional<double>, std::optional<double>>>
        paired;
    for (const auto& r : records) {
      if (r.model != a && r.model != b) continue;
      auto& slot = paired[{r.pair_id, r.rater_id}];
      if (r.model == a)
        slot.first = r.score;
      else
        slot.second = r.score;
    }
    for (const auto& [key, v] : paired)
      if (v.first && v.second) {
        xs.push_back(*v.first);
        ys.push_back(*v.second);
      }
  } else {
    std::map<std::string, std::pair<std::optional<double>, std::optional<double>>>
        paired;
    auto groups = detail::group_by_question(records);
    for (const auto& [key, scores] : groups) {
      auto [model, pair_id, question] = key;
      if ((model != a && model != b) || scores.empty()) continue;
      double sum = 0;
      for (int s : scores) sum += s;
      double mean = sum / scores.size();
      auto& slot = paired[pair_id];
      if (model == a)
        slot.first = mean;
      else
        slot.second = mean;
    }
    for (const auto& [key, v] : paired)
      if (v.first && v.second) {
        xs.push_back(*v.first);
        ys.push_back(*v.second);
      }
  }
  WilcoxonResult w = wilcoxon_signed_rank(xs, ys, sidedness);
  return {a, b, w.w, w.p, w.n_effective};
}

}  // namespace gfq
