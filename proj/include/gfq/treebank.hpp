#pragma once

// Bracketed constituency trees and candidate answer-span extraction.
//
// Extraction drops, in order:
//   R1  constituents covering every non-punctuation token of their sentence
//   R2  single-token spans with a functional (closed-class) tag, or whose
//       token is an auxiliary/copula
//   R3  duplicate intervals, keeping the highest (first pre-order) node

#include <fstream>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

#include "gfq/core.hpp"
#include "gfq/util.hpp"

namespace gfq {

struct ParseTree {
  std::string label;
  int begin = 0;  // half-open leaf interval [begin, end), local to the tree
  int end = 0;
  std::vector<ParseTree> children;
  std::string token;  // preterminal word; empty for internal nodes

  bool is_preterminal() const { return children.empty(); }
  int size() const { return end - begin; }

  std::vector<std::string> leaves() const {
    std::vector<std::string> out;
    collect_leaves(out);
    return out;
  }

  std::string to_bracketed() const {
    std::string out;
    write_bracketed(out);
    return out;
  }

 private:
  void collect_leaves(std::vector<std::string>& out) const {
    if (is_preterminal()) {
      out.push_back(token);
      return;
    }
    for (const auto& c : children) c.collect_leaves(out);
  }
  void write_bracketed(std::string& out) const {
    out += '(';
    out += label;
    if (is_preterminal()) {
      out += ' ';
      out += token;
    } else {
      for (const auto& c : children) {
        out += ' ';
        c.write_bracketed(out);
      }
    }
    out += ')';
  }
};

class TreeParseError : public DataError {
 public:
  TreeParseError(size_t offset, const std::string& msg)
      : DataError("tree parse error at offset " + std::to_string(offset) +
                  ": " + msg),
        offset_(offset) {}
  size_t offset() const { return offset_; }

 private:
  size_t offset_;
};

namespace detail {

inline void skip_ws(std::string_view s, size_t& i) {
  while (i < s.size() && std::isspace(static_cast<unsigned char>(s[i]))) ++i;
}

inline std::string read_atom(std::string_view s, size_t& i) {
  size_t b = i;
  while (i < s.size() && !std::isspace(static_cast<unsigned char>(s[i])) &&
         s[i] != '(' && s[i] != ')')
    ++i;
  return std::string(s.substr(b, i - b));
}

inline ParseTree parse_node(std::string_view s, size_t& i) {
  skip_ws(s, i);
  if (i >= s.size()) throw TreeParseError(i, "unexpected end of input");
  if (s[i] != '(')
    throw TreeParseError(i, std::string("expected '(', found '") + s[i] + "'");
  ++i;
  skip_ws(s, i);
  ParseTree node;
  node.label = read_atom(s, i);
  if (node.label.empty()) throw TreeParseError(i, "missing node label");
  skip_ws(s, i);
  if (i >= s.size()) throw TreeParseError(i, "unexpected end of input");
  if (s[i] == '(') {
    while (i < s.size() && s[i] == '(') {
      node.children.push_back(parse_node(s, i));
      skip_ws(s, i);
    }
    if (i >= s.size())
      throw TreeParseError(i, "unexpected end of input, unbalanced '('");
  } else if (s[i] == ')') {
    throw TreeParseError(i, "node has neither word nor children");
  } else {
    node.token = read_atom(s, i);
    skip_ws(s, i);
  }
  if (i >= s.size() || s[i] != ')')
    throw TreeParseError(i, "unexpected end of input, expected ')'");
  ++i;
  return node;
}

inline int assign_spans(ParseTree& node, int next_leaf) {
  node.begin = next_leaf;
  if (node.is_preterminal()) {
    node.end = next_leaf + 1;
    return node.end;
  }
  for (auto& c : node.children) next_leaf = assign_spans(c, next_leaf);
  node.end = next_leaf;
  return next_leaf;
}

}  // namespace detail

inline ParseTree parse_bracketed(std::string_view s) {
  size_t i = 0;
  ParseTree root = detail::parse_node(s, i);
  detail::skip_ws(s, i);
  if (i != s.size())
    throw TreeParseError(i, "trailing content after closing ')'");
  detail::assign_spans(root, 0);
  return root;
}

// Fixture format: one bracketed tree per line, '#' comments and blank lines
// ignored.
inline std::vector<ParseTree> load_trees(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open tree file: " + path);
  std::vector<ParseTree> out;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    size_t b = line.find_first_not_of(" \t\r");
    if (b == std::string::npos || line[b] == '#') continue;
    try {
      out.push_back(parse_bracketed(line));
    } catch (const TreeParseError& e) {
      throw DataError(path + ":" + std::to_string(lineno) + ": " + e.what());
    }
  }
  return out;
}

struct LabeledSpan {
  std::string label;
  int begin = 0;
  int end = 0;

  friend bool operator==(const LabeledSpan&, const LabeledSpan&) = default;
};

inline void enumerate_constituents(const ParseTree& tree,
                                   std::vector<LabeledSpan>& out) {
  out.push_back({tree.label, tree.begin, tree.end});
  for (const auto& c : tree.children) enumerate_constituents(c, out);
}

inline std::vector<LabeledSpan> enumerate_constituents(const ParseTree& tree) {
  std::vector<LabeledSpan> out;
  enumerate_constituents(tree, out);
  return out;
}

inline bool is_punctuation_tag(std::string_view tag) {
  static const std::unordered_set<std::string_view> tags = {
      ".",     ",",     ":",     ";",     "!",    "?",    "``",  "''",
      "-LRB-", "-RRB-", "-LSB-", "-RSB-", "-LCB-", "-RCB-", "HYPH",
      "PUNC",  "PUNCT", "NFP",   "SYM",   "$",    "#"};
  if (tags.count(tag)) return true;
  return is_punctuation_token(tag);
}

// Closed-class single-token exclusion set; punctuation tags are also excluded.
inline bool is_closed_class_tag(std::string_view tag) {
  static const std::unordered_set<std::string_view> tags = {
      "DT", "PDT", "IN",  "TO", "CC",  "POS",  "RP",  "EX",
      "MD", "PRP", "PRP$", "WDT", "WP", "WP$", "WRB", "UH"};
  return tags.count(tag) > 0 || is_punctuation_tag(tag);
}

// Auxiliaries and copulas; verb tags alone cannot tell these apart from
// content verbs.
inline bool is_auxiliary_word(std::string_view word) {
  static const std::unordered_set<std::string> words = {
      "is",   "are",  "was",   "were", "am",    "be",   "been",  "being",
      "do",   "does", "did",   "have", "has",   "had",  "will",  "would",
      "can",  "could", "shall", "should", "may", "might", "must"};
  return words.count(unicode::lower(unicode::nfc(word))) > 0;
}

// A candidate answer span: a surviving constituent of the source parse.
// Intervals are global across the document's sentences.
struct AnswerSpan {
  int begin = 0;
  int end = 0;
  TokenizedText text;  // role = answer
  std::string label;
  int order_index = 0;  // position in the document pre-order among survivors
};

enum class ExclusionRule { r1_full_sentence, r2_functional, r3_duplicate };

inline const char* to_string(ExclusionRule r) {
  switch (r) {
    case ExclusionRule::r1_full_sentence: return "R1";
    case ExclusionRule::r2_functional: return "R2";
    case ExclusionRule::r3_duplicate: return "R3";
  }
  return "?";
}

struct SpanExclusion {
  LabeledSpan span;  // global interval
  ExclusionRule rule;
};

struct ExtractionResult {
  std::vector<AnswerSpan> spans;
  std::vector<SpanExclusion> excluded;
};

namespace detail {

inline void punctuation_leaf_mask(const ParseTree& node,
                                  std::vector<bool>& mask) {
  if (node.is_preterminal()) {
    mask.push_back(is_punctuation_tag(node.label));
    return;
  }
  for (const auto& c : node.children) punctuation_leaf_mask(c, mask);
}

struct ExtractOptions {
  bool drop_full_sentence = true;  // R1 off when scoring question parses
};

// Walks one sentence tree; offset shifts intervals into document space.
inline void extract_from_tree(const ParseTree& tree, int offset,
                              const ExtractOptions& opt,
                              ExtractionResult& result,
                              std::set<std::pair<int, int>>& seen,
                              int& order_counter) {
  std::vector<std::string> leaves = tree.leaves();
  std::vector<bool> punct;
  punct.reserve(leaves.size());
  punctuation_leaf_mask(tree, punct);

  std::vector<const ParseTree*> stack{&tree};
  std::vector<const ParseTree*> preorder;
  while (!stack.empty()) {
    const ParseTree* n = stack.back();
    stack.pop_back();
    preorder.push_back(n);
    for (auto it = n->children.rbegin(); it != n->children.rend(); ++it)
      stack.push_back(&*it);
  }

  for (const ParseTree* n : preorder) {
    LabeledSpan global{n->label, n->begin + offset, n->end + offset};
    // R1: span covers the sentence's full non-punctuation extent.
    if (opt.drop_full_sentence) {
      bool covers = true;
      for (size_t i = 0; i < punct.size(); ++i) {
        if (!punct[i] &&
            (static_cast<int>(i) < n->begin || static_cast<int>(i) >= n->end)) {
          covers = false;
          break;
        }
      }
      if (covers) {
        result.excluded.push_back({global, ExclusionRule::r1_full_sentence});
        continue;
      }
    }
    // R2: degenerate single-token spans.
    if (n->size() == 1) {
      const std::string& word = leaves[static_cast<size_t>(n->begin)];
      if (is_closed_class_tag(n->label) || is_auxiliary_word(word)) {
        result.excluded.push_back({global, ExclusionRule::r2_functional});
        continue;
      }
    }
    // R3: interval already emitted by a higher node.
    if (!seen.emplace(global.begin, global.end).second) {
      result.excluded.push_back({global, ExclusionRule::r3_duplicate});
      continue;
    }
    AnswerSpan span;
    span.begin = global.begin;
    span.end = global.end;
    span.label = n->label;
    span.order_index = order_counter++;
    span.text.tokens.assign(leaves.begin() + n->begin, leaves.begin() + n->end);
    span.text.raw = join_tokens(span.text.tokens);
    span.text.role = TextRole::answer;
    result.spans.push_back(std::move(span));
  }
}

inline ExtractionResult extract_spans(const std::vector<ParseTree>& trees,
                                      const ExtractOptions& opt) {
  ExtractionResult result;
  std::set<std::pair<int, int>> seen;
  int offset = 0;
  int order = 0;
  for (const auto& t : trees) {
    extract_from_tree(t, offset, opt, result, seen, order);
    offset += t.size();
  }
  return result;
}

}  // namespace detail

inline ExtractionResult extract_answer_spans_traced(
    const std::vector<ParseTree>& trees) {
  return detail::extract_spans(trees, {});
}

inline std::vector<AnswerSpan> extract_answer_spans(
    const std::vector<ParseTree>& trees) {
  return detail::extract_spans(trees, {}).spans;
}

inline std::vector<AnswerSpan> extract_answer_spans(const ParseTree& tree) {
  return extract_answer_spans(std::vector<ParseTree>{tree});
}

// Constituents of a question parse for reveal scoring: R2 and R3 apply, R1
// does not (a question's root is a legitimate constituent of itself).
inline std::vector<AnswerSpan> question_constituents(
    const std::vector<ParseTree>& trees) {
  detail::ExtractOptions opt;
  opt.drop_full_sentence = false;
  return detail::extract_spans(trees, opt).spans;
}

}  // namespace gfq
