#pragma once

// Model capability interfaces (question generation, question answering,
// constituency parsing, NLI) plus deterministic oracle implementations over
// synthetic fact worlds.
//
// A fact world renders each triple (s, a, v) as the sentence
//   "The s has a v ."
// and answers the canonical question
//   "What is the a of the s ?"
// with v. Subjects and attributes are assumed to be single tokens; values
// may span several. That correspondence makes every pipeline stage exactly
// checkable against set algebra on the triples.

#include <algorithm>
#include <fstream>
#include <memory>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "gfq/core.hpp"
#include "gfq/treebank.hpp"
#include "gfq/util.hpp"

namespace gfq {

struct QAVerdict {
  enum class Kind { answer, unanswerable };
  Kind kind = Kind::unanswerable;
  TokenizedText answer_text;  // present iff kind == answer

  bool answerable() const { return kind == Kind::answer; }

  static QAVerdict answered(TokenizedText text) {
    text.role = TextRole::answer;
    return {Kind::answer, std::move(text)};
  }
  static QAVerdict no_answer() { return {}; }
};

enum class NLILabel { entailment, contradiction, neutral };

inline const char* to_string(NLILabel l) {
  switch (l) {
    case NLILabel::entailment: return "entailment";
    case NLILabel::contradiction: return "contradiction";
    case NLILabel::neutral: return "neutral";
  }
  return "?";
}

inline std::optional<NLILabel> nli_label_from_string(std::string_view s) {
  if (s == "entailment") return NLILabel::entailment;
  if (s == "contradiction") return NLILabel::contradiction;
  if (s == "neutral") return NLILabel::neutral;
  return std::nullopt;
}

struct FactTriple {
  std::string subject, attribute, value;

  friend auto operator<=>(const FactTriple&, const FactTriple&) = default;
};

struct FactWorld {
  std::set<FactTriple> facts;

  bool contains(const FactTriple& t) const { return facts.count(t) > 0; }

  bool subset_of(const FactWorld& other) const {
    return std::includes(other.facts.begin(), other.facts.end(),
                         facts.begin(), facts.end());
  }

  void insert(FactTriple t) {
    validate(t);
    facts.insert(std::move(t));
  }

  static void validate(const FactTriple& t) {
    for (const std::string* f : {&t.subject, &t.attribute, &t.value})
      if (f->empty() || f->find('|') != std::string::npos)
        throw DataError("fact fields must be non-empty and '|'-free");
  }
};

// File format: one "subject|attribute|value" per line, '#' comments.
inline FactWorld parse_fact_world(std::string_view content,
                                  const std::string& origin = "<string>") {
  FactWorld world;
  std::istringstream in{std::string(content)};
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    size_t b = line.find_first_not_of(" \t\r");
    if (b == std::string::npos || line[b] == '#') continue;
    size_t e = line.find_last_not_of(" \t\r");
    std::string body = line.substr(b, e - b + 1);
    size_t p1 = body.find('|');
    size_t p2 = p1 == std::string::npos ? std::string::npos
                                        : body.find('|', p1 + 1);
    if (p2 == std::string::npos || body.find('|', p2 + 1) != std::string::npos)
      throw DataError(origin + ":" + std::to_string(lineno) +
                      ": expected subject|attribute|value");
    FactTriple t{body.substr(0, p1), body.substr(p1 + 1, p2 - p1 - 1),
                 body.substr(p2 + 1)};
    try {
      world.insert(std::move(t));
    } catch (const DataError& err) {
      throw DataError(origin + ":" + std::to_string(lineno) + ": " +
                      err.what());
    }
  }
  return world;
}

inline FactWorld load_fact_world(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open fact world file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_fact_world(ss.str(), path);
}

struct RenderedWorld {
  TokenizedText text;            // whole document, role = source
  std::vector<ParseTree> trees;  // one per sentence, tree-local spans
};

namespace detail {

inline ParseTree preterminal(std::string tag, std::string word) {
  ParseTree n;
  n.label = std::move(tag);
  n.token = std::move(word);
  return n;
}

inline ParseTree phrase(std::string label, std::vector<ParseTree> children) {
  ParseTree n;
  n.label = std::move(label);
  n.children = std::move(children);
  return n;
}

inline void append_nn(std::vector<ParseTree>& out, const std::string& field) {
  for (const auto& tok : split_tokens(field))
    out.push_back(preterminal("NN", tok));
}

inline void finish(ParseTree& root) { assign_spans(root, 0); }

}  // namespace detail

// "(S (NP (DT The) (NN s)) (VP (VBZ has) (NP (NN a) (NN v))) (. .))"
inline ParseTree render_fact_tree(const FactTriple& t) {
  std::vector<ParseTree> subj{detail::preterminal("DT", "The")};
  detail::append_nn(subj, t.subject);
  std::vector<ParseTree> obj;
  detail::append_nn(obj, t.attribute);
  detail::append_nn(obj, t.value);
  ParseTree root = detail::phrase(
      "S", {detail::phrase("NP", std::move(subj)),
            detail::phrase("VP", {detail::preterminal("VBZ", "has"),
                                  detail::phrase("NP", std::move(obj))}),
            detail::preterminal(".", ".")});
  detail::finish(root);
  return root;
}

// Sentences follow lexicographic triple order so rendering is deterministic.
inline RenderedWorld render_world(const FactWorld& world) {
  RenderedWorld out;
  out.text.role = TextRole::source;
  for (const auto& t : world.facts) {
    FactWorld::validate(t);
    ParseTree tree = render_fact_tree(t);
    for (const auto& tok : tree.leaves()) out.text.tokens.push_back(tok);
    out.trees.push_back(std::move(tree));
  }
  out.text.raw = out.text.pretokenized();
  return out;
}

// "What is the a of the s ?"
inline TokenizedText canonical_question(const std::string& subject,
                                        const std::string& attribute) {
  TokenizedText q;
  q.role = TextRole::question;
  q.tokens = {"What", "is", "the"};
  for (const auto& t : split_tokens(attribute)) q.tokens.push_back(t);
  q.tokens.push_back("of");
  q.tokens.push_back("the");
  for (const auto& t : split_tokens(subject)) q.tokens.push_back(t);
  q.tokens.push_back("?");
  q.raw = q.pretokenized();
  return q;
}

inline ParseTree canonical_question_tree(const std::string& subject,
                                         const std::string& attribute) {
  std::vector<ParseTree> attr_np{detail::preterminal("DT", "the")};
  detail::append_nn(attr_np, attribute);
  std::vector<ParseTree> subj_np{detail::preterminal("DT", "the")};
  detail::append_nn(subj_np, subject);
  ParseTree root = detail::phrase(
      "SBARQ",
      {detail::phrase("WHNP", {detail::preterminal("WP", "What")}),
       detail::phrase(
           "SQ", {detail::preterminal("VBZ", "is"),
                  detail::phrase(
                      "NP", {detail::phrase("NP", std::move(attr_np)),
                             detail::phrase(
                                 "PP", {detail::preterminal("IN", "of"),
                                        detail::phrase(
                                            "NP", std::move(subj_np))})})}),
       detail::preterminal(".", "?")});
  detail::finish(root);
  return root;
}

namespace detail {

inline std::vector<std::vector<std::string>> split_sentences(
    const std::vector<std::string>& tokens) {
  std::vector<std::vector<std::string>> sentences;
  std::vector<std::string> cur;
  for (const auto& t : tokens) {
    cur.push_back(t);
    if (t == "." || t == "?" || t == "!") {
      sentences.push_back(std::move(cur));
      cur.clear();
    }
  }
  if (!cur.empty()) sentences.push_back(std::move(cur));
  return sentences;
}

// Matches ["The", s, "has", a, v..., "."]; single-token subject/attribute.
inline std::optional<FactTriple> match_fact_sentence(
    const std::vector<std::string>& toks) {
  if (toks.size() < 6) return std::nullopt;
  if (toks.front() != "The" || toks.back() != ".") return std::nullopt;
  if (toks[2] != "has") return std::nullopt;
  FactTriple t;
  t.subject = toks[1];
  t.attribute = toks[3];
  t.value = join_tokens({toks.begin() + 4, toks.end() - 1});
  if (t.value.empty()) return std::nullopt;
  return t;
}

// Matches ["What","is","the", a, "of","the", s, "?"].
inline std::optional<std::pair<std::string, std::string>>
match_canonical_question(const std::vector<std::string>& toks) {
  if (toks.size() != 8) return std::nullopt;
  if (toks[0] != "What" || toks[1] != "is" || toks[2] != "the" ||
      toks[4] != "of" || toks[5] != "the" || toks[7] != "?")
    return std::nullopt;
  return std::make_pair(toks[6], toks[3]);  // (subject, attribute)
}

}  // namespace detail

// Reads the triples back out of rendered text; unmatched sentences contribute
// nothing, so arbitrary student text simply yields a smaller world.
inline FactWorld world_from_text(const TokenizedText& text) {
  FactWorld world;
  for (const auto& sent : detail::split_sentences(text.tokens))
    if (auto t = detail::match_fact_sentence(sent)) world.facts.insert(*t);
  return world;
}

// Oracle capabilities as pure functions over explicit worlds.

inline std::vector<TokenizedText> oracle_questions(const FactWorld& world,
                                                   const AnswerSpan& span) {
  std::vector<TokenizedText> out;
  const std::string span_text = join_tokens(span.text.tokens);
  for (const auto& t : world.facts)
    if (t.value == span_text)
      out.push_back(canonical_question(t.subject, t.attribute));
  return out;
}

inline QAVerdict oracle_answer(const FactWorld& world,
                               const TokenizedText& question) {
  auto target = detail::match_canonical_question(question.tokens);
  if (!target) return QAVerdict::no_answer();
  for (const auto& t : world.facts)
    if (t.subject == target->first && t.attribute == target->second)
      return QAVerdict::answered(tokenize(t.value, TextRole::answer));
  return QAVerdict::no_answer();
}

// Entailment iff the hypothesis facts are a subset of the premise facts.
// The oracle never reports contradiction.
inline NLILabel oracle_entailment(const FactWorld& premise,
                                  const FactWorld& hypothesis) {
  return hypothesis.subset_of(premise) ? NLILabel::entailment
                                       : NLILabel::neutral;
}

// Capability interfaces. Implementations must be safe for concurrent calls.

class QuestionGenerator {
 public:
  virtual ~QuestionGenerator() = default;
  virtual std::vector<TokenizedText> generate(const TokenizedText& text,
                                              const AnswerSpan& span) = 0;
};

class QuestionAnswerer {
 public:
  virtual ~QuestionAnswerer() = default;
  virtual QAVerdict answer(const TokenizedText& text,
                           const TokenizedText& question) = 0;
};

class ConstituencyParser {
 public:
  virtual ~ConstituencyParser() = default;
  virtual std::vector<ParseTree> parse(const TokenizedText& text) = 0;
};

class EntailmentClassifier {
 public:
  virtual ~EntailmentClassifier() = default;
  virtual NLILabel classify(const TokenizedText& premise,
                            const TokenizedText& hypothesis) = 0;
};

struct BackendDescriptor {
  std::string name;
  std::string version;
};

struct BackendSuite {
  std::shared_ptr<QuestionGenerator> qg;
  std::shared_ptr<QuestionAnswerer> qa;
  std::shared_ptr<ConstituencyParser> parser;
  std::shared_ptr<EntailmentClassifier> nli;
  BackendDescriptor descriptor;
};

namespace detail {

class OracleQG : public QuestionGenerator {
 public:
  std::vector<TokenizedText> generate(const TokenizedText& text,
                                      const AnswerSpan& span) override {
    return oracle_questions(world_from_text(text), span);
  }
};

class OracleQA : public QuestionAnswerer {
 public:
  QAVerdict answer(const TokenizedText& text,
                   const TokenizedText& question) override {
    return oracle_answer(world_from_text(text), question);
  }
};

class OracleParser : public ConstituencyParser {
 public:
  std::vector<ParseTree> parse(const TokenizedText& text) override {
    std::vector<ParseTree> out;
    for (const auto& sent : split_sentences(text.tokens)) {
      if (auto fact = match_fact_sentence(sent)) {
        out.push_back(render_fact_tree(*fact));
      } else if (auto q = match_canonical_question(sent)) {
        out.push_back(canonical_question_tree(q->first, q->second));
      } else {
        out.push_back(flat_tree(sent));
      }
    }
    return out;
  }

 private:
  // Fallback for text outside the oracle templates.
  static ParseTree flat_tree(const std::vector<std::string>& toks) {
    ParseTree root;
    root.label = "S";
    for (const auto& t : toks)
      root.children.push_back(
          preterminal(is_punctuation_token(t) ? t : "XX", t));
    finish(root);
    return root;
  }
};

class OracleNLI : public EntailmentClassifier {
 public:
  NLILabel classify(const TokenizedText& premise,
                    const TokenizedText& hypothesis) override {
    return oracle_entailment(world_from_text(premise),
                             world_from_text(hypothesis));
  }
};

}  // namespace detail

inline BackendSuite make_oracle_suite() {
  BackendSuite suite;
  suite.qg = std::make_shared<detail::OracleQG>();
  suite.qa = std::make_shared<detail::OracleQA>();
  suite.parser = std::make_shared<detail::OracleParser>();
  suite.nli = std::make_shared<detail::OracleNLI>();
  suite.descriptor = {"oracle", "1"};
  return suite;
}

}  // namespace gfq
