#pragma once

// Triples, Turker judgments and their JSONL ingestion.

#include <cstddef>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "json.hpp"
#include "splitbench/error.hpp"
#include "splitbench/treebank.hpp"

namespace splitbench {

enum class Origin { bart, human };
enum class Question { s_vs_a, s_vs_b, a_vs_b };
enum class Choice { first, second, not_sure };
enum class SideId { a, b };

inline std::string_view to_string(Origin o) { return o == Origin::bart ? "bart" : "human"; }

inline std::string_view to_string(Question q) {
  switch (q) {
    case Question::s_vs_a: return "S_vs_A";
    case Question::s_vs_b: return "S_vs_B";
    case Question::a_vs_b: return "A_vs_B";
  }
  return "?";
}

inline std::string_view to_string(Choice c) {
  switch (c) {
    case Choice::first: return "first";
    case Choice::second: return "second";
    case Choice::not_sure: return "not_sure";
  }
  return "?";
}

struct TextSide {
  std::string text;
  std::vector<ParseTree> trees;
  std::vector<DepGraph> deps;  // empty when no CoNLL-U was supplied
  Origin origin = Origin::human;
};

/// A source sentence with its two-sentence (A) and three-sentence (B) splits.
struct Triple {
  std::string id;
  TextSide source;
  TextSide a;
  TextSide b;
  std::map<std::string, double> precomputed;

  const TextSide& side(SideId s) const { return s == SideId::a ? a : b; }
};

struct QualityScores {
  int grammar = 0;
  int meaning = 0;
  int fluency = 0;
};

struct JudgmentRecord {
  std::string triple_id;
  std::string worker_id;
  Question question = Question::a_vs_b;
  Choice choice = Choice::not_sure;
  std::optional<QualityScores> scores_a;
  std::optional<QualityScores> scores_b;

  const std::optional<QualityScores>& scores(SideId s) const {
    return s == SideId::a ? scores_a : scores_b;
  }
};

struct Dataset {
  std::vector<Triple> triples;
  std::vector<JudgmentRecord> judgments;

  const Triple& triple(const std::string& id) const {
    auto it = index_.find(id);
    if (it == index_.end()) throw IntegrityError("unknown triple id '" + id + "'");
    return triples[it->second];
  }

  bool has_triple(const std::string& id) const { return index_.count(id) != 0; }

  void reindex() {
    index_.clear();
    for (std::size_t i = 0; i < triples.size(); ++i) {
      if (!index_.emplace(triples[i].id, i).second)
        throw IntegrityError("duplicate triple id '" + triples[i].id + "'");
    }
  }

private:
  std::unordered_map<std::string, std::size_t> index_;
};

namespace detail {

using nlohmann::json;

inline std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

template <typename Fn>
void for_each_jsonl(std::string_view text, const std::string& source, Fn&& fn) {
  std::size_t pos = 0;
  std::size_t line_no = 0;
  while (pos < text.size()) {
    auto nl = text.find('\n', pos);
    if (nl == std::string_view::npos) nl = text.size();
    std::string_view line = text.substr(pos, nl - pos);
    pos = nl + 1;
    ++line_no;
    while (!line.empty() && is_space(line.back())) line.remove_suffix(1);
    while (!line.empty() && is_space(line.front())) line.remove_prefix(1);
    if (line.empty()) continue;
    json obj;
    try {
      obj = json::parse(line);
    } catch (const json::parse_error& e) {
      throw ParseError(source + ":" + std::to_string(line_no) + ": " + e.what(),
                       static_cast<std::size_t>(line.data() - text.data()));
    }
    if (!obj.is_object())
      throw ValidationError(source + ":" + std::to_string(line_no) + ": expected a JSON object");
    try {
      if (obj.contains("schema") && obj["schema"] != 1)
        throw ValidationError("unsupported schema " + obj["schema"].dump());
      fn(obj);
    } catch (const json::exception& e) {
      throw ValidationError(source + ":" + std::to_string(line_no) + ": " + e.what());
    } catch (const ValidationError& e) {
      throw ValidationError(source + ":" + std::to_string(line_no) + ": " + e.what());
    } catch (const ParseError& e) {
      throw ValidationError(source + ":" + std::to_string(line_no) + ": " + e.what());
    }
  }
}

inline std::vector<ParseTree> read_trees(const json& side, const char* name,
                                         const PtbOptions& opts) {
  std::vector<ParseTree> trees;
  for (const auto& s : side.at("ptb")) {
    auto parsed = parse_ptb(s.get<std::string>(), opts);
    for (auto& t : parsed) trees.push_back(std::move(t));
  }
  if (trees.empty()) throw ValidationError(std::string(name) + " has no parse trees");
  return trees;
}

inline int read_score(const json& obj, const char* key) {
  const auto& v = obj.at(key);
  if (!v.is_number_integer() && !(v.is_number() && v.get<double>() == static_cast<int>(v.get<double>())))
    throw ValidationError(std::string("score '") + key + "' must be an integer, got " + v.dump());
  const int s = static_cast<int>(v.get<double>());
  if (s < 1 || s > 5)
    throw ValidationError(std::string("score '") + key + "' must be in 1..5, got " + v.dump());
  return s;
}

inline QualityScores read_scores(const json& obj) {
  return {read_score(obj, "grammar"), read_score(obj, "meaning"), read_score(obj, "fluency")};
}

}  // namespace detail

inline std::vector<Triple> parse_triples(std::string_view text, const PtbOptions& opts = {},
                                         const std::string& source = "triples") {
  std::vector<Triple> out;
  detail::for_each_jsonl(text, source, [&](const nlohmann::json& obj) {
    Triple t;
    t.id = obj.at("id").get<std::string>();
    const auto& src = obj.at("source");
    const auto& a = obj.at("a");
    const auto& b = obj.at("b");
    t.source.text = src.value("text", "");
    t.a.text = a.value("text", "");
    t.b.text = b.value("text", "");
    t.source.trees = detail::read_trees(src, "source", opts);
    t.a.trees = detail::read_trees(a, "a", opts);
    t.b.trees = detail::read_trees(b, "b", opts);
    if (t.a.trees.size() != 2)
      throw ValidationError("triple '" + t.id + "': split a must have 2 sentences, found " +
                            std::to_string(t.a.trees.size()));
    if (t.b.trees.size() != 3)
      throw ValidationError("triple '" + t.id + "': split b must have 3 sentences, found " +
                            std::to_string(t.b.trees.size()));
    const auto origin = a.value("origin", std::string("human"));
    if (origin == "bart") t.a.origin = Origin::bart;
    else if (origin == "human" || origin == "hum") t.a.origin = Origin::human;
    else throw ValidationError("triple '" + t.id + "': unknown origin '" + origin + "'");
    if (b.contains("origin") && b["origin"] != "human" && b["origin"] != "hum")
      throw ValidationError("triple '" + t.id + "': split b must be human-written");

    if (obj.contains("conllu") && !obj["conllu"].is_null()) {
      const auto& c = obj["conllu"];
      auto load = [&](const char* key, TextSide& side) {
        if (!c.contains(key) || c[key].is_null()) return;
        side.deps = parse_conllu(c[key].get<std::string>());
        if (side.deps.size() != side.trees.size())
          throw ValidationError("triple '" + t.id + "': " + key + " has " +
                                std::to_string(side.trees.size()) + " trees but " +
                                std::to_string(side.deps.size()) + " dependency graphs");
      };
      load("source", t.source);
      load("a", t.a);
      load("b", t.b);
    }
    if (obj.contains("precomputed") && obj["precomputed"].is_object()) {
      for (const auto& [k, v] : obj["precomputed"].items()) {
        if (v.is_null()) continue;
        if (!v.is_number())
          throw ValidationError("triple '" + t.id + "': precomputed '" + k + "' is not a number");
        t.precomputed[k] = v.get<double>();
      }
    }
    out.push_back(std::move(t));
  });
  return out;
}

inline Question parse_question(const std::string& q) {
  if (q == "S_vs_A") return Question::s_vs_a;
  if (q == "S_vs_B") return Question::s_vs_b;
  if (q == "A_vs_B") return Question::a_vs_b;
  throw ValidationError("unknown question '" + q + "'");
}

inline Choice parse_choice(const std::string& c) {
  if (c == "first") return Choice::first;
  if (c == "second") return Choice::second;
  if (c == "not_sure") return Choice::not_sure;
  throw ValidationError("unknown choice '" + c + "'");
}

/// Judgment records; A_vs_B records must carry quality scores for both sides.
inline std::vector<JudgmentRecord> parse_judgments(std::string_view text,
                                                   const std::string& source = "judgments") {
  std::vector<JudgmentRecord> out;
  detail::for_each_jsonl(text, source, [&](const nlohmann::json& obj) {
    JudgmentRecord r;
    r.triple_id = obj.at("triple_id").get<std::string>();
    const auto& w = obj.at("worker_id");
    r.worker_id = w.is_string() ? w.get<std::string>() : w.dump();
    r.question = parse_question(obj.at("question").get<std::string>());
    r.choice = parse_choice(obj.at("choice").get<std::string>());
    if (obj.contains("scores") && !obj["scores"].is_null()) {
      const auto& s = obj["scores"];
      if (s.contains("a")) r.scores_a = detail::read_scores(s["a"]);
      if (s.contains("b")) r.scores_b = detail::read_scores(s["b"]);
    }
    if (r.question == Question::a_vs_b && (!r.scores_a || !r.scores_b))
      throw ValidationError("A_vs_B judgment for '" + r.triple_id + "' by '" + r.worker_id +
                            "' lacks quality scores");
    out.push_back(std::move(r));
  });
  return out;
}

/// Enforces that every judgment names a known triple.
inline Dataset make_dataset(std::vector<Triple> triples, std::vector<JudgmentRecord> judgments) {
  Dataset ds;
  ds.triples = std::move(triples);
  ds.judgments = std::move(judgments);
  ds.reindex();
  for (const auto& j : ds.judgments)
    if (!ds.has_triple(j.triple_id))
      throw IntegrityError("judgment by '" + j.worker_id + "' references unknown triple '" +
                           j.triple_id + "'");
  return ds;
}

inline Dataset ingest(const std::filesystem::path& judgments_path,
                      const std::filesystem::path& triples_path, const PtbOptions& opts = {}) {
  auto triples = parse_triples(detail::read_file(triples_path), opts, triples_path.string());
  auto judgments = parse_judgments(detail::read_file(judgments_path), judgments_path.string());
  return make_dataset(std::move(triples), std::move(judgments));
}

}  // namespace splitbench
