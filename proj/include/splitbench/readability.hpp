#pragma once

// Classic readability formulas (Flesch Reading Ease, Flesch-Kincaid grade,
// Dale-Chall) over sentence-split token streams.

#include <cctype>
#include <cstddef>
#include <filesystem>
#include <fstream>
#include <span>
#include <sstream>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

#include "splitbench/error.hpp"
#include "splitbench/treebank.hpp"

namespace splitbench {

struct TextStats {
  std::size_t sentence_count = 1;
  std::size_t word_count = 1;
  std::size_t syllable_count = 1;
  std::size_t difficult_word_count = 0;
};

/// Dale-Chall list of familiar words.
class EasyWordList {
public:
  EasyWordList() = default;

  explicit EasyWordList(std::unordered_set<std::string> words)
      : words_(std::move(words)) {}

  /// One lowercase word per line; blank lines and '#' comments are ignored.
  static EasyWordList parse(std::string_view text) {
    std::unordered_set<std::string> words;
    std::size_t pos = 0;
    while (pos < text.size()) {
      auto nl = text.find('\n', pos);
      if (nl == std::string_view::npos) nl = text.size();
      std::string_view line = text.substr(pos, nl - pos);
      pos = nl + 1;
      while (!line.empty() && detail::is_space(line.back())) line.remove_suffix(1);
      while (!line.empty() && detail::is_space(line.front())) line.remove_prefix(1);
      if (line.empty() || line.front() == '#') continue;
      std::string w(line);
      for (auto& c : w) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
      words.insert(std::move(w));
    }
    return EasyWordList(std::move(words));
  }

  static EasyWordList load(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot read word list " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse(buf.str());
  }

  std::size_t size() const noexcept { return words_.size(); }

  bool contains(const std::string& w) const { return words_.count(w) != 0; }

  /// True when the word, lowercased, is on the list directly or after
  /// stripping a possessive ('s, s') or a plural -s / -es ending.
  bool is_easy(std::string_view word) const {
    std::string w;
    w.reserve(word.size());
    for (char c : word) w += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    if (contains(w)) return true;
    auto ends_with = [&](std::string_view suffix) {
      return w.size() > suffix.size() &&
             std::string_view(w).substr(w.size() - suffix.size()) == suffix;
    };
    if (ends_with("'s")) return contains(w.substr(0, w.size() - 2));
    if (ends_with("s'")) return contains(w.substr(0, w.size() - 1));
    if (ends_with("es") && contains(w.substr(0, w.size() - 2))) return true;
    if (ends_with("s") && contains(w.substr(0, w.size() - 1))) return true;
    return false;
  }

private:
  std::unordered_set<std::string> words_;
};

/// Vowel-group heuristic: counts maximal runs of a, e, i, o, u, y; a trailing
/// silent 'e' is dropped when another group exists. Never less than 1.
inline std::size_t count_syllables(std::string_view word) {
  std::string w;
  for (char c : word) {
    const auto u = static_cast<unsigned char>(c);
    if (std::isalpha(u)) w += static_cast<char>(std::tolower(u));
  }
  if (w.empty())
    throw ConfigError("cannot count syllables of '" + std::string(word) +
                      "': no alphabetic characters");
  auto vowel = [](char c) {
    return c == 'a' || c == 'e' || c == 'i' || c == 'o' || c == 'u' || c == 'y';
  };
  std::size_t groups = 0;
  bool in_group = false;
  for (char c : w) {
    const bool v = vowel(c);
    if (v && !in_group) ++groups;
    in_group = v;
  }
  // Silent final 'e' forms its own group only when preceded by a consonant.
  if (groups > 1 && w.size() >= 2 && w.back() == 'e' && !vowel(w[w.size() - 2]))
    --groups;
  return groups == 0 ? 1 : groups;
}

/// A token counts as a word when it contains at least one letter.
inline bool is_word_token(std::string_view tok) {
  for (char c : tok)
    if (std::isalpha(static_cast<unsigned char>(c))) return true;
  return false;
}

/// Statistics over pre-segmented sentences (one token list per sentence).
inline TextStats text_stats(std::span<const std::vector<std::string>> sentences,
                            const EasyWordList& easy_words) {
  TextStats s;
  s.sentence_count = sentences.size();
  s.word_count = 0;
  s.syllable_count = 0;
  for (const auto& sentence : sentences) {
    for (const auto& tok : sentence) {
      if (!is_word_token(tok)) continue;
      ++s.word_count;
      s.syllable_count += count_syllables(tok);
      if (!easy_words.is_easy(tok)) ++s.difficult_word_count;
    }
  }
  if (s.sentence_count == 0 || s.word_count == 0)
    throw ValidationError("readability needs at least one sentence with a word");
  return s;
}

inline double flesch_reading_ease(const TextStats& s) {
  const double wps = static_cast<double>(s.word_count) / static_cast<double>(s.sentence_count);
  const double spw = static_cast<double>(s.syllable_count) / static_cast<double>(s.word_count);
  return 206.835 - 1.015 * wps - 84.6 * spw;
}

inline double fk_grade(const TextStats& s) {
  const double wps = static_cast<double>(s.word_count) / static_cast<double>(s.sentence_count);
  const double spw = static_cast<double>(s.syllable_count) / static_cast<double>(s.word_count);
  return 0.39 * wps + 11.8 * spw - 15.59;
}

/// New Dale-Chall raw score, with the 3.6365 adjustment above 5% difficult
/// words.
inline double dale_chall(const TextStats& s) {
  const double pct_difficult = 100.0 * static_cast<double>(s.difficult_word_count) /
                               static_cast<double>(s.word_count);
  const double wps = static_cast<double>(s.word_count) / static_cast<double>(s.sentence_count);
  double score = 0.1579 * pct_difficult + 0.0496 * wps;
  if (pct_difficult > 5.0) score += 3.6365;
  return score;
}

}  // namespace splitbench
