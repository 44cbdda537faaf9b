// Writes a small synthetic corpus (triples, judgments, config) for trying the
// command-line tool without the released data.
//
//   make_synthetic_corpus <dir> [triples] [seed]

#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <string>

#include "support/synthetic_corpus.hpp"

int main(int argc, char** argv) {
  if (argc < 2) {
    std::cerr << "usage: make_synthetic_corpus <dir> [triples] [seed]\n";
    return 1;
  }
  splitbench::testing::CorpusOptions opts;
  if (argc > 2) opts.triples = std::stoul(argv[2]);
  if (argc > 3) opts.seed = std::stoull(argv[3]);
  const auto words =
      std::filesystem::absolute(std::filesystem::path(SPLITBENCH_DATA_DIR) / "dale_chall_easy_words.txt");
  const auto f = splitbench::testing::write_corpus(argv[1], opts, words);
  std::cout << "wrote " << f.triples.string() << "\n"
            << "wrote " << f.judgments.string() << "\n"
            << "wrote " << f.config.string() << "\n";
  return 0;
}
