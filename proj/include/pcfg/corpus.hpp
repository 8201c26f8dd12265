#ifndef PCFG_CORPUS_HPP
#define PCFG_CORPUS_HPP

#include <filesystem>
#include <string>
#include <vector>

namespace pcfg {

// A sentence is a string of single-character terminal symbols.
using Sentence = std::string;

struct Corpus {
    std::vector<Sentence> sentences;

    bool empty() const { return sentences.empty(); }
    size_t size() const { return sentences.size(); }
    size_t total_letters() const;
};

enum class CorpusFormat { Plain, Fasta };

// Plain: one sentence per line, blank lines ignored.
// Fasta: '>' lines start a record, sequence lines are concatenated.
Corpus read_corpus(const std::filesystem::path& path, CorpusFormat format = CorpusFormat::Plain);
Corpus parse_corpus(const std::string& text, CorpusFormat format = CorpusFormat::Plain);
void write_corpus(const Corpus& corpus, const std::filesystem::path& path,
                  CorpusFormat format = CorpusFormat::Plain);

// Sorted distinct characters across all sentences (for file-derived alphabets).
std::string distinct_symbols(const Corpus& corpus);

// IO failures carry the offending path; mapped to exit code 4 by the CLI.
struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace pcfg

#endif
