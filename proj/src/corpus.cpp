#include "pcfg/corpus.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

namespace pcfg {

size_t Corpus::total_letters() const {
    size_t n = 0;
    for (const Sentence& s : sentences) n += s.size();
    return n;
}

namespace {

std::string strip_cr(std::string line) {
    while (!line.empty() && (line.back() == '\r' || line.back() == '\n')) line.pop_back();
    return line;
}

Corpus parse_stream(std::istream& is, CorpusFormat format) {
    Corpus corpus;
    std::string line;
    std::string current;
    bool in_record = false;
    while (std::getline(is, line)) {
        line = strip_cr(line);
        if (format == CorpusFormat::Plain) {
            if (!line.empty()) corpus.sentences.push_back(line);
        } else {
            if (!line.empty() && line[0] == '>') {
                if (in_record && !current.empty()) corpus.sentences.push_back(current);
                current.clear();
                in_record = true;
            } else if (!line.empty()) {
                current += line;
            }
        }
    }
    if (format == CorpusFormat::Fasta && in_record && !current.empty())
        corpus.sentences.push_back(current);
    return corpus;
}

}  // namespace

Corpus parse_corpus(const std::string& text, CorpusFormat format) {
    std::istringstream is(text);
    return parse_stream(is, format);
}

Corpus read_corpus(const std::filesystem::path& path, CorpusFormat format) {
    std::ifstream is(path);
    if (!is)
        throw IoError("cannot open corpus file: " + path.string());
    return parse_stream(is, format);
}

void write_corpus(const Corpus& corpus, const std::filesystem::path& path, CorpusFormat format) {
    std::ofstream os(path);
    if (!os)
        throw IoError("cannot write corpus file: " + path.string());
    for (size_t i = 0; i < corpus.sentences.size(); ++i) {
        if (format == CorpusFormat::Fasta) os << ">seq" << i << '\n';
        os << corpus.sentences[i] << '\n';
    }
}

std::string distinct_symbols(const Corpus& corpus) {
    std::set<char> chars;
    for (const Sentence& s : corpus.sentences) chars.insert(s.begin(), s.end());
    return std::string(chars.begin(), chars.end());
}

}  // namespace pcfg
