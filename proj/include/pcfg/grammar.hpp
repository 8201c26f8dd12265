#ifndef PCFG_GRAMMAR_HPP
#define PCFG_GRAMMAR_HPP

#include <array>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace pcfg {

using VarId = int;

// Ordered set of terminal symbols (single characters).
class Alphabet {
public:
    explicit Alphabet(std::string_view symbols);

    int size() const { return static_cast<int>(symbols_.size()); }
    char symbol(int i) const { return symbols_[i]; }
    // -1 if the character is not a terminal of this alphabet.
    int index(char c) const { return index_[static_cast<unsigned char>(c)]; }
    const std::string& symbols() const { return symbols_; }

    bool operator==(const Alphabet& o) const { return symbols_ == o.symbols_; }

private:
    std::string symbols_;
    std::array<int, 256> index_;
};

// Variables are dense ids: lexical variables first [0, n_lex), then
// structural [n_lex, n_lex + n_struct). The start symbol is structural.
class VariableSet {
public:
    VariableSet(int n_lex, int n_struct, std::vector<std::string> names = {});

    int n_lexical() const { return n_lex_; }
    int n_structural() const { return n_struct_; }
    int total() const { return n_lex_ + n_struct_; }
    VarId start() const { return n_lex_; }   // first structural variable
    bool is_lexical(VarId v) const { return v < n_lex_; }
    const std::string& name(VarId v) const { return names_[v]; }
    // -1 if no variable has this name.
    VarId id_of(std::string_view name) const;

    bool operator==(const VariableSet& o) const;

private:
    int n_lex_;
    int n_struct_;
    std::vector<std::string> names_;
};

// A → a (lexical, terminal ≥ 0) or B → C D (structural, left/right ≥ 0).
struct Rule {
    VarId lhs = -1;
    int terminal = -1;
    VarId left = -1;
    VarId right = -1;

    static Rule lexical(VarId lhs, int terminal) { return Rule{lhs, terminal, -1, -1}; }
    static Rule structural(VarId lhs, VarId left, VarId right) { return Rule{lhs, -1, left, right}; }
    bool is_lexical() const { return terminal >= 0; }

    bool operator==(const Rule& o) const {
        return lhs == o.lhs && terminal == o.terminal && left == o.left && right == o.right;
    }
};

// Fixed bipartite-CNF rule set. Rules are stored in canonical order
// (lhs id, then terminal index or (left,right) ids), so genome index i
// <-> rule i is deterministic.
class RuleSet {
public:
    RuleSet(Alphabet alphabet, VariableSet vars, std::vector<Rule> rules);

    const Alphabet& alphabet() const { return alphabet_; }
    const VariableSet& vars() const { return vars_; }
    const std::vector<Rule>& rules() const { return rules_; }
    int size() const { return static_cast<int>(rules_.size()); }
    const Rule& rule(int i) const { return rules_[i]; }

    // Contiguous [begin, end) range of rules headed by v.
    std::pair<int, int> lhs_range(VarId v) const { return lhs_ranges_[v]; }

private:
    Alphabet alphabet_;
    VariableSet vars_;
    std::vector<Rule> rules_;
    std::vector<std::pair<int, int>> lhs_ranges_;
};

// All bipartite-CNF rules over n_lex lexical and n_struct structural
// variables: n_lex*|alphabet| lexical plus n_struct*(n_lex+n_struct)^2
// structural rules.
RuleSet build_covering_ruleset(const Alphabet& alphabet, int n_lex, int n_struct);

// Index-aligned with RuleSet.rules; proper (sums to 1 per lhs).
struct ProbabilityAssignment {
    std::vector<double> probs;
};

// GA individual: one gene in [0,1] per rule.
struct Genome {
    std::vector<double> genes;
};

struct Pcfg {
    Pcfg(RuleSet rs, ProbabilityAssignment th, double properness_tol = 1e-6);

    RuleSet ruleset;
    ProbabilityAssignment theta;
};

// Per-lhs proportional normalization; a group whose genes sum to 0 gets
// the uniform distribution so the grammar stays proper.
ProbabilityAssignment normalize_to_proper(const Genome& z, const RuleSet& rs);

// Number of rules with probability strictly above threshold.
int active_rule_count(const ProbabilityAssignment& theta, double threshold);

// Text dump, one rule per line: "LHS -> RHS  p=<prob>", canonical order,
// 17 significant digits so round-trips are exact.
std::string dump_grammar(const Pcfg& g);
void dump_grammar(const Pcfg& g, std::ostream& os);

// Parses a dump back. Lexical/structural variables are recovered from the
// rule forms; the start symbol is the first structural lhs in the file.
Pcfg parse_grammar_dump(std::istream& is, double properness_tol = 1e-6);
Pcfg parse_grammar_dump(const std::string& text, double properness_tol = 1e-6);

}  // namespace pcfg

#endif
