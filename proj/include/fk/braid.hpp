// Braid words, closure diagrams, sign assignments (inversion data),
// convergence certification by exact rational LP, inversion-data search, and
// corpus ingestion.
#ifndef FK_BRAID_HPP
#define FK_BRAID_HPP

#include <gmpxx.h>

#include <optional>
#include <string>
#include <vector>

#include "fk/qexp.hpp"

namespace fk {

struct BraidWord {
    int strands{1};
    // (position k in [1, strands-1], sign in {+1,-1}), read bottom to top.
    std::vector<std::pair<int, int>> letters;

    std::string str() const;
};

// text: whitespace-separated signed integers ("1 -2 1 -2") or tokens
// "s1 s2^-1 ...".  If strands == 0 it is inferred as max position + 1.
BraidWord parse_braid(const std::string& text, int strands = 0);

struct Crossing {
    int sign;               // +1 for sigma_k, -1 for sigma_k^{-1}
    int i, j, ip, jp;       // segment ids: bottom-left, bottom-right, top-left, top-right
    int pos;                // 0-based braid position k-1
};

// Braid-closure diagram with the leftmost strand opened.
struct Diagram {
    BraidWord word;
    int strands{1};
    int nseg{1};
    std::vector<Crossing> crossings;
    std::vector<int> segcomp;                    // component label per segment
    int ncomp{1};
    std::vector<std::pair<int, int>> closure_pairs; // (top segment, bottom segment)
    int open_bot{0}, open_top{0};
    int open_comp{0};
    std::vector<int> column;                     // 1-based column per segment
};

Diagram build_diagram(const BraidWord& word);

// +1/-1 per segment id.
using SignAssignment = std::vector<int>;

// Homogeneous-braid assignment (j/j' segments of a column get the column's
// crossing sign; first column +).  Empty optional if some position mixes
// crossing signs.
std::optional<SignAssignment> homogeneous_signs(const Diagram& d);

// Condition (a): at every crossing #incoming minus signs == #outgoing; and
// closure-paired segments carry equal signs.
bool condition_a(const Diagram& d, const SignAssignment& s);

struct ConvergenceCertificate {
    // Linear functional over segment state variables (one exact rational
    // coefficient per segment; inverted segments measured by k_inv >= 0): a
    // lower bound on the total x^{-1}-degree of any state.
    std::vector<QExp> functional;
    // LP optimum of the functional over the normalized recession cone
    // (sum of variables = 1); strictly positive, or +infinity when the cone
    // is trivial (cone_trivial = true).
    QExp optimum;
    bool cone_trivial{false};

    // Largest admissible sum of state variables for states that can reach
    // total x-degree >= -(x_order + 1), including the closure-factor lift.
    std::int64_t state_cap(const Diagram& d, QExp x_order) const;
};

std::optional<ConvergenceCertificate> certify_convergence(const Diagram& d,
                                                          const SignAssignment& s);

// Enumerates condition-(a) assignments (crossing-local pruning, deterministic
// order) and keeps those passing certify_convergence.
std::vector<SignAssignment> search_inversion(const Diagram& d, int max_results);

enum class SignMode { definition, multicycle };

// definition: #negative columns + #all-minus negative-crossing blocks
// (requires a homogeneous assignment); multicycle: closed components of the
// minus-signed segments following strands through crossings.
int sign_exponent_s(const Diagram& d, const SignAssignment& s, SignMode mode);

struct CorpusEntry {
    std::string name;
    BraidWord word;
    // Optional per-crossing corner codes over {p,m} in (i,j,i',j') order.
    std::vector<std::string> corner_codes;
    bool has_codes{false};
};

// TSV: name <tab> braid word <tab> optional comma-separated corner codes.
std::vector<CorpusEntry> load_corpus(const std::string& path);

// Convert validated corner codes to a segment sign assignment; throws on
// segment-inconsistency or a condition-(a) violation (message names the
// offending crossing index).
SignAssignment signs_from_corner_codes(const Diagram& d,
                                       const std::vector<std::string>& codes);

} // namespace fk

#endif
