#include "fk/braid.hpp"

#include <algorithm>
#include <cctype>
#include <functional>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>

namespace fk {

// --- parsing -----------------------------------------------------------------

std::string BraidWord::str() const {
    std::ostringstream out;
    bool first = true;
    for (auto [k, s] : letters) {
        if (!first) out << " ";
        first = false;
        out << (s > 0 ? k : -k);
    }
    return out.str();
}

BraidWord parse_braid(const std::string& text, int strands) {
    BraidWord w;
    std::istringstream in(text);
    std::string tok;
    int maxpos = 0;
    while (in >> tok) {
        int val = 0;
        if (tok[0] == 's' || tok[0] == 'S') {
            // "s2" or "s2^-1"
            auto caret = tok.find('^');
            int k = std::stoi(tok.substr(1, caret == std::string::npos ? tok.size() - 1
                                                                       : caret - 1));
            int e = caret == std::string::npos ? 1 : std::stoi(tok.substr(caret + 1));
            if (e != 1 && e != -1)
                throw std::invalid_argument("parse_braid: only exponent +-1 per token");
            val = e > 0 ? k : -k;
        } else {
            val = std::stoi(tok);
        }
        if (val == 0) throw std::invalid_argument("parse_braid: position 0");
        int k = val > 0 ? val : -val;
        maxpos = std::max(maxpos, k);
        w.letters.emplace_back(k, val > 0 ? 1 : -1);
    }
    w.strands = strands > 0 ? strands : std::max(maxpos + 1, 1);
    for (auto [k, s] : w.letters)
        if (k >= w.strands)
            throw std::invalid_argument("parse_braid: position out of range");
    return w;
}

// --- diagram -----------------------------------------------------------------

Diagram build_diagram(const BraidWord& word) {
    Diagram d;
    d.word = word;
    d.strands = word.strands;
    const int S = d.strands;
    std::vector<int> cur(S);
    for (int p = 0; p < S; ++p) cur[p] = p;
    int nseg = S;
    for (auto [k1, sign] : word.letters) {
        int k = k1 - 1;
        Crossing c;
        c.sign = sign;
        c.pos = k;
        c.i = cur[k];
        c.j = cur[k + 1];
        c.ip = nseg++;
        c.jp = nseg++;
        cur[k] = c.ip;
        cur[k + 1] = c.jp;
        d.crossings.push_back(c);
    }
    d.nseg = nseg;
    // permutation of strand positions
    std::vector<int> strand_at(S);
    for (int p = 0; p < S; ++p) strand_at[p] = p;
    for (auto [k1, sign] : word.letters) std::swap(strand_at[k1 - 1], strand_at[k1]);
    std::vector<int> endpos(S);
    for (int p = 0; p < S; ++p) endpos[strand_at[p]] = p;
    // components = cycles of p -> endpos[p]
    std::vector<int> comp(S, -1);
    int nc = 0;
    for (int p = 0; p < S; ++p) {
        if (comp[p] >= 0) continue;
        int c = nc++;
        int q = p;
        while (comp[q] < 0) {
            comp[q] = c;
            q = endpos[q];
        }
    }
    d.ncomp = nc;
    // component per segment: the bottom-left strand of a crossing exits at the
    // top-right corner (i -> j'), the bottom-right at the top-left (j -> i').
    d.segcomp.assign(nseg, -1);
    for (int p = 0; p < S; ++p) d.segcomp[p] = comp[p];
    for (const auto& c : d.crossings) {
        d.segcomp[c.jp] = d.segcomp[c.i];
        d.segcomp[c.ip] = d.segcomp[c.j];
    }
    // closure: top position p joins bottom position p, except the open
    // leftmost strand.
    std::vector<int> top(S);
    for (int p = 0; p < S; ++p) top[p] = p;
    {
        std::vector<int> posseg(S);
        for (int p = 0; p < S; ++p) posseg[p] = p;
        for (const auto& c : d.crossings) {
            posseg[c.pos] = c.ip;
            posseg[c.pos + 1] = c.jp;
        }
        top = posseg;
    }
    for (int p = 1; p < S; ++p) d.closure_pairs.emplace_back(top[p], p);
    d.open_bot = 0;
    d.open_top = top[0];
    d.open_comp = comp[0];
    // columns: bottom segment p lives in column p+1; a crossing at position k
    // puts i,i' in column k+1 and j,j' in column k+2 (1-based).
    d.column.assign(nseg, 0);
    for (int p = 0; p < S; ++p) d.column[p] = p + 1;
    for (const auto& c : d.crossings) {
        d.column[c.ip] = c.pos + 1;
        d.column[c.jp] = c.pos + 2;
    }
    return d;
}

std::optional<SignAssignment> homogeneous_signs(const Diagram& d) {
    std::map<int, int> colsign; // 1-based braid position -> crossing sign
    for (auto [k, s] : d.word.letters) {
        auto [it, fresh] = colsign.emplace(k, s);
        if (!fresh && it->second != s) return std::nullopt;
    }
    SignAssignment sign(d.nseg, 1);
    for (int seg = 0; seg < d.nseg; ++seg) {
        int c = d.column[seg];
        if (c == 1) continue;
        auto it = colsign.find(c - 1);
        sign[seg] = (it == colsign.end()) ? 1 : it->second;
    }
    return sign;
}

bool condition_a(const Diagram& d, const SignAssignment& s) {
    for (const auto& c : d.crossings) {
        int in_minus = (s[c.i] < 0) + (s[c.j] < 0);
        int out_minus = (s[c.ip] < 0) + (s[c.jp] < 0);
        if (in_minus != out_minus) return false;
    }
    for (auto [a, b] : d.closure_pairs)
        if (s[a] != s[b]) return false;
    return s[d.open_bot] == s[d.open_top];
}

// --- exact rational LP --------------------------------------------------------

namespace {

using Rat = mpq_class;

// Minimal two-phase simplex (Bland's rule) for min c.x s.t. A x = b, x >= 0.
// Returns the optimum, or nullopt if infeasible.  Throws on unboundedness
// (cannot occur here: the feasible set lies in a simplex).
std::optional<Rat> simplex_min(std::vector<std::vector<Rat>> A, std::vector<Rat> b,
                               std::vector<Rat> c) {
    const size_t m = A.size();
    const size_t n = m ? A[0].size() : 0;
    for (size_t r = 0; r < m; ++r)
        if (b[r] < 0) {
            for (auto& v : A[r]) v = -v;
            b[r] = -b[r];
        }
    // tableau with artificial variables for phase 1
    size_t cols = n + m;
    std::vector<std::vector<Rat>> T(m, std::vector<Rat>(cols + 1, 0));
    std::vector<size_t> basis(m);
    for (size_t r = 0; r < m; ++r) {
        for (size_t j = 0; j < n; ++j) T[r][j] = A[r][j];
        T[r][n + r] = 1;
        T[r][cols] = b[r];
        basis[r] = n + r;
    }
    auto run = [&](const std::vector<Rat>& obj, size_t ncols) -> Rat {
        while (true) {
            // reduced costs via current basis
            std::vector<Rat> y(m, 0); // simplex multipliers: solve easily by
            // computing z_j - c_j from the tableau (tableau kept in canonical
            // form, so reduced cost of column j is obj[j] - sum_r obj[basis[r]]*T[r][j]).
            size_t enter = ncols;
            for (size_t j = 0; j < ncols; ++j) {
                Rat red = obj[j];
                for (size_t r = 0; r < m; ++r)
                    if (obj[basis[r]] != 0) red -= obj[basis[r]] * T[r][j];
                if (red < 0) { enter = j; break; } // Bland: first improving column
            }
            if (enter == ncols) break;
            size_t leave = m;
            Rat best;
            for (size_t r = 0; r < m; ++r) {
                if (T[r][enter] > 0) {
                    Rat ratio = T[r][cols] / T[r][enter];
                    if (leave == m || ratio < best ||
                        (ratio == best && basis[r] < basis[leave])) {
                        leave = r;
                        best = ratio;
                    }
                }
            }
            if (leave == m) throw std::logic_error("simplex: unbounded");
            // pivot
            Rat piv = T[leave][enter];
            for (auto& v : T[leave]) v /= piv;
            for (size_t r = 0; r < m; ++r) {
                if (r == leave || T[r][enter] == 0) continue;
                Rat f = T[r][enter];
                for (size_t j = 0; j <= cols; ++j) T[r][j] -= f * T[leave][j];
            }
            basis[leave] = enter;
        }
        Rat val = 0;
        for (size_t r = 0; r < m; ++r)
            if (obj[basis[r]] != 0) val += obj[basis[r]] * T[r][cols];
        return val;
    };
    // phase 1: minimize sum of artificials
    std::vector<Rat> obj1(cols, 0);
    for (size_t j = n; j < cols; ++j) obj1[j] = 1;
    Rat w = run(obj1, cols);
    if (w != 0) return std::nullopt;
    // drive remaining artificials out of the basis where possible
    for (size_t r = 0; r < m; ++r) {
        if (basis[r] < n) continue;
        size_t enter = n;
        for (size_t j = 0; j < n; ++j)
            if (T[r][j] != 0) { enter = j; break; }
        if (enter == n) continue; // redundant row
        Rat piv = T[r][enter];
        for (auto& v : T[r]) v /= piv;
        for (size_t rr = 0; rr < m; ++rr) {
            if (rr == r || T[rr][enter] == 0) continue;
            Rat f = T[rr][enter];
            for (size_t j = 0; j <= cols; ++j) T[rr][j] -= f * T[r][j];
        }
        basis[r] = enter;
    }
    // phase 2
    std::vector<Rat> obj2(cols, 0);
    for (size_t j = 0; j < n; ++j) obj2[j] = c[j];
    // forbid re-entry of artificials by making them expensive is unreliable in
    // exact arithmetic; instead restrict pricing to the first n columns.
    return run(obj2, n);
}

Rat qexp_to_rat(QExp e) { return Rat(e.num, e.den); }

} // namespace

std::optional<ConvergenceCertificate> certify_convergence(const Diagram& d,
                                                          const SignAssignment& s) {
    if (!condition_a(d, s)) return std::nullopt;
    // Variables: one per segment equivalence class (closure pairs identified);
    // the open strand is pinned to a constant and excluded.
    std::vector<int> rep(d.nseg);
    for (int i = 0; i < d.nseg; ++i) rep[i] = i;
    std::function<int(int)> find = [&](int x) {
        while (rep[x] != x) x = rep[x] = rep[rep[x]];
        return x;
    };
    for (auto [a, b] : d.closure_pairs) rep[find(a)] = find(b);
    rep[find(d.open_top)] = find(d.open_bot);
    std::vector<int> var(d.nseg, -1);
    int nv = 0;
    for (int i = 0; i < d.nseg; ++i) {
        int r = find(i);
        if (r == find(d.open_bot)) continue; // pinned, zero recession
        if (var[r] < 0) var[r] = nv++;
        var[i] = var[r];
    }
    // Functional: total x^{-1}-degree >= sum_c (j + j' + 1)/2 * sign_c with the
    // substitution k = -1 - k_inv on minus segments.  The recession-cone linear
    // part drops the constants.
    std::vector<Rat> lin(nv, 0);
    auto add_seg = [&](int seg, Rat coef) {
        int v = var[seg];
        if (v < 0) return; // pinned segment: constant, no recession component
        // minus segments are measured by k_inv; k = -1 - k_inv flips the sign.
        lin[v] += (s[seg] > 0 ? coef : -coef);
    };
    for (const auto& c : d.crossings) {
        Rat half(1, 2);
        Rat sg = c.sign > 0 ? half : -half;
        add_seg(c.j, sg);
        add_seg(c.jp, sg);
    }
    // Recession-cone constraints: per crossing, i + j = i' + j' with the same
    // substitution; minus segments enter with coefficient -1.  In addition,
    // entries vanish outside their branch support: a positive crossing needs
    // i >= j' when both corners carry the same sign (in inverted variables the
    // inequality flips), and similarly j >= i' at a negative crossing.  A
    // (+,-) support pair makes every entry zero, so the assignment is useless.
    std::vector<std::vector<Rat>> A;
    std::vector<Rat> b;
    std::vector<std::vector<Rat>> ineq; // rows with value <= 0
    for (const auto& c : d.crossings) {
        std::vector<Rat> row(nv, 0);
        auto put = [&](std::vector<Rat>& r, int seg, int sgn) {
            int v = var[seg];
            if (v < 0) return;
            r[v] += (s[seg] > 0 ? sgn : -sgn);
        };
        put(row, c.i, 1);
        put(row, c.j, 1);
        put(row, c.ip, -1);
        put(row, c.jp, -1);
        bool allzero = true;
        for (auto& x : row)
            if (x != 0) allzero = false;
        if (!allzero) {
            A.push_back(row);
            b.push_back(0);
        }
        int hi = c.sign > 0 ? c.i : c.j;   // support: hi >= lo on actual values
        int lo = c.sign > 0 ? c.jp : c.ip;
        if (s[hi] > 0 && s[lo] < 0) return std::nullopt;
        if (s[hi] != s[lo]) continue; // mixed (-,+): always admissible
        std::vector<Rat> srow(nv, 0);
        // same-sign corners: v_hi >= v_lo for plus, v_lo >= v_hi inverted
        put(srow, hi, -1);
        put(srow, lo, 1);
        bool zero = true;
        for (auto& x : srow)
            if (x != 0) zero = false;
        if (!zero) ineq.push_back(srow);
    }
    ConvergenceCertificate cert;
    cert.functional.assign(d.nseg, QExp(0));
    if (nv == 0) {
        cert.cone_trivial = true;
        cert.optimum = QExp(0);
        return cert;
    }
    // Inequalities become equalities with one slack column each; slacks do not
    // enter the objective or the normalization.
    int ns = static_cast<int>(ineq.size());
    int ntot = nv + ns;
    for (auto& row : A) row.resize(ntot, 0);
    for (int k = 0; k < ns; ++k) {
        auto row = ineq[k];
        row.resize(ntot, 0);
        row[nv + k] = 1;
        A.push_back(row);
        b.push_back(0);
    }
    // normalization: sum of segment variables = 1
    {
        std::vector<Rat> row(ntot, 0);
        for (int k = 0; k < nv; ++k) row[k] = 1;
        A.push_back(row);
        b.push_back(1);
    }
    std::vector<Rat> obj = lin;
    obj.resize(ntot, 0);
    auto opt = simplex_min(A, b, obj);
    if (!opt) {
        // Infeasible normalized cone means the recession cone is {0}.
        cert.cone_trivial = true;
        cert.optimum = QExp(0);
        return cert;
    }
    if (!(*opt > 0)) return std::nullopt;
    // Export the functional coefficients per segment variable.
    for (int seg = 0; seg < d.nseg; ++seg)
        if (var[seg] >= 0) {
            Rat c0 = lin[var[seg]];
            cert.functional[seg] =
                QExp(c0.get_num().get_si(), c0.get_den().get_si());
        }
    cert.optimum = QExp(opt->get_num().get_si(), opt->get_den().get_si());
    cert.cone_trivial = false;
    return cert;
}

std::int64_t ConvergenceCertificate::state_cap(const Diagram& d, QExp x_order) const {
    // Total x-degree of a state is >= -(constant part) - L(v) is the wrong
    // direction; we need: x^{-1}-degree <= x_order + 1 + closure lift, and
    // x^{-1}-degree >= L(v) + const with L(v) >= optimum * sum(v).  States with
    // sum(v) > (x_order + 1 + margin) / optimum cannot reach the window.
    if (cone_trivial) {
        // Bounded state space regardless; a generous fixed cap suffices and the
        // per-crossing pruning bounds do the real work.
        return 4 * x_order.floor() + 16;
    }
    // constant part of the degree functional: each crossing contributes
    // sign*(1/2) per minus j/j' corner substitution constant (-1) plus the +1/2;
    // bound it crudely by the number of crossings (each at most +-3/2).
    QExp margin = QExp(3 * static_cast<std::int64_t>(d.crossings.size()), 2) +
                  QExp(static_cast<std::int64_t>(d.strands), 2);
    QExp budget = x_order + QExp(1) + margin;
    QExp cap = budget / optimum;
    return cap.floor() + 2;
}

// --- inversion search -----------------------------------------------------------

std::vector<SignAssignment> search_inversion(const Diagram& d, int max_results) {
    std::vector<SignAssignment> out;
    SignAssignment s(d.nseg, 1);
    // Closure-paired top segments must copy the sign of their bottom partner;
    // enforcing that as soon as a top segment is produced prunes most of the
    // tree.
    std::vector<int> req(d.nseg, 0);
    // assign bottom segments then per-crossing outputs; condition (a) local rule
    std::function<void(int)> assign_cross = [&](int idx) {
        if (static_cast<int>(out.size()) >= max_results) return;
        if (idx == static_cast<int>(d.crossings.size())) {
            if (!condition_a(d, s)) return;
            if (certify_convergence(d, s)) out.push_back(s);
            return;
        }
        const auto& c = d.crossings[idx];
        int in_minus = (s[c.i] < 0) + (s[c.j] < 0);
        for (auto [a, b] : {std::pair{1, 1}, std::pair{1, -1}, std::pair{-1, 1},
                            std::pair{-1, -1}}) {
            if (((a < 0) + (b < 0)) != in_minus) continue;
            if (req[c.ip] != 0 && req[c.ip] != a) continue;
            if (req[c.jp] != 0 && req[c.jp] != b) continue;
            s[c.ip] = a;
            s[c.jp] = b;
            assign_cross(idx + 1);
        }
    };
    std::function<void(int)> assign_bottom = [&](int p) {
        if (static_cast<int>(out.size()) >= max_results) return;
        if (p == d.strands) {
            for (auto [top, bot] : d.closure_pairs) req[top] = s[bot];
            req[d.open_top] = s[d.open_bot];
            assign_cross(0);
            return;
        }
        for (int v : {1, -1}) {
            s[p] = v;
            assign_bottom(p + 1);
        }
    };
    assign_bottom(0);
    return out;
}

// --- sign exponent ----------------------------------------------------------------

int sign_exponent_s(const Diagram& d, const SignAssignment& s, SignMode mode) {
    if (mode == SignMode::definition) {
        std::set<int> negcols;
        int nblocks = 0;
        for (const auto& c : d.crossings) {
            if (c.sign < 0) {
                negcols.insert(c.pos);
                if (s[c.i] < 0 && s[c.j] < 0 && s[c.ip] < 0 && s[c.jp] < 0) ++nblocks;
            }
        }
        return static_cast<int>(negcols.size()) + nblocks;
    }
    // multicycle: the minus-signed segments form a simple multi-cycle on the
    // diagram.  At a crossing where both strands are minus the cycle follows
    // the strand (i -> j', j -> i'); where exactly one minus strand passes,
    // the single minus input connects to the single minus output.  Closure
    // joins top -> bottom.  Count the closed components.
    std::vector<int> succ(d.nseg, -1);
    for (const auto& c : d.crossings) {
        std::vector<int> in, out;
        if (s[c.i] < 0) in.push_back(c.i);
        if (s[c.j] < 0) in.push_back(c.j);
        if (s[c.ip] < 0) out.push_back(c.ip);
        if (s[c.jp] < 0) out.push_back(c.jp);
        if (in.size() == 2 && out.size() == 2) {
            succ[c.i] = c.jp;
            succ[c.j] = c.ip;
        } else if (in.size() == 1 && out.size() == 1) {
            succ[in[0]] = out[0];
        }
    }
    for (auto [a, b] : d.closure_pairs)
        if (s[a] < 0 && s[b] < 0) succ[a] = b;
    std::vector<bool> seen(d.nseg, false);
    int cycles = 0;
    for (int s0 = 0; s0 < d.nseg; ++s0) {
        if (s[s0] > 0 || seen[s0]) continue;
        int cur = s0;
        bool closed = false;
        while (true) {
            if (seen[cur]) break;
            seen[cur] = true;
            int nxt = succ[cur];
            if (nxt < 0 || s[nxt] > 0) break;
            if (nxt == s0) { closed = true; break; }
            cur = nxt;
        }
        if (closed) ++cycles;
    }
    return cycles;
}

// --- corpus -----------------------------------------------------------------------

std::vector<CorpusEntry> load_corpus(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("load_corpus: cannot open " + path);
    std::vector<CorpusEntry> out;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        std::vector<std::string> fields;
        size_t start = 0;
        while (true) {
            size_t tab = line.find('\t', start);
            fields.push_back(line.substr(start, tab == std::string::npos
                                                    ? std::string::npos
                                                    : tab - start));
            if (tab == std::string::npos) break;
            start = tab + 1;
        }
        if (fields.size() < 2)
            throw std::runtime_error("load_corpus: malformed line: " + line);
        CorpusEntry e;
        e.name = fields[0];
        e.word = parse_braid(fields[1]);
        if (fields.size() >= 3 && !fields[2].empty()) {
            std::istringstream cs(fields[2]);
            std::string code;
            while (std::getline(cs, code, ',')) {
                // trim
                while (!code.empty() && std::isspace((unsigned char)code.front()))
                    code.erase(code.begin());
                while (!code.empty() && std::isspace((unsigned char)code.back()))
                    code.pop_back();
                e.corner_codes.push_back(code);
            }
            e.has_codes = !e.corner_codes.empty();
            if (e.has_codes && e.corner_codes.size() != e.word.letters.size())
                throw std::runtime_error("load_corpus: code count mismatch for " +
                                         e.name);
        }
        out.push_back(std::move(e));
    }
    return out;
}

SignAssignment signs_from_corner_codes(const Diagram& d,
                                       const std::vector<std::string>& codes) {
    if (codes.size() != d.crossings.size())
        throw std::invalid_argument("corner codes: wrong crossing count");
    SignAssignment s(d.nseg, 0);
    auto put = [&](int seg, char ch, size_t idx) {
        int v = (ch == 'p') ? 1 : (ch == 'm') ? -1 : 0;
        if (v == 0)
            throw std::invalid_argument("corner codes: bad letter at crossing " +
                                        std::to_string(idx));
        if (s[seg] != 0 && s[seg] != v)
            throw std::invalid_argument(
                "corner codes: segment-inconsistent at crossing " + std::to_string(idx));
        s[seg] = v;
    };
    for (size_t idx = 0; idx < codes.size(); ++idx) {
        const auto& code = codes[idx];
        if (code.size() != 4)
            throw std::invalid_argument("corner codes: need 4 letters at crossing " +
                                        std::to_string(idx));
        const auto& c = d.crossings[idx];
        put(c.i, code[0], idx);
        put(c.j, code[1], idx);
        put(c.ip, code[2], idx);
        put(c.jp, code[3], idx);
    }
    for (int seg = 0; seg < d.nseg; ++seg)
        if (s[seg] == 0) s[seg] = 1; // untouched segments default to +
    // propagate closure identifications before validating
    for (auto [a, b] : d.closure_pairs)
        if (s[a] != s[b])
            throw std::invalid_argument("corner codes: closure-inconsistent signs");
    for (size_t idx = 0; idx < d.crossings.size(); ++idx) {
        const auto& c = d.crossings[idx];
        if ((s[c.i] < 0) + (s[c.j] < 0) != (s[c.ip] < 0) + (s[c.jp] < 0))
            throw std::invalid_argument("corner codes: condition (a) fails at crossing " +
                                        std::to_string(idx));
    }
    return s;
}

} // namespace fk
