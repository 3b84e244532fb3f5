#include "fk/statesum.hpp"

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "fk/rmatrix.hpp"

namespace fk {

namespace {

// Precision used for coefficients that are exact Laurent polynomials.
const QExp kExactPrec(1000000000);

QExp total(const std::vector<QExp>& e) {
    QExp t;
    for (auto& x : e) t += x;
    return t;
}

} // namespace

void MultiXSeries::add(const std::vector<QExp>& e, const QSeries& c) {
    if (c.is_zero()) return;
    auto [it, fresh] = terms.try_emplace(e, c);
    if (!fresh) {
        it->second = it->second + c;
        if (it->second.is_zero()) terms.erase(it);
    }
}

QSeries MultiXSeries::coeff(const std::vector<QExp>& e) const {
    auto it = terms.find(e);
    return it == terms.end() ? QSeries(LaurentQ(), kExactPrec) : it->second;
}

MultiXSeries MultiXSeries::filtered(QExp margin) const {
    MultiXSeries r;
    r.x_orders = x_orders;
    r.component_names = component_names;
    for (const auto& [e, c] : terms) {
        bool keep = true;
        for (std::size_t i = 0; i < e.size(); ++i)
            if (e[i] < -x_orders[i] - margin) { keep = false; break; }
        if (keep) r.terms.emplace(e, c);
    }
    return r;
}

MultiXSeries MultiXSeries::unit_scaled(int sign, QExp shift) const {
    MultiXSeries r;
    r.x_orders = x_orders;
    r.component_names = component_names;
    for (const auto& [e, c] : terms)
        r.terms.emplace(e, c.shifted(shift).scaled(sign));
    return r;
}

std::string MultiXSeries::str() const {
    std::ostringstream os;
    for (const auto& [e, c] : terms) {
        os << "[";
        for (std::size_t i = 0; i < e.size(); ++i)
            os << (i ? " " : "") << "x" << i + 1 << "^" << e[i].str();
        os << "] " << c.poly().str() << "\n";
    }
    return os.str();
}

std::string MultiXSeries::json() const {
    std::ostringstream os;
    os << "[";
    bool first = true;
    for (const auto& [e, c] : terms) {
        if (!first) os << ",";
        first = false;
        os << "{\"x\":[";
        for (std::size_t i = 0; i < e.size(); ++i)
            os << (i ? "," : "") << "\"" << e[i].key() << "\"";
        os << "],\"coeff\":" << c.json() << "}";
    }
    os << "]";
    return os.str();
}

UnitMatch match_up_to_unit(const MultiXSeries& a, const MultiXSeries& b) {
    UnitMatch m;
    if (a.terms.empty() && b.terms.empty()) {
        m.ok = true;
        return m;
    }
    if (a.terms.empty() || b.terms.empty()) return m;
    if (a.terms.size() != b.terms.size()) return m;
    // x-offset from the first (lexicographically smallest) exponent vectors.
    const auto& ea = a.terms.begin()->first;
    const auto& eb = b.terms.begin()->first;
    if (ea.size() != eb.size()) return m;
    std::vector<QExp> xoff(ea.size());
    for (std::size_t i = 0; i < ea.size(); ++i) xoff[i] = eb[i] - ea[i];
    const LaurentQ& pa = a.terms.begin()->second.poly();
    const LaurentQ& pb = b.terms.begin()->second.poly();
    if (pa.is_zero() || pb.is_zero()) return m;
    QExp t = pb.valuation() - pa.valuation();
    Coef ca = pa.terms().begin()->second, cb = pb.terms().begin()->second;
    int sign;
    if (ca == cb) sign = 1;
    else if (ca == -cb) sign = -1;
    else return m;
    auto itb = b.terms.begin();
    for (const auto& [e, c] : a.terms) {
        std::vector<QExp> es(e);
        for (std::size_t i = 0; i < es.size(); ++i) es[i] += xoff[i];
        if (itb == b.terms.end() || itb->first != es) return m;
        if (!(itb->second.poly() == c.poly().shifted(t).scaled(sign))) return m;
        ++itb;
    }
    m.ok = true;
    m.sign = sign;
    m.q_shift = t;
    return m;
}

namespace {

// Actual basis index from a non-negative state variable and a segment sign.
std::int64_t seg_value(std::int64_t v, int sgn) { return sgn > 0 ? v : -1 - v; }

// Exact minimal total x-degree a crossing can contribute given the actual
// values of its j and j' corners (Eq. (2)).
QExp crossing_min_deg(int sign, std::int64_t j_val, std::int64_t jp_val) {
    return sign > 0 ? QExp(-(j_val + jp_val + 1), 2) : QExp(j_val + jp_val + 1, 2);
}

using XTerms = std::map<std::vector<QExp>, LaurentQ>;

struct Enumerator {
    const Diagram& d;
    const SignAssignment& s;
    std::int64_t cap;
    QExp min_total;
    std::int64_t depth;
    std::vector<QExp> static_bound;  // best per-crossing leading degree
    std::vector<QExp> suffix_bound;  // sum over remaining crossings
    QExp closure_deg;
    std::atomic<std::uint64_t> visited{0};
    std::atomic<std::uint64_t> closed{0};

    Enumerator(const Diagram& dg, const SignAssignment& sg, std::int64_t cp,
               QExp mt, std::int64_t dp)
        : d(dg), s(sg), cap(cp), min_total(mt), depth(dp) {
        closure_deg = QExp(static_cast<std::int64_t>(d.closure_pairs.size()), 2);
        static_bound.resize(d.crossings.size());
        for (std::size_t idx = 0; idx < d.crossings.size(); ++idx) {
            const Crossing& c = d.crossings[idx];
            std::optional<QExp> best;
            for (std::int64_t vj : {std::int64_t(0), cap})
                for (std::int64_t vjp : {std::int64_t(0), cap}) {
                    QExp dd = crossing_min_deg(c.sign, seg_value(vj, s[c.j]),
                                               seg_value(vjp, s[c.jp]));
                    if (!best || dd > *best) best = dd;
                }
            static_bound[idx] = *best;
        }
        suffix_bound.assign(d.crossings.size() + 1, QExp(0));
        for (std::size_t idx = d.crossings.size(); idx-- > 0;)
            suffix_bound[idx] = suffix_bound[idx + 1] + static_bound[idx];
    }

    void mul_entry(XTerms& out, const XTerms& acc, const REntry& ent,
                   QExp keep_floor) const {
        for (const auto& [e, c] : acc) {
            std::vector<QExp> base(e);
            for (const auto& [v, x] : ent.x_exponents) base[v] += x;
            QExp base_total = total(base);
            for (const auto& [off, co] : ent.terms) {
                QExp t = base_total + QExp(off);
                if (t < keep_floor) continue;
                std::vector<QExp> ne(base);
                ne[ent.series_var] += QExp(off);
                LaurentQ prod = c * co;
                if (prod.is_zero()) continue;
                auto [it, fresh] = out.try_emplace(std::move(ne), prod);
                if (!fresh) {
                    it->second = it->second + prod;
                    if (it->second.is_zero()) out.erase(it);
                }
            }
        }
    }

    void dfs_cross(std::size_t idx, std::vector<std::int64_t>& val,
                   std::int64_t sumv, const XTerms& acc, QExp acc_deg,
                   XTerms& sink) {
        if (acc_deg + suffix_bound[idx] + closure_deg < min_total) return;
        if (idx == d.crossings.size()) {
            for (auto [a, b] : d.closure_pairs)
                if (val[a] != val[b]) return;
            if (val[d.open_top] != val[d.open_bot]) return;
            closed.fetch_add(1, std::memory_order_relaxed);
            // Closure factors prod_c x_c^{1/2} q^{-1/2-n}.
            std::vector<QExp> xexp(static_cast<std::size_t>(d.ncomp));
            QExp qshift;
            for (auto [a, b] : d.closure_pairs) {
                xexp[static_cast<std::size_t>(d.segcomp[a])] += QExp(1, 2);
                qshift += QExp(-1, 2) - QExp(val[a]);
            }
            QExp lift = total(xexp);
            for (const auto& [e, c] : acc) {
                if (total(e) + lift < min_total) continue;
                std::vector<QExp> ne(e);
                for (std::size_t i = 0; i < ne.size(); ++i) ne[i] += xexp[i];
                LaurentQ co = c.shifted(qshift);
                auto [it, fresh] = sink.try_emplace(std::move(ne), co);
                if (!fresh) {
                    it->second = it->second + co;
                    if (it->second.is_zero()) sink.erase(it);
                }
            }
            return;
        }
        const Crossing& c = d.crossings[idx];
        std::int64_t i_val = val[c.i], j_val = val[c.j];
        // Largest term total in acc: bounds how deep an entry's offset tail
        // can reach while still surviving the keep_floor filter, so entries
        // are only requested (and computed) to that depth.
        QExp acc_max;
        bool have_max = false;
        for (const auto& [e, cc] : acc) {
            QExp t = total(e);
            if (!have_max || t > acc_max) {
                acc_max = t;
                have_max = true;
            }
        }
        if (!have_max) return;
        for (std::int64_t vjp = 0; vjp <= cap; ++vjp) {
            std::int64_t jp_val = seg_value(vjp, s[c.jp]);
            std::int64_t ip_val = i_val + j_val - jp_val;
            if (s[c.ip] > 0 && ip_val < 0) continue;
            if (s[c.ip] < 0 && ip_val >= 0) continue;
            std::int64_t vip = s[c.ip] > 0 ? ip_val : -1 - ip_val;
            if (vip > cap) continue;
            std::int64_t nsum = sumv + vjp + vip;
            if (nsum > cap) continue;
            QExp dd = crossing_min_deg(c.sign, j_val, jp_val);
            QExp new_deg = acc_deg + dd;
            if (new_deg + suffix_bound[idx + 1] + closure_deg < min_total) continue;
            QExp slack =
                acc_max + dd + suffix_bound[idx + 1] + closure_deg - min_total;
            if (slack < QExp(0)) continue;
            // Bucket the requested depth for entry-cache reuse.
            std::int64_t dreq = std::min(depth, ((slack.floor() + 17) / 16) * 16);
            REntry ent = r_entry(c.sign, i_val, j_val, ip_val, jp_val,
                                 d.segcomp[c.i], d.segcomp[c.j], dreq);
            if (ent.is_zero()) continue;
            visited.fetch_add(1, std::memory_order_relaxed);
            QExp keep_floor = min_total - closure_deg - suffix_bound[idx + 1];
            XTerms nacc;
            mul_entry(nacc, acc, ent, keep_floor);
            if (nacc.empty()) continue;
            val[c.ip] = ip_val;
            val[c.jp] = jp_val;
            dfs_cross(idx + 1, val, nsum, nacc, new_deg, sink);
        }
        val[c.ip] = val[c.jp] = 0;
    }

    void dfs_bottom(int p, std::vector<std::int64_t>& val, std::int64_t sumv,
                    XTerms& sink) {
        if (p == d.strands) {
            XTerms one;
            one.emplace(std::vector<QExp>(static_cast<std::size_t>(d.ncomp)),
                        LaurentQ::one());
            dfs_cross(0, val, sumv, one, QExp(0), sink);
            return;
        }
        for (std::int64_t v = 0; v <= cap - sumv; ++v) {
            val[p] = seg_value(v, s[static_cast<std::size_t>(p)]);
            dfs_bottom(p + 1, val, sumv + v, sink);
        }
    }
};

int thread_count() {
    if (const char* env = std::getenv("FK_THREADS")) {
        int n = std::atoi(env);
        if (n >= 1) return n;
    }
    return 1;
}

} // namespace

MultiXSeries inverted_state_sum(const Diagram& d, const SignAssignment& s,
                                const ConvergenceCertificate& cert,
                                const StateSumConfig& cfg, SignMode mode,
                                StateSumStats* stats) {
    if (static_cast<int>(cfg.x_orders.size()) != d.ncomp)
        throw std::invalid_argument("state sum: x_orders size != component count");
    for (const auto& xo : cfg.x_orders)
        if (xo < QExp(1, 2)) throw std::invalid_argument("state sum: x_order < 1/2");
    if (static_cast<int>(s.size()) != d.nseg)
        throw std::invalid_argument("state sum: sign assignment size mismatch");
    for (auto [a, b] : d.closure_pairs)
        if (s[a] != s[b])
            throw std::invalid_argument("state sum: closure-inconsistent signs");
    if (s[d.open_bot] != s[d.open_top])
        throw std::invalid_argument("state sum: open-strand sign mismatch");

    QExp order_total;
    for (const auto& xo : cfg.x_orders) order_total += xo;
    QExp min_total = -order_total - QExp(1);
    std::int64_t cap = cfg.cap_override >= 0 ? cfg.cap_override
                                             : cert.state_cap(d, order_total);
    if (cap < 0 || cap > 100000)
        throw std::overflow_error("state sum: state cap out of range");
    std::int64_t depth = 2 * cap + 2 * (-min_total).floor() + 8;

    Enumerator en(d, s, cap, min_total, depth);

    // Open segment fixed to the chosen basis vector.
    int open_sign = s[d.open_bot];
    std::int64_t open_val;
    if (cfg.open_vector_index == INT32_MIN) {
        open_val = open_sign > 0 ? 0 : -1;
    } else {
        open_val = cfg.open_vector_index;
        if ((open_sign > 0) != (open_val >= 0))
            throw std::invalid_argument("state sum: open vector index contradicts sign");
    }

    XTerms sum;
    int nthreads = thread_count();
    if (d.strands <= 1 || nthreads == 1) {
        std::vector<std::int64_t> val(static_cast<std::size_t>(d.nseg), 0);
        val[d.open_bot] = open_val;
        en.dfs_bottom(1, val, 0, sum);
    } else {
        // Partition the first free bottom segment's variable range.
        std::vector<XTerms> parts(static_cast<std::size_t>(nthreads));
        std::vector<std::thread> pool;
        for (int t = 0; t < nthreads; ++t) {
            pool.emplace_back([&, t] {
                std::vector<std::int64_t> val(static_cast<std::size_t>(d.nseg), 0);
                val[d.open_bot] = open_val;
                for (std::int64_t v = t; v <= en.cap; v += nthreads) {
                    val[1] = seg_value(v, s[1]);
                    en.dfs_bottom(2, val, v, parts[static_cast<std::size_t>(t)]);
                }
            });
        }
        for (auto& th : pool) th.join();
        for (const auto& part : parts)
            for (const auto& [e, c] : part) {
                auto [it, fresh] = sum.try_emplace(e, c);
                if (!fresh) {
                    it->second = it->second + c;
                    if (it->second.is_zero()) sum.erase(it);
                }
            }
    }

    int sgn_exp = sign_exponent_s(d, s, mode);
    MultiXSeries r;
    r.x_orders = cfg.x_orders;
    for (int c = 0; c < d.ncomp; ++c)
        r.component_names.push_back("x" + std::to_string(c + 1));
    for (auto& [e, c] : sum)
        r.terms.emplace(e, QSeries(sgn_exp % 2 ? -c : c, kExactPrec));
    if (stats) {
        stats->states_visited = en.visited.load();
        stats->states_closed = en.closed.load();
        stats->cap = cap;
    }
    return r.filtered(QExp(1));
}

MultiXSeries f_series(const Diagram& d, const SignAssignment& s,
                      const ConvergenceCertificate& cert,
                      const StateSumConfig& cfg, SignMode mode,
                      StateSumStats* stats) {
    MultiXSeries z = inverted_state_sum(d, s, cert, cfg, mode, stats);
    MultiXSeries r;
    r.x_orders = cfg.x_orders;
    r.component_names = z.component_names;
    std::size_t oc = static_cast<std::size_t>(d.open_comp);
    for (const auto& [e, c] : z.terms) {
        std::vector<QExp> up(e), dn(e);
        up[oc] += QExp(1, 2);
        dn[oc] -= QExp(1, 2);
        r.add(up, c);
        r.add(dn, -c);
    }
    return r.filtered(QExp(1, 2));
}

// ---------------------------------------------------------------------------
// q = 1 Alexander oracle via det(I - B).

namespace {

// Multivariate Laurent polynomial in the component variables with exact
// rational coefficients (used only inside the determinant).
using XPoly = std::map<std::vector<QExp>, mpq_class>;

void xp_add(XPoly& a, const std::vector<QExp>& e, const mpq_class& c) {
    if (c == 0) return;
    auto [it, fresh] = a.try_emplace(e, c);
    if (!fresh) {
        it->second += c;
        if (it->second == 0) a.erase(it);
    }
}

XPoly xp_sub(const XPoly& a, const XPoly& b) {
    XPoly r = a;
    for (const auto& [e, c] : b) xp_add(r, e, -c);
    return r;
}

XPoly xp_mul(const XPoly& a, const XPoly& b) {
    XPoly r;
    for (const auto& [ea, ca] : a)
        for (const auto& [eb, cb] : b) {
            std::vector<QExp> e(ea);
            for (std::size_t i = 0; i < e.size(); ++i) e[i] += eb[i];
            xp_add(r, e, ca * cb);
        }
    return r;
}

// Exact division in the Laurent ring (throws if not exact).
XPoly xp_div(XPoly f, const XPoly& g) {
    if (g.empty()) throw std::invalid_argument("alexander: division by zero");
    XPoly q;
    const auto& lg = *g.rbegin();
    for (int guard = 0; !f.empty(); ++guard) {
        if (guard > 1000000) throw std::logic_error("alexander: inexact division");
        const auto& lf = *f.rbegin();
        std::vector<QExp> e(lf.first);
        for (std::size_t i = 0; i < e.size(); ++i) e[i] -= lg.first[i];
        mpq_class c = lf.second / lg.second;
        xp_add(q, e, c);
        XPoly t;
        t.emplace(e, c);
        f = xp_sub(f, xp_mul(t, g));
    }
    return q;
}

} // namespace

MultiXSeries alexander_oracle(const Diagram& d) {
    std::size_t nv = static_cast<std::size_t>(d.ncomp);
    // Merge closure-paired segments into nodes.
    std::vector<int> node(static_cast<std::size_t>(d.nseg), -1);
    for (auto [top, bot] : d.closure_pairs) node[top] = bot;
    int nn = 0;
    std::vector<int> id(static_cast<std::size_t>(d.nseg), -1);
    for (int seg = 0; seg < d.nseg; ++seg)
        if (node[seg] == -1) id[seg] = nn++;
    for (int seg = 0; seg < d.nseg; ++seg)
        if (node[seg] != -1) id[seg] = id[node[seg]];

    std::vector<std::vector<XPoly>> M(static_cast<std::size_t>(nn),
                                      std::vector<XPoly>(static_cast<std::size_t>(nn)));
    auto mono = [&](int comp, QExp e, long coef) {
        std::vector<QExp> v(nv);
        if (comp >= 0) v[static_cast<std::size_t>(comp)] = e;
        XPoly p;
        p.emplace(v, mpq_class(coef));
        return p;
    };
    auto addw = [&](int from, int to, const XPoly& w) {
        // I - B: subtract the transition weight.
        M[static_cast<std::size_t>(id[from])][static_cast<std::size_t>(id[to])] =
            xp_sub(M[static_cast<std::size_t>(id[from])][static_cast<std::size_t>(id[to])], w);
    };
    for (int n = 0; n < nn; ++n) M[n][n] = mono(-1, QExp(0), 1);
    for (const Crossing& c : d.crossings) {
        if (c.sign > 0) {
            int ov = d.segcomp[c.i];  // over-strand variable
            XPoly al = mono(ov, QExp(-1, 2), 1);
            XPoly ga = xp_sub(mono(-1, QExp(0), 1), mono(ov, QExp(-1), 1));
            addw(c.i, c.ip, ga);
            addw(c.i, c.jp, al);
            addw(c.j, c.ip, al);
        } else {
            int ov = d.segcomp[c.j];
            XPoly al = mono(ov, QExp(1, 2), 1);
            XPoly ga = xp_sub(mono(-1, QExp(0), 1), mono(ov, QExp(1), 1));
            addw(c.i, c.jp, al);
            addw(c.j, c.ip, al);
            addw(c.j, c.jp, ga);
        }
    }

    // Bareiss fraction-free elimination.
    XPoly det;
    int sign = 1;
    XPoly prev = mono(-1, QExp(0), 1);
    bool zero = false;
    for (int k = 0; k < nn && !zero; ++k) {
        int piv = -1;
        for (int r = k; r < nn; ++r)
            if (!M[static_cast<std::size_t>(r)][static_cast<std::size_t>(k)].empty()) {
                piv = r;
                break;
            }
        if (piv == -1) { zero = true; break; }
        if (piv != k) {
            std::swap(M[static_cast<std::size_t>(piv)], M[static_cast<std::size_t>(k)]);
            sign = -sign;
        }
        for (int i = k + 1; i < nn; ++i)
            for (int j = k + 1; j < nn; ++j)
                M[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] = xp_div(
                    xp_sub(xp_mul(M[static_cast<std::size_t>(k)][static_cast<std::size_t>(k)],
                                  M[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)]),
                           xp_mul(M[static_cast<std::size_t>(i)][static_cast<std::size_t>(k)],
                                  M[static_cast<std::size_t>(k)][static_cast<std::size_t>(j)])),
                    prev);
        prev = M[static_cast<std::size_t>(k)][static_cast<std::size_t>(k)];
    }
    if (!zero && nn > 0)
        det = M[static_cast<std::size_t>(nn - 1)][static_cast<std::size_t>(nn - 1)];
    if (nn == 0) det = mono(-1, QExp(0), 1);

    MultiXSeries r;
    r.x_orders.assign(nv, QExp(1000000));
    for (int c = 0; c < d.ncomp; ++c)
        r.component_names.push_back("x" + std::to_string(c + 1));
    for (const auto& [e, c] : det) {
        mpq_class v = sign > 0 ? c : mpq_class(-c);
        if (v.get_den() != 1)
            throw std::logic_error("alexander: non-integer determinant coefficient");
        r.terms.emplace(e, QSeries(LaurentQ::mono(QExp(0), Coef(v.get_num())), kExactPrec));
    }
    return r;
}

LaurentQ alexander_poly(const Diagram& d) {
    if (d.ncomp != 1)
        throw std::invalid_argument("alexander_poly: knot diagrams only");
    MultiXSeries det = alexander_oracle(d);
    LaurentQ r;
    for (const auto& [e, c] : det.terms) {
        const LaurentQ& p = c.poly();
        if (!p.is_zero()) r.add_term(e[0], p.terms().begin()->second);
    }
    return r;
}

ClassicalLimitResult classical_limit_check(const MultiXSeries& F,
                                           const LaurentQ& delta_x) {
    ClassicalLimitResult res;
    if (F.ncomp() != 1)
        throw std::invalid_argument("classical limit: knots only");
    if (delta_x.is_zero())
        throw std::invalid_argument("classical limit: zero Alexander polynomial");
    // F at q = 1 as a polynomial in y = x^{-1} (exponent negated).
    LaurentQ fy;
    for (const auto& [e, c] : F.terms) {
        Coef v(0);
        for (const auto& [qe, qc] : c.poly().terms()) v += qc;
        fy.add_term(-e[0], v);
    }
    if (fy.is_zero()) return res;
    // Target: (x^{1/2}-x^{-1/2})/Delta as a series in y.
    LaurentQ dy, num;
    for (const auto& [e, c] : delta_x.terms()) dy.add_term(-e, c);
    num.add_term(QExp(-1, 2), 1);
    num.add_term(QExp(1, 2), -1);
    // The target's valuation is num.val - dy.val (the denominator's leading
    // term is a unit), so the shift is known before expanding; expand far
    // enough that the shifted series covers all of fy.
    QExp shift = fy.valuation() - (num.valuation() - dy.valuation());
    QExp prec = fy.max_exponent() + QExp(1, 2) - shift;
    QSeries target = RationalQ(num, dy).expand(prec);
    // Match up to a global unit +-y^{s}.
    const LaurentQ& tp = target.poly();
    if (tp.is_zero()) return res;
    if (shift != fy.valuation() - tp.valuation()) return res;
    Coef ct = tp.terms().begin()->second, cf = fy.terms().begin()->second;
    int sign;
    if (ct == cf) sign = 1;
    else if (ct == -cf) sign = -1;
    else return res;
    LaurentQ adj = tp.shifted(shift).scaled(sign).truncated(prec + shift);
    if (!(adj.truncated(fy.max_exponent() + QExp(1, 4)) ==
          fy.truncated(fy.max_exponent() + QExp(1, 4))))
        return res;
    res.ok = true;
    res.sign = sign;
    res.x_shift = -shift;
    return res;
}

} // namespace fk
