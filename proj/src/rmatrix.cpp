#include "fk/rmatrix.hpp"

#include <mutex>
#include <tuple>

namespace fk {

namespace {

// Multiply the term map by (1 + c * q^{qe} * X^{xe}) where X is the series
// variable; drop offsets below -cut when cut >= 0.
void mul_binomial(std::map<std::int64_t, LaurentQ>& terms, std::int64_t xe,
                  QExp qe, int sign, std::int64_t cut) {
    std::map<std::int64_t, LaurentQ> out = terms;
    for (const auto& [e, c] : terms) {
        std::int64_t ne = e + xe;
        if (cut >= 0 && ne < -cut) continue;
        LaurentQ& dst = out[ne];
        for (const auto& [qx, co] : c.terms())
            dst.add_term(qx + qe, sign < 0 ? Coef(-co) : co);
        if (dst.is_zero()) out.erase(ne);
    }
    terms = std::move(out);
}

// Multiply by the truncated geometric series
//   factor = overall * sum_{t=t0..t0+depth} q^{qe*t} X^{-t},
// dropping offsets below -cut (offsets only ever decrease across factors, so
// the cut is sound for any later multiplications).
void mul_geometric(std::map<std::int64_t, LaurentQ>& terms, QExp qe, int overall,
                   std::int64_t t0, std::int64_t depth, std::int64_t cut) {
    std::map<std::int64_t, LaurentQ> out;
    for (const auto& [e, c] : terms)
        for (std::int64_t t = t0; t <= t0 + depth; ++t) {
            std::int64_t ne = e - t;
            if (ne < -cut) break;
            QExp sh = qe * QExp(t);
            LaurentQ& dst = out[ne];
            for (const auto& [qx, co] : c.terms())
                dst.add_term(qx + sh, overall < 0 ? Coef(-co) : co);
            if (dst.is_zero()) out.erase(ne);
        }
    terms = std::move(out);
}

struct Key {
    int sign;
    std::int64_t i, j, ip, jp;
    bool same;
    auto operator<=>(const Key&) const = default;
};

// Entries are cached at the deepest truncation computed so far; shallower
// requests reuse the stored entry (their extra tail terms are filtered by
// the callers' degree floors).
struct Cached {
    std::int64_t depth;
    REntry entry;
};

std::map<Key, Cached> g_cache;
std::mutex g_mutex;

REntry compute_entry(int sign, std::int64_t i, std::int64_t j, std::int64_t ip,
                     std::int64_t jp, int var_a, int var_b, std::int64_t depth) {
    REntry out;
    if (i + j != ip + jp) return out;
    bool same = (var_a == var_b);
    int xv = var_a, yv = var_b;
    QExp qpre;
    if (sign > 0) {
        if (same) {
            qpre = QExp(j + jp + 1, 2);
            out.x_exponents[xv] = QExp(-(j + jp + 1), 2);
        } else {
            qpre = QExp(2 * (j + jp) + 1, 4);
            out.x_exponents[xv] = QExp(-(ip + j + 1), 4);
            out.x_exponents[yv] = out.x_exponents.count(yv)
                                      ? out.x_exponents[yv] + QExp(-(3 * jp - i + 1), 4)
                                      : QExp(-(3 * jp - i + 1), 4);
        }
        qpre = qpre + QExp(j * jp);
        out.min_xinv_degree = QExp(j + jp + 1, 2);
        out.series_var = yv;
        LaurentQ base;
        if ((i >= jp && jp >= 0) || (0 > i && i >= jp))
            base = qbinom_q(i, i - jp);
        else if (jp >= 0 && 0 > i)
            base = qbinom_q(i, jp);
        else
            return out;
        if (base.is_zero()) return out;
        out.zero = false;
        out.terms[0] = base.shifted(qpre);
        if ((i >= jp && jp >= 0) || (0 > i && i >= jp)) {
            // finite product prod_{1<=l<=i-jp} (1 - q^{j+l} y^{-1})
            for (std::int64_t l = 1; l <= i - jp; ++l)
                mul_binomial(out.terms, -1, QExp(j + l), -1, -1);
        } else {
            // 1 / prod_{0<=l<=jp-i-1} (1 - q^{j-l} y^{-1}), geometric in y^{-1}
            for (std::int64_t l = 0; l < jp - i; ++l)
                mul_geometric(out.terms, QExp(j - l), +1, 0, depth, depth);
            out.truncated = true;
        }
    } else {
        if (same) {
            qpre = QExp(-(i + ip + 1), 2);
            out.x_exponents[xv] = QExp(i + ip + 1, 2);
        } else {
            qpre = QExp(-(2 * (i + ip) + 1), 4);
            out.x_exponents[xv] = QExp(3 * ip - j + 1, 4);
            out.x_exponents[yv] = out.x_exponents.count(yv)
                                      ? out.x_exponents[yv] + QExp(jp + i + 1, 4)
                                      : QExp(jp + i + 1, 4);
        }
        qpre = qpre - QExp(i * ip);
        out.min_xinv_degree = QExp(-(j + jp + 1), 2);
        out.series_var = xv;
        LaurentQ base;
        if ((j >= ip && ip >= 0) || (0 > j && j >= ip))
            base = qbinom_q(j, j - ip).subst_q_inverse();
        else if (ip >= 0 && 0 > j)
            base = qbinom_q(j, ip).subst_q_inverse();
        else
            return out;
        if (base.is_zero()) return out;
        out.zero = false;
        out.terms[0] = base.shifted(qpre);
        if ((j >= ip && ip >= 0) || (0 > j && j >= ip)) {
            // finite product prod_{1<=l<=j-ip} (1 - q^{-i-l} x): positive x power
            for (std::int64_t l = 1; l <= j - ip; ++l)
                mul_binomial(out.terms, +1, QExp(-i - l), -1, -1);
        } else {
            // 1/(1 - q^{-i+l} x) = -q^{i-l} x^{-1} / (1 - q^{i-l} x^{-1}):
            // geometric starting at t=1 with unit -1
            for (std::int64_t l = 0; l < ip - j; ++l)
                mul_geometric(out.terms, QExp(i - l), -1, 1, depth, depth);
            out.truncated = true;
        }
    }
    // strip vanished
    for (auto it = out.terms.begin(); it != out.terms.end();)
        it = it->second.is_zero() ? out.terms.erase(it) : std::next(it);
    if (out.terms.empty()) out.zero = true;
    return out;
}

} // namespace

REntry r_entry(int sign, std::int64_t i, std::int64_t j, std::int64_t ip,
               std::int64_t jp, int var_a, int var_b, std::int64_t depth) {
    Key key{sign, i, j, ip, jp, var_a == var_b};
    {
        std::lock_guard<std::mutex> lk(g_mutex);
        auto it = g_cache.find(key);
        if (it != g_cache.end() &&
            (!it->second.entry.truncated || it->second.depth >= depth)) {
            REntry e = it->second.entry;
            // cached entries are stored with canonical vars (0, 1); remap
            if (var_a != 0 || var_b != (var_a == var_b ? 0 : 1)) {
                REntry r = e;
                r.x_exponents.clear();
                for (const auto& [v, ex] : e.x_exponents) {
                    int tgt = (v == 0) ? var_a : var_b;
                    auto it2 = r.x_exponents.find(tgt);
                    if (it2 == r.x_exponents.end())
                        r.x_exponents[tgt] = ex;
                    else
                        it2->second = it2->second + ex;
                }
                r.series_var = (e.series_var == 0) ? var_a
                               : (e.series_var == 1) ? var_b
                                                     : -1;
                return r;
            }
            return e;
        }
    }
    int ca = 0, cb = (var_a == var_b) ? 0 : 1;
    REntry canon = compute_entry(sign, i, j, ip, jp, ca, cb, depth);
    {
        std::lock_guard<std::mutex> lk(g_mutex);
        auto it = g_cache.find(key);
        if (it == g_cache.end() || it->second.depth < depth)
            g_cache[key] = Cached{depth, canon};
    }
    return r_entry(sign, i, j, ip, jp, var_a, var_b, depth);
}

DegreeBound degree_bound(int sign, int sign_j, int sign_jp) {
    // total x^{-1}-degree >= sign * (j + j' + 1)/2 with j = -1 - j_inv on
    // minus corners.
    DegreeBound b;
    QExp half(1, 2);
    QExp s = sign > 0 ? half : -half;
    b.coef_j = sign_j > 0 ? s : -s;
    b.coef_jp = sign_jp > 0 ? s : -s;
    b.constant = s; // the +1 in (j + j' + 1)
    if (sign_j < 0) b.constant = b.constant - s;
    if (sign_jp < 0) b.constant = b.constant - s;
    return b;
}

void r_entry_cache_clear() {
    std::lock_guard<std::mutex> lk(g_mutex);
    g_cache.clear();
}

std::size_t r_entry_cache_size() {
    std::lock_guard<std::mutex> lk(g_mutex);
    return g_cache.size();
}

} // namespace fk
