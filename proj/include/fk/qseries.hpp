// Exact arithmetic for Laurent polynomials and truncated Laurent series in q,
// plus the standard q-functions (q-binomials, Pochhammer symbols, Ramanujan
// theta) used throughout.
#ifndef FK_QSERIES_HPP
#define FK_QSERIES_HPP

#include <gmpxx.h>

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "fk/qexp.hpp"

namespace fk {

using Coef = mpz_class;

// A Laurent polynomial in q with exact integer coefficients and rational
// exponents.  No zero coefficients are stored.
class LaurentQ {
public:
    using Terms = std::map<QExp, Coef>;

    LaurentQ() = default;
    explicit LaurentQ(Terms t) : terms_(std::move(t)) { strip_zeros(); }
    static LaurentQ mono(QExp e, Coef c = 1) {
        LaurentQ r;
        if (c != 0) r.terms_.emplace(e, std::move(c));
        return r;
    }
    static LaurentQ one() { return mono(QExp(0)); }

    const Terms& terms() const { return terms_; }
    bool is_zero() const { return terms_.empty(); }
    // Valuation: minimal exponent.  Undefined on zero.
    QExp valuation() const;
    QExp max_exponent() const;
    Coef coeff(QExp e) const {
        auto it = terms_.find(e);
        return it == terms_.end() ? Coef(0) : it->second;
    }

    LaurentQ operator+(const LaurentQ& o) const;
    LaurentQ operator-(const LaurentQ& o) const;
    LaurentQ operator*(const LaurentQ& o) const;
    LaurentQ operator-() const { return scaled(-1); }
    LaurentQ scaled(const Coef& c) const;
    // Multiply by q^e.
    LaurentQ shifted(QExp e) const;
    // q -> q^{-1}.
    LaurentQ subst_q_inverse() const;
    // Drop all terms with exponent >= prec.
    LaurentQ truncated(QExp prec) const;
    // Exact division; throws if the quotient is not a Laurent polynomial.
    LaurentQ div_exact(const LaurentQ& d) const;

    bool operator==(const LaurentQ& o) const { return terms_ == o.terms_; }

    std::string str() const;
    std::string json_terms() const;

    void add_term(QExp e, const Coef& c) {
        if (c == 0) return;
        auto [it, fresh] = terms_.try_emplace(e, c);
        if (!fresh) {
            it->second += c;
            if (it->second == 0) terms_.erase(it);
        }
    }

private:
    void strip_zeros();
    Terms terms_;
};

// A truncated Laurent series in q: all exponents < prec are complete,
// exponents >= prec are unknown.
class QSeries {
public:
    QSeries() : prec_(0) {}
    QSeries(LaurentQ poly, QExp prec) : poly_(poly.truncated(prec)), prec_(prec) {}

    const LaurentQ& poly() const { return poly_; }
    QExp prec() const { return prec_; }
    bool is_zero() const { return poly_.is_zero(); }

    QSeries operator+(const QSeries& o) const;
    QSeries operator-(const QSeries& o) const;
    QSeries operator*(const QSeries& o) const;
    QSeries operator*(const LaurentQ& o) const;
    QSeries operator-() const { return QSeries(-poly_, prec_); }
    QSeries scaled(const Coef& c) const { return QSeries(poly_.scaled(c), prec_); }
    QSeries shifted(QExp e) const { return QSeries(poly_.shifted(e), prec_ + e); }
    QSeries truncated(QExp prec) const {
        return QSeries(poly_, prec < prec_ ? prec : prec_);
    }
    // Multiplicative inverse; the leading (minimal-exponent) coefficient must
    // be +-1.
    QSeries inverted() const;

    // Equality on the joint precision window; throws if compared beyond it.
    static bool agree(const QSeries& a, const QSeries& b);

    std::string str() const;
    std::string json() const;

private:
    LaurentQ poly_;
    QExp prec_;
};

// A ratio of Laurent polynomials whose denominator has an invertible
// (+-1-coefficient) leading term, so expansion to any precision is defined.
class RationalQ {
public:
    RationalQ() : num_(LaurentQ::one()), den_(LaurentQ::one()) {}
    RationalQ(LaurentQ num, LaurentQ den);

    const LaurentQ& num() const { return num_; }
    const LaurentQ& den() const { return den_; }

    RationalQ operator+(const RationalQ& o) const;
    RationalQ operator-(const RationalQ& o) const;
    RationalQ operator*(const RationalQ& o) const;
    RationalQ operator/(const RationalQ& o) const;
    RationalQ operator-() const { return RationalQ(-num_, den_); }
    RationalQ subst_q_inverse() const;

    QSeries expand(QExp prec) const;

    std::string str() const;

private:
    LaurentQ num_, den_;
};

// --- special q-functions -------------------------------------------------

// Unbalanced Gaussian binomial, extended to all integers via the product
// formula prod_{i=1..k} (1-q^{n-k+i})/(1-q^i); zero for k < 0.
LaurentQ qbinom_q(std::int64_t n, std::int64_t k);
// Balanced binomial q^{-k(n-k)/2} * qbinom_q(n,k).
LaurentQ qbinom_balanced(std::int64_t n, std::int64_t k);
// Balanced quantum integer [n] = (q^{n/2}-q^{-n/2})/(q^{1/2}-q^{-1/2}).
LaurentQ qint_balanced(std::int64_t n);

// (q^{a}; q)_n for finite n >= 0 (exact; returned at the given precision).
QSeries pochhammer(QExp a_exp, std::int64_t n, QExp prec);
// (q^{a}; q)_infty, requires a > 0.
QSeries pochhammer_inf(QExp a_exp, QExp prec);
// Ramanujan theta f(a,b) with a = sigma_a q^{a_exp}, b = sigma_b q^{b_exp}:
// sum_n sigma_a^{n(n+1)/2} sigma_b^{n(n-1)/2} q^{a n(n+1)/2 + b n(n-1)/2}.
// Requires a_exp + b_exp > 0.  Internally asserts agreement with the Jacobi
// triple product form.
QSeries ramanujan_theta(QExp a_exp, int sign_a, QExp b_exp, int sign_b, QExp prec);

// --- parsing -------------------------------------------------------------

LaurentQ parse_laurent(const std::string& text);

} // namespace fk

#endif
