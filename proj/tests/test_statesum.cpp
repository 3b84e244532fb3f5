#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <string>
#include <vector>

#include "fk/statesum.hpp"

using namespace fk;

namespace {

struct Setup {
    Diagram d;
    SignAssignment signs;
    ConvergenceCertificate cert;
};

Setup setup(const std::string& word, int strands = 0) {
    Setup s{build_diagram(parse_braid(word, strands)), {}, {}};
    auto hs = homogeneous_signs(s.d);
    REQUIRE(hs.has_value());
    s.signs = *hs;
    auto cert = certify_convergence(s.d, s.signs);
    REQUIRE(cert.has_value());
    s.cert = *cert;
    return s;
}

MultiXSeries f_of(const std::string& word, QExp x_order, int ncomp = 1,
                  SignMode mode = SignMode::definition,
                  StateSumStats* stats = nullptr, int strands = 0) {
    Setup s = setup(word, strands);
    StateSumConfig cfg(x_order, ncomp);
    return f_series(s.d, s.signs, s.cert, cfg, mode, stats);
}

// The q-series coefficient of x1^{e1} (knot case).
LaurentQ at(const MultiXSeries& f, QExp e1) {
    return f.coeff({e1}).poly();
}

LaurentQ at2(const MultiXSeries& f, QExp e1, QExp e2) {
    return f.coeff({e1, e2}).poly();
}

LaurentQ q_inverse(const LaurentQ& p) { return p.subst_q_inverse(); }

MultiXSeries q_inverse(const MultiXSeries& f) {
    MultiXSeries out;
    out.x_orders = f.x_orders;
    out.component_names = f.component_names;
    for (const auto& [e, c] : f.terms)
        out.terms.emplace(e, QSeries(c.poly().subst_q_inverse(), kExactPrec));
    return out;
}

// a == sign * x^{shift} * b for a one-variable Laurent polynomial unit.
bool unit_eq(const LaurentQ& a, const LaurentQ& b) {
    if (a.is_zero() || b.is_zero()) return a.is_zero() && b.is_zero();
    QExp shift = a.valuation() - b.valuation();
    LaurentQ s = b.shifted(shift);
    return a == s || a == s.scaled(-1);
}

} // namespace

TEST_CASE("one-strand empty braid: F of the unknot") {
    auto f = f_of("", QExp(3), 1, SignMode::definition, nullptr, 1);
    CHECK(f.terms.size() == 2);
    CHECK(at(f, QExp(1, 2)) == LaurentQ::one());
    CHECK(at(f, QExp(-1, 2)) == LaurentQ::mono(QExp(0), -1));
    // One-crossing unknots agree with the empty diagram exactly.
    CHECK(f_of("1", QExp(3)).str() == f.str());
    CHECK(f_of("-1", QExp(3)).str() == f.str());
}

TEST_CASE("figure-eight: printed series, sign modes, pruning") {
    StateSumStats st;
    auto f = f_of("1 -2 1 -2", QExp(4), 1, SignMode::definition, &st);
    CHECK(at(f, QExp(-1, 2)) == parse_laurent("-1"));
    CHECK(at(f, QExp(-3, 2)) == parse_laurent("-2"));
    CHECK(at(f, QExp(-5, 2)) == parse_laurent("-1/q - 3 - q"));
    CHECK(at(f, QExp(-7, 2)) == parse_laurent("-2/q^2 - 2/q - 5 - 2*q - 2*q^2"));
    CHECK(at(f, QExp(-9, 2)) ==
          parse_laurent("-1/q^4 - 3/q^3 - 4/q^2 - 5/q - 8 - 5*q - 4*q^2 - "
                        "3*q^3 - q^4"));
    // The certificate bounds enumeration: the optimum is 1/3 and the DFS
    // visits well under the raw (cap+1)^2-per-crossing grid.
    CHECK(st.cap == 39);
    CHECK(st.states_visited < 2000);
    // Amphichiral: the coefficients are symmetric under q -> 1/q.
    for (const auto& [e, c] : f.terms) CHECK(q_inverse(c.poly()) == c.poly());
    // The multicycle sign convention can differ only by a global sign.
    auto fm = f_of("1 -2 1 -2", QExp(4), 1, SignMode::multicycle);
    auto m = match_up_to_unit(f, fm);
    CHECK(m.ok);
    CHECK(m.q_shift == QExp(0));
}

TEST_CASE("figure-eight: conjugated braid word gives the same series") {
    auto a = f_of("1 -2 1 -2", QExp(2));
    auto b = f_of("-2 1 -2 1", QExp(2));
    // Both windows contain everything down to x^{-5/2}; compare there.
    for (QExp e : {QExp(-1, 2), QExp(-3, 2), QExp(-5, 2)})
        CHECK(at(a, e) == at(b, e));
}

TEST_CASE("trefoil: positive braid, stabilization, mirror") {
    auto t = f_of("1 1 1", QExp(3));
    CHECK(at(t, QExp(-1, 2)) == parse_laurent("q"));
    CHECK(at(t, QExp(-3, 2)) == LaurentQ());
    CHECK(at(t, QExp(-5, 2)) == parse_laurent("-q^2"));
    CHECK(at(t, QExp(-7, 2)) == parse_laurent("-q^3"));
    // Markov stabilization leaves F unchanged.
    auto ts = f_of("1 1 1 2", QExp(3));
    CHECK(ts.str() == t.str());
    // The mirror inverts q.
    auto tm = f_of("-1 -1 -1", QExp(3));
    CHECK(q_inverse(t).str() == tm.str());
}

TEST_CASE("6_2: printed series and mirror") {
    auto f = f_of("1 1 1 -2 1 -2", QExp(9, 2));
    CHECK(at(f, QExp(-1, 2)) == LaurentQ());
    CHECK(at(f, QExp(-3, 2)) == parse_laurent("-q"));
    CHECK(at(f, QExp(-5, 2)) == parse_laurent("-2*q"));
    CHECK(at(f, QExp(-7, 2)) == parse_laurent("-1 - 3*q + q^2"));
    CHECK(at(f, QExp(-9, 2)) == parse_laurent("-2/q - 2 - 4*q + 2*q^2"));
    auto fm = f_of("-1 -1 -1 2 -1 2", QExp(9, 2));
    CHECK(q_inverse(f).str() == fm.str());
}

TEST_CASE("6_3: printed series, amphichirality, classical limit") {
    Setup s = setup("1 1 -2 1 -2 -2");
    StateSumConfig cfg(QExp(9, 2), 1);
    auto f = f_series(s.d, s.signs, s.cert, cfg, SignMode::definition);
    CHECK(at(f, QExp(-3, 2)) == parse_laurent("1"));
    CHECK(at(f, QExp(-5, 2)) == parse_laurent("2"));
    CHECK(at(f, QExp(-7, 2)) == parse_laurent("-1/q + 3 - q"));
    CHECK(at(f, QExp(-9, 2)) ==
          parse_laurent("-2/q^2 - 2/q + 4 - 2*q - 2*q^2"));
    for (const auto& [e, c] : f.terms) CHECK(q_inverse(c.poly()) == c.poly());
    auto res = classical_limit_check(f, alexander_poly(s.d));
    CHECK(res.ok);
}

TEST_CASE("Whitehead link: printed coefficient table") {
    auto f = f_of("1 -2 1 -2 1", QExp(7, 2), 2);
    // F = -q^{1/2} sum f_{n,m} x1^{-n-1/2} x2^{-m-1/2}.
    auto fnm = [&](int n, int m) {
        return at2(f, QExp(-2 * n - 1, 2), QExp(-2 * m - 1, 2))
            .shifted(QExp(-1, 2))
            .scaled(-1);
    };
    for (int m = 0; m <= 3; ++m) {
        CHECK(fnm(0, m) == LaurentQ::one());
        CHECK(fnm(m, 0) == LaurentQ::one());
    }
    CHECK(fnm(1, 1) == parse_laurent("1/q + 1 - q"));
    CHECK(fnm(1, 2) == parse_laurent("1/q^2 + 1/q + 1 - q - q^2"));
    CHECK(fnm(1, 3) == parse_laurent("1/q^3 + 1/q^2 + 1/q + 1 - q - q^2 - q^3"));
    CHECK(fnm(2, 2) ==
          parse_laurent("1/q^4 + 1/q^3 + 2/q^2 + 1/q - 2*q - 2*q^2"));
    CHECK(fnm(2, 3) ==
          parse_laurent("1/q^6 + 1/q^5 + 2/q^4 + 2/q^3 + 2/q^2 - 1 - 3*q - "
                        "3*q^2 - q^3 + q^5"));
    CHECK(fnm(3, 3) ==
          parse_laurent("1/q^9 + 1/q^8 + 2/q^7 + 3/q^6 + 3/q^5 + 3/q^4 + "
                        "2/q^3 - 3/q - 4 - 6*q - 4*q^2 - 2*q^3 + q^4 + "
                        "2*q^5 + q^6 + q^7"));
    // Symmetric in the two components.
    for (int n = 0; n <= 3; ++n)
        for (int m = 0; m < n; ++m) CHECK(fnm(n, m) == fnm(m, n));
}

TEST_CASE("Borromean rings: printed coefficient table") {
    auto f = f_of("1 -2 1 -2 1 -2", QExp(5, 2), 3);
    // F = + sum f_{n,m,l} x1^{-n-1/2} x2^{-m-1/2} x3^{-l-1/2}, no prefactor.
    auto g = [&](int n, int m, int l) {
        return f
            .coeff({QExp(-2 * n - 1, 2), QExp(-2 * m - 1, 2),
                    QExp(-2 * l - 1, 2)})
            .poly();
    };
    for (int m = 0; m <= 2; ++m)
        for (int l = 0; l <= 2; ++l) CHECK(g(0, m, l) == LaurentQ::one());
    CHECK(g(1, 1, 1) == parse_laurent("-1/q^2 + 3 - q^2"));
    CHECK(g(1, 1, 2) ==
          parse_laurent("-1/q^3 - 1/q^2 + 1/q + 3 + q - q^2 - q^3"));
    CHECK(g(1, 2, 2) ==
          parse_laurent("-1/q^4 - 2/q^3 - 1/q^2 + 2/q + 5 + 2*q - q^2 - "
                        "2*q^3 - q^4"));
    CHECK(g(2, 2, 2) ==
          parse_laurent("1/q^7 - 1/q^5 - 5/q^4 - 6/q^3 - 1/q^2 + 6/q + 13 + "
                        "6*q - q^2 - 6*q^3 - 5*q^4 - q^5 + q^7"));
    // Fully symmetric and amphichiral.
    CHECK(g(2, 1, 1) == g(1, 1, 2));
    CHECK(g(2, 2, 1) == g(1, 2, 2));
    for (const auto& [e, c] : f.terms) CHECK(q_inverse(c.poly()) == c.poly());
}

TEST_CASE("L7a1: printed coefficient rows") {
    auto f = f_of("1 1 -2 1 -2 1 -2", QExp(7, 2), 2);
    // F = + q^{1/2} sum f_{n,m} x1^{-n-1/2} x2^{-m-1/2}.
    auto fnm = [&](int n, int m) {
        return at2(f, QExp(-2 * n - 1, 2), QExp(-2 * m - 1, 2))
            .shifted(QExp(-1, 2));
    };
    for (int m = 0; m <= 3; ++m) {
        CHECK(fnm(0, m) == LaurentQ());
        CHECK(fnm(1, m) == LaurentQ::one());
        CHECK(fnm(2, m) == parse_laurent("2"));
    }
    CHECK(fnm(3, 0) == parse_laurent("3 - q"));
    CHECK(fnm(3, 1) == parse_laurent("-1/q^2 + 4 - q"));
    CHECK(fnm(3, 2) == parse_laurent("-1/q^3 - 1/q^2 + 4"));
    CHECK(fnm(3, 3) == parse_laurent("-1/q^4 - 1/q^3 - 1/q^2 + 4 + q^2"));
}

TEST_CASE("Alexander oracle") {
    // Unknot.
    CHECK(unit_eq(alexander_poly(build_diagram(parse_braid("1"))),
                  LaurentQ::one()));
    // Trefoil: x - 1 + 1/x up to a unit.
    CHECK(unit_eq(alexander_poly(build_diagram(parse_braid("1 1 1"))),
                  parse_laurent("q - 1 + 1/q")));
    // Figure-eight: x - 3 + 1/x up to a unit.
    CHECK(unit_eq(alexander_poly(build_diagram(parse_braid("1 -2 1 -2"))),
                  parse_laurent("q - 3 + 1/q")));
    // 6_2 and 6_3 are covered through the classical-limit cases below.
}

TEST_CASE("classical limit against the Alexander oracle") {
    for (const char* w : {"1 1 1", "1 -2 1 -2", "1 1 1 -2 1 -2",
                          "1 1 -2 1 -2 -2"}) {
        CAPTURE(w);
        Setup s = setup(w);
        StateSumConfig cfg(QExp(4), 1);
        auto f = f_series(s.d, s.signs, s.cert, cfg, SignMode::definition);
        auto res = classical_limit_check(f, alexander_poly(s.d));
        CHECK(res.ok);
    }
}

TEST_CASE("match_up_to_unit") {
    auto a = f_of("1 -2 1 -2", QExp(2));
    auto b = a.unit_scaled(-1, QExp(3, 2));
    auto m = match_up_to_unit(a, b);
    CHECK(m.ok);
    CHECK(m.sign == -1);
    CHECK(m.q_shift == QExp(-3, 2));
    auto c = f_of("1 1 1", QExp(2));
    CHECK(!match_up_to_unit(a, c).ok);
}
