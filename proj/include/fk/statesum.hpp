// Inverted state sum Z^inv and F_L for braid closures with certified
// inversion data, the q=1 Alexander oracle, and classical-limit checks.
#ifndef FK_STATESUM_HPP
#define FK_STATESUM_HPP

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "fk/braid.hpp"
#include "fk/qseries.hpp"

namespace fk {

// A series in several x-variables (one per link component) with exact
// q-series coefficients.  Exponents are rationals in (1/4)Z; stored vectors
// lie inside the per-component truncation window (exponent >= -x_order - 1).
struct MultiXSeries {
    std::map<std::vector<QExp>, QSeries> terms;
    std::vector<QExp> x_orders;
    std::vector<std::string> component_names;

    int ncomp() const { return static_cast<int>(x_orders.size()); }
    void add(const std::vector<QExp>& e, const QSeries& c);
    QSeries coeff(const std::vector<QExp>& e) const;
    // Keep only terms with e[c] >= -x_orders[c] - margin for every c.
    MultiXSeries filtered(QExp margin) const;
    // Multiply every coefficient by sign * q^{shift}.
    MultiXSeries unit_scaled(int sign, QExp shift) const;

    std::string str() const;
    std::string json() const;
};

// True if a == sign * q^{shift} * b for some sign in {+1,-1} and rational
// shift; reports the matched unit.  Comparison is exact on shared terms.
struct UnitMatch {
    bool ok{false};
    int sign{1};
    QExp q_shift;
};
UnitMatch match_up_to_unit(const MultiXSeries& a, const MultiXSeries& b);

struct StateSumConfig {
    // Truncation per component: keep x-exponents >= -x_order - 1/2 in F.
    std::vector<QExp> x_orders;
    // Basis index of the open strand's vector; INT32_MIN means the default
    // (0 on a +-signed open strand, -1 on a --signed one).
    int open_vector_index{INT32_MIN};
    // Override for the certificate state cap (-1 = use certificate).
    std::int64_t cap_override{-1};

    StateSumConfig() = default;
    explicit StateSumConfig(QExp order, int ncomp = 1)
        : x_orders(static_cast<std::size_t>(ncomp), order) {}
};

struct StateSumStats {
    std::uint64_t states_visited{0};  // crossing-output assignments explored
    std::uint64_t states_closed{0};   // complete states surviving closure
    std::int64_t cap{0};
};

// The inverted state sum Z^inv = (-1)^s sum over states of prod R-entries
// times closure factors x_c^{1/2} q^{-1/2-n}.  The open segment is fixed to
// the configured basis vector.  Enumeration is bounded by the certificate.
MultiXSeries inverted_state_sum(const Diagram& d, const SignAssignment& s,
                                const ConvergenceCertificate& cert,
                                const StateSumConfig& cfg,
                                SignMode mode = SignMode::multicycle,
                                StateSumStats* stats = nullptr);

// F_L = (x_open^{1/2} - x_open^{-1/2}) * Z^inv.
MultiXSeries f_series(const Diagram& d, const SignAssignment& s,
                      const ConvergenceCertificate& cert,
                      const StateSumConfig& cfg,
                      SignMode mode = SignMode::multicycle,
                      StateSumStats* stats = nullptr);

// det(I - B) for the q=1 one-particle random walk on the closed diagram,
// from the parametrized R-matrix weights specialized at q=1
// (alpha = beta = x^{-1/2}, gamma = 1 - x^{-1} for positive crossings and
// x^{1/2}, 1 - x for negative ones; x is the over-strand's variable).
// Equals the (multivariable) Alexander polynomial up to a unit +-x^{k/2},
// returned with constant q-coefficients.
MultiXSeries alexander_oracle(const Diagram& d);

// Sets q = 1 in F and compares with the x^{-1}-expansion of
// (x^{1/2}-x^{-1/2})/Delta up to one global unit monomial +-x^{k/2}.
// Knots only (one component).
struct ClassicalLimitResult {
    bool ok{false};
    int sign{1};
    QExp x_shift;
};
ClassicalLimitResult classical_limit_check(const MultiXSeries& F,
                                           const LaurentQ& delta_x);

// Convenience: the oracle determinant collapsed to a one-variable Laurent
// polynomial in x (requires a knot diagram).
LaurentQ alexander_poly(const Diagram& d);

} // namespace fk

#endif
