// Extended large-color R-matrix entries (single- and two-variable) as
// x-monomial-graded exact q-series, with degree-bound metadata and a
// memoized entry cache.
#ifndef FK_RMATRIX_HPP
#define FK_RMATRIX_HPP

#include <cstdint>
#include <map>

#include "fk/qseries.hpp"

namespace fk {

// One R-matrix entry.  The value is
//   sum_{(e, c) in terms} c(q) * prod_v x_v^{x_exponents[v]} * x_{series_var}^e,
// i.e. a fixed monomial prefactor in the strand variables times a polynomial /
// truncated series in the series variable.  Geometric branches are expanded to
// the precision requested at construction.
struct REntry {
    bool zero{true};
    std::map<int, QExp> x_exponents;         // component id -> base exponent
    int series_var{-1};                      // component carrying the offsets
    std::map<std::int64_t, LaurentQ> terms;  // offset -> q-coefficient
    QExp min_xinv_degree;                    // Eq. (2) lower bound, total over vars
    bool truncated{false};                   // true if a geometric branch was cut

    bool is_zero() const { return zero; }
};

// Entry of R (sign=+1) or R^{-1} (sign=-1) with corners (i, j, i', j') in
// (bottom-left, bottom-right, top-left, top-right) order.  var_a is the
// component of the strand entering at i (leaving at j'), var_b the one
// entering at j (leaving at i').  When var_a == var_b the single-variable
// formula R(x) = q^{1/4} R(x,x) is used.  depth = number of series orders
// kept for each geometric factor.
REntry r_entry(int sign, std::int64_t i, std::int64_t j, std::int64_t ip,
               std::int64_t jp, int var_a, int var_b, std::int64_t depth);

// Per-crossing contribution to the convergence degree functional, in the
// (possibly inverted) variables of the j and j' corners: the contribution is
// coef_j * v_j + coef_jp * v_jp + constant, a lower bound on the total
// x^{-1}-degree.  sign_j / sign_jp are the segment signs of the j / j'
// corners.
struct DegreeBound {
    QExp coef_j, coef_jp, constant;
};
DegreeBound degree_bound(int sign, int sign_j, int sign_jp);

// Clears the memo table (mainly for tests / memory control).
void r_entry_cache_clear();
std::size_t r_entry_cache_size();

} // namespace fk

#endif
