// Exact rational exponents for q- and x-gradings.
#ifndef FK_QEXP_HPP
#define FK_QEXP_HPP

#include <cstdint>
#include <compare>
#include <numeric>
#include <stdexcept>
#include <string>

namespace fk {

// An exact rational number used as an exponent of q or of an x-variable.
// Always stored in canonical reduced form with a positive denominator.
struct QExp {
    std::int64_t num{0};
    std::int64_t den{1};

    QExp() = default;
    QExp(std::int64_t n) : num(n), den(1) {}
    QExp(std::int64_t n, std::int64_t d) : num(n), den(d) { normalize(); }

    void normalize() {
        if (den == 0) throw std::invalid_argument("QExp: zero denominator");
        if (den < 0) { num = -num; den = -den; }
        std::int64_t g = std::gcd(num < 0 ? -num : num, den);
        if (g > 1) { num /= g; den /= g; }
        if (num == 0) den = 1;
    }

    friend QExp operator+(QExp a, QExp b) {
        return QExp(a.num * b.den + b.num * a.den, a.den * b.den);
    }
    friend QExp operator-(QExp a, QExp b) {
        return QExp(a.num * b.den - b.num * a.den, a.den * b.den);
    }
    friend QExp operator*(QExp a, QExp b) { return QExp(a.num * b.num, a.den * b.den); }
    friend QExp operator/(QExp a, QExp b) {
        if (b.num == 0) throw std::invalid_argument("QExp: division by zero");
        return QExp(a.num * b.den, a.den * b.num);
    }
    QExp operator-() const { QExp r; r.num = -num; r.den = den; return r; }
    QExp& operator+=(QExp o) { *this = *this + o; return *this; }
    QExp& operator-=(QExp o) { *this = *this - o; return *this; }

    friend bool operator==(QExp a, QExp b) { return a.num == b.num && a.den == b.den; }
    friend std::strong_ordering operator<=>(QExp a, QExp b) {
        // Cross-multiplication is exact; exponents stay small in practice but
        // use __int128 to be safe.
        __int128 l = static_cast<__int128>(a.num) * b.den;
        __int128 r = static_cast<__int128>(b.num) * a.den;
        if (l < r) return std::strong_ordering::less;
        if (l > r) return std::strong_ordering::greater;
        return std::strong_ordering::equal;
    }

    bool is_integer() const { return den == 1; }
    // Largest integer <= value.
    std::int64_t floor() const {
        std::int64_t q = num / den;
        if (num % den != 0 && num < 0) --q;
        return q;
    }

    std::string str() const {
        if (den == 1) return std::to_string(num);
        return std::to_string(num) + "/" + std::to_string(den);
    }
    // JSON key form, always "num/den".
    std::string key() const { return std::to_string(num) + "/" + std::to_string(den); }

    static QExp parse(const std::string& s);
};

} // namespace fk

#endif
