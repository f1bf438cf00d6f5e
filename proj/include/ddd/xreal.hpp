#pragma once

#include <cassert>
#include <cmath>
#include <limits>

namespace ddd {

/* Extended real value in R ∪ {+inf}.
 *
 * Conjugates of indicator-carrying terms are genuinely extended-valued, so
 * +inf is a first-class value here, not an error state.  -inf and NaN are
 * not representable: addition saturates at +inf, subtraction requires a
 * finite right operand, and scaling uses the convex-analysis convention
 * 0 * (+inf) = 0. */
struct xreal {
    double v = 0.0;

    xreal() = default;
    xreal(double d) : v(d) { assert(!std::isnan(d)); }

    static xreal inf() { return xreal(std::numeric_limits<double>::infinity()); }

    bool finite() const { return std::isfinite(v); }
    bool is_inf() const { return std::isinf(v); }

    /* Finite payload; calling on +inf is a logic error. */
    double value() const {
        assert(finite());
        return v;
    }

    friend xreal operator+(xreal a, xreal b) {
        if (a.is_inf() || b.is_inf()) return inf();
        return xreal(a.v + b.v);
    }
    friend xreal operator-(xreal a, xreal b) {
        assert(b.finite());
        if (a.is_inf()) return inf();
        return xreal(a.v - b.v);
    }
    xreal& operator+=(xreal o) { return *this = *this + o; }

    /* s >= 0; 0 * (+inf) = 0. */
    friend xreal operator*(double s, xreal a) {
        assert(s >= 0.0);
        if (a.is_inf()) return s == 0.0 ? xreal(0.0) : inf();
        return xreal(s * a.v);
    }

    friend bool operator<(xreal a, xreal b) { return a.v < b.v; }
    friend bool operator<=(xreal a, xreal b) { return a.v <= b.v; }
    friend bool operator>(xreal a, xreal b) { return a.v > b.v; }
    friend bool operator>=(xreal a, xreal b) { return a.v >= b.v; }
    friend bool operator==(xreal a, xreal b) { return a.v == b.v; }
};

} // namespace ddd
