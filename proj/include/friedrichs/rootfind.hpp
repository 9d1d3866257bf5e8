#pragma once

// Safeguarded scalar root finding for monotone functions: secant steps
// accepted only while they stay inside the bracket, bisection otherwise.

#include <cmath>
#include <stdexcept>

namespace friedrichs::detail {

struct RootResult {
    double x = 0.0;
    double fx = 0.0;
    double lo = 0.0;     // final bracket
    double hi = 0.0;
    int iterations = 0;
};

// f strictly increasing with f(lo) < 0 < f(hi).  Stops when the bracket is
// narrower than xtol or |f| falls below ftol.
template <class F>
RootResult find_increasing_root(F&& f, double lo, double hi, double flo, double fhi, double xtol,
                                double ftol, int max_iter = 200) {
    if (!(flo < 0.0) || !(fhi > 0.0))
        throw std::invalid_argument("find_increasing_root: bracket does not straddle a root");
    RootResult res;
    double x = 0.5 * (lo + hi);
    double fx = 0.0;
    for (int it = 0; it < max_iter; ++it) {
        // Secant through the bracket ends, clipped away from the endpoints.
        double cand = hi - fhi * (hi - lo) / (fhi - flo);
        if (!(cand > lo && cand < hi)) cand = 0.5 * (lo + hi);
        x = cand;
        fx = f(x);
        res.iterations = it + 1;
        if (fx < 0.0) {
            lo = x;
            flo = fx;
        } else {
            hi = x;
            fhi = fx;
        }
        if (hi - lo <= xtol || std::abs(fx) <= ftol) break;
    }
    res.x = x;
    res.fx = fx;
    res.lo = lo;
    res.hi = hi;
    return res;
}

}  // namespace friedrichs::detail
