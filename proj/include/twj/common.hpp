#pragma once

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

namespace twj {

enum class Ensemble { real, complex };

inline const char* to_string(Ensemble e) { return e == Ensemble::real ? "real" : "complex"; }

// Bad user input (maps to CLI exit code 2).
class validation_error : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// A numerical routine failed to reach its target (CLI exit code 3).
class numerical_error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

using Caveats = std::vector<std::string>;

namespace caveat {
inline constexpr const char* odd_p =
    "p-odd: second-order accuracy of the real-case approximation is established for even p only";
inline constexpr const char* boundary_m_eq_p =
    "boundary: m == p puts the upper turning point at the hard edge";
inline constexpr const char* extrapolated =
    "approximate: evaluated outside the tabulated Tracy-Widom grid using tail asymptotics";
inline constexpr const char* p_exceeds_n =
    "p > n: only n roots are nonzero; the Wachter law describes the nonzero part";
}  // namespace caveat

inline void add_caveat(Caveats& c, const std::string& flag) {
    for (const auto& x : c)
        if (x == flag) return;
    c.push_back(flag);
}

inline double logistic(double w) {
    return w >= 0 ? 1.0 / (1.0 + std::exp(-w)) : std::exp(w) / (1.0 + std::exp(w));
}

inline double logit(double theta) {
    if (!(theta > 0.0 && theta < 1.0))
        throw validation_error("theta must lie strictly inside (0, 1)");
    return std::log(theta) - std::log1p(-theta);
}

}  // namespace twj
