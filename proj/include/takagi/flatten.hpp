#pragma once

#include <optional>
#include <string>
#include <vector>

#include "takagi/exact.hpp"

namespace takagi {

/// n+(x) = inf{n : s_n(x) < 0} - 1, or the lower bound `value` when no
/// negative slope occurs within the budget (exact == false).
struct SlopeBound {
    long value = 0;
    bool exact = false;
};

/// Throws PointInCorner, OutOfRange.
SlopeBound n_plus(const Params& p, const Rational& x, long budget);

enum class RhoRule { Fixed, Complement, ReflectRight, ReflectLeft };

const char* rule_name(RhoRule rule);

struct RhoStep {
    Rational input;
    long n0 = 0;
    Integer j0 = 0;
    RhoRule rule = RhoRule::Fixed;
    Rational output;
    /// True when the rule is Fixed only because no negative slope was seen
    /// within the budget.
    bool budget_limited = false;
    long budget = 0;
};

/// One application of the flattening map.
///   n0 = 0:                   1 - x
///   x in child rj0 of I_n0:   (rj0+1)/r^n0 - x  (reflect across its right end)
///   x in child rj0+l, l >= 1: (rj0+l)/r^n0 - x  (reflect across its left end)
/// Throws PointInCorner, OutOfRange.
RhoStep rho(const Params& p, const Rational& x, long budget);

inline constexpr long kDefaultRhoIterations = 64;

/// Iterates rho to a fixed point. Throws BudgetInconclusive after max_iter
/// non-fixed steps.
Rational pi(const Params& p, const Rational& x, long budget, long max_iter = kDefaultRhoIterations);

/// The sequence of rho steps taken by pi, ending with the fixed step.
std::vector<RhoStep> rho_orbit(const Params& p, const Rational& x, long budget,
                               long max_iter = kDefaultRhoIterations);

struct RhoLimit {
    /// Set when the iteration reached a fixed point.
    std::optional<Rational> exact;
    /// Otherwise the nested interval I_{n+(x_k)}(x_k) holding the limit.
    std::optional<IntervalAddress> enclosure;
    long iterations = 0;
};

/// Throws BudgetInconclusive when neither a fixed point nor an enclosure of
/// width <= 2^-precision_bits is reached within max_iter steps.
RhoLimit rho_infinity(const Params& p, const Rational& x, long budget, int precision_bits,
                      long max_iter = kDefaultRhoIterations);

struct PreimageSet {
    Rational target;
    /// Sorted, forward-verified: rho(c).output == target for each c.
    std::vector<Rational> values;
    /// Zero times of the target's slope walk that were tried as n0.
    std::vector<long> tried;
    long budget = 0;
};

/// All x with rho(x) = z and n+(x) <= max_n, plus z itself when z is fixed.
PreimageSet preimages_rho(const Params& p, const Rational& z, long max_n);

/// Zeros of the slope walk of a rational point, found exactly from the
/// eventually periodic increments.
struct ZeroStructure {
    /// Zero times n >= 1 in increasing order (empty when infinite).
    std::vector<long> zeros;
    bool infinite = false;
    /// Slope change over one period.
    long drift = 0;
    std::size_t preperiod = 0;
    std::size_t period = 0;

    /// n(x) = sup{n >= 0 : s_n = 0}; 0 when no zero occurs.
    long last_zero() const { return zeros.empty() ? 0 : zeros.back(); }
};

/// Throws PointInCorner when the orbit meets 0 or 1/2, BudgetInconclusive
/// when it does not close within max_steps points.
ZeroStructure zero_structure(const Params& p, const Rational& x, long max_steps);

/// x ~ x2: equal, or n(x) = n(x2) = n, I_n(x) = I_n(x2) and x - x2 in r^-n Z.
/// n(x) is certified from the exact zero structure, which requires the orbit
/// to close within `budget` points and the zero set to be finite; otherwise
/// throws BudgetInconclusive.
bool equivalent(const Params& p, const Rational& x, const Rational& x2, long budget);

enum class SignProfile { AllPositive, AllNonneg, FirstNegative };

/// Budget-relative membership in C, D, D_fin, D+ and D*.
struct PointClass {
    bool in_corner = false;
    std::optional<long> corner_level;
    SignProfile sign = SignProfile::AllNonneg;
    /// First n with s_n < 0 when sign == FirstNegative.
    long first_negative = 0;
    long zero_count = 0;
    long last_zero = 0;
    long budget = 0;
};

PointClass classify(const Params& p, const Rational& x, long budget);

const char* sign_name(SignProfile s);

/// "rule n0 j0 input output" plus a budget note for budget-limited steps.
std::string to_text(const RhoStep& step);

} // namespace takagi
