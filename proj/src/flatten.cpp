#include "takagi/flatten.hpp"

#include <algorithm>
#include <sstream>
#include <stdexcept>

#include "takagi/errors.hpp"

namespace takagi {

SlopeBound n_plus(const Params& p, const Rational& x, long budget)
{
    const SlopeProfile profile = slope_profile(p, x, budget);
    for (std::size_t n = 1; n < profile.slopes.size(); ++n) {
        if (profile.slopes[n] < 0) {
            return {static_cast<long>(n) - 1, true};
        }
    }
    return {budget, false};
}

const char* rule_name(RhoRule rule)
{
    switch (rule) {
    case RhoRule::Fixed:
        return "fixed";
    case RhoRule::Complement:
        return "complement";
    case RhoRule::ReflectRight:
        return "reflectRight";
    case RhoRule::ReflectLeft:
        return "reflectLeft";
    }
    return "unknown";
}

RhoStep rho(const Params& p, const Rational& x, long budget)
{
    RhoStep step;
    step.input = x;
    step.budget = budget;
    const SlopeBound bound = n_plus(p, x, budget);
    step.n0 = bound.value;
    if (!bound.exact) {
        step.rule = RhoRule::Fixed;
        step.output = x;
        step.budget_limited = true;
        return step;
    }
    if (step.n0 == 0) {
        step.rule = RhoRule::Complement;
        step.output = Rational(1) - x;
        return step;
    }
    const Integer rn = ipow(p.r(), static_cast<unsigned long>(step.n0));
    step.j0 = locate(p, step.n0, x).j;
    const Integer child = (Rational(2 * rn) * x).floor();
    const Integer l = child - step.j0 * p.r();
    if (l == 0) {
        step.rule = RhoRule::ReflectRight;
        step.output = Rational(step.j0 * p.r() + 1, rn) - x;
    } else {
        step.rule = RhoRule::ReflectLeft;
        step.output = Rational(child, rn) - x;
    }
    return step;
}

std::vector<RhoStep> rho_orbit(const Params& p, const Rational& x, long budget, long max_iter)
{
    std::vector<RhoStep> steps;
    Rational current = x;
    for (long k = 0; k <= max_iter; ++k) {
        steps.push_back(rho(p, current, budget));
        if (steps.back().rule == RhoRule::Fixed) {
            return steps;
        }
        current = steps.back().output;
    }
    throw BudgetInconclusive("rho did not reach a fixed point within " + std::to_string(max_iter) + " steps");
}

Rational pi(const Params& p, const Rational& x, long budget, long max_iter)
{
    return rho_orbit(p, x, budget, max_iter).back().output;
}

RhoLimit rho_infinity(const Params& p, const Rational& x, long budget, int precision_bits, long max_iter)
{
    const Rational target = inverse_power(2, static_cast<unsigned long>(std::max(0, precision_bits)));
    RhoLimit out;
    std::optional<IntervalAddress> best;
    Rational current = x;
    for (long k = 0; k <= max_iter; ++k) {
        const RhoStep step = rho(p, current, budget);
        if (step.rule == RhoRule::Fixed) {
            out.exact = current;
            out.iterations = k;
            return out;
        }
        // Every later iterate stays in I_{n0}(current).
        if (step.n0 >= 1 && width(p, step.n0) <= target) {
            best = IntervalAddress{step.n0, step.j0};
        }
        current = step.output;
    }
    if (best) {
        out.enclosure = best;
        out.iterations = max_iter;
        return out;
    }
    throw BudgetInconclusive("rho iteration neither stabilized nor narrowed to 2^-" +
                             std::to_string(precision_bits) + " within " + std::to_string(max_iter) + " steps");
}

PreimageSet preimages_rho(const Params& p, const Rational& z, long max_n)
{
    PreimageSet out;
    out.target = z;
    out.budget = max_n + 1;
    std::vector<Rational> candidates{Rational(1) - z, z};
    // n+(x) = n0 >= 1 forces s_n0(x) = 0, and |s_n| is preserved by rho.
    for (long n0 : slope_profile(p, z, max_n).zero_times()) {
        out.tried.push_back(n0);
        const Integer rn = ipow(p.r(), static_cast<unsigned long>(n0));
        const Integer j0 = locate(p, n0, z).j;
        for (long l = 1; l < p.r(); ++l) {
            candidates.push_back(Rational(j0 * p.r() + l, rn) - z);
        }
    }
    for (const Rational& c : candidates) {
        if (c.sign() < 0 || c >= Rational(1)) {
            continue;
        }
        try {
            const RhoStep step = rho(p, c, out.budget);
            if (step.output == z && (step.rule != RhoRule::Fixed || c == z) &&
                (step.rule == RhoRule::Fixed || step.n0 <= max_n)) {
                out.values.push_back(c);
            }
        } catch (const PointInCorner&) {
            // corners are outside the domain of rho
        }
    }
    std::sort(out.values.begin(), out.values.end());
    out.values.erase(std::unique(out.values.begin(), out.values.end()), out.values.end());
    return out;
}

ZeroStructure zero_structure(const Params& p, const Rational& x, long max_steps)
{
    if (x.sign() < 0 || x >= Rational(1)) {
        throw OutOfRange("zero_structure: x = " + x.to_string() + " is outside [0,1)");
    }
    const auto o = orbit(p, x, static_cast<std::size_t>(std::max(1L, max_steps)));
    if (!o) {
        throw BudgetInconclusive("orbit of " + x.to_string() + " did not close within " +
                                 std::to_string(max_steps) + " points");
    }
    for (std::size_t k = 0; k < o->residues.size(); ++k) {
        const Integer& a = o->residues[k];
        if (a == 0 || 2 * a == o->denominator) {
            throw PointInCorner(x.to_string() + " is a corner at level " + std::to_string(k));
        }
    }
    ZeroStructure zs;
    zs.preperiod = o->preperiod;
    zs.period = o->period;
    const std::size_t span = o->preperiod + o->period;
    std::vector<long> s(span + 1, 0);
    for (std::size_t k = 0; k < span; ++k) {
        s[k + 1] = s[k] + o->increment(k);
    }
    zs.drift = s[span] - s[o->preperiod];
    for (std::size_t k = 1; k < o->preperiod; ++k) {
        if (s[k] == 0) {
            zs.zeros.push_back(static_cast<long>(k));
        }
    }
    // s_{l+i+tp} = s_{l+i} + t * drift for t >= 0.
    for (std::size_t i = 0; i < o->period; ++i) {
        const std::size_t k0 = o->preperiod + i;
        const long s0 = s[k0];
        if (zs.drift == 0) {
            if (s0 == 0) {
                zs.infinite = true;
                zs.zeros.clear();
                return zs;
            }
            continue;
        }
        if (s0 % zs.drift != 0 || -s0 / zs.drift < 0) {
            continue;
        }
        const long k = static_cast<long>(k0) + (-s0 / zs.drift) * static_cast<long>(o->period);
        if (k >= 1) {
            zs.zeros.push_back(k);
        }
    }
    std::sort(zs.zeros.begin(), zs.zeros.end());
    return zs;
}

bool equivalent(const Params& p, const Rational& x, const Rational& x2, long budget)
{
    if (x == x2) {
        return true;
    }
    const auto certified_n = [&](const Rational& v) {
        const ZeroStructure zs = zero_structure(p, v, budget);
        if (zs.infinite) {
            throw BudgetInconclusive("n(" + v.to_string() + ") is infinite: the slope walk returns to 0 forever");
        }
        return zs.last_zero();
    };
    const long n = certified_n(x);
    if (certified_n(x2) != n) {
        return false;
    }
    if (n >= 1 && locate(p, n, x) != locate(p, n, x2)) {
        return false;
    }
    const Rational m = (x - x2) * Rational(ipow(p.r(), static_cast<unsigned long>(n)));
    if (!m.is_integer()) {
        return false;
    }
    if (Rational(2) * m.abs() >= Rational(p.r())) {
        throw std::logic_error("equivalent: |m| >= r/2 for points sharing I_n");
    }
    return true;
}

PointClass classify(const Params& p, const Rational& x, long budget)
{
    PointClass c;
    c.budget = budget;
    c.corner_level = corner_level(p, x, budget);
    if (c.corner_level) {
        c.in_corner = true;
        return c;
    }
    const SlopeProfile profile = slope_profile(p, x, budget);
    bool positive = true;
    for (std::size_t n = 1; n < profile.slopes.size(); ++n) {
        const long s = profile.slopes[n];
        if (s < 0) {
            c.sign = SignProfile::FirstNegative;
            c.first_negative = static_cast<long>(n);
            break;
        }
        positive = positive && s > 0;
    }
    if (c.sign != SignProfile::FirstNegative) {
        c.sign = positive ? SignProfile::AllPositive : SignProfile::AllNonneg;
    }
    const auto zeros = profile.zero_times();
    c.zero_count = static_cast<long>(zeros.size());
    c.last_zero = zeros.empty() ? 0 : zeros.back();
    return c;
}

const char* sign_name(SignProfile s)
{
    switch (s) {
    case SignProfile::AllPositive:
        return "allPositive";
    case SignProfile::AllNonneg:
        return "allNonneg";
    case SignProfile::FirstNegative:
        return "firstNegativeAt";
    }
    return "unknown";
}

std::string to_text(const RhoStep& step)
{
    std::ostringstream out;
    out << "rule " << rule_name(step.rule) << "\n"
        << "n0 " << step.n0 << "\n"
        << "j0 " << step.j0.get_str() << "\n"
        << "input " << step.input << "\n"
        << "output " << step.output << "\n";
    if (step.budget_limited) {
        out << "certified_to_budget " << step.budget << "\n";
    }
    return out.str();
}

} // namespace takagi
