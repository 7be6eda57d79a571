#include "takagi/cli.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>
#include <unistd.h>

#include <CLI11.hpp>
#include <json.hpp>

#include "takagi/crw.hpp"
#include "takagi/errors.hpp"
#include "takagi/exact.hpp"
#include "takagi/flatten.hpp"
#include "takagi/levelset.hpp"
#include "takagi/plot.hpp"
#include "takagi/random.hpp"
#include "takagi/selfsim.hpp"

namespace takagi::cli {

namespace {

using Json = nlohmann::ordered_json;

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct Config {
    long r = 2;
    std::string x;
    std::string x2;
    std::string y;
    std::optional<long> depth;
    std::optional<long> budget;
    std::optional<long> levels;
    std::optional<std::uint64_t> seed;
    std::optional<long> samples;
    std::optional<long> bins;
    std::optional<int> precision;
    std::string j = "0";
    std::string constraint = "none";
    bool flying = false;
    int width = 800;
    int height = 400;
    std::string out;
    std::string format = "text";
};

std::string fmt_double(double v)
{
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

Rational rational_arg(const std::string& text, const char* flag)
{
    if (text.empty()) {
        throw UsageError(std::string(flag) + " is required");
    }
    try {
        return Rational::parse(text);
    } catch (const std::invalid_argument& e) {
        throw UsageError(std::string(flag) + ": " + e.what());
    }
}

void require_format(const Config& c, std::initializer_list<const char*> allowed)
{
    for (const char* f : allowed) {
        if (c.format == f) {
            return;
        }
    }
    std::string list;
    for (const char* f : allowed) {
        list += list.empty() ? f : std::string("|") + f;
    }
    throw UsageError("--format " + c.format + " not supported here; use " + list);
}

Json envelope(const char* command, const Config& c)
{
    Json j;
    j["schemaVersion"] = kSchemaVersion;
    j["command"] = command;
    j["r"] = c.r;
    return j;
}

std::string dump(const Json& j) { return j.dump(2) + "\n"; }

Json to_json(const Rational& v) { return v.to_string(); }

Json address_json(const IntervalAddress& a) { return Json{{"n", a.n}, {"j", a.j.get_str()}}; }

std::string seed_comment(std::uint64_t seed)
{
    return "# seed " + std::to_string(seed) + " stream takagi-stream v" + std::to_string(Stream::kVersion) + "\n";
}

std::uint64_t required_seed(const Config& c)
{
    if (!c.seed) {
        throw UsageError("--seed is required for stochastic commands");
    }
    return *c.seed;
}

// Commands ---------------------------------------------------------------

std::string cmd_eval(const Config& c)
{
    require_format(c, {"text", "json"});
    const Params p(c.r);
    const Rational x = rational_arg(c.x, "--x");
    const Rational v = eval(p, x);
    if (c.format == "json") {
        Json j = envelope("eval", c);
        j["x"] = to_json(x);
        j["value"] = to_json(v);
        return dump(j);
    }
    return v.to_string() + "\n";
}

std::string cmd_slopes(const Config& c)
{
    require_format(c, {"text", "csv", "json"});
    const Params p(c.r);
    const Rational x = rational_arg(c.x, "--x");
    const SlopeProfile prof = slope_profile(p, x, c.depth.value_or(kDefaultDepth));
    std::ostringstream out;
    if (c.format == "json") {
        Json j = envelope("slopes", c);
        j["x"] = to_json(x);
        j["depth"] = prof.depth;
        j["slopes"] = prof.slopes;
        j["zeroTimes"] = prof.zero_times();
        return dump(j);
    }
    if (c.format == "csv") {
        out << "n,s_n\n";
        for (std::size_t n = 0; n < prof.slopes.size(); ++n) {
            out << n << "," << prof.slopes[n] << "\n";
        }
        return out.str();
    }
    for (std::size_t n = 0; n < prof.slopes.size(); ++n) {
        out << (n ? " " : "") << prof.slopes[n];
    }
    out << "\n";
    return out.str();
}

std::string cmd_chords(const Config& c)
{
    require_format(c, {"text", "csv", "json"});
    const Params p(c.r);
    const Rational x = rational_arg(c.x, "--x");
    const auto chords = chord_slopes(p, x, c.depth.value_or(20));
    if (c.format == "json") {
        Json j = envelope("chords", c);
        j["x"] = to_json(x);
        Json rows = Json::array();
        for (const auto& ch : chords) {
            rows.push_back({{"n", ch.n},
                            {"j", ch.j.get_str()},
                            {"u", to_json(ch.u)},
                            {"v", to_json(ch.v)},
                            {"slope", to_json(ch.slope)},
                            {"prefix", ch.prefix},
                            {"residual", to_json(ch.residual)}});
        }
        j["chords"] = rows;
        return dump(j);
    }
    std::ostringstream out;
    out << "n,j,u,v,slope,prefix,residual\n";
    for (const auto& ch : chords) {
        out << ch.n << "," << ch.j.get_str() << "," << ch.u << "," << ch.v << "," << ch.slope << "," << ch.prefix
            << "," << ch.residual << "\n";
    }
    return out.str();
}

Json rho_json(const RhoStep& s)
{
    Json j;
    j["rule"] = rule_name(s.rule);
    j["n0"] = s.n0;
    j["j0"] = s.j0.get_str();
    j["input"] = to_json(s.input);
    j["output"] = to_json(s.output);
    j["budgetLimited"] = s.budget_limited;
    j["budget"] = s.budget;
    return j;
}

std::string cmd_rho(const Config& c)
{
    require_format(c, {"text", "json"});
    const Params p(c.r);
    const RhoStep s = rho(p, rational_arg(c.x, "--x"), c.budget.value_or(kDefaultDepth));
    if (c.format == "json") {
        Json j = envelope("rho", c);
        j["step"] = rho_json(s);
        return dump(j);
    }
    return to_text(s);
}

std::string cmd_pi(const Config& c)
{
    require_format(c, {"text", "json"});
    const Params p(c.r);
    const Rational x = rational_arg(c.x, "--x");
    const auto steps = rho_orbit(p, x, c.budget.value_or(kDefaultDepth));
    if (c.format == "json") {
        Json j = envelope("pi", c);
        j["x"] = to_json(x);
        j["value"] = to_json(steps.back().output);
        Json arr = Json::array();
        for (const auto& s : steps) {
            arr.push_back(rho_json(s));
        }
        j["steps"] = arr;
        return dump(j);
    }
    return steps.back().output.to_string() + "\n";
}

std::string cmd_rho_inf(const Config& c)
{
    require_format(c, {"text", "json"});
    const Params p(c.r);
    const Rational x = rational_arg(c.x, "--x");
    const RhoLimit lim = rho_infinity(p, x, c.budget.value_or(kDefaultDepth), c.precision.value_or(30));
    if (c.format == "json") {
        Json j = envelope("rho-inf", c);
        j["x"] = to_json(x);
        j["iterations"] = lim.iterations;
        if (lim.exact) {
            j["exact"] = to_json(*lim.exact);
        } else {
            j["enclosure"] = {{"lo", to_json(left_endpoint(p, *lim.enclosure))},
                              {"hi", to_json(right_endpoint(p, *lim.enclosure))}};
        }
        return dump(j);
    }
    if (lim.exact) {
        return lim.exact->to_string() + "\n";
    }
    return "[" + left_endpoint(p, *lim.enclosure).to_string() + ", " + right_endpoint(p, *lim.enclosure).to_string() +
           "]\n";
}

std::string cmd_preimages(const Config& c)
{
    require_format(c, {"text", "json"});
    const Params p(c.r);
    const PreimageSet set = preimages_rho(p, rational_arg(c.x, "--x"), c.depth.value_or(20));
    if (c.format == "json") {
        Json j = envelope("preimages", c);
        j["z"] = to_json(set.target);
        j["budget"] = set.budget;
        j["triedN0"] = set.tried;
        Json vals = Json::array();
        for (const auto& v : set.values) {
            vals.push_back(to_json(v));
        }
        j["preimages"] = vals;
        return dump(j);
    }
    std::ostringstream out;
    for (const auto& v : set.values) {
        out << v << "\n";
    }
    return out.str();
}

std::string cmd_nplus(const Config& c)
{
    require_format(c, {"text", "json"});
    const Params p(c.r);
    const SlopeBound b = n_plus(p, rational_arg(c.x, "--x"), c.budget.value_or(kDefaultDepth));
    if (c.format == "json") {
        Json j = envelope("nplus", c);
        j["value"] = b.value;
        j["exact"] = b.exact;
        return dump(j);
    }
    return (b.exact ? "" : ">= ") + std::to_string(b.value) + "\n";
}

std::string cmd_equivalent(const Config& c)
{
    require_format(c, {"text", "json"});
    const Params p(c.r);
    const bool eq =
        equivalent(p, rational_arg(c.x, "--x"), rational_arg(c.x2, "--x2"), c.budget.value_or(100000));
    if (c.format == "json") {
        Json j = envelope("equivalent", c);
        j["equivalent"] = eq;
        return dump(j);
    }
    return eq ? "true\n" : "false\n";
}

std::string cmd_classify(const Config& c)
{
    require_format(c, {"text", "json"});
    const Params p(c.r);
    const PointClass pc = classify(p, rational_arg(c.x, "--x"), c.budget.value_or(kDefaultDepth));
    Json j = envelope("classify", c);
    j["budget"] = pc.budget;
    j["inC"] = pc.in_corner;
    if (pc.corner_level) {
        j["cornerLevel"] = *pc.corner_level;
    } else {
        j["signProfile"] = sign_name(pc.sign);
        if (pc.sign == SignProfile::FirstNegative) {
            j["firstNegativeAt"] = pc.first_negative;
        }
        j["zeroCount"] = pc.zero_count;
        j["lastZero"] = pc.last_zero;
    }
    if (c.format == "json") {
        return dump(j);
    }
    std::ostringstream out;
    for (const auto& [k, v] : j.items()) {
        if (k != "schemaVersion" && k != "command" && k != "r") {
            out << k << " " << (v.is_string() ? v.get<std::string>() : v.dump()) << "\n";
        }
    }
    return out.str();
}

std::string cmd_crw_params(const Config& c)
{
    require_format(c, {"text", "json"});
    const Rational v = crw_parameter(c.r);
    if (c.format == "json") {
        Json j = envelope("crw-params", c);
        j["p"] = to_json(v);
        return dump(j);
    }
    return v.to_string() + "\n";
}

std::string cmd_crw_count(const Config& c)
{
    require_format(c, {"text", "json"});
    const Params p(c.r);
    const long n = c.depth.value_or(1);
    const Rational v = exact_transition_count(p, n);
    if (c.format == "json") {
        Json j = envelope("crw-count", c);
        j["depth"] = n;
        j["frequency"] = to_json(v);
        j["parameter"] = to_json(crw_parameter(c.r));
        return dump(j);
    }
    return v.to_string() + "\n";
}

std::string cmd_crw_dp(const Config& c)
{
    require_format(c, {"text", "csv", "json"});
    static const std::map<std::string, WalkConstraint> kinds{
        {"none", WalkConstraint::None}, {"nonneg", WalkConstraint::NonnegUpTo}, {"positive", WalkConstraint::PositiveUpTo}};
    const auto it = kinds.find(c.constraint);
    if (it == kinds.end()) {
        throw UsageError("--constraint must be none|nonneg|positive");
    }
    const CrwDistribution d = crw_dp(crw_parameter(c.r), c.depth.value_or(10), it->second, c.flying);
    if (c.format == "json") {
        Json j = envelope("crw-dp", c);
        j["p"] = to_json(d.p);
        j["n"] = d.n;
        j["constraint"] = constraint_name(d.constraint);
        j["flyingStart"] = d.flying_start;
        Json rows = Json::array();
        for (const auto& [key, prob] : d.table) {
            rows.push_back({{"s", key.first}, {"last", key.second}, {"p", to_json(prob)}});
        }
        j["table"] = rows;
        j["total"] = to_json(d.total());
        return dump(j);
    }
    std::ostringstream out;
    out << "s,last,probability\n";
    for (const auto& [key, prob] : d.table) {
        out << key.first << "," << key.second << "," << prob << "\n";
    }
    return out.str();
}

std::string cmd_crw_ab(const Config& c)
{
    require_format(c, {"text", "csv", "json"});
    const AbSequences ab = a_b_sequences(crw_parameter(c.r), c.depth.value_or(20));
    if (c.format == "json") {
        Json j = envelope("crw-ab", c);
        Json rows = Json::array();
        for (std::size_t k = 0; k < ab.a.size(); ++k) {
            rows.push_back({{"n", k + 1}, {"a", to_json(ab.a[k])}, {"b", to_json(ab.b[k])}});
        }
        j["p"] = to_json(ab.p);
        j["rows"] = rows;
        return dump(j);
    }
    return to_csv(ab);
}

std::string cmd_crw_measure(const Config& c)
{
    require_format(c, {"text", "json"});
    const Params p(c.r);
    const SlopeMeasure m = slope_measure_check(p, c.depth.value_or(4));
    if (c.format == "json") {
        Json j = envelope("crw-measure", c);
        j["counted"] = to_json(m.counted);
        j["dp"] = to_json(m.dp);
        j["agrees"] = m.agrees();
        return dump(j);
    }
    return "counted " + m.counted.to_string() + "\ndp " + m.dp.to_string() + "\nagrees " +
           (m.agrees() ? "true" : "false") + "\n";
}

std::string cmd_crw_sim(const Config& c)
{
    require_format(c, {"text", "json"});
    const std::uint64_t seed = required_seed(c);
    const SimulationSummary s = simulate(crw_parameter(c.r), c.depth.value_or(1000), c.samples.value_or(1000), seed);
    if (c.format == "json") {
        Json j = envelope("crw-sim", c);
        j["seed"] = s.seed;
        j["stream"] = "takagi-stream v" + std::to_string(Stream::kVersion);
        j["p"] = to_json(s.p);
        j["steps"] = s.steps;
        j["paths"] = s.paths;
        j["transitionFrequency"] = fmt_double(s.transition_frequency());
        j["hitZeroFraction"] = fmt_double(s.hit_zero_fraction());
        j["meanZeros"] = fmt_double(s.mean_zeros());
        Json a = Json::array();
        for (long n = 1; n <= static_cast<long>(s.a_counts.size()); ++n) {
            a.push_back(fmt_double(s.a_estimate(n)));
        }
        j["aEstimates"] = a;
        return dump(j);
    }
    return to_text(s);
}

std::string cmd_aplus(const Config& c)
{
    require_format(c, {"text", "csv", "json"});
    const Params p(c.r);
    const long depth = c.depth.value_or(8);
    const auto records = c.y.empty() ? enumerate_aplus(p, depth) : aplus_at(p, rational_arg(c.y, "--y"), depth);
    if (c.format == "json") {
        Json j = envelope("aplus", c);
        if (!c.y.empty()) {
            j["y"] = c.y;
        }
        j["depth"] = depth;
        Json rows = Json::array();
        for (const auto& rec : records) {
            rows.push_back({{"address", address_json(rec.address)},
                            {"base", to_json(rec.base)},
                            {"rangeLo", to_json(rec.range_lo)},
                            {"rangeHi", to_json(rec.range_hi)}});
        }
        j["records"] = rows;
        return dump(j);
    }
    return to_csv(p, records);
}

std::string cmd_cover(const Config& c)
{
    require_format(c, {"text", "csv", "json"});
    const Params p(c.r);
    const LevelSetCover cv = cover(p, rational_arg(c.y, "--y"), c.depth.value_or(10));
    if (c.format == "json") {
        Json j = envelope("cover", c);
        j["y"] = to_json(cv.y);
        j["depth"] = cv.depth;
        j["clusters"] = cv.clusters();
        Json rows = Json::array();
        for (const auto& iv : cv.intervals) {
            rows.push_back({{"address", address_json(iv.address)},
                            {"left", to_json(left_endpoint(p, iv.address))},
                            {"right", to_json(right_endpoint(p, iv.address))},
                            {"rangeLo", to_json(iv.range_lo)},
                            {"rangeHi", to_json(iv.range_hi)}});
        }
        j["intervals"] = rows;
        return dump(j);
    }
    return to_csv(p, cv);
}

std::string cmd_maxval(const Config& c)
{
    require_format(c, {"text", "json"});
    const Params p(c.r);
    const MaxEnclosure m = max_value(p, c.precision.value_or(kCertifiedMaxPrecision));
    if (c.format == "json") {
        Json j = envelope("maxval", c);
        j["lo"] = to_json(m.lo);
        j["hi"] = to_json(m.hi);
        j["witness"] = to_json(m.witness);
        if (m.exact) {
            j["exact"] = to_json(*m.exact);
        }
        j["depth"] = m.depth;
        return dump(j);
    }
    std::ostringstream out;
    out << "lo " << m.lo << "\nhi " << m.hi << "\nwitness " << m.witness << "\n";
    if (m.exact) {
        out << "exact " << *m.exact << "\n";
    }
    out << "depth " << m.depth << "\n";
    return out.str();
}

std::string cmd_occupation(const Config& c)
{
    require_format(c, {"text", "csv", "json"});
    const Params p(c.r);
    const long bins = c.bins.value_or(256);
    OccupationMode mode;
    if (c.samples) {
        if (c.depth) {
            throw UsageError("--samples and --depth are exclusive");
        }
        mode = MonteCarloMode{*c.samples, required_seed(c)};
    } else if (c.depth) {
        mode = ExactDepthMode{*c.depth};
    } else {
        throw UsageError("occupation needs --samples with --seed, or --depth");
    }
    const OccupationHistogram h = occupation_histogram(p, bins, mode);
    if (c.format == "json") {
        Json j = envelope("occupation", c);
        j["bins"] = h.bins;
        j["rangeHi"] = to_json(h.range_hi);
        j["exact"] = h.exact;
        j["samples"] = h.samples;
        if (h.seed) {
            j["seed"] = *h.seed;
        }
        j["smear"] = to_json(h.smear);
        Json masses = Json::array();
        for (double m : h.masses) {
            masses.push_back(fmt_double(m));
        }
        j["masses"] = masses;
        j["concentration90"] = fmt_double(h.concentration());
        return dump(j);
    }
    return (h.seed ? seed_comment(*h.seed) : std::string()) + to_csv(h);
}

std::string cmd_witness(const Config& c)
{
    require_format(c, {"text", "json"});
    const Params p(c.r);
    const WitnessTree tree = witness_tree(p, rational_arg(c.x, "--x"), c.levels.value_or(3), c.depth.value_or(200));
    const LevelCertificate cert = level_count_certificate(p, tree);
    if (c.format == "json") {
        Json j = envelope("witness", c);
        j["base"] = to_json(tree.base);
        j["zeroTimes"] = tree.zero_times;
        Json lv = Json::array();
        for (const auto& y : tree.levels) {
            lv.push_back(to_json(y));
        }
        j["levels"] = lv;
        Json leaves = Json::array();
        for (const auto& leaf : tree.leaves()) {
            leaves.push_back(address_json(leaf.interval));
        }
        j["leaves"] = leaves;
        j["certificate"] = {{"y", to_json(cert.y)},
                            {"count", cert.count.get_str()},
                            {"strict", cert.strict},
                            {"justification", cert.justification}};
        return dump(j);
    }
    return to_text(tree) + "y " + cert.y.to_string() + "\ncertified " + cert.count.get_str() + "\n" +
           cert.justification + "\n";
}

std::string cmd_selfsim(const Config& c)
{
    require_format(c, {"text", "json"});
    const Params p(c.r);
    IntervalAddress a{c.depth.value_or(2), 0};
    try {
        a.j = Integer(c.j);
    } catch (const std::invalid_argument&) {
        throw UsageError("--j must be an integer");
    }
    const SelfSimReport rep = verify_selfsim(p, a, a.n + c.levels.value_or(6), c.samples.value_or(50),
                                             c.seed.value_or(0));
    Json j = envelope("selfsim", c);
    j["address"] = address_json(a);
    j["m"] = rep.m;
    Json rows = Json::array();
    for (const auto& ch : rep.children) {
        rows.push_back({{"child", ch.child_index},
                        {"reflected", ch.reflected},
                        {"samples", ch.samples},
                        {"partialOk", ch.partial_ok},
                        {"limitOk", ch.limit_ok}});
    }
    j["children"] = rows;
    j["passed"] = rep.passed();
    if (c.format == "json") {
        return dump(j);
    }
    std::ostringstream out;
    for (const auto& ch : rep.children) {
        out << "child " << ch.child_index << (ch.reflected ? " reflected " : " direct ") << ch.partial_ok << "/"
            << ch.samples << " " << ch.limit_ok << "/" << ch.samples << "\n";
    }
    out << (rep.passed() ? "pass" : "FAIL") << "\n";
    return out.str();
}

std::string cmd_scan(const Config& c)
{
    require_format(c, {"text", "csv", "json"});
    const Params p(c.r);
    ScanOptions opt;
    opt.seed = required_seed(c);
    opt.samples = c.samples.value_or(opt.samples);
    opt.depth = c.depth.value_or(opt.depth);
    opt.compare_depth = std::min(opt.compare_depth, opt.depth);
    opt.levels = c.levels.value_or(opt.levels);
    opt.slope_depth = c.budget.value_or(opt.slope_depth);
    const ScanReport rep = finiteness_scan(p, opt);
    if (c.format == "csv") {
        std::ostringstream out;
        out << seed_comment(opt.seed);
        out << "i,y,aplus,aplus_at_compare,clusters_compare,clusters_depth,stable,x,found,certified\n";
        for (std::size_t i = 0; i < rep.level_samples.size(); ++i) {
            const auto& ls = rep.level_samples[i];
            const auto& as = rep.abscissa_samples[i];
            out << i << "," << ls.y << "," << ls.aplus_count << "," << ls.aplus_count_at_compare << ","
                << ls.trace.clusters[static_cast<std::size_t>(opt.compare_depth) - 1] << ","
                << ls.trace.clusters.back() << "," << (ls.stable ? 1 : 0) << "," << as.x << ","
                << (as.found ? 1 : 0) << "," << (as.found ? as.certified.get_str() : "0") << "\n";
        }
        return out.str();
    }
    Json j = envelope("scan", c);
    j["seed"] = opt.seed;
    j["samples"] = opt.samples;
    j["depth"] = opt.depth;
    j["compareDepth"] = opt.compare_depth;
    j["levels"] = opt.levels;
    j["slopeDepth"] = opt.slope_depth;
    j["stableFraction"] = fmt_double(rep.stable_fraction());
    j["certifiedFraction"] = fmt_double(rep.certified_fraction());
    Json med = Json::array();
    for (double m : rep.median_clusters()) {
        med.push_back(fmt_double(m));
    }
    j["medianClusters"] = med;
    if (c.format == "json") {
        return dump(j);
    }
    std::ostringstream out;
    out << "seed " << opt.seed << "\nsamples " << opt.samples << "\nstable_fraction "
        << fmt_double(rep.stable_fraction()) << "\ncertified_fraction " << fmt_double(rep.certified_fraction())
        << "\nmedian_clusters";
    for (double m : rep.median_clusters()) {
        out << " " << fmt_double(m);
    }
    out << "\n";
    return out.str();
}

std::string cmd_heightwidth(const Config& c)
{
    require_format(c, {"text", "json"});
    const Params p(c.r);
    const HeightWidthReport rep = heightwidth_check(p, enumerate_aplus(p, c.depth.value_or(12)));
    const auto failures = std::count_if(rep.entries.begin(), rep.entries.end(),
                                        [](const HeightWidthEntry& e) { return !e.passed; });
    if (c.format == "json") {
        Json j = envelope("heightwidth", c);
        j["records"] = rep.entries.size();
        j["failures"] = failures;
        j["totalWidth"] = to_json(rep.total_width);
        j["bound"] = to_json(rep.bound);
        j["passed"] = rep.passed();
        return dump(j);
    }
    std::ostringstream out;
    out << "records " << rep.entries.size() << "\nfailures " << failures << "\ntotal_width " << rep.total_width
        << "\nbound " << rep.bound << "\n"
        << (rep.passed() ? "pass" : "FAIL") << "\n";
    return out.str();
}

std::string cmd_plot(const Config& c)
{
    require_format(c, {"svg", "text"});
    return plot_svg(Params(c.r), c.depth.value_or(10), c.width, c.height);
}

void write_atomically(const std::string& path, const std::string& body)
{
    const std::filesystem::path target(path);
    std::filesystem::path tmp = target;
    tmp += ".tmp." + std::to_string(::getpid());
    {
        std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
        if (!f) {
            throw std::runtime_error("cannot open " + tmp.string() + " for writing");
        }
        f << body;
        f.flush();
        if (!f) {
            throw std::runtime_error("write to " + tmp.string() + " failed");
        }
    }
    std::filesystem::rename(tmp, target);
}

struct Command {
    const char* name;
    const char* help;
    std::string (*fn)(const Config&);
    std::vector<std::string> flags;
};

} // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err)
{
    Config cfg;
    CLI::App app{"Exact computations with the Takagi-van der Waerden functions f_r", "takagi_lab"};
    app.require_subcommand(1);

    const std::vector<Command> commands{
        {"eval", "exact f_r(x)", cmd_eval, {"r", "x"}},
        {"slopes", "slope profile s_0..s_N", cmd_slopes, {"r", "x", "depth"}},
        {"chords", "chord slopes m_0..m_N", cmd_chords, {"r", "x", "depth"}},
        {"rho", "one step of the flattening map", cmd_rho, {"r", "x", "budget"}},
        {"pi", "iterate rho to a fixed point", cmd_pi, {"r", "x", "budget"}},
        {"rho-inf", "limit of the rho iteration", cmd_rho_inf, {"r", "x", "budget", "precision"}},
        {"preimages", "preimages of x under rho with n0 <= depth", cmd_preimages, {"r", "x", "depth"}},
        {"nplus", "first time before a negative slope", cmd_nplus, {"r", "x", "budget"}},
        {"equivalent", "the relation x ~ x2", cmd_equivalent, {"r", "x", "x2", "budget"}},
        {"classify", "budget-relative point classification", cmd_classify, {"r", "x", "budget"}},
        {"crw-params", "persistence p_r", cmd_crw_params, {"r"}},
        {"crw-count", "transition frequency by interval counting", cmd_crw_count, {"r", "depth"}},
        {"crw-dp", "exact walk distribution", cmd_crw_dp, {"r", "depth", "constraint", "flying"}},
        {"crw-ab", "a_n and b_n tables", cmd_crw_ab, {"r", "depth"}},
        {"crw-measure", "slope-set measure against a_n", cmd_crw_measure, {"r", "depth"}},
        {"crw-sim", "Monte Carlo walk summary", cmd_crw_sim, {"r", "depth", "samples", "seed"}},
        {"aplus", "flat intervals with nonnegative slope history", cmd_aplus, {"r", "y", "depth"}},
        {"cover", "interval cover of a level set", cmd_cover, {"r", "y", "depth"}},
        {"maxval", "certified enclosure of max f_r", cmd_maxval, {"r", "precision"}},
        {"occupation", "occupation measure histogram", cmd_occupation, {"r", "bins", "samples", "seed", "depth"}},
        {"witness", "witness tree and level-set certificate", cmd_witness, {"r", "x", "levels", "depth"}},
        {"selfsim", "check self-similarity over a flat interval", cmd_selfsim,
         {"r", "depth", "j", "levels", "samples", "seed"}},
        {"scan", "level-set finiteness experiments", cmd_scan, {"r", "samples", "depth", "levels", "budget", "seed"}},
        {"heightwidth", "height-width bound over A+", cmd_heightwidth, {"r", "depth"}},
        {"plot", "SVG of f_r^N with tail band", cmd_plot, {"r", "depth", "width", "height"}},
    };

    std::map<CLI::App*, const Command*> by_app;
    for (const Command& cmd : commands) {
        CLI::App* sub = app.add_subcommand(cmd.name, cmd.help);
        by_app[sub] = &cmd;
        for (const std::string& f : cmd.flags) {
            if (f == "r") {
                sub->add_option("--r", cfg.r, "family index r >= 2")->required();
            } else if (f == "x") {
                sub->add_option("--x", cfg.x, "rational p/q")->required();
            } else if (f == "x2") {
                sub->add_option("--x2", cfg.x2, "second rational p/q")->required();
            } else if (f == "y") {
                sub->add_option("--y", cfg.y, "level p/q")->required(cmd.fn == cmd_cover);
            } else if (f == "depth") {
                sub->add_option("--depth", cfg.depth, "depth N");
            } else if (f == "budget") {
                sub->add_option("--budget", cfg.budget, "slope budget");
            } else if (f == "levels") {
                sub->add_option("--levels", cfg.levels, "tree levels K");
            } else if (f == "seed") {
                sub->add_option("--seed", cfg.seed, "u64 seed");
            } else if (f == "samples") {
                sub->add_option("--samples", cfg.samples, "sample count");
            } else if (f == "bins") {
                sub->add_option("--bins", cfg.bins, "bin count");
            } else if (f == "precision") {
                sub->add_option("--precision", cfg.precision, "bits P for width 2^-P");
            } else if (f == "j") {
                sub->add_option("--j", cfg.j, "interval index");
            } else if (f == "constraint") {
                sub->add_option("--constraint", cfg.constraint, "none|nonneg|positive");
            } else if (f == "flying") {
                sub->add_flag("--flying", cfg.flying, "flying start X_0 = +1");
            } else if (f == "width") {
                sub->add_option("--width", cfg.width, "SVG width in px");
            } else if (f == "height") {
                sub->add_option("--height", cfg.height, "SVG height in px");
            }
        }
        sub->add_option("--out", cfg.out, "output path (written atomically)");
        sub->add_option("--format", cfg.format, "text|csv|json|svg");
    }

    std::vector<std::string> storage{"takagi_lab"};
    storage.insert(storage.end(), args.begin(), args.end());
    std::vector<char*> argv;
    for (auto& s : storage) {
        argv.push_back(s.data());
    }
    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) {
            out << app.help();
            return kExitOk;
        }
        err << "usage error: " << e.what() << "\n" << app.help();
        return kExitUsage;
    }

    CLI::App* chosen = app.get_subcommands().front();
    const Command& cmd = *by_app.at(chosen);
    if (cmd.fn == cmd_plot && cfg.format == "text") {
        cfg.format = "svg";
    }
    try {
        const std::string body = cmd.fn(cfg);
        if (cfg.out.empty()) {
            out << body;
        } else {
            write_atomically(cfg.out, body);
        }
        return kExitOk;
    } catch (const UsageError& e) {
        err << "usage error: " << e.what() << "\n" << chosen->help();
        return kExitUsage;
    } catch (const Error& e) {
        err << e.name() << ": " << e.what() << "\n";
        return kExitDomain;
    } catch (const std::invalid_argument& e) {
        err << "usage error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kExitDomain;
    }
}

} // namespace takagi::cli
