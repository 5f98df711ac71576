#include <cinttypes>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <map>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "bgw/errors.hpp"
#include "bgw/exact.hpp"
#include "bgw/family.hpp"
#include "bgw/jsonio.hpp"
#include "bgw/multitype.hpp"
#include "bgw/rng.hpp"
#include "bgw/sample.hpp"
#include "bgw/tree.hpp"
#include "json.hpp"

namespace {

using namespace bgw;

std::uint64_t fnv1a(const std::string& s) {
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::size_t from = 0;
    while (true) {
        const auto at = s.find(sep, from);
        if (at == std::string::npos) {
            out.push_back(s.substr(from));
            return out;
        }
        out.push_back(s.substr(from, at - from));
        from = at + 1;
    }
}

std::vector<double> parse_doubles(const std::string& s, const char* what) {
    std::vector<double> out;
    for (const std::string& part : split(s, ',')) {
        try {
            std::size_t used = 0;
            out.push_back(std::stod(part, &used));
            if (used != part.size()) throw std::invalid_argument(part);
        } catch (const std::exception&) {
            throw ConfigError(std::string(what) + ": bad number '" + part + "'");
        }
    }
    return out;
}

std::vector<long long> parse_longs(const std::string& s, const char* what) {
    std::vector<long long> out;
    for (const std::string& part : split(s, ',')) {
        try {
            std::size_t used = 0;
            out.push_back(std::stoll(part, &used));
            if (used != part.size()) throw std::invalid_argument(part);
        } catch (const std::exception&) {
            throw ConfigError(std::string(what) + ": bad integer '" + part + "'");
        }
    }
    return out;
}

std::vector<Rat> parse_rats(const std::string& s, const char* what) {
    std::vector<Rat> out;
    for (const std::string& part : split(s, ',')) {
        try {
            out.push_back(parse_rat(part));
        } catch (const ConfigError&) {
            throw ConfigError(std::string(what) + ": bad rational '" + part + "'");
        }
    }
    return out;
}

Theta<Rat> parse_theta(const std::string& s) {
    if (s == "zero" || s == "0") return Theta<Rat>::zero();
    if (s == "inf" || s == "infinity") return Theta<Rat>::inf();
    const Rat v = parse_rat(s);
    if (!(v > 0)) throw ConfigError("theta must be positive, 'zero' or 'inf'");
    return Theta<Rat>::finite(v);
}

std::vector<std::vector<long long>> parse_schedule(const std::string& s) {
    std::vector<std::vector<long long>> out;
    for (const std::string& part : split(s, ';'))
        out.push_back(parse_longs(part, "schedule"));
    return out;
}

std::string join_counts(const std::vector<long long>& n) {
    std::string out;
    for (std::size_t i = 0; i < n.size(); ++i) {
        if (i) out += ':';
        out += std::to_string(n[i]);
    }
    return out;
}

const char* roman_clause(int clause) {
    switch (clause) {
        case 1: return "i";
        case 2: return "ii";
        case 3: return "iii";
        default: return "?";
    }
}

void print_hash(const std::string& cfg) {
    std::printf("# config-hash=%016" PRIx64 "\n", fnv1a(cfg));
}

// --config file.json holds {"flag": value} defaults mirroring the long flags;
// explicit flags win.
std::vector<std::string> with_config_defaults(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    std::string path;
    std::vector<std::string> rest;
    for (std::size_t i = 0; i < args.size(); ++i) {
        if (args[i] == "--config") {
            if (i + 1 >= args.size()) throw ConfigError("--config needs a path");
            path = args[++i];
        } else if (args[i].rfind("--config=", 0) == 0) {
            path = args[i].substr(9);
        } else {
            rest.push_back(args[i]);
        }
    }
    if (path.empty()) return rest;

    nlohmann::json j =
        nlohmann::json::parse(read_text_file(path), nullptr, /*allow_exceptions=*/false);
    if (j.is_discarded() || !j.is_object())
        throw ConfigError(path + ": config must be a JSON object of flag values");
    for (const auto& [key, val] : j.items()) {
        const std::string flag = "--" + key;
        bool present = false;
        for (const auto& a : rest)
            if (a == flag || a.rfind(flag + "=", 0) == 0) present = true;
        if (present) continue;
        std::string text;
        if (val.is_string()) {
            text = val.get<std::string>();
        } else if (val.is_array()) {
            for (std::size_t i = 0; i < val.size(); ++i) {
                if (i) text += ',';
                text += val[i].is_string() ? val[i].get<std::string>() : val[i].dump();
            }
        } else {
            text = val.dump();
        }
        rest.push_back(flag);
        rest.push_back(text);
    }
    return rest;
}

// Classes with zero direction weight stay empty in the conditioning; drop
// them (and the support they alone cover) so the oracle sees only live
// degrees. Degree 1 survives in A_0 as the pass-through.
struct TrimmedProblem {
    PmfQ p;
    SetFamily fam;
    std::vector<long long> n;
};

TrimmedProblem trim_dead_classes(const PmfQ& pq, const FamilyView& v,
                                 const std::vector<double>& alpha,
                                 const std::vector<long long>& n) {
    if (n.size() != alpha.size() || static_cast<int>(n.size()) != v.J)
        throw ConfigError("counts and alpha need one entry per class");
    TrimmedProblem out;
    IntSet allowed = v.a0.contains(1) ? IntSet::single(1) : IntSet::empty();
    for (int j = 1; j <= v.J; ++j) {
        if (alpha[static_cast<std::size_t>(j - 1)] > 0) {
            out.fam.sets.push_back(v.a(j));
            out.n.push_back(n[static_cast<std::size_t>(j - 1)]);
            allowed = allowed.unite(v.a(j));
        } else if (n[static_cast<std::size_t>(j - 1)] != 0) {
            throw PreconditionError("count " + std::to_string(n[static_cast<std::size_t>(j - 1)]) +
                                    " requested for class " + std::to_string(j) +
                                    " which has direction weight zero");
        }
    }
    auto d = pq.restrict_to(allowed);
    std::map<int, Rat> table(d.atoms.begin(), d.atoms.end());
    out.p = PmfQ(std::move(table), std::move(d.tails));
    return out;
}

// ---------------------------------------------------------------------------

struct TiltArgs {
    std::string pmf, family, theta, alpha, beta;
};

int run_tilt(const TiltArgs& a) {
    const PmfQ pq = load_pmf(a.pmf);
    const SetFamily fam = load_family(a.family);
    const FamilyView v = resolve_family(pq, fam);
    const Theta<Rat> theta = parse_theta(a.theta);
    if (a.alpha.empty() == a.beta.empty())
        throw ConfigError("tilt needs exactly one of --alpha and --beta");
    PmfQ tilted;
    if (!a.alpha.empty()) {
        tilted = dir_pmf(pq, v, theta, parse_rats(a.alpha, "alpha"));
    } else {
        tilted = tilt_pmf(pq, v, TiltParam<Rat>{theta, parse_rats(a.beta, "beta")});
    }
    std::printf("%s\n", pmf_to_json(tilted).c_str());
    return 0;
}

struct DirectionArgs {
    std::string pmf, family, alpha;
};

int run_critical(const DirectionArgs& a) {
    const PmfQ pq = load_pmf(a.pmf);
    const PmfD pd = pq.to_double_pmf();
    const FamilyView v = resolve_family(pd, load_family(a.family));
    const CriticalResult r = critical_theta(pd, v, parse_doubles(a.alpha, "alpha"));
    if (!r.generic) {
        std::fprintf(stderr, "not generic (clause=%s): %s\n", roman_clause(r.fail_clause),
                     r.detail.c_str());
        return 3;
    }
    switch (r.theta.kind) {
        case ThetaKind::Finite: std::printf("theta=%.12f\n", r.theta.value); break;
        case ThetaKind::Zero: std::printf("theta=zero\n"); break;
        case ThetaKind::Inf: std::printf("theta=inf\n"); break;
    }
    return 0;
}

int run_generic(const DirectionArgs& a) {
    const PmfQ pq = load_pmf(a.pmf);
    const PmfD pd = pq.to_double_pmf();
    const FamilyView v = resolve_family(pd, load_family(a.family));
    const GenericResult g = is_generic(pd, v, parse_doubles(a.alpha, "alpha"));
    if (g.generic)
        std::printf("generic=true\n");
    else
        std::printf("generic=false clause=%s\n", roman_clause(g.clause));
    return 0;
}

int run_aperiodic(const DirectionArgs& a) {
    const PmfQ pq = load_pmf(a.pmf);
    const PmfD pd = pq.to_double_pmf();
    const FamilyView v = resolve_family(pd, load_family(a.family));
    const AperiodicResult r = is_aperiodic(pd, v, parse_doubles(a.alpha, "alpha"));
    std::printf("aperiodic=%s gcd=%lld\n", r.aperiodic ? "true" : "false", r.gcd);
    return 0;
}

struct SampleArgs {
    std::string pmf, family, counts, strategy = "dp";
    std::uint64_t seed = 0;
    long long draws = 1;
};

int run_sample(const SampleArgs& a) {
    const PmfQ pq = load_pmf(a.pmf);
    const SetFamily fam = load_family(a.family);
    const std::vector<long long> n = parse_longs(a.counts, "counts");
    CondStrategy strategy;
    if (a.strategy == "dp")
        strategy = CondStrategy::DpBackward;
    else if (a.strategy == "rejection")
        strategy = CondStrategy::Rejection;
    else if (a.strategy == "cycle")
        strategy = CondStrategy::CycleLemma;
    else
        throw ConfigError("unknown strategy '" + a.strategy + "' (dp, rejection, cycle)");
    if (a.draws < 1) throw ConfigError("--draws must be positive");

    ConditionedSampler sampler(pq, fam, n, strategy);
    RngState rng(a.seed, 0);
    for (long long i = 0; i < a.draws; ++i)
        std::printf("%s\n", tree_to_string(sampler(rng)).c_str());
    return 0;
}

struct RizzoloArgs {
    std::string tree, family;
};

int run_rizzolo(const RizzoloArgs& a) {
    const OrderedTree t = parse_tree(a.tree);
    const RizzoloResult r = rizzolo(t, load_family(a.family));
    std::string types;
    for (std::size_t i = 0; i < r.tree.types.size(); ++i) {
        if (i) types += ',';
        types += std::to_string(r.tree.types[i]);
    }
    std::printf("types=[%s]; tree=%s\n", types.c_str(), tree_to_string(r.tree.tree).c_str());
    return 0;
}

struct LimitArgs {
    std::string pmf, family, alpha, schedule;
    int height = 1;
    int points = 3;
};

int run_limit(const LimitArgs& a) {
    const PmfQ pq = load_pmf(a.pmf);
    const SetFamily fam = load_family(a.family);
    const PmfD pd = pq.to_double_pmf();
    const FamilyView v = resolve_family(pd, fam);
    const std::vector<double> alpha = parse_doubles(a.alpha, "alpha");
    if (a.height < 0) throw ConfigError("--height must be nonnegative");

    const PmfD p_crit = critical_pmf(pd, v, alpha);
    std::vector<std::vector<long long>> ns;
    if (!a.schedule.empty())
        ns = parse_schedule(a.schedule);
    else
        ns = admissible_sequence(pd, fam, alpha, a.points);

    print_hash("limit|pmf=" + read_text_file(a.pmf) + "|family=" + read_text_file(a.family) +
               "|alpha=" + a.alpha + "|height=" + std::to_string(a.height) +
               "|schedule=" + a.schedule + "|points=" + std::to_string(a.points));
    std::printf("n,tv,stderr\n");
    for (const auto& n : ns) {
        const TrimmedProblem trimmed = trim_dead_classes(pq, v, alpha, n);
        CountOracle oracle(trimmed.p, trimmed.fam);
        const auto cond = oracle.truncated_law(trimmed.n, a.height);
        long long size = 0;
        for (long long c : trimmed.n) size += c;
        const int max_degree = static_cast<int>(
            std::min<long long>(size, std::numeric_limits<int>::max()));
        const auto spine = spine_truncated_law(p_crit, a.height, max_degree);
        const double tv = total_variation(to_double_law(cond), spine);
        std::printf("%s,%.6f,%.6f\n", join_counts(n).c_str(), tv, 0.0);
    }
    return 0;
}

struct RatioArgs {
    std::string pmf, family, alpha, schedule, shift;
    int points = 3;
};

int run_ratio(const RatioArgs& a) {
    const PmfQ pq = load_pmf(a.pmf);
    const SetFamily fam = load_family(a.family);
    const PmfD pd = pq.to_double_pmf();

    std::vector<std::vector<long long>> ns;
    if (!a.schedule.empty())
        ns = parse_schedule(a.schedule);
    else if (!a.alpha.empty())
        ns = admissible_sequence(pd, fam, parse_doubles(a.alpha, "alpha"), a.points);
    else
        throw ConfigError("ratio needs --schedule or --alpha");

    std::vector<long long> shift(fam.sets.size(), 0);
    if (!a.shift.empty()) {
        shift = parse_longs(a.shift, "shift");
    } else {
        shift[0] = 1;
    }

    print_hash("ratio|pmf=" + read_text_file(a.pmf) + "|family=" + read_text_file(a.family) +
               "|alpha=" + a.alpha + "|schedule=" + a.schedule +
               "|points=" + std::to_string(a.points) + "|shift=" + a.shift);
    std::printf("n,base,shifted,ratio\n");
    for (const auto& pt : strong_ratio_series(pq, fam, ns, shift)) {
        std::printf("%s,%d,%d,%.9f\n", join_counts(pt.n).c_str(), pt.base_achievable ? 1 : 0,
                    pt.shifted_achievable ? 1 : 0, pt.ratio);
    }
    return 0;
}

struct CondArgs {
    double p0 = 0.0, p2 = 0.0, b = 0.0, eps = 0.0;
    long long nmin = 201, nmax = 2001;
};

int run_counterexample(const CondArgs& a) {
    const CondensationFamily fam = make_condensation(a.p0, a.p2, a.b);
    if (!(a.eps > 0.0) || !(a.eps < 1.0)) throw ConfigError("--eps must lie in (0,1)");
    if (a.nmin < 1 || a.nmax < a.nmin) throw ConfigError("need 1 <= nmin <= nmax");

    char cfg[256];
    std::snprintf(cfg, sizeof cfg, "counterexample|p0=%.17g|p2=%.17g|b=%.17g|eps=%.17g|%lld|%lld",
                  a.p0, a.p2, a.b, a.eps, a.nmin, a.nmax);
    print_hash(cfg);
    const double big_m = std::max(fam.c, 1.0 / fam.c);
    std::printf("# a=%.6f c=%.6f c0=%.6f floor=%.6f\n", fam.a, fam.c,
                condensation_c0(fam.a * a.b, a.eps),
                condensation_floor(fam.a * a.b, a.eps, big_m));
    std::printf("n,B1,B2,ratio\n");
    for (long long n = a.nmin | 1; n <= a.nmax; n += 2) {
        const CondensationPoint pt = condensation_ratio(fam, n, a.eps);
        std::printf("%lld,%.6e,%.6e,%.9f\n", n, std::exp(pt.log_b1), std::exp(pt.log_b2),
                    pt.ratio);
    }
    return 0;
}

struct OracleArgs {
    std::string p, pprime, family;
    int bound = 12;
};

int run_oracle_compat(const OracleArgs& a) {
    const PmfQ pq = load_pmf(a.p);
    const PmfQ qq = load_pmf(a.pprime);
    const SetFamily fam = load_family(a.family);
    const OracleVerdict v = compatibility_oracle(pq, qq, fam, a.bound);
    if (v.equivalent) {
        std::printf("equivalent=true trees=%zu classes=%zu\n", v.trees, v.classes);
    } else {
        std::printf("equivalent=false tree=%s detail=%s\n",
                    v.counterexample ? tree_to_string(*v.counterexample).c_str() : "none",
                    v.detail.c_str());
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"conditioned branching-tree toolkit"};
    app.require_subcommand(1);

    TiltArgs tilt_args;
    auto* tilt = app.add_subcommand("tilt", "print a tilted offspring law as JSON");
    tilt->add_option("--pmf", tilt_args.pmf, "offspring law JSON file")->required();
    tilt->add_option("--family", tilt_args.family, "set family JSON file")->required();
    tilt->add_option("--theta", tilt_args.theta, "tilt parameter: rational, 'zero' or 'inf'")
        ->required();
    tilt->add_option("--alpha", tilt_args.alpha, "direction weights (comma-separated rationals)");
    tilt->add_option("--beta", tilt_args.beta, "class weights (comma-separated rationals)");

    DirectionArgs critical_args;
    auto* critical = app.add_subcommand("critical", "critical tilt parameter of a direction");
    critical->add_option("--pmf", critical_args.pmf)->required();
    critical->add_option("--family", critical_args.family)->required();
    critical->add_option("--alpha", critical_args.alpha)->required();

    DirectionArgs generic_args;
    auto* generic = app.add_subcommand("generic", "decide whether a direction is generic");
    generic->add_option("--pmf", generic_args.pmf)->required();
    generic->add_option("--family", generic_args.family)->required();
    generic->add_option("--alpha", generic_args.alpha)->required();

    DirectionArgs aperiodic_args;
    auto* aperiodic = app.add_subcommand("aperiodic", "decide aperiodicity of a direction");
    aperiodic->add_option("--pmf", aperiodic_args.pmf)->required();
    aperiodic->add_option("--family", aperiodic_args.family)->required();
    aperiodic->add_option("--alpha", aperiodic_args.alpha)->required();

    SampleArgs sample_args;
    auto* sample = app.add_subcommand("sample", "draw trees conditioned on class counts");
    sample->add_option("--pmf", sample_args.pmf)->required();
    sample->add_option("--family", sample_args.family)->required();
    sample->add_option("--counts", sample_args.counts, "target count vector")->required();
    sample->add_option("--seed", sample_args.seed, "rng seed");
    sample->add_option("--strategy", sample_args.strategy, "dp, rejection or cycle");
    sample->add_option("--draws", sample_args.draws, "number of trees");

    RizzoloArgs rizzolo_args;
    auto* riz = app.add_subcommand("rizzolo", "collapse uncounted vertices to a typed tree");
    riz->add_option("--tree", rizzolo_args.tree, "preorder degrees, e.g. [1,2,0,0]")->required();
    riz->add_option("--family", rizzolo_args.family)->required();

    LimitArgs limit_args;
    auto* limit = app.add_subcommand("limit", "distance to the local limit along a schedule");
    limit->add_option("--pmf", limit_args.pmf)->required();
    limit->add_option("--family", limit_args.family)->required();
    limit->add_option("--alpha", limit_args.alpha)->required();
    limit->add_option("--height", limit_args.height, "truncation depth");
    limit->add_option("--schedule", limit_args.schedule,
                      "explicit count vectors, e.g. 6,4;12,8;24,16");
    limit->add_option("--points", limit_args.points, "schedule length when generated");

    RatioArgs ratio_args;
    auto* ratio = app.add_subcommand("ratio", "count-mass ratios along a schedule");
    ratio->add_option("--pmf", ratio_args.pmf)->required();
    ratio->add_option("--family", ratio_args.family)->required();
    ratio->add_option("--alpha", ratio_args.alpha);
    ratio->add_option("--schedule", ratio_args.schedule);
    ratio->add_option("--points", ratio_args.points);
    ratio->add_option("--shift", ratio_args.shift, "count shift (default 1,0,...)");

    CondArgs cond_args;
    auto* cond = app.add_subcommand("counterexample", "heavy-root mass under a pinned count");
    cond->add_option("--p0", cond_args.p0)->required();
    cond->add_option("--p2", cond_args.p2)->required();
    cond->add_option("--b", cond_args.b)->required();
    cond->add_option("--eps", cond_args.eps)->required();
    cond->add_option("--nmin", cond_args.nmin);
    cond->add_option("--nmax", cond_args.nmax);

    OracleArgs oracle_args;
    auto* oracle = app.add_subcommand("oracle", "exact enumeration checks");
    oracle->require_subcommand(1);
    auto* compat = oracle->add_subcommand("compat", "conditioned-law equivalence of two laws");
    compat->add_option("--p", oracle_args.p)->required();
    compat->add_option("--pprime", oracle_args.pprime)->required();
    compat->add_option("--family", oracle_args.family)->required();
    compat->add_option("--bound", oracle_args.bound, "maximum tree size");

    try {
        const std::vector<std::string> args = with_config_defaults(argc, argv);
        // CLI11 parses the reversed vector form
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);

        if (*tilt) return run_tilt(tilt_args);
        if (*critical) return run_critical(critical_args);
        if (*generic) return run_generic(generic_args);
        if (*aperiodic) return run_aperiodic(aperiodic_args);
        if (*sample) return run_sample(sample_args);
        if (*riz) return run_rizzolo(rizzolo_args);
        if (*limit) return run_limit(limit_args);
        if (*ratio) return run_ratio(ratio_args);
        if (*cond) return run_counterexample(cond_args);
        if (*oracle) return run_oracle_compat(oracle_args);
        return 2;
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e);
        std::fprintf(stderr, "%s\n", e.what());
        return 2;
    } catch (const ConfigError& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return 2;
    } catch (const PreconditionError& e) {
        std::fprintf(stderr, "rejected: %s\n", e.what());
        return 3;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "internal error: %s\n", e.what());
        return 1;
    }
}
