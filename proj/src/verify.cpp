#include "lomboost/verify.hpp"

#include "lomboost/bounds.hpp"
#include "lomboost/criteria.hpp"
#include "lomboost/objective.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <functional>
#include <ostream>
#include <random>

namespace lomboost {

namespace {

using json = nlohmann::json;
using Rng = std::mt19937_64;

// Roundoff allowance for range checks that are exact in real arithmetic.
constexpr double kRoundoff = 1e-12;
// Slack granted to the lower-bound inequalities themselves.
constexpr double kBoundSlack = 1e-9;

std::vector<double> dirichlet(Rng& rng, std::size_t k, double shape) {
    std::gamma_distribution<double> g(shape, 1.0);
    std::vector<double> x(k);
    double sum = 0.0;
    for (auto& v : x) {
        v = g(rng);
        sum += v;
    }
    if (sum <= 0.0) {
        std::fill(x.begin(), x.end(), 1.0 / static_cast<double>(k));
        return x;
    }
    for (auto& v : x) v /= sum;
    return x;
}

std::size_t random_k(Rng& rng, std::size_t lo = 2, std::size_t hi = 50) {
    return std::uniform_int_distribution<std::size_t>(lo, hi)(rng);
}

/// Random distribution, sometimes with zero-mass classes.
ClassDistribution random_distribution(Rng& rng, std::size_t k) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    const double shape = u(rng) < 0.5 ? 1.0 : 0.2;
    auto p = dirichlet(rng, k, shape);
    if (u(rng) < 0.2 && k > 2) {
        const auto zeroed = std::uniform_int_distribution<std::size_t>(0, k - 1)(rng);
        p[zeroed] = 0.0;
        double sum = 0.0;
        for (double v : p) sum += v;
        if (sum > 0.0) {
            for (auto& v : p) v /= sum;
        } else {
            p[(zeroed + 1) % k] = 1.0;
        }
    }
    return ClassDistribution(std::move(p));
}

/// Conditionals drawn uniformly, at the corners, or mixed.
std::vector<double> random_conditionals(Rng& rng, std::size_t k) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    const double mode = u(rng);
    std::vector<double> p(k);
    for (auto& v : p) {
        if (mode < 0.5) {
            v = u(rng);
        } else if (mode < 0.75) {
            v = u(rng) < 0.5 ? 0.0 : 1.0;
        } else {
            v = u(rng) < 0.5 ? u(rng) : (u(rng) < 0.5 ? 0.0 : 1.0);
        }
    }
    return p;
}

json to_json(std::span<const double> v) { return json(std::vector<double>(v.begin(), v.end())); }

struct Check {
    std::string name;
    std::function<std::string(Rng&)> trial;  // returns a counterexample or ""
};

PropertyResult run_check(const Check& check, std::size_t trials, std::uint64_t seed) {
    Rng rng(seed);
    PropertyResult result{check.name, true, trials, {}};
    for (std::size_t i = 0; i < trials; ++i) {
        auto failure = check.trial(rng);
        if (!failure.empty()) {
            result.passed = false;
            result.trials = i + 1;
            result.counterexample = std::move(failure);
            break;
        }
    }
    return result;
}

std::string objective_range(Rng& rng) {
    const auto k = random_k(rng);
    const auto dist = random_distribution(rng, k);
    const auto stats = SplitStatistics::from_conditionals(dist, random_conditionals(rng, k));
    const double j = objective_value(dist, stats);
    if (j >= -kRoundoff && j <= 1.0 + kRoundoff) return {};
    return json{{"pi", to_json(dist.probs())}, {"P", to_json(stats.conditionals())}, {"J", j}}.dump();
}

// J = 1 exactly at pure, balanced splits and nowhere else.
std::string objective_optimum(Rng& rng) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    const auto k = random_k(rng);
    std::vector<double> cond(k);
    for (auto& c : cond) c = u(rng) < 0.5 ? 0.0 : 1.0;
    cond[0] = 0.0;
    cond[1] = 1.0;
    // Half the mass on each side.
    auto mass = dirichlet(rng, k, 1.0);
    double right = 0.0, left = 0.0;
    for (std::size_t i = 0; i < k; ++i) (cond[i] == 1.0 ? right : left) += mass[i];
    for (std::size_t i = 0; i < k; ++i) mass[i] *= 0.5 / (cond[i] == 1.0 ? right : left);
    double sum = 0.0;
    for (double m : mass) sum += m;
    for (auto& m : mass) m /= sum;
    const ClassDistribution dist(mass);

    const auto stats = SplitStatistics::from_conditionals(dist, cond);
    const double j = objective_value(dist, stats);
    if (std::abs(j - 1.0) > 1e-6) {
        return json{{"case", "pure and balanced"}, {"pi", to_json(dist.probs())},
                    {"P", to_json(cond)}, {"J", j}}.dump();
    }

    // Perturb one class off its corner or unbalance the mass: J must drop
    // below one, and any instance still at J = 1 must be pure and balanced.
    auto perturbed = cond;
    const auto which = std::uniform_int_distribution<std::size_t>(0, k - 1)(rng);
    const double eps = std::exp(std::uniform_real_distribution<double>(std::log(1e-4), 0.0)(rng)) * 0.5;
    perturbed[which] = perturbed[which] == 1.0 ? 1.0 - eps : eps;
    const auto random_dist = random_distribution(rng, k);
    for (const auto& [d, p] : {std::pair{dist, perturbed}, std::pair{random_dist, cond}}) {
        const auto s = SplitStatistics::from_conditionals(d, p);
        const double jj = objective_value(d, s);
        if (jj < 1.0 - kRoundoff) continue;
        bool pure = true;
        for (std::size_t i = 0; i < k; ++i) {
            if (d[i] > 0.0 && std::min(p[i], 1.0 - p[i]) > 1e-6) pure = false;
        }
        if (!pure || std::abs(s.marginal() - 0.5) > 1e-6) {
            return json{{"case", "J = 1 without purity or balance"}, {"pi", to_json(d.probs())},
                        {"P", to_json(p)}, {"J", jj}}.dump();
        }
    }
    return {};
}

std::string balance_in_interval(Rng& rng) {
    const auto k = random_k(rng);
    const auto dist = random_distribution(rng, k);
    const auto stats = SplitStatistics::from_conditionals(dist, random_conditionals(rng, k));
    const double j = std::min(objective_value(dist, stats), 1.0);
    // Pure splits sit on the interval's edge, where the half-width
    // sqrt(1 - J) / 2 magnifies roundoff in J; the allowance goes on J.
    const auto range = balance_interval(std::max(j - kRoundoff, 0.0));
    if (range.contains(balancing_factor(stats))) return {};
    return json{{"pi", to_json(dist.probs())}, {"P", to_json(stats.conditionals())}, {"J", j},
                {"beta", stats.marginal()}, {"interval", {range.lo, range.hi}}}.dump();
}

std::string purity_below_bound(Rng& rng) {
    const auto k = random_k(rng);
    const auto dist = random_distribution(rng, k);
    const auto stats = SplitStatistics::from_conditionals(dist, random_conditionals(rng, k));
    const double beta = stats.marginal();
    if (!(beta > 0.0 && beta < 1.0)) return {};
    const double j = std::min(objective_value(dist, stats), 1.0);
    const double alpha = purity_factor(dist, stats);
    const double bound = purity_upper_bound(j, beta);
    if (alpha <= bound + kBoundSlack) return {};
    return json{{"pi", to_json(dist.probs())}, {"P", to_json(stats.conditionals())}, {"J", j},
                {"beta", beta}, {"alpha", alpha}, {"bound", bound}}.dump();
}

SplitDecomposition random_split(Rng& rng) {
    const auto k = random_k(rng);
    const double beta = std::uniform_real_distribution<double>(0.01, 0.99)(rng);
    const double shape = std::uniform_real_distribution<double>(0.0, 1.0)(rng) < 0.5 ? 1.0 : 0.3;
    std::vector<double> left = dirichlet(rng, k, shape);
    std::vector<double> right = dirichlet(rng, k, shape);
    std::vector<double> parent(k);
    for (std::size_t i = 0; i < k; ++i) parent[i] = (1.0 - beta) * left[i] + beta * right[i];
    return SplitDecomposition(ClassDistribution(std::move(parent)), beta,
                              ClassDistribution(std::move(left)), ClassDistribution(std::move(right)));
}

Check jensen_gap_check(const CriterionKind& kind, double fault_scale) {
    std::string name = "jensen-gap-" + kind.name();
    if (kind.tag() == CriterionKind::Tag::ModifiedGini) name += "(C=" + json(kind.c()).dump() + ")";
    return {name, [kind, fault_scale](Rng& rng) -> std::string {
                const auto split = random_split(rng);
                const double delta = split_delta(split, kind);
                const double bound = fault_scale * strong_concavity_lower_bound(split, kind);
                if (delta >= 0.0 && delta >= bound - kBoundSlack) return {};
                return json{{"criterion", kind.name()},
                            {"beta", split.beta()},
                            {"left", to_json(split.left().probs())},
                            {"right", to_json(split.right().probs())},
                            {"delta", delta},
                            {"lower_bound", bound}}
                    .dump();
            }};
}

Check criterion_bounds_check(const CriterionKind& kind) {
    return {"criterion-bounds-" + kind.name(), [kind](Rng& rng) -> std::string {
                const auto k = random_k(rng);
                const auto leaves = std::uniform_int_distribution<std::size_t>(1, 64)(rng);
                const auto weights = dirichlet(rng, leaves, 1.0);
                std::vector<WeightedLeaf> tree;
                for (double w : weights) tree.push_back({w, random_distribution(rng, k)});
                const double value = tree_criterion(tree, kind);
                const double heaviest = *std::max_element(weights.begin(), weights.end());
                const auto range = criterion_bounds(static_cast<long>(leaves) - 1,
                                                    static_cast<long>(k), heaviest, kind);
                const double slack = kRoundoff * std::max(1.0, range.hi);
                if (range.contains(value, slack)) return {};
                return json{{"criterion", kind.name()}, {"k", k}, {"leaves", leaves},
                            {"heaviest", heaviest}, {"value", value},
                            {"bounds", {range.lo, range.hi}}}.dump();
            }};
}

std::string mean_inequality(Rng& rng) {
    const auto k = random_k(rng, 1, 100);
    std::exponential_distribution<double> e(1.0);
    double sum = 0.0, sq = 0.0;
    std::vector<double> x(k);
    for (auto& v : x) {
        v = e(rng);
        sum += v;
        sq += v * v;
    }
    const double rhs = sum * sum / static_cast<double>(k);
    if (sq >= rhs * (1.0 - kRoundoff)) return {};
    return json{{"x", x}, {"sum_sq", sq}, {"bound", rhs}}.dump();
}

struct GridPoint {
    CriterionKind kind;
    long k;
    double gamma;
    double alpha;
};

std::vector<GridPoint> budget_grid() {
    std::vector<GridPoint> grid;
    const std::vector<CriterionKind> kinds{CriterionKind::shannon(), CriterionKind::gini(),
                                           CriterionKind::modified_gini(4.0)};
    for (const auto& kind : kinds) {
        for (long k : {2L, 3L, 5L, 10L, 20L, 50L, 100L}) {
            for (int g = 1; g <= 10; ++g) {
                const double gamma = 0.05 * g;
                const auto range = admissible_alpha(kind, k);
                for (double f : {0.05, 0.25, 0.5, 0.9, 1.0}) {
                    grid.push_back({kind, k, gamma, range.lo + f * (range.hi - range.lo)});
                }
            }
        }
    }
    return grid;
}

PropertyResult budget_consistency() {
    const auto grid = budget_grid();
    PropertyResult result{"budget-envelope-consistency", true, grid.size(), {}};
    for (const auto& q : grid) {
        const auto budget = splits_required({q.kind, q.k, q.gamma, q.alpha});
        const double g1 = worst_case_initial_criterion(q.kind, q.k);
        const double eta = eta_for(q.kind, q.gamma, q.k);
        const double envelope = budget.finite()
                                    ? recurrence_envelope(g1, eta, static_cast<long>(budget.splits) - 1)
                                    : recurrence_envelope_log2(g1, eta, budget.log2_splits);
        if (envelope > q.alpha * (1.0 + kBoundSlack)) {
            result.passed = false;
            result.counterexample = json{{"criterion", q.kind.name()}, {"k", q.k},
                                         {"gamma", q.gamma}, {"alpha", q.alpha},
                                         {"log2_budget", budget.log2_budget()},
                                         {"envelope", envelope}}.dump();
            break;
        }
    }
    return result;
}

PropertyResult budget_monotonicity() {
    const auto grid = budget_grid();
    PropertyResult result{"budget-monotonicity", true, grid.size(), {}};
    const auto fail = [&](const GridPoint& a, const GridPoint& b, const char* axis) {
        result.passed = false;
        result.counterexample = json{{"axis", axis}, {"criterion", a.kind.name()},
                                     {"first", {a.k, a.gamma, a.alpha}},
                                     {"second", {b.k, b.gamma, b.alpha}}}.dump();
        return result;
    };
    const auto budget = [](const GridPoint& p) {
        return splits_required({p.kind, p.k, p.gamma, p.alpha});
    };
    for (const auto& p : grid) {
        const auto base = budget(p);
        // Larger gamma or larger alpha never needs more splits.
        GridPoint more_gamma = p;
        more_gamma.gamma = std::min(0.5, p.gamma + 0.05);
        if (budget_less(base, budget(more_gamma))) return fail(p, more_gamma, "gamma");
        GridPoint more_alpha = p;
        more_alpha.alpha = std::min(admissible_alpha(p.kind, p.k).hi, p.alpha * 1.1);
        if (budget_less(base, budget(more_alpha))) return fail(p, more_alpha, "alpha");
        // More classes at the same target never needs fewer splits.
        GridPoint more_k = p;
        more_k.k = p.k + 1;
        if (budget_less(budget(more_k), base)) return fail(p, more_k, "k");
    }
    return result;
}

}  // namespace

std::vector<PropertyResult> run_verification(const VerifyOptions& options) {
    const double fault_scale = options.fault == InjectedFault::Modulus ? 4.0 : 1.0;
    std::vector<Check> checks{
        {"objective-range", objective_range},
        {"objective-optimum", objective_optimum},
        {"balance-interval", balance_in_interval},
        {"purity-bound", purity_below_bound},
        jensen_gap_check(CriterionKind::shannon(), fault_scale),
        jensen_gap_check(CriterionKind::gini(), fault_scale),
    };
    for (double c : {2.5, 3.0, 4.0, 10.0}) {
        checks.push_back(jensen_gap_check(CriterionKind::modified_gini(c), fault_scale));
    }
    for (const auto& kind :
         {CriterionKind::shannon(), CriterionKind::gini(), CriterionKind::modified_gini()}) {
        checks.push_back(criterion_bounds_check(kind));
    }
    checks.push_back({"mean-inequality", mean_inequality});

    std::vector<PropertyResult> results;
    std::uint64_t stream = 0;
    for (const auto& check : checks) {
        results.push_back(run_check(check, options.trials, options.seed * 1000003ULL + stream++));
    }
    results.push_back(budget_consistency());
    results.push_back(budget_monotonicity());
    return results;
}

void print_verification(std::ostream& out, const std::vector<PropertyResult>& results) {
    for (const auto& r : results) {
        out << r.name << ": " << (r.passed ? "PASS" : "FAIL") << " (" << r.trials << " trials)\n";
        if (!r.passed) out << "  counterexample: " << r.counterexample << '\n';
    }
}

}  // namespace lomboost
