#include "lomboost/bounds.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>

namespace lomboost {

namespace {

void check_gamma(double gamma) {
    if (!(gamma > 0.0 && gamma <= 0.5)) {
        throw std::invalid_argument("gamma must lie in (0, 0.5], got " + std::to_string(gamma));
    }
}

void check_k(long k) {
    if (k < 2) throw std::invalid_argument("at least two classes are required");
}

// Largest budget reported as an integer: 2^63 - 1.
constexpr double kMaxFiniteLog2 = 63.0;

// Guards the ceiling against last-ulp excess in exp2, so that alpha at the top
// of its range yields exactly one split.
constexpr double kCeilGuard = 1e-12;

}  // namespace

double SplitBudget::log2_budget() const noexcept {
    if (outcome == Outcome::Finite) return std::log2(static_cast<double>(splits));
    return log2_splits;
}

bool budget_less(const SplitBudget& a, const SplitBudget& b) noexcept {
    if (a.outcome != b.outcome) return a.outcome < b.outcome;
    switch (a.outcome) {
    case SplitBudget::Outcome::Finite: return a.splits < b.splits;
    case SplitBudget::Outcome::Astronomical: return a.log2_splits < b.log2_splits;
    case SplitBudget::Outcome::Infinite: return false;
    }
    return false;
}

Interval admissible_alpha(const CriterionKind& kind, long k) {
    check_k(k);
    const double top = worst_case_initial_criterion(kind, k);
    if (kind.tag() == CriterionKind::Tag::ModifiedGini) return {std::sqrt(kind.c() - 1.0), top};
    return {0.0, top};
}

double worst_case_initial_criterion(const CriterionKind& kind, long k) {
    check_k(k);
    const double kd = static_cast<double>(k);
    switch (kind.tag()) {
    case CriterionKind::Tag::ShannonEntropy: return 2.0 * std::log(kd);
    case CriterionKind::Tag::Gini: return 2.0 * (1.0 - 1.0 / kd);
    case CriterionKind::Tag::ModifiedGini: return 2.0 * std::sqrt(kd * kind.c() - 1.0);
    }
    return 0.0;
}

double budget_exponent(const CriterionKind& kind, long k, double gamma) {
    check_k(k);
    check_gamma(gamma);
    const double kd = static_cast<double>(k);
    const double common = (1.0 - gamma) * (1.0 - gamma) / (gamma * gamma * std::numbers::log2e);
    switch (kind.tag()) {
    case CriterionKind::Tag::ShannonEntropy: return 4.0 * common * std::log(kd);
    case CriterionKind::Tag::Gini: return 2.0 * common * (kd - 1.0);
    case CriterionKind::Tag::ModifiedGini: {
        const double c = kind.c();
        return 2.0 * common * c * c * c / ((c - 2.0) * (c - 2.0)) * kd * std::sqrt(kd * c - 1.0);
    }
    }
    return 0.0;
}

SplitBudget splits_required(const BoundQuery& q) {
    check_k(q.k);
    check_gamma(q.gamma);
    const Interval range = admissible_alpha(q.kind, q.k);
    if (!range.contains(q.alpha)) {
        throw std::invalid_argument("alpha " + std::to_string(q.alpha) + " outside [" +
                                    std::to_string(range.lo) + ", " + std::to_string(range.hi) +
                                    "]");
    }
    SplitBudget budget;
    if (q.alpha == 0.0) {
        budget.outcome = SplitBudget::Outcome::Infinite;
        budget.log2_splits = std::numeric_limits<double>::infinity();
        return budget;
    }
    const double base = range.hi / q.alpha;
    const double log2_x = budget_exponent(q.kind, q.k, q.gamma) * std::log2(base);
    budget.log2_splits = log2_x;
    if (log2_x >= kMaxFiniteLog2) {
        budget.outcome = SplitBudget::Outcome::Astronomical;
        return budget;
    }
    const double x = std::ceil(std::exp2(log2_x) * (1.0 - kCeilGuard));
    if (x >= std::exp2(kMaxFiniteLog2)) {
        budget.outcome = SplitBudget::Outcome::Astronomical;
        return budget;
    }
    budget.splits = x < 1.0 ? 1 : static_cast<std::uint64_t>(x);
    return budget;
}

EtaConstants eta_constants(double gamma, long k, double c) {
    check_gamma(gamma);
    check_k(k);
    if (!(c > 2.0)) throw std::invalid_argument("modified gini needs C > 2");
    const double kd = static_cast<double>(k);
    const double ratio = gamma / (1.0 - gamma);
    const double scale = c * c * c / ((c - 2.0) * (c - 2.0));
    return {
        2.0 * std::numbers::sqrt2 * ratio / std::sqrt(std::log(kd)),
        4.0 * ratio / std::sqrt(kd - 1.0),
        4.0 * ratio / std::sqrt(scale * kd * std::sqrt(kd * c - 1.0)),
    };
}

double eta_for(const CriterionKind& kind, double gamma, long k) {
    const double c = kind.tag() == CriterionKind::Tag::ModifiedGini
                         ? kind.c()
                         : CriterionKind::kDefaultModifiedGiniC;
    const EtaConstants eta = eta_constants(gamma, k, c);
    switch (kind.tag()) {
    case CriterionKind::Tag::ShannonEntropy: return eta.eta_e;
    case CriterionKind::Tag::Gini: return eta.eta_g;
    case CriterionKind::Tag::ModifiedGini: return eta.eta_m;
    }
    return 0.0;
}

double recurrence_envelope(double g1, double eta, long t) {
    if (t < 0) throw std::invalid_argument("split index must be non-negative");
    return recurrence_envelope_log2(g1, eta, std::log2(static_cast<double>(t) + 1.0));
}

double recurrence_envelope_log2(double g1, double eta, double log2_t_plus_one) {
    if (!(g1 >= 0.0)) throw std::invalid_argument("initial criterion must be non-negative");
    if (!(eta >= 0.0)) throw std::invalid_argument("eta must be non-negative");
    return g1 * std::exp(-eta * eta * log2_t_plus_one / 32.0);
}

EmpiricalGamma empirical_gamma(const ClassDistribution& dist, const SplitStatistics& stats) {
    const double half = 0.5 * objective_value(dist, stats);
    const double beta = stats.marginal();
    const double cap = std::min(beta, 1.0 - beta);
    return {half, cap, std::min(half, cap)};
}

}  // namespace lomboost
