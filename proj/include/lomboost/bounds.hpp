#pragma once

#include "lomboost/criteria.hpp"
#include "lomboost/objective.hpp"

#include <cstdint>

namespace lomboost {

/// Target criterion value alpha for a tree over k classes whose every split
/// has weak-learning advantage gamma in (0, 0.5].
struct BoundQuery {
    CriterionKind kind;
    long k;
    double gamma;
    double alpha;
};

/// Number of splits that suffices to push the criterion below alpha.
/// Budgets that do not fit in a signed 64-bit integer are reported as
/// astronomical with their base-2 logarithm; alpha = 0 has no finite budget.
struct SplitBudget {
    enum class Outcome { Finite, Astronomical, Infinite };

    Outcome outcome = Outcome::Finite;
    std::uint64_t splits = 1;  // valid when outcome == Finite
    /// log2 of the un-rounded right-hand side; +inf for Infinite.
    double log2_splits = 0.0;

    bool finite() const noexcept { return outcome == Outcome::Finite; }
    /// log2 of the reported budget: log2(splits) when finite.
    double log2_budget() const noexcept;
};

/// Orders budgets by size (finite < astronomical < infinite).
bool budget_less(const SplitBudget& a, const SplitBudget& b) noexcept;

/// alpha range the split-count guarantee is stated for:
/// entropy [0, 2 ln k], gini [0, 2(1 - 1/k)], modified gini [sqrt(C-1), 2 sqrt(kC-1)].
Interval admissible_alpha(const CriterionKind& kind, long k);

/// Worst-case criterion value after the first split (the top of the admissible
/// alpha range).
double worst_case_initial_criterion(const CriterionKind& kind, long k);

/// Closed-form split budget
///   entropy        (2 ln k / alpha)^(4 (1-gamma)^2 ln k / (gamma^2 log2 e))
///   gini           (2 (1 - 1/k) / alpha)^(2 (1-gamma)^2 (k-1) / (gamma^2 log2 e))
///   modified gini  (2 sqrt(kC-1) / alpha)^(2 (1-gamma)^2 C^3 k sqrt(kC-1) / (gamma^2 (C-2)^2 log2 e))
/// rounded up, minimum 1. Throws std::invalid_argument outside the admissible
/// ranges.
SplitBudget splits_required(const BoundQuery& q);

/// Exponent of the budget as a power of (initial criterion / alpha).
double budget_exponent(const CriterionKind& kind, long k, double gamma);

struct EtaConstants {
    double eta_e;
    double eta_g;
    double eta_m;
};

/// Per-criterion rate constants; each split shrinks the criterion by at least
/// a factor 1 - eta^2 / (16 (t + 1)).
EtaConstants eta_constants(double gamma, long k, double c = CriterionKind::kDefaultModifiedGiniC);

/// The constant of eta_constants that belongs to `kind`.
double eta_for(const CriterionKind& kind, double gamma, long k);

/// g1 * exp(-eta^2 log2(t + 1) / 32): upper envelope of the criterion after
/// t + 1 splits, given its value g1 after the first.
double recurrence_envelope(double g1, double eta, long t);

/// Same envelope evaluated at log2(t + 1) directly, for astronomical t.
double recurrence_envelope_log2(double g1, double eta, double log2_t_plus_one);

struct EmpiricalGamma {
    double half_objective;   // J / 2
    double feasibility_cap;  // min(beta, 1 - beta)
    double value;            // min of the two
};

/// Weak-learning advantage realized by a split.
EmpiricalGamma empirical_gamma(const ClassDistribution& dist, const SplitStatistics& stats);

}  // namespace lomboost
