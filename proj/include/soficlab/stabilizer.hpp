#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "soficlab/graphs.hpp"
#include "soficlab/group.hpp"
#include "soficlab/shift.hpp"
#include "soficlab/sofic.hpp"
#include "soficlab/symbols.hpp"

namespace soficlab {

// ---------------------------------------------------------------------------
// Stabilizer sets

struct StabilizerWindowSet {
    ElementSet base_window;  // the window the agreement is tested over
    ElementSet members;      // elements of the query window that pass
};

// Periodic point of the Z-shift; the periodic extension supplies totality.
struct PeriodicConfigurationZ {
    int depth = 1;
    std::vector<Symbol> pattern;

    Symbol at(int64_t h) const {
        const int64_t l = static_cast<int64_t>(pattern.size());
        return pattern[static_cast<size_t>(((h % l) + l) % l)];
    }
    // Smallest divisor period of the pattern.
    size_t primitive_period() const;
};

// {g in F : the shift by g fixes the point}, exact symbol equality.
StabilizerWindowSet exact_stabilizer(const PeriodicConfigurationZ& p, const ElementSet& f);
// Finite-group variant over a total configuration indexed by element order.
StabilizerWindowSet exact_stabilizer(const GroupOracle& oracle, const std::vector<Symbol>& total,
                                     int depth, const ElementSet& f);

// {g in f_eval : d(x_h, g(x)_h) < delta for all h in f}. Requires the point's
// window to cover f and f_eval^{-1} f.
StabilizerWindowSet approx_stabilizer(const WindowedPoint& p, double delta, const ElementSet& f,
                                      const ElementSet& f_eval, const GroupOracle& oracle);

// Bitmask of the prefix coordinates that must agree for two symbols to be at
// distance strictly less than delta. Exact for the dyadic distance range.
uint32_t agreement_prefix_mask(int depth, double delta);

// Per-vertex mask over `members` indices: bit g set iff for every h in `test`,
// the pullback name of x at v satisfies d(y_h, g(y)_h) < delta.
std::vector<uint64_t> stab_masks_over_window(const Configuration& x, const SoficMap& xi,
                                             double delta, const ElementSet& members,
                                             const ElementSet& test);

// ---------------------------------------------------------------------------
// Neighborhood constraint masses

struct StabMassCounts {
    double small_stab_mass = 0;       // mass of {|stab cap inner| < min_count}
    double window_mismatch_mass = 0;  // mass of {inner-window and squared-outer-window stabilizers differ}
};

// Exact per-vertex evaluation of the two constraint masses against the
// empirical distribution of x.
StabMassCounts stab_constraint_masses(const Configuration& x, const SoficMap& xi,
                                      const StabBlock& block);

struct ConstraintRecord {
    double small_stab_mass = 0;
    double window_mismatch_mass = 0;
    double small_stab_se = 0;  // standard errors when sampled, 0 when exact
    double window_mismatch_se = 0;
    bool member = false;  // both masses strictly below mass_eps
    bool exact = true;
};

// Evaluates the constraint masses for a finitely supported empirical
// distribution (exact) over windowed patterns.
ConstraintRecord neighborhood_constraints(const EmpiricalDistribution& nu, const StabBlock& block,
                                          const GroupOracle& oracle);
// Sample-based estimate for a measure model (exact for atom mixtures).
ConstraintRecord neighborhood_constraints(const MeasureModel& nu, const StabBlock& block,
                                          uint64_t samples, uint64_t seed);

// ---------------------------------------------------------------------------
// Good vertices

struct GoodVertexReport {
    std::vector<uint8_t> good;
    std::vector<uint8_t> fail_small;    // stabilizer too small on the inner window
    std::vector<uint8_t> fail_window;   // inner vs squared-outer window mismatch
    std::vector<uint8_t> fail_triple;   // triple-product consistency failure
    uint64_t good_count = 0;

    double bad_fraction() const {
        return good.empty() ? 0.0
                            : 1.0 - static_cast<double>(good_count) / static_cast<double>(good.size());
    }
};

GoodVertexReport good_vertices(const Configuration& x, const SoficMap& xi, double delta,
                               int min_count, const ElementSet& inner, const ElementSet& outer);

// ---------------------------------------------------------------------------
// Conjugation

struct ConjugationRecord {
    bool premise = false;
    bool conclusion = false;
    bool holds = false;
};

// Premise: the inner-window stabilizer agrees with the squared-outer-window
// stabilizer inside the inner window. Conclusion: conjugation by any outer
// element maps the inner stabilizer into the stabilizer of the shifted point.
ConjugationRecord conjugation_check(const WindowedPoint& p, double delta, const ElementSet& inner,
                                    const ElementSet& outer, const GroupOracle& oracle);

// Exact window needed by conjugation_check.
ElementSet conjugation_window(const ElementSet& inner, const ElementSet& outer,
                              const GroupOracle& oracle);

// ---------------------------------------------------------------------------
// Selector, labels, labeled graph

struct Selector {
    std::vector<uint8_t> core;         // C membership mask
    std::vector<uint32_t> tau;         // index into the outer window, per vertex
    std::vector<uint32_t> tau_target;  // xi_{tau(v)}(v), cached at build time
    uint64_t core_size = 0;
    bool cond_size = false;         // |C| < (2/sqrt|F2|)|V|
    double outside_fraction = 0;    // fraction with xi_tau(v) outside C
    bool cond_coverage = false;     // outside_fraction <= 3 kappa
    bool in_hypothesis = false;     // randomized-domination hypothesis held

    // Second stage (over the labeled graph)
    bool has_d = false;
    std::vector<uint8_t> dset;
    std::vector<int32_t> tau_prime;  // index into the per-vertex label list, -1 = none
    uint64_t d_size = 0;
    double d_undominated_fraction = 0;
    bool d_cond_size = false;    // |D| <= (2/sqrt(M))|V|
    bool d_dominating = false;   // undominated fraction <= 33 * mass_eps
};

// Draws the Bernoulli core and the uniform selector map. `force_full_core`
// is the debug mode with C = V.
Selector build_selector(const SoficMap& xi, const ElementSet& outer, double kappa, uint64_t seed,
                        bool override_hypothesis = false, bool force_full_core = false);

// Stabilizer label on the core: per core vertex, the inner-window stabilizer
// mask of the pullback name.
struct StabLabel {
    std::vector<uint64_t> mask;  // valid where core[v] != 0
    std::vector<uint8_t> core;

    bool equal_on_core(const StabLabel& o) const;
};

StabLabel stab_label(const Configuration& x, const SoficMap& xi, const std::vector<uint8_t>& core,
                     double delta, const ElementSet& inner);

struct LabeledGraph {
    DirectedGraph graph;
    std::vector<std::vector<GroupElement>> labels;  // conjugated stabilizer per vertex
    RegularityReport reg;                           // against (min_count, |outer|^3)
    double low_outdegree_threshold = 0;             // 11 * mass_eps
    bool regular_claim = false;
};

LabeledGraph build_gs(const SoficMap& xi, const Selector& sel, const StabLabel& label,
                      const ElementSet& inner, const ElementSet& outer, int min_count,
                      double mass_eps);

// Edges between pairs of good vertices must join nearby symbols; returns the
// violating edges (empty on coherent inputs).
std::vector<std::pair<uint32_t, uint32_t>> claim_edge_check(const Configuration& x,
                                                            const SoficMap& xi,
                                                            const LabeledGraph& gs,
                                                            const Selector& sel,
                                                            const GoodVertexReport& good,
                                                            double delta);

// Draws the second-stage core D over the labeled graph and the edge selector
// into it; fills the D fields of `sel`.
void extend_selector_with_d(Selector& sel, const SoficMap& xi, const LabeledGraph& gs,
                            int min_count, double mass_eps, uint64_t seed);

struct ClaimDRecord {
    bool same_label = false;
    bool agree_on_d = false;
    bool hypothesis = false;
    double avg_distance = 0;
    bool conclusion = false;
    bool holds = false;
    bool d_in_hypothesis = false;
};

// If two configurations in one label class agree within delta on D, their
// average distance stays below eta.
ClaimDRecord claim_agreement_check(const Configuration& x, const Configuration& y,
                                   const SoficMap& xi, const Selector& sel, double delta,
                                   const ElementSet& inner, double eta);

// ---------------------------------------------------------------------------
// Separation bound and the parameter planner

// (4/sqrt(|outer|)) |inner| log 2 + (4/sqrt(min_count)) log sep_{delta/2}(alphabet).
double separation_bound(double inner_size, double outer_size, double min_count, double delta,
                        int depth);

struct PlannerConstraint {
    std::string name;
    double lhs = 0;
    double rhs = 0;
    bool satisfied = false;
    std::string note;

    double slack() const { return rhs - lhs; }
};

struct PlannerOutput {
    double eta = 0;
    int depth = 1;
    double eps = 0;
    double delta = 0;
    double min_count = 0;      // required stabilizer size
    int64_t f0_radius = 0;     // pilot window radius (Z interval)
    int64_t f1_radius = 0;     // inner window radius
    double f1_size = 0;
    double f2_size = 0;        // outer window size (interval, not materialized)
    double f2_radius = 0;
    double min_vertices = 0;
    double bound = 0;  // separation bound at the chosen parameters
    std::vector<PlannerConstraint> constraints;
    bool feasible = false;
    std::string failed_constraint;

    bool all_satisfied() const;
};

struct PlannerOptions {
    uint64_t sample_size = 10000;
    uint64_t seed = 1;
    unsigned threads = 1;
    int64_t max_window_radius = 1 << 22;
    int growth_steps = 3;  // window growth attempts for the empirical steps
};

// Chooses (eps, delta, min_count, inner, outer, min |V|) for the target eta
// over Z windows, certifying the two measure-dependent steps empirically.
// Throws InfeasibleError when no window passes at the requested confidence.
PlannerOutput plan_parameters(double eta, int depth, const MeasureModel& mu,
                              const PlannerOptions& opts);

}  // namespace soficlab
