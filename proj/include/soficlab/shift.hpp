#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "soficlab/group.hpp"
#include "soficlab/rng.hpp"
#include "soficlab/sofic.hpp"
#include "soficlab/symbols.hpp"

namespace soficlab {

// Finite window of a point of the full shift: one symbol per window element.
struct WindowedPoint {
    ElementSet window;
    int depth = 1;
    std::vector<Symbol> values;  // parallel to window order

    Symbol at(const GroupElement& h) const;
    bool has(const GroupElement& h) const { return window.contains(h); }
};

// Uniform average of point masses at pullback names, restricted to a window.
// Counts over |V| keep the weights exact rationals.
struct EmpiricalDistribution {
    ElementSet window;
    int depth = 1;
    std::map<std::vector<Symbol>, uint64_t> counts;
    uint64_t total = 0;

    double frequency(const std::vector<Symbol>& pattern) const;
    double tv_to(const std::map<std::vector<Symbol>, double>& reference) const;
};

// Mixture atom: a periodic point of the Z-shift given by one period of symbols.
struct MeasureAtom {
    double weight = 1.0;
    std::vector<Symbol> pattern;

    Symbol value_at(int64_t position) const {
        const int64_t L = static_cast<int64_t>(pattern.size());
        return pattern[static_cast<size_t>(((position % L) + L) % L)];
    }
};

// Target measures with exactly computable window marginals: products with
// independent coordinates, mixtures of periodic points (Z only), or an
// explicitly given marginal on one window.
class MeasureModel {
public:
    enum class Kind { Product, Atoms, ExplicitMarginal };

    static MeasureModel product(int depth, std::vector<double> coordinate_p);
    static MeasureModel fair_product(int depth);
    static MeasureModel atoms(int depth, std::vector<MeasureAtom> atoms, bool orbit_average);
    // 1/2 mass on the all-zeros point, 1/2 on the all-ones point.
    static MeasureModel two_points(int depth);
    static MeasureModel explicit_marginal(int depth, ElementSet window,
                                          std::map<std::vector<Symbol>, double> marginal);
    static MeasureModel from_spec(const std::string& spec, int depth);

    Kind kind() const { return kind_; }
    int depth() const { return depth_; }
    const std::vector<MeasureAtom>& atom_list() const { return atoms_; }

    // Exact marginal on the window (pattern order matches window order).
    std::map<std::vector<Symbol>, double> marginal(const ElementSet& window,
                                                   const GroupOracle& oracle) const;
    std::map<Symbol, double> site_marginal() const;
    Symbol sample_site(Rng& rng) const;
    // True when the single-site marginal is uniform over all 2^depth symbols;
    // iid proposals are then uniform over the whole configuration space.
    bool uniform_site_marginal() const;

    std::string describe() const;

private:
    Kind kind_ = Kind::Product;
    int depth_ = 1;
    std::vector<double> coord_p_;
    std::vector<MeasureAtom> atoms_;
    ElementSet explicit_window_;
    std::map<std::vector<Symbol>, double> explicit_marginal_;
    // Sampling cache for atoms
    std::vector<std::pair<double, Symbol>> site_cdf_;
    void rebuild_site_cdf();
};

// Stabilizer constraints attached to a neighborhood: the mass of points whose
// window stabilizer is small, and the mass of points whose stabilizer changes
// between the inner window and the squared outer window, must both stay below
// `mass_eps` strictly.
struct StabBlock {
    int min_count = 1;     // required stabilizer size inside the inner window
    double delta = 0.4;    // pointwise tolerance (strict <)
    double mass_eps = 0.1;
    ElementSet inner;      // F1
    ElementSet outer;      // F2 (symmetric, contains inner)
};

// Weak-* base neighborhood: total-variation ball around a window marginal,
// optionally intersected with the stabilizer constraints.
struct Neighborhood {
    ElementSet window;
    int depth = 1;
    std::map<std::vector<Symbol>, double> reference;
    double tv_radius = 1.0;
    std::optional<StabBlock> stab;

    void validate() const;
    std::string describe() const;
};

struct NeighborhoodEval {
    double tv = 0;
    double small_stab_mass = 0;   // strict-< threshold against stab->mass_eps
    double window_mismatch_mass = 0;
    bool member = false;
};

// Reads the pullback name of x at v over the window W: value at h is
// x at xi_{h^{-1}}(v). Requires W^{-1} inside the support.
WindowedPoint pullback_name(const Configuration& x, const SoficMap& xi, uint32_t v,
                            const ElementSet& w);

EmpiricalDistribution empirical_distribution(const Configuration& x, const SoficMap& xi,
                                             const ElementSet& w);

NeighborhoodEval evaluate_neighborhood(const Configuration& x, const SoficMap& xi,
                                       const Neighborhood& o);

bool is_good_model(const Configuration& x, const Neighborhood& o, const SoficMap& xi);

struct SampleStats {
    uint64_t tries = 0;
    uint64_t accepted = 0;
};

// Rejection sampler over iid site proposals from mu's single-site marginal.
// Throws ExhaustedTries when fewer than `count` members are found.
std::vector<Configuration> sample_good_models(const MeasureModel& mu, const SoficMap& xi,
                                              const Neighborhood& o, size_t count,
                                              uint64_t max_tries, uint64_t seed,
                                              SampleStats* stats = nullptr);

Configuration sample_iid_configuration(const MeasureModel& mu, size_t n, Rng& rng);

}  // namespace soficlab
