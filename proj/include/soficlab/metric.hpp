#pragma once

#include <cstdint>
#include <vector>

#include "soficlab/symbols.hpp"

namespace soficlab {

// Which of the two metrics a point set carries: the normalized site average
// d^V or the uniform maximum over a restriction set.
enum class MetricKind { NormalizedAverage, UniformMax };

// Normalized average of symbol distances; range [0,1].
double average_distance(const Configuration& x, const Configuration& y);

// Maximum symbol distance over the restriction D (indices into the sites).
double max_distance(const Configuration& x, const Configuration& y,
                    const std::vector<uint32_t>& d);

struct FinitePointSet {
    std::vector<Configuration> points;
    MetricKind metric = MetricKind::NormalizedAverage;
    std::vector<uint32_t> restriction;  // used by UniformMax; empty = all sites

    double distance(size_t i, size_t j) const;
};

// Separation uses the strict convention throughout: a delta-separated set has
// all pairwise distances strictly greater than delta.

// Maximal (greedy, first-fit in input order) delta-separated subset.
std::vector<size_t> greedy_separated(const FinitePointSet& s, double delta);

// Exact maximum cardinality of a delta-separated subset via branch-and-bound
// maximum independent set on the <=delta conflict graph.
size_t exact_separated(const FinitePointSet& s, double delta, size_t cap = 24);

struct SandwichReport {
    size_t sep_2delta = 0;
    size_t cov_delta_upper = 0;  // greedy maximal delta-separated set size
    size_t sep_delta = 0;
    bool chain_holds = false;
};

SandwichReport sep_cov_sandwich(const FinitePointSet& s, double delta, size_t cap = 24);

// Exact sep_delta of the depth-m alphabet under the symbol metric.
size_t alphabet_separated(int depth, double delta);

struct ProductBoundReport {
    double lhs = 0;  // log sep_{2delta} of the product space under the uniform metric
    double rhs = 0;  // |D| log sep_delta of the alphabet
    size_t product_sep = 0;
    size_t alphabet_sep = 0;
    bool holds = false;
};

// Exact check of log sep_{2delta}(X^D, max metric) <= |D| log sep_delta(X)
// over the full product space; capped by the enumeration limit.
ProductBoundReport product_bound_check(int depth, int d_size, double delta,
                                       size_t enum_cap = 1u << 14);

// Exact count of configurations y with average distance to a fixed center
// <= delta, i.e. the closed ball volume of d^V (center-independent).
// Returned as a natural log.
double log_ball_volume(int depth, size_t n, double delta);

}  // namespace soficlab
