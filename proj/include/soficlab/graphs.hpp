#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "soficlab/group.hpp"
#include "soficlab/sofic.hpp"

namespace soficlab {

// Finite simple digraph; self-loops allowed, no parallel edges. Out-neighbor
// lists are kept sorted and unique.
struct DirectedGraph {
    uint32_t vertex_count = 0;
    std::vector<std::vector<uint32_t>> out;

    void add_edge(uint32_t u, uint32_t v);
    void finalize();  // sort + dedupe all lists
    uint64_t edge_count() const;
    std::vector<uint32_t> in_degrees() const;
};

DirectedGraph complete_with_loops(uint32_t n);
DirectedGraph empty_graph(uint32_t n);
// Union of j independent uniform permutations (edges v -> pi_i(v), deduped).
DirectedGraph permutation_union(uint32_t n, int j, uint64_t seed);
DirectedGraph graph_from_edge_list(uint32_t n, const std::vector<std::pair<uint32_t, uint32_t>>& edges);

// Edge (u,v) present iff some g in F maps u to v. For symmetric maps the
// in-degree is bounded by |F|.
DirectedGraph graph_from_sofic(const SoficMap& xi, const ElementSet& f);

struct RegularityReport {
    double low_outdegree_fraction = 0;  // fraction of v with out-degree < k
    uint32_t max_indegree = 0;
    uint32_t k = 0;
    uint32_t m = 0;
    bool regular = false;  // low fraction <= eps and max in-degree <= M, eps supplied at check time
};

RegularityReport regularity(const DirectedGraph& g, uint32_t k, uint32_t m);
inline bool is_regular(const RegularityReport& r, double eps) {
    return r.low_outdegree_fraction <= eps && r.max_indegree <= r.m;
}

struct DominationReport {
    uint64_t undominated_count = 0;  // Y = #{v : no out-neighbor of v lies in W}
    uint64_t subset_size = 0;

    bool dominating(double eps, uint64_t n) const {
        return static_cast<double>(undominated_count) <= eps * static_cast<double>(n);
    }
};

// Each vertex included independently with probability p; returns a membership mask.
std::vector<uint8_t> bernoulli_subset(uint32_t n, double p, uint64_t seed);

DominationReport domination(const DirectedGraph& g, const std::vector<uint8_t>& w);

// (1 - 1/sqrt(k))^k < kappa  and  N > 2 M^2 kappa^{-3}. Plain double arithmetic.
bool hypothesis_check(uint32_t k, uint32_t m, double kappa, double n);

struct LemmaTrial {
    bool dominating_3kappa = false;
    bool size_ok = false;  // |W| <= (2/sqrt(k)) |V|
    uint64_t y = 0;
    uint64_t w_size = 0;
    bool success() const { return dominating_3kappa && size_ok; }
};

// One draw of the randomized domination experiment: W is (1/sqrt(k))-Bernoulli.
LemmaTrial lemma_trial(const DirectedGraph& g, uint32_t k, double kappa, uint64_t seed);

// Graph family used by the Monte Carlo harness.
struct GraphFamily {
    enum class Kind { CompleteLoops, Empty, PermutationUnion, Sofic, EdgeList };
    Kind kind = Kind::PermutationUnion;
    uint32_t n = 0;
    int perms = 4;
    const SoficMap* sofic = nullptr;
    ElementSet sofic_window;
    std::vector<std::pair<uint32_t, uint32_t>> edges;
    bool randomized() const { return kind == Kind::PermutationUnion; }

    DirectedGraph build(uint64_t seed) const;
    std::string describe() const;
    static GraphFamily parse(const std::string& spec, uint32_t n);
};

struct LemmaMonteCarloReport {
    uint64_t trials = 0;
    uint64_t failures = 0;
    double failure_rate = 0;
    double mean_y = 0;
    double var_y = 0;
    double bound_mean_y = 0;  // 2 kappa |V|
    double bound_var_y = 0;   // M^2 |V|
    bool mean_ok = false;
    bool var_ok = false;
    bool in_hypothesis = false;
};

// Independent trials with per-trial derived seeds; the aggregate is identical
// for any worker count. Throws HypothesisViolated unless `override_hypothesis`.
LemmaMonteCarloReport lemma_montecarlo(const GraphFamily& family, uint32_t k, uint32_t m,
                                       double kappa, uint64_t trials, uint64_t seed,
                                       unsigned threads = 1, bool override_hypothesis = false);

}  // namespace soficlab
