#include "soficlab/graphs.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "soficlab/errors.hpp"
#include "soficlab/parallel.hpp"
#include "soficlab/rng.hpp"

namespace soficlab {

void DirectedGraph::add_edge(uint32_t u, uint32_t v) { out[u].push_back(v); }

void DirectedGraph::finalize() {
    for (auto& lst : out) {
        std::sort(lst.begin(), lst.end());
        lst.erase(std::unique(lst.begin(), lst.end()), lst.end());
    }
}

uint64_t DirectedGraph::edge_count() const {
    uint64_t e = 0;
    for (const auto& lst : out) e += lst.size();
    return e;
}

std::vector<uint32_t> DirectedGraph::in_degrees() const {
    std::vector<uint32_t> deg(vertex_count, 0);
    for (const auto& lst : out)
        for (uint32_t v : lst) ++deg[v];
    return deg;
}

DirectedGraph complete_with_loops(uint32_t n) {
    DirectedGraph g;
    g.vertex_count = n;
    g.out.resize(n);
    for (uint32_t u = 0; u < n; ++u) {
        g.out[u].resize(n);
        for (uint32_t v = 0; v < n; ++v) g.out[u][v] = v;
    }
    return g;
}

DirectedGraph empty_graph(uint32_t n) {
    DirectedGraph g;
    g.vertex_count = n;
    g.out.resize(n);
    return g;
}

DirectedGraph permutation_union(uint32_t n, int j, uint64_t seed) {
    DirectedGraph g;
    g.vertex_count = n;
    g.out.resize(n);
    Rng rng(derive_seed(seed, 0x9e45));
    std::vector<uint32_t> img(n);
    for (int p = 0; p < j; ++p) {
        for (uint32_t v = 0; v < n; ++v) img[v] = v;
        rng.shuffle(img);
        for (uint32_t v = 0; v < n; ++v) g.add_edge(v, img[v]);
    }
    g.finalize();
    return g;
}

DirectedGraph graph_from_edge_list(uint32_t n,
                                   const std::vector<std::pair<uint32_t, uint32_t>>& edges) {
    DirectedGraph g;
    g.vertex_count = n;
    g.out.resize(n);
    for (const auto& [u, v] : edges) {
        if (u >= n || v >= n) throw ConfigError("edge endpoint out of range");
        g.add_edge(u, v);
    }
    g.finalize();
    return g;
}

DirectedGraph graph_from_sofic(const SoficMap& xi, const ElementSet& f) {
    xi.require_defined(f);
    DirectedGraph g;
    g.vertex_count = xi.vertex_count();
    g.out.resize(g.vertex_count);
    for (const auto& elem : f) {
        const Permutation p = xi.permutation(elem);
        for (uint32_t v = 0; v < g.vertex_count; ++v) g.add_edge(v, p.img[v]);
    }
    g.finalize();
    return g;
}

RegularityReport regularity(const DirectedGraph& g, uint32_t k, uint32_t m) {
    RegularityReport r;
    r.k = k;
    r.m = m;
    uint64_t low = 0;
    for (const auto& lst : g.out)
        if (lst.size() < k) ++low;
    r.low_outdegree_fraction =
        g.vertex_count == 0 ? 0.0 : static_cast<double>(low) / g.vertex_count;
    uint32_t maxin = 0;
    for (uint32_t d : g.in_degrees()) maxin = std::max(maxin, d);
    r.max_indegree = maxin;
    r.regular = r.max_indegree <= m;
    return r;
}

std::vector<uint8_t> bernoulli_subset(uint32_t n, double p, uint64_t seed) {
    Rng rng(derive_seed(seed, 0xbe5e));
    std::vector<uint8_t> w(n, 0);
    for (uint32_t v = 0; v < n; ++v) w[v] = rng.bernoulli(p) ? 1 : 0;
    return w;
}

DominationReport domination(const DirectedGraph& g, const std::vector<uint8_t>& w) {
    if (w.size() != g.vertex_count) throw ConfigError("membership mask size mismatch");
    DominationReport r;
    for (uint32_t v = 0; v < g.vertex_count; ++v) {
        bool covered = false;
        for (uint32_t u : g.out[v]) {
            if (w[u]) {
                covered = true;
                break;
            }
        }
        if (!covered) ++r.undominated_count;
    }
    for (uint8_t b : w) r.subset_size += b;
    return r;
}

bool hypothesis_check(uint32_t k, uint32_t m, double kappa, double n) {
    if (k < 1 || kappa <= 0 || kappa >= 1) return false;
    const double lhs = std::pow(1.0 - 1.0 / std::sqrt(static_cast<double>(k)),
                                static_cast<double>(k));
    const double vbound = 2.0 * static_cast<double>(m) * static_cast<double>(m) /
                          (kappa * kappa * kappa);
    return lhs < kappa && n > vbound;
}

LemmaTrial lemma_trial(const DirectedGraph& g, uint32_t k, double kappa, uint64_t seed) {
    const double p = 1.0 / std::sqrt(static_cast<double>(k));
    const auto w = bernoulli_subset(g.vertex_count, p, seed);
    const auto dom = domination(g, w);
    LemmaTrial t;
    t.y = dom.undominated_count;
    t.w_size = dom.subset_size;
    t.dominating_3kappa =
        static_cast<double>(t.y) <= 3.0 * kappa * static_cast<double>(g.vertex_count);
    t.size_ok = static_cast<double>(t.w_size) <=
                (2.0 / std::sqrt(static_cast<double>(k))) * static_cast<double>(g.vertex_count);
    return t;
}

DirectedGraph GraphFamily::build(uint64_t seed) const {
    switch (kind) {
        case Kind::CompleteLoops:
            return complete_with_loops(n);
        case Kind::Empty:
            return empty_graph(n);
        case Kind::PermutationUnion:
            return permutation_union(n, perms, seed);
        case Kind::Sofic:
            if (!sofic) throw ConfigError("sofic family without a map");
            return graph_from_sofic(*sofic, sofic_window);
        case Kind::EdgeList:
            return graph_from_edge_list(n, edges);
    }
    throw ConfigError("unknown graph family");
}

std::string GraphFamily::describe() const {
    switch (kind) {
        case Kind::CompleteLoops:
            return "complete";
        case Kind::Empty:
            return "empty";
        case Kind::PermutationUnion:
            return "perms:" + std::to_string(perms);
        case Kind::Sofic:
            return "sofic";
        case Kind::EdgeList:
            return "edges:" + std::to_string(edges.size());
    }
    return "?";
}

GraphFamily GraphFamily::parse(const std::string& spec, uint32_t n) {
    GraphFamily f;
    f.n = n;
    if (spec == "complete") {
        f.kind = Kind::CompleteLoops;
    } else if (spec == "empty") {
        f.kind = Kind::Empty;
    } else if (spec.rfind("perms:", 0) == 0) {
        f.kind = Kind::PermutationUnion;
        f.perms = std::stoi(spec.substr(6));
        if (f.perms < 1) throw ConfigError("perms family needs >= 1 permutations");
    } else {
        throw ConfigError("unknown graph family: " + spec);
    }
    return f;
}

LemmaMonteCarloReport lemma_montecarlo(const GraphFamily& family, uint32_t k, uint32_t m,
                                       double kappa, uint64_t trials, uint64_t seed,
                                       unsigned threads, bool override_hypothesis) {
    LemmaMonteCarloReport r;
    r.trials = trials;
    r.in_hypothesis = hypothesis_check(k, m, kappa, static_cast<double>(family.n));
    if (!r.in_hypothesis && !override_hypothesis)
        throw HypothesisViolatedError(
            "domination hypothesis fails for k=" + std::to_string(k) + " M=" +
            std::to_string(m) + " kappa=" + std::to_string(kappa) +
            " n=" + std::to_string(family.n) + " (pass override to run anyway)");

    // Deterministic fixed graph for non-random families.
    DirectedGraph fixed;
    if (!family.randomized()) fixed = family.build(derive_seed(seed, 1));

    std::vector<uint64_t> ys(trials, 0);
    std::vector<uint8_t> fail(trials, 0);
    parallel_for(trials, threads, [&](size_t t) {
        const uint64_t trial_seed = derive_seed(seed, 1000 + t);
        LemmaTrial tr;
        if (family.randomized()) {
            const DirectedGraph g = family.build(derive_seed(trial_seed, 7));
            tr = lemma_trial(g, k, kappa, derive_seed(trial_seed, 8));
        } else {
            tr = lemma_trial(fixed, k, kappa, derive_seed(trial_seed, 8));
        }
        ys[t] = tr.y;
        fail[t] = tr.success() ? 0 : 1;
    });

    // Integer accumulation keeps the aggregate independent of worker count.
    uint64_t failures = 0, sum = 0;
    unsigned long long sumsq = 0;
    for (uint64_t t = 0; t < trials; ++t) {
        failures += fail[t];
        sum += ys[t];
        sumsq += static_cast<unsigned long long>(ys[t]) * ys[t];
    }
    r.failures = failures;
    r.failure_rate = trials == 0 ? 0.0 : static_cast<double>(failures) / trials;
    if (trials > 0) {
        r.mean_y = static_cast<double>(sum) / trials;
        r.var_y = static_cast<double>(sumsq) / trials - r.mean_y * r.mean_y;
    }
    r.bound_mean_y = 2.0 * kappa * static_cast<double>(family.n);
    r.bound_var_y = static_cast<double>(m) * m * static_cast<double>(family.n);
    r.mean_ok = r.mean_y <= r.bound_mean_y;
    r.var_ok = r.var_y <= r.bound_var_y;
    return r;
}

}  // namespace soficlab
