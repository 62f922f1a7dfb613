#include "soficlab/metric.hpp"

#include <algorithm>
#include <bit>
#include <cmath>

#include "soficlab/errors.hpp"

namespace soficlab {

double average_distance(const Configuration& x, const Configuration& y) {
    if (x.depth != y.depth || x.sites.size() != y.sites.size())
        throw LengthMismatchError("configurations differ in depth or length");
    if (x.sites.empty()) throw LengthMismatchError("empty configurations have no distance");
    uint64_t units = 0;
    for (size_t i = 0; i < x.sites.size(); ++i)
        units += symbol_distance_units(x.sites[i], y.sites[i], x.depth);
    const double scale = static_cast<double>(x.sites.size()) *
                         static_cast<double>(1u << (x.depth - 1));
    return static_cast<double>(units) / scale;
}

double max_distance(const Configuration& x, const Configuration& y,
                    const std::vector<uint32_t>& d) {
    if (x.depth != y.depth || x.sites.size() != y.sites.size())
        throw LengthMismatchError("configurations differ in depth or length");
    if (d.empty()) throw EmptyRestrictionError("restriction set is empty");
    double m = 0;
    for (uint32_t v : d) m = std::max(m, symbol_distance(x.sites[v], y.sites[v]));
    return m;
}

double FinitePointSet::distance(size_t i, size_t j) const {
    if (metric == MetricKind::NormalizedAverage) return average_distance(points[i], points[j]);
    if (!restriction.empty()) return max_distance(points[i], points[j], restriction);
    std::vector<uint32_t> all(points[i].sites.size());
    for (size_t k = 0; k < all.size(); ++k) all[k] = static_cast<uint32_t>(k);
    return max_distance(points[i], points[j], all);
}

std::vector<size_t> greedy_separated(const FinitePointSet& s, double delta) {
    std::vector<size_t> kept;
    for (size_t i = 0; i < s.points.size(); ++i) {
        bool ok = true;
        for (size_t k : kept) {
            if (!(s.distance(i, k) > delta)) {
                ok = false;
                break;
            }
        }
        if (ok) kept.push_back(i);
    }
    return kept;
}

namespace {

// Conflict graph: edge when distance <= delta (the strict-separation complement).
std::vector<std::vector<bool>> conflict_matrix(const FinitePointSet& s, double delta) {
    const size_t n = s.points.size();
    std::vector<std::vector<bool>> adj(n, std::vector<bool>(n, false));
    for (size_t i = 0; i < n; ++i)
        for (size_t j = i + 1; j < n; ++j)
            if (!(s.distance(i, j) > delta)) adj[i][j] = adj[j][i] = true;
    return adj;
}

bool is_equivalence(const std::vector<std::vector<bool>>& adj) {
    const size_t n = adj.size();
    for (size_t i = 0; i < n; ++i)
        for (size_t j = 0; j < n; ++j) {
            if (!adj[i][j]) continue;
            for (size_t k = 0; k < n; ++k)
                if (adj[j][k] && k != i && !adj[i][k]) return false;
        }
    return true;
}

size_t count_classes(const std::vector<std::vector<bool>>& adj) {
    const size_t n = adj.size();
    std::vector<bool> seen(n, false);
    size_t classes = 0;
    for (size_t i = 0; i < n; ++i) {
        if (seen[i]) continue;
        ++classes;
        seen[i] = true;
        for (size_t j = 0; j < n; ++j)
            if (adj[i][j]) seen[j] = true;
    }
    return classes;
}

struct MisSearch {
    std::vector<uint64_t> adj;
    size_t best = 0;

    void expand(uint64_t candidates, size_t size) {
        if (size + static_cast<size_t>(std::popcount(candidates)) <= best) return;
        if (candidates == 0) {
            best = std::max(best, size);
            return;
        }
        const int v = std::countr_zero(candidates);
        expand(candidates & ~(adj[static_cast<size_t>(v)] | (1ull << v)), size + 1);
        expand(candidates & ~(1ull << v), size);
    }
};

}  // namespace

size_t exact_separated(const FinitePointSet& s, double delta, size_t cap) {
    const size_t n = s.points.size();
    if (n == 0) return 0;
    const auto adj = conflict_matrix(s, delta);
    // When the conflict relation is transitive the graph is a disjoint union of
    // cliques and the maximum independent set is one point per class. This is
    // always the case for the uniform metric at a fixed threshold.
    if (is_equivalence(adj)) return count_classes(adj);
    if (n > cap || n > 64)
        throw TooLargeError("exact separation beyond the configured cap (" +
                            std::to_string(n) + " points)");
    MisSearch search;
    search.adj.assign(n, 0);
    for (size_t i = 0; i < n; ++i)
        for (size_t j = 0; j < n; ++j)
            if (adj[i][j]) search.adj[i] |= 1ull << j;
    uint64_t all = n == 64 ? ~0ull : ((1ull << n) - 1);
    search.expand(all, 0);
    return search.best;
}

SandwichReport sep_cov_sandwich(const FinitePointSet& s, double delta, size_t cap) {
    SandwichReport r;
    r.sep_2delta = exact_separated(s, 2 * delta, cap);
    r.cov_delta_upper = greedy_separated(s, delta).size();
    r.sep_delta = exact_separated(s, delta, cap);
    r.chain_holds = r.sep_2delta <= r.cov_delta_upper && r.cov_delta_upper <= r.sep_delta;
    return r;
}

size_t alphabet_separated(int depth, double delta) {
    if (depth < 1 || depth > kMaxDepth) throw ConfigError("depth out of range");
    FinitePointSet s;
    s.metric = MetricKind::NormalizedAverage;  // single site: plain symbol distance
    for (Symbol sym = 0; sym < symbol_count(depth); ++sym) {
        Configuration c;
        c.depth = depth;
        c.sites = {sym};
        s.points.push_back(std::move(c));
    }
    // Conflicts at a fixed threshold are prefix-agreement, an equivalence, so
    // the class shortcut applies at any depth.
    return exact_separated(s, delta, symbol_count(depth));
}

ProductBoundReport product_bound_check(int depth, int d_size, double delta, size_t enum_cap) {
    if (d_size < 1) throw ConfigError("product dimension must be >= 1");
    const double bits = static_cast<double>(depth) * d_size;
    if (bits > 40 || (1ull << static_cast<uint64_t>(bits)) > enum_cap)
        throw TooLargeError("product space beyond the enumeration cap");
    const uint64_t total = 1ull << static_cast<uint64_t>(bits);

    FinitePointSet s;
    s.metric = MetricKind::UniformMax;
    for (uint64_t code = 0; code < total; ++code) {
        Configuration c;
        c.depth = depth;
        c.sites.resize(static_cast<size_t>(d_size));
        for (int i = 0; i < d_size; ++i)
            c.sites[static_cast<size_t>(i)] = static_cast<Symbol>(
                (code >> (static_cast<uint64_t>(i) * depth)) & ((1u << depth) - 1));
        s.points.push_back(std::move(c));
    }
    ProductBoundReport r;
    r.product_sep = exact_separated(s, 2 * delta, total);
    r.alphabet_sep = alphabet_separated(depth, delta);
    r.lhs = std::log(static_cast<double>(r.product_sep));
    r.rhs = d_size * std::log(static_cast<double>(r.alphabet_sep));
    r.holds = r.lhs <= r.rhs + 1e-12;
    return r;
}

double log_ball_volume(int depth, size_t n, double delta) {
    if (depth < 1 || depth > kMaxDepth) throw ConfigError("depth out of range");
    const long double scale = static_cast<long double>(n) * (1u << (depth - 1));
    const long double tau = static_cast<long double>(delta) * scale;
    if (tau >= scale)  // whole space
        return static_cast<double>(n) * depth * std::log(2.0);
    // Budget in integer distance units; rounding up keeps the volume an
    // overestimate, which is the safe direction for packing lower bounds.
    const uint64_t budget = static_cast<uint64_t>(std::floor(tau + 1e-9L));

    // Per site, the distance classes from any fixed center symbol: distance 0
    // (1 symbol) and first-difference coordinate j with 2^{depth-1-j} symbols
    // at 2^{depth-1-j} units, j = 0..depth-1.
    std::vector<std::pair<uint64_t, long double>> classes;  // (units, log count)
    for (int j = 0; j < depth; ++j) {
        const uint64_t u = 1ull << (depth - 1 - j);
        classes.push_back({u, std::log(static_cast<long double>(u))});
    }

    const long double neg_inf = -1e300L;
    std::vector<long double> cur(budget + 1, neg_inf), nxt;
    cur[0] = 0.0L;
    auto lse = [](long double a, long double b) {
        if (a < b) std::swap(a, b);
        if (b <= -1e299L) return a;
        return a + std::log1p(std::exp(b - a));
    };
    for (size_t site = 0; site < n; ++site) {
        nxt.assign(budget + 1, neg_inf);
        for (uint64_t t = 0; t <= budget; ++t) {
            if (cur[t] <= neg_inf / 2) continue;
            nxt[t] = lse(nxt[t], cur[t]);  // distance-0 class
            for (const auto& [u, logc] : classes) {
                if (t + u > budget) continue;
                nxt[t + u] = lse(nxt[t + u], cur[t] + logc);
            }
        }
        cur.swap(nxt);
    }
    long double total = neg_inf;
    for (uint64_t t = 0; t <= budget; ++t) total = lse(total, cur[t]);
    // Tiny slack absorbs the long-double accumulation error, again in the
    // overestimate direction.
    return static_cast<double>(total) + 1e-9;
}

}  // namespace soficlab
