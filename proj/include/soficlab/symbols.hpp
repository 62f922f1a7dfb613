#pragma once

#include <bit>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "soficlab/errors.hpp"

namespace soficlab {

// Alphabet symbols are depth-m bit vectors packed into a word, coordinate 0 at
// bit 0. The metric is 2^{-j} with j the least differing coordinate, so the
// distance range is {0} u {1, 1/2, ..., 2^{-(m-1)}} and the diameter is 1.
using Symbol = uint32_t;

constexpr int kMaxDepth = 30;

inline uint32_t symbol_count(int depth) { return 1u << depth; }

inline double symbol_distance(Symbol a, Symbol b) {
    if (a == b) return 0.0;
    const int j = std::countr_zero(a ^ b);
    return 1.0 / static_cast<double>(1u << j);
}

// Distance in integer units of 2^{-(depth-1)}; exact for sums up to 2^63.
inline uint64_t symbol_distance_units(Symbol a, Symbol b, int depth) {
    if (a == b) return 0;
    const int j = std::countr_zero(a ^ b);
    return 1ull << (depth - 1 - j);
}

inline std::string symbol_to_string(Symbol s, int depth) {
    std::string out(static_cast<size_t>(depth), '0');
    for (int i = 0; i < depth; ++i)
        if (s & (1u << i)) out[static_cast<size_t>(i)] = '1';
    return out;
}

inline Symbol symbol_from_string(const std::string& s) {
    if (s.empty() || s.size() > kMaxDepth) throw ConfigError("bad symbol string: " + s);
    Symbol out = 0;
    for (size_t i = 0; i < s.size(); ++i) {
        if (s[i] == '1')
            out |= (1u << i);
        else if (s[i] != '0')
            throw ConfigError("bad symbol string: " + s);
    }
    return out;
}

// Element of the finite model space: one symbol per vertex, uniform depth.
struct Configuration {
    int depth = 1;
    std::vector<Symbol> sites;

    size_t size() const { return sites.size(); }
    bool operator==(const Configuration& o) const { return depth == o.depth && sites == o.sites; }
    bool operator<(const Configuration& o) const {
        if (depth != o.depth) return depth < o.depth;
        return sites < o.sites;
    }
};

inline Configuration constant_configuration(int depth, size_t n, Symbol s) {
    Configuration c;
    c.depth = depth;
    c.sites.assign(n, s);
    return c;
}

}  // namespace soficlab
