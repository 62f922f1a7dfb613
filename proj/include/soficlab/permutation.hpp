#pragma once

#include <cstdint>
#include <vector>

#include "soficlab/errors.hpp"

namespace soficlab {

// Bijection of {0..n-1} stored as an image array.
struct Permutation {
    std::vector<uint32_t> img;

    Permutation() = default;
    explicit Permutation(size_t n) : img(n) {
        for (size_t i = 0; i < n; ++i) img[i] = static_cast<uint32_t>(i);
    }

    size_t size() const { return img.size(); }
    uint32_t operator()(uint32_t v) const { return img[v]; }

    Permutation inverse() const {
        Permutation r;
        r.img.resize(img.size());
        for (size_t i = 0; i < img.size(); ++i) r.img[img[i]] = static_cast<uint32_t>(i);
        return r;
    }

    // (a.compose(b))(v) = a(b(v))
    Permutation compose(const Permutation& b) const {
        Permutation r;
        r.img.resize(img.size());
        for (size_t i = 0; i < img.size(); ++i) r.img[i] = img[b.img[i]];
        return r;
    }

    bool is_identity() const {
        for (size_t i = 0; i < img.size(); ++i)
            if (img[i] != i) return false;
        return true;
    }

    bool is_bijection() const {
        std::vector<bool> hit(img.size(), false);
        for (uint32_t v : img) {
            if (v >= img.size() || hit[v]) return false;
            hit[v] = true;
        }
        return true;
    }

    bool operator==(const Permutation& o) const { return img == o.img; }
};

}  // namespace soficlab
