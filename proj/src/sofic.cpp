#include "soficlab/sofic.hpp"

#include <algorithm>
#include <numeric>

#include "soficlab/errors.hpp"
#include "soficlab/rng.hpp"

namespace soficlab {

bool SupportSpec::contains(const GroupOracle& oracle, const GroupElement& g) const {
    if (explicit_set) return set.contains(g);
    switch (oracle.kind()) {
        case GroupKind::Integers: {
            return std::llabs(g.word[0]) <= radius;
        }
        case GroupKind::Abelian: {
            int64_t l1 = 0;
            for (int64_t c : g.word) l1 += std::llabs(c);
            return l1 <= radius;
        }
        case GroupKind::Free:
            return static_cast<int>(g.word.size()) <= radius;
        case GroupKind::Finite:
            return true;  // ball radius covers the whole group once closed
    }
    return false;
}

bool SupportSpec::contains_all(const GroupOracle& oracle, const ElementSet& f) const {
    for (const auto& g : f)
        if (!contains(oracle, g)) return false;
    return true;
}

std::string SupportSpec::describe(const GroupOracle& oracle) const {
    if (explicit_set) return "explicit:" + std::to_string(set.size());
    (void)oracle;
    return "ball:" + std::to_string(radius);
}

SoficMap SoficMap::build_cyclic(uint32_t n, const ElementSet& support) {
    if (n < 1) throw ConfigError("cyclic map needs n >= 1");
    SoficMap m;
    m.kind_ = SoficKind::CyclicZ;
    m.n_ = n;
    m.oracle_ = GroupOracle::integers();
    m.support_.explicit_set = true;
    m.support_.set = support;
    m.symmetric_ = true;
    m.exact_hom_ = true;
    return m;
}

SoficMap SoficMap::build_cyclic_radius(uint32_t n, int radius) {
    SoficMap m = build_cyclic(n, ElementSet{});
    m.support_.explicit_set = false;
    m.support_.radius = radius;
    return m;
}

SoficMap SoficMap::build_torus(const std::vector<uint32_t>& dims, int radius) {
    if (dims.empty()) throw ConfigError("torus needs at least one dimension");
    uint64_t n = 1;
    for (uint32_t d : dims) {
        if (d < 1) throw ConfigError("torus dimensions must be >= 1");
        n *= d;
    }
    if (n > UINT32_MAX) throw ConfigError("torus too large");
    SoficMap m;
    m.kind_ = SoficKind::TorusZd;
    m.n_ = static_cast<uint32_t>(n);
    m.oracle_ = GroupOracle::abelian(static_cast<int>(dims.size()));
    m.support_.explicit_set = false;
    m.support_.radius = radius;
    m.dims_ = dims;
    m.symmetric_ = true;
    m.exact_hom_ = true;
    return m;
}

SoficMap SoficMap::build_quotient(const GroupOracle& oracle,
                                  const std::vector<Permutation>& generator_images,
                                  const ElementSet& support) {
    if (generator_images.size() != oracle.generators().size())
        throw ConfigError("one permutation per generator required");
    const size_t n = generator_images.empty() ? 0 : generator_images[0].size();
    for (const auto& p : generator_images) {
        if (p.size() != n) throw ConfigError("generator images have mixed degrees");
        if (!p.is_bijection()) throw ConfigError("generator image is not a bijection");
    }
    std::vector<Permutation> inv_images;
    inv_images.reserve(generator_images.size());
    for (const auto& p : generator_images) inv_images.push_back(p.inverse());

    SoficMap m;
    m.kind_ = SoficKind::Table;
    m.n_ = static_cast<uint32_t>(n);
    m.oracle_ = oracle;
    m.support_.explicit_set = true;
    m.support_.set = support;
    m.perms_.reserve(support.size());
    for (const auto& g : support) {
        Permutation acc(n);
        for (int letter : oracle.factor(g)) {
            const auto& step = letter > 0 ? generator_images[letter - 1] : inv_images[-letter - 1];
            acc = step.compose(acc);
        }
        m.perms_.push_back(std::move(acc));
    }
    // The factored table is consistent iff the images extend to a homomorphism
    // on the support; verify the group law on all in-support products.
    for (const auto& a : support) {
        for (const auto& b : support) {
            const GroupElement ab = oracle.mul(a, b);
            const long k = support.index_of(ab);
            if (k < 0) continue;
            const Permutation composed =
                m.perms_[support.index_of(a)].compose(m.perms_[support.index_of(b)]);
            if (!(composed == m.perms_[static_cast<size_t>(k)]))
                throw InconsistentHomError("generator images contradict the group law at " +
                                           oracle.to_string(a) + " * " + oracle.to_string(b));
        }
    }
    m.symmetric_ = true;
    m.exact_hom_ = true;
    return m;
}

SoficMap SoficMap::sample_free(int rank, uint32_t n, int radius, uint64_t seed) {
    if (rank < 1) throw ConfigError("free rank must be >= 1");
    if (n < 2) throw ConfigError("free sample needs n >= 2");
    SoficMap m;
    m.kind_ = SoficKind::FreeGens;
    m.n_ = n;
    m.oracle_ = GroupOracle::free_group(rank);
    m.support_.explicit_set = false;
    m.support_.radius = radius;
    Rng rng(derive_seed(seed, 0xf5ee));
    for (int i = 0; i < rank; ++i) {
        Permutation p(n);
        rng.shuffle(p.img);
        m.gen_inv_perms_.push_back(p.inverse());
        m.gen_perms_.push_back(std::move(p));
    }
    m.symmetric_ = true;
    m.exact_hom_ = true;
    return m;
}

SoficMap SoficMap::build_regular(const GroupOracle& finite_oracle, const ElementSet& support) {
    if (finite_oracle.kind() != GroupKind::Finite)
        throw ConfigError("regular representation needs a finite group");
    const uint32_t k = static_cast<uint32_t>(finite_oracle.order());
    std::vector<Permutation> images;
    for (const auto& g : finite_oracle.generators()) {
        Permutation p(k);
        for (uint32_t v = 0; v < k; ++v)
            p.img[v] = static_cast<uint32_t>(
                finite_oracle.mul(g, GroupElement{{v}}).word[0]);
        images.push_back(std::move(p));
    }
    return build_quotient(finite_oracle, images, support);
}

SoficMap SoficMap::from_table(const GroupOracle& oracle, const ElementSet& support,
                              std::vector<Permutation> perms, bool symmetric, bool exact_hom) {
    if (perms.size() != support.size()) throw ConfigError("one permutation per support element required");
    SoficMap m;
    m.kind_ = SoficKind::Table;
    m.n_ = perms.empty() ? 0 : static_cast<uint32_t>(perms[0].size());
    m.oracle_ = oracle;
    m.support_.explicit_set = true;
    m.support_.set = support;
    m.perms_ = std::move(perms);
    m.symmetric_ = symmetric;
    m.exact_hom_ = exact_hom;
    const long id = support.index_of(oracle.identity());
    if (id >= 0 && !m.perms_[static_cast<size_t>(id)].is_identity())
        throw ConfigError("identity element must map to the identity permutation");
    return m;
}

void SoficMap::require_defined(const ElementSet& f) const {
    for (const auto& g : f)
        if (!defined_on(g))
            throw SupportTooSmallError("map not defined at " + oracle_.to_string(g) +
                                       " (support " + support_.describe(oracle_) + ")");
}

long SoficMap::table_index(const GroupElement& g) const {
    const long k = support_.set.index_of(g);
    if (k < 0)
        throw SupportTooSmallError("map not defined at " + oracle_.to_string(g));
    return k;
}

uint32_t SoficMap::apply(const GroupElement& g, uint32_t v) const {
    if (!defined_on(g))
        throw SupportTooSmallError("map not defined at " + oracle_.to_string(g));
    switch (kind_) {
        case SoficKind::Table:
            return perms_[static_cast<size_t>(table_index(g))].img[v];
        case SoficKind::CyclicZ: {
            const int64_t r = ((static_cast<int64_t>(v) + g.word[0]) % n_ + n_) % n_;
            return static_cast<uint32_t>(r);
        }
        case SoficKind::TorusZd: {
            uint32_t out = 0;
            uint32_t rem = v;
            uint32_t stride = 1;
            for (size_t i = 0; i < dims_.size(); ++i) {
                const uint32_t d = dims_[i];
                const int64_t coord = rem % d;
                rem /= d;
                const int64_t moved = ((coord + g.word[i]) % d + d) % d;
                out += static_cast<uint32_t>(moved) * stride;
                stride *= d;
            }
            return out;
        }
        case SoficKind::FreeGens: {
            uint32_t cur = v;
            // xi_{ab} = xi_a o xi_b: apply letters right to left.
            for (auto it = g.word.rbegin(); it != g.word.rend(); ++it) {
                const int64_t l = *it;
                cur = l > 0 ? gen_perms_[l - 1].img[cur] : gen_inv_perms_[-l - 1].img[cur];
            }
            return cur;
        }
    }
    return v;
}

Permutation SoficMap::permutation(const GroupElement& g) const {
    if (!defined_on(g))
        throw SupportTooSmallError("map not defined at " + oracle_.to_string(g));
    if (kind_ == SoficKind::Table) return perms_[static_cast<size_t>(table_index(g))];
    Permutation p(n_);
    for (uint32_t v = 0; v < n_; ++v) p.img[v] = apply(g, v);
    return p;
}

void SoficMap::corrupt_entry(const GroupElement& g, uint32_t v, uint32_t new_image) {
    if (kind_ != SoficKind::Table) throw ConfigError("only table-backed maps can be corrupted");
    auto& p = perms_[static_cast<size_t>(table_index(g))];
    // Swap images so the result stays a bijection.
    const uint32_t old_image = p.img[v];
    for (uint32_t u = 0; u < n_; ++u) {
        if (p.img[u] == new_image) {
            p.img[u] = old_image;
            break;
        }
    }
    p.img[v] = new_image;
    symmetric_ = false;
    exact_hom_ = false;
}

double ApproxQuality::max_hom_defect() const {
    double m = 0;
    for (const auto& [k, v] : hom_defect) m = std::max(m, v);
    return m;
}

double ApproxQuality::max_fix_defect(const GroupOracle& oracle) const {
    double m = 0;
    for (const auto& [g, v] : fix_defect)
        if (!oracle.is_identity(g)) m = std::max(m, v);
    return m;
}

ApproxQuality quality(const SoficMap& xi, const ElementSet& f) {
    const GroupOracle& oracle = xi.oracle();
    // Precondition: F*F inside the support (checked per product below as well).
    xi.require_defined(f);
    const uint32_t n = xi.vertex_count();
    ApproxQuality q;

    std::vector<Permutation> perms;
    perms.reserve(f.size());
    for (const auto& g : f) perms.push_back(xi.permutation(g));

    for (size_t i = 0; i < f.size(); ++i) {
        for (size_t j = 0; j < f.size(); ++j) {
            const GroupElement gh = oracle.mul(f[i], f[j]);
            const Permutation pgh = xi.permutation(gh);  // SupportTooSmall if missing
            uint64_t bad = 0;
            const auto& pg = perms[i].img;
            const auto& ph = perms[j].img;
            for (uint32_t v = 0; v < n; ++v)
                if (pg[ph[v]] != pgh.img[v]) ++bad;
            q.hom_defect.push_back({{f[i], f[j]}, static_cast<double>(bad) / n});
        }
    }
    for (size_t i = 0; i < f.size(); ++i) {
        uint64_t fixed = 0;
        for (uint32_t v = 0; v < n; ++v)
            if (perms[i].img[v] == v) ++fixed;
        q.fix_defect.push_back({f[i], static_cast<double>(fixed) / n});
    }
    q.symmetric = true;
    for (size_t i = 0; i < f.size(); ++i) {
        const GroupElement gi = oracle.inv(f[i]);
        if (!xi.defined_on(gi)) continue;
        const Permutation comp = perms[i].compose(xi.permutation(gi));
        if (!comp.is_identity()) {
            q.symmetric = false;
            break;
        }
    }
    return q;
}

SoficMap RandomSoficModel::sample(uint32_t n, uint64_t seed) const {
    switch (family) {
        case Family::FreeUniform:
            return SoficMap::sample_free(rank, n, radius, seed);
        case Family::Cyclic:
            return SoficMap::build_cyclic_radius(n, radius);
    }
    throw ConfigError("unknown random sofic family");
}

}  // namespace soficlab
