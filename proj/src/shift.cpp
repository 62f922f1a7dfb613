#include "soficlab/shift.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "soficlab/errors.hpp"
#include "soficlab/stabilizer.hpp"

namespace soficlab {

Symbol WindowedPoint::at(const GroupElement& h) const {
    const long k = window.index_of(h);
    if (k < 0) throw InsufficientWindowError("windowed point has no value at requested element");
    return values[static_cast<size_t>(k)];
}

double EmpiricalDistribution::frequency(const std::vector<Symbol>& pattern) const {
    auto it = counts.find(pattern);
    if (it == counts.end() || total == 0) return 0.0;
    return static_cast<double>(it->second) / static_cast<double>(total);
}

double EmpiricalDistribution::tv_to(const std::map<std::vector<Symbol>, double>& reference) const {
    double acc = 0;
    for (const auto& [pat, cnt] : counts) {
        const double p = static_cast<double>(cnt) / static_cast<double>(total);
        auto it = reference.find(pat);
        const double q = it == reference.end() ? 0.0 : it->second;
        acc += std::fabs(p - q);
    }
    for (const auto& [pat, q] : reference)
        if (!counts.count(pat)) acc += q;
    return acc / 2.0;
}

MeasureModel MeasureModel::product(int depth, std::vector<double> coordinate_p) {
    if (depth < 1 || depth > kMaxDepth) throw ConfigError("depth out of range");
    if (static_cast<int>(coordinate_p.size()) != depth)
        throw ConfigError("one probability per coordinate required");
    for (double p : coordinate_p)
        if (p < 0 || p > 1) throw ConfigError("coordinate probability out of [0,1]");
    MeasureModel m;
    m.kind_ = Kind::Product;
    m.depth_ = depth;
    m.coord_p_ = std::move(coordinate_p);
    return m;
}

MeasureModel MeasureModel::fair_product(int depth) {
    return product(depth, std::vector<double>(static_cast<size_t>(depth), 0.5));
}

MeasureModel MeasureModel::atoms(int depth, std::vector<MeasureAtom> atoms, bool orbit_average) {
    if (depth < 1 || depth > kMaxDepth) throw ConfigError("depth out of range");
    if (atoms.empty()) throw ConfigError("atom mixture needs at least one atom");
    MeasureModel m;
    m.kind_ = Kind::Atoms;
    m.depth_ = depth;
    if (orbit_average) {
        for (const auto& a : atoms) {
            const size_t L = a.pattern.size();
            for (size_t shift = 0; shift < L; ++shift) {
                MeasureAtom rotated;
                rotated.weight = a.weight / static_cast<double>(L);
                rotated.pattern.resize(L);
                for (size_t i = 0; i < L; ++i) rotated.pattern[i] = a.pattern[(i + shift) % L];
                m.atoms_.push_back(std::move(rotated));
            }
        }
    } else {
        m.atoms_ = std::move(atoms);
    }
    double w = 0;
    for (const auto& a : m.atoms_) {
        if (a.pattern.empty()) throw ConfigError("atom pattern must be non-empty");
        w += a.weight;
    }
    if (std::fabs(w - 1.0) > 1e-9) throw ConfigError("atom weights must sum to 1");
    m.rebuild_site_cdf();
    return m;
}

MeasureModel MeasureModel::two_points(int depth) {
    const Symbol ones = static_cast<Symbol>((1u << depth) - 1);
    return atoms(depth, {MeasureAtom{0.5, {0}}, MeasureAtom{0.5, {ones}}}, false);
}

MeasureModel MeasureModel::explicit_marginal(int depth, ElementSet window,
                                             std::map<std::vector<Symbol>, double> marginal) {
    MeasureModel m;
    m.kind_ = Kind::ExplicitMarginal;
    m.depth_ = depth;
    m.explicit_window_ = std::move(window);
    m.explicit_marginal_ = std::move(marginal);
    return m;
}

MeasureModel MeasureModel::from_spec(const std::string& spec, int depth) {
    if (spec == "fair") return fair_product(depth);
    if (spec == "constant") return atoms(depth, {MeasureAtom{1.0, {0}}}, false);
    if (spec == "two-point" || spec == "two_points") return two_points(depth);
    if (spec == "period2") {
        if (depth < 1) throw ConfigError("period2 needs depth >= 1");
        return atoms(depth, {MeasureAtom{1.0, {0, 1}}}, true);
    }
    if (spec.rfind("product:", 0) == 0) {
        std::vector<double> ps;
        std::stringstream ss(spec.substr(8));
        std::string tok;
        while (std::getline(ss, tok, ',')) ps.push_back(std::stod(tok));
        return product(depth, std::move(ps));
    }
    throw ConfigError("unknown measure spec: " + spec);
}

void MeasureModel::rebuild_site_cdf() {
    site_cdf_.clear();
    double acc = 0;
    for (const auto& a : atoms_) {
        acc += a.weight;
        site_cdf_.push_back({acc, a.pattern[0]});
    }
}

std::map<std::vector<Symbol>, double> MeasureModel::marginal(const ElementSet& window,
                                                             const GroupOracle& oracle) const {
    std::map<std::vector<Symbol>, double> out;
    const size_t w = window.size();
    switch (kind_) {
        case Kind::Product: {
            const double bits = static_cast<double>(w) * depth_;
            if (bits > 22) throw TooLargeError("product marginal window too large to enumerate");
            const uint64_t patterns = 1ull << (w * static_cast<size_t>(depth_));
            for (uint64_t code = 0; code < patterns; ++code) {
                std::vector<Symbol> pat(w);
                double prob = 1.0;
                for (size_t i = 0; i < w; ++i) {
                    const Symbol s =
                        static_cast<Symbol>((code >> (i * static_cast<size_t>(depth_))) &
                                            ((1u << depth_) - 1));
                    pat[i] = s;
                    for (int c = 0; c < depth_; ++c) {
                        const bool bit = (s >> c) & 1u;
                        prob *= bit ? coord_p_[static_cast<size_t>(c)]
                                    : 1.0 - coord_p_[static_cast<size_t>(c)];
                    }
                }
                if (prob > 0) out[pat] += prob;
            }
            return out;
        }
        case Kind::Atoms: {
            if (oracle.kind() != GroupKind::Integers)
                throw ConfigError("atom mixtures are defined over Z");
            for (const auto& a : atoms_) {
                std::vector<Symbol> pat(w);
                for (size_t i = 0; i < w; ++i) pat[i] = a.value_at(window[i].word[0]);
                out[pat] += a.weight;
            }
            return out;
        }
        case Kind::ExplicitMarginal: {
            if (!(window == explicit_window_))
                throw ConfigError("explicit marginal only available on its own window");
            return explicit_marginal_;
        }
    }
    return out;
}

std::map<Symbol, double> MeasureModel::site_marginal() const {
    std::map<Symbol, double> out;
    switch (kind_) {
        case Kind::Product: {
            for (Symbol s = 0; s < symbol_count(depth_); ++s) {
                double prob = 1.0;
                for (int c = 0; c < depth_; ++c) {
                    const bool bit = (s >> c) & 1u;
                    prob *= bit ? coord_p_[static_cast<size_t>(c)]
                                : 1.0 - coord_p_[static_cast<size_t>(c)];
                }
                if (prob > 0) out[s] = prob;
            }
            return out;
        }
        case Kind::Atoms: {
            for (const auto& a : atoms_) out[a.pattern[0]] += a.weight;
            return out;
        }
        case Kind::ExplicitMarginal: {
            GroupElement id;  // single-element window must be the identity window
            if (explicit_window_.size() != 1)
                throw ConfigError("site marginal unavailable for this explicit marginal");
            for (const auto& [pat, p] : explicit_marginal_) out[pat[0]] += p;
            return out;
        }
    }
    return out;
}

Symbol MeasureModel::sample_site(Rng& rng) const {
    switch (kind_) {
        case Kind::Product: {
            Symbol s = 0;
            for (int c = 0; c < depth_; ++c)
                if (rng.bernoulli(coord_p_[static_cast<size_t>(c)])) s |= (1u << c);
            return s;
        }
        case Kind::Atoms: {
            const double u = rng.unit();
            for (const auto& [cum, sym] : site_cdf_)
                if (u < cum) return sym;
            return site_cdf_.back().second;
        }
        case Kind::ExplicitMarginal: {
            const auto m = site_marginal();
            const double u = rng.unit();
            double acc = 0;
            for (const auto& [sym, p] : m) {
                acc += p;
                if (u < acc) return sym;
            }
            return m.rbegin()->first;
        }
    }
    return 0;
}

bool MeasureModel::uniform_site_marginal() const {
    const auto m = site_marginal();
    const uint32_t k = symbol_count(depth_);
    if (m.size() != k) return false;
    for (const auto& [sym, p] : m)
        if (std::fabs(p - 1.0 / k) > 1e-12) return false;
    return true;
}

std::string MeasureModel::describe() const {
    std::ostringstream os;
    switch (kind_) {
        case Kind::Product: {
            os << "product[";
            for (size_t i = 0; i < coord_p_.size(); ++i) os << (i ? "," : "") << coord_p_[i];
            os << "]";
            break;
        }
        case Kind::Atoms: {
            os << "atoms[" << atoms_.size() << "]";
            break;
        }
        case Kind::ExplicitMarginal:
            os << "explicit-marginal";
            break;
    }
    return os.str();
}

void Neighborhood::validate() const {
    if (depth < 1 || depth > kMaxDepth) throw ConfigError("neighborhood depth out of range");
    if (tv_radius <= 0 || tv_radius > 1) throw ConfigError("tv radius must lie in (0,1]");
    if (stab) {
        if (stab->delta <= 0) throw ConfigError("stabilizer tolerance must be positive");
        const double l = std::log2(1.0 / stab->delta);
        if (l >= -0.5 && std::fabs(l - std::round(l)) < 1e-9)
            throw ConfigError("1/delta must not be an integer power of 2");
        if (stab->min_count < 1) throw ConfigError("stabilizer size bound must be >= 1");
        if (stab->mass_eps <= 0 || stab->mass_eps > 1)
            throw ConfigError("stabilizer mass bound must lie in (0,1]");
        if (!stab->outer.contains_all(stab->inner))
            throw ConfigError("outer window must contain the inner window");
    }
}

std::string Neighborhood::describe() const {
    std::ostringstream os;
    os << "tv<" << tv_radius << " on |W|=" << window.size();
    if (stab)
        os << " + stab(M=" << stab->min_count << ",delta=" << stab->delta
           << ",eps=" << stab->mass_eps << ",|F1|=" << stab->inner.size()
           << ",|F2|=" << stab->outer.size() << ")";
    return os.str();
}

WindowedPoint pullback_name(const Configuration& x, const SoficMap& xi, uint32_t v,
                            const ElementSet& w) {
    if (x.sites.size() != xi.vertex_count())
        throw LengthMismatchError("configuration length differs from vertex count");
    WindowedPoint p;
    p.window = w;
    p.depth = x.depth;
    p.values.resize(w.size());
    for (size_t i = 0; i < w.size(); ++i) {
        const GroupElement hinv = xi.oracle().inv(w[i]);
        p.values[i] = x.sites[xi.apply(hinv, v)];
    }
    return p;
}

EmpiricalDistribution empirical_distribution(const Configuration& x, const SoficMap& xi,
                                             const ElementSet& w) {
    if (x.sites.size() != xi.vertex_count())
        throw LengthMismatchError("configuration length differs from vertex count");
    EmpiricalDistribution ed;
    ed.window = w;
    ed.depth = x.depth;
    const uint32_t n = xi.vertex_count();

    // Materialize the inverse permutations once; per-vertex reads are O(|W|).
    std::vector<Permutation> inv_perms;
    inv_perms.reserve(w.size());
    for (const auto& h : w) inv_perms.push_back(xi.permutation(xi.oracle().inv(h)));

    std::vector<Symbol> pat(w.size());
    for (uint32_t v = 0; v < n; ++v) {
        for (size_t i = 0; i < w.size(); ++i) pat[i] = x.sites[inv_perms[i].img[v]];
        ++ed.counts[pat];
    }
    ed.total = n;
    return ed;
}

NeighborhoodEval evaluate_neighborhood(const Configuration& x, const SoficMap& xi,
                                       const Neighborhood& o) {
    o.validate();
    NeighborhoodEval ev;
    ev.tv = empirical_distribution(x, xi, o.window).tv_to(o.reference);
    bool ok = ev.tv < o.tv_radius;
    if (o.stab) {
        const auto masses = stab_constraint_masses(x, xi, *o.stab);
        ev.small_stab_mass = masses.small_stab_mass;
        ev.window_mismatch_mass = masses.window_mismatch_mass;
        ok = ok && ev.small_stab_mass < o.stab->mass_eps &&
             ev.window_mismatch_mass < o.stab->mass_eps;
    }
    ev.member = ok;
    return ev;
}

bool is_good_model(const Configuration& x, const Neighborhood& o, const SoficMap& xi) {
    return evaluate_neighborhood(x, xi, o).member;
}

Configuration sample_iid_configuration(const MeasureModel& mu, size_t n, Rng& rng) {
    Configuration c;
    c.depth = mu.depth();
    c.sites.resize(n);
    for (size_t i = 0; i < n; ++i) c.sites[i] = mu.sample_site(rng);
    return c;
}

std::vector<Configuration> sample_good_models(const MeasureModel& mu, const SoficMap& xi,
                                              const Neighborhood& o, size_t count,
                                              uint64_t max_tries, uint64_t seed,
                                              SampleStats* stats) {
    std::vector<Configuration> out;
    Rng rng(derive_seed(seed, 0x600d));
    uint64_t tries = 0;
    while (out.size() < count && tries < max_tries) {
        ++tries;
        Configuration c = sample_iid_configuration(mu, xi.vertex_count(), rng);
        if (is_good_model(c, o, xi)) out.push_back(std::move(c));
    }
    if (stats) {
        stats->tries = tries;
        stats->accepted = out.size();
    }
    if (out.size() < count)
        throw ExhaustedTriesError("found " + std::to_string(out.size()) + "/" +
                                  std::to_string(count) + " good models in " +
                                  std::to_string(tries) + " tries");
    return out;
}

}  // namespace soficlab
