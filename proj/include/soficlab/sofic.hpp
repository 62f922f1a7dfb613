#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "soficlab/group.hpp"
#include "soficlab/permutation.hpp"

namespace soficlab {

// How the partial map into the symmetric group is realized. Table-backed maps
// store one permutation per support element; the structured kinds evaluate on
// demand so that large windows stay cheap.
enum class SoficKind { Table, CyclicZ, TorusZd, FreeGens };

// Which group elements the map is defined on. Structured kinds use a ball
// radius instead of a materialized element list.
struct SupportSpec {
    bool explicit_set = true;
    ElementSet set;   // when explicit_set
    int radius = 0;   // ball radius otherwise

    bool contains(const GroupOracle& oracle, const GroupElement& g) const;
    bool contains_all(const GroupOracle& oracle, const ElementSet& f) const;
    std::string describe(const GroupOracle& oracle) const;
};

// Partial map g -> permutation of {0..n-1}, defined on a finite window.
// Reads outside the window are a hard error, never a silent identity.
class SoficMap {
public:
    static SoficMap build_cyclic(uint32_t n, const ElementSet& support);
    static SoficMap build_cyclic_radius(uint32_t n, int radius);
    static SoficMap build_torus(const std::vector<uint32_t>& dims, int radius);
    // Extends generator images to the support by factoring through the
    // generators; validates consistency with the group law on support pairs.
    static SoficMap build_quotient(const GroupOracle& oracle,
                                   const std::vector<Permutation>& generator_images,
                                   const ElementSet& support);
    static SoficMap sample_free(int rank, uint32_t n, int radius, uint64_t seed);
    // Regular representation of a finite group (free action, exact hom).
    static SoficMap build_regular(const GroupOracle& finite_oracle, const ElementSet& support);
    // Explicit table, used for corrupted/defective maps in experiments.
    static SoficMap from_table(const GroupOracle& oracle, const ElementSet& support,
                               std::vector<Permutation> perms, bool symmetric, bool exact_hom);

    uint32_t vertex_count() const { return n_; }
    const GroupOracle& oracle() const { return oracle_; }
    const SupportSpec& support() const { return support_; }
    SoficKind map_kind() const { return kind_; }
    bool symmetric_flag() const { return symmetric_; }
    bool exact_hom_flag() const { return exact_hom_; }

    bool defined_on(const GroupElement& g) const { return support_.contains(oracle_, g); }
    void require_defined(const ElementSet& f) const;

    // Evaluates xi_g(v). SupportTooSmall if g lies outside the window.
    uint32_t apply(const GroupElement& g, uint32_t v) const;
    // Materializes xi_g as a permutation.
    Permutation permutation(const GroupElement& g) const;

    // Overwrites the table entry for g (testing hook; table kind only).
    void corrupt_entry(const GroupElement& g, uint32_t v, uint32_t new_image);

private:
    SoficKind kind_ = SoficKind::Table;
    uint32_t n_ = 0;
    GroupOracle oracle_;
    SupportSpec support_;
    bool symmetric_ = false;
    bool exact_hom_ = false;

    std::vector<Permutation> perms_;  // Table: parallel to support_.set
    std::vector<uint32_t> dims_;      // TorusZd
    std::vector<Permutation> gen_perms_, gen_inv_perms_;  // FreeGens

    long table_index(const GroupElement& g) const;
};

// Exact defect fractions of a map over a window, by full enumeration of V.
struct ApproxQuality {
    // (g,h) -> fraction of v with xi_g(xi_h(v)) != xi_{gh}(v)
    std::vector<std::pair<std::pair<GroupElement, GroupElement>, double>> hom_defect;
    // g -> fraction of fixed points (identity included for reporting)
    std::vector<std::pair<GroupElement, double>> fix_defect;
    bool symmetric = false;

    double max_hom_defect() const;
    // Maximum over non-identity elements.
    double max_fix_defect(const GroupOracle& oracle) const;
    bool is_approximation(const GroupOracle& oracle, double eps) const {
        return max_hom_defect() < eps && max_fix_defect(oracle) < eps;
    }
};

// Requires F*F inside the support; counts are exact.
ApproxQuality quality(const SoficMap& xi, const ElementSet& f);

// Seeded generator of map samples for a fixed group family.
struct RandomSoficModel {
    enum class Family { FreeUniform, Cyclic };
    Family family = Family::FreeUniform;
    int rank = 2;
    int radius = 2;

    SoficMap sample(uint32_t n, uint64_t seed) const;
};

}  // namespace soficlab
