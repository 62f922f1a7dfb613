#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace soficlab {

// Canonical form of a group element, interpreted by the owning oracle:
//   integers / Z^d : coordinate vector (length d)
//   free(d)        : reduced word over letters +i / -i, i in 1..d
//   finite(table)  : single element index
struct GroupElement {
    std::vector<int64_t> word;

    bool operator==(const GroupElement& o) const { return word == o.word; }
    bool operator!=(const GroupElement& o) const { return word != o.word; }
    bool operator<(const GroupElement& o) const {
        if (word.size() != o.word.size()) return word.size() < o.word.size();
        return word < o.word;
    }
};

enum class GroupKind { Integers, Abelian, Free, Finite };

// Multiplication oracle over canonical elements for the four supported
// families. All operations are pure; oracles are freely shareable.
class GroupOracle {
public:
    static GroupOracle integers();
    static GroupOracle abelian(int d);
    static GroupOracle free_group(int rank);
    // Multiplication table: table[i][j] = index of product, identity_index given.
    static GroupOracle finite(std::vector<std::vector<int>> table, int identity_index);
    // Regular representation helper: cyclic group of order k.
    static GroupOracle cyclic_table(int k);

    GroupKind kind() const { return kind_; }
    int dimension() const { return d_; }
    int order() const { return static_cast<int>(table_.size()); }  // finite only

    GroupElement identity() const;
    GroupElement mul(const GroupElement& a, const GroupElement& b) const;
    GroupElement inv(const GroupElement& a) const;
    bool is_identity(const GroupElement& a) const;

    // Canonical generators (e_i for Z^d, letters for free, table generators for
    // finite groups: the full element list minus identity unless set explicitly).
    const std::vector<GroupElement>& generators() const { return gens_; }
    void set_generators(std::vector<GroupElement> gens) { gens_ = std::move(gens); }

    // Expresses an element as a generator letter sequence (signed indices into
    // generators(), 1-based). Used to extend generator images to homomorphisms.
    std::vector<int> factor(const GroupElement& a) const;

    std::string to_string(const GroupElement& a) const;
    GroupElement parse_element(const std::string& s) const;

    static GroupOracle from_spec(const std::string& spec);

private:
    GroupKind kind_ = GroupKind::Integers;
    int d_ = 1;
    std::vector<std::vector<int>> table_;
    std::vector<int> inv_table_;
    int identity_index_ = 0;
    std::vector<GroupElement> gens_;

    void build_inverse_table();
};

// Finite window of group elements. Kept sorted and deduplicated so equality
// of windows is equality of canonical forms and iteration is deterministic.
class ElementSet {
public:
    ElementSet() = default;
    explicit ElementSet(std::vector<GroupElement> elems);

    size_t size() const { return elems_.size(); }
    bool empty() const { return elems_.empty(); }
    const GroupElement& operator[](size_t i) const { return elems_[i]; }
    const std::vector<GroupElement>& elements() const { return elems_; }

    bool contains(const GroupElement& g) const;
    // Index in sorted order, or -1.
    long index_of(const GroupElement& g) const;
    bool contains_all(const ElementSet& other) const;

    void insert(const GroupElement& g);

    bool operator==(const ElementSet& o) const { return elems_ == o.elems_; }

    auto begin() const { return elems_.begin(); }
    auto end() const { return elems_.end(); }

private:
    std::vector<GroupElement> elems_;
};

// All products of at most `radius` generators and inverse generators,
// including the identity. Closed under inversion for the supported families.
ElementSet ball(const GroupOracle& oracle, int radius);

// {a*b : a in A, b in B}, deduplicated by canonical form.
ElementSet product_set(const ElementSet& a, const ElementSet& b, const GroupOracle& oracle);

// F u F^{-1} u {1}.
ElementSet symmetrize(const ElementSet& f, const GroupOracle& oracle);

ElementSet inverse_set(const ElementSet& f, const GroupOracle& oracle);

// Repeated product F^k (k >= 1).
ElementSet power_set(const ElementSet& f, int k, const GroupOracle& oracle);

// Interval {-r..r} in Z as an ElementSet (convenience for the Z scenarios).
ElementSet z_interval(int64_t r);

}  // namespace soficlab
