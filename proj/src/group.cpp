#include "soficlab/group.hpp"

#include <algorithm>
#include <cstdlib>
#include <deque>
#include <set>
#include <sstream>

#include "soficlab/errors.hpp"

namespace soficlab {

GroupOracle GroupOracle::integers() {
    GroupOracle o;
    o.kind_ = GroupKind::Integers;
    o.d_ = 1;
    o.gens_ = {GroupElement{{1}}};
    return o;
}

GroupOracle GroupOracle::abelian(int d) {
    if (d < 1) throw ConfigError("abelian rank must be >= 1");
    GroupOracle o;
    o.kind_ = GroupKind::Abelian;
    o.d_ = d;
    for (int i = 0; i < d; ++i) {
        GroupElement e;
        e.word.assign(d, 0);
        e.word[i] = 1;
        o.gens_.push_back(e);
    }
    return o;
}

GroupOracle GroupOracle::free_group(int rank) {
    if (rank < 1) throw ConfigError("free rank must be >= 1");
    GroupOracle o;
    o.kind_ = GroupKind::Free;
    o.d_ = rank;
    for (int i = 1; i <= rank; ++i) o.gens_.push_back(GroupElement{{i}});
    return o;
}

GroupOracle GroupOracle::finite(std::vector<std::vector<int>> table, int identity_index) {
    const int k = static_cast<int>(table.size());
    if (k == 0) throw ConfigError("finite group table is empty");
    for (const auto& row : table)
        if (static_cast<int>(row.size()) != k) throw ConfigError("finite group table is not square");
    GroupOracle o;
    o.kind_ = GroupKind::Finite;
    o.d_ = 1;
    o.table_ = std::move(table);
    o.identity_index_ = identity_index;
    o.build_inverse_table();
    for (int i = 0; i < k; ++i)
        if (i != identity_index) o.gens_.push_back(GroupElement{{i}});
    return o;
}

GroupOracle GroupOracle::cyclic_table(int k) {
    std::vector<std::vector<int>> t(k, std::vector<int>(k));
    for (int i = 0; i < k; ++i)
        for (int j = 0; j < k; ++j) t[i][j] = (i + j) % k;
    GroupOracle o = finite(std::move(t), 0);
    o.set_generators({GroupElement{{1 % k}}});
    return o;
}

void GroupOracle::build_inverse_table() {
    const int k = static_cast<int>(table_.size());
    inv_table_.assign(k, -1);
    for (int i = 0; i < k; ++i) {
        for (int j = 0; j < k; ++j) {
            if (table_[i][j] == identity_index_ && table_[j][i] == identity_index_) {
                inv_table_[i] = j;
                break;
            }
        }
        if (inv_table_[i] < 0) throw ConfigError("finite group table has no inverse for some element");
    }
}

GroupElement GroupOracle::identity() const {
    switch (kind_) {
        case GroupKind::Integers:
        case GroupKind::Abelian: {
            GroupElement e;
            e.word.assign(d_, 0);
            return e;
        }
        case GroupKind::Free:
            return GroupElement{};
        case GroupKind::Finite:
            return GroupElement{{identity_index_}};
    }
    return GroupElement{};
}

GroupElement GroupOracle::mul(const GroupElement& a, const GroupElement& b) const {
    switch (kind_) {
        case GroupKind::Integers:
        case GroupKind::Abelian: {
            GroupElement r;
            r.word.resize(d_);
            for (int i = 0; i < d_; ++i) r.word[i] = a.word[i] + b.word[i];
            return r;
        }
        case GroupKind::Free: {
            GroupElement r = a;
            for (int64_t letter : b.word) {
                if (!r.word.empty() && r.word.back() == -letter)
                    r.word.pop_back();
                else
                    r.word.push_back(letter);
            }
            return r;
        }
        case GroupKind::Finite:
            return GroupElement{{table_[a.word[0]][b.word[0]]}};
    }
    return GroupElement{};
}

GroupElement GroupOracle::inv(const GroupElement& a) const {
    switch (kind_) {
        case GroupKind::Integers:
        case GroupKind::Abelian: {
            GroupElement r;
            r.word.resize(d_);
            for (int i = 0; i < d_; ++i) r.word[i] = -a.word[i];
            return r;
        }
        case GroupKind::Free: {
            GroupElement r;
            r.word.reserve(a.word.size());
            for (auto it = a.word.rbegin(); it != a.word.rend(); ++it) r.word.push_back(-*it);
            return r;
        }
        case GroupKind::Finite:
            return GroupElement{{inv_table_[a.word[0]]}};
    }
    return GroupElement{};
}

bool GroupOracle::is_identity(const GroupElement& a) const { return a == identity(); }

std::vector<int> GroupOracle::factor(const GroupElement& a) const {
    std::vector<int> letters;
    switch (kind_) {
        case GroupKind::Integers:
        case GroupKind::Abelian: {
            for (int i = 0; i < d_; ++i) {
                const int64_t c = a.word[i];
                for (int64_t k = 0; k < std::llabs(c); ++k) letters.push_back(c > 0 ? i + 1 : -(i + 1));
            }
            return letters;
        }
        case GroupKind::Free: {
            for (int64_t l : a.word) letters.push_back(static_cast<int>(l));
            return letters;
        }
        case GroupKind::Finite: {
            // BFS from the identity over right-multiplication by generators.
            const int k = static_cast<int>(table_.size());
            std::vector<std::pair<int, int>> from(k, {-1, 0});  // (predecessor, letter)
            std::vector<bool> seen(k, false);
            std::deque<int> q;
            q.push_back(identity_index_);
            seen[identity_index_] = true;
            while (!q.empty()) {
                int cur = q.front();
                q.pop_front();
                for (size_t gi = 0; gi < gens_.size(); ++gi) {
                    const int g = static_cast<int>(gens_[gi].word[0]);
                    for (int sign : {+1, -1}) {
                        const int step = sign > 0 ? g : inv_table_[g];
                        const int nxt = table_[cur][step];
                        if (!seen[nxt]) {
                            seen[nxt] = true;
                            from[nxt] = {cur, sign * static_cast<int>(gi + 1)};
                            q.push_back(nxt);
                        }
                    }
                }
            }
            const int target = static_cast<int>(a.word[0]);
            if (!seen[target]) throw ConfigError("element not generated by the configured generators");
            std::vector<int> rev;
            for (int cur = target; cur != identity_index_; cur = from[cur].first) rev.push_back(from[cur].second);
            letters.assign(rev.rbegin(), rev.rend());
            return letters;
        }
    }
    return letters;
}

std::string GroupOracle::to_string(const GroupElement& a) const {
    switch (kind_) {
        case GroupKind::Integers:
            return std::to_string(a.word[0]);
        case GroupKind::Abelian: {
            std::ostringstream os;
            os << "(";
            for (int i = 0; i < d_; ++i) os << (i ? "," : "") << a.word[i];
            os << ")";
            return os.str();
        }
        case GroupKind::Free: {
            if (a.word.empty()) return "1";
            std::string s;
            for (int64_t l : a.word) {
                const char base = static_cast<char>('a' + static_cast<int>(std::llabs(l)) - 1);
                s.push_back(l > 0 ? base : static_cast<char>(base - 'a' + 'A'));
            }
            return s;
        }
        case GroupKind::Finite:
            return "#" + std::to_string(a.word[0]);
    }
    return "";
}

GroupElement GroupOracle::parse_element(const std::string& s) const {
    switch (kind_) {
        case GroupKind::Integers:
            return GroupElement{{std::stoll(s)}};
        case GroupKind::Abelian: {
            GroupElement e;
            std::string body = s;
            if (!body.empty() && body.front() == '(') body = body.substr(1, body.size() - 2);
            std::stringstream ss(body);
            std::string tok;
            while (std::getline(ss, tok, ',')) e.word.push_back(std::stoll(tok));
            if (static_cast<int>(e.word.size()) != d_) throw ConfigError("bad element dimension: " + s);
            return e;
        }
        case GroupKind::Free: {
            GroupElement e;
            if (s == "1") return e;
            GroupElement r;
            for (char c : s) {
                int64_t l;
                if (c >= 'a' && c <= 'z')
                    l = c - 'a' + 1;
                else if (c >= 'A' && c <= 'Z')
                    l = -(c - 'A' + 1);
                else
                    throw ConfigError("bad free-group letter in: " + s);
                r = mul(r, GroupElement{{l}});
            }
            return r;
        }
        case GroupKind::Finite: {
            std::string body = s;
            if (!body.empty() && body.front() == '#') body = body.substr(1);
            return GroupElement{{std::stoll(body)}};
        }
    }
    return GroupElement{};
}

GroupOracle GroupOracle::from_spec(const std::string& spec) {
    if (spec == "Z" || spec == "z") return integers();
    if (spec.rfind("Z^", 0) == 0) return abelian(std::stoi(spec.substr(2)));
    if (spec.rfind("free:", 0) == 0) return free_group(std::stoi(spec.substr(5)));
    if (spec.rfind("cyclic:", 0) == 0) return cyclic_table(std::stoi(spec.substr(7)));
    throw ConfigError("unknown group spec: " + spec);
}

ElementSet::ElementSet(std::vector<GroupElement> elems) : elems_(std::move(elems)) {
    std::sort(elems_.begin(), elems_.end());
    elems_.erase(std::unique(elems_.begin(), elems_.end()), elems_.end());
}

bool ElementSet::contains(const GroupElement& g) const {
    return std::binary_search(elems_.begin(), elems_.end(), g);
}

long ElementSet::index_of(const GroupElement& g) const {
    auto it = std::lower_bound(elems_.begin(), elems_.end(), g);
    if (it == elems_.end() || !(*it == g)) return -1;
    return static_cast<long>(it - elems_.begin());
}

bool ElementSet::contains_all(const ElementSet& other) const {
    for (const auto& g : other)
        if (!contains(g)) return false;
    return true;
}

void ElementSet::insert(const GroupElement& g) {
    auto it = std::lower_bound(elems_.begin(), elems_.end(), g);
    if (it != elems_.end() && *it == g) return;
    elems_.insert(it, g);
}

ElementSet ball(const GroupOracle& oracle, int radius) {
    std::set<GroupElement> seen;
    std::deque<GroupElement> frontier;
    seen.insert(oracle.identity());
    frontier.push_back(oracle.identity());
    std::vector<GroupElement> steps;
    for (const auto& g : oracle.generators()) {
        steps.push_back(g);
        steps.push_back(oracle.inv(g));
    }
    for (int r = 0; r < radius; ++r) {
        std::deque<GroupElement> next;
        for (const auto& cur : frontier) {
            for (const auto& s : steps) {
                GroupElement p = oracle.mul(cur, s);
                if (seen.insert(p).second) next.push_back(p);
            }
        }
        frontier.swap(next);
        if (frontier.empty()) break;  // finite group exhausted
    }
    return ElementSet(std::vector<GroupElement>(seen.begin(), seen.end()));
}

ElementSet product_set(const ElementSet& a, const ElementSet& b, const GroupOracle& oracle) {
    std::set<GroupElement> out;
    for (const auto& x : a)
        for (const auto& y : b) out.insert(oracle.mul(x, y));
    return ElementSet(std::vector<GroupElement>(out.begin(), out.end()));
}

ElementSet symmetrize(const ElementSet& f, const GroupOracle& oracle) {
    std::vector<GroupElement> out(f.begin(), f.end());
    for (const auto& g : f) out.push_back(oracle.inv(g));
    out.push_back(oracle.identity());
    return ElementSet(std::move(out));
}

ElementSet inverse_set(const ElementSet& f, const GroupOracle& oracle) {
    std::vector<GroupElement> out;
    out.reserve(f.size());
    for (const auto& g : f) out.push_back(oracle.inv(g));
    return ElementSet(std::move(out));
}

ElementSet power_set(const ElementSet& f, int k, const GroupOracle& oracle) {
    ElementSet acc = f;
    for (int i = 1; i < k; ++i) acc = product_set(acc, f, oracle);
    return acc;
}

ElementSet z_interval(int64_t r) {
    std::vector<GroupElement> v;
    for (int64_t g = -r; g <= r; ++g) v.push_back(GroupElement{{g}});
    return ElementSet(std::move(v));
}

}  // namespace soficlab
