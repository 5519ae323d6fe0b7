#pragma once

#include <bit>
#include <cstdint>
#include <initializer_list>
#include <string>
#include <vector>

#include "latdecor/error.hpp"

namespace latdecor {

/// Largest supported ambient dimension m + n.
inline constexpr int kMaxDim = 16;

/// Subset of {0, ..., dim-1} stored as a bit mask. Indices are zero-based
/// internally; text I/O uses one-based labels.
class IndexSet {
public:
    IndexSet() = default;
    IndexSet(int dim, std::uint32_t mask) : dim_(dim), mask_(mask) {
        detail::require(dim >= 0 && dim <= kMaxDim, "IndexSet: dimension out of range");
        detail::require(dim == 32 || (mask >> dim) == 0, "IndexSet: index outside dimension");
    }

    static IndexSet empty(int dim) { return {dim, 0u}; }
    static IndexSet full(int dim) { return {dim, dim == 0 ? 0u : (~0u >> (32 - dim))}; }
    static IndexSet range(int dim, int first, int last) {  // [first, last)
        std::uint32_t mask = 0;
        for (int i = first; i < last; ++i) mask |= 1u << i;
        return {dim, mask};
    }
    static IndexSet from_indices(int dim, const std::vector<int>& zero_based) {
        std::uint32_t mask = 0;
        for (int i : zero_based) {
            detail::require(i >= 0 && i < dim, "IndexSet: index out of range");
            mask |= 1u << i;
        }
        return {dim, mask};
    }
    static IndexSet from_one_based(int dim, std::initializer_list<int> labels) {
        return from_one_based(dim, std::vector<int>(labels));
    }
    static IndexSet from_one_based(int dim, const std::vector<int>& labels) {
        std::vector<int> idx;
        idx.reserve(labels.size());
        for (int l : labels) idx.push_back(l - 1);
        return from_indices(dim, idx);
    }

    int dim() const { return dim_; }
    std::uint32_t mask() const { return mask_; }
    bool contains(int i) const { return i >= 0 && i < dim_ && ((mask_ >> i) & 1u); }
    int size() const { return std::popcount(mask_); }
    bool is_empty() const { return mask_ == 0; }

    IndexSet complement() const { return {dim_, full(dim_).mask_ & ~mask_}; }
    IndexSet operator&(const IndexSet& o) const { return {dim_, mask_ & o.mask_}; }
    IndexSet operator|(const IndexSet& o) const { return {dim_, mask_ | o.mask_}; }
    IndexSet minus(const IndexSet& o) const { return {dim_, mask_ & ~o.mask_}; }
    bool subset_of(const IndexSet& o) const { return (mask_ & ~o.mask_) == 0; }

    std::vector<int> indices() const {
        std::vector<int> out;
        for (int i = 0; i < dim_; ++i)
            if (contains(i)) out.push_back(i);
        return out;
    }

    /// One-based rendering, e.g. "{1,3}".
    std::string to_string() const {
        std::string s = "{";
        bool first = true;
        for (int i : indices()) {
            if (!first) s += ',';
            s += std::to_string(i + 1);
            first = false;
        }
        return s + "}";
    }

    friend bool operator==(const IndexSet&, const IndexSet&) = default;

    /// Lexicographic order on sorted member lists.
    friend bool lex_less(const IndexSet& a, const IndexSet& b) { return a.indices() < b.indices(); }

private:
    int dim_ = 0;
    std::uint32_t mask_ = 0;
};

/// Index set meeting both the first m and the last n coordinates.
class AdmissibleSet {
public:
    AdmissibleSet(int m, int n, IndexSet members) : m_(m), n_(n), members_(members) {
        detail::require(m >= 1 && n >= 1 && m + n <= kMaxDim, "AdmissibleSet: bad dimensions");
        detail::require(members.dim() == m + n, "AdmissibleSet: dimension mismatch");
        if (first_block().is_empty() || second_block().is_empty())
            throw InvariantError("AdmissibleSet: " + members.to_string() +
                                 " does not meet both coordinate blocks");
    }

    static AdmissibleSet from_one_based(int m, int n, const std::vector<int>& labels) {
        return {m, n, IndexSet::from_one_based(m + n, labels)};
    }
    static AdmissibleSet full(int m, int n) { return {m, n, IndexSet::full(m + n)}; }

    static bool is_admissible(int m, int n, const IndexSet& s) {
        return (s & IndexSet::range(m + n, 0, m)).size() > 0 &&
               (s & IndexSet::range(m + n, m, m + n)).size() > 0;
    }

    /// Every admissible subset of {1..m+n}, ordered by mask value.
    static std::vector<AdmissibleSet> enumerate(int m, int n) {
        std::vector<AdmissibleSet> out;
        const int d = m + n;
        for (std::uint32_t mask = 1; mask < (1u << d); ++mask) {
            IndexSet s(d, mask);
            if (is_admissible(m, n, s)) out.emplace_back(m, n, s);
        }
        return out;
    }

    int m() const { return m_; }
    int n() const { return n_; }
    const IndexSet& members() const { return members_; }
    /// I' = I ∩ {1..m}
    IndexSet first_block() const { return members_ & IndexSet::range(m_ + n_, 0, m_); }
    /// I'' = I ∩ {m+1..m+n}
    IndexSet second_block() const { return members_ & IndexSet::range(m_ + n_, m_, m_ + n_); }
    std::string to_string() const { return members_.to_string(); }

    friend bool operator==(const AdmissibleSet&, const AdmissibleSet&) = default;

private:
    int m_;
    int n_;
    IndexSet members_;
};

}  // namespace latdecor
