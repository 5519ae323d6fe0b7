#pragma once

#include <string>
#include <vector>

#include "latdecor/core/index_set.hpp"

namespace latdecor {

/// Symbolic entry of a block matrix group pattern.
enum class Cell : char {
    one = '1',   // diagonal entry of an identity block
    zero = '0',
    star = '*',  // arbitrary real entry
    sl = 'S',    // entry of the SL_{k1+k2} block
};

using CellPattern = std::vector<std::vector<Cell>>;

/// Shape of G_I, S_I, U_I for an admissible I, together with sigma_I.
struct BlockPattern {
    int m = 0;
    int n = 0;
    /// perm[i] = sigma_I(i), zero-based.
    std::vector<int> perm;
    int k1 = 0;  // |I ∩ {1..m}|
    int k2 = 0;  // |I ∩ {m+1..m+n}|
    CellPattern group;     // G_I = S_I ⋉ U_I
    CellPattern levi;      // S_I
    CellPattern unipotent; // U_I
};

namespace detail {

// Pattern of G_{I0}, S_{I0} or U_{I0} in the standard position
// I0 = {m-k1+1, ..., m+k2}.
enum class Part { group, levi, unipotent };

inline CellPattern standard_pattern(int m, int n, int k1, int k2, Part part) {
    const int d = m + n;
    const int a = m - k1;       // leading identity block
    const int b = a + k1 + k2;  // end of the SL block
    auto block_of = [&](int i) { return i < a ? 0 : (i < b ? 1 : 2); };
    CellPattern p(d, std::vector<Cell>(d, Cell::zero));
    for (int i = 0; i < d; ++i) {
        for (int j = 0; j < d; ++j) {
            const int bi = block_of(i), bj = block_of(j);
            if (bi == bj) {
                if (bi == 1)
                    p[i][j] = part == Part::unipotent ? (i == j ? Cell::one : Cell::zero) : Cell::sl;
                else
                    p[i][j] = i == j ? Cell::one : Cell::zero;
            } else if (bi < bj) {
                p[i][j] = part == Part::levi ? Cell::zero : Cell::star;
            }
        }
    }
    return p;
}

inline CellPattern conjugate(const CellPattern& p, const std::vector<int>& perm) {
    const auto d = p.size();
    CellPattern out(d, std::vector<Cell>(d, Cell::zero));
    for (std::size_t i = 0; i < d; ++i)
        for (std::size_t j = 0; j < d; ++j)
            out[static_cast<std::size_t>(perm[i])][static_cast<std::size_t>(perm[j])] = p[i][j];
    return out;
}

}  // namespace detail

/// sigma_I (order preserving on each of its four blocks) and the conjugated
/// block patterns w_I G_{I0} w_I^{-1}.
inline BlockPattern group_blocks(const AdmissibleSet& set) {
    const int m = set.m(), n = set.n(), d = m + n;
    BlockPattern bp;
    bp.m = m;
    bp.n = n;
    bp.k1 = set.first_block().size();
    bp.k2 = set.second_block().size();

    // sigma maps standard positions to the indices of I; build the inverse
    // (position -> index) by listing the four blocks in order.
    const IndexSet first = IndexSet::range(d, 0, m), second = IndexSet::range(d, m, d);
    std::vector<int> order;
    for (const IndexSet& part : {first.minus(set.members()), set.first_block(), set.second_block(),
                                 second.minus(set.members())})
        for (int i : part.indices()) order.push_back(i);
    bp.perm.assign(static_cast<std::size_t>(d), 0);
    for (int pos = 0; pos < d; ++pos) bp.perm[static_cast<std::size_t>(order[static_cast<std::size_t>(pos)])] = pos;

    // Entry (i, j) of G_I equals entry (sigma(i), sigma(j)) of G_{I0}.
    std::vector<int> inverse(static_cast<std::size_t>(d));
    for (int i = 0; i < d; ++i) inverse[static_cast<std::size_t>(bp.perm[static_cast<std::size_t>(i)])] = i;
    bp.group = detail::conjugate(detail::standard_pattern(m, n, bp.k1, bp.k2, detail::Part::group), inverse);
    bp.levi = detail::conjugate(detail::standard_pattern(m, n, bp.k1, bp.k2, detail::Part::levi), inverse);
    bp.unipotent =
        detail::conjugate(detail::standard_pattern(m, n, bp.k1, bp.k2, detail::Part::unipotent), inverse);
    return bp;
}

inline std::string to_string(const CellPattern& p) {
    std::string s;
    for (const auto& row : p) {
        for (Cell c : row) s += static_cast<char>(c);
        s += '\n';
    }
    return s;
}

}  // namespace latdecor
