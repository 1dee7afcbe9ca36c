#pragma once

#include <span>
#include <string>
#include <vector>

#include "freedil/operator_core.hpp"

namespace freedil {

// A set partition of {1..size}; blocks are sorted internally and ordered by
// their smallest element.
struct NCPartition {
    int size = 0;
    std::vector<std::vector<int>> blocks;

    std::string to_string() const;
    bool operator==(const NCPartition&) const = default;
};

// True when some a < b < c < d has a, c in one block and b, d in another.
bool has_crossing(const std::vector<std::vector<int>>& blocks);

inline constexpr int kMaxPartitionSize = 12;

// All non-crossing partitions of {1..k}, 1 <= k <= 12. Throws BudgetError otherwise.
std::vector<NCPartition> noncrossing_partitions(int k);

// kappa_1..kappa_k from m_1..m_k via m_n = sum_{pi in NC(n)} prod_{B in pi} kappa_|B|.
std::vector<Complex> free_cumulants(std::span<const Complex> moments);

// The inverse map.
std::vector<Complex> moments_from_cumulants(std::span<const Complex> cumulants);

} // namespace freedil
