#include "freedil/partitions.hpp"

#include <algorithm>
#include <map>
#include <mutex>
#include <sstream>

namespace freedil {

std::string NCPartition::to_string() const
{
    std::ostringstream os;
    for (const auto& b : blocks) {
        os << '{';
        for (std::size_t i = 0; i < b.size(); ++i)
            os << (i ? "," : "") << b[i];
        os << '}';
    }
    return os.str();
}

bool has_crossing(const std::vector<std::vector<int>>& blocks)
{
    for (std::size_t p = 0; p < blocks.size(); ++p)
        for (std::size_t q = 0; q < blocks.size(); ++q) {
            if (p == q)
                continue;
            for (int a : blocks[p])
                for (int c : blocks[p])
                    if (a < c)
                        for (int b : blocks[q])
                            if (a < b && b < c)
                                for (int d : blocks[q])
                                    if (c < d)
                                        return true;
        }
    return false;
}

namespace {

using Blocks = std::vector<std::vector<int>>;

// NC partitions of {0..len-1}; entries are never erased, so references stay valid.
const std::vector<Blocks>& nc_cached(int len);

void append_products(const std::vector<std::pair<int, int>>& gaps, std::size_t g, Blocks& acc,
                     std::vector<Blocks>& out)
{
    if (g == gaps.size()) {
        out.push_back(acc);
        return;
    }
    const auto [start, len] = gaps[g];
    for (const Blocks& inner : nc_cached(len)) {
        const std::size_t mark = acc.size();
        for (const auto& b : inner) {
            std::vector<int> shifted;
            shifted.reserve(b.size());
            for (int x : b)
                shifted.push_back(x + start);
            acc.push_back(std::move(shifted));
        }
        append_products(gaps, g + 1, acc, out);
        acc.resize(mark);
    }
}

// Chooses the elements of the block containing 0; the gaps between chosen
// elements are partitioned independently.
void choose_first_block(int n, std::vector<int>& block, std::vector<std::pair<int, int>>& gaps,
                        std::vector<Blocks>& out)
{
    const int last = block.back();
    // close the block here
    gaps.emplace_back(last + 1, n - 1 - last);
    Blocks acc{block};
    append_products(gaps, 0, acc, out);
    gaps.pop_back();

    for (int next = last + 1; next < n; ++next) {
        gaps.emplace_back(last + 1, next - last - 1);
        block.push_back(next);
        choose_first_block(n, block, gaps, out);
        block.pop_back();
        gaps.pop_back();
    }
}

std::recursive_mutex cache_mutex;

const std::vector<Blocks>& nc_cached(int len)
{
    static std::map<int, std::vector<Blocks>> cache;
    const std::lock_guard lock(cache_mutex);
    if (auto it = cache.find(len); it != cache.end())
        return it->second;
    std::vector<Blocks> out;
    if (len == 0) {
        out.emplace_back();
    } else {
        std::vector<int> block{0};
        std::vector<std::pair<int, int>> gaps;
        choose_first_block(len, block, gaps, out);
    }
    return cache.emplace(len, std::move(out)).first->second;
}

// Block-size profiles of NC(n) with multiplicities.
const std::map<std::vector<int>, long long>& size_profiles(int n)
{
    static std::map<int, std::map<std::vector<int>, long long>> cache;
    const std::lock_guard lock(cache_mutex);
    if (auto it = cache.find(n); it != cache.end())
        return it->second;
    std::map<std::vector<int>, long long> profiles;
    for (const auto& p : nc_cached(n)) {
        std::vector<int> sizes;
        for (const auto& b : p)
            sizes.push_back(static_cast<int>(b.size()));
        std::sort(sizes.begin(), sizes.end());
        ++profiles[sizes];
    }
    return cache.emplace(n, std::move(profiles)).first->second;
}

void require_size(std::size_t k, const char* what)
{
    if (k > static_cast<std::size_t>(kMaxPartitionSize))
        throw BudgetError(std::string(what) + ": at most " + std::to_string(kMaxPartitionSize) + " terms, got " +
                          std::to_string(k));
}

} // namespace

std::vector<NCPartition> noncrossing_partitions(int k)
{
    if (k < 1 || k > kMaxPartitionSize)
        throw BudgetError("noncrossing_partitions: k must lie in 1.." + std::to_string(kMaxPartitionSize) +
                          ", got " + std::to_string(k));
    std::vector<NCPartition> out;
    for (const auto& blocks : nc_cached(k)) {
        NCPartition p{k, {}};
        for (const auto& b : blocks) {
            std::vector<int> one_based;
            for (int x : b)
                one_based.push_back(x + 1);
            p.blocks.push_back(std::move(one_based));
        }
        std::sort(p.blocks.begin(), p.blocks.end());
        out.push_back(std::move(p));
    }
    return out;
}

std::vector<Complex> free_cumulants(std::span<const Complex> moments)
{
    require_size(moments.size(), "free_cumulants");
    std::vector<Complex> kappa;
    for (std::size_t n = 1; n <= moments.size(); ++n) {
        Complex rest = 0.0;
        for (const auto& [sizes, count] : size_profiles(static_cast<int>(n))) {
            if (sizes.size() == 1)
                continue; // the one-block partition carries kappa_n itself
            Complex term = static_cast<double>(count);
            for (int s : sizes)
                term *= kappa[static_cast<std::size_t>(s - 1)];
            rest += term;
        }
        kappa.push_back(moments[n - 1] - rest);
    }
    return kappa;
}

std::vector<Complex> moments_from_cumulants(std::span<const Complex> cumulants)
{
    require_size(cumulants.size(), "moments_from_cumulants");
    std::vector<Complex> m;
    for (std::size_t n = 1; n <= cumulants.size(); ++n) {
        Complex total = 0.0;
        for (const auto& [sizes, count] : size_profiles(static_cast<int>(n))) {
            Complex term = static_cast<double>(count);
            for (int s : sizes)
                term *= cumulants[static_cast<std::size_t>(s - 1)];
            total += term;
        }
        m.push_back(total);
    }
    return m;
}

} // namespace freedil
