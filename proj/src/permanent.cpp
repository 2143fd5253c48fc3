#include "twc/permanent.hpp"

#include <bit>
#include <cstdint>
#include <vector>

namespace twc {

bool is_prime(long long p)
{
    if (p < 2)
        return false;
    for (long long d = 2; d * d <= p; ++d)
        if (p % d == 0)
            return false;
    return true;
}

namespace detail {

namespace {

struct SparseColumn {
    std::vector<std::pair<int, int>> entries; // (row, value)
};

std::vector<SparseColumn> sparse_columns(const IntMatrix& a)
{
    std::vector<SparseColumn> cols(static_cast<size_t>(a.cols()));
    for (Eigen::Index j = 0; j < a.cols(); ++j)
        for (Eigen::Index i = 0; i < a.rows(); ++i)
            if (a(i, j) != 0)
                cols[static_cast<size_t>(j)].entries.emplace_back(static_cast<int>(i),
                                                                  a(i, j));
    return cols;
}

void check_square(const IntMatrix& a)
{
    if (a.rows() != a.cols())
        throw InputError("permanent requires a square matrix");
    if (a.rows() > kPermanentMaxDim)
        throw ScaleError("matrix dimension " + std::to_string(a.rows()) +
                         " exceeds permanent kernel limit");
}

void add_i128(BigInt& acc, __int128 v)
{
    bool neg = v < 0;
    unsigned __int128 u = neg ? static_cast<unsigned __int128>(-(v + 1)) + 1
                              : static_cast<unsigned __int128>(v);
    BigInt b = static_cast<std::uint64_t>(u >> 64);
    b <<= 64;
    b += static_cast<std::uint64_t>(u);
    if (neg)
        acc -= b;
    else
        acc += b;
}

} // namespace

// Ryser: per(A) = (-1)^n sum_{S != empty} (-1)^{|S|} prod_i sum_{j in S} a_ij.
// Gray-code walk toggles one column per step; subsets with a zero row sum are
// skipped without touching the product.
BigInt permanent_exact_impl(const IntMatrix& a)
{
    check_square(a);
    const int n = static_cast<int>(a.rows());
    if (n == 0)
        return 1;

    auto cols = sparse_columns(a);
    std::vector<long long> rowsum(static_cast<size_t>(n), 0);
    int zero_rows = n;
    BigInt total = 0;

    constexpr __int128 kGuard = (__int128{1}) << 120;
    std::uint64_t gray = 0;
    const std::uint64_t subsets = std::uint64_t{1} << n;
    for (std::uint64_t s = 1; s < subsets; ++s) {
        int j = std::countr_zero(s);
        std::uint64_t bit = std::uint64_t{1} << j;
        gray ^= bit;
        bool added = (gray & bit) != 0;
        for (auto [row, val] : cols[static_cast<size_t>(j)].entries) {
            long long& r = rowsum[static_cast<size_t>(row)];
            long long next = added ? r + val : r - val;
            if (r == 0)
                --zero_rows;
            if (next == 0)
                ++zero_rows;
            r = next;
        }
        if (zero_rows > 0)
            continue;

        __int128 prod = 1;
        bool overflow = false;
        for (int i = 0; i < n; ++i) {
            if (prod > kGuard || prod < -kGuard) {
                overflow = true;
                break;
            }
            prod *= rowsum[static_cast<size_t>(i)];
        }
        int sign = ((n - std::popcount(gray)) % 2 == 0) ? 1 : -1;
        if (!overflow) {
            add_i128(total, sign > 0 ? prod : -prod);
        } else {
            BigInt big = 1;
            for (int i = 0; i < n; ++i)
                big *= rowsum[static_cast<size_t>(i)];
            total += sign > 0 ? big : -big;
        }
    }
    return total;
}

long long permanent_mod_impl(const IntMatrix& a, long long p)
{
    if (!is_prime(p))
        throw InputError("modulus " + std::to_string(p) + " is not prime");
    if (p > (1 << 15))
        throw ScaleError("modulus too large for the modular kernel");
    check_square(a);
    const int n = static_cast<int>(a.rows());
    if (n == 0)
        return 1 % p;

    // inverses of 1..p-1 for the incremental nonzero-row product
    std::vector<long long> inv(static_cast<size_t>(p), 0);
    if (p > 2)
        inv[1] = 1;
    else if (p == 2)
        inv[1] = 1;
    for (long long x = 2; x < p; ++x)
        inv[static_cast<size_t>(x)] = (p - (p / x) * inv[static_cast<size_t>(p % x)] % p) % p;

    auto cols = sparse_columns(a);
    std::vector<long long> rowsum(static_cast<size_t>(n), 0);
    int zero_rows = n;
    long long prod = 1; // product over rows with nonzero residue
    long long total = 0;

    std::uint64_t gray = 0;
    const std::uint64_t subsets = std::uint64_t{1} << n;
    for (std::uint64_t s = 1; s < subsets; ++s) {
        int j = std::countr_zero(s);
        std::uint64_t bit = std::uint64_t{1} << j;
        gray ^= bit;
        bool added = (gray & bit) != 0;
        for (auto [row, val] : cols[static_cast<size_t>(j)].entries) {
            long long& r = rowsum[static_cast<size_t>(row)];
            long long delta = ((val % p) + p) % p;
            long long next = added ? (r + delta) % p : (r + p - delta) % p;
            if (r != 0)
                prod = prod * inv[static_cast<size_t>(r)] % p;
            else
                --zero_rows;
            if (next != 0)
                prod = prod * next % p;
            else
                ++zero_rows;
            r = next;
        }
        if (zero_rows > 0)
            continue;
        long long term = ((n - std::popcount(gray)) % 2 == 0) ? prod : (p - prod) % p;
        total = (total + term) % p;
    }
    return total;
}

} // namespace detail

} // namespace twc
