#pragma once

#include <Eigen/Core>
#include <boost/multiprecision/cpp_int.hpp>

#include "twc/errors.hpp"

namespace twc {

using BigInt = boost::multiprecision::cpp_int;

using IntMatrix = Eigen::Matrix<int, Eigen::Dynamic, Eigen::Dynamic>;
using IntVector = Eigen::Matrix<int, Eigen::Dynamic, 1>;

/// Largest dimension the subset-sum kernels accept.
inline constexpr int kPermanentMaxDim = 30;

bool is_prime(long long p);

namespace detail {
BigInt permanent_exact_impl(const IntMatrix& a);
long long permanent_mod_impl(const IntMatrix& a, long long p);
} // namespace detail

/// Exact permanent by Ryser's inclusion-exclusion over column subsets with
/// Gray-code updates. Arbitrary-precision accumulation throughout.
template <typename Derived> BigInt permanent_exact(const Eigen::MatrixBase<Derived>& m)
{
    return detail::permanent_exact_impl(m.template cast<int>().eval());
}

/// Permanent reduced mod a prime p; same subset walk, O(1) work per subset
/// through incremental row-product maintenance in the field.
template <typename Derived>
long long permanent_mod(const Eigen::MatrixBase<Derived>& m, long long p)
{
    return detail::permanent_mod_impl(m.template cast<int>().eval(), p);
}

} // namespace twc
