#pragma once

#include <string>

namespace walshprod {

/// Exact counts (tuple counts, partition weights, matrix counts).
using Count = unsigned __int128;

std::string to_string(Count value);
inline double to_double(Count value) { return static_cast<double>(value); }

/// n (n-1) ... (n-q+1); 1 for q = 0 and 0 for q > n. Throws std::overflow_error
/// if the product does not fit in 128 bits.
Count falling_factorial(long long n, int q);

/// C(n, k), 0 outside 0 <= k <= n.
Count binomial(int n, int k);

}  // namespace walshprod
