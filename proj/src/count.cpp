#include "walshprod/count.hpp"

#include <algorithm>
#include <limits>
#include <stdexcept>

namespace walshprod {

std::string to_string(Count value) {
  if (value == 0) return "0";
  std::string digits;
  while (value > 0) {
    digits.push_back(static_cast<char>('0' + static_cast<int>(value % 10)));
    value /= 10;
  }
  std::reverse(digits.begin(), digits.end());
  return digits;
}

Count falling_factorial(long long n, int q) {
  if (q < 0) throw std::invalid_argument("falling_factorial: q must be nonnegative");
  if (n < 0) throw std::invalid_argument("falling_factorial: n must be nonnegative");
  if (q > n) return 0;
  Count result = 1;
  for (int i = 0; i < q; ++i) {
    const auto factor = static_cast<Count>(n - i);
    if (factor != 0 && result > std::numeric_limits<Count>::max() / factor) {
      throw std::overflow_error("falling_factorial overflows 128 bits");
    }
    result *= factor;
  }
  return result;
}

Count binomial(int n, int k) {
  if (k < 0 || n < 0 || k > n) return 0;
  k = std::min(k, n - k);
  Count result = 1;
  for (int i = 1; i <= k; ++i) {
    result = result * static_cast<Count>(n - k + i) / static_cast<Count>(i);
  }
  return result;
}

}  // namespace walshprod
