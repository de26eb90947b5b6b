#pragma once

#include <cstdint>
#include <vector>

#include "ccopt/errors.hpp"

namespace ccopt {

// Checked multiply; throws instead of wrapping.
inline std::uint64_t checked_mul(std::uint64_t a, std::uint64_t b) {
    if (a != 0 && b > UINT64_MAX / a)
        throw ConfigError("combinatorial count overflows 64 bits");
    return a * b;
}

inline std::uint64_t checked_pow(std::uint64_t base, unsigned exp) {
    std::uint64_t r = 1;
    for (unsigned i = 0; i < exp; ++i) r = checked_mul(r, base);
    return r;
}

// C(n, k) with overflow detection. C(n, k) = 0 for k > n.
inline std::uint64_t binomial(int n, int k) {
    if (n < 0 || k < 0) throw ConfigError("binomial: negative argument");
    if (k > n) return 0;
    if (k > n - k) k = n - k;
    std::uint64_t r = 1;
    for (int i = 1; i <= k; ++i) {
        // r * (n-k+i) is divisible by i at every step.
        r = checked_mul(r, static_cast<std::uint64_t>(n - k + i)) / i;
    }
    return r;
}

// All k-subsets of {0,...,n-1} in lexicographic order.
inline std::vector<std::vector<int>> subsets_lex(int n, int k) {
    if (k < 0 || k > n) throw ConfigError("subsets_lex: need 0 <= k <= n");
    std::vector<std::vector<int>> out;
    out.reserve(static_cast<std::size_t>(binomial(n, k)));
    std::vector<int> cur(k);
    for (int i = 0; i < k; ++i) cur[i] = i;
    while (true) {
        out.push_back(cur);
        // advance to the next subset; the rightmost index that can move does
        int i = k - 1;
        while (i >= 0 && cur[i] == n - k + i) --i;
        if (i < 0) break;
        ++cur[i];
        for (int j = i + 1; j < k; ++j) cur[j] = cur[j - 1] + 1;
    }
    return out;
}

} // namespace ccopt
