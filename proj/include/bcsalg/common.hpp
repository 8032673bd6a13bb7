#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace bcsalg {

/// Truth values are multiplicative: -1 encodes TRUE, +1 encodes FALSE.
using Sign = int;

inline constexpr Sign kTrue = -1;
inline constexpr Sign kFalse = +1;

inline bool is_sign(int v) { return v == 1 || v == -1; }

/// Thrown when an input exceeds a configured cap (arity, variable count, ...).
struct ResourceError : std::runtime_error {
    explicit ResourceError(const std::string &msg) : std::runtime_error(msg) {}
};

/// Thrown when a bounded search runs out of budget without an answer. Callers
/// must treat this as "unknown", never as a refutation.
struct BudgetExceeded : std::runtime_error {
    explicit BudgetExceeded(const std::string &msg) : std::runtime_error(msg) {}
};

/// Sign tuples are packed little-endian: bit i of the index is 1 exactly when
/// coordinate i is -1 (TRUE).
inline std::uint32_t index_of_tuple(const std::vector<Sign> &t) {
    std::uint32_t idx = 0;
    for (std::size_t i = 0; i < t.size(); ++i) {
        if (t[i] == -1) {
            idx |= (1u << i);
        }
    }
    return idx;
}

inline std::vector<Sign> tuple_of_index(std::uint32_t idx, int arity) {
    std::vector<Sign> t((std::size_t)arity, +1);
    for (int i = 0; i < arity; ++i) {
        if (idx & (1u << i)) {
            t[(std::size_t)i] = -1;
        }
    }
    return t;
}

} // namespace bcsalg
