#pragma once

// Dense table factors for variable elimination. Internal to the inference
// engine; not installed.

#include <cstddef>
#include <vector>

#include "obsdet/types.hpp"

namespace obsdet::detail {

// Scope is kept sorted ascending; values are row-major with the first scope
// variable most significant. A factor with empty scope is a scalar.
struct Factor {
    std::vector<VarIndex> vars;
    std::vector<int> cards;
    std::vector<double> values;

    static Factor scalar(double v) { return Factor{{}, {}, {v}}; }
    std::size_t size() const { return values.size(); }
};

Factor multiply(const Factor& a, const Factor& b);
Factor sum_out(const Factor& f, VarIndex var);

}  // namespace obsdet::detail
