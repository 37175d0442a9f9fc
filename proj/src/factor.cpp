#include "factor.hpp"

#include <algorithm>
#include <stdexcept>

namespace obsdet::detail {

namespace {

// Strides of each scope variable in the row-major layout.
std::vector<std::size_t> strides_of(const Factor& f) {
    std::vector<std::size_t> strides(f.vars.size(), 1);
    for (std::size_t i = f.vars.size(); i-- > 1;) {
        strides[i - 1] = strides[i] * static_cast<std::size_t>(f.cards[i]);
    }
    return strides;
}

}  // namespace

Factor multiply(const Factor& a, const Factor& b) {
    Factor out;
    out.vars.reserve(a.vars.size() + b.vars.size());
    std::set_union(a.vars.begin(), a.vars.end(), b.vars.begin(), b.vars.end(),
                   std::back_inserter(out.vars));
    out.cards.resize(out.vars.size());

    // Positions of each output variable inside a and b (-1 if absent).
    std::vector<int> pos_a(out.vars.size(), -1), pos_b(out.vars.size(), -1);
    for (std::size_t i = 0; i < out.vars.size(); ++i) {
        auto ita = std::lower_bound(a.vars.begin(), a.vars.end(), out.vars[i]);
        if (ita != a.vars.end() && *ita == out.vars[i]) {
            pos_a[i] = static_cast<int>(ita - a.vars.begin());
            out.cards[i] = a.cards[static_cast<std::size_t>(pos_a[i])];
        }
        auto itb = std::lower_bound(b.vars.begin(), b.vars.end(), out.vars[i]);
        if (itb != b.vars.end() && *itb == out.vars[i]) {
            pos_b[i] = static_cast<int>(itb - b.vars.begin());
            out.cards[i] = b.cards[static_cast<std::size_t>(pos_b[i])];
        }
    }

    std::size_t total = 1;
    for (int c : out.cards) total *= static_cast<std::size_t>(c);
    out.values.resize(total);

    const auto stride_a = strides_of(a);
    const auto stride_b = strides_of(b);

    std::vector<int> idx(out.vars.size(), 0);
    std::size_t off_a = 0, off_b = 0;
    for (std::size_t flat = 0; flat < total; ++flat) {
        out.values[flat] = a.values[off_a] * b.values[off_b];
        // Odometer increment, least significant digit last.
        for (std::size_t d = out.vars.size(); d-- > 0;) {
            ++idx[d];
            if (pos_a[d] >= 0) off_a += stride_a[static_cast<std::size_t>(pos_a[d])];
            if (pos_b[d] >= 0) off_b += stride_b[static_cast<std::size_t>(pos_b[d])];
            if (idx[d] < out.cards[d]) break;
            idx[d] = 0;
            if (pos_a[d] >= 0) {
                off_a -= stride_a[static_cast<std::size_t>(pos_a[d])] *
                         static_cast<std::size_t>(out.cards[d]);
            }
            if (pos_b[d] >= 0) {
                off_b -= stride_b[static_cast<std::size_t>(pos_b[d])] *
                         static_cast<std::size_t>(out.cards[d]);
            }
        }
    }
    return out;
}

Factor sum_out(const Factor& f, VarIndex var) {
    auto it = std::lower_bound(f.vars.begin(), f.vars.end(), var);
    if (it == f.vars.end() || *it != var) {
        throw std::logic_error("sum_out: variable not in factor scope");
    }
    const auto pos = static_cast<std::size_t>(it - f.vars.begin());
    const auto card = static_cast<std::size_t>(f.cards[pos]);

    Factor out;
    out.vars = f.vars;
    out.vars.erase(out.vars.begin() + static_cast<std::ptrdiff_t>(pos));
    out.cards = f.cards;
    out.cards.erase(out.cards.begin() + static_cast<std::ptrdiff_t>(pos));

    std::size_t inner = 1;  // combined cardinality right of `pos`
    for (std::size_t i = pos + 1; i < f.vars.size(); ++i) {
        inner *= static_cast<std::size_t>(f.cards[i]);
    }
    const std::size_t outer = f.size() / (inner * card);

    out.values.assign(f.size() / card, 0.0);
    std::size_t src = 0;
    for (std::size_t o = 0; o < outer; ++o) {
        for (std::size_t k = 0; k < card; ++k) {
            const std::size_t dst_base = o * inner;
            for (std::size_t i = 0; i < inner; ++i) {
                out.values[dst_base + i] += f.values[src++];
            }
        }
    }
    return out;
}

}  // namespace obsdet::detail
