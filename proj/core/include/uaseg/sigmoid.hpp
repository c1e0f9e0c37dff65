#pragma once

#include <cmath>

#include "uaseg/grid.hpp"

namespace uaseg {

// Numerically stable logistic function; never overflows for finite x.
inline double sigmoid(double x) {
    if (x >= 0.0) {
        return 1.0 / (1.0 + std::exp(-x));
    }
    const double e = std::exp(x);
    return e / (1.0 + e);
}

// The single canonical logit -> probability map: out[k,i,j] = sigmoid(in[k,i,j]).
// Throws InvalidInputError on non-finite logits.
ProbabilityStack sigmoid_reduce(const LogitStack& logits);

} // namespace uaseg
