#include "uaseg/sigmoid.hpp"

#include <cmath>

namespace uaseg {

ProbabilityStack sigmoid_reduce(const LogitStack& logits) {
    ProbabilityStack out(logits.count(), logits.height(), logits.width());
    const auto& in = logits.values();
    auto& v = out.values();
    for (std::size_t idx = 0; idx < in.size(); ++idx) {
        if (!std::isfinite(in[idx]))
            throw InvalidInputError("sigmoid_reduce: non-finite logit at flat index " +
                                    std::to_string(idx));
        v[idx] = sigmoid(in[idx]);
    }
    return out;
}

} // namespace uaseg
