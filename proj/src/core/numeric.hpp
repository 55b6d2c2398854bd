#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace sdgf {

/// Pairwise-tree summation with a fixed reduction order. Deterministic and
/// considerably more accurate than sequential accumulation on long spans.
inline double pairwise_sum(std::span<const double> v) {
    constexpr size_t kBase = 32;
    if (v.size() <= kBase) {
        double s = 0.0;
        for (double x : v) s += x;
        return s;
    }
    const size_t half = v.size() / 2;
    return pairwise_sum(v.subspan(0, half)) + pairwise_sum(v.subspan(half));
}

/// Collects terms, then reduces pairwise on demand.
class PairwiseAccumulator {
public:
    void add(double x) { terms_.push_back(x); }
    size_t count() const { return terms_.size(); }
    double sum() const { return pairwise_sum(terms_); }

private:
    std::vector<double> terms_;
};

}  // namespace sdgf
