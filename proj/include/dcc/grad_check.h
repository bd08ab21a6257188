#pragma once

#include <cmath>
#include <functional>
#include <stdexcept>

#include "dcc/param_store.h"

namespace dcc {

/// Central finite-difference check in double precision. For every trainable
/// scalar in the store, compares the supplied analytic gradient against
/// (f(w+eps) - f(w-eps)) / 2eps and returns the maximum relative error
/// |a - n| / max(|a|, |n|, 1e-8).
inline double grad_check(ParamStore64& store, const std::function<double(const ParamStore64&)>& f,
                         const NamedTensors<double>& analytic, double epsilon) {
    if (epsilon <= 0.0) throw std::invalid_argument("grad_check: epsilon must be positive");
    double max_rel = 0.0;
    for (auto& [name, entry] : store.entries()) {
        if (!entry.trainable) continue;
        auto it = analytic.find(name);
        if (it == analytic.end()) {
            throw std::invalid_argument("grad_check: missing analytic gradient for '" + name + "'");
        }
        const Tensor64& a = it->second;
        if (!a.same_shape(entry.value)) throw_shape_error("grad_check('" + name + "')", a.shape, entry.value.shape);
        for (size_t i = 0; i < entry.value.numel(); ++i) {
            const double saved = entry.value[i];
            entry.value[i] = saved + epsilon;
            const double fp = f(store);
            entry.value[i] = saved - epsilon;
            const double fm = f(store);
            entry.value[i] = saved;
            if (!std::isfinite(fp) || !std::isfinite(fm)) {
                throw std::runtime_error("grad_check: non-finite loss at '" + name + "'");
            }
            const double numeric = (fp - fm) / (2.0 * epsilon);
            const double rel = std::abs(a[i] - numeric) /
                               std::max({std::abs(a[i]), std::abs(numeric), 1e-8});
            if (rel > max_rel) max_rel = rel;
        }
    }
    return max_rel;
}

} // namespace dcc
