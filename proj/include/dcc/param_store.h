#pragma once

#include <cmath>
#include <map>
#include <stdexcept>
#include <string>

#include "dcc/tensor.h"

namespace dcc {

template <typename T>
using NamedTensors = std::map<std::string, TensorT<T>>;

/// Named parameter tensors with a per-parameter trainable flag. A frozen
/// parameter is bit-identical before and after any optimizer step.
template <typename T>
class ParamStoreT {
  public:
    struct Entry {
        TensorT<T> value;
        bool trainable = true;
    };

    TensorT<T>& add(const std::string& name, TensorT<T> value, bool trainable = true) {
        auto [it, inserted] = entries_.emplace(name, Entry{std::move(value), trainable});
        if (!inserted) throw std::invalid_argument("param store: duplicate name '" + name + "'");
        return it->second.value;
    }

    bool has(const std::string& name) const { return entries_.count(name) != 0; }

    TensorT<T>& at(const std::string& name) { return entry(name).value; }
    const TensorT<T>& at(const std::string& name) const { return entry(name).value; }

    void set_trainable(const std::string& name, bool trainable) { entry(name).trainable = trainable; }
    bool trainable(const std::string& name) const { return entry(name).trainable; }

    std::map<std::string, Entry>& entries() { return entries_; }
    const std::map<std::string, Entry>& entries() const { return entries_; }

    size_t size() const { return entries_.size(); }

  private:
    Entry& entry(const std::string& name) {
        auto it = entries_.find(name);
        if (it == entries_.end()) throw std::invalid_argument("param store: unknown name '" + name + "'");
        return it->second;
    }
    const Entry& entry(const std::string& name) const {
        auto it = entries_.find(name);
        if (it == entries_.end()) throw std::invalid_argument("param store: unknown name '" + name + "'");
        return it->second;
    }

    std::map<std::string, Entry> entries_;
};

using ParamStore = ParamStoreT<float>;
using ParamStore64 = ParamStoreT<double>;

/// One SGD update: trainable params become w - lr * g, frozen params are left
/// untouched. clip_norm > 0 rescales the whole gradient set when its global
/// L2 norm exceeds the bound.
template <typename T>
void sgd_step(ParamStoreT<T>& store, const NamedTensors<T>& grads, T lr, T clip_norm = T(0)) {
    for (const auto& [name, g] : grads) {
        if (!store.has(name)) throw std::invalid_argument("sgd_step: unknown parameter '" + name + "'");
        if (!store.at(name).same_shape(g)) throw_shape_error("sgd_step('" + name + "')", store.at(name).shape, g.shape);
    }
    double scale = 1.0;
    if (clip_norm > T(0)) {
        double sq = 0.0;
        for (const auto& [name, g] : grads) {
            if (!store.trainable(name)) continue;
            for (T v : g.data) sq += static_cast<double>(v) * static_cast<double>(v);
        }
        double norm = std::sqrt(sq);
        if (norm > static_cast<double>(clip_norm)) scale = static_cast<double>(clip_norm) / norm;
    }
    for (const auto& [name, g] : grads) {
        if (!store.trainable(name)) continue;
        TensorT<T>& w = store.at(name);
        for (size_t i = 0; i < w.numel(); ++i) {
            w[i] -= static_cast<T>(static_cast<double>(lr) * scale * static_cast<double>(g[i]));
        }
    }
}

/// Fetch-or-create a zero gradient slot with the given shape.
template <typename T>
TensorT<T>& grad_slot(NamedTensors<T>& grads, const std::string& name, const std::vector<size_t>& shape) {
    auto it = grads.find(name);
    if (it == grads.end()) it = grads.emplace(name, TensorT<T>(shape)).first;
    return it->second;
}

} // namespace dcc
