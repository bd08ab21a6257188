#pragma once

#include <cmath>
#include <cstddef>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace dcc {

/// Dense row-major tensor. Training code uses float storage; gradient
/// checking instantiates the same ops with double.
template <typename T>
struct TensorT {
    std::vector<size_t> shape;
    std::vector<T> data;

    TensorT() = default;

    explicit TensorT(std::vector<size_t> s) : shape(std::move(s)) {
        data.assign(numel_of(shape), T(0));
    }

    TensorT(std::vector<size_t> s, std::vector<T> d) : shape(std::move(s)), data(std::move(d)) {
        if (data.size() != numel_of(shape)) {
            throw std::invalid_argument("tensor: data length " + std::to_string(data.size()) +
                                        " does not match shape " + shape_str(shape));
        }
    }

    static size_t numel_of(const std::vector<size_t>& s) {
        size_t n = 1;
        for (size_t d : s) n *= d;
        return n;
    }

    size_t numel() const { return data.size(); }
    size_t ndim() const { return shape.size(); }

    size_t rows() const {
        require_2d();
        return shape[0];
    }
    size_t cols() const {
        require_2d();
        return shape[1];
    }

    T& operator[](size_t i) { return data[i]; }
    const T& operator[](size_t i) const { return data[i]; }

    T& at(size_t r, size_t c) {
        require_2d();
        return data[r * shape[1] + c];
    }
    const T& at(size_t r, size_t c) const {
        require_2d();
        return data[r * shape[1] + c];
    }

    bool same_shape(const TensorT& other) const { return shape == other.shape; }

    bool all_finite() const {
        for (T v : data) {
            if (!std::isfinite(static_cast<double>(v))) return false;
        }
        return true;
    }

    static std::string shape_str(const std::vector<size_t>& s) {
        std::ostringstream os;
        os << "[";
        for (size_t i = 0; i < s.size(); ++i) {
            if (i) os << "x";
            os << s[i];
        }
        os << "]";
        return os.str();
    }

  private:
    void require_2d() const {
        if (shape.size() != 2) {
            throw std::invalid_argument("tensor: expected 2-d shape, got " + shape_str(shape));
        }
    }
};

using Tensor = TensorT<float>;
using Tensor64 = TensorT<double>;

[[noreturn]] inline void throw_shape_error(const std::string& op, const std::vector<size_t>& a,
                                           const std::vector<size_t>& b) {
    throw std::invalid_argument(op + ": shape mismatch " + Tensor::shape_str(a) + " vs " +
                                Tensor::shape_str(b));
}

} // namespace dcc
