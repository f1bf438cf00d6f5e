#pragma once

#include <cassert>
#include <cmath>
#include <cstddef>
#include <initializer_list>
#include <utility>
#include <vector>

#include "ddd/errors.hpp"
#include "ddd/rng.hpp"

namespace ddd {

/* Flat array of doubles with (rows, cols) shape metadata; cols = 1 for plain
 * vectors.  Value semantics throughout; shape checks throw DimensionError. */
class Tensor {
public:
    Tensor() = default;

    explicit Tensor(long rows, long cols = 1)
        : data_(static_cast<std::size_t>(rows * cols), 0.0), rows_(rows), cols_(cols) {
        assert(rows >= 0 && cols >= 0);
    }

    Tensor(std::initializer_list<double> v)
        : data_(v), rows_(static_cast<long>(v.size())), cols_(1) {}

    static Tensor from(std::vector<double> v) {
        Tensor t;
        t.rows_ = static_cast<long>(v.size());
        t.cols_ = 1;
        t.data_ = std::move(v);
        return t;
    }

    static Tensor image(long rows, long cols, std::vector<double> v) {
        if (static_cast<long>(v.size()) != rows * cols)
            throw DimensionError("image data length does not match rows*cols");
        Tensor t;
        t.rows_ = rows;
        t.cols_ = cols;
        t.data_ = std::move(v);
        return t;
    }

    static Tensor random_gaussian(long rows, long cols, Rng& rng) {
        Tensor t(rows, cols);
        for (auto& v : t.data_) v = rng.gaussian();
        return t;
    }

    long rows() const { return rows_; }
    long cols() const { return cols_; }
    long size() const { return static_cast<long>(data_.size()); }
    bool empty() const { return data_.empty(); }

    double operator[](long i) const { return data_[static_cast<std::size_t>(i)]; }
    double& operator[](long i) { return data_[static_cast<std::size_t>(i)]; }

    double at(long r, long c) const { return data_[static_cast<std::size_t>(r * cols_ + c)]; }
    double& at(long r, long c) { return data_[static_cast<std::size_t>(r * cols_ + c)]; }

    const double* data() const { return data_.data(); }
    double* data() { return data_.data(); }
    const std::vector<double>& vec() const { return data_; }

    bool same_shape(const Tensor& o) const { return rows_ == o.rows_ && cols_ == o.cols_; }

    void require_same_shape(const Tensor& o, const char* what) const {
        if (!same_shape(o)) throw DimensionError(what);
    }

    Tensor& operator+=(const Tensor& o) {
        require_same_shape(o, "tensor addition shape mismatch");
        for (long i = 0; i < size(); ++i) data_[i] += o.data_[i];
        return *this;
    }
    Tensor& operator-=(const Tensor& o) {
        require_same_shape(o, "tensor subtraction shape mismatch");
        for (long i = 0; i < size(); ++i) data_[i] -= o.data_[i];
        return *this;
    }
    Tensor& operator*=(double s) {
        for (auto& v : data_) v *= s;
        return *this;
    }

    /* *this += a * x */
    Tensor& axpy(double a, const Tensor& x) {
        require_same_shape(x, "axpy shape mismatch");
        for (long i = 0; i < size(); ++i) data_[i] += a * x.data_[i];
        return *this;
    }

    friend Tensor operator+(Tensor a, const Tensor& b) { return a += b; }
    friend Tensor operator-(Tensor a, const Tensor& b) { return a -= b; }
    friend Tensor operator*(double s, Tensor a) { return a *= s; }
    friend Tensor operator-(Tensor a) { return a *= -1.0; }

    double dot(const Tensor& o) const {
        require_same_shape(o, "dot shape mismatch");
        double s = 0.0;
        for (long i = 0; i < size(); ++i) s += data_[i] * o.data_[i];
        return s;
    }

    double norm() const { return std::sqrt(dot(*this)); }

    double norm1() const {
        double s = 0.0;
        for (double v : data_) s += std::fabs(v);
        return s;
    }

    double norm_inf() const {
        double s = 0.0;
        for (double v : data_) s = std::max(s, std::fabs(v));
        return s;
    }

    bool all_finite() const {
        for (double v : data_)
            if (!std::isfinite(v)) return false;
        return true;
    }

private:
    std::vector<double> data_;
    long rows_ = 0;
    long cols_ = 1;
};

inline double dist(const Tensor& a, const Tensor& b) { return (a - b).norm(); }

} // namespace ddd
