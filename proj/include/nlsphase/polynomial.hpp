#pragma once

#include <algorithm>
#include <vector>

namespace nlsphase {

// Dense polynomial, coefficients in ascending powers.
class Polynomial {
public:
    Polynomial() = default;
    explicit Polynomial(std::vector<double> coeffs) : c_(std::move(coeffs)) {}

    double operator()(double x) const {
        double s = 0.0;
        for (auto it = c_.rbegin(); it != c_.rend(); ++it) s = s * x + *it;
        return s;
    }
    std::size_t degree() const { return c_.empty() ? 0 : c_.size() - 1; }
    const std::vector<double>& coeffs() const { return c_; }

    Polynomial derivative() const {
        if (c_.size() <= 1) return Polynomial({0.0});
        std::vector<double> d(c_.size() - 1);
        for (std::size_t i = 1; i < c_.size(); ++i) d[i - 1] = c_[i] * static_cast<double>(i);
        return Polynomial(std::move(d));
    }
    // Antiderivative vanishing at 0.
    Polynomial antiderivative() const {
        std::vector<double> a(c_.size() + 1, 0.0);
        for (std::size_t i = 0; i < c_.size(); ++i) a[i + 1] = c_[i] / static_cast<double>(i + 1);
        return Polynomial(std::move(a));
    }
    Polynomial operator*(const Polynomial& o) const {
        if (c_.empty() || o.c_.empty()) return Polynomial({0.0});
        std::vector<double> p(c_.size() + o.c_.size() - 1, 0.0);
        for (std::size_t i = 0; i < c_.size(); ++i)
            for (std::size_t j = 0; j < o.c_.size(); ++j) p[i + j] += c_[i] * o.c_[j];
        return Polynomial(std::move(p));
    }
    Polynomial operator+(const Polynomial& o) const {
        std::vector<double> p(std::max(c_.size(), o.c_.size()), 0.0);
        for (std::size_t i = 0; i < c_.size(); ++i) p[i] += c_[i];
        for (std::size_t i = 0; i < o.c_.size(); ++i) p[i] += o.c_[i];
        return Polynomial(std::move(p));
    }
    Polynomial operator*(double s) const {
        auto p = c_;
        for (auto& v : p) v *= s;
        return Polynomial(std::move(p));
    }

private:
    std::vector<double> c_;
};

}  // namespace nlsphase
