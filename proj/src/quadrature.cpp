#include "nlsphase/quadrature.hpp"

#include <cmath>
#include <map>
#include <mutex>
#include <numbers>

namespace nlsphase {

const GaussRule& gauss_legendre(std::size_t n) {
    static std::mutex mu;
    static std::map<std::size_t, GaussRule> rules;
    std::lock_guard<std::mutex> lock(mu);
    if (auto it = rules.find(n); it != rules.end()) return it->second;
    GaussRule g;
    g.x.resize(n);
    g.w.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        double x = std::cos(std::numbers::pi * (static_cast<double>(i) + 0.75) /
                            (static_cast<double>(n) + 0.5));
        double dp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = x;
            for (std::size_t k = 2; k <= n; ++k) {
                const double p2 =
                    ((2.0 * static_cast<double>(k) - 1.0) * x * p1 - (static_cast<double>(k) - 1.0) * p0) /
                    static_cast<double>(k);
                p0 = p1;
                p1 = p2;
            }
            if (n == 1) p1 = x, p0 = 1.0;
            dp = static_cast<double>(n) * (x * p1 - p0) / (x * x - 1.0);
            const double dx = p1 / dp;
            x -= dx;
            if (std::abs(dx) < 1e-16) break;
        }
        g.x[i] = x;
        g.w[i] = 2.0 / ((1.0 - x * x) * dp * dp);
    }
    return rules.emplace(n, std::move(g)).first->second;
}

}  // namespace nlsphase
