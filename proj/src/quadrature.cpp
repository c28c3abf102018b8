#include "sda/quadrature.hpp"

#include "sda/errors.hpp"

#include <cmath>
#include <numbers>

namespace sda {

QuadratureRule gauss_legendre(int n, double lo, double hi) {
    if (n < 1) throw QuadratureError("Gauss-Legendre rule needs at least one node");
    QuadratureRule rule{Eigen::VectorXd(n), Eigen::VectorXd(n)};
    const double half = 0.5 * (hi - lo);
    const double mid = 0.5 * (hi + lo);
    for (int i = 0; i < (n + 1) / 2; ++i) {
        // Newton on P_n starting from the Tricomi approximation of root i.
        double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
        double dp = 0.0;
        for (int iter = 0; iter < 100; ++iter) {
            double p0 = 1.0;
            double p1 = x;
            for (int k = 2; k <= n; ++k) {
                const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            dp = n * (x * p1 - p0) / (x * x - 1.0);
            const double step = p1 / dp;
            x -= step;
            if (std::abs(step) < 1e-16) break;
        }
        // Recompute the derivative at the converged root.
        double p0 = 1.0;
        double p1 = x;
        for (int k = 2; k <= n; ++k) {
            const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
            p0 = p1;
            p1 = p2;
        }
        dp = n * (x * p1 - p0) / (x * x - 1.0);
        const double w = 2.0 / ((1.0 - x * x) * dp * dp);
        rule.nodes(i) = mid - half * x;
        rule.nodes(n - 1 - i) = mid + half * x;
        rule.weights(i) = half * w;
        rule.weights(n - 1 - i) = half * w;
    }
    return rule;
}

}  // namespace sda
