#include "entdyn/quadrature.hpp"

#include <algorithm>
#include <limits>
#include <queue>
#include <cmath>
#include <string>

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "entdyn/errors.hpp"

namespace entdyn::quad {

namespace {

constexpr int kInnerLevels = 12;
constexpr int kMaxSplits = 4000;

struct Panel {
    double a, b, value, error, l1;
    bool operator<(const Panel& other) const { return error < other.error; }
};

// Gauss-Kronrod 10/21 on one panel.
Panel kronrod_panel(const RealFunction& f, double a, double b) {
    using Kronrod = boost::math::quadrature::gauss_kronrod<double, 21>;
    using Gauss = boost::math::quadrature::gauss<double, 10>;
    const auto& xk = Kronrod::abscissa();
    const auto& wk = Kronrod::weights();
    const auto& wg = Gauss::weights();
    const double mid = 0.5 * (a + b);
    const double half = 0.5 * (b - a);
    // Kronrod abscissae: even indices are Kronrod-only, odd are shared with Gauss
    // (xk[0] = 0 is Kronrod-only for the 10-point Gauss rule).
    const double f0 = f(mid);
    double kron = f0 * wk[0];
    double gauss = 0.0;
    double l1 = std::abs(f0) * wk[0];
    for (std::size_t i = 1; i < xk.size(); ++i) {
        const double fp = f(mid + half * xk[i]);
        const double fm = f(mid - half * xk[i]);
        kron += (fp + fm) * wk[i];
        l1 += (std::abs(fp) + std::abs(fm)) * wk[i];
        if (i % 2 == 1) gauss += (fp + fm) * wg[i / 2];
    }
    Panel p{a, b, kron * half, std::abs(kron - gauss) * half, l1 * std::abs(half)};
    p.error = std::max(p.error, 2.0 * std::numeric_limits<double>::epsilon() * std::abs(p.value));
    return p;
}

std::vector<double> segment_bounds(double scale, double omega_max) {
    std::vector<double> b{0.0};
    double edge = scale * std::ldexp(1.0, -kInnerLevels);
    while (edge < omega_max) {
        b.push_back(edge);
        edge *= 2.0;
    }
    b.push_back(omega_max);
    return b;
}

} // namespace

double integrate(const RealFunction& f, double a, double b, double rel_tol, double abs_tol) {
    if (a == b) return 0.0;
    // Global adaptive bisection: always split the panel with the largest
    // |K21 - G10| until the summed estimate meets the target.
    std::priority_queue<Panel> heap;
    double value = 0.0;
    double error = 0.0;
    double l1 = 0.0;
    {
        Panel p = kronrod_panel(f, a, b);
        value = p.value;
        error = p.error;
        l1 = p.l1;
        heap.push(p);
    }
    auto target = [&] { return std::max({rel_tol * std::abs(value), abs_tol, 1e-15 * l1, 1e-300}); };
    int splits = 0;
    while (error > target() && splits < kMaxSplits) {
        Panel worst = heap.top();
        heap.pop();
        const double mid = 0.5 * (worst.a + worst.b);
        if (!(mid > worst.a && mid < worst.b)) {
            heap.push(worst);
            break; // panel at floating-point resolution
        }
        Panel left = kronrod_panel(f, worst.a, mid);
        Panel right = kronrod_panel(f, mid, worst.b);
        value += left.value + right.value - worst.value;
        error += left.error + right.error - worst.error;
        l1 += left.l1 + right.l1 - worst.l1;
        heap.push(left);
        heap.push(right);
        ++splits;
    }
    if (!std::isfinite(value)) {
        throw NumericalError("adaptive quadrature produced a non-finite value");
    }
    if (error > target()) {
        // Recompute from the panels to shed accumulated rounding in the running sums.
        double v = 0.0, e = 0.0;
        for (auto copy = heap; !copy.empty(); copy.pop()) {
            v += copy.top().value;
            e += copy.top().error;
        }
        value = v;
        error = e;
        if (error > target()) {
            const double achieved = value != 0.0 ? error / std::abs(value) : error;
            throw NumericalError("adaptive quadrature on [" + std::to_string(a) + ", " + std::to_string(b) +
                                     "] reached relative error " + std::to_string(achieved),
                                 achieved);
        }
    }
    return value;
}

double integrate_from_origin(const RealFunction& f, double b, double s, double scale, double rel_tol,
                             double abs_tol) {
    if (b <= 0.0) return 0.0;
    const auto bounds = segment_bounds(scale, b);
    double total = 0.0;
    // Innermost segment: smooth out w^(s-1) with w = x^(1/s).
    const double inner = bounds[1];
    if (s < 1.0) {
        const double p = 1.0 / s;
        auto g = [&](double x) {
            if (x <= 0.0) return 0.0;
            const double w = std::pow(x, p);
            return f(w) * p * w / x;
        };
        total += integrate(g, 0.0, std::pow(inner, s), rel_tol, abs_tol);
    } else {
        total += integrate(f, 0.0, inner, rel_tol, abs_tol);
    }
    for (std::size_t i = 1; i + 1 < bounds.size(); ++i) {
        total += integrate(f, bounds[i], bounds[i + 1], rel_tol, abs_tol);
    }
    return total;
}

FrequencyMesh breakpoint_mesh(const std::vector<double>& bounds, double s, int panels_per_segment) {
    using Rule = boost::math::quadrature::gauss<double, 8>;
    // Boost stores the non-negative half of the symmetric rule.
    std::vector<double> x, w;
    for (std::size_t i = 0; i < Rule::abscissa().size(); ++i) {
        const double a = Rule::abscissa()[i];
        const double wt = Rule::weights()[i];
        x.push_back(a);
        w.push_back(wt);
        if (a != 0.0) {
            x.push_back(-a);
            w.push_back(wt);
        }
    }

    FrequencyMesh mesh;
    const int m = std::max(1, panels_per_segment);
    for (std::size_t seg = 0; seg + 1 < bounds.size(); ++seg) {
        if (!(bounds[seg + 1] > bounds[seg])) continue;
        const bool substitute = seg == 0 && bounds[0] == 0.0 && s < 1.0;
        const double lo = substitute ? 0.0 : bounds[seg];
        const double hi = substitute ? std::pow(bounds[1], s) : bounds[seg + 1];
        const double h = (hi - lo) / m;
        for (int p = 0; p < m; ++p) {
            const double mid = lo + (p + 0.5) * h;
            for (std::size_t k = 0; k < x.size(); ++k) {
                const double node = mid + 0.5 * h * x[k];
                const double wt = 0.5 * h * w[k];
                if (substitute) {
                    const double omega = std::pow(node, 1.0 / s);
                    mesh.omega.push_back(omega);
                    mesh.weight.push_back(wt * omega / (s * node));
                } else {
                    mesh.omega.push_back(node);
                    mesh.weight.push_back(wt);
                }
            }
        }
    }
    // Sort by frequency; panels are generated in order but nodes within a panel are not.
    std::vector<std::size_t> idx(mesh.omega.size());
    for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
    std::sort(idx.begin(), idx.end(), [&](auto a, auto b) { return mesh.omega[a] < mesh.omega[b]; });
    FrequencyMesh sorted;
    sorted.omega.reserve(idx.size());
    sorted.weight.reserve(idx.size());
    for (auto i : idx) {
        sorted.omega.push_back(mesh.omega[i]);
        sorted.weight.push_back(mesh.weight[i]);
    }
    return sorted;
}

FrequencyMesh graded_mesh(double scale, double omega_max, double s, int panels_per_segment) {
    return breakpoint_mesh(segment_bounds(scale, omega_max), s, panels_per_segment);
}

int panels_for_nodes(double scale, double omega_max, int target_nodes) {
    const auto segments = static_cast<int>(segment_bounds(scale, omega_max).size()) - 1;
    return std::max(1, (target_nodes + 8 * segments - 1) / (8 * segments));
}

} // namespace entdyn::quad
