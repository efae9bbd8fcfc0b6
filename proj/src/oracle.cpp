#include "entdyn/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include <boost/math/tools/toms748_solve.hpp>

#include "entdyn/errors.hpp"

namespace entdyn {

double DiscretizedBath::total_weight() const {
    double total = 0.0;
    for (double g : couplings) total += g * g;
    return total;
}

double DiscretizedBath::max_spacing() const {
    double spacing = frequencies.empty() ? 0.0 : 2.0 * frequencies.front();
    for (std::size_t k = 1; k < frequencies.size(); ++k) {
        spacing = std::max(spacing, frequencies[k] - frequencies[k - 1]);
    }
    return spacing;
}

DiscretizedBath discretize(const SpectralDensity& bath, std::size_t modes, double omega_max) {
    if (modes < 2) throw ValidationError("bath_too_small", "discretized bath needs K >= 2");
    if (!(omega_max > 0.0)) throw ValidationError("omega_max_nonpositive", "omega_max must be > 0");
    const double s = bath.params().s;
    const bool mapped = s < 1.0;
    const double x_max = mapped ? std::pow(omega_max, s) : omega_max;
    const double dx = x_max / static_cast<double>(modes);

    DiscretizedBath out;
    out.frequencies.reserve(modes);
    out.couplings.reserve(modes);
    for (std::size_t k = 0; k < modes; ++k) {
        const double x = (static_cast<double>(k) + 0.5) * dx;
        const double w = mapped ? std::pow(x, 1.0 / s) : x;
        const double jac = mapped ? w / (s * x) : 1.0; // dw/dx
        out.frequencies.push_back(w);
        out.couplings.push_back(std::sqrt(bath.density(w) * jac * dx));
    }
    return out;
}

ExactPropagator::ExactPropagator(const DiscretizedBath& bath, const ModelConfig& config) : bath_(bath) {
    const auto k = static_cast<Eigen::Index>(bath.size());
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(k + 1, k + 1);
    m(0, 0) = config.omega_plus;
    for (Eigen::Index i = 0; i < k; ++i) {
        m(i + 1, i + 1) = bath.frequencies[static_cast<std::size_t>(i)];
        const double c = std::numbers::sqrt2 * bath.couplings[static_cast<std::size_t>(i)];
        m(0, i + 1) = c;
        m(i + 1, 0) = c;
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(m);
    if (solver.info() != Eigen::Success) {
        throw NumericalError("eigendecomposition of the discretized-bath matrix failed");
    }
    eigenvalues_ = solver.eigenvalues();
    eigenvectors_ = solver.eigenvectors();
    valid_until_ = std::numbers::pi / bath.max_spacing();
}

int ExactPropagator::negative_eigenvalue_count() const {
    return static_cast<int>((eigenvalues_.array() < 0.0).count());
}

double ExactPropagator::dephased_u_sq() const {
    return eigenvectors_.row(0).array().pow(4).sum();
}

double ExactPropagator::dephased_v(double temperature) const {
    const Eigen::Index dim = eigenvalues_.size();
    Eigen::VectorXd occupation = Eigen::VectorXd::Zero(dim);
    for (Eigen::Index i = 1; i < dim; ++i) {
        const double w = bath_.frequencies[static_cast<std::size_t>(i - 1)];
        if (w > 0.0) occupation(i) = bose_occupation(w, temperature);
    }
    const Eigen::VectorXd per_mode = eigenvectors_.array().square().matrix().transpose() * occupation;
    return (eigenvectors_.row(0).array().square().transpose() * per_mode.array()).sum();
}

OracleSeries ExactPropagator::evolve(const std::vector<double>& times, double temperature) const {
    for (double t : times) {
        if (t > valid_until_) {
            throw ValidationError("recurrence_window", "oracle time " + std::to_string(t) +
                                                           " exceeds the recurrence bound " +
                                                           std::to_string(valid_until_));
        }
    }
    const Eigen::Index dim = eigenvalues_.size();
    const Eigen::VectorXd first_row = eigenvectors_.row(0).transpose();

    std::vector<double> occupation(static_cast<std::size_t>(dim), 0.0);
    for (Eigen::Index i = 1; i < dim; ++i) {
        occupation[static_cast<std::size_t>(i)] =
            bath_.frequencies[static_cast<std::size_t>(i - 1)] > 0.0
                ? bose_occupation(bath_.frequencies[static_cast<std::size_t>(i - 1)], temperature)
                : 0.0;
    }

    OracleSeries out;
    out.times = times;
    out.u.resize(times.size());
    out.v.resize(times.size());

    constexpr std::size_t chunk = 128;
    for (std::size_t start = 0; start < times.size(); start += chunk) {
        const std::size_t count = std::min(chunk, times.size() - start);
        Eigen::MatrixXd er(dim, static_cast<Eigen::Index>(count));
        Eigen::MatrixXd ei(dim, static_cast<Eigen::Index>(count));
        for (std::size_t j = 0; j < count; ++j) {
            const double t = times[start + j];
            for (Eigen::Index l = 0; l < dim; ++l) {
                const double ph = eigenvalues_(l) * t;
                er(l, static_cast<Eigen::Index>(j)) = first_row(l) * std::cos(ph);
                ei(l, static_cast<Eigen::Index>(j)) = -first_row(l) * std::sin(ph);
            }
        }
        // Column j holds [e^{-iMt_j}]_{k0} = [e^{-iMt_j}]_{0k} (M real symmetric).
        const Eigen::MatrixXd rr = eigenvectors_ * er;
        const Eigen::MatrixXd ri = eigenvectors_ * ei;
        for (std::size_t j = 0; j < count; ++j) {
            const auto c = static_cast<Eigen::Index>(j);
            out.u[start + j] = {rr(0, c), ri(0, c)};
            double v = 0.0;
            double norm = 0.0;
            for (Eigen::Index i = 0; i < dim; ++i) {
                const double p = rr(i, c) * rr(i, c) + ri(i, c) * ri(i, c);
                norm += p;
                v += occupation[static_cast<std::size_t>(i)] * p;
            }
            out.v[start + j] = v;
            out.max_unitarity_defect = std::max(out.max_unitarity_defect, std::abs(norm - 1.0));
        }
    }
    return out;
}

DephasedAverages dephased_averages(const DiscretizedBath& bath, const ModelConfig& config,
                                   const std::vector<double>& temperatures) {
    const std::size_t k = bath.size();
    const std::vector<double>& d = bath.frequencies;
    std::vector<double> b2(k);
    for (std::size_t j = 0; j < k; ++j) b2[j] = 2.0 * bath.couplings[j] * bath.couplings[j];
    std::vector<std::vector<double>> occupation(temperatures.size(), std::vector<double>(k, 0.0));
    for (std::size_t t = 0; t < temperatures.size(); ++t) {
        for (std::size_t j = 0; j < k; ++j) occupation[t][j] = bose_occupation(d[j], temperatures[t]);
    }

    DephasedAverages out;
    out.v.assign(temperatures.size(), 0.0);
    std::vector<double> gap(k);
    // Eigenvalue written as d[anchor] + mu keeps lambda - d[anchor] exact when
    // the root hugs a pole.
    auto accumulate = [&](std::size_t anchor, double mu) {
        double norm = 1.0;
        for (std::size_t j = 0; j < k; ++j) {
            gap[j] = (d[anchor] - d[j]) + mu;
            norm += b2[j] / (gap[j] * gap[j]);
        }
        const double phi0_sq = 1.0 / norm;
        out.u_sq += phi0_sq * phi0_sq;
        for (std::size_t t = 0; t < temperatures.size(); ++t) {
            double bath_part = 0.0;
            for (std::size_t j = 0; j < k; ++j) bath_part += occupation[t][j] * b2[j] / (gap[j] * gap[j]);
            out.v[t] += phi0_sq * phi0_sq * bath_part;
        }
    };
    auto secular = [&](std::size_t anchor) {
        return [&, anchor](double mu) {
            double sum = 0.0;
            for (std::size_t j = 0; j < k; ++j) sum += b2[j] / ((d[anchor] - d[j]) + mu);
            return d[anchor] + mu - config.omega_plus - sum;
        };
    };
    auto solve = [&](auto f, double lo, double hi) {
        std::uintmax_t iters = 200;
        auto r = boost::math::tools::toms748_solve(f, lo, hi, boost::math::tools::eps_tolerance<double>(52), iters);
        return 0.5 * (r.first + r.second);
    };

    if (k == 0) {
        out.u_sq = 1.0;
        return out;
    }
    // Below the lowest bath frequency; f -> -inf as mu -> -inf.
    {
        auto f = secular(0);
        double lo = -1.0;
        while (f(lo) > 0.0) lo *= 2.0;
        const double hi = -std::numeric_limits<double>::min();
        if (b2[0] > 0.0) accumulate(0, solve(f, lo, hi));
    }
    for (std::size_t a = 0; a + 1 < k; ++a) {
        if (b2[a] == 0.0) {
            continue; // decoupled bath mode, phi_0 = 0
        }
        auto f = secular(a);
        const double width = d[a + 1] - d[a];
        double lo = width * 1e-300;
        double hi = std::nextafter(width, 0.0);
        if (!(f(lo) < 0.0)) lo = std::numeric_limits<double>::min();
        if (!(f(hi) > 0.0)) continue; // root merged with the upper pole at double precision
        accumulate(a, solve(f, lo, hi));
    }
    // Above the highest bath frequency.
    {
        auto f = secular(k - 1);
        double hi = 1.0;
        while (f(hi) < 0.0) hi *= 2.0;
        if (b2[k - 1] > 0.0) accumulate(k - 1, solve(f, std::numeric_limits<double>::min(), hi));
    }
    return out;
}

} // namespace entdyn
