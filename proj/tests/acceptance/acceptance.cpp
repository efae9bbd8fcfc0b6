// End-to-end acceptance run: one PASS/FAIL line per criterion, exit 1 if any fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <numbers>
#include <string>
#include <thread>
#include <vector>

#include "entdyn/greens.hpp"
#include "entdyn/modes.hpp"
#include "entdyn/observables.hpp"
#include "entdyn/oracle.hpp"
#include "entdyn/sweep.hpp"
#include "entdyn/validation.hpp"

using namespace entdyn;

namespace {

constexpr double kLn2 = std::numbers::ln2;

struct Outcome {
    bool passed{false};
    std::string detail;
};

std::string fmt(const char* pattern, auto... args) {
    char buf[512];
    std::snprintf(buf, sizeof(buf), pattern, args...);
    return buf;
}

Configuration point(double s, double eta, double T = 0.0) {
    RawParameters raw;
    raw.s = s;
    raw.eta = eta;
    raw.temperature = T;
    return build_config(raw);
}

SpectralDensity bath_of(const Configuration& c) {
    return SpectralDensity(c.spectral, {c.solver.omega_max_factor, c.solver.quad_rel_tol});
}

unsigned workers() { return std::max(1u, std::min(8u, std::thread::hardware_concurrency())); }

Outcome critical_coupling_check() {
    const auto model = make_model(1.0, 0.5, 3.0);
    const double eta_c = critical_coupling(0.5, model.omega_plus, 3.0);
    int flips = 0;
    bool ordered = true;
    std::size_t prev = 0;
    for (int i = 0; i <= 40; ++i) {
        const double eta = 0.100 + 0.002 * i;
        const auto c = point(0.5, eta);
        const std::size_t count = find_localized_modes(c.model, bath_of(c)).modes.size();
        if (i > 0 && count != prev) {
            ++flips;
            const double lo = eta - 0.002;
            ordered = ordered && prev == 0 && count == 1 && lo < eta_c && eta_c < eta;
        }
        prev = count;
    }
    const bool ok = std::abs(eta_c - 0.141) <= 1e-3 && flips == 1 && ordered;
    return {ok, fmt("eta_c=%.6f, single 0->1 flip across it: %s", eta_c, flips == 1 && ordered ? "yes" : "no")};
}

Outcome weak_zero_temperature() {
    auto c = point(1.0, 0.05);
    const TimeGrid grid = TimeGrid::covering(c.solver.dt, 200.0);
    const GreensSeries series = evolve_greens(c, grid);
    const double t = grid.time(grid.size() - 1);
    const auto plus = center_moments(series.u.back(), series.v.back(), c.model.r);
    const auto minus = relative_moments(c.model.r, c.model.omega_minus, t);
    const auto en = entanglement(plus, minus, c.model.r);
    const bool ok = en.en_plus < 1e-3 && std::abs(en.en_total - 4.3281) <= 1e-3;
    return {ok, fmt("t=%.0f en_plus=%.3e en_total=%.6f", t, en.en_plus, en.en_total)};
}

Outcome weak_thermal() {
    auto c = point(1.0, 0.05, 0.1);
    const SteadyState steady = limit_states(c, {0.1}).front();
    const double r = c.model.r;
    const double sigma_inf = steady.u_inf_abs * steady.u_inf_abs * std::cosh(r) * std::sinh(r);
    ModeMoments m;
    m.n = steady.u_inf_abs * steady.u_inf_abs * std::sinh(r) * std::sinh(r) + steady.v_inf;
    m.sigma = -sigma_inf;
    const double lhs = -std::log2(2.0 * symplectic_min(m));
    const double v_oracle = oracle_steady_v(c, 0.1, 1000);
    const double rhs = -std::log(1.0 + 2.0 * v_oracle) / (2.0 * kLn2);

    // Late-time oracle trajectory stays close to the same steady value.
    const DiscretizedBath discrete = discretize(bath_of(c), 2000, bath_of(c).omega_max());
    ExactPropagator exact(discrete, c.model);
    std::vector<double> times;
    for (double t = 50.0; t <= std::min(69.0, exact.valid_until()); t += 0.05) times.push_back(t);
    const OracleSeries late = exact.evolve(times, 0.1);
    double mean = 0.0;
    for (double v : late.v) mean += v;
    mean /= static_cast<double>(late.v.size());

    const bool ok = steady.v_inf > 0.0 && sigma_inf < 1e-6 && std::abs(lhs - rhs) <= 1e-6 && steady.converged;
    return {ok, fmt("v_inf=%.9f oracle=%.9f |sigma_inf|=%.1e identity diff=%.2e (oracle t-average %.6f)",
                    steady.v_inf, v_oracle, sigma_inf, std::abs(lhs - rhs), mean)};
}

Outcome strong_plateau() {
    auto c = point(0.5, 0.3);
    const auto modes = find_localized_modes(c.model, bath_of(c));
    if (modes.modes.size() != 1) return {false, "expected one localized mode"};
    const double z = modes.modes[0].residue;
    const SteadyState win = window_states(c, {0.0}).front();
    const double r = c.model.r;
    ModeMoments m;
    m.n = z * z * std::sinh(r) * std::sinh(r);
    m.sigma = -z * z * std::cosh(r) * std::sinh(r);
    m.gap = 0.5 + 0.5 * z * z * std::expm1(-2.0 * r);
    const double en_z = log_negativity(symplectic_min(m));
    const double du = std::abs(win.u_inf_abs - z) / z;
    const double den = std::abs(win.en_inf - en_z) / en_z;
    const bool ok = du <= 0.01 && den <= 0.01;
    return {ok, fmt("Z=%.6f tail |u|=%.6f (%.2e) E_N(Z)=%.6f evolved=%.6f (%.2e)", z, win.u_inf_abs, du, en_z,
                    win.en_inf, den)};
}

Outcome from_checks(const std::vector<ValidationCheck>& checks) {
    double worst = 0.0;
    std::string failed;
    for (const auto& c : checks) {
        worst = std::max(worst, c.value / c.tolerance);
        if (!c.passed) failed += " " + c.metric;
    }
    return {failed.empty() && !checks.empty(),
            fmt("%zu checks, worst value/tolerance=%.3f%s", checks.size(), worst,
                failed.empty() ? "" : (" failed:" + failed).c_str())};
}

Outcome initial_identities() {
    auto c = point(0.5, 0.05);
    const double r = c.model.r;
    const TimeGrid grid = TimeGrid::covering(c.solver.dt, 1.0);
    const GreensSeries series = evolve_greens(c, grid);
    const auto plus = center_moments(series.u.front(), series.v.front(), r);
    const auto minus = relative_moments(r, c.model.omega_minus, 0.0);
    const auto sq = squeeze_parameter(plus);
    const auto en = entanglement(plus, minus, r);
    const double lambda = symplectic_min(plus);
    const double worst = std::max({
        std::abs(lambda - std::exp(-r) / 2.0),
        std::abs(sq.thermal_occupation),
        std::abs(sq.magnitude - r),
        std::abs(en.en_plus - r / kLn2),
        std::abs(en.en_minus - r / kLn2),
        std::abs(en.en_naive - 2.0 * r / kLn2),
    });
    return {worst <= 1e-10, fmt("largest deviation %.2e", worst)};
}

Outcome naive_pitfall() {
    auto c = point(1.0, 0.05, 0.1);
    const SteadyState steady = limit_states(c, {0.1}).front();
    const double r = c.model.r;
    ModeMoments plus;
    plus.n = steady.v_inf;
    plus.sigma = 0.0;
    const auto minus = relative_moments(r, c.model.omega_minus, 1e3);
    const auto en = entanglement(plus, minus, r);
    const double gap = r / kLn2 - en.en_naive;
    const bool ok = gap > 0.0 && en.en_total == r / kLn2;
    return {ok, fmt("naive=%.9f additive=%.9f r/ln2=%.9f gap=%.3e", en.en_naive, en.en_total, r / kLn2, gap)};
}

Outcome phase_diagram() {
    const SweepGrid grid{{0.02, 0.59, 20}, {0.5, 2.0, 10}, {0.0, 0.35, 8}};
    const Configuration base = point(0.5, 0.05);
    const auto points = run_sweep(grid, base, workers());
    const auto etas = grid.eta.values();
    const auto ss = grid.s.values();
    const auto ts = grid.temperature.values();

    int bad_a = 0, bad_b = 0, bad_c = 0, unconverged = 0;
    std::vector<double> first_iii(ss.size(), std::numeric_limits<double>::infinity());
    for (std::size_t is = 0; is < ss.size(); ++is) {
        const double eta_c = critical_coupling(ss[is], base.model.omega_plus, base.spectral.omega_c);
        for (std::size_t ie = 0; ie < etas.size(); ++ie) {
            for (std::size_t it = 0; it < ts.size(); ++it) {
                const auto& p = points[grid.index(ie, is, it)];
                if (!p.converged) ++unconverged;
                if (etas[ie] < eta_c) {
                    if (p.phase != Phase::I || !(p.en_inf < 1e-3)) ++bad_a;
                    continue;
                }
                if (it == 0 && p.phase != Phase::II) ++bad_b;
                if (it > 0 && p.en_inf > points[grid.index(ie, is, it - 1)].en_inf) ++bad_c;
                if (p.phase == Phase::III) first_iii[is] = std::min(first_iii[is], ts[it]);
            }
        }
    }
    const double lowest = *std::min_element(first_iii.begin(), first_iii.end());
    const bool d_ok = std::isfinite(first_iii.front()) && first_iii.front() == lowest &&
                      first_iii.front() < first_iii.back();
    const bool ok = bad_a == 0 && bad_b == 0 && bad_c == 0 && d_ok && unconverged == 0;
    return {ok, fmt("%zu points; (a) %d bad (b) %d bad (c) %d bad (d) first III at T=%.3f for s=%.2f vs T=%.3f "
                    "for s=%.2f; unconverged %d",
                    points.size(), bad_a, bad_b, bad_c, first_iii.front(), ss.front(), first_iii.back(), ss.back(),
                    unconverged)};
}

Outcome thermal_ridge() {
    const double cell = 0.01;
    const SweepGrid grid{{0.01, 0.6, 60}, {0.2, 2.0, 10}, {0.1, 0.1, 1}};
    const Configuration base = point(0.5, 0.05);
    const auto points = run_sweep(grid, base, workers());
    const auto etas = grid.eta.values();
    const auto ss = grid.s.values();
    double worst = 0.0;
    for (std::size_t is = 0; is < ss.size(); ++is) {
        std::size_t best = 0;
        for (std::size_t ie = 1; ie < etas.size(); ++ie) {
            if (points[grid.index(ie, is, 0)].v_inf > points[grid.index(best, is, 0)].v_inf) best = ie;
        }
        const double eta_c = critical_coupling(ss[is], base.model.omega_plus, base.spectral.omega_c);
        worst = std::max(worst, std::abs(etas[best] - eta_c) / cell);
    }
    return {worst <= 1.0, fmt("%zu values of s, largest |argmax - eta_c| = %.2f cells", ss.size(), worst)};
}

} // namespace

int main() {
    struct Criterion {
        int id;
        std::function<Outcome()> run;
    };
    ValidationOptions vo;
    const std::vector<Criterion> criteria = {
        {1, critical_coupling_check},
        {2, weak_zero_temperature},
        {3, weak_thermal},
        {4, strong_plateau},
        {5, [&] { return from_checks(route_suite(vo)); }},
        {6, [&] { return from_checks(oracle_suite(vo)); }},
        {7, initial_identities},
        {8, naive_pitfall},
        {9, phase_diagram},
        {10, thermal_ridge},
    };

    int failures = 0;
    for (const auto& c : criteria) {
        const auto start = std::chrono::steady_clock::now();
        Outcome out;
        try {
            out = c.run();
        } catch (const std::exception& e) {
            out = {false, std::string("exception: ") + e.what()};
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        std::printf("criterion %2d: %s (%.1fs) %s\n", c.id, out.passed ? "PASS" : "FAIL", secs, out.detail.c_str());
        std::fflush(stdout);
        if (!out.passed) ++failures;
    }
    return failures == 0 ? 0 : 1;
}
