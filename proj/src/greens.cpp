#include "entdyn/greens.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>

#include <boost/math/quadrature/gauss.hpp>

#include "entdyn/errors.hpp"

namespace entdyn {

namespace {

using cplx = std::complex<double>;

constexpr double kMaxPhasePerStep = 0.06;

// 8-point Gauss-Legendre rule on [0, 1].
struct UnitRule {
    std::array<double, 8> x{};
    std::array<double, 8> w{};
    UnitRule() {
        using Rule = boost::math::quadrature::gauss<double, 8>;
        std::size_t k = 0;
        for (std::size_t i = 0; i < Rule::abscissa().size(); ++i) {
            for (double sign : {1.0, -1.0}) {
                x[k] = 0.5 * (1.0 + sign * Rule::abscissa()[i]);
                w[k] = 0.5 * Rule::weights()[i];
                ++k;
            }
        }
    }
};

const UnitRule& unit_rule() {
    static const UnitRule rule;
    return rule;
}

// Weights W_k = int_0^h L_k(sigma) e^{i w sigma} dsigma for quadratic Lagrange
// bases on nodes {-h, 0, h} (interior) or {0, h, 2h} (first step).
struct FilonWeights {
    std::array<cplx, 3> interior;
    std::array<cplx, 3> start;
};

FilonWeights filon_weights(double omega, double h) {
    const auto& rule = unit_rule();
    FilonWeights fw{};
    for (std::size_t q = 0; q < rule.x.size(); ++q) {
        const double sg = rule.x[q] * h;
        const cplx e = std::polar(rule.w[q] * h, omega * sg);
        const double a = sg / h;
        fw.interior[0] += e * (a * (a - 1.0) / 2.0);
        fw.interior[1] += e * (1.0 - a * a);
        fw.interior[2] += e * (a * (a + 1.0) / 2.0);
        fw.start[0] += e * ((a - 1.0) * (a - 2.0) / 2.0);
        fw.start[1] += e * (a * (2.0 - a));
        fw.start[2] += e * (a * (a - 1.0) / 2.0);
    }
    return fw;
}

// One accumulation pass of v on a fixed frequency mesh. Steps run in the
// outer loop and frequency nodes in the inner one, so the per-node update
// of F(t, w) is a plain structure-of-arrays sweep.
std::vector<RealSeries> accumulate_fluctuations(const ComplexSeries& u, const TimeGrid& grid,
                                                const SpectralDensity& bath, const std::vector<double>& temps,
                                                const quad::FrequencyMesh& mesh, std::size_t first_step) {
    const std::size_t n_steps = grid.n_steps;
    const double h = grid.dt;
    std::vector<RealSeries> v(temps.size(), RealSeries(n_steps + 1, 0.0));

    // Keep only nodes that carry thermal weight at some temperature.
    std::vector<double> omega;
    std::vector<std::vector<double>> factor(temps.size());
    for (std::size_t i = 0; i < mesh.size(); ++i) {
        const double w = mesh.omega[i];
        const double two_j = 2.0 * bath.density(w) * mesh.weight[i];
        bool any = false;
        std::vector<double> f(temps.size(), 0.0);
        for (std::size_t k = 0; k < temps.size(); ++k) {
            f[k] = temps[k] > 0.0 ? two_j * bose_occupation(w, temps[k]) : 0.0;
            any = any || f[k] > 0.0;
        }
        if (!any) continue;
        omega.push_back(w);
        for (std::size_t k = 0; k < temps.size(); ++k) factor[k].push_back(f[k]);
    }
    const std::size_t m = omega.size();
    if (m == 0) return v;

    std::vector<double> wr[3], wi[3];
    for (auto& x : wr) x.resize(m);
    for (auto& x : wi) x.resize(m);
    std::vector<double> fr(m, 0.0), fi(m, 0.0), er(m, 1.0), ei(m, 0.0), sr(m), si(m);
    for (std::size_t i = 0; i < m; ++i) {
        const cplx st = std::polar(1.0, omega[i] * h);
        sr[i] = st.real();
        si[i] = st.imag();
    }

    // First step uses nodes {0, h, 2h}.
    {
        for (std::size_t i = 0; i < m; ++i) {
            const FilonWeights fw = filon_weights(omega[i], h);
            cplx p(0.0, 0.0);
            for (std::size_t k = 0; k < 3; ++k) p += fw.start[k] * u[k];
            fr[i] = p.real();
            fi[i] = p.imag();
            for (std::size_t k = 0; k < 3; ++k) {
                wr[k][i] = fw.interior[k].real();
                wi[k][i] = fw.interior[k].imag();
            }
            er[i] = sr[i];
            ei[i] = si[i];
        }
        if (1 >= first_step) {
            for (std::size_t k = 0; k < temps.size(); ++k) {
                double acc = 0.0;
                for (std::size_t i = 0; i < m; ++i) acc += factor[k][i] * (fr[i] * fr[i] + fi[i] * fi[i]);
                v[k][1] = acc;
            }
        }
    }

    for (std::size_t n = 1; n < n_steps; ++n) {
        if (n % 256 == 0) {
            const double t = grid.time(n);
            for (std::size_t i = 0; i < m; ++i) {
                er[i] = std::cos(omega[i] * t);
                ei[i] = std::sin(omega[i] * t);
            }
        }
        const double u0r = u[n - 1].real(), u0i = u[n - 1].imag();
        const double u1r = u[n].real(), u1i = u[n].imag();
        const double u2r = u[n + 1].real(), u2i = u[n + 1].imag();
        const double* w0r = wr[0].data();
        const double* w0i = wi[0].data();
        const double* w1r = wr[1].data();
        const double* w1i = wi[1].data();
        const double* w2r = wr[2].data();
        const double* w2i = wi[2].data();
        for (std::size_t i = 0; i < m; ++i) {
            const double pr = w0r[i] * u0r - w0i[i] * u0i + w1r[i] * u1r - w1i[i] * u1i + w2r[i] * u2r - w2i[i] * u2i;
            const double pi = w0r[i] * u0i + w0i[i] * u0r + w1r[i] * u1i + w1i[i] * u1r + w2r[i] * u2i + w2i[i] * u2r;
            fr[i] += er[i] * pr - ei[i] * pi;
            fi[i] += er[i] * pi + ei[i] * pr;
            const double ner = er[i] * sr[i] - ei[i] * si[i];
            ei[i] = er[i] * si[i] + ei[i] * sr[i];
            er[i] = ner;
        }
        if (n + 1 >= first_step) {
            for (std::size_t k = 0; k < temps.size(); ++k) {
                const double* fk = factor[k].data();
                double acc = 0.0;
                for (std::size_t i = 0; i < m; ++i) acc += fk[i] * (fr[i] * fr[i] + fi[i] * fi[i]);
                v[k][n + 1] = acc;
            }
        }
    }
    return v;
}

} // namespace

TimeGrid TimeGrid::covering(double dt, double t_max) {
    if (!(dt > 0.0) || !(t_max > 0.0) || !std::isfinite(t_max)) {
        throw ValidationError("grid_invalid", "time grid needs dt > 0 and t_max > 0");
    }
    TimeGrid g;
    g.dt = dt;
    g.n_steps = static_cast<std::size_t>(std::llround(std::ceil(t_max / dt - 1e-9)));
    if (g.n_steps < 2) g.n_steps = 2;
    return g;
}

ComplexSeries propagate_u_trapezoid(const ModelConfig& config, const SpectralDensity& bath, const TimeGrid& grid) {
    const std::size_t n_steps = grid.n_steps;
    const double h = grid.dt;
    const double wp = config.omega_plus;

    // Kernel stored reversed, g_rev[N - k] = g(k h), so the convolution
    // sum over j runs over contiguous memory.
    std::vector<double> gr(n_steps + 1), gi(n_steps + 1);
    for (std::size_t k = 0; k <= n_steps; ++k) {
        const cplx g = bath.memory_kernel(grid.time(k));
        gr[n_steps - k] = g.real();
        gi[n_steps - k] = g.imag();
    }
    const cplx g0(gr[n_steps], gi[n_steps]);

    std::vector<double> ur(n_steps + 1, 0.0), ui(n_steps + 1, 0.0);
    ur[0] = 1.0;

    const cplx denom = 1.0 + 0.5 * h * (cplx(0.0, wp) + 0.5 * h * g0);
    const cplx inv_denom = 1.0 / denom;
    cplx r_prev(0.0, 0.0); // R_n: trapezoid sum without the j = n endpoint

    for (std::size_t n = 0; n < n_steps; ++n) {
        const cplx un(ur[n], ui[n]);
        const cplx in = n == 0 ? cplx(0.0, 0.0) : r_prev + 0.5 * h * g0 * un;
        const cplx fn = cplx(0.0, -wp) * un - in;

        // R_{n+1} = h [ g_{n+1} u_0 / 2 + sum_{j=1}^{n} g_{n+1-j} u_j ]
        const std::size_t off = n_steps - n - 1; // g_{n+1-j} = g_rev[off + j]
        double sr = 0.0, si = 0.0;
        const double* grp = gr.data() + off;
        const double* gip = gi.data() + off;
        for (std::size_t j = 1; j <= n; ++j) {
            sr += grp[j] * ur[j] - gip[j] * ui[j];
            si += grp[j] * ui[j] + gip[j] * ur[j];
        }
        const cplx g_last(gr[off], gi[off]);
        const cplx r_next = h * (0.5 * g_last + cplx(sr, si));

        const cplx next = (un + 0.5 * h * fn - 0.5 * h * r_next) * inv_denom;
        ur[n + 1] = next.real();
        ui[n + 1] = next.imag();
        r_prev = r_next;
    }

    ComplexSeries u(n_steps + 1);
    for (std::size_t n = 0; n <= n_steps; ++n) u[n] = cplx(ur[n], ui[n]);
    return u;
}

int volterra_substeps(const ModelConfig& config, const SpectralDensity& bath, double dt) {
    // sqrt(omega_plus^2 + g(0)) is the rms frequency of the spectral function of u.
    const double rms = std::sqrt(config.omega_plus * config.omega_plus + bath.memory_kernel(0.0).real());
    return std::max(1, static_cast<int>(std::ceil(dt * rms / kMaxPhasePerStep - 1e-12)));
}

ComplexSeries propagate_u(const ModelConfig& config, const SpectralDensity& bath, const TimeGrid& grid,
                          bool extrapolate, bool substep) {
    if (bath.params().eta == 0.0) {
        // No memory kernel: free rotation, exactly unimodular.
        ComplexSeries free(grid.size());
        for (std::size_t n = 0; n < free.size(); ++n) free[n] = std::polar(1.0, -config.omega_plus * grid.time(n));
        return free;
    }
    const auto sub = substep ? static_cast<std::size_t>(volterra_substeps(config, bath, grid.dt)) : std::size_t{1};
    const TimeGrid inner{grid.dt / static_cast<double>(sub), grid.n_steps * sub};
    ComplexSeries coarse = propagate_u_trapezoid(config, bath, inner);
    if (extrapolate) {
        const TimeGrid half{inner.dt / 2.0, inner.n_steps * 2};
        const ComplexSeries fine = propagate_u_trapezoid(config, bath, half);
        for (std::size_t n = 0; n < coarse.size(); ++n) {
            coarse[n] = (4.0 * fine[2 * n] - coarse[n]) / 3.0;
        }
    }
    if (sub == 1) return coarse;
    ComplexSeries out(grid.size());
    for (std::size_t n = 0; n < out.size(); ++n) out[n] = coarse[n * sub];
    return out;
}

BranchCutRepresentation::BranchCutRepresentation(const ModelConfig& config, const SpectralDensity& bath,
                                                 const ModeSearch& modes, double t_max, double tol)
    : modes_(modes.modes) {
    const double scale = bath.params().omega_c;
    const double big = bath.omega_max();
    const double s = bath.params().s;
    constexpr double four_pi_sq = 4.0 * std::numbers::pi * std::numbers::pi;

    auto tabulate = [&](int panels, quad::FrequencyMesh& mesh, std::vector<double>& wa) {
        mesh = quad::graded_mesh(scale, big, s, panels);
        wa.resize(mesh.size());
        for (std::size_t i = 0; i < mesh.size(); ++i) {
            const double w = mesh.omega[i];
            const double j = bath.density(w);
            const double d = w - config.omega_plus - bath.self_energy_shift(w);
            wa[i] = mesh.weight[i] * 2.0 * j / (d * d + four_pi_sq * j * j);
        }
    };
    auto probe = [&](const std::vector<double>& wa, const quad::FrequencyMesh& mesh) {
        double total = 0.0;
        cplx late(0.0, 0.0);
        for (std::size_t i = 0; i < mesh.size(); ++i) {
            total += wa[i];
            late += wa[i] * std::polar(1.0, -mesh.omega[i] * t_max);
        }
        return std::pair{total, late};
    };

    int panels = quad::panels_for_nodes(scale, big, 800);
    tabulate(panels, mesh_, weighted_density_);
    auto [total, late] = probe(weighted_density_, mesh_);
    for (int iter = 0; iter < 10; ++iter) {
        panels *= 2;
        quad::FrequencyMesh mesh;
        std::vector<double> wa;
        tabulate(panels, mesh, wa);
        auto [t2, l2] = probe(wa, mesh);
        achieved_ = std::max(std::abs(t2 - total), std::abs(l2 - late));
        mesh_ = std::move(mesh);
        weighted_density_ = std::move(wa);
        total = t2;
        late = l2;
        if (achieved_ < tol) return;
    }
    throw NumericalError("branch-cut integral did not converge under panel doubling", achieved_);
}

std::complex<double> BranchCutRepresentation::branch_integral(double t) const {
    double re = 0.0, im = 0.0;
    for (std::size_t i = 0; i < mesh_.size(); ++i) {
        const double ph = mesh_.omega[i] * t;
        re += weighted_density_[i] * std::cos(ph);
        im -= weighted_density_[i] * std::sin(ph);
    }
    return {re, im};
}

double BranchCutRepresentation::pole_weight() const {
    double z = 0.0;
    for (const auto& m : modes_) z += m.residue;
    return z;
}

double BranchCutRepresentation::sum_rule() const {
    double total = pole_weight();
    for (double w : weighted_density_) total += w;
    return total;
}

std::complex<double> BranchCutRepresentation::operator()(double t) const {
    cplx value = branch_integral(t);
    for (const auto& m : modes_) value += m.residue * std::polar(1.0, -m.frequency * t);
    return value;
}

std::complex<double> u_spectral(const ModelConfig& config, const SpectralDensity& bath, double t) {
    const ModeSearch modes = find_localized_modes(config, bath);
    const BranchCutRepresentation rep(config, bath, modes, std::max(t, 1.0));
    return rep(t);
}

FluctuationResult fluctuation_series(const ComplexSeries& u, const TimeGrid& grid, const SpectralDensity& bath,
                                     const std::vector<double>& temperatures, const FluctuationOptions& options) {
    if (u.size() != grid.size()) {
        throw ValidationError("grid_mismatch", "u series length does not match the time grid");
    }
    for (double t : temperatures) {
        if (!(t >= 0.0) || !std::isfinite(t)) throw ValidationError("temperature_negative", "temperature must be >= 0");
    }
    FluctuationResult result;
    const bool all_zero = std::all_of(temperatures.begin(), temperatures.end(), [](double t) { return t == 0.0; });
    if (all_zero || bath.params().eta == 0.0) {
        result.v.assign(temperatures.size(), RealSeries(grid.size(), 0.0));
        result.converged = true;
        return result;
    }

    const double scale = bath.params().omega_c;
    const double big = bath.omega_max();
    const double s = bath.params().s;
    int panels = quad::panels_for_nodes(scale, big, options.initial_nodes);
    auto mesh = quad::graded_mesh(scale, big, s, panels);
    result.v = accumulate_fluctuations(u, grid, bath, temperatures, mesh, options.first_step);
    result.nodes = mesh.size();

    while (true) {
        panels *= 2;
        mesh = quad::graded_mesh(scale, big, s, panels);
        if (mesh.size() > static_cast<std::size_t>(options.max_nodes)) break;
        auto next = accumulate_fluctuations(u, grid, bath, temperatures, mesh, options.first_step);
        double change = 0.0;
        for (std::size_t k = 0; k < next.size(); ++k) {
            for (std::size_t n = options.first_step; n < next[k].size(); ++n) {
                change = std::max(change, std::abs(next[k][n] - result.v[k][n]));
            }
        }
        result.v = std::move(next);
        result.nodes = mesh.size();
        result.last_change = change;
        if (change < options.tol) {
            result.converged = true;
            break;
        }
    }
    return result;
}

RealSeries compute_v(const SpectralDensity& bath, const BathParams& thermal, const TimeGrid& grid,
                     const ComplexSeries& u, const FluctuationOptions& options) {
    auto result = fluctuation_series(u, grid, bath, {thermal.temperature}, options);
    if (!result.converged) {
        throw NumericalError("fluctuation frequency mesh did not converge", result.last_change);
    }
    return std::move(result.v.front());
}

std::complex<double> thermal_kernel(const SpectralDensity& bath, double temperature, double tau) {
    if (temperature <= 0.0 || bath.params().eta == 0.0) return {0.0, 0.0};
    const auto& p = bath.params();
    const double tol = bath.quadrature().rel_tol;
    const double big = bath.omega_max();
    auto weight = [&](double w) { return bath.density(w) * bose_occupation(w, temperature); };
    auto re = [&](double w) { return weight(w) * std::cos(w * tau); };
    auto im = [&](double w) { return -weight(w) * std::sin(w * tau); };
    // The oscillatory parts may cancel; measure error against the magnitude integral.
    const double norm = quad::integrate_from_origin(weight, big, p.s, p.omega_c, tol);
    const double abs_tol = 1e-10 * norm;
    return 2.0 * cplx(quad::integrate_from_origin(re, big, p.s, p.omega_c, tol, abs_tol),
                      quad::integrate_from_origin(im, big, p.s, p.omega_c, tol, abs_tol));
}

RealSeries compute_v_direct(const SpectralDensity& bath, const BathParams& thermal, const TimeGrid& grid,
                            const ComplexSeries& u, std::size_t stride) {
    if (u.size() != grid.size()) {
        throw ValidationError("grid_mismatch", "u series length does not match the time grid");
    }
    const std::size_t n_steps = grid.n_steps;
    RealSeries v(n_steps + 1, std::numeric_limits<double>::quiet_NaN());
    if (stride == 0) stride = 1;
    if (thermal.temperature <= 0.0) {
        std::fill(v.begin(), v.end(), 0.0);
        return v;
    }
    std::vector<cplx> lag(n_steps + 1);
    for (std::size_t k = 0; k <= n_steps; ++k) lag[k] = thermal_kernel(bath, thermal.temperature, grid.time(k));
    auto gt = [&](std::ptrdiff_t d) { return d >= 0 ? lag[static_cast<std::size_t>(d)] : std::conj(lag[static_cast<std::size_t>(-d)]); };

    const double h = grid.dt;
    v[0] = 0.0;
    for (std::size_t n = stride; n <= n_steps; n += stride) {
        cplx total(0.0, 0.0);
        for (std::size_t a = 0; a <= n; ++a) {
            const double ca = (a == 0 || a == n) ? 0.5 : 1.0;
            cplx inner(0.0, 0.0);
            for (std::size_t b = 0; b <= n; ++b) {
                const double cb = (b == 0 || b == n) ? 0.5 : 1.0;
                inner += cb * gt(static_cast<std::ptrdiff_t>(b) - static_cast<std::ptrdiff_t>(a)) * std::conj(u[b]);
            }
            total += ca * u[a] * inner;
        }
        v[n] = h * h * total.real();
    }
    return v;
}

double cross_check_v(const RealSeries& frequency_route, const RealSeries& direct_route, double tol) {
    double worst = 0.0;
    const std::size_t n = std::min(frequency_route.size(), direct_route.size());
    for (std::size_t i = 0; i < n; ++i) {
        if (std::isnan(direct_route[i])) continue;
        worst = std::max(worst, std::abs(frequency_route[i] - direct_route[i]));
    }
    if (worst > tol) {
        throw ConsistencyError("frequency-domain and double-time fluctuation routes disagree", worst);
    }
    return worst;
}

GreensSeries evolve_greens(const Configuration& config, const TimeGrid& grid) {
    const SpectralDensity bath(config.spectral, {config.solver.omega_max_factor, config.solver.quad_rel_tol});
    GreensSeries out;
    out.grid = grid;
    out.u = propagate_u(config.model, bath, grid, config.solver.extrapolate);
    FluctuationOptions opts;
    opts.initial_nodes = config.solver.freq_nodes;
    opts.max_nodes = config.solver.max_freq_nodes;
    opts.tol = config.solver.v_tol;
    out.v = compute_v(bath, config.bath, grid, out.u, opts);
    return out;
}

} // namespace entdyn
