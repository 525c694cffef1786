#include "nlll/spectral.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <numbers>
#include <string>
#include <thread>

#include "nlll/errors.hpp"
#include "nlll/formfactors.hpp"
#include "nlll/log_signed.hpp"

namespace nlll {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr std::int64_t kRowsPerBlock = 64;
// Nominal fit window hi/lo. Slightly above ten so that the whole bins kept
// inside it still span a full decade.
constexpr double kWindowRatio = 11.0;

bool is_density(const ChannelSpec& c) {
    return c.kind() == ChannelKind::Density2pfParticle || c.kind() == ChannelKind::Density2pfHole;
}

// The 2p_F density channels carry an explicit 2pi relative to the fermion
// normalization convention.
double channel_factor(const ChannelSpec& c) { return is_density(c) ? kTwoPi : 1.0; }

ExponentSet usable_exponents(const ChannelSpec& channel, const LuttingerParams& params) {
    params.validate();
    ExponentSet e = exponents_for_channel(channel, params.xi);
    e.require_nondegenerate();
    return e;
}

void check_k(double k) {
    if (!(k > 0.0) || !std::isfinite(k)) throw DomainError("k must be a finite positive number");
}

// Everything in the continuum form except the |domega| dependence and the
// side factor sin(pi d^2).
double continuum_prefactor(const ChannelSpec& channel, const ExponentSet& e, double k,
                           const LuttingerParams& params) {
    const ThresholdVelocities vel = threshold_velocities(e, k, params);
    const double ae = e.effective_a();
    const LogSigned g = log_gamma(ae);
    double log_pref = (1.0 - e.alpha) * std::log(kTwoPi) + (2.0 * ae - 2.0) * std::log(k) -
                      2.0 * g.log_abs + std::log(params.normalization(e.alpha)) -
                      e.d1sq() * std::log(vel.c1) - e.d2sq() * std::log(vel.c2);
    if (e.hole_type()) {
        log_pref -= log_gamma(e.d1sq() + e.d2sq()).log_abs;
    } else {
        log_pref += log_gamma(e.mu).log_abs - std::log(std::numbers::pi);
    }
    return std::exp(log_pref) * channel_factor(channel);
}

void require_particle_mu(const ExponentSet& e) {
    if (!(e.mu > 0.0))
        throw DomainError("mu = 1 - d1^2 - d2^2 = " + std::to_string(e.mu) +
                          " <= 0: the particle threshold has no integrable singularity");
}

// Log-spaced magnitudes starting at spacing/2, each snapped to a half-step of
// `spacing` so that edges fall midway between teeth of the comb
// spacing * integer. Collapsed duplicates are dropped.
std::vector<double> side_layout(double spacing, double reach, int bins_per_decade) {
    std::vector<double> e;
    const double inner = 0.5 * spacing;
    for (int j = 0;; ++j) {
        const double x = inner * std::pow(10.0, static_cast<double>(j) / bins_per_decade);
        const double snapped = (std::round(x / spacing - 0.5) + 0.5) * spacing;
        if (e.empty() || snapped > e.back()) e.push_back(snapped);
        if (snapped >= reach + 0.5 * spacing) break;
    }
    return e;
}

struct Geometry {
    ExponentSet exps;
    ThresholdVelocities vel;
    // Side layouts in units of the level spacing 2pi/L, as magnitudes.
    std::vector<double> below;
    std::vector<double> above;
    double reach_below = 0.0;
    double reach_above = 0.0;
};

Geometry geometry(const ChannelSpec& channel, double k, const LuttingerParams& params,
                  std::int64_t qmax, int bins_per_decade) {
    Geometry g;
    g.exps = usable_exponents(channel, params);
    g.vel = threshold_velocities(g.exps, k, params);
    const double c1 = g.vel.c1, c2 = g.vel.c2;
    const double q = static_cast<double>(qmax);
    if (g.exps.hole_type()) {
        const double spacing = g.exps.d2sq() <= g.exps.d1sq() ? c1 : c2;
        g.reach_above = (c1 + c2) * q;
        g.above = side_layout(spacing, g.reach_above, bins_per_decade);
        g.below = g.above;
    } else {
        g.reach_below = c1 * q;
        g.reach_above = c2 * q;
        g.below = side_layout(c1, g.reach_below, bins_per_decade);
        g.above = side_layout(c2, g.reach_above, bins_per_decade);
    }
    return g;
}

struct Partial {
    std::vector<double> sums;
    double below = 0.0;
    double above = 0.0;

    Partial& operator+=(const Partial& o) {
        for (std::size_t i = 0; i < sums.size(); ++i) sums[i] += o.sums[i];
        below += o.below;
        above += o.above;
        return *this;
    }
};

} // namespace

double Histogram::centre(std::size_t i) const {
    const double a = edges[i], b = edges[i + 1];
    if (a < 0.0 && b > 0.0) return 0.0;
    if (a == 0.0 || b == 0.0) return 0.5 * (a + b);
    const double c = std::sqrt(std::fabs(edges[i]) * std::fabs(edges[i + 1]));
    return a < 0.0 ? -c : c;
}

std::optional<std::size_t> Histogram::find(double domega) const {
    if (edges.empty() || domega < edges.front() || domega >= edges.back()) return std::nullopt;
    const auto it = std::upper_bound(edges.begin(), edges.end(), domega);
    return static_cast<std::size_t>(it - edges.begin()) - 1;
}

unsigned worker_count() {
    unsigned n = std::max(1u, std::thread::hardware_concurrency());
    if (const char* env = std::getenv("NLLL_THREADS")) {
        char* end = nullptr;
        const long cap = std::strtol(env, &end, 10);
        if (end != env && cap >= 1) n = std::min<unsigned>(n, static_cast<unsigned>(cap));
    }
    return n;
}

Histogram finite_L_sum(const ChannelSpec& channel, double k, const LuttingerParams& params,
                       std::int64_t qmax, const HistogramSpec& spec) {
    check_k(k);
    if (qmax < 10) throw DomainError("qmax must be at least 10");
    if (spec.bins_per_decade < 1) throw DomainError("bins_per_decade must be positive");
    const Geometry g = geometry(channel, k, params, qmax, spec.bins_per_decade);
    const ExponentSet& e = g.exps;
    const double c1 = g.vel.c1, c2 = g.vel.c2;
    const double sign1 = e.hole_type() ? 1.0 : -1.0;

    // Full edge list in level units: mirrored lower side, then upper side.
    std::vector<double> level_edges;
    for (auto it = g.below.rbegin(); it != g.below.rend(); ++it) level_edges.push_back(-*it);
    // Hole-type weight starts at domega = 0, so an edge sits exactly there and
    // the threshold bin is [0, inner).
    if (e.hole_type()) level_edges.push_back(0.0);
    level_edges.insert(level_edges.end(), g.above.begin(), g.above.end());
    const std::size_t nbins = level_edges.size() - 1;
    const std::size_t threshold_bin = g.below.size() - (e.hole_type() ? 0 : 1);

    const double kbar = params.L * k / kTwoPi;
    const double f = smooth_factor_f(kbar, e.effective_a());
    const double norm = params.L * f * f * params.normalization(e.alpha) /
                        std::pow(params.L, e.alpha) * channel_factor(channel);

    std::vector<double> w1(static_cast<std::size_t>(qmax) + 1), w2(w1.size());
    for (std::int64_t q = 0; q <= qmax; ++q) {
        w1[static_cast<std::size_t>(q)] = sum_rule_closed(q, e.d1sq());
        w2[static_cast<std::size_t>(q)] = sum_rule_closed(q, e.d2sq());
    }

    const std::size_t blocks =
        static_cast<std::size_t>((qmax + kRowsPerBlock) / kRowsPerBlock);
    std::vector<Partial> partials(blocks);
    std::atomic<std::size_t> next{0};

    auto work = [&] {
        for (std::size_t b; (b = next.fetch_add(1)) < blocks;) {
            Partial& part = partials[b];
            part.sums.assign(nbins, 0.0);
            const std::int64_t first = static_cast<std::int64_t>(b) * kRowsPerBlock;
            const std::int64_t last = std::min(qmax, first + kRowsPerBlock - 1);
            for (std::int64_t q1 = first; q1 <= last; ++q1) {
                const double a1 = w1[static_cast<std::size_t>(q1)];
                for (std::int64_t q2 = 0; q2 <= qmax; ++q2) {
                    const double x = sign1 * c1 * static_cast<double>(q1) +
                                     c2 * static_cast<double>(q2);
                    const double w = a1 * w2[static_cast<std::size_t>(q2)];
                    if (x < 0.0) part.below += w;
                    else if (x > 0.0) part.above += w;
                    const auto it =
                        std::upper_bound(level_edges.begin(), level_edges.end(), x);
                    part.sums[static_cast<std::size_t>(it - level_edges.begin()) - 1] += w;
                }
            }
        }
    };
    const unsigned nthreads = std::min<unsigned>(worker_count(), static_cast<unsigned>(blocks));
    std::vector<std::thread> pool;
    for (unsigned t = 1; t < nthreads; ++t) pool.emplace_back(work);
    work();
    for (auto& t : pool) t.join();

    // Pairwise merge by block index, independent of which thread did what.
    for (std::size_t stride = 1; stride < blocks; stride *= 2)
        for (std::size_t i = 0; i + stride < blocks; i += 2 * stride)
            partials[i] += partials[i + stride];

    const double unit = kTwoPi / params.L;
    Histogram h;
    h.edges.reserve(level_edges.size());
    for (double x : level_edges) h.edges.push_back(x * unit);
    h.weights.resize(nbins);
    for (std::size_t i = 0; i < nbins; ++i)
        h.weights[i] = partials[0].sums[i] * norm / (h.edges[i + 1] - h.edges[i]);
    h.threshold_bin = threshold_bin;
    h.weight_below = partials[0].below * norm;
    h.weight_above = partials[0].above * norm;
    h.reach_below = g.reach_below * unit;
    h.reach_above = g.reach_above * unit;
    return h;
}

double continuum_at(const ChannelSpec& channel, double k, double domega,
                    const LuttingerParams& params) {
    check_k(k);
    const ExponentSet e = usable_exponents(channel, params);
    if (e.hole_type()) {
        if (!(domega > 0.0)) return 0.0;
        const double s = e.d1sq() + e.d2sq();
        return continuum_prefactor(channel, e, k, params) * std::pow(domega, s - 1.0);
    }
    require_particle_mu(e);
    if (domega == 0.0) throw DomainError("the particle continuum form diverges at domega = 0");
    const double side = std::sin(std::numbers::pi * (domega > 0.0 ? e.d2sq() : e.d1sq()));
    return continuum_prefactor(channel, e, k, params) * side / std::pow(std::fabs(domega), e.mu);
}

double continuum_bin_average(const ChannelSpec& channel, double k, double lo, double hi,
                             const LuttingerParams& params) {
    check_k(k);
    if (!(lo < hi)) throw DomainError("bin average needs lo < hi");
    const ExponentSet e = usable_exponents(channel, params);
    const double pref = continuum_prefactor(channel, e, k, params);
    // Integral of x^(p-1) over [a, b], 0 <= a < b.
    auto power_integral = [](double a, double b, double p) {
        return (std::pow(b, p) - std::pow(a, p)) / p;
    };
    double integral = 0.0;
    if (e.hole_type()) {
        if (hi > 0.0) integral = power_integral(std::max(lo, 0.0), hi, e.d1sq() + e.d2sq());
    } else {
        require_particle_mu(e);
        const double p = 1.0 - e.mu;
        if (hi > 0.0)
            integral += std::sin(std::numbers::pi * e.d2sq()) *
                        power_integral(std::max(lo, 0.0), hi, p);
        if (lo < 0.0)
            integral += std::sin(std::numbers::pi * e.d1sq()) *
                        power_integral(std::max(-hi, 0.0), -lo, p);
    }
    return pref * integral / (hi - lo);
}

double domega_of(const ChannelSpec& channel, double omega, double k,
                 const LuttingerParams& params) {
    const double eps = threshold_energy(channel, k, params);
    return (channel.omega_sign() == OmegaSign::Positive ? omega : -omega) - eps;
}

double omega_of(const ChannelSpec& channel, double domega, double k,
                const LuttingerParams& params) {
    const double x = threshold_energy(channel, k, params) + domega;
    return channel.omega_sign() == OmegaSign::Positive ? x : -x;
}

namespace {

SpectralPoint continuum_point(double omega, double k, const LuttingerParams& params,
                              const ChannelSpec& channel, bool want_hole) {
    const ExponentSet e = usable_exponents(channel, params);
    if (e.hole_type() != want_hole)
        throw DomainError(channel.name() + (want_hole ? " is not a hole-type channel"
                                                      : " is not a particle-type channel"));
    SpectralPoint pt;
    pt.omega = omega;
    pt.k = k;
    pt.domega = domega_of(channel, omega, k, params);
    pt.a_value = continuum_at(channel, k, pt.domega, params);
    return pt;
}

} // namespace

SpectralPoint continuum_particle(double omega, double k, const LuttingerParams& params,
                                 const ChannelSpec& channel) {
    return continuum_point(omega, k, params, channel, false);
}

SpectralPoint continuum_hole(double omega, double k, const LuttingerParams& params,
                             const ChannelSpec& channel) {
    return continuum_point(omega, k, params, channel, true);
}

double dsf_step(double omega, double k, const LuttingerParams& params) {
    params.validate();
    check_k(k);
    const double lo = dispersion(Branch::Lower, k, params);
    const double hi = dispersion(Branch::Upper, k, params);
    return (omega >= lo && omega <= hi) ? params.m_eff / (k * params.xi) : 0.0;
}

double prefactor_from_c0(double c0, double alpha) { return c0 * std::exp2(alpha - 1.0); }

double c0_from_prefactor(double ff_norm, double alpha) { return ff_norm * std::exp2(1.0 - alpha); }

double kdep_formfactor(double k, const LuttingerParams& params, double a, double alpha) {
    check_k(k);
    params.validate();
    const LogSigned g = log_gamma(a);
    return std::exp((2.0 * a - 2.0) * std::log(k) +
                    (2.0 - 2.0 * a) * std::log(kTwoPi / params.L) - 2.0 * g.log_abs -
                    alpha * std::log(params.L)) *
           params.normalization(alpha);
}

double continuum_particle_from_kdep(const ChannelSpec& channel, double k, double domega,
                                    const LuttingerParams& params) {
    check_k(k);
    const ExponentSet e = usable_exponents(channel, params);
    if (e.hole_type()) throw DomainError(channel.name() + " is not a particle-type channel");
    require_particle_mu(e);
    if (domega == 0.0) throw DomainError("the particle continuum form diverges at domega = 0");
    const ThresholdVelocities vel = threshold_velocities(e, k, params);
    const double ff = kdep_formfactor(k, params, e.a, e.alpha);
    // L^alpha (L/2pi)^(2-2a) |<k|psi+|0>|^2 replaces k^(2a-2) ff_norm / Gamma^2(a).
    const double absorbed =
        ff * std::exp(e.alpha * std::log(params.L) + (2.0 - 2.0 * e.a) * std::log(params.L / kTwoPi));
    const double side = std::sin(std::numbers::pi * (domega > 0.0 ? e.d2sq() : e.d1sq()));
    return std::pow(kTwoPi, 1.0 - e.alpha) / std::numbers::pi * std::tgamma(e.mu) * absorbed /
           (std::pow(vel.c1, e.d1sq()) * std::pow(vel.c2, e.d2sq())) * side /
           std::pow(std::fabs(domega), e.mu) * channel_factor(channel);
}

double PowerLawFit::at(double x) const { return std::exp(intercept + slope * std::log(x)); }

PowerLawFit fit_power_law(const Histogram& h, bool below, double lo, double hi) {
    // Side bins ordered outward from the threshold.
    std::vector<std::size_t> order;
    if (below) {
        for (std::size_t i = h.threshold_bin; i-- > 0;) order.push_back(i);
    } else {
        for (std::size_t i = h.threshold_bin + 1; i < h.size(); ++i) order.push_back(i);
    }
    double sw = 0, sx = 0, sy = 0, sxx = 0, sxy = 0;
    PowerLawFit fit;
    fit.lo = hi;
    fit.hi = lo;
    for (std::size_t n = 2; n < order.size(); ++n) {
        const std::size_t i = order[n];
        const double a = std::fabs(h.lower(i)), b = std::fabs(h.upper(i));
        const double inner = std::min(a, b), outer = std::max(a, b);
        if (inner < lo || outer > hi || !(h.weights[i] > 0.0)) continue;
        const double w = std::log(outer / inner);
        const double x = 0.5 * std::log(inner * outer);
        const double y = std::log(h.weights[i]);
        sw += w;
        sx += w * x;
        sy += w * y;
        sxx += w * x * x;
        sxy += w * x * y;
        fit.lo = std::min(fit.lo, inner);
        fit.hi = std::max(fit.hi, outer);
        ++fit.bins;
    }
    if (fit.bins < 3)
        throw DomainError("power-law fit window [" + std::to_string(lo) + ", " +
                          std::to_string(hi) + "] holds fewer than three bins");
    const double det = sw * sxx - sx * sx;
    fit.slope = (sw * sxy - sx * sy) / det;
    fit.intercept = (sy - fit.slope * sx) / sw;
    return fit;
}

ThresholdAnalysis analyze_threshold(const ChannelSpec& channel, double k,
                                    const LuttingerParams& params, std::int64_t qmax,
                                    const Histogram& h) {
    ThresholdAnalysis out;
    out.exponents = usable_exponents(channel, params);
    const ExponentSet& e = out.exponents;
    const ThresholdVelocities vel = threshold_velocities(e, k, params);
    const double unit = kTwoPi / params.L;
    const double q = static_cast<double>(qmax);
    out.analytic_slope = -(1.0 - e.d1sq() - e.d2sq());

    auto reachable = [&](double hi, double reach) {
        if (hi / kWindowRatio < 4.0 * unit * std::max(vel.c1, vel.c2))
            throw DomainError("qmax = " + std::to_string(qmax) +
                              " is too small for a one-decade fit; reachable |domega| <= " +
                              std::to_string(reach));
        return std::min(hi, 0.9 * reach);
    };

    if (e.hole_type()) {
        const double hi = reachable(0.9 * std::min(vel.c1, vel.c2) * q * unit, h.reach_above);
        out.above = fit_power_law(h, false, hi / kWindowRatio, hi);
        return out;
    }

    require_particle_mu(e);
    // One decade placed geometrically between the largest level spacing and
    // ten times the side's reach; this keeps clear of both the discrete comb
    // near threshold and the qmax truncation.
    const double r = std::max(vel.c1, vel.c2);
    const double hi_below = reachable(std::sqrt(r * vel.c1 * q * 10.0) * unit, h.reach_below);
    const double hi_above = reachable(std::sqrt(r * vel.c2 * q * 10.0) * unit, h.reach_above);
    out.below = fit_power_law(h, true, hi_below / kWindowRatio, hi_below);
    out.above = fit_power_law(h, false, hi_above / kWindowRatio, hi_above);

    const double lo = std::max(out.below->lo, out.above.lo);
    const double hi = std::min(out.below->hi, out.above.hi);
    out.ratio_at = hi > lo ? std::sqrt(lo * hi) : std::sqrt(out.below->hi * out.above.lo);
    out.amplitude_ratio = out.above.at(out.ratio_at) / out.below->at(out.ratio_at);
    out.analytic_ratio =
        std::sin(std::numbers::pi * e.d2sq()) / std::sin(std::numbers::pi * e.d1sq());
    return out;
}

} // namespace nlll
