#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <numbers>

#include "nlll/errors.hpp"
#include "nlll/formfactors.hpp"
#include "nlll/spectral.hpp"

using namespace nlll;

namespace {

constexpr double kPi = std::numbers::pi;

LuttingerParams unit_params(double xi) {
    LuttingerParams p;
    p.xi = xi;
    p.v = 1.0;
    p.m_eff = 1.0;
    p.L = 2 * kPi * 1000;
    return p;
}

double rel(double x, double y) { return std::fabs(x / y - 1.0); }

// sum_{q=0}^{Q} Gamma(d+q)/(Gamma(q+1)Gamma(d)) = Gamma(d+Q+1)/(Gamma(Q+1)Gamma(d+1)).
double truncated_sum(double d, std::int64_t q) {
    return std::exp(std::lgamma(d + q + 1) - std::lgamma(q + 1.0) - std::lgamma(d + 1));
}

} // namespace

TEST_CASE("histogram holds the whole finite-size weight") {
    const auto p = unit_params(2.0);
    const std::int64_t qmax = 300;
    for (ChannelKind kind : {ChannelKind::FermionParticle, ChannelKind::FermionHole,
                             ChannelKind::Density2pfHole}) {
        const ChannelSpec ch(kind);
        const double k = 0.7071067811865476;
        const Histogram h = finite_L_sum(ch, k, p, qmax);
        const auto e = exponents_for_channel(ch, p.xi);
        double binned = 0.0;
        for (std::size_t i = 0; i < h.size(); ++i) binned += h.weights[i] * (h.upper(i) - h.lower(i));

        // Oracle: independent assembly of L f^2 N sum F sum F.
        const double kbar = p.L * k / (2 * kPi);
        const double ae = e.effective_a();
        const double f = std::exp(std::lgamma(kbar + ae) - std::lgamma(kbar + 1)) / std::tgamma(ae);
        double total = p.L * f * f * p.normalization(e.alpha) / std::pow(p.L, e.alpha) *
                       truncated_sum(e.d1sq(), qmax) * truncated_sum(e.d2sq(), qmax);
        if (kind == ChannelKind::Density2pfHole) total *= 2 * kPi;
        // lgamma near kbar ~ 700 carries ~1e-13 absolute error, doubled by f^2.
        CHECK(rel(binned, total) < 1e-11);
        // The (0,0) term is the only point exactly at threshold.
        const double centre_weight = total / (truncated_sum(e.d1sq(), qmax) * truncated_sum(e.d2sq(), qmax));
        CHECK(h.weight_below + h.weight_above + centre_weight ==
              doctest::Approx(total).epsilon(1e-11));
    }
}

TEST_CASE("hole channels put no weight below threshold") {
    for (double xi : {0.5, 2.0}) {
        const auto p = unit_params(xi);
        for (ChannelSpec ch : {ChannelSpec(ChannelKind::FermionHole),
                               ChannelSpec(ChannelKind::FermionLeftHole),
                               ChannelSpec(ChannelKind::Density2pfHole),
                               ChannelSpec(ChannelKind::BosonHole)}) {
            const Histogram h = finite_L_sum(ch, 1.0, p, 500);
            CHECK(h.weight_below == 0.0);
            CHECK(h.lower(h.threshold_bin) == 0.0);
            for (std::size_t i = 0; i < h.size(); ++i)
                if (h.upper(i) <= 0.0) CHECK(h.weights[i] == 0.0);
            CHECK(continuum_at(ch, 1.0, -0.01, p) == 0.0);
            CHECK(continuum_at(ch, 1.0, 0.0, p) == 0.0);
        }
    }
}

TEST_CASE("bin edges are snapped between the comb teeth") {
    const auto p = unit_params(2.0);
    const Histogram h = finite_L_sum(ChannelSpec(ChannelKind::FermionParticle), 1.0, p, 400);
    const double unit = 2 * kPi / p.L;
    // Upper side: C2 = 3 level units. Every edge is a half-odd multiple of it.
    for (std::size_t i = h.threshold_bin + 1; i < h.edges.size(); ++i) {
        const double x = h.edges[i] / (3.0 * unit);
        CHECK(std::fabs(x - std::floor(x) - 0.5) < 1e-9);
    }
    for (std::size_t i = 1; i < h.edges.size(); ++i) CHECK(h.edges[i] > h.edges[i - 1]);
    CHECK(h.lower(h.threshold_bin) < 0.0);
    CHECK(h.upper(h.threshold_bin) > 0.0);
    for (double w : h.weights) CHECK(w >= 0.0);
}

TEST_CASE("result does not depend on the worker count") {
    const auto p = unit_params(2.0);
    const ChannelSpec ch(ChannelKind::FermionParticle);
    ::setenv("NLLL_THREADS", "1", 1);
    CHECK(worker_count() == 1);
    const Histogram a = finite_L_sum(ch, 1.0, p, 700);
    ::setenv("NLLL_THREADS", "4", 1);
    const Histogram b = finite_L_sum(ch, 1.0, p, 700);
    ::unsetenv("NLLL_THREADS");
    CHECK(a.edges == b.edges);
    CHECK(a.weights == b.weights);
    CHECK(a.weight_below == b.weight_below);
}

TEST_CASE("fermion threshold exponents at xi = 2") {
    const auto p = unit_params(2.0);
    for (ChannelKind kind : {ChannelKind::FermionParticle, ChannelKind::FermionHole}) {
        const ChannelSpec ch(kind);
        const Histogram h = finite_L_sum(ch, 1.0, p, 2000);
        const auto an = analyze_threshold(ch, 1.0, p, 2000, h);
        CHECK(an.above.hi / an.above.lo >= 10.0);
        CHECK(rel(an.above.slope, an.analytic_slope) < 0.03);
        if (an.below) {
            CHECK(an.below->hi / an.below->lo >= 10.0);
            CHECK(rel(an.below->slope, an.analytic_slope) < 0.03);
            CHECK(rel(*an.amplitude_ratio, *an.analytic_ratio) < 0.05);
        }
    }
}

TEST_CASE("finite-size bins follow the continuum inside the fit window") {
    const auto p = unit_params(2.0);
    const ChannelSpec ch(ChannelKind::FermionParticle);
    const Histogram h = finite_L_sum(ch, 1.0, p, 2000);
    const auto an = analyze_threshold(ch, 1.0, p, 2000, h);
    int checked = 0;
    for (std::size_t i = 0; i < h.size(); ++i) {
        if (i == h.threshold_bin) continue;
        const auto& fit = h.upper(i) <= 0.0 ? *an.below : an.above;
        const double a = std::fabs(h.lower(i)), b = std::fabs(h.upper(i));
        if (std::min(a, b) < fit.lo || std::max(a, b) > fit.hi) continue;
        CHECK(rel(h.weights[i], continuum_bin_average(ch, 1.0, h.lower(i), h.upper(i), p)) < 0.05);
        ++checked;
    }
    CHECK(checked > 100);
}

TEST_CASE("small-mu particle channels converge as qmax grows") {
    // The missing tail beyond the truncation falls off only like
    // (|domega|/reach)^mu here, so the fit error shrinks slowly with qmax.
    const auto p = unit_params(2.0);
    const ChannelSpec ch(ChannelKind::Density2pfParticle);
    double prev = 1e300;
    for (std::int64_t qmax : {1000, 2000, 8000}) {
        const Histogram h = finite_L_sum(ch, 1.0, p, qmax);
        const auto an = analyze_threshold(ch, 1.0, p, qmax, h);
        const double err = rel(an.below->slope, an.analytic_slope);
        CHECK(err < prev);
        prev = err;
    }
}

TEST_CASE("continuum particle form") {
    const auto p = unit_params(2.0);
    const ChannelSpec ch(ChannelKind::FermionParticle);
    const auto e = exponents_for_channel(ch, p.xi);
    const double k = 0.3;
    for (double x : {1e-4, 3e-3, 0.05}) {
        const double up = continuum_at(ch, k, x, p), down = continuum_at(ch, k, -x, p);
        CHECK(up / down ==
              doctest::Approx(std::sin(kPi * e.d2sq()) / std::sin(kPi * e.d1sq())).epsilon(1e-13));
        CHECK(continuum_at(ch, k, 2 * x, p) / up ==
              doctest::Approx(std::pow(2.0, -e.mu)).epsilon(1e-13));
    }
    // Oracle: the formula written out in plain arithmetic.
    const double c1 = k, c2 = 2 + k, x = 0.01;
    const double expect = std::pow(2 * kPi, 1 - e.alpha) / kPi * std::pow(k, 2 * e.a - 2) /
                          std::pow(std::tgamma(e.a), 2) * std::tgamma(e.mu) *
                          p.normalization(e.alpha) /
                          (std::pow(c1, e.d1sq()) * std::pow(c2, e.d2sq())) *
                          std::sin(kPi * e.d2sq()) / std::pow(x, e.mu);
    CHECK(continuum_at(ch, k, x, p) == doctest::Approx(expect).epsilon(1e-12));

    const double eps1 = p.v * k + k * k / 2;
    const SpectralPoint pt = continuum_particle(eps1 + x, k, p, ch);
    CHECK(pt.domega == doctest::Approx(x).epsilon(1e-12));
    CHECK(pt.a_value > 0.0);
    CHECK_THROWS_AS(continuum_particle(eps1, k, p, ch), DomainError);
    CHECK_THROWS_AS(continuum_hole(eps1 + x, k, p, ch), DomainError);
}

TEST_CASE("continuum hole form") {
    const auto p = unit_params(2.0);
    const ChannelSpec ch(ChannelKind::FermionHole);
    const auto e = exponents_for_channel(ch, p.xi);
    const double k = 0.3, s = e.d1sq() + e.d2sq();
    CHECK(continuum_at(ch, k, 0.02, p) / continuum_at(ch, k, 0.01, p) ==
          doctest::Approx(std::pow(2.0, s - 1)).epsilon(1e-13));
    const double c1 = k, c2 = 2 - k, x = 0.01;
    const double expect = std::pow(2 * kPi, 1 - e.alpha) * std::pow(k, -2 - 2 * e.a) /
                          std::pow(std::tgamma(-e.a), 2) * p.normalization(e.alpha) /
                          (std::tgamma(s) * std::pow(c1, e.d1sq()) * std::pow(c2, e.d2sq())) *
                          std::pow(x, s - 1);
    CHECK(continuum_at(ch, k, x, p) == doctest::Approx(expect).epsilon(1e-12));
    const double eps2 = p.v * k - k * k / 2;
    CHECK(continuum_hole(eps2 - 0.01, k, p, ch).a_value == 0.0);
}

TEST_CASE("negative-omega channels measure the threshold at -eps") {
    const auto p = unit_params(2.0);
    const ChannelSpec ch(ChannelKind::FermionLeftHole);
    const double k = 0.2, eps2 = p.v * k - k * k / 2;
    CHECK(domega_of(ch, -eps2 - 0.05, k, p) == doctest::Approx(0.05));
    CHECK(omega_of(ch, 0.05, k, p) == doctest::Approx(-eps2 - 0.05));
    CHECK(continuum_hole(-eps2 + 0.01, k, p, ch).a_value == 0.0);
    CHECK(continuum_hole(-eps2 - 0.01, k, p, ch).a_value > 0.0);
}

TEST_CASE("continuum forms depend on L only through ff_norm") {
    for (ChannelKind kind : {ChannelKind::FermionParticle, ChannelKind::FermionHole,
                             ChannelKind::Density2pfParticle, ChannelKind::BosonHole}) {
        const ChannelSpec ch(kind);
        auto p = unit_params(2.0);
        p.ff_norm = 0.83;
        auto q = p;
        q.L = 2 * p.L;
        for (double x : {1e-3, 0.04})
            CHECK(rel(continuum_at(ch, 0.4, x, q), continuum_at(ch, 0.4, x, p)) < 1e-12);
    }
}

TEST_CASE("explicit k dependence of the prefactors") {
    // Hold the velocity factors fixed by dividing them out in the oracle.
    const auto p = unit_params(2.0);
    for (ChannelKind kind : {ChannelKind::FermionParticle, ChannelKind::FermionHole}) {
        const ChannelSpec ch(kind);
        const auto e = exponents_for_channel(ch, p.xi);
        const double k = 0.25, x = 0.01;
        auto velocity = [&](double kk) {
            const double c1 = kk, c2 = e.hole_type() ? 2 - kk : 2 + kk;
            return std::pow(c1, e.d1sq()) * std::pow(c2, e.d2sq());
        };
        const double ratio = continuum_at(ch, 2 * k, x, p) / continuum_at(ch, k, x, p) *
                             velocity(2 * k) / velocity(k);
        const double expect = e.hole_type() ? std::pow(2.0, -2 - 2 * e.a) : std::pow(2.0, 2 * e.a - 2);
        CHECK(rel(ratio, expect) < 1e-12);
    }
}

TEST_CASE("k-dependent formfactor") {
    const auto p = unit_params(2.0);
    CHECK(kdep_formfactor(0.1, p, 1.0, 1.5) == doctest::Approx(kdep_formfactor(0.4, p, 1.0, 1.5)));
    const double a = 1.06;
    CHECK(kdep_formfactor(0.2, p, a, 1.25) / kdep_formfactor(0.1, p, a, 1.25) ==
          doctest::Approx(std::pow(2.0, 2 * a - 2)).epsilon(1e-13));
    for (ChannelKind kind : {ChannelKind::FermionParticle, ChannelKind::Density2pfParticle}) {
        const ChannelSpec ch(kind);
        for (double x : {-0.02, 0.003})
            CHECK(rel(continuum_particle_from_kdep(ch, 0.3, x, p), continuum_at(ch, 0.3, x, p)) <
                  1e-12);
    }
}

TEST_CASE("prefactor relation") {
    CHECK(prefactor_from_c0(2.0, 1.0) == 2.0);
    CHECK(prefactor_from_c0(1.0, 2.125) == doctest::Approx(std::pow(2.0, 1.125)).epsilon(1e-15));
    for (double c0 : {0.3, 1.0, 7.5})
        for (double alpha : {0.5, 1.0625, 2.125})
            CHECK(std::fabs(c0_from_prefactor(prefactor_from_c0(c0, alpha), alpha) / c0 - 1) < 1e-15);
    LuttingerParams p;
    p.c0 = 3.0;
    CHECK(p.normalization(2.125) == prefactor_from_c0(3.0, 2.125));
}

TEST_CASE("density structure factor step") {
    auto p = unit_params(2.0);
    p.m_eff = 1.7;
    const double k = 0.15;
    const double e1 = p.v * k + k * k / (2 * p.m_eff), e2 = p.v * k - k * k / (2 * p.m_eff);
    const double height = p.m_eff / (k * p.xi);
    CHECK(dsf_step(0.5 * (e1 + e2), k, p) == height);
    CHECK(dsf_step(e1, k, p) == height);
    CHECK(dsf_step(e2, k, p) == height);
    CHECK(dsf_step(std::nextafter(e1, 1.0), k, p) == 0.0);
    CHECK(dsf_step(std::nextafter(e2, 0.0), k, p) == 0.0);
    CHECK(dsf_step(-0.1, k, p) == 0.0);
    // Piecewise constant, so the integral is height times the support.
    CHECK(std::fabs(height * (e1 - e2) - k / p.xi) < 1e-12 * k / p.xi);
}

TEST_CASE("degenerate and out-of-range inputs") {
    auto p = unit_params(1.0);
    CHECK_THROWS_AS(finite_L_sum(ChannelSpec(ChannelKind::FermionParticle), 1.0, p, 100),
                    DegenerateChannelError);
    CHECK_THROWS_AS(continuum_at(ChannelSpec(ChannelKind::FermionHole), 1.0, 0.1, p),
                    DegenerateChannelError);
    p = unit_params(2.0);
    CHECK_THROWS_AS(finite_L_sum(ChannelSpec(ChannelKind::FermionParticle), 1.0, p, 5), DomainError);
    // mu < 0 at xi = 2 for the omega < 0 particle channel.
    CHECK_THROWS_AS(continuum_at(ChannelSpec(ChannelKind::FermionLeftParticle), 1.0, 0.1, p),
                    DomainError);
    const Histogram h = finite_L_sum(ChannelSpec(ChannelKind::FermionParticle), 1.0, p, 30);
    CHECK_THROWS_AS(analyze_threshold(ChannelSpec(ChannelKind::FermionParticle), 1.0, p, 30, h),
                    DomainError);
}
