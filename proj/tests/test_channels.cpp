#include <doctest.h>

#include <cmath>
#include <vector>

#include "nlll/channels.hpp"
#include "nlll/errors.hpp"

using namespace nlll;

namespace {

std::vector<ChannelSpec> every_channel() {
    std::vector<ChannelSpec> out;
    for (ChannelKind k : kAllChannelKinds) {
        out.emplace_back(k);
        if (k == ChannelKind::BosonParticle || k == ChannelKind::BosonHole)
            out.emplace_back(k, OmegaSign::Negative);
    }
    return out;
}

} // namespace

TEST_CASE("fermion particle at xi = 4") {
    const auto e = exponents_for_channel(ChannelSpec(ChannelKind::FermionParticle), 4.0);
    CHECK(e.a == doctest::Approx(1.25).epsilon(1e-15));
    CHECK(e.delta1 == doctest::Approx(-0.25).epsilon(1e-15));
    CHECK(e.delta2 == doctest::Approx(0.75).epsilon(1e-15));
    CHECK(e.alpha == doctest::Approx(2.125).epsilon(1e-15));
    CHECK(e.mu == doctest::Approx(0.375).epsilon(1e-15));
    CHECK(e.branch == Branch::Upper);
    CHECK_FALSE(e.degenerate());
}

TEST_CASE("fermion hole stores shifted exponents and uses -a") {
    const double xi = 4.0;
    const auto p = exponents_for_channel(ChannelSpec(ChannelKind::FermionParticle), xi);
    const auto h = exponents_for_channel(ChannelSpec(ChannelKind::FermionHole), xi);
    CHECK(h.a == p.a);
    CHECK(h.effective_a() == -p.a);
    CHECK(h.delta1 == doctest::Approx(2.0 - p.delta1));
    CHECK(h.delta2 == p.delta2);
    CHECK(h.branch == Branch::Lower);
}

TEST_CASE("omega < 0 fermion channels") {
    const double xi = 2.0, s = std::sqrt(xi);
    const auto lp = exponents_for_channel(ChannelSpec(ChannelKind::FermionLeftParticle), xi);
    const auto lh = exponents_for_channel(ChannelSpec(ChannelKind::FermionLeftHole), xi);
    const double a = 0.5 * (1 / s - s);
    CHECK(lp.a == doctest::Approx(a));
    CHECK(lp.delta1 == doctest::Approx(0.5 * (s + 1 / s)));
    CHECK(lp.delta2 == doctest::Approx(1 - a));
    CHECK(lh.delta1 == doctest::Approx(lp.delta1));
    CHECK(lh.delta2 == doctest::Approx(1 + a));
    CHECK(ChannelSpec(ChannelKind::FermionLeftHole).omega_sign() == OmegaSign::Negative);
    CHECK_THROWS_AS(ChannelSpec(ChannelKind::FermionLeftHole, OmegaSign::Positive), DomainError);
    CHECK_THROWS_AS(ChannelSpec(ChannelKind::FermionParticle, OmegaSign::Negative), DomainError);
}

TEST_CASE("density and boson channels at xi = 4") {
    const auto d = exponents_for_channel(ChannelSpec(ChannelKind::Density2pfParticle), 4.0);
    CHECK(d.delta1 == doctest::Approx(0.5));
    CHECK(d.delta2 == doctest::Approx(0.5));
    CHECK(d.a == doctest::Approx(0.5));
    CHECK(d.alpha == doctest::Approx(0.5));

    const auto b = exponents_for_channel(ChannelSpec(ChannelKind::BosonParticle), 4.0);
    CHECK(b.delta1 == 0.0);
    CHECK(b.delta2 == doctest::Approx(1.0));
    CHECK(b.a == doctest::Approx(1.0));
    CHECK(b.alpha == doctest::Approx(2.0));
    // a = 1 and delta1 = 0: no closed form there.
    CHECK(b.degenerate());
    CHECK_THROWS_AS(b.require_nondegenerate(), DegenerateChannelError);
}

TEST_CASE("alpha identity and closed forms on the xi grid") {
    for (double xi : {0.25, 0.5, 1.0 - 1e-6, 1.0 + 1e-6, 2.0, 4.0}) {
        for (const auto& ch : every_channel()) {
            const auto e = exponents_for_channel(ch, xi);
            INFO(ch.name(), " xi=", xi);
            // Oracle: the identity written out from the stored fields.
            const double rhs = -1.0 + 2.0 * e.effective_a() + e.delta1 * e.delta1 +
                               e.delta2 * e.delta2;
            CHECK(std::fabs(e.alpha - rhs) < 1e-12);
            CHECK(e.mu == doctest::Approx(1 - e.delta1 * e.delta1 - e.delta2 * e.delta2));
        }
        const auto fp = exponents_for_channel(ChannelSpec(ChannelKind::FermionParticle), xi);
        CHECK(std::fabs(fp.alpha - 0.5 * (xi + 1 / xi)) < 1e-12);
    }
}

TEST_CASE("free-fermion point is flagged, not rejected") {
    const auto e = exponents_for_channel(ChannelSpec(ChannelKind::FermionParticle), 1.0);
    CHECK(e.a == 1.0);
    CHECK(e.delta1 == 0.0);
    CHECK(e.delta2 == 0.0);
    CHECK(e.alpha == 1.0);
    CHECK(e.mu == 1.0);
    CHECK(e.degenerate());
    const auto near = exponents_for_channel(ChannelSpec(ChannelKind::FermionParticle), 1.0 + 1e-6);
    CHECK_FALSE(near.degenerate());
    CHECK_THROWS_AS(exponents_for_channel(ChannelSpec(ChannelKind::FermionParticle), 0.0),
                    DomainError);
    CHECK_THROWS_AS(exponents_for_channel(ChannelSpec(ChannelKind::FermionParticle), -2.0),
                    DomainError);
}

TEST_CASE("boson omega < 0 swaps particle and hole exponents") {
    for (double xi : {0.5, 2.0, 3.0}) {
        const auto pp = exponents_for_channel(ChannelSpec(ChannelKind::BosonParticle), xi);
        const auto hp = exponents_for_channel(ChannelSpec(ChannelKind::BosonHole), xi);
        const auto pn =
            exponents_for_channel(ChannelSpec(ChannelKind::BosonParticle, OmegaSign::Negative), xi);
        const auto hn =
            exponents_for_channel(ChannelSpec(ChannelKind::BosonHole, OmegaSign::Negative), xi);
        CHECK(pn.mu == hp.mu);
        CHECK(hn.mu == pp.mu);
    }
    CHECK(ChannelSpec(ChannelKind::BosonHole, OmegaSign::Negative).name() == "BosonHole-");
}

TEST_CASE("dispersion branches") {
    LuttingerParams p;
    p.v = 1.0;
    p.m_eff = 1.0;
    CHECK(dispersion(Branch::Upper, 0.0, p) == 0.0);
    CHECK(dispersion(Branch::Upper, 0.2, p) == doctest::Approx(0.22).epsilon(1e-15));
    CHECK(dispersion(Branch::Lower, 0.2, p) == doctest::Approx(0.18).epsilon(1e-15));
    for (double k : {0.0, 1e-6, 0.01, 0.3, 2.0}) {
        const double e1 = dispersion(Branch::Upper, k, p), e2 = dispersion(Branch::Lower, k, p);
        if (k == 0.0) CHECK(e1 == e2);
        else CHECK(e1 > e2);
    }
    CHECK(threshold_energy(ChannelSpec(ChannelKind::FermionHole), 0.2, p) ==
          doctest::Approx(0.18));
}

TEST_CASE("threshold velocities") {
    LuttingerParams p;
    p.v = 1.5;
    p.m_eff = 2.0;
    const auto e = exponents_for_channel(ChannelSpec(ChannelKind::FermionParticle), 2.0);
    const auto h = exponents_for_channel(ChannelSpec(ChannelKind::FermionHole), 2.0);
    const auto vp = threshold_velocities(e, 0.4, p);
    const auto vh = threshold_velocities(h, 0.4, p);
    CHECK(vp.c1 == doctest::Approx(0.2));
    CHECK(vp.c2 == doctest::Approx(3.2));
    CHECK(vh.c1 == doctest::Approx(0.2));
    CHECK(vh.c2 == doctest::Approx(2.8));
    CHECK_THROWS_AS(threshold_velocities(h, 6.0, p), DomainError);
}

TEST_CASE("parameter validation and normalization") {
    LuttingerParams p;
    CHECK_NOTHROW(p.validate());
    p.L = 0.0;
    CHECK_THROWS_AS(p.validate(), DomainError);
    p = LuttingerParams{};
    p.c0 = 2.0;
    CHECK(p.normalization(1.0) == doctest::Approx(2.0));
    p.ff_norm = 0.7;
    CHECK(p.normalization(3.0) == 0.7);
}

TEST_CASE("names round-trip") {
    for (ChannelKind k : kAllChannelKinds) CHECK(parse_channel_kind(to_string(k)) == k);
    CHECK_FALSE(parse_channel_kind("Fermion").has_value());
    CHECK(parse_omega_sign("-") == OmegaSign::Negative);
}
