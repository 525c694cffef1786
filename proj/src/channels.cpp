#include "nlll/channels.hpp"

#include <cmath>
#include <sstream>

#include "nlll/errors.hpp"

namespace nlll {

namespace {

constexpr std::array<std::string_view, 8> kKindNames = {
    "FermionParticle",    "FermionHole",        "FermionLeftParticle", "FermionLeftHole",
    "Density2pfParticle", "Density2pfHole",     "BosonParticle",       "BosonHole",
};

bool is_boson(ChannelKind k) noexcept {
    return k == ChannelKind::BosonParticle || k == ChannelKind::BosonHole;
}

bool is_left(ChannelKind k) noexcept {
    return k == ChannelKind::FermionLeftParticle || k == ChannelKind::FermionLeftHole;
}

OmegaSign natural_sign(ChannelKind k) noexcept {
    return is_left(k) ? OmegaSign::Negative : OmegaSign::Positive;
}

std::string describe(double x) {
    std::ostringstream os;
    os.precision(17);
    os << x;
    return os.str();
}

// alpha is the scaling exponent of the operator, taken from its own closed
// form so that the L-cancellation residual is an actual check.
ExponentSet particle_set(double a, double d1, double d2, double alpha) {
    ExponentSet e;
    e.a = a;
    e.delta1 = d1;
    e.delta2 = d2;
    e.alpha = alpha;
    e.mu = 1.0 - d1 * d1 - d2 * d2;
    e.branch = Branch::Upper;
    return e;
}

// Hole-type set; d1, d2 are already the shifted exponents.
ExponentSet hole_set(double a, double d1, double d2, double alpha) {
    ExponentSet e = particle_set(a, d1, d2, alpha);
    e.branch = Branch::Lower;
    return e;
}

void mark_degeneracy(ExponentSet& e) {
    const double a = e.effective_a();
    if (a == std::floor(a)) {
        e.degeneracy = "formfactor exponent a = " + describe(a) +
                       " is an integer (Gamma(a) or Gamma(1-a) pole)";
    } else if (e.d1sq() == 0.0 || e.d2sq() == 0.0) {
        e.degeneracy = "vanishing Fermi-point exponent (Gamma(delta^2) pole at delta^2 = 0)";
    }
}

} // namespace

void LuttingerParams::validate() const {
    auto positive = [](double x, const char* name) {
        if (!(x > 0.0) || !std::isfinite(x))
            throw DomainError(std::string(name) + " must be a finite positive number");
    };
    positive(xi, "xi");
    positive(v, "v");
    positive(m_eff, "m_eff");
    positive(L, "L");
    positive(c0, "c0");
    if (ff_norm) positive(*ff_norm, "ff_norm");
}

double LuttingerParams::normalization(double alpha) const {
    if (ff_norm) return *ff_norm;
    return c0 * std::exp2(alpha - 1.0);
}

std::string_view to_string(ChannelKind kind) noexcept {
    return kKindNames[static_cast<std::size_t>(kind)];
}

std::string_view to_string(OmegaSign sign) noexcept {
    return sign == OmegaSign::Positive ? "positive" : "negative";
}

std::string_view to_string(Branch branch) noexcept {
    return branch == Branch::Upper ? "upper" : "lower";
}

std::optional<ChannelKind> parse_channel_kind(std::string_view name) noexcept {
    for (std::size_t i = 0; i < kKindNames.size(); ++i)
        if (kKindNames[i] == name) return static_cast<ChannelKind>(i);
    return std::nullopt;
}

std::optional<OmegaSign> parse_omega_sign(std::string_view name) noexcept {
    if (name == "positive" || name == "+") return OmegaSign::Positive;
    if (name == "negative" || name == "-") return OmegaSign::Negative;
    return std::nullopt;
}

ChannelSpec::ChannelSpec(ChannelKind kind) : kind_(kind), sign_(natural_sign(kind)) {}

ChannelSpec::ChannelSpec(ChannelKind kind, OmegaSign sign) : kind_(kind), sign_(sign) {
    if (!is_boson(kind) && sign != natural_sign(kind)) {
        throw DomainError(std::string(to_string(kind)) + " only exists for omega " +
                          std::string(to_string(natural_sign(kind))));
    }
}

std::string ChannelSpec::name() const {
    std::string n(to_string(kind_));
    if (is_boson(kind_) && sign_ == OmegaSign::Negative) n += "-";
    return n;
}

double ExponentSet::cancellation_residual() const noexcept {
    return std::fabs(alpha - (-1.0 + 2.0 * effective_a() + d1sq() + d2sq()));
}

void ExponentSet::require_nondegenerate() const {
    if (degeneracy) throw DegenerateChannelError("degenerate channel: " + *degeneracy);
}

ExponentSet exponents_for_channel(const ChannelSpec& channel, double xi) {
    if (!(xi > 0.0) || !std::isfinite(xi)) throw DomainError("xi must be a finite positive number");
    const double s = std::sqrt(xi);

    ExponentSet e;
    switch (channel.kind()) {
    case ChannelKind::FermionParticle:
    case ChannelKind::FermionHole: {
        const double a = 0.5 * (s + 1.0 / s);
        const double d1 = 1.0 - a;
        const double d2 = 0.5 * (s - 1.0 / s);
        const double alpha = 0.5 * (xi + 1.0 / xi);
        e = channel.kind() == ChannelKind::FermionParticle ? particle_set(a, d1, d2, alpha)
                                                           : hole_set(a, 2.0 - d1, d2, alpha);
        break;
    }
    case ChannelKind::FermionLeftParticle:
    case ChannelKind::FermionLeftHole: {
        const double a = 0.5 * (1.0 / s - s);
        const double d1 = 0.5 * (s + 1.0 / s);
        const double alpha = 0.5 * (xi + 1.0 / xi);
        e = channel.kind() == ChannelKind::FermionLeftParticle
                ? particle_set(a, d1, 1.0 - a, alpha)
                : hole_set(a, d1, 1.0 + a, alpha);
        break;
    }
    case ChannelKind::Density2pfParticle:
    case ChannelKind::Density2pfHole: {
        const double a = 1.0 / s;
        const double d1 = 1.0 - 1.0 / s;
        const double d2 = 1.0 / s;
        const double alpha = 2.0 / xi;
        e = channel.kind() == ChannelKind::Density2pfParticle ? particle_set(a, d1, d2, alpha)
                                                              : hole_set(a, 2.0 - d1, d2, alpha);
        break;
    }
    case ChannelKind::BosonParticle:
    case ChannelKind::BosonHole: {
        const double a = 0.5 * s;
        const double d1 = 1.0 - 0.5 * s;
        const double d2 = 0.5 * s;
        // At omega < 0 the particle and hole exponent sets trade places.
        const bool particle = (channel.kind() == ChannelKind::BosonParticle) ==
                              (channel.omega_sign() == OmegaSign::Positive);
        const double alpha = 0.5 * xi;
        e = particle ? particle_set(a, d1, d2, alpha) : hole_set(a, 2.0 - d1, d2, alpha);
        break;
    }
    }
    mark_degeneracy(e);
    return e;
}

double dispersion(Branch branch, double k, const LuttingerParams& params) {
    const double curvature = k * k / (2.0 * params.m_eff);
    return params.v * k + (branch == Branch::Upper ? curvature : -curvature);
}

double threshold_energy(const ChannelSpec& channel, double k, const LuttingerParams& params) {
    params.validate();
    return dispersion(exponents_for_channel(channel, params.xi).branch, k, params);
}

ThresholdVelocities threshold_velocities(const ExponentSet& exps, double k,
                                         const LuttingerParams& params) {
    const double c1 = k / params.m_eff;
    const double c2 = exps.hole_type() ? 2.0 * params.v - c1 : 2.0 * params.v + c1;
    if (!(c2 > 0.0))
        throw DomainError("hole threshold requires k/m < 2v (C2 = 2v - k/m must be positive)");
    return {c1, c2};
}

} // namespace nlll
