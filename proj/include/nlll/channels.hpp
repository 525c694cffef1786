#pragma once

#include <array>
#include <optional>
#include <string>
#include <string_view>

namespace nlll {

/// Physical input parameters of a one-dimensional gapless model.
///
/// The non-universal normalization enters through a single number: either the
/// prefactor `c0` of the leading large-distance asymptotics of the correlator,
/// or directly the size-independent combination `ff_norm` = L^alpha |<1|psi+|0>|^2.
/// Exactly one of the two is used; `ff_norm`, when set, wins.
struct LuttingerParams {
    double xi = 2.0;
    double v = 1.0;
    double m_eff = 1.0;
    double L = 6283.185307179586; // 2*pi*1000
    double c0 = 1.0;
    std::optional<double> ff_norm;

    /// Throws DomainError unless xi, v, m_eff, L, c0 (and ff_norm, if set) are > 0.
    void validate() const;

    /// L^alpha |<1|psi+|0>|^2 for a channel with scaling exponent alpha.
    double normalization(double alpha) const;
};

enum class ChannelKind {
    FermionParticle,
    FermionHole,
    FermionLeftParticle,
    FermionLeftHole,
    Density2pfParticle,
    Density2pfHole,
    BosonParticle,
    BosonHole,
};

inline constexpr std::array<ChannelKind, 8> kAllChannelKinds = {
    ChannelKind::FermionParticle,    ChannelKind::FermionHole,
    ChannelKind::FermionLeftParticle, ChannelKind::FermionLeftHole,
    ChannelKind::Density2pfParticle, ChannelKind::Density2pfHole,
    ChannelKind::BosonParticle,      ChannelKind::BosonHole,
};

enum class OmegaSign { Positive, Negative };

/// Which quasiparticle dispersion sets the threshold:
/// Upper: eps1(k) = v k + k^2/2m, Lower: eps2(k) = v k - k^2/2m.
enum class Branch { Upper, Lower };

std::string_view to_string(ChannelKind kind) noexcept;
std::string_view to_string(OmegaSign sign) noexcept;
std::string_view to_string(Branch branch) noexcept;
std::optional<ChannelKind> parse_channel_kind(std::string_view name) noexcept;
std::optional<OmegaSign> parse_omega_sign(std::string_view name) noexcept;

/// A correlator channel. Left-branch fermion channels are the omega < 0 part of
/// the fermion spectral density; boson channels exist for both signs of omega.
class ChannelSpec {
public:
    /// Uses the natural sign for the kind (Negative for the Left channels).
    explicit ChannelSpec(ChannelKind kind);
    /// Throws DomainError for a sign the kind does not support.
    ChannelSpec(ChannelKind kind, OmegaSign sign);

    ChannelKind kind() const noexcept { return kind_; }
    OmegaSign omega_sign() const noexcept { return sign_; }
    std::string name() const;

    friend bool operator==(const ChannelSpec&, const ChannelSpec&) = default;

private:
    ChannelKind kind_;
    OmegaSign sign_;
};

/// Exponents (a, delta1, delta2, alpha, mu) of one channel at given xi.
///
/// For hole-type sets (branch Lower) the delta fields hold the shifted
/// exponents (e.g. 2 - delta1) and the formfactor prefactor uses -a; use
/// effective_a() rather than `a` when evaluating formulas.
struct ExponentSet {
    double a = 0.0;
    double delta1 = 0.0;
    double delta2 = 0.0;
    double alpha = 0.0;
    double mu = 0.0;
    Branch branch = Branch::Upper;
    /// Empty when closed-form evaluation is possible; otherwise the reason.
    std::optional<std::string> degeneracy;

    bool hole_type() const noexcept { return branch == Branch::Lower; }
    double effective_a() const noexcept { return hole_type() ? -a : a; }
    double d1sq() const noexcept { return delta1 * delta1; }
    double d2sq() const noexcept { return delta2 * delta2; }
    bool degenerate() const noexcept { return degeneracy.has_value(); }

    /// |alpha - (-1 + 2 a_eff + delta1^2 + delta2^2)|
    double cancellation_residual() const noexcept;

    /// Throws DegenerateChannelError with the stored reason.
    void require_nondegenerate() const;
};

/// Throws DomainError for xi <= 0. Degenerate points are returned with
/// `degeneracy` set, not rejected; the closed-form evaluators refuse them.
ExponentSet exponents_for_channel(const ChannelSpec& channel, double xi);

/// eps1(k) or eps2(k). Valid in the regime 0 < k << p_F; any k >= 0 is accepted.
double dispersion(Branch branch, double k, const LuttingerParams& params);

/// Threshold energy of the channel's branch. For omega < 0 channels this is the
/// excitation energy of the threshold state, i.e. the threshold sits at omega = -eps(k).
double threshold_energy(const ChannelSpec& channel, double k, const LuttingerParams& params);

/// Velocities entering the threshold kinematics: dω = -/+ C1 q1 + C2 q2 with
/// C1 = |v_d - v| = k/m and C2 = v_d + v, where v_d = v + k/m for particle-type
/// sets and v_d = v - k/m for hole-type sets.
struct ThresholdVelocities {
    double c1 = 0.0;
    double c2 = 0.0;
};

/// Throws DomainError if C2 <= 0 (hole-type with k/m >= 2v).
ThresholdVelocities threshold_velocities(const ExponentSet& exps, double k,
                                         const LuttingerParams& params);

} // namespace nlll
