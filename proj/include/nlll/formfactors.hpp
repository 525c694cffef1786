#pragma once

#include <cstdint>
#include <vector>

#include "nlll/log_signed.hpp"

namespace nlll {

inline constexpr int kDefaultEnumerationCap = 40;

/// Low-energy particle-hole state near one Fermi point, positions in units of
/// 2*pi/L. Particles sit strictly above the Fermi level `fermi`, holes at or
/// below it. Both lists are kept sorted ascending; that order fixes the sign
/// convention of the formfactor.
class ParticleHoleConfig {
public:
    ParticleHoleConfig() = default;

    /// Sorts the inputs. Throws DomainError on duplicates, out-of-range
    /// positions or unequal particle/hole counts.
    static ParticleHoleConfig make(std::vector<std::int64_t> particles,
                                   std::vector<std::int64_t> holes, std::int64_t fermi = 0);

    const std::vector<std::int64_t>& particles() const noexcept { return particles_; }
    const std::vector<std::int64_t>& holes() const noexcept { return holes_; }
    std::int64_t fermi() const noexcept { return fermi_; }
    std::size_t pairs() const noexcept { return particles_.size(); }
    bool empty() const noexcept { return particles_.empty(); }

    /// sum(p_i) - sum(q_i); at least pairs().
    std::int64_t total_momentum() const noexcept;

    /// Same excitation with every position (and the Fermi level) moved by `by`.
    ParticleHoleConfig shifted(std::int64_t by) const;

    friend bool operator==(const ParticleHoleConfig&, const ParticleHoleConfig&) = default;

private:
    std::vector<std::int64_t> particles_;
    std::vector<std::int64_t> holes_;
    std::int64_t fermi_ = 0;
};

/// Matrix element of the exponential operator exp(a 2pi/L sum rho(p)/p)
/// between the ground state and `config`:
///
///   F_a = prod_{i<j}(p_i-p_j) prod_{i>j}(q_i-q_j) / prod_{i,j}(p_i-q_j)
///         * prod f+(p_i) * prod f-(q_i),
///   f+(p) = Gamma(p+a) / (Gamma(p) Gamma(a)),
///   f-(q) = Gamma(1-q-a) / (Gamma(1-q) Gamma(1-a)),
///
/// with positions measured from the config's Fermi level. The empty config
/// gives exactly 1. Throws GammaPoleError when Gamma(a) or Gamma(1-q-a) hits
/// a pole.
LogSigned formfactor(const ParticleHoleConfig& config, double a);

/// All configurations of total momentum m, each once, ordered by
/// (pair count, particle list, hole list). There are p(m) of them.
/// Throws CapExceededError if m > cap.
std::vector<ParticleHoleConfig> enumerate_configs(int m, int cap = kDefaultEnumerationCap);

/// The same set measured from a Fermi level shifted up by two quanta
/// (p_i > 2, q_i <= 2), as needed after the two extra particles of the
/// high-energy-hole state.
std::vector<ParticleHoleConfig> hole_channel_configs(int m, int cap = kDefaultEnumerationCap);

/// sum over enumerate_configs(m) of |F_a|^2.
double sum_rule_bruteforce(int m, double a, int cap = kDefaultEnumerationCap);

/// Gamma(a2 + m) / (Gamma(m+1) Gamma(a2)), the closed form of the same sum.
double sum_rule_closed(std::int64_t m, double a2);

/// f(kbar) = Gamma(kbar + a) / (kbar Gamma(kbar) Gamma(a)), kbar = L k / 2pi.
/// Pass -a for the hole-state factor.
LogSigned smooth_factor_log(double kbar, double a);
double smooth_factor_f(double kbar, double a);
/// Large-kbar form kbar^(a-1) / Gamma(a).
double smooth_factor_asymptotic(double kbar, double a);

/// Builds the composite state of a high-energy particle at p on top of
/// `config` (particles {p-1} U {p_i-1}, holes {q_i-1} U {0}), evaluates its
/// full formfactor and returns |full / (f(p-1) F_{a-1}(config)) - 1|.
///
/// A low-energy particle at p_i = 1 lands on position 0, next to the added
/// hole at 0; that pair enters through the finite limit of f+(x)/x at x -> 0.
/// Requires p > max(p_i) and p >= 2.
double shift_reduction_check(std::int64_t p, const ParticleHoleConfig& config, double a);

} // namespace nlll
