#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "nlll/channels.hpp"

namespace nlll {

/// One sample of the spectral density. For omega < 0 channels the threshold
/// sits at omega = -eps(k) and domega is measured in excitation energy,
/// i.e. domega = -omega - eps(k).
struct SpectralPoint {
    double omega = 0.0;
    double k = 0.0;
    double domega = 0.0;
    double a_value = 0.0;
};

/// Binned estimate of A versus domega. weights[i] is the total spectral weight
/// that fell into [edges[i], edges[i+1]) divided by the bin width.
struct Histogram {
    std::vector<double> edges;
    std::vector<double> weights;
    /// Index of the bin holding the (0,0) term: it straddles domega = 0 for
    /// particle-type channels and is [0, inner) for hole-type channels.
    std::size_t threshold_bin = 0;
    /// Total (unbinned) weight of grid points with domega < 0 and > 0.
    double weight_below = 0.0;
    double weight_above = 0.0;
    /// Largest |domega| reached on each side by the truncated grid.
    double reach_below = 0.0;
    double reach_above = 0.0;

    std::size_t size() const noexcept { return weights.size(); }
    double lower(std::size_t i) const { return edges[i]; }
    double upper(std::size_t i) const { return edges[i + 1]; }
    /// Signed geometric centre for side bins, 0 for a bin straddling the
    /// threshold, the midpoint for a bin with an edge at 0.
    double centre(std::size_t i) const;
    /// Bin containing domega, or nullopt outside the edges.
    std::optional<std::size_t> find(double domega) const;
};

struct HistogramSpec {
    int bins_per_decade = 64;
};

/// Finite-size sum over the low-energy states at both Fermi points:
/// grid points (q1, q2) in [0, qmax]^2 carry weight
/// L f^2(kbar) F(q1, d1^2) F(q2, d2^2) ff_norm / L^alpha at
/// domega = (2pi/L)(-/+ C1 q1 + C2 q2). Bin edges are log-spaced per side and
/// snapped to half-steps of the dominant level spacing so that each bin holds
/// whole teeth of the discrete spectrum.
///
/// Work is split into fixed blocks of q1 rows and the per-block histograms are
/// merged in a fixed pairwise order, so the result does not depend on the
/// number of threads. NLLL_THREADS caps the worker count.
Histogram finite_L_sum(const ChannelSpec& channel, double k, const LuttingerParams& params,
                       std::int64_t qmax, const HistogramSpec& spec = {});

/// Continuum threshold form at a given distance domega from the threshold.
/// Particle-type channels are two-sided; hole-type channels vanish for
/// domega <= 0. Throws DegenerateChannelError, or DomainError for a particle
/// channel with mu <= 0 or domega == 0.
double continuum_at(const ChannelSpec& channel, double k, double domega,
                    const LuttingerParams& params);

/// Mean of the continuum form over [lo, hi] (lo < hi; the interval may
/// straddle the threshold). Finite wherever the singularity is integrable.
double continuum_bin_average(const ChannelSpec& channel, double k, double lo, double hi,
                             const LuttingerParams& params);

SpectralPoint continuum_particle(double omega, double k, const LuttingerParams& params,
                                 const ChannelSpec& channel);
SpectralPoint continuum_hole(double omega, double k, const LuttingerParams& params,
                             const ChannelSpec& channel);

/// Signed distance from threshold for a physical omega (see SpectralPoint).
double domega_of(const ChannelSpec& channel, double omega, double k,
                 const LuttingerParams& params);
double omega_of(const ChannelSpec& channel, double domega, double k,
                const LuttingerParams& params);

/// Small-k density structure factor: m/(k xi) on [eps2(k), eps1(k)], else 0.
double dsf_step(double omega, double k, const LuttingerParams& params);

/// L^alpha |<1|psi+|0>|^2 from the prefactor of the large-distance
/// asymptotics, and back.
double prefactor_from_c0(double c0, double alpha);
double c0_from_prefactor(double ff_norm, double alpha);

/// |<k|psi+|0>|^2 = k^(2a-2) (2pi/L)^(2-2a) / Gamma^2(a) * ff_norm / L^alpha.
double kdep_formfactor(double k, const LuttingerParams& params, double a, double alpha);

/// continuum_at for a particle channel rebuilt from kdep_formfactor, which
/// absorbs every explicit k and Gamma(a).
double continuum_particle_from_kdep(const ChannelSpec& channel, double k, double domega,
                                    const LuttingerParams& params);

/// Weighted least-squares fit log A = intercept + slope log|domega|.
struct PowerLawFit {
    double slope = 0.0;
    double intercept = 0.0;
    double lo = 0.0; // |domega| window actually used
    double hi = 0.0;
    int bins = 0;

    double at(double x) const;
};

/// Fit over the side bins entirely inside [lo, hi] in |domega|, skipping the
/// two bins nearest threshold. `below` selects the domega < 0 side.
/// Throws DomainError if fewer than three bins remain.
PowerLawFit fit_power_law(const Histogram& h, bool below, double lo, double hi);

struct ThresholdAnalysis {
    ExponentSet exponents;
    double analytic_slope = 0.0; // -(1 - d1^2 - d2^2)
    std::optional<PowerLawFit> below; // particle channels only
    PowerLawFit above;
    /// A(+x)/A(-x) of the two side fits at a common |domega|, and the
    /// continuum value sin(pi d2^2)/sin(pi d1^2). Particle channels only.
    std::optional<double> amplitude_ratio;
    std::optional<double> analytic_ratio;
    double ratio_at = 0.0;
};

/// Picks one-decade fit windows well inside the reachable range and fits
/// each side of the finite-L histogram.
ThresholdAnalysis analyze_threshold(const ChannelSpec& channel, double k,
                                    const LuttingerParams& params, std::int64_t qmax,
                                    const Histogram& h);

/// Worker count used by finite_L_sum.
unsigned worker_count();

} // namespace nlll
