#include "nlll/formfactors.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "nlll/errors.hpp"

namespace nlll {

namespace {

using Positions = std::vector<std::int64_t>;

// f+(p) = Gamma(p + a) / (Gamma(p) Gamma(a)) for p >= 1.
LogSigned f_plus(std::int64_t p, double a) {
    return log_gamma_ratio(a, static_cast<double>(p)) / log_gamma(static_cast<double>(p));
}

// f-(q) = Gamma(1 - q - a) / (Gamma(1 - q) Gamma(1 - a)) for q <= 0.
LogSigned f_minus(std::int64_t q, double a) {
    return log_gamma_ratio(1.0 - a, static_cast<double>(-q)) /
           log_gamma(1.0 - static_cast<double>(q));
}

// The formfactor for sorted position lists relative to the Fermi level.
// A particle at 0 is allowed only when a hole also sits at 0: the vanishing
// f+(0) and the vanishing Cauchy factor (0 - 0) combine into
// lim_{x->0} f+(x)/x = Gamma(a) / (Gamma(1) Gamma(a)) = 1.
LogSigned evaluate(const Positions& ps, const Positions& qs, double a) {
    if (is_gamma_pole(a)) throw GammaPoleError(a);
    const std::size_t n = ps.size();
    LogSigned r = LogSigned::one();
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            r *= LogSigned::from(static_cast<double>(ps[i] - ps[j]));
            r *= LogSigned::from(static_cast<double>(qs[j] - qs[i]));
        }
    }
    for (std::size_t i = 0; i < n; ++i) {
        const bool regular_pair = ps[i] == 0;
        if (!regular_pair) r *= f_plus(ps[i], a);
        r *= f_minus(qs[i], a);
        for (std::size_t j = 0; j < n; ++j) {
            if (regular_pair && qs[j] == 0) continue;
            r /= LogSigned::from(static_cast<double>(ps[i] - qs[j]));
        }
    }
    return r;
}

void check_cap(int m, int cap) {
    if (m < 0) throw DomainError("total momentum m must be nonnegative");
    if (m > cap)
        throw CapExceededError("m = " + std::to_string(m) + " exceeds the enumeration cap " +
                               std::to_string(cap));
}

// All ascending lists of `count` distinct integers >= `lo` summing to `sum`.
void distinct_parts(int count, int lo, int sum, Positions& cur, std::vector<Positions>& out) {
    if (count == 0) {
        if (sum == 0) out.push_back(cur);
        return;
    }
    // The smallest possible remainder with all parts above x is
    // count*x + count*(count-1)/2.
    for (int x = lo; count * x + count * (count - 1) / 2 <= sum; ++x) {
        cur.push_back(x);
        distinct_parts(count - 1, x + 1, sum - x, cur, out);
        cur.pop_back();
    }
}

} // namespace

ParticleHoleConfig ParticleHoleConfig::make(Positions particles, Positions holes,
                                            std::int64_t fermi) {
    if (particles.size() != holes.size())
        throw DomainError("particle and hole counts differ");
    std::sort(particles.begin(), particles.end());
    std::sort(holes.begin(), holes.end());
    if (std::adjacent_find(particles.begin(), particles.end()) != particles.end() ||
        std::adjacent_find(holes.begin(), holes.end()) != holes.end())
        throw DomainError("particle and hole positions must be distinct");
    if (!particles.empty() && (particles.front() <= fermi || holes.back() > fermi))
        throw DomainError("particles must lie above and holes at or below the Fermi level " +
                          std::to_string(fermi));
    ParticleHoleConfig c;
    c.particles_ = std::move(particles);
    c.holes_ = std::move(holes);
    c.fermi_ = fermi;
    return c;
}

std::int64_t ParticleHoleConfig::total_momentum() const noexcept {
    return std::accumulate(particles_.begin(), particles_.end(), std::int64_t{0}) -
           std::accumulate(holes_.begin(), holes_.end(), std::int64_t{0});
}

ParticleHoleConfig ParticleHoleConfig::shifted(std::int64_t by) const {
    ParticleHoleConfig c = *this;
    for (auto& p : c.particles_) p += by;
    for (auto& q : c.holes_) q += by;
    c.fermi_ += by;
    return c;
}

LogSigned formfactor(const ParticleHoleConfig& config, double a) {
    Positions ps = config.particles(), qs = config.holes();
    for (auto& p : ps) p -= config.fermi();
    for (auto& q : qs) q -= config.fermi();
    return evaluate(ps, qs, a);
}

std::vector<ParticleHoleConfig> enumerate_configs(int m, int cap) {
    check_cap(m, cap);
    std::vector<ParticleHoleConfig> out;
    if (m == 0) {
        out.emplace_back();
        return out;
    }
    // n pairs carry at least n(n+1)/2 + n(n-1)/2 = n^2 quanta.
    for (int n = 1; n * n <= m; ++n) {
        std::vector<Positions> plists;
        Positions cur;
        for (int sp = n * (n + 1) / 2; sp <= m - n * (n - 1) / 2; ++sp)
            distinct_parts(n, 1, sp, cur, plists);
        std::sort(plists.begin(), plists.end());
        for (const auto& ps : plists) {
            const int sp = std::accumulate(ps.begin(), ps.end(), 0);
            // Holes as depths d = -q >= 0; ascending q is descending d.
            std::vector<Positions> dlists;
            distinct_parts(n, 0, m - sp, cur, dlists);
            std::vector<Positions> qlists;
            qlists.reserve(dlists.size());
            for (auto& d : dlists) {
                Positions qs(d.rbegin(), d.rend());
                for (auto& q : qs) q = -q;
                qlists.push_back(std::move(qs));
            }
            std::sort(qlists.begin(), qlists.end());
            for (auto& qs : qlists) out.push_back(ParticleHoleConfig::make(ps, std::move(qs)));
        }
    }
    return out;
}

std::vector<ParticleHoleConfig> hole_channel_configs(int m, int cap) {
    auto configs = enumerate_configs(m, cap);
    for (auto& c : configs) c = c.shifted(2);
    return configs;
}

double sum_rule_bruteforce(int m, double a, int cap) {
    double total = 0.0;
    for (const auto& c : enumerate_configs(m, cap)) total += formfactor(c, a).squared();
    return total;
}

double sum_rule_closed(std::int64_t m, double a2) {
    if (m < 0) throw DomainError("m must be nonnegative");
    if (m == 0) {
        if (is_gamma_pole(a2)) throw GammaPoleError(a2);
        return 1.0;
    }
    const LogSigned r =
        log_gamma_ratio(a2, static_cast<double>(m)) / log_gamma(static_cast<double>(m) + 1.0);
    return r.value();
}

LogSigned smooth_factor_log(double kbar, double a) {
    if (!(kbar > 0.0)) throw DomainError("kbar must be positive");
    return log_gamma_ratio(a, kbar) / log_gamma(kbar + 1.0);
}

double smooth_factor_f(double kbar, double a) { return smooth_factor_log(kbar, a).value(); }

double smooth_factor_asymptotic(double kbar, double a) {
    const LogSigned g = log_gamma(a);
    return g.sign * std::exp((a - 1.0) * std::log(kbar) - g.log_abs);
}

double shift_reduction_check(std::int64_t p, const ParticleHoleConfig& config, double a) {
    if (p < 2) throw DomainError("shift reduction needs p >= 2");
    Positions low_p = config.particles(), low_q = config.holes();
    for (auto& x : low_p) x -= config.fermi();
    for (auto& x : low_q) x -= config.fermi();
    if (!low_p.empty() && p <= low_p.back())
        throw DomainError("p must exceed every low-energy particle position");

    Positions ps, qs;
    for (auto x : low_p) ps.push_back(x - 1);
    ps.push_back(p - 1);
    for (auto x : low_q) qs.push_back(x - 1);
    qs.push_back(0);

    const LogSigned full = evaluate(ps, qs, a);
    const LogSigned reduced =
        smooth_factor_log(static_cast<double>(p - 1), a) * evaluate(low_p, low_q, a - 1.0);
    const LogSigned ratio = full / reduced;
    if (ratio.sign != 1)
        return std::fabs(ratio.value() - 1.0);
    return std::fabs(std::expm1(ratio.log_abs));
}

} // namespace nlll
