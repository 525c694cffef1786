#include "nlll/cli.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <numbers>
#include <sstream>
#include <variant>

#include <CLI11.hpp>
#include <json.hpp>

#include "nlll/errors.hpp"
#include "nlll/formfactors.hpp"
#include "nlll/spectral.hpp"

namespace nlll::cli {

using nlohmann::json;

namespace {

// ---------------------------------------------------------------- tables

using Cell = std::variant<std::string, double, std::int64_t>;

std::string format_double(double x) {
    if (x == 0.0) return "0"; // no "-0"
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

std::string csv_field(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string q = "\"";
    for (char c : s) {
        if (c == '"') q += '"';
        q += c;
    }
    return q + "\"";
}

struct Table {
    std::vector<std::string> columns;
    std::vector<std::vector<Cell>> rows;

    void add(std::vector<Cell> row) {
        for (std::size_t i = 0; i < row.size(); ++i)
            if (const double* d = std::get_if<double>(&row[i]); d && !std::isfinite(*d))
                throw NumericError("non-finite value in column " + columns[i]);
        rows.push_back(std::move(row));
    }

    std::string csv() const {
        std::string s;
        for (std::size_t i = 0; i < columns.size(); ++i) s += (i ? "," : "") + columns[i];
        s += '\n';
        for (const auto& row : rows) {
            for (std::size_t i = 0; i < row.size(); ++i) {
                if (i) s += ',';
                std::visit(
                    [&](const auto& v) {
                        using T = std::decay_t<decltype(v)>;
                        if constexpr (std::is_same_v<T, std::string>) s += csv_field(v);
                        else if constexpr (std::is_same_v<T, double>) s += format_double(v);
                        else s += std::to_string(v);
                    },
                    row[i]);
            }
            s += '\n';
        }
        return s;
    }

    json to_json() const {
        json arr = json::array();
        for (const auto& row : rows) {
            json obj = json::object();
            for (std::size_t i = 0; i < row.size(); ++i)
                std::visit([&](const auto& v) { obj[columns[i]] = v; }, row[i]);
            arr.push_back(std::move(obj));
        }
        return arr;
    }
};

void write_text(const std::string& path, const std::string& text, std::ostream& out) {
    if (path.empty()) {
        out << text;
        return;
    }
    std::ofstream f(path, std::ios::binary);
    if (!f) throw ConfigError("cannot open output file " + path);
    f << text;
    if (!f) throw ConfigError("failed writing " + path);
}

std::string json_text(const json& j) { return j.dump(2) + "\n"; }

void emit(const Table& t, const RunConfig& cfg, std::ostream& out, json extra = json::object()) {
    if (cfg.format == Format::Csv) {
        write_text(cfg.out_path, t.csv(), out);
        return;
    }
    json doc = {{"schema_version", 1}};
    for (auto& [k, v] : extra.items()) doc[k] = v;
    doc["rows"] = t.to_json();
    write_text(cfg.out_path, json_text(doc), out);
}

// ---------------------------------------------------------------- config

template <class T>
T get_as(const json& j, const char* key) {
    try {
        return j.get<T>();
    } catch (const json::exception&) {
        throw ConfigError(std::string("config key '") + key + "' has the wrong type");
    }
}

Format parse_format(const std::string& s) {
    if (s == "csv") return Format::Csv;
    if (s == "json") return Format::Json;
    throw ConfigError("format must be csv or json, got '" + s + "'");
}

std::string sidecar_path(const std::string& out) {
    const auto dot = out.rfind('.');
    const auto slash = out.find_last_of('/');
    if (dot != std::string::npos && (slash == std::string::npos || dot > slash))
        return out.substr(0, dot) + ".json";
    return out + ".json";
}

double fitted_decay_exponent(const std::vector<double>& xs, const std::vector<double>& ys) {
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    const double n = static_cast<double>(xs.size());
    for (std::size_t i = 0; i < xs.size(); ++i) {
        const double x = std::log(xs[i]), y = std::log(ys[i]);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

} // namespace

ChannelSpec parse_channel(std::string_view name) {
    OmegaSign sign = OmegaSign::Positive;
    bool explicit_sign = false;
    if (!name.empty() && name.back() == '-') {
        name.remove_suffix(1);
        sign = OmegaSign::Negative;
        explicit_sign = true;
    }
    const auto kind = parse_channel_kind(name);
    if (!kind) throw ConfigError("unknown channel '" + std::string(name) + "'");
    try {
        return explicit_sign ? ChannelSpec(*kind, sign) : ChannelSpec(*kind);
    } catch (const DomainError& e) {
        throw ConfigError(e.what());
    }
}

void RunConfig::validate() const {
    try {
        params.validate();
    } catch (const DomainError& e) {
        throw ConfigError(e.what());
    }
    if (k_list.empty()) throw ConfigError("k_list must not be empty");
    for (double k : k_list)
        if (!(k > 0.0) || !std::isfinite(k)) throw ConfigError("every k must be finite and > 0");
    if (qmax < 10) throw ConfigError("qmax must be at least 10");
    if (bins_per_decade < 1) throw ConfigError("bins_per_decade must be positive");
    if (enumeration_cap < 0) throw ConfigError("enumeration_cap must be nonnegative");
    if (omega_grid) {
        const OmegaGrid& g = *omega_grid;
        if (g.count < 2) throw ConfigError("omega_grid.count must be at least 2");
        if (!(g.min < g.max) || !std::isfinite(g.min) || !std::isfinite(g.max))
            throw ConfigError("omega_grid needs finite min < max");
        if (g.spacing == OmegaGrid::Spacing::Log && !(g.min > 0.0))
            throw ConfigError("log omega_grid offsets need min > 0");
    }
}

RunConfig parse_run_config(std::string_view json_text) {
    json j;
    try {
        j = json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("config is not valid JSON: ") + e.what());
    }
    if (!j.is_object()) throw ConfigError("config must be a JSON object");

    RunConfig cfg;
    for (auto& [key, val] : j.items()) {
        const char* k = key.c_str();
        if (key == "xi") cfg.params.xi = get_as<double>(val, k);
        else if (key == "v") cfg.params.v = get_as<double>(val, k);
        else if (key == "m_eff") cfg.params.m_eff = get_as<double>(val, k);
        else if (key == "L") cfg.params.L = get_as<double>(val, k);
        else if (key == "c0") cfg.params.c0 = get_as<double>(val, k);
        else if (key == "ff_norm") cfg.params.ff_norm = get_as<double>(val, k);
        else if (key == "channel") cfg.channel = parse_channel(get_as<std::string>(val, k));
        else if (key == "k_list") cfg.k_list = get_as<std::vector<double>>(val, k);
        else if (key == "qmax") cfg.qmax = get_as<std::int64_t>(val, k);
        else if (key == "bins_per_decade") cfg.bins_per_decade = get_as<int>(val, k);
        else if (key == "enumeration_cap") cfg.enumeration_cap = get_as<int>(val, k);
        else if (key == "seed") cfg.seed = get_as<std::uint64_t>(val, k);
        else if (key == "omega_grid") {
            if (!val.is_object()) throw ConfigError("omega_grid must be an object");
            OmegaGrid g;
            for (auto& [gk, gv] : val.items()) {
                if (gk == "min") g.min = get_as<double>(gv, "omega_grid.min");
                else if (gk == "max") g.max = get_as<double>(gv, "omega_grid.max");
                else if (gk == "count") g.count = get_as<int>(gv, "omega_grid.count");
                else if (gk == "spacing") {
                    const auto s = get_as<std::string>(gv, "omega_grid.spacing");
                    if (s == "linear") g.spacing = OmegaGrid::Spacing::Linear;
                    else if (s == "log") g.spacing = OmegaGrid::Spacing::Log;
                    else throw ConfigError("omega_grid.spacing must be linear or log");
                } else throw ConfigError("unknown key omega_grid." + gk);
            }
            cfg.omega_grid = g;
        } else if (key == "output") {
            if (!val.is_object()) throw ConfigError("output must be an object");
            for (auto& [ok, ov] : val.items()) {
                if (ok == "path") cfg.out_path = get_as<std::string>(ov, "output.path");
                else if (ok == "format")
                    cfg.format = parse_format(get_as<std::string>(ov, "output.format"));
                else throw ConfigError("unknown key output." + ok);
            }
        } else {
            throw ConfigError("unknown config key '" + key + "'");
        }
    }
    if (j.contains("c0") && j.contains("ff_norm"))
        throw ConfigError("c0 and ff_norm are mutually exclusive");
    cfg.validate();
    return cfg;
}

RunConfig load_run_config(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw ConfigError("cannot read config file " + path);
    std::ostringstream ss;
    ss << f.rdbuf();
    return parse_run_config(ss.str());
}

namespace {

// ---------------------------------------------------------------- commands

void cmd_exponents(const RunConfig& cfg, const std::vector<double>& xi_list, std::ostream& out) {
    Table t{{"channel", "xi", "a", "delta1", "delta2", "alpha", "mu", "residual", "degenerate"}, {}};
    std::vector<ChannelSpec> channels;
    for (ChannelKind kind : kAllChannelKinds) {
        channels.emplace_back(kind);
        if (kind == ChannelKind::BosonParticle || kind == ChannelKind::BosonHole)
            channels.emplace_back(kind, OmegaSign::Negative);
    }
    for (double xi : xi_list) {
        for (const auto& ch : channels) {
            const ExponentSet e = exponents_for_channel(ch, xi);
            t.add({ch.name(), xi, e.a, e.delta1, e.delta2, e.alpha, e.mu, e.cancellation_residual(),
                   e.degeneracy.value_or("")});
        }
    }
    emit(t, cfg, out);
}

void cmd_sumrule(const RunConfig& cfg, int m_max, const std::vector<double>& a_list,
                 std::ostream& out) {
    if (m_max < 0) throw ConfigError("--m-max must be nonnegative");
    Table t{{"m", "a", "configs", "bruteforce", "closed", "rel_err"}, {}};
    for (double a : a_list) {
        for (int m = 0; m <= m_max; ++m) {
            const auto configs = enumerate_configs(m, cfg.enumeration_cap);
            double brute = 0.0;
            for (const auto& c : configs) brute += formfactor(c, a).squared();
            const double closed = sum_rule_closed(m, a * a);
            t.add({std::int64_t{m}, a, static_cast<std::int64_t>(configs.size()), brute, closed,
                   std::fabs(brute / closed - 1.0)});
        }
    }
    emit(t, cfg, out);
}

void cmd_shiftcheck(const RunConfig& cfg, const std::vector<std::int64_t>& p_list, double a,
                    const ParticleHoleConfig& low, std::ostream& out) {
    std::vector<double> ps, devs;
    for (auto p : p_list) {
        ps.push_back(static_cast<double>(p));
        devs.push_back(shift_reduction_check(p, low, a));
    }
    std::string label;
    for (auto x : low.particles()) label += (label.empty() ? "" : " ") + std::to_string(x);
    label += " |";
    for (auto x : low.holes()) label += " " + std::to_string(x);

    const bool fit = ps.size() >= 2 && std::all_of(devs.begin(), devs.end(),
                                                   [](double d) { return d > 0.0; });
    std::vector<std::string> cols{"p", "a", "config", "deviation"};
    if (fit) cols.push_back("fitted_decay_exponent");
    Table t{cols, {}};
    const double slope = fit ? fitted_decay_exponent(ps, devs) : 0.0;
    for (std::size_t i = 0; i < ps.size(); ++i) {
        std::vector<Cell> row{p_list[i], a, label, devs[i]};
        if (fit) row.emplace_back(slope);
        t.add(std::move(row));
    }
    emit(t, cfg, out);
}

void cmd_dsf(const RunConfig& cfg, std::ostream& out) {
    const LuttingerParams& p = cfg.params;
    Table t{{"k", "xi", "omega", "dsf", "eps2", "eps1"}, {}};
    for (double k : cfg.k_list) {
        const double lo = dispersion(Branch::Lower, k, p);
        const double hi = dispersion(Branch::Upper, k, p);
        double wmin = lo - 0.5 * (hi - lo), wmax = hi + 0.5 * (hi - lo);
        int count = 101;
        if (cfg.omega_grid) {
            if (cfg.omega_grid->spacing != OmegaGrid::Spacing::Linear)
                throw ConfigError("dsf supports only a linear omega_grid");
            wmin = cfg.omega_grid->min;
            wmax = cfg.omega_grid->max;
            count = cfg.omega_grid->count;
        }
        for (int i = 0; i < count; ++i) {
            const double w = wmin + (wmax - wmin) * i / (count - 1);
            t.add({k, p.xi, w, dsf_step(w, k, p), lo, hi});
        }
    }
    emit(t, cfg, out);
}

json fit_json(const PowerLawFit& f) {
    return {{"slope", f.slope}, {"intercept", f.intercept}, {"window", {f.lo, f.hi}},
            {"bins", f.bins}};
}

void cmd_spectral(const RunConfig& cfg, std::ostream& out) {
    const LuttingerParams& p = cfg.params;
    const ChannelSpec& ch = cfg.channel;
    const ExponentSet e = exponents_for_channel(ch, p.xi);
    e.require_nondegenerate();

    Table t{{"channel", "xi", "k", "omega", "domega", "A_finiteL", "A_continuum", "rel_dev"}, {}};
    json results = json::array();

    for (double k : cfg.k_list) {
        const Histogram h = finite_L_sum(ch, k, p, cfg.qmax, HistogramSpec{cfg.bins_per_decade});
        const ThresholdAnalysis an = analyze_threshold(ch, k, p, cfg.qmax, h);

        auto add_row = [&](double omega, double domega, double fin, double cont) {
            double rel = 0.0;
            if (cont > 0.0) rel = fin / cont - 1.0;
            else if (fin != 0.0)
                throw NumericError("finite-size weight where the continuum form vanishes");
            t.add({ch.name(), p.xi, k, omega, domega, fin, cont, rel});
        };

        if (!cfg.omega_grid) {
            for (std::size_t i = 0; i < h.size(); ++i) {
                const double d = h.centre(i);
                add_row(omega_of(ch, d, k, p), d, h.weights[i],
                        continuum_bin_average(ch, k, h.lower(i), h.upper(i), p));
            }
        } else {
            const OmegaGrid& g = *cfg.omega_grid;
            std::vector<double> domegas;
            if (g.spacing == OmegaGrid::Spacing::Linear) {
                for (int i = 0; i < g.count; ++i)
                    domegas.push_back(
                        domega_of(ch, g.min + (g.max - g.min) * i / (g.count - 1), k, p));
            } else {
                std::vector<double> mags;
                for (int i = 0; i < g.count; ++i)
                    mags.push_back(g.min * std::pow(g.max / g.min, double(i) / (g.count - 1)));
                for (auto it = mags.rbegin(); it != mags.rend(); ++it) domegas.push_back(-*it);
                domegas.insert(domegas.end(), mags.begin(), mags.end());
            }
            for (double d : domegas) {
                // The finite-size value is a bin average; compare it with the
                // continuum averaged over the same bin.
                if (const auto i = h.find(d)) {
                    add_row(omega_of(ch, d, k, p), d, h.weights[*i],
                            continuum_bin_average(ch, k, h.lower(*i), h.upper(*i), p));
                } else {
                    add_row(omega_of(ch, d, k, p), d, 0.0, continuum_at(ch, k, d, p));
                }
            }
        }

        json r = {{"k", k},
                  {"analytic_exponent", e.mu},
                  {"analytic_slope", an.analytic_slope},
                  {"fit_above", fit_json(an.above)},
                  {"fitted_slope", an.above.slope}};
        if (an.below) {
            r["fit_below"] = fit_json(*an.below);
            r["fitted_slope_below"] = an.below->slope;
            r["amplitude_ratio"] = *an.amplitude_ratio;
            r["analytic_amplitude_ratio"] = *an.analytic_ratio;
            r["amplitude_ratio_at"] = an.ratio_at;
        }
        results.push_back(std::move(r));
    }

    json meta = {{"channel", ch.name()},
                 {"xi", p.xi},
                 {"v", p.v},
                 {"m_eff", p.m_eff},
                 {"L", p.L},
                 {"ff_norm", p.normalization(e.alpha)},
                 {"qmax", cfg.qmax},
                 {"bins_per_decade", cfg.bins_per_decade},
                 {"seed", cfg.seed},
                 {"exponents",
                  {{"a", e.a}, {"delta1", e.delta1}, {"delta2", e.delta2}, {"alpha", e.alpha},
                   {"mu", e.mu}, {"branch", std::string(to_string(e.branch))}}},
                 {"results", results}};

    emit(t, cfg, out, meta);
    if (cfg.format == Format::Csv && !cfg.out_path.empty()) {
        json side = {{"schema_version", 1}};
        for (auto& [key, v] : meta.items()) side[key] = v;
        write_text(sidecar_path(cfg.out_path), json_text(side), out);
    }
}

} // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Threshold singularities of one-dimensional dynamical correlators"};
    app.require_subcommand(1);

    std::string config_path, out_path, format;
    auto common = [&](CLI::App* sub) {
        sub->add_option("--config", config_path, "JSON run configuration")
            ->check(CLI::ExistingFile);
        sub->add_option("--out", out_path, "output file (default: standard output)");
        sub->add_option("--format", format, "csv or json")
            ->check(CLI::IsMember({"csv", "json"}));
    };

    std::vector<double> xi_list;
    auto* exponents = app.add_subcommand("exponents", "exponent sets of every channel");
    common(exponents);
    exponents->add_option("--xi", xi_list, "Luttinger parameters (default 0.25 0.5 1 2 4)");

    int m_max = 12;
    std::vector<double> a_list{0.3, 0.7, 1.25, 1.9};
    std::optional<int> cap;
    auto* sumrule = app.add_subcommand("sumrule", "brute-force vs closed-form sum rule");
    common(sumrule);
    sumrule->add_option("--m-max", m_max, "largest total momentum")->capture_default_str();
    sumrule->add_option("--a", a_list, "formfactor exponents")->capture_default_str();
    sumrule->add_option("--cap", cap, "enumeration cap (default 40)");

    std::optional<double> xi;
    std::string channel;
    std::vector<double> ks;
    std::optional<std::int64_t> qmax;
    std::optional<int> bpd;
    auto* spectral = app.add_subcommand("spectral", "finite-size sum vs continuum threshold form");
    common(spectral);
    spectral->add_option("--xi", xi);
    spectral->add_option("--channel", channel, "e.g. FermionParticle, BosonHole-");
    spectral->add_option("--k", ks, "momenta");
    spectral->add_option("--qmax", qmax, "grid truncation");
    spectral->add_option("--bins-per-decade", bpd);

    std::vector<std::int64_t> p_list{100, 1000, 10000};
    double shift_a = 1.25;
    std::vector<std::int64_t> particles{1}, holes{0};
    auto* shiftcheck = app.add_subcommand("shiftcheck", "high-energy particle shift reduction");
    common(shiftcheck);
    shiftcheck->add_option("--p", p_list, "high-energy particle positions")->capture_default_str();
    shiftcheck->add_option("--a", shift_a)->capture_default_str();
    shiftcheck->add_option("--particles", particles, "low-energy particles")->capture_default_str();
    shiftcheck->add_option("--holes", holes, "low-energy holes")->capture_default_str();

    auto* dsf = app.add_subcommand("dsf", "small-k density structure factor");
    common(dsf);
    dsf->add_option("--xi", xi);
    dsf->add_option("--k", ks, "momenta");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e, out, err) == 0 ? kOk : kConfigError;
    }

    try {
        RunConfig cfg = config_path.empty() ? RunConfig{} : load_run_config(config_path);
        if (xi) cfg.params.xi = *xi;
        if (!channel.empty()) cfg.channel = parse_channel(channel);
        if (!ks.empty()) cfg.k_list = ks;
        if (qmax) cfg.qmax = *qmax;
        if (bpd) cfg.bins_per_decade = *bpd;
        if (cap) cfg.enumeration_cap = *cap;
        if (!out_path.empty()) cfg.out_path = out_path;
        if (!format.empty()) cfg.format = parse_format(format);
        cfg.validate();

        if (exponents->parsed()) {
            if (xi_list.empty())
                xi_list = config_path.empty() ? std::vector<double>{0.25, 0.5, 1.0, 2.0, 4.0}
                                              : std::vector<double>{cfg.params.xi};
            for (double x : xi_list)
                if (!(x > 0.0)) throw ConfigError("xi must be positive");
            cmd_exponents(cfg, xi_list, out);
        } else if (sumrule->parsed()) {
            cmd_sumrule(cfg, m_max, a_list, out);
        } else if (spectral->parsed()) {
            cmd_spectral(cfg, out);
        } else if (shiftcheck->parsed()) {
            ParticleHoleConfig low;
            try {
                low = ParticleHoleConfig::make(particles, holes);
            } catch (const DomainError& e) {
                throw ConfigError(e.what());
            }
            cmd_shiftcheck(cfg, p_list, shift_a, low, out);
        } else if (dsf->parsed()) {
            cmd_dsf(cfg, out);
        }
        return kOk;
    } catch (const ConfigError& e) {
        err << "config error: " << e.what() << '\n';
        return kConfigError;
    } catch (const DegenerateChannelError& e) {
        err << "degenerate channel: " << e.what() << '\n';
        return kDegenerate;
    } catch (const GammaPoleError& e) {
        err << "gamma pole: " << e.what() << '\n';
        return kDegenerate;
    } catch (const CapExceededError& e) {
        err << "config error: " << e.what() << '\n';
        return kConfigError;
    } catch (const DomainError& e) {
        err << "invalid input: " << e.what() << '\n';
        return kConfigError;
    } catch (const NumericError& e) {
        err << "numeric failure: " << e.what() << '\n';
        return kNumericFailure;
    } catch (const std::exception& e) {
        err << "numeric failure: " << e.what() << '\n';
        return kNumericFailure;
    }
}

} // namespace nlll::cli
