#include "chemovir/config.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include <charconv>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

namespace chemovir {

namespace {

namespace pt = boost::property_tree;

[[noreturn]] void fail(const std::string& origin, const std::string& what) {
    throw ConfigError(origin + ": " + what);
}

std::string trimmed(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

double parse_double(const std::string& origin, const std::string& where,
                    const std::string& raw) {
    const std::string text = trimmed(raw);
    double out{};
    const auto [p, ec] = std::from_chars(text.data(), text.data() + text.size(), out);
    if (ec != std::errc{} || p != text.data() + text.size())
        fail(origin, "invalid number '" + raw + "' for " + where);
    return out;
}

long long parse_integer(const std::string& origin, const std::string& where,
                        const std::string& raw) {
    const std::string text = trimmed(raw);
    long long out{};
    const auto [p, ec] = std::from_chars(text.data(), text.data() + text.size(), out);
    if (ec != std::errc{} || p != text.data() + text.size())
        fail(origin, "invalid integer '" + raw + "' for " + where);
    return out;
}

std::uint64_t parse_seed(const std::string& origin, const std::string& where,
                         const std::string& raw) {
    const std::string text = trimmed(raw);
    std::uint64_t out{};
    const auto [p, ec] = std::from_chars(text.data(), text.data() + text.size(), out);
    if (ec != std::errc{} || p != text.data() + text.size())
        fail(origin, "invalid seed '" + raw + "' for " + where);
    return out;
}

bool parse_bool(const std::string& origin, const std::string& where,
                const std::string& raw) {
    const std::string text = trimmed(raw);
    if (text == "true") return true;
    if (text == "false") return false;
    fail(origin, "expected true/false for " + where + ", got '" + raw + "'");
}

std::vector<std::string> split_list(const std::string& raw) {
    std::vector<std::string> items;
    std::string item;
    std::istringstream in(raw);
    while (std::getline(in, item, ',')) items.push_back(trimmed(item));
    return items;
}

std::vector<double> parse_double_list(const std::string& origin,
                                      const std::string& where,
                                      const std::string& raw) {
    std::vector<double> out;
    for (const auto& item : split_list(raw))
        out.push_back(parse_double(origin, where, item));
    if (out.empty()) fail(origin, "empty list for " + where);
    return out;
}

std::vector<std::uint64_t> parse_seed_list(const std::string& origin,
                                           const std::string& where,
                                           const std::string& raw) {
    std::vector<std::uint64_t> out;
    for (const auto& item : split_list(raw))
        out.push_back(parse_seed(origin, where, item));
    if (out.empty()) fail(origin, "empty list for " + where);
    return out;
}

template <typename Enum>
Enum parse_enum(const std::string& origin, const std::string& where,
                const std::string& raw,
                std::initializer_list<std::pair<const char*, Enum>> table) {
    const std::string text = trimmed(raw);
    std::string choices;
    for (const auto& [name, value] : table) {
        if (text == name) return value;
        if (!choices.empty()) choices += ", ";
        choices += name;
    }
    fail(origin, "invalid value '" + raw + "' for " + where + " (one of: " + choices + ")");
}

}  // namespace

RunConfig parse_run_config(std::istream& in, const std::string& origin) {
    pt::ptree tree;
    try {
        pt::read_ini(in, tree);
    } catch (const pt::ini_parser_error& e) {
        throw ConfigError(origin + ":" + std::to_string(e.line()) + ": " + e.message());
    }

    RunConfig cfg;
    using Handler = std::function<void(const std::string&)>;
    std::map<std::string, std::map<std::string, Handler>> handlers;

    auto& model = cfg.setup.model;
    handlers["model"] = {
        {"system",
         [&](const std::string& v) {
             model.system = parse_enum<SystemKind>(
                 origin, "[model] system", v,
                 {{"may_nowak", SystemKind::MayNowakChemotaxis},
                  {"may_nowak_ode", SystemKind::MayNowakODE},
                  {"ks_parabolic_parabolic", SystemKind::KSParabolicParabolic},
                  {"ks_parabolic_elliptic", SystemKind::KSParabolicElliptic}});
         }},
        {"conversion",
         [&](const std::string& v) {
             model.conversion.kind = parse_enum<ConversionKind>(
                 origin, "[model] conversion", v,
                 {{"saturated", ConversionKind::Saturated},
                  {"power_law", ConversionKind::PowerLaw},
                  {"identity", ConversionKind::Identity},
                  {"custom", ConversionKind::Custom}});
         }},
        {"alpha", [&](const std::string& v) { model.conversion.alpha = parse_double(origin, "[model] alpha", v); }},
        {"growth_constant", [&](const std::string& v) { model.conversion.growth_constant = parse_double(origin, "[model] growth_constant", v); }},
        {"table_s", [&](const std::string& v) { model.conversion.table_s = parse_double_list(origin, "[model] table_s", v); }},
        {"table_f", [&](const std::string& v) { model.conversion.table_f = parse_double_list(origin, "[model] table_f", v); }},
        {"kappa", [&](const std::string& v) { model.kappa = parse_double(origin, "[model] kappa", v); }},
        {"chi", [&](const std::string& v) { model.chi = parse_double(origin, "[model] chi", v); }},
        {"diff_u", [&](const std::string& v) { model.diff_u = parse_double(origin, "[model] diff_u", v); }},
        {"diff_v", [&](const std::string& v) { model.diff_v = parse_double(origin, "[model] diff_v", v); }},
        {"diff_w", [&](const std::string& v) { model.diff_w = parse_double(origin, "[model] diff_w", v); }},
        {"decay_u", [&](const std::string& v) { model.decay_u = parse_double(origin, "[model] decay_u", v); }},
        {"decay_v", [&](const std::string& v) { model.decay_v = parse_double(origin, "[model] decay_v", v); }},
        {"decay_w", [&](const std::string& v) { model.decay_w = parse_double(origin, "[model] decay_w", v); }},
        {"production", [&](const std::string& v) { model.production = parse_double(origin, "[model] production", v); }},
    };

    auto& grid = cfg.setup.grid;
    handlers["grid"] = {
        {"geometry",
         [&](const std::string& v) {
             grid.geometry = parse_enum<Geometry>(
                 origin, "[grid] geometry", v,
                 {{"interval", Geometry::Interval},
                  {"rectangle", Geometry::Rectangle},
                  {"radial_disk", Geometry::RadialDisk}});
         }},
        {"length_x", [&](const std::string& v) { grid.length_x = parse_double(origin, "[grid] length_x", v); }},
        {"length_y", [&](const std::string& v) { grid.length_y = parse_double(origin, "[grid] length_y", v); }},
        {"cells_x", [&](const std::string& v) { grid.cells_x = static_cast<int>(parse_integer(origin, "[grid] cells_x", v)); }},
        {"cells_y", [&](const std::string& v) { grid.cells_y = static_cast<int>(parse_integer(origin, "[grid] cells_y", v)); }},
    };

    auto& stepper = cfg.setup.stepper;
    handlers["stepper"] = {
        {"scheme",
         [&](const std::string& v) {
             stepper.scheme = parse_enum<Scheme>(origin, "[stepper] scheme", v,
                                                 {{"imex_euler", Scheme::IMEXEuler},
                                                  {"explicit_rk4", Scheme::ExplicitRK4}});
         }},
        {"dt_init", [&](const std::string& v) { stepper.dt_init = parse_double(origin, "[stepper] dt_init", v); }},
        {"dt_min", [&](const std::string& v) { stepper.dt_min = parse_double(origin, "[stepper] dt_min", v); }},
        {"dt_max", [&](const std::string& v) { stepper.dt_max = parse_double(origin, "[stepper] dt_max", v); }},
        {"cfl_safety", [&](const std::string& v) { stepper.cfl_safety = parse_double(origin, "[stepper] cfl_safety", v); }},
        {"t_end", [&](const std::string& v) { stepper.t_end = parse_double(origin, "[stepper] t_end", v); }},
        {"blowup_threshold", [&](const std::string& v) { stepper.blowup_threshold = parse_double(origin, "[stepper] blowup_threshold", v); }},
    };

    auto& initial = cfg.setup.initial;
    handlers["initial"] = {
        {"family",
         [&](const std::string& v) {
             initial.family = parse_enum<InitialFamily>(
                 origin, "[initial] family", v,
                 {{"random_bump", InitialFamily::RandomBump},
                  {"concentrated_gaussian", InitialFamily::ConcentratedGaussian},
                  {"constant", InitialFamily::Constant}});
         }},
        {"seed", [&](const std::string& v) { initial.seed = parse_seed(origin, "[initial] seed", v); }},
        {"mass_u", [&](const std::string& v) { initial.mass_u = parse_double(origin, "[initial] mass_u", v); }},
        {"mass_v", [&](const std::string& v) { initial.mass_v = parse_double(origin, "[initial] mass_v", v); }},
        {"mass_w", [&](const std::string& v) { initial.mass_w = parse_double(origin, "[initial] mass_w", v); }},
        {"width", [&](const std::string& v) { initial.width = parse_double(origin, "[initial] width", v); }},
    };

    handlers["diagnostics"] = {
        {"sample_interval", [&](const std::string& v) { cfg.setup.sample_interval = parse_double(origin, "[diagnostics] sample_interval", v); }},
        {"q", [&](const std::string& v) { cfg.setup.q = parse_double(origin, "[diagnostics] q", v); }},
    };

    handlers["output"] = {
        {"directory", [&](const std::string& v) { cfg.output.directory = trimmed(v); }},
        {"svg", [&](const std::string& v) { cfg.output.svg = parse_bool(origin, "[output] svg", v); }},
        {"snapshots", [&](const std::string& v) { cfg.output.snapshots = parse_bool(origin, "[output] snapshots", v); }},
    };

    handlers["sweep"] = {
        {"alpha_values", [&](const std::string& v) { cfg.sweep->alpha_values = parse_double_list(origin, "[sweep] alpha_values", v); }},
        {"kappa_values", [&](const std::string& v) { cfg.sweep->kappa_values = parse_double_list(origin, "[sweep] kappa_values", v); }},
        {"seeds", [&](const std::string& v) { cfg.sweep->seeds = parse_seed_list(origin, "[sweep] seeds", v); }},
        {"estimate_critical", [&](const std::string& v) { cfg.sweep->estimate_critical = parse_bool(origin, "[sweep] estimate_critical", v); }},
        {"bracket_lo", [&](const std::string& v) { cfg.sweep->bracket_lo = parse_double(origin, "[sweep] bracket_lo", v); }},
        {"bracket_hi", [&](const std::string& v) { cfg.sweep->bracket_hi = parse_double(origin, "[sweep] bracket_hi", v); }},
        {"iterations", [&](const std::string& v) { cfg.sweep->iterations = static_cast<int>(parse_integer(origin, "[sweep] iterations", v)); }},
    };

    for (const auto& [section, child] : tree) {
        if (child.empty() && !child.data().empty())
            fail(origin, "key '" + section + "' appears outside any section");
        const auto sect = handlers.find(section);
        if (sect == handlers.end()) fail(origin, "unknown section [" + section + "]");
        if (section == "sweep" && !cfg.sweep) cfg.sweep.emplace();
        for (const auto& [key, value] : child) {
            const auto handler = sect->second.find(key);
            if (handler == sect->second.end())
                fail(origin, "unknown key '" + key + "' in [" + section + "]");
            handler->second(value.data());
        }
    }
    cfg.setup.validate();
    return cfg;
}

RunConfig load_run_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError(path + ": cannot open config file");
    return parse_run_config(in, path);
}

std::string format_double(double value) {
    char buf[32];
    const auto [p, ec] = std::to_chars(buf, buf + sizeof buf, value);
    return std::string(buf, p);
}

std::string to_string(SystemKind k) {
    switch (k) {
        case SystemKind::MayNowakChemotaxis: return "may_nowak";
        case SystemKind::MayNowakODE: return "may_nowak_ode";
        case SystemKind::KSParabolicParabolic: return "ks_parabolic_parabolic";
        case SystemKind::KSParabolicElliptic: return "ks_parabolic_elliptic";
    }
    return "may_nowak";
}

std::string to_string(ConversionKind k) {
    switch (k) {
        case ConversionKind::Saturated: return "saturated";
        case ConversionKind::PowerLaw: return "power_law";
        case ConversionKind::Identity: return "identity";
        case ConversionKind::Custom: return "custom";
    }
    return "identity";
}

std::string to_string(Geometry g) {
    switch (g) {
        case Geometry::Interval: return "interval";
        case Geometry::Rectangle: return "rectangle";
        case Geometry::RadialDisk: return "radial_disk";
    }
    return "interval";
}

std::string to_string(Scheme s) {
    return s == Scheme::IMEXEuler ? "imex_euler" : "explicit_rk4";
}

std::string to_string(InitialFamily f) {
    switch (f) {
        case InitialFamily::RandomBump: return "random_bump";
        case InitialFamily::ConcentratedGaussian: return "concentrated_gaussian";
        case InitialFamily::Constant: return "constant";
    }
    return "constant";
}

namespace {

std::string join_doubles(const std::vector<double>& values) {
    std::string out;
    for (double v : values) {
        if (!out.empty()) out += ", ";
        out += format_double(v);
    }
    return out;
}

std::string join_seeds(const std::vector<std::uint64_t>& values) {
    std::string out;
    for (std::uint64_t v : values) {
        if (!out.empty()) out += ", ";
        out += std::to_string(v);
    }
    return out;
}

}  // namespace

std::string serialize_run_config(const RunConfig& config) {
    const auto& m = config.setup.model;
    const auto& g = config.setup.grid;
    const auto& st = config.setup.stepper;
    const auto& in = config.setup.initial;

    std::ostringstream out;
    out << "[model]\n";
    out << "system = " << to_string(m.system) << "\n";
    out << "conversion = " << to_string(m.conversion.kind) << "\n";
    out << "alpha = " << format_double(m.conversion.alpha) << "\n";
    out << "growth_constant = " << format_double(m.conversion.growth_constant) << "\n";
    if (m.conversion.kind == ConversionKind::Custom) {
        out << "table_s = " << join_doubles(m.conversion.table_s) << "\n";
        out << "table_f = " << join_doubles(m.conversion.table_f) << "\n";
    }
    out << "kappa = " << format_double(m.kappa) << "\n";
    out << "chi = " << format_double(m.chi) << "\n";
    out << "diff_u = " << format_double(m.diff_u) << "\n";
    out << "diff_v = " << format_double(m.diff_v) << "\n";
    out << "diff_w = " << format_double(m.diff_w) << "\n";
    out << "decay_u = " << format_double(m.decay_u) << "\n";
    out << "decay_v = " << format_double(m.decay_v) << "\n";
    out << "decay_w = " << format_double(m.decay_w) << "\n";
    out << "production = " << format_double(m.production) << "\n";

    out << "\n[grid]\n";
    out << "geometry = " << to_string(g.geometry) << "\n";
    out << "length_x = " << format_double(g.length_x) << "\n";
    out << "cells_x = " << g.cells_x << "\n";
    if (g.geometry == Geometry::Rectangle) {
        out << "length_y = " << format_double(g.length_y) << "\n";
        out << "cells_y = " << g.cells_y << "\n";
    }

    out << "\n[stepper]\n";
    out << "scheme = " << to_string(st.scheme) << "\n";
    out << "dt_init = " << format_double(st.dt_init) << "\n";
    out << "dt_min = " << format_double(st.dt_min) << "\n";
    out << "dt_max = " << format_double(st.dt_max) << "\n";
    out << "cfl_safety = " << format_double(st.cfl_safety) << "\n";
    out << "t_end = " << format_double(st.t_end) << "\n";
    out << "blowup_threshold = " << format_double(st.blowup_threshold) << "\n";

    out << "\n[initial]\n";
    out << "family = " << to_string(in.family) << "\n";
    out << "seed = " << in.seed << "\n";
    out << "mass_u = " << format_double(in.mass_u) << "\n";
    out << "mass_v = " << format_double(in.mass_v) << "\n";
    out << "mass_w = " << format_double(in.mass_w) << "\n";
    out << "width = " << format_double(in.width) << "\n";

    out << "\n[diagnostics]\n";
    out << "sample_interval = " << format_double(config.setup.sample_interval) << "\n";
    out << "q = " << format_double(config.setup.q) << "\n";

    out << "\n[output]\n";
    out << "directory = " << config.output.directory << "\n";
    out << "svg = " << (config.output.svg ? "true" : "false") << "\n";
    out << "snapshots = " << (config.output.snapshots ? "true" : "false") << "\n";

    if (config.sweep) {
        out << "\n[sweep]\n";
        out << "alpha_values = " << join_doubles(config.sweep->alpha_values) << "\n";
        out << "kappa_values = " << join_doubles(config.sweep->kappa_values) << "\n";
        out << "seeds = " << join_seeds(config.sweep->seeds) << "\n";
        out << "estimate_critical = " << (config.sweep->estimate_critical ? "true" : "false") << "\n";
        out << "bracket_lo = " << format_double(config.sweep->bracket_lo) << "\n";
        out << "bracket_hi = " << format_double(config.sweep->bracket_hi) << "\n";
        out << "iterations = " << config.sweep->iterations << "\n";
    }
    return out.str();
}

}  // namespace chemovir
