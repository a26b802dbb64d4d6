#include "chemovir/output.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>

#include <nlohmann/json.hpp>

namespace chemovir {

namespace {

void append_cell(std::string& out, double value) { out += format_double(value); }

void append_cell(std::string& out, const std::optional<double>& value) {
    if (value) out += format_double(*value);
}

}  // namespace

std::string diagnostics_csv(const std::vector<DiagnosticsRow>& series) {
    std::string out(kDiagnosticsHeader);
    out += '\n';
    for (const auto& r : series) {
        append_cell(out, r.t);
        out += ',';
        append_cell(out, r.dt);
        out += ',';
        append_cell(out, r.mass_u);
        out += ',';
        append_cell(out, r.mass_v);
        out += ',';
        append_cell(out, r.mass_w);
        out += ',';
        append_cell(out, r.linf_u);
        out += ',';
        append_cell(out, r.linf_w);
        out += ',';
        append_cell(out, r.grad_v_lq);
        out += ',';
        append_cell(out, r.functional_E);
        out += ',';
        append_cell(out, r.mass_ode_residual);
        out += '\n';
    }
    return out;
}

std::string sweep_summary_csv(const SweepResult& result) {
    std::string out =
        "alpha,kappa,seed,classification,t_detect,peak_linf_u,peak_grad_v_lq,"
        "peak_linf_w\n";
    for (const auto& e : result.entries) {
        out += format_double(e.alpha);
        out += ',';
        out += format_double(e.kappa);
        out += ',';
        out += std::to_string(e.seed);
        out += ',';
        out += to_string(e.outcome.classification);
        out += ',';
        out += format_double(e.outcome.t_detect);
        out += ',';
        out += format_double(e.outcome.peak_linf_u);
        out += ',';
        out += format_double(e.outcome.peak_grad_v_lq);
        out += ',';
        out += format_double(e.outcome.peak_linf_w);
        out += '\n';
    }
    return out;
}

std::string run_summary_json(const RunConfig& config, const RunRecord& record) {
    nlohmann::ordered_json j;
    j["classification"] = to_string(record.outcome.classification);
    j["termination"] = to_string(record.outcome.termination);
    j["t_detect"] = record.outcome.t_detect;
    j["dt_collapsed"] = record.outcome.dt_collapsed;
    j["peaks"] = {{"linf_u", record.outcome.peak_linf_u},
                  {"grad_v_lq", record.outcome.peak_grad_v_lq},
                  {"linf_w", record.outcome.peak_linf_w}};
    j["plateau_ratio"] = record.outcome.plateau_ratio;
    j["functional"] = {{"applicable", record.functional.applicable},
                       {"sup_E", record.functional.sup_E},
                       {"plateau", record.functional.plateau},
                       {"fit_slope", record.functional.fit_slope},
                       {"fit_intercept", record.functional.fit_intercept}};
    j["steps"] = record.steps;
    j["rejections"] = record.rejections;
    j["positivity_margin"] = record.positivity_margin;
    j["rows"] = record.series.size();
    j["wall_seconds"] = record.wall_seconds;
    j["config_echo"] = serialize_run_config(config);
    return j.dump(2) + "\n";
}

std::string snapshot_csv(const State& state) {
    const Grid& g = *state.u.grid;
    const bool rect = g.spec.geometry == Geometry::Rectangle;
    const bool has_w = !state.w.empty();
    const bool has_v = !state.v.empty();

    std::string out = "t,x";
    if (rect) out += ",y";
    out += ",u";
    if (has_v) out += ",v";
    if (has_w) out += ",w";
    out += '\n';

    for (int j = 0; j < g.ny; ++j) {
        for (int i = 0; i < g.nx; ++i) {
            const int k = g.index(i, j);
            out += format_double(state.t);
            out += ',';
            out += format_double(g.cell_x(i));
            if (rect) {
                out += ',';
                out += format_double(g.cell_y(j));
            }
            out += ',';
            out += format_double(state.u[k]);
            if (has_v) {
                out += ',';
                out += format_double(state.v[k]);
            }
            if (has_w) {
                out += ',';
                out += format_double(state.w[k]);
            }
            out += '\n';
        }
    }
    return out;
}

namespace {

struct Trace {
    const char* label;
    const char* color;
    std::vector<std::pair<double, double>> points;
};

std::string polyline(const Trace& trace, double t0, double t1, double y1,
                     double x_px0, double x_px1, double y_px0, double y_px1) {
    std::string out = "  <polyline fill=\"none\" stroke=\"";
    out += trace.color;
    out += "\" stroke-width=\"1.5\" points=\"";
    const double tx = t1 > t0 ? (x_px1 - x_px0) / (t1 - t0) : 0.0;
    const double ty = y1 > 0.0 ? (y_px1 - y_px0) / y1 : 0.0;
    for (const auto& [t, y] : trace.points) {
        out += format_double(x_px0 + (t - t0) * tx);
        out += ',';
        out += format_double(y_px0 + y * ty);
        out += ' ';
    }
    out += "\"/>\n";
    return out;
}

}  // namespace

std::string monitors_svg(const std::vector<DiagnosticsRow>& series) {
    constexpr double left = 60, right = 620, top = 30, bottom = 360;

    std::vector<Trace> traces = {{"linf_u", "#1f6fb4", {}},
                                 {"grad_v_lq", "#c94f30", {}},
                                 {"linf_w", "#3a8f5a", {}}};
    for (const auto& r : series) {
        traces[0].points.emplace_back(r.t, r.linf_u);
        if (r.grad_v_lq) traces[1].points.emplace_back(r.t, *r.grad_v_lq);
        if (r.linf_w) traces[2].points.emplace_back(r.t, *r.linf_w);
    }

    double t0 = 0.0, t1 = 1.0, y_max = 0.0;
    if (!series.empty()) {
        t0 = series.front().t;
        t1 = std::max(series.back().t, t0 + 1e-12);
    }
    for (const auto& tr : traces)
        for (const auto& [t, y] : tr.points) y_max = std::max(y_max, y);
    if (y_max <= 0.0) y_max = 1.0;
    y_max *= 1.05;

    std::string svg =
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"640\" height=\"400\" "
        "viewBox=\"0 0 640 400\">\n"
        "  <rect x=\"0\" y=\"0\" width=\"640\" height=\"400\" fill=\"white\"/>\n";
    svg += "  <line x1=\"60\" y1=\"360\" x2=\"620\" y2=\"360\" stroke=\"black\"/>\n";
    svg += "  <line x1=\"60\" y1=\"30\" x2=\"60\" y2=\"360\" stroke=\"black\"/>\n";

    for (const auto& tr : traces) {
        if (tr.points.empty()) continue;
        svg += polyline(tr, t0, t1, y_max, left, right, bottom, top);
    }

    auto text = [](double x, double y, const std::string& s, const char* anchor,
                   const char* fill = "black") {
        std::string out = "  <text x=\"" + format_double(x) + "\" y=\"" +
                          format_double(y) + "\" font-size=\"12\" fill=\"" + fill +
                          "\" text-anchor=\"";
        out += anchor;
        out += "\">" + s + "</text>\n";
        return out;
    };
    svg += text(left, bottom + 18, format_double(t0), "middle");
    svg += text(right, bottom + 18, format_double(t1), "middle");
    svg += text(left - 6, bottom + 4, "0", "end");
    svg += text(left - 6, top + 4, format_double(y_max), "end");
    svg += text(0.5 * (left + right), bottom + 34, "t", "middle");

    double legend_y = top + 8;
    for (const auto& tr : traces) {
        if (tr.points.empty()) continue;
        svg += text(right - 4, legend_y, tr.label, "end", tr.color);
        legend_y += 16;
    }
    svg += "</svg>\n";
    return svg;
}

std::string study_csv(const std::vector<StudyRow>& rows) {
    std::string out = "h,error,observed_order\n";
    for (const auto& r : rows) {
        out += format_double(r.h);
        out += ',';
        out += format_double(r.error);
        out += ',';
        if (r.observed_order) out += format_double(*r.observed_order);
        out += '\n';
    }
    return out;
}

void write_text_file(const std::filesystem::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open for writing: " + path.string());
    out << content;
    if (!out) throw IoError("write failed: " + path.string());
}

}  // namespace chemovir
