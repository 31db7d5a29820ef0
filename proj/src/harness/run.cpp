#include "tsclab/harness/run.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "json.hpp"

namespace tsclab::harness {

using json = nlohmann::json;

namespace {

bool is_converter_model(const std::string& m) { return m == "gfl" || m == "gfm" || m == "vsm"; }

json number(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

json condition_json(const ph::ConditionResult& c) {
    return {{"verdict", std::string(ph::to_string(c.verdict))}, {"diagnostics", c.diagnostics}};
}

void write_file(const std::filesystem::path& p, const std::string& text) {
    std::ofstream out(p, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + p.string());
    out << text;
    if (!out) throw std::runtime_error("write failed for " + p.string());
}

}  // namespace

std::string format_number(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

RunReport make_report(const Scenario& s, const system::PowerSystem& sys, const SimulationResult& r,
                      double power_flow_mismatch) {
    RunReport rep;
    rep.scenario = s.name;
    rep.collapsed = r.status == RunStatus::Collapsed;
    rep.collapse_reason = r.collapse_reason;
    rep.end_time = r.end_time;
    rep.power_flow_mismatch = power_flow_mismatch;
    rep.steps = r.steps;
    rep.rejected_steps = r.rejected_steps;
    rep.audit = r.audit_summary;
    for (const auto& e : s.events) rep.last_event_time = std::max(rep.last_event_time, e.time);
    rep.classification =
        analysis::classify_trajectory(r.series, rep.collapsed, s.classification.settle_tol, s.classification.window);
    rep.trailing_spread = analysis::trailing_spread(r.series, s.classification.window);

    // Common frequency the converters must lock to: mean final voltage frequency.
    double wsum = 0.0;
    int wn = 0;
    const TimeSeries& ts = r.series;
    for (std::size_t k = 0; k < sys.device_count(); ++k) {
        const std::string& name = sys.device(k).name();
        if (!ts.has(name + ".v_D") || !ts.has(name + ".v_Q") || ts.size() < 5) continue;
        const std::size_t i0 = ts.size() - 5;
        const auto tail = [&](const std::string& ch) { return std::span<const double>(ts.column(ch)).subspan(i0, 5); };
        try {
            const auto f = ph::complex_frequency(std::span<const double>(ts.time()).subspan(i0, 5), tail(name + ".v_D"),
                                                 tail(name + ".v_Q"), s.condition3.frame_frequency, s.condition3.omega_b);
            wsum += f.omega.back();
            ++wn;
        } catch (const std::exception&) {
        }
    }
    rep.omega_settled = wn ? wsum / wn : std::numeric_limits<double>::quiet_NaN();

    for (std::size_t k = 0; k < sys.device_count(); ++k) {
        const auto& d = sys.device(k);
        DeviceReport dr;
        dr.name = d.name();
        dr.model = k < s.devices.size() ? s.devices[k].model : "";
        const ph::PhDeclaration decl = d.ph_declaration();
        dr.passivity_violation =
            k < r.audit_summary.device_passivity_violation.size() ? r.audit_summary.device_passivity_violation[k] : 0.0;
        dr.condition1 = ph::tsc_condition1(decl, dr.passivity_violation);
        dr.condition2 = ph::tsc_condition2(decl);
        if (is_converter_model(dr.model))
            dr.condition3 = ph::tsc_condition3(ts, dr.name, rep.collapsed, rep.last_event_time, rep.omega_settled,
                                               s.condition3);
        else
            dr.condition3 = {ph::Verdict::NotEvaluated, "not a converter"};
        const std::string prefix = dr.name + ".";
        if (!ts.empty())
            for (std::size_t c = 0; c < ts.names().size(); ++c) {
                const std::string& n = ts.names()[c];
                if (n.rfind(prefix, 0) == 0 && analysis::frame_invariant_channel(n))
                    dr.settled[n.substr(prefix.size())] = ts.column(c).back();
            }
        rep.devices.push_back(std::move(dr));
    }
    return rep;
}

RunOutput run_simulation(const Scenario& s) {
    RunOutput out;
    out.scenario = s;
    system::PowerSystem sys = build_system(s);
    const system::OperatingPoint op = sys.initialize();
    Simulator sim(std::move(sys), s.events, s.simulation);
    out.sim = sim.run(op);
    out.report = make_report(s, sim.system(), out.sim, op.power_flow_mismatch);
    return out;
}

RunOutput run_case(int study_case, const std::vector<std::string>& overrides) {
    Scenario s = case_scenario(study_case);
    for (const auto& o : overrides) apply_override(s, o);
    return run_simulation(s);
}

std::string timeseries_csv(const TimeSeries& ts, const std::vector<std::string>& channels) {
    std::vector<std::size_t> cols;
    if (channels.empty()) {
        for (std::size_t c = 0; c < ts.names().size(); ++c) cols.push_back(c);
    } else {
        for (const auto& ch : channels) {
            const auto c = ts.index(ch);
            if (!c) {
                std::string avail;
                for (const auto& n : ts.names()) avail += (avail.empty() ? "" : ", ") + n;
                throw ScenarioError("channels", "unknown channel '" + ch + "'; available: " + avail);
            }
            cols.push_back(*c);
        }
    }
    std::string out = "t";
    for (std::size_t c : cols) out += "," + ts.names()[c];
    out += '\n';
    for (std::size_t i = 0; i < ts.size(); ++i) {
        out += format_number(ts.time()[i]);
        for (std::size_t c : cols) {
            out += ',';
            out += format_number(ts.column(c)[i]);
        }
        out += '\n';
    }
    return out;
}

std::string audit_csv(const std::vector<AuditRecord>& audit) {
    std::string out = "t,H,Hdot_grad,Hdot_ports,residual,p_source,p_interconn,p_diss,rho_limiter\n";
    for (const auto& a : audit) {
        for (double v : {a.t, a.h, a.hdot_grad, a.hdot_ports, a.residual, a.p_source, a.p_interconn, a.p_diss})
            out += format_number(v) + ",";
        out += format_number(a.rho_limiter) + "\n";
    }
    return out;
}

std::string report_json(const RunReport& r) {
    json j;
    j["scenario"] = r.scenario;
    j["status"] = r.collapsed ? "COLLAPSED" : "COMPLETED";
    j["classification"] = std::string(analysis::to_string(r.classification));
    if (r.collapsed) j["collapse_reason"] = r.collapse_reason;
    j["end_time"] = number(r.end_time);
    j["last_event_time"] = number(r.last_event_time);
    j["trailing_spread"] = {{"value", number(r.trailing_spread.first)}, {"channel", r.trailing_spread.second}};
    j["omega_settled"] = number(r.omega_settled);
    j["power_flow_mismatch"] = number(r.power_flow_mismatch);
    j["steps"] = r.steps;
    j["rejected_steps"] = r.rejected_steps;
    j["audit"] = {{"records", r.audit.records},
                  {"max_balance_residual", number(r.audit.max_balance_residual)},
                  {"max_skew_residual", number(r.audit.max_skew_residual)},
                  {"min_dissipation", number(r.audit.min_dissipation)},
                  {"min_r_eigenvalue", number(r.audit.min_r_eigenvalue)},
                  {"max_structure_error", number(r.audit.max_structure_error)},
                  {"max_passivity_violation", number(r.audit.max_passivity_violation)}};
    j["devices"] = json::array();
    for (const auto& d : r.devices) {
        json s = json::object();
        for (const auto& [k, v] : d.settled) s[k] = number(v);
        j["devices"].push_back({{"name", d.name},
                                {"model", d.model},
                                {"condition1", condition_json(d.condition1)},
                                {"condition2", condition_json(d.condition2)},
                                {"condition3", condition_json(d.condition3)},
                                {"passivity_violation", number(d.passivity_violation)},
                                {"settled", s}});
    }
    return j.dump(2) + "\n";
}

std::string sweep_report_json(const analysis::SweepResult& r) {
    json j;
    j["parameter"] = r.parameter;
    j["device"] = r.device;
    j["points"] = json::array();
    for (const auto& p : r.points) {
        json crit = json::array();
        for (const auto& c : p.critical)
            crit.push_back({{"device", c.device},
                            {"re", c.lambda ? number(c.lambda->real()) : json(nullptr)},
                            {"im", c.lambda ? number(c.lambda->imag()) : json(nullptr)}});
        json o{{"value", p.value}, {"ok", p.ok}, {"stable", p.stable}, {"verdict", std::string(analysis::to_string(p.verdict))},
               {"rightmost", {number(p.rightmost.real()), number(p.rightmost.imag())}}, {"critical", crit}};
        if (!p.ok) o["error"] = p.error;
        j["points"].push_back(o);
    }
    j["boundaries"] = json::array();
    for (const auto& [a, b] : r.boundaries) j["boundaries"].push_back({a, b});
    return j.dump(2) + "\n";
}

void emit_outputs(const RunOutput& run, const std::filesystem::path& dir) {
    std::filesystem::create_directories(dir);
    write_file(dir / "timeseries.csv", timeseries_csv(run.sim.series, run.scenario.channels));
    write_file(dir / "audit.csv", audit_csv(run.sim.audit));
    write_file(dir / "report.json", report_json(run.report));
}

void emit_sweep(const analysis::SweepResult& r, const std::filesystem::path& dir) {
    std::filesystem::create_directories(dir);
    write_file(dir / "eigensweep.csv", analysis::sweep_csv(r));
    write_file(dir / "report.json", sweep_report_json(r));
}

}  // namespace tsclab::harness
