// Command-line driver: time-domain runs, case presets, eigenvalue sweeps and audits.
#include <atomic>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <thread>

#include "CLI11.hpp"
#include "json.hpp"
#include "tsclab/analysis/sweep.hpp"
#include "tsclab/harness/run.hpp"

namespace fs = std::filesystem;
using namespace tsclab;

namespace {

struct Common {
    std::string out = "out";
    std::vector<std::string> overrides;
};

harness::Scenario load(const std::string& path, const Common& c) {
    harness::Scenario s = harness::load_scenario(path);
    for (const auto& o : c.overrides) harness::apply_override(s, o);
    harness::validate_scenario(s);
    return s;
}

void print_run(const harness::RunOutput& r, const fs::path& dir) {
    const auto& rep = r.report;
    std::printf("%s: %s at t=%.4f s", rep.scenario.c_str(), std::string(analysis::to_string(rep.classification)).c_str(),
                rep.end_time);
    if (rep.collapsed) std::printf(" (%s)", rep.collapse_reason.c_str());
    std::printf("\n");
    for (const auto& d : rep.devices)
        std::printf("  %-6s condition1=%s condition2=%s condition3=%s\n", d.name.c_str(),
                    std::string(ph::to_string(d.condition1.verdict)).c_str(),
                    std::string(ph::to_string(d.condition2.verdict)).c_str(),
                    std::string(ph::to_string(d.condition3.verdict)).c_str());
    std::printf("  outputs in %s\n", dir.string().c_str());
}

std::string value_tag(const std::string& param, double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%s_%.6g", param.c_str(), v);
    return buf;
}

// One time-domain run per sweep value, in parallel, each into its own directory.
void run_value_set(const harness::Scenario& s, const fs::path& dir) {
    const auto& sw = *s.sweep;
    const std::string param = harness::sweep_parameter_name(sw.param);
    std::vector<harness::RunOutput> runs(sw.values.size());
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next++; i < runs.size(); i = next++) {
            harness::Scenario si = s;
            si.sweep.reset();
            harness::apply_override(si, sw.device + "." + param + "=" + harness::format_number(sw.values[i]));
            si.name = s.name + "/" + value_tag(param, sw.values[i]);
            runs[i] = harness::run_simulation(si);
        }
    };
    const unsigned n = std::min<unsigned>(analysis::thread_limit(), std::max<std::size_t>(1, runs.size()));
    std::vector<std::thread> pool;
    for (unsigned k = 0; k < n; ++k) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
    for (std::size_t i = 0; i < runs.size(); ++i) {
        const fs::path sub = dir / value_tag(param, sw.values[i]);
        harness::emit_outputs(runs[i], sub);
        print_run(runs[i], sub);
    }
}

void print_sweep(const analysis::SweepResult& r) {
    for (const auto& p : r.points) {
        std::printf("  %s=%-12.6g %s", r.parameter.c_str(), p.value,
                    p.ok ? std::string(analysis::to_string(p.verdict)).c_str() : "failed");
        for (const auto& c : p.critical)
            if (c.lambda) std::printf("  %s:%.6g%+.6gj", c.device.c_str(), c.lambda->real(), c.lambda->imag());
        if (!p.ok) std::printf("  (%s)", p.error.c_str());
        std::printf("\n");
    }
    for (const auto& [a, b] : r.boundaries) std::printf("  stability changes between %.6g and %.6g\n", a, b);
}

void eig_single(const harness::Scenario& s, const fs::path& dir) {
    system::PowerSystem sys = harness::build_system(s);
    const system::OperatingPoint op = sys.initialize();
    const analysis::LinearizedSystem lin = analysis::linearize(sys, op);
    const analysis::ModalSummary ms = analysis::modal_summary(lin);
    const analysis::SweepPoint pt = analysis::analyze_point(s);

    fs::create_directories(dir);
    std::string csv = "re,im\n";
    for (const auto& l : ms.modes) csv += harness::format_number(l.real()) + "," + harness::format_number(l.imag()) + "\n";
    std::ofstream(dir / "eigenvalues.csv", std::ios::binary) << csv;

    nlohmann::json j;
    j["scenario"] = s.name;
    j["stable"] = ms.stable;
    j["verdict"] = std::string(analysis::to_string(pt.verdict));
    j["rightmost"] = {ms.rightmost.real(), ms.rightmost.imag()};
    j["symmetry_removed"] = ms.symmetry_removed;
    j["critical"] = nlohmann::json::array();
    for (const auto& c : pt.critical)
        j["critical"].push_back({{"device", c.device},
                                 {"re", c.lambda ? nlohmann::json(c.lambda->real()) : nlohmann::json(nullptr)},
                                 {"im", c.lambda ? nlohmann::json(c.lambda->imag()) : nlohmann::json(nullptr)}});
    std::ofstream(dir / "report.json", std::ios::binary) << j.dump(2) << "\n";

    std::printf("%s: %s, rightmost %.6g%+.6gj, %zu modes\n", s.name.c_str(),
                std::string(analysis::to_string(pt.verdict)).c_str(), ms.rightmost.real(), ms.rightmost.imag(),
                ms.modes.size());
    for (const auto& c : pt.critical)
        if (c.lambda) std::printf("  %-6s critical %.6g%+.6gj\n", c.device.c_str(), c.lambda->real(), c.lambda->imag());
    std::printf("  outputs in %s\n", dir.string().c_str());
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Transient slack capability lab: converter and machine dynamics on small grids"};
    app.require_subcommand(1);
    Common common;
    app.add_option("--out", common.out, "Output directory")->capture_default_str();

    std::string scenario_path;
    auto* run = app.add_subcommand("run", "Time-domain run of a scenario file");
    run->add_option("scenario", scenario_path, "Scenario JSON")->required()->check(CLI::ExistingFile);
    run->add_option("--override", common.overrides, "key=value parameter override (repeatable)");

    int case_id = 0;
    auto* cas = app.add_subcommand("case", "Time-domain run of a preset case");
    cas->add_option("id", case_id, "Case 1..6")->required()->check(CLI::Range(1, 6));
    cas->add_option("--override", common.overrides, "key=value parameter override (repeatable)");

    std::string param, device = "*";
    double from = 1e-3, to = 1.0;
    std::size_t points = 50;
    int sweep_case = 3;
    auto* sweep = app.add_subcommand("sweep", "Eigenvalue sweep of one converter parameter");
    sweep->add_option("--param", param, "Cdc, Tslack, imax or M")->required()->check(CLI::IsMember({"Cdc", "Tslack", "imax", "M"}));
    sweep->add_option("--from", from, "First value")->capture_default_str();
    sweep->add_option("--to", to, "Last value")->capture_default_str();
    sweep->add_option("--points", points, "Number of points")->capture_default_str()->check(CLI::PositiveNumber);
    sweep->add_option("--case", sweep_case, "Preset case")->capture_default_str()->check(CLI::Range(1, 6));
    sweep->add_option("--device", device, "Device name, or * for every converter")->capture_default_str();
    sweep->add_option("--override", common.overrides, "key=value parameter override (repeatable)");

    auto* eig = app.add_subcommand("eig", "Small-signal analysis of a scenario (its sweep section, if any)");
    eig->add_option("scenario", scenario_path, "Scenario JSON")->required()->check(CLI::ExistingFile);
    eig->add_option("--override", common.overrides, "key=value parameter override (repeatable)");

    auto* audit = app.add_subcommand("audit", "Run a scenario and report the energy-structure audit");
    audit->add_option("scenario", scenario_path, "Scenario JSON")->required()->check(CLI::ExistingFile);
    audit->add_option("--override", common.overrides, "key=value parameter override (repeatable)");

    CLI11_PARSE(app, argc, argv);
    const fs::path out(common.out);

    try {
        if (*run) {
            const harness::Scenario s = load(scenario_path, common);
            if (s.sweep) {
                run_value_set(s, out);
                if (s.sweep->param == "Cdc" || s.sweep->param == "Tslack") {
                    const auto r = analysis::eigen_sweep(s, s.sweep->param, s.sweep->values, s.sweep->device);
                    harness::emit_sweep(r, out / "eigen");
                    print_sweep(r);
                }
            } else {
                const auto r = harness::run_simulation(s);
                harness::emit_outputs(r, out);
                print_run(r, out);
            }
        } else if (*cas) {
            harness::Scenario s = harness::case_scenario(case_id);
            for (const auto& o : common.overrides) harness::apply_override(s, o);
            const auto r = harness::run_simulation(s);
            harness::emit_outputs(r, out);
            print_run(r, out);
        } else if (*sweep) {
            harness::Scenario s = harness::case_scenario(sweep_case);
            for (const auto& o : common.overrides) harness::apply_override(s, o);
            std::vector<double> grid;
            if (from > 0.0 && to > 0.0) {
                grid = analysis::log_grid(from, to, points);
            } else {
                for (std::size_t i = 0; i < points; ++i)
                    grid.push_back(points == 1 ? from : from + (to - from) * static_cast<double>(i) / (points - 1));
            }
            const auto r = analysis::eigen_sweep(s, param, grid, device);
            harness::emit_sweep(r, out);
            print_sweep(r);
        } else if (*eig) {
            const harness::Scenario s = load(scenario_path, common);
            if (s.sweep) {
                const auto r = analysis::eigen_sweep(s, s.sweep->param, s.sweep->values, s.sweep->device);
                harness::emit_sweep(r, out);
                print_sweep(r);
            } else {
                eig_single(s, out);
            }
        } else if (*audit) {
            harness::Scenario s = load(scenario_path, common);
            s.sweep.reset();
            s.simulation.audit = true;
            const auto r = harness::run_simulation(s);
            harness::emit_outputs(r, out);
            const auto& a = r.report.audit;
            std::printf("%s: %zu audited steps, %s\n", s.name.c_str(), a.records,
                        std::string(analysis::to_string(r.report.classification)).c_str());
            std::printf("  max |Hdot_grad - Hdot_ports| = %.3e\n", a.max_balance_residual);
            std::printf("  max skew residual            = %.3e\n", a.max_skew_residual);
            std::printf("  min dissipation              = %.3e\n", a.min_dissipation);
            std::printf("  max structure error          = %.3e\n", a.max_structure_error);
            std::printf("  max passivity violation      = %.3e\n", a.max_passivity_violation);
            std::printf("  outputs in %s\n", out.string().c_str());
        }
    } catch (const harness::ScenarioError& e) {
        std::fprintf(stderr, "scenario error: %s\n", e.what());
        return 2;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return 0;
}
