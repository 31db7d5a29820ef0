// End-to-end acceptance checks. Prints one PASS/FAIL line per criterion.
//
//   acceptance_tests [--cli PATH] [--expect-fail 1,2,...]
//
// Exit status is 0 when the failing set is a subset of --expect-fail, so
// known shortfalls stay visible without breaking the test run.
#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <future>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <unistd.h>

#include "tsclab/analysis/classify.hpp"
#include "tsclab/analysis/linearize.hpp"
#include "tsclab/analysis/sweep.hpp"
#include "tsclab/devices/ibr.hpp"
#include "tsclab/devices/sm.hpp"
#include "tsclab/harness/run.hpp"
#include "tsclab/harness/scenario.hpp"
#include "tsclab/ph/ph.hpp"

namespace fs = std::filesystem;
using namespace tsclab;
using harness::RunOutput;
using harness::Scenario;
using numerics::Complex;

namespace {

// Pinned tolerances.
constexpr double kFrequencyMatch = 1e-4;     // settled frequency across inertia values, pu
constexpr double kBalanceTol = 1e-6;         // |H'_grad - H'_ports|
constexpr double kSkewTol = 1e-12;
constexpr double kDissipationTol = -1e-12;
constexpr double kPassivityTol = 1e-6;
constexpr double kPowerFlowTol = 1e-8;
constexpr double kDriftTol = 1e-6;
constexpr double kStructureTol = 1e-9;
constexpr double kSwingRelTol = 0.01;
constexpr double kRatioLow = 3.5, kRatioHigh = 4.5;
constexpr double kSettleBand = 1e-4;         // settling band for the inertia comparison, pu

struct Outcome {
    bool pass = false;
    std::string detail;
};

std::string fmt(const char* f, auto... args) {
    char buf[512];
    std::snprintf(buf, sizeof buf, f, args...);
    return buf;
}

Scenario with(int study_case, const std::vector<std::string>& overrides) {
    Scenario s = harness::case_scenario(study_case);
    for (const auto& o : overrides) harness::apply_override(s, o);
    return s;
}

std::string class_name(const RunOutput& r) { return std::string(analysis::to_string(r.report.classification)); }

const harness::DeviceReport* device(const RunOutput& r, const std::string& name) {
    for (const auto& d : r.report.devices)
        if (d.name == name) return &d;
    return nullptr;
}

bool condition3_all(const RunOutput& r, std::string& why) {
    bool ok = true;
    for (const auto& d : r.report.devices) {
        if (d.condition3.verdict == ph::Verdict::Pass) continue;
        ok = false;
        why += " " + d.name + ":" + std::string(ph::to_string(d.condition3.verdict));
    }
    return ok;
}

// Runs every scenario concurrently; results keep the input order.
std::vector<RunOutput> run_all(const std::vector<Scenario>& scenarios) {
    std::vector<std::future<RunOutput>> jobs;
    for (const auto& s : scenarios) jobs.push_back(std::async(std::launch::async, [s] { return harness::run_simulation(s); }));
    std::vector<RunOutput> out;
    for (auto& j : jobs) out.push_back(j.get());
    return out;
}

std::vector<RunOutput> g_all_runs;  // every time-domain run, for the audit criterion

void keep(const std::vector<RunOutput>& runs) {
    for (const auto& r : runs) g_all_runs.push_back(r);
}

Outcome criterion1() {
    std::vector<Scenario> s;
    for (int c = 1; c <= 6; ++c) s.push_back(harness::case_scenario(c));
    const auto runs = run_all(s);
    keep(runs);
    Outcome o{true, ""};
    for (int c = 1; c <= 6; ++c) {
        const RunOutput& r = runs[static_cast<std::size_t>(c - 1)];
        const bool want_collapse = c == 1 || c == 2 || c == 4;
        bool ok = want_collapse ? r.report.collapsed : r.report.classification == analysis::TrajectoryClass::Settled;
        std::string why;
        if (!want_collapse && ok) ok = condition3_all(r, why);
        o.pass = o.pass && ok;
        o.detail += fmt(" case%d=%s%s%s", c, class_name(r).c_str(), why.c_str(), ok ? "" : "(x)");
    }
    return o;
}

// Eigen and time-domain verdicts of a one-parameter study on case 3.
Outcome verdict_study(const std::string& fixed, const std::string& param,
                      const std::vector<std::pair<double, analysis::ModalVerdict>>& expect) {
    Scenario base = with(3, {fixed});
    std::vector<double> grid;
    std::vector<Scenario> scenarios;
    for (const auto& [v, _] : expect) {
        grid.push_back(v);
        scenarios.push_back(with(3, {fixed, "*." + param + "=" + harness::format_number(v)}));
    }
    const auto eig = analysis::eigen_sweep(base, param, grid);
    const auto runs = run_all(scenarios);
    keep(runs);
    Outcome o{true, ""};
    for (std::size_t i = 0; i < expect.size(); ++i) {
        const auto& [v, want] = expect[i];
        const analysis::SweepPoint* pt = nullptr;
        for (const auto& p : eig.points)
            if (p.value == v) pt = &p;
        const analysis::ModalVerdict got = pt && pt->ok ? pt->verdict : analysis::ModalVerdict::Unstable;
        const bool collapsed = runs[i].report.collapsed;
        const bool agree = want == analysis::ModalVerdict::Unstable ? collapsed
                           : want == analysis::ModalVerdict::Damped
                               ? runs[i].report.classification == analysis::TrajectoryClass::Settled
                               : !collapsed;
        const bool ok = got == want && agree;
        o.pass = o.pass && ok;
        o.detail += fmt(" %s=%g:eig=%s,time=%s,re=%.4g%s", param.c_str(), v, std::string(analysis::to_string(got)).c_str(),
                        class_name(runs[i]).c_str(), pt ? pt->rightmost.real() : NAN, ok ? "" : "(x)");
    }
    return o;
}

Outcome criterion2() {
    using V = analysis::ModalVerdict;
    return verdict_study("*.t_slack=0.01", "Cdc", {{0.01, V::Unstable}, {0.02, V::Oscillatory}, {0.1, V::Damped}});
}

Outcome criterion3() {
    using V = analysis::ModalVerdict;
    return verdict_study("*.c_dc=0.1", "Tslack", {{0.1, V::Unstable}, {0.05, V::Oscillatory}, {0.01, V::Damped}});
}

Outcome criterion4() {
    const auto cdc = analysis::log_grid(0.01, 1.0, 10);
    const auto tsl = analysis::log_grid(0.001, 0.1, 10);
    std::vector<std::future<analysis::SweepResult>> jobs;
    for (double t : tsl)
        jobs.push_back(std::async(std::launch::async, [t, &cdc] {
            return analysis::eigen_sweep(with(3, {"*.t_slack=" + harness::format_number(t)}), "Cdc", cdc, "*", 1);
        }));
    std::vector<std::vector<bool>> stable;  // [tslack][cdc]
    for (auto& j : jobs) {
        const auto r = j.get();
        std::vector<bool> row;
        for (const auto& p : r.points) row.push_back(p.ok && p.stable);
        stable.push_back(row);
    }
    int n_stable = 0, violations = 0;
    for (std::size_t j = 0; j < tsl.size(); ++j)
        for (std::size_t i = 0; i < cdc.size(); ++i) {
            if (!stable[j][i]) continue;
            ++n_stable;
            // Larger capacitance and faster slack response never destabilize.
            if (i + 1 < cdc.size() && !stable[j][i + 1]) ++violations;
            if (j > 0 && !stable[j - 1][i]) ++violations;
        }
    Outcome o;
    o.detail = fmt(" stable points %d/100, monotonicity violations %d", n_stable, violations);
    if (n_stable == 0 || n_stable == 100) {
        o.pass = false;
        o.detail += " (vacuous: no stability boundary inside the grid)";
    } else {
        o.pass = violations == 0;
    }
    return o;
}

Outcome criterion5() {
    const auto runs = run_all({with(5, {"IBR1.i_max=1.415"}), with(5, {"*.i_max=1e6"})});
    keep(runs);
    Outcome o{true, ""};
    const auto* ibr1 = device(runs[0], "IBR1");
    const bool limited_fails = ibr1 && ibr1->condition3.verdict == ph::Verdict::Fail && !runs[0].report.collapsed;
    std::string why;
    const bool unlimited_passes = condition3_all(runs[1], why) && !runs[1].report.collapsed;
    o.pass = limited_fails && unlimited_passes;
    o.detail = fmt(" limited: %s IBR1 condition3=%s (%s); unlimited: %s%s", class_name(runs[0]).c_str(),
                   ibr1 ? std::string(ph::to_string(ibr1->condition3.verdict)).c_str() : "?",
                   ibr1 ? ibr1->condition3.diagnostics.c_str() : "", class_name(runs[1]).c_str(),
                   unlimited_passes ? " all pass" : why.c_str());
    return o;
}

Outcome criterion6() {
    const double m[3] = {0.0, 10.0, 50.0};
    std::vector<Scenario> s;
    for (double v : m) s.push_back(with(6, {"*.M=" + harness::format_number(v)}));
    const auto runs = run_all(s);
    keep(runs);
    Outcome o{true, ""};
    double t_settle[3], w[3];
    for (int k = 0; k < 3; ++k) {
        const auto& r = runs[static_cast<std::size_t>(k)];
        w[k] = r.report.omega_settled;
        t_settle[k] = r.report.collapsed ? NAN : analysis::settling_time(r.sim.series, "IBR1.omega", kSettleBand, 1.0);
        const bool settled = r.report.classification == analysis::TrajectoryClass::Settled;
        o.pass = o.pass && settled;
        o.detail += fmt(" M=%g:%s,omega=%.8f,t_settle=%.3f", m[k], class_name(r).c_str(), w[k], t_settle[k]);
    }
    const double spread = std::max({w[0], w[1], w[2]}) - std::min({w[0], w[1], w[2]});
    o.pass = o.pass && spread < kFrequencyMatch && t_settle[0] < t_settle[1] && t_settle[1] < t_settle[2];
    o.detail += fmt(" spread=%.2e", spread);
    return o;
}

Outcome criterion7() {
    double bal = 0, skew = 0, diss = 0, pas = 0, pas_completed = 0;
    std::size_t records = 0;
    std::string worst_run;
    for (const auto& r : g_all_runs) {
        const auto& a = r.report.audit;
        records += a.records;
        bal = std::max(bal, a.max_balance_residual);
        skew = std::max(skew, a.max_skew_residual);
        diss = std::min(diss, a.min_dissipation);
        if (a.max_passivity_violation > pas) {
            pas = a.max_passivity_violation;
            worst_run = r.report.scenario + (r.report.collapsed ? " (collapsed)" : "");
        }
        if (!r.report.collapsed) pas_completed = std::max(pas_completed, a.max_passivity_violation);
    }
    Outcome o;
    o.pass = records > 0 && bal < kBalanceTol && skew < kSkewTol && diss >= kDissipationTol && pas <= kPassivityTol;
    o.detail = fmt(" %zu runs, %zu steps: balance %.2e, skew %.2e, min dissipation %.2e, passivity %.2e in %s"
                   " (%.2e over completed runs)",
                   g_all_runs.size(), records, bal, skew, diss, pas, worst_run.empty() ? "-" : worst_run.c_str(),
                   pas_completed);
    return o;
}

Outcome criterion8() {
    std::vector<Scenario> s;
    for (int c = 1; c <= 6; ++c) {
        Scenario q = harness::case_scenario(c);
        q.events.clear();
        q.simulation.t_end = 10.0;
        s.push_back(q);
    }
    const auto runs = run_all(s);
    Outcome o{true, ""};
    double worst_pf = 0, worst_drift = 0;
    for (const auto& r : runs) {
        worst_pf = std::max(worst_pf, r.report.power_flow_mismatch);
        const auto& ts = r.sim.series;
        for (const auto& n : ts.names()) {
            const auto& col = ts.column(n);
            for (double v : col) worst_drift = std::max(worst_drift, std::abs(v - col.front()));
        }
        if (r.report.collapsed) o.pass = false;
    }
    o.pass = o.pass && worst_pf < kPowerFlowTol && worst_drift < kDriftTol;
    o.detail = fmt(" power-flow mismatch %.2e, drift over 10 s %.2e", worst_pf, worst_drift);
    return o;
}

double structure_error(std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u(-1, 1);
    double worst = 0;
    int n = 0;
    for (int c = 1; n < 1000; c = c % 6 + 1) {
        devices::IbrDevice dev("IBR", "1", devices::IbrConfig::for_case(c), devices::IbrParams{});
        numerics::Vector x(dev.n_states()), y(dev.n_algebraic());
        const Complex v0 = std::polar(1.0 + 0.05 * u(rng), 0.3 * u(rng));
        dev.initialize(v0, {0.8 * u(rng), 0.3 * u(rng)}, x, y);
        for (double& e : x) e += 0.2 * u(rng);
        for (double& e : y) e += 0.2 * u(rng);
        x[static_cast<std::size_t>(dev.layout().v_dc)] = 0.5 + std::abs(u(rng));
        const Complex v = v0 * Complex(1 + 0.05 * u(rng), 0.05 * u(rng));
        const auto e = dev.ph_evaluate(x, y, v);
        numerics::Vector f(dev.n_states()), g(dev.n_algebraic());
        dev.evaluate(x, y, v, f, g);
        const auto rhs = ph::structure_rhs(*e);
        const auto& l = dev.layout();
        const int idx[5] = {l.v_dc, l.i_d, l.i_q, l.v_d, l.v_q};
        for (int i = 0; i < 5; ++i)
            worst = std::max(worst, std::abs(rhs[static_cast<std::size_t>(i)] - f[static_cast<std::size_t>(idx[i])]));
        ++n;
    }
    // Machine model.
    for (int k = 0; k < 100; ++k) {
        devices::SynchronousMachine sm("G", "1", devices::SmParams{});
        sm.set_operating_point(1.0 + 0.2 * u(rng), 0.5 * u(rng));
        const numerics::Vector x{u(rng), 1.0 + 0.01 * u(rng)};
        const Complex v = std::polar(1.0, 0.2 * u(rng));
        const auto e = sm.ph_evaluate(x, {}, v);
        numerics::Vector f(2), g;
        sm.evaluate(x, {}, v, f, g);
        const auto rhs = ph::structure_rhs(*e);
        for (int i = 0; i < 2; ++i) worst = std::max(worst, std::abs(rhs[static_cast<std::size_t>(i)] - f[static_cast<std::size_t>(i)]));
    }
    return worst;
}

system::PowerSystem stiff_bus_machine(const devices::SmParams& p) {
    network::Network net;
    net.buses = {{"1", network::BusType::Slack, 1.0, 0.0, 0.0, 0.0}};
    system::PowerSystem sys(net);
    sys.add_device(std::make_unique<devices::InfiniteSource>("INF", "1"));
    sys.add_device(std::make_unique<devices::SynchronousMachine>("G", "1", p), Complex(0.6, 0.1));
    return sys;
}

Outcome criterion9() {
    std::mt19937_64 rng(99);
    const double s_err = structure_error(rng);

    const devices::SmParams prm;
    system::PowerSystem sys = stiff_bus_machine(prm);
    const auto op = sys.initialize();
    const auto& sm = dynamic_cast<const devices::SynchronousMachine&>(sys.device(1));
    const double delta0 = op.x[sys.state_offset(1)];
    const double expected = std::sqrt(prm.omega_b * 1.0 * sm.emf() * std::cos(delta0) / (2 * prm.h * prm.x_s));
    const auto ms = analysis::modal_summary(analysis::linearize(sys, op));
    double swing = 0;
    for (const auto& l : ms.spectrum.eigenvalues) swing = std::max(swing, l.imag());
    const double swing_err = std::abs(swing - expected) / expected;

    // Step-halving convergence on a perturbed swing.
    auto end_angle = [&](double h) {
        harness::SimulationOptions opts;
        opts.t_end = 1.0;
        opts.step = h;
        opts.audit = false;
        harness::Simulator sim(sys, {}, opts);
        auto start = op;
        start.x[sys.state_offset(1)] += 0.1;
        return sim.run(start).x[sys.state_offset(1)];
    };
    const double a = end_angle(0.01), b = end_angle(0.005), c = end_angle(0.0025);
    const double ratio = std::abs(a - b) / std::abs(b - c);

    Outcome o;
    o.pass = s_err < kStructureTol && swing_err < kSwingRelTol && ratio > kRatioLow && ratio < kRatioHigh;
    o.detail = fmt(" structure error %.2e; swing %.4f vs %.4f rad/s (%.3f%%); step-halving ratio %.3f", s_err, swing,
                   expected, 100 * swing_err, ratio);
    return o;
}

std::map<std::string, std::string> read_tree(const fs::path& root) {
    std::map<std::string, std::string> out;
    for (const auto& e : fs::recursive_directory_iterator(root)) {
        if (!e.is_regular_file()) continue;
        std::ifstream in(e.path(), std::ios::binary);
        std::ostringstream ss;
        ss << in.rdbuf();
        out[fs::relative(e.path(), root).string()] = ss.str();
    }
    return out;
}

Outcome criterion10(const std::string& cli) {
    if (cli.empty()) return {false, " no CLI path given"};
    const fs::path tmp = fs::temp_directory_path() / ("tsclab_acceptance_" + std::to_string(::getpid()));
    fs::remove_all(tmp);
    const std::string scen = std::string(TSCLAB_SCENARIO_DIR) + "/study_cdc.json";
    bool ran = true;
    for (const char* run : {"a", "b"}) {
        const fs::path d = tmp / run;
        const std::string c1 = "\"" + cli + "\" --out \"" + (d / "case6").string() + "\" case 6 > /dev/null";
        const std::string c2 = "\"" + cli + "\" --out \"" + (d / "study").string() + "\" run \"" + scen + "\" > /dev/null";
        ran = ran && std::system(c1.c_str()) == 0 && std::system(c2.c_str()) == 0;
    }
    Outcome o;
    if (!ran) {
        o = {false, " CLI invocation failed"};
    } else {
        const auto a = read_tree(tmp / "a"), b = read_tree(tmp / "b");
        o.pass = !a.empty() && a == b;
        o.detail = fmt(" %zu files compared, %s", a.size(), o.pass ? "identical" : "differ");
    }
    fs::remove_all(tmp);
    return o;
}

}  // namespace

int main(int argc, char** argv) {
    std::string cli;
    std::set<int> expected_fail;
    for (int i = 1; i < argc; ++i) {
        const std::string a = argv[i];
        if (a == "--cli" && i + 1 < argc) {
            cli = argv[++i];
        } else if (a == "--expect-fail" && i + 1 < argc) {
            std::stringstream ss(argv[++i]);
            for (std::string tok; std::getline(ss, tok, ',');) expected_fail.insert(std::stoi(tok));
        } else {
            std::fprintf(stderr, "usage: %s [--cli PATH] [--expect-fail 1,2,...]\n", argv[0]);
            return 2;
        }
    }

    const std::vector<std::pair<int, std::function<Outcome()>>> checks = {
        {1, criterion1}, {2, criterion2}, {3, criterion3}, {4, criterion4}, {5, criterion5},
        {6, criterion6}, {7, criterion7}, {8, criterion8}, {9, criterion9}, {10, [&] { return criterion10(cli); }},
    };
    std::set<int> failed;
    for (const auto& [id, fn] : checks) {
        Outcome o;
        try {
            o = fn();
        } catch (const std::exception& e) {
            o = {false, std::string(" error: ") + e.what()};
        }
        if (!o.pass) failed.insert(id);
        std::printf("criterion %2d: %s%s%s\n", id, o.pass ? "PASS" : "FAIL",
                    !o.pass && expected_fail.count(id) ? " (known)" : "", o.detail.c_str());
        std::fflush(stdout);
    }
    int unexpected = 0;
    for (int id : failed)
        if (!expected_fail.count(id)) ++unexpected;
    for (int id : expected_fail)
        if (!failed.count(id)) std::printf("note: criterion %d now passes; drop it from the expected failures\n", id);
    std::printf("%zu/%zu criteria pass\n", checks.size() - failed.size(), checks.size());
    return unexpected == 0 ? 0 : 1;
}
