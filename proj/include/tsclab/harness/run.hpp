#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "tsclab/analysis/classify.hpp"
#include "tsclab/analysis/sweep.hpp"
#include "tsclab/harness/scenario.hpp"
#include "tsclab/harness/simulator.hpp"
#include "tsclab/ph/ph.hpp"

namespace tsclab::harness {

struct DeviceReport {
    std::string name;
    std::string model;
    ph::ConditionResult condition1;
    ph::ConditionResult condition2;
    ph::ConditionResult condition3;
    double passivity_violation = 0.0;
    std::map<std::string, double> settled;  // final value per frame-invariant probe
};

struct RunReport {
    std::string scenario;
    bool collapsed = false;
    std::string collapse_reason;
    double end_time = 0.0;
    double last_event_time = 0.0;
    analysis::TrajectoryClass classification = analysis::TrajectoryClass::Collapsed;
    std::pair<double, std::string> trailing_spread;
    double omega_settled = 0.0;  // mean final voltage frequency of the converters, pu
    double power_flow_mismatch = 0.0;
    long steps = 0;
    long rejected_steps = 0;
    AuditSummary audit;
    std::vector<DeviceReport> devices;
};

struct RunOutput {
    Scenario scenario;
    SimulationResult sim;
    RunReport report;
};

/// Power flow, initialization, integration, classification and verdicts.
RunOutput run_simulation(const Scenario& s);
/// Preset case 1..6 with "key=value" overrides applied in order.
RunOutput run_case(int study_case, const std::vector<std::string>& overrides = {});

/// Verdicts from a finished run; uses only the recorded series and audit.
RunReport make_report(const Scenario& s, const system::PowerSystem& sys, const SimulationResult& r,
                      double power_flow_mismatch);

/// Decimal with 17 significant digits.
std::string format_number(double v);

/// Time plus the selected channels (all when `channels` is empty). Throws
/// ScenarioError listing the available channels for an unknown name.
std::string timeseries_csv(const TimeSeries& ts, const std::vector<std::string>& channels = {});
std::string audit_csv(const std::vector<AuditRecord>& audit);
std::string report_json(const RunReport& r);
std::string sweep_report_json(const analysis::SweepResult& r);

/// Writes timeseries.csv, audit.csv and report.json into `dir` (created if needed).
void emit_outputs(const RunOutput& run, const std::filesystem::path& dir);
/// Writes eigensweep.csv and a sweep report.json.
void emit_sweep(const analysis::SweepResult& r, const std::filesystem::path& dir);

}  // namespace tsclab::harness
