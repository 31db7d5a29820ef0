#pragma once

#include <optional>
#include <string>
#include <vector>

#include "tsclab/harness/timeseries.hpp"
#include "tsclab/network/events.hpp"
#include "tsclab/numerics/dae.hpp"
#include "tsclab/system/power_system.hpp"

namespace tsclab::harness {

struct SimulationOptions {
    double t_end = 30.0;
    double step = 1e-3;
    numerics::TrapezoidalOptions newton;
    int max_halvings = 6;
    double v_min = 0.01;
    double v_max = 5.0;
    bool audit = true;
    /// After each event the step is divided by `event_refinement` for
    /// `event_window` seconds, resolving the fast filter transient.
    double event_window = 0.1;
    int event_refinement = 50;
};

/// System-wide energy bookkeeping at one accepted step (sums over devices).
struct AuditRecord {
    double t = 0.0;
    double h = 0.0;
    double hdot_grad = 0.0;
    double hdot_ports = 0.0;
    double residual = 0.0;
    double p_source = 0.0;
    double p_interconn = 0.0;
    double p_diss = 0.0;
    double rho_limiter = 1.0;
};

/// Worst values of the structural checks over a whole run.
struct AuditSummary {
    std::size_t records = 0;
    double max_balance_residual = 0.0;  // per device |H'_grad - H'_ports|
    double max_skew_residual = 0.0;
    double min_dissipation = 0.0;
    double min_r_eigenvalue = 0.0;
    double max_structure_error = 0.0;   // |(J-R)∇H + G u - x'|
    double max_passivity_violation = 0.0;
    std::vector<double> device_passivity_violation;
};

enum class RunStatus { Completed, Collapsed };

struct SimulationResult {
    TimeSeries series;
    std::vector<AuditRecord> audit;
    AuditSummary audit_summary;
    RunStatus status = RunStatus::Completed;
    double end_time = 0.0;
    std::string collapse_reason;
    numerics::Vector x;
    numerics::Vector y;
    long steps = 0;
    long rejected_steps = 0;
};

/// Fixed-step trapezoidal simulation with step halving, event handling,
/// collapse detection and per-step energy audit. Deterministic.
class Simulator {
public:
    Simulator(system::PowerSystem sys, std::vector<network::Event> events, SimulationOptions opts = {});

    /// Runs from the supplied operating point (or a fresh initialization).
    SimulationResult run(std::optional<system::OperatingPoint> start = std::nullopt);

    const system::PowerSystem& system() const noexcept { return sys_; }
    /// Names of every channel the simulator can record.
    std::vector<std::string> channel_names() const;

private:
    void record(double t, std::span<const double> x, std::span<const double> y, SimulationResult& out);
    /// Re-reads the port rates after an algebraic jump at an event.
    void rebase_ports(std::span<const double> x, std::span<const double> y);
    std::optional<std::string> collapse_check(std::span<const double> x, std::span<const double> y) const;

    system::PowerSystem sys_;
    std::vector<network::Event> events_;
    SimulationOptions opts_;

    // passivity bookkeeping per device
    std::vector<double> last_rate_;    // u^T y at the previous record
    std::vector<double> margin_;       // ∫u^T y - (H - H0)
    std::vector<double> best_margin_;
    std::vector<double> last_energy_;
    double last_t_ = 0.0;
    bool have_last_ = false;
};

}  // namespace tsclab::harness
