#pragma once

#include <optional>
#include <string>
#include <vector>

#include "tsclab/analysis/linearize.hpp"
#include "tsclab/harness/scenario.hpp"

namespace tsclab::analysis {

enum class ModalVerdict { Unstable, Oscillatory, Damped };
std::string_view to_string(ModalVerdict v);

/// Damping ratio below which a stable critical mode counts as oscillatory.
inline constexpr double kOscillatoryDamping = 0.1;

struct TrackedMode {
    std::string device;
    std::optional<Complex> lambda;  // nullopt when no mode involves the device
};

struct SweepPoint {
    double value = 0.0;
    bool ok = false;
    std::string error;                 // set when the point could not be linearized
    std::vector<TrackedMode> critical; // one per swept device, in scenario order
    Complex rightmost;                 // of the whole system
    bool stable = false;
    ModalVerdict verdict = ModalVerdict::Unstable;
};

struct SweepResult {
    std::string parameter;  // device parameter name, e.g. c_dc
    std::string device;     // "*" or one device name
    std::vector<double> grid;
    std::vector<SweepPoint> points;
    /// Adjacent grid pairs between which the stability flag changes.
    std::vector<std::pair<double, double>> boundaries;
};

/// `n` log-spaced values from a to b inclusive (a, b > 0).
std::vector<double> log_grid(double a, double b, std::size_t n);

/// Worker count: TSCLAB_THREADS if set and positive, else hardware concurrency.
unsigned thread_limit();

/// Modal analysis at a single scenario: initialize, linearize, classify.
SweepPoint analyze_point(const harness::Scenario& s, const std::string& device = "*");

/// Sets `parameter` (alias or device parameter name) on `device` ("*" for
/// every converter) to each grid value and analyzes the equilibrium. The grid
/// is sorted; points are independent and run on up to `threads` workers.
SweepResult eigen_sweep(const harness::Scenario& base, const std::string& parameter, std::vector<double> grid,
                        const std::string& device = "*", unsigned threads = 0);

/// CSV with columns parameter_value, re_lambda_1..k, im_lambda_1..k, stable.
std::string sweep_csv(const SweepResult& r);

}  // namespace tsclab::analysis
