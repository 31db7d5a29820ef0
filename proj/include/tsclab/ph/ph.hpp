#pragma once

#include <limits>
#include <span>
#include <string>
#include <vector>

#include "tsclab/devices/device.hpp"
#include "tsclab/devices/ibr_params.hpp"
#include "tsclab/harness/timeseries.hpp"
#include "tsclab/network/network.hpp"
#include "tsclab/ph/structure.hpp"

namespace tsclab::ph {

double storage_energy(const devices::Device& dev, std::span<const double> x, std::span<const double> y,
                      numerics::Complex v);
Vector storage_gradient(const devices::Device& dev, std::span<const double> x, std::span<const double> y,
                        numerics::Complex v);

/// max |J + J^T|.
double skew_residual(const DenseMatrix& j);
/// Smallest eigenvalue of the symmetric part of a square matrix.
double min_symmetric_eigenvalue(const DenseMatrix& r);
/// (J - R) ∇H + G u.
Vector structure_rhs(const PhEvaluation& e);

struct PortBalance {
    double hdot_gradient = 0.0;  // ∇H^T x'
    double hdot_ports = 0.0;     // p_source - p_interconnection - p_dissipation
    double residual = 0.0;       // hdot_gradient - hdot_ports
    double dissipation = 0.0;    // ∇H^T R ∇H
    double p_source = 0.0;
    double p_control = 0.0;
    double p_interconnection = 0.0;
    double supply_rate = 0.0;    // u^T y with y = G^T ∇H
};
PortBalance port_power_balance(const PhEvaluation& e);

/// Complex frequency of a (d, q) phasor signal sampled at `t`. ω is returned
/// in pu: frame frequency plus the angle rate over omega_b.
struct ComplexFrequency {
    std::vector<double> rho;    // 1/s
    std::vector<double> omega;  // pu
};
ComplexFrequency complex_frequency(std::span<const double> t, std::span<const double> d, std::span<const double> q,
                                   double frame_frequency = 1.0, double omega_b = devices::kNominalOmegaBase);

enum class Verdict { Pass, Fail, NotEvaluated };
std::string_view to_string(Verdict v);

struct ConditionResult {
    Verdict verdict = Verdict::NotEvaluated;
    std::string diagnostics;
};

/// Storage capacity: quadratic, PSD, nonzero, and positive definite on its support.
ConditionResult tsc_condition1(const PhDeclaration& decl, double passivity_violation = 0.0);
/// Controlled input power: a source port exists and u^S has its own dynamics.
ConditionResult tsc_condition2(const PhDeclaration& decl);

struct Condition3Options {
    double window = 2.0;
    double tol_h = 1e-4;
    double tol_omega = 1e-4;
    double tol_rho = 1e-3;
    double omega_b = devices::kNominalOmegaBase;
    double frame_frequency = 1.0;
};

/// Control-driven energy balance over the trailing window of a trajectory,
/// read from the channels `<device>.Hdot`, `<device>.v_D/v_Q`, `<device>.i_D/i_Q`
/// and, when present, `<device>.rho`. `omega_settled` is the common system
/// frequency the device must lock to; NaN selects the frame frequency.
ConditionResult tsc_condition3(const harness::TimeSeries& series, const std::string& device, bool collapsed,
                               double last_event_time, double omega_settled = std::numeric_limits<double>::quiet_NaN(),
                               const Condition3Options& opts = {});

/// Declared structure of a passive load: a resistive load stores nothing and
/// no load has a controlled source.
PhDeclaration passive_load_declaration(network::LoadKind kind, double inductance = 0.0, double capacitance = 0.0);

}  // namespace tsclab::ph
