#pragma once

#include <numbers>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace tsclab::devices {

inline constexpr double kNominalOmegaBase = 2.0 * std::numbers::pi * 60.0;

/// Converter parameters. Defaults are the controller table of the case study;
/// the slack, frequency-droop and inertia values are the documented extras.
struct IbrParams {
    // dc side and output filter (device pu, time in s)
    double c_dc = 0.1;
    double l_f = 0.0031;
    double c_f = 0.001;
    double r_f = 0.001;

    // grid-following controllers
    double kp_dvc = 2.0;
    double ki_dvc = 4.0;
    double kp_avc_gfl = 0.7;
    double ki_avc_gfl = 0.0;
    double kp_cc_gfl = 20.0;
    double ki_cc_gfl = 200.0;
    double kp_pll = 10.0;
    double ki_pll = 100.0;

    // grid-forming controllers
    double m_p = 0.04;
    double m_q = 0.04;
    double omega_c = 1.0;
    double k_w = 0.1;
    double kp_avc_gfm = 14.476;
    double ki_avc_gfm = 0.273;
    double kp_cc_gfm = 9.817;
    double ki_cc_gfm = 0.018;
    double i_max = 1.5;

    // dc-side slack (input power) controller
    double t_slack = 0.01;
    double kp_slack = 2.0;
    double ki_slack = 4.0;

    // frequency droop added to the grid-following d-axis
    double t_omega = 0.05;
    double k_omega = 25.0;

    // virtual synchronous machine inertia
    double m_vsm = 10.0;

    double omega_b = kNominalOmegaBase;  // rad/s
    double omega_s = 1.0;                // pu
    double s_base_mva = 100.0;

    void validate() const;  // throws std::invalid_argument

    /// Named access used by scenario overrides and set-parameter events.
    bool set(std::string_view name, double value);
    std::optional<double> get(std::string_view name) const;
    static std::span<const std::string_view> names();
};

struct SmParams {
    double h = 3.0;     // inertia constant, s
    double x_s = 0.2;   // pu
    double d = 0.0;     // damping, pu
    double omega_b = kNominalOmegaBase;
    double omega_s = 1.0;
    double s_base_mva = 100.0;

    void validate() const;
    bool set(std::string_view name, double value);
    std::optional<double> get(std::string_view name) const;
    static std::span<const std::string_view> names();
};

}  // namespace tsclab::devices
