#pragma once

#include <array>

#include "tsclab/devices/device.hpp"
#include "tsclab/devices/ibr_params.hpp"

namespace tsclab::devices {

enum class ControlScheme { GridFollowing, GridForming, VirtualSynchronousMachine };

/// Controller wiring of one converter.
struct IbrConfig {
    ControlScheme scheme = ControlScheme::GridFollowing;
    /// i*_dc follows the first-order slack PI instead of staying constant.
    bool slack_controller = false;
    /// The slack PI reuses the DVC integrator instead of owning one.
    bool shared_dvc_integrator = false;
    /// Power-frequency droop drives the d-axis current reference.
    bool frequency_droop = false;
    /// Power reference written as v_d i*_d + v_d i_q.
    bool literal_power_reference = false;
    /// Sign applied to the slack PI output (+1 reproduces the written law).
    double slack_sign = 1.0;

    /// Wiring of study case 1..6; throws std::invalid_argument otherwise.
    static IbrConfig for_case(int study_case);
};

/// ρ = min(1, i_max / |(i_d, i_q)|), with ρ = 1 at zero current.
double current_limit_rho(double i_d, double i_q, double i_max);

/// Inputs to the shared filter and dc-link equations (device pu).
struct PhysicalInputs {
    double v_td = 0.0;
    double v_tq = 0.0;
    double omega = 1.0;
    double i_dc = 0.0;
    double i_gd = 0.0;
    double i_gq = 0.0;
};

/// Storage states are (v_dc, i_d, i_q, v_d, v_q).
using PhysicalState = std::array<double, 5>;

/// Derivatives of the storage states. Used unchanged by every control scheme.
PhysicalState physical_rhs(const IbrParams& p, const PhysicalState& s, const PhysicalInputs& in);

/// Every intermediate quantity of one converter evaluation.
struct IbrSignals {
    PhysicalState storage{};
    PhysicalInputs inputs;
    Complex i_grid_dq;    // device frame, device pu
    Complex v_bus_frame;  // bus voltage rotated into the device frame
    double frame_angle = 0.0;
    double omega = 1.0;   // controller frame frequency, pu
    double p = 0.0;
    double q = 0.0;
    double rho = 1.0;
    double i_d_ref = 0.0;
    double i_q_ref = 0.0;
    double e_ref = 0.0;
    double p_ref = 0.0;
};

class IbrDevice final : public Device {
public:
    IbrDevice(std::string name, std::string bus, IbrConfig config, IbrParams params);

    std::string_view model() const override;
    std::unique_ptr<Device> clone() const override { return std::make_unique<IbrDevice>(*this); }

    std::size_t n_states() const override { return n_states_; }
    std::size_t n_algebraic() const override { return n_alg_; }
    std::vector<std::string> state_names() const override;
    std::vector<std::string> algebraic_names() const override;

    Complex evaluate(std::span<const double> x, std::span<const double> y, Complex v_bus, std::span<double> f,
                     std::span<double> g) const override;
    void initialize(Complex v_bus, Complex s_inj, std::span<double> x, std::span<double> y) override;
    std::vector<std::size_t> angle_states() const override;

    bool set_parameter(std::string_view name, double value) override;
    std::optional<double> parameter(std::string_view name) const override;

    ph::PhDeclaration ph_declaration() const override;
    std::optional<ph::PhEvaluation> ph_evaluate(std::span<const double> x, std::span<const double> y,
                                                Complex v_bus) const override;
    std::vector<Probe> probes(std::span<const double> x, std::span<const double> y, Complex v_bus) const override;
    std::vector<std::string> active_bounds(std::span<const double> x, std::span<const double> y,
                                           Complex v_bus) const override;
    bool invalid(std::span<const double> x) const override;

    IbrSignals signals(std::span<const double> x, std::span<const double> y) const;

    const IbrConfig& config() const noexcept { return config_; }
    const IbrParams& params() const noexcept { return params_; }
    /// Device MVA over the 100 MVA system base.
    double base_ratio() const noexcept { return params_.s_base_mva / 100.0; }

    // State indices; -1 when the state is absent for this wiring.
    struct Layout {
        int v_dc = 0, i_d = 1, i_q = 2, v_d = 3, v_q = 4;
        int i_dc = -1, gamma_dc = -1;
        // grid-following
        int gamma_avc = -1, gamma_cd = -1, gamma_cq = -1, gamma_pll = -1, theta = -1, p_ref = -1;
        // grid-forming
        int delta = -1, gamma_p = -1, gamma_q = -1, omega = -1;
        int gamma_vd = -1, gamma_vq = -1;
        // algebraic
        int y_igd = 0, y_igq = 1, y_omega = -1;
    };
    const Layout& layout() const noexcept { return lay_; }

private:
    void build_layout();
    double slack_integrator(std::span<const double> x) const;

    IbrConfig config_;
    IbrParams params_;
    Layout lay_;
    std::size_t n_states_ = 0;
    std::size_t n_alg_ = 0;

    // Setpoints fixed by initialization.
    double v_dc_ref_ = 1.0;
    double v_ac_ref_ = 1.0;
    double i_dc_set_ = 0.0;
    double p_set_ = 0.0;
    double q_set_ = 0.0;
    double e_o_ = 1.0;
};

}  // namespace tsclab::devices
