#pragma once

#include "tsclab/devices/device.hpp"
#include "tsclab/devices/ibr_params.hpp"

namespace tsclab::devices {

/// Classical second-order machine behind a reactance. States (δ, ω).
class SynchronousMachine final : public Device {
public:
    SynchronousMachine(std::string name, std::string bus, SmParams params);

    std::string_view model() const override { return "sm2"; }
    std::unique_ptr<Device> clone() const override { return std::make_unique<SynchronousMachine>(*this); }

    std::size_t n_states() const override { return 2; }
    std::size_t n_algebraic() const override { return 0; }
    std::vector<std::string> state_names() const override { return {"delta", "omega"}; }
    std::vector<std::string> algebraic_names() const override { return {}; }

    Complex evaluate(std::span<const double> x, std::span<const double> y, Complex v_bus, std::span<double> f,
                     std::span<double> g) const override;
    void initialize(Complex v_bus, Complex s_inj, std::span<double> x, std::span<double> y) override;
    std::vector<std::size_t> angle_states() const override { return {0}; }

    bool set_parameter(std::string_view name, double value) override;
    std::optional<double> parameter(std::string_view name) const override;

    ph::PhDeclaration ph_declaration() const override;
    std::optional<ph::PhEvaluation> ph_evaluate(std::span<const double> x, std::span<const double> y,
                                                Complex v_bus) const override;
    std::vector<Probe> probes(std::span<const double> x, std::span<const double> y, Complex v_bus) const override;

    /// Electrical power (device pu) for rotor angle δ at bus voltage v.
    double electrical_power(double delta, Complex v_bus) const;

    const SmParams& params() const noexcept { return params_; }
    double emf() const noexcept { return e_; }
    double mechanical_torque() const noexcept { return tau_m_; }
    void set_operating_point(double emf, double tau_m) {
        e_ = emf;
        tau_m_ = tau_m;
    }

private:
    double base_ratio() const noexcept { return params_.s_base_mva / 100.0; }

    SmParams params_;
    double e_ = 1.0;
    double tau_m_ = 0.0;
};

/// Ideal voltage source holding its bus at a fixed phasor.
class InfiniteSource final : public Device {
public:
    InfiniteSource(std::string name, std::string bus, Complex voltage = {1.0, 0.0});

    std::string_view model() const override { return "infinite"; }
    std::unique_ptr<Device> clone() const override { return std::make_unique<InfiniteSource>(*this); }

    std::size_t n_states() const override { return 0; }
    std::size_t n_algebraic() const override { return 2; }
    std::vector<std::string> state_names() const override { return {}; }
    std::vector<std::string> algebraic_names() const override { return {"i_D", "i_Q"}; }

    Complex evaluate(std::span<const double> x, std::span<const double> y, Complex v_bus, std::span<double> f,
                     std::span<double> g) const override;
    void initialize(Complex v_bus, Complex s_inj, std::span<double> x, std::span<double> y) override;

    bool set_parameter(std::string_view name, double value) override;
    std::optional<double> parameter(std::string_view name) const override;

    ph::PhDeclaration ph_declaration() const override { return {}; }
    std::optional<ph::PhEvaluation> ph_evaluate(std::span<const double>, std::span<const double>,
                                                Complex) const override {
        return std::nullopt;
    }
    std::vector<Probe> probes(std::span<const double> x, std::span<const double> y, Complex v_bus) const override;

private:
    Complex voltage_;
};

}  // namespace tsclab::devices
