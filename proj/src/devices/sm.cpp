#include "tsclab/devices/sm.hpp"

#include <cmath>
#include <stdexcept>

namespace tsclab::devices {

SynchronousMachine::SynchronousMachine(std::string name, std::string bus, SmParams params)
    : Device(std::move(name), std::move(bus)), params_(params) {
    params_.validate();
}

double SynchronousMachine::electrical_power(double delta, Complex v_bus) const {
    return std::abs(v_bus) * e_ / params_.x_s * std::sin(delta - std::arg(v_bus));
}

Complex SynchronousMachine::evaluate(std::span<const double> x, std::span<const double>, Complex v_bus,
                                     std::span<double> f, std::span<double>) const {
    const SmParams& p = params_;
    const double delta = x[0], omega = x[1];
    const double p_e = electrical_power(delta, v_bus);
    f[0] = p.omega_b * (omega - p.omega_s);
    f[1] = (tau_m_ - p_e / omega - p.d * (omega - p.omega_s)) / (2.0 * p.h);
    const Complex current = (std::polar(e_, delta) - v_bus) / Complex{0.0, p.x_s};
    return current * base_ratio();
}

void SynchronousMachine::initialize(Complex v_bus, Complex s_inj, std::span<double> x, std::span<double>) {
    if (std::abs(v_bus) == 0.0) throw InitializationError("machine '" + name() + "': zero bus voltage");
    const Complex s_dev = s_inj / base_ratio();
    const Complex current = std::conj(s_dev / v_bus);
    const Complex emf = v_bus + Complex{0.0, params_.x_s} * current;
    e_ = std::abs(emf);
    x[0] = std::arg(emf);
    x[1] = params_.omega_s;
    tau_m_ = electrical_power(x[0], v_bus) / params_.omega_s;
}

bool SynchronousMachine::set_parameter(std::string_view name, double value) {
    if (name == "e") return e_ = value, true;
    if (name == "tau_m") return tau_m_ = value, true;
    SmParams next = params_;
    if (!next.set(name, value)) return false;
    next.validate();
    params_ = next;
    return true;
}

std::optional<double> SynchronousMachine::parameter(std::string_view name) const {
    if (name == "e") return e_;
    if (name == "tau_m") return tau_m_;
    return params_.get(name);
}

ph::PhDeclaration SynchronousMachine::ph_declaration() const {
    ph::PhDeclaration d;
    d.storage_form = numerics::DenseMatrix(2, 2);
    d.storage_form(1, 1) = 2.0 * params_.h;
    d.storage_names = {"delta", "omega"};
    d.split = {1, 1, 1};
    d.source_port_present = true;
    d.source_dynamic = false;
    return d;
}

std::optional<ph::PhEvaluation> SynchronousMachine::ph_evaluate(std::span<const double> x, std::span<const double>,
                                                                Complex v_bus) const {
    const SmParams& p = params_;
    const double delta = x[0], omega = x[1];
    const double two_h = 2.0 * p.h;
    const double vh = std::abs(v_bus);
    const double s = std::sin(delta - std::arg(v_bus));

    ph::PhEvaluation e;
    e.storage = {delta, omega};
    e.energy = p.h * omega * omega;
    e.gradient = {0.0, two_h * omega};
    e.j = numerics::DenseMatrix(2, 2);
    e.j(0, 1) = p.omega_b / two_h;
    e.j(1, 0) = -p.omega_b / two_h;
    e.r = numerics::DenseMatrix(2, 2);
    e.r(1, 1) = p.d / (two_h * two_h);

    // Ports: source torque (with the damping offset), frame reference, field.
    e.split = {1, 1, 1};
    e.g = numerics::DenseMatrix(2, 3);
    e.g(1, 0) = 1.0 / two_h;
    e.g(0, 1) = -p.omega_b;
    e.g(1, 2) = vh * s / (p.x_s * omega * two_h);
    e.u = {tau_m_ + p.d * p.omega_s, p.omega_s, -e_};

    e.xdot = {p.omega_b * (omega - p.omega_s),
              (tau_m_ - electrical_power(delta, v_bus) / omega - p.d * (omega - p.omega_s)) / two_h};
    e.p_source = omega * (tau_m_ + p.d * p.omega_s);
    e.p_interconnection = electrical_power(delta, v_bus);
    e.p_dissipation = p.d * omega * omega;
    return e;
}

std::vector<Probe> SynchronousMachine::probes(std::span<const double> x, std::span<const double>,
                                              Complex v_bus) const {
    const Complex current = (std::polar(e_, x[0]) - v_bus) / Complex{0.0, params_.x_s} * base_ratio();
    const Complex s = v_bus * std::conj(current);
    return {
        {"omega", x[1]},
        {"angle", x[0]},
        {"v_ac", std::abs(v_bus)},
        {"p", s.real()},
        {"q", s.imag()},
        {"v_D", v_bus.real()},
        {"v_Q", v_bus.imag()},
        {"i_D", current.real()},
        {"i_Q", current.imag()},
    };
}

InfiniteSource::InfiniteSource(std::string name, std::string bus, Complex voltage)
    : Device(std::move(name), std::move(bus)), voltage_(voltage) {}

Complex InfiniteSource::evaluate(std::span<const double>, std::span<const double> y, Complex v_bus,
                                 std::span<double>, std::span<double> g) const {
    g[0] = v_bus.real() - voltage_.real();
    g[1] = v_bus.imag() - voltage_.imag();
    return {y[0], y[1]};
}

void InfiniteSource::initialize(Complex v_bus, Complex s_inj, std::span<double>, std::span<double> y) {
    voltage_ = v_bus;
    const Complex current = std::conj(s_inj / v_bus);
    y[0] = current.real();
    y[1] = current.imag();
}

bool InfiniteSource::set_parameter(std::string_view name, double value) {
    if (name == "v_mag") return voltage_ = std::polar(value, std::arg(voltage_)), true;
    if (name == "v_angle") return voltage_ = std::polar(std::abs(voltage_), value), true;
    return false;
}

std::optional<double> InfiniteSource::parameter(std::string_view name) const {
    if (name == "v_mag") return std::abs(voltage_);
    if (name == "v_angle") return std::arg(voltage_);
    return std::nullopt;
}

std::vector<Probe> InfiniteSource::probes(std::span<const double>, std::span<const double> y, Complex v_bus) const {
    const Complex s = v_bus * std::conj(Complex{y[0], y[1]});
    return {{"v_ac", std::abs(v_bus)}, {"p", s.real()}, {"q", s.imag()}};
}

}  // namespace tsclab::devices
