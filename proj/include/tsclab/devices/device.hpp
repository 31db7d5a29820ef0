#pragma once

#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "tsclab/numerics/matrix.hpp"
#include "tsclab/ph/structure.hpp"

namespace tsclab::devices {

using numerics::Complex;

class InitializationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A named scalar probe of a device's instantaneous state.
struct Probe {
    std::string name;
    double value = 0.0;
};

/// Bus-connected dynamic model. All quantities crossing this interface use
/// system per-unit on the network DQ frame; devices convert internally.
class Device {
public:
    Device(std::string name, std::string bus) : name_(std::move(name)), bus_(std::move(bus)) {}
    virtual ~Device() = default;

    const std::string& name() const noexcept { return name_; }
    const std::string& bus() const noexcept { return bus_; }

    virtual std::string_view model() const = 0;
    virtual std::unique_ptr<Device> clone() const = 0;

    virtual std::size_t n_states() const = 0;
    virtual std::size_t n_algebraic() const = 0;
    virtual std::vector<std::string> state_names() const = 0;
    virtual std::vector<std::string> algebraic_names() const = 0;

    /// Writes x' into f and the device's algebraic residuals into g; returns the
    /// current injected into the bus (system pu, DQ).
    virtual Complex evaluate(std::span<const double> x, std::span<const double> y, Complex v_bus,
                             std::span<double> f, std::span<double> g) const = 0;

    /// Back-solves a steady state delivering `s_inj` (system pu) at bus voltage v.
    /// Setpoints and references are adjusted so every controller input vanishes.
    virtual void initialize(Complex v_bus, Complex s_inj, std::span<double> x, std::span<double> y) = 0;

    /// Indices of states that are absolute frame angles (rotational symmetry).
    virtual std::vector<std::size_t> angle_states() const { return {}; }

    virtual bool set_parameter(std::string_view name, double value) = 0;
    virtual std::optional<double> parameter(std::string_view name) const = 0;

    virtual ph::PhDeclaration ph_declaration() const = 0;
    virtual std::optional<ph::PhEvaluation> ph_evaluate(std::span<const double> x, std::span<const double> y,
                                                        Complex v_bus) const = 0;

    virtual std::vector<Probe> probes(std::span<const double> x, std::span<const double> y, Complex v_bus) const = 0;

    /// Variables with declared operating bounds that are currently pinned.
    virtual std::vector<std::string> active_bounds(std::span<const double> x, std::span<const double> y,
                                                   Complex v_bus) const {
        (void)x, (void)y, (void)v_bus;
        return {};
    }

    /// True when the device operates outside its valid region (e.g. v_dc <= 0).
    virtual bool invalid(std::span<const double> x) const {
        (void)x;
        return false;
    }

    /// Grid-forming devices fix their bus voltage in the initializer.
    virtual bool regulates_voltage() const { return true; }

private:
    std::string name_;
    std::string bus_;
};

}  // namespace tsclab::devices
