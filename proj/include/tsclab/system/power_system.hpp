#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "tsclab/devices/device.hpp"
#include "tsclab/network/events.hpp"
#include "tsclab/network/network.hpp"
#include "tsclab/network/power_flow.hpp"
#include "tsclab/numerics/dae.hpp"

namespace tsclab::system {

using numerics::Complex;
using numerics::Vector;

/// A consistent operating point of the whole system.
struct OperatingPoint {
    Vector x;
    Vector y;
    double power_flow_mismatch = 0.0;
    double max_state_derivative = 0.0;
    double max_constraint = 0.0;
};

/// Network plus dynamic devices, assembled into one semi-explicit DAE.
/// Algebraic unknowns: every device's algebraics followed by (Re V, Im V) per bus.
class PowerSystem {
public:
    explicit PowerSystem(network::Network net);
    PowerSystem(const PowerSystem& other);
    PowerSystem& operator=(const PowerSystem& other);
    PowerSystem(PowerSystem&&) noexcept = default;
    PowerSystem& operator=(PowerSystem&&) noexcept = default;

    /// Adds a device. A fixed dispatch (system pu) takes that share of its bus's
    /// generation; at most one device per bus may take the remainder.
    void add_device(std::unique_ptr<devices::Device> device, std::optional<Complex> dispatch = std::nullopt);

    std::size_t n_states() const noexcept { return n_states_; }
    std::size_t n_algebraic() const noexcept { return n_alg_; }
    std::size_t device_count() const noexcept { return devices_.size(); }
    const devices::Device& device(std::size_t k) const { return *devices_[k].device; }
    devices::Device& device(std::size_t k) { return *devices_[k].device; }
    std::optional<std::size_t> find_device(const std::string& name) const;
    const network::Network& network() const noexcept { return net_; }

    std::size_t state_offset(std::size_t k) const { return devices_[k].x_offset; }
    std::size_t algebraic_offset(std::size_t k) const { return devices_[k].y_offset; }
    std::size_t voltage_offset() const noexcept { return n_dev_alg_; }
    std::size_t device_bus(std::size_t k) const { return devices_[k].bus; }

    std::span<const double> device_states(std::span<const double> x, std::size_t k) const;
    std::span<const double> device_algebraics(std::span<const double> y, std::size_t k) const;
    Complex bus_voltage(std::span<const double> y, std::size_t bus) const;

    std::vector<std::string> state_labels() const;
    std::vector<std::string> algebraic_labels() const;
    /// Global indices of absolute frame angles (the rotational-symmetry direction).
    std::vector<std::size_t> angle_states() const;

    /// Power flow, device back-initialization, and a consistency check.
    /// Throws devices::InitializationError when the residual exceeds `tol`.
    OperatingPoint initialize(double tol = 1e-9);

    void evaluate(std::span<const double> x, std::span<const double> y, std::span<double> f,
                  std::span<double> g) const;
    numerics::DaeSystem dae() const;

    /// True when a constant-power load is evaluated below its voltage floor.
    bool load_frozen(std::span<const double> y) const;
    /// Label of the first device reporting an invalid state, if any.
    std::optional<std::string> invalid_device(std::span<const double> x) const;

    /// Applies a load or parameter event. Throws on unknown targets.
    void apply_event(const network::Event& event);

private:
    struct Slot {
        std::unique_ptr<devices::Device> device;
        std::optional<Complex> dispatch;
        std::size_t bus = 0;
        std::size_t x_offset = 0;
        std::size_t y_offset = 0;
    };

    void relayout();

    network::Network net_;
    numerics::ComplexMatrix ybus_;
    std::vector<Slot> devices_;
    std::size_t n_states_ = 0;
    std::size_t n_dev_alg_ = 0;
    std::size_t n_alg_ = 0;
};

}  // namespace tsclab::system
