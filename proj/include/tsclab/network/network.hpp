#pragma once

#include <string>
#include <vector>

#include "tsclab/numerics/matrix.hpp"

namespace tsclab::network {

using numerics::Complex;
using numerics::ComplexMatrix;
using numerics::ComplexVector;

class NetworkError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

enum class BusType { Slack, PV, PQ };

struct Bus {
    std::string id;
    BusType type = BusType::PQ;
    double v_set = 1.0;      // pu, slack and PV buses
    double angle_set = 0.0;  // rad, slack bus
    double p_gen = 0.0;      // scheduled generation, pu (PV and PQ buses)
    double q_gen = 0.0;      // scheduled generation, pu (PQ buses)
};

struct Branch {
    std::string from;
    std::string to;
    double r = 0.0;
    double x = 0.0;
    double b = 0.0;    // total line charging
    double tap = 1.0;  // off-nominal ratio on the from side
};

enum class LoadKind { ConstantPower, ConstantImpedance };

struct Load {
    std::string bus;
    LoadKind kind = LoadKind::ConstantPower;
    double p = 0.0;
    double q = 0.0;

    /// Admittance that consumes (p + jq) at 1 pu voltage.
    Complex admittance() const { return {p, -q}; }
};

struct Network {
    std::vector<Bus> buses;
    std::vector<Branch> branches;
    std::vector<Load> loads;

    std::size_t bus_index(const std::string& id) const;
    bool has_bus(const std::string& id) const;
    std::size_t size() const noexcept { return buses.size(); }
};

/// Bus admittance matrix. Constant-impedance loads are folded into the diagonal.
ComplexMatrix build_ybus(const Network& net);

/// Current drawn by a load at bus voltage v; below 0.01 pu a constant-power
/// load's current is evaluated at 0.01 pu along the same phase.
struct LoadCurrent {
    Complex current;
    bool frozen = false;
};
LoadCurrent load_current(const Load& load, Complex v);

/// Per-bus complex KCL residual I_inj - Y V, laid out as (re, im) pairs.
numerics::Vector network_residual(const ComplexMatrix& ybus, std::span<const Complex> v,
                                  std::span<const Complex> injections);

/// The WSCC 3-machine 9-bus system (100 MVA base) with the generator dispatch
/// of the standard data set. Buses are labelled "1".."9".
Network wscc9();

}  // namespace tsclab::network
