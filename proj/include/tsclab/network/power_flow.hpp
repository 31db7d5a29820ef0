#pragma once

#include "tsclab/network/network.hpp"

namespace tsclab::network {

struct PowerFlowSolution {
    std::vector<double> vm;     // pu
    std::vector<double> va;     // rad
    std::vector<double> p_gen;  // per-bus generation (injection plus constant-power demand), pu
    std::vector<double> q_gen;
    int iterations = 0;
    double mismatch = 0.0;  // max |dP|,|dQ| at the solution

    Complex voltage(std::size_t bus) const { return std::polar(vm[bus], va[bus]); }
};

/// Newton-Raphson on the polar mismatch equations from a flat start.
/// Throws NetworkError after 50 iterations without reaching 1e-10.
PowerFlowSolution solve_power_flow(const Network& net);

/// Largest |dP|, |dQ| mismatch of a candidate solution.
double power_flow_mismatch(const Network& net, const ComplexMatrix& ybus, std::span<const double> vm,
                           std::span<const double> va);

}  // namespace tsclab::network
