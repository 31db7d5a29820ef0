#pragma once

#include "tsclab/numerics/matrix.hpp"

namespace tsclab::ph {

using numerics::DenseMatrix;
using numerics::Vector;

/// Column split of G and u into source, control and interconnection blocks.
struct PortSplit {
    std::size_t source = 0;
    std::size_t control = 0;
    std::size_t interconnection = 0;
    std::size_t total() const noexcept { return source + control + interconnection; }
};

/// Static facts about a device's energy structure, enough for the structural
/// TSC conditions.
struct PhDeclaration {
    /// Quadratic storage H = 1/2 x^T Q x over the storage states (empty: no storage).
    DenseMatrix storage_form;
    std::vector<std::string> storage_names;
    PortSplit split;
    /// G^S has a nonzero entry for some admissible state.
    bool source_port_present = false;
    /// u^S evolves by its own dynamics rather than being held constant.
    bool source_dynamic = false;
};

/// The port-Hamiltonian quantities of one device at one instant.
struct PhEvaluation {
    Vector storage;  // storage states
    double energy = 0.0;
    Vector gradient;
    DenseMatrix j;
    DenseMatrix r;
    DenseMatrix g;
    Vector u;
    PortSplit split;
    Vector xdot;  // storage-state derivatives implied by the device model

    // Port powers of the device model (independent of J/R/G).
    double p_source = 0.0;
    double p_interconnection = 0.0;  // power delivered to the grid
    double p_dissipation = 0.0;
    double limiter_rho = 1.0;
};

}  // namespace tsclab::ph
