#pragma once

#include <string>
#include <vector>

#include "tsclab/network/network.hpp"

namespace tsclab::network {

enum class EventAction { ScaleLoadTotal, SetParameter };

/// A timed discrete change, applied between accepted integration steps.
///
/// ScaleLoadTotal with target "*" (or empty) multiplies every constant-power
/// load by (1 + magnitude). With a bus label as target it switches on a new
/// constant-power load at that bus equal to `magnitude` times the total
/// constant-power demand. SetParameter replaces the named parameter
/// ("device.param") with `magnitude`.
struct Event {
    double time = 0.0;
    EventAction action = EventAction::ScaleLoadTotal;
    double magnitude = 0.0;
    std::string target = "*";
};

void validate_event(const Event& e);

/// Applies a ScaleLoadTotal event to the network's load set.
void apply_load_event(Network& net, const Event& e);

struct LoadTotals {
    double p = 0.0;
    double q = 0.0;
};
LoadTotals constant_power_totals(const Network& net);

}  // namespace tsclab::network
