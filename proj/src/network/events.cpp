#include "tsclab/network/events.hpp"

#include <cmath>

namespace tsclab::network {

void validate_event(const Event& e) {
    if (!(e.time >= 0.0) || !std::isfinite(e.time)) throw NetworkError("event time must be >= 0");
    if (!std::isfinite(e.magnitude)) throw NetworkError("event magnitude must be finite");
    if (e.action == EventAction::ScaleLoadTotal && !(e.magnitude > -1.0))
        throw NetworkError("load-step magnitude must be > -1");
    if (e.action == EventAction::SetParameter && e.target.find('.') == std::string::npos)
        throw NetworkError("set-parameter target must be 'device.parameter', got '" + e.target + "'");
}

LoadTotals constant_power_totals(const Network& net) {
    LoadTotals t;
    for (const auto& l : net.loads)
        if (l.kind == LoadKind::ConstantPower) {
            t.p += l.p;
            t.q += l.q;
        }
    return t;
}

void apply_load_event(Network& net, const Event& e) {
    if (e.action != EventAction::ScaleLoadTotal) throw NetworkError("apply_load_event: not a load event");
    validate_event(e);
    if (e.magnitude == 0.0) return;
    if (e.target.empty() || e.target == "*") {
        for (auto& l : net.loads)
            if (l.kind == LoadKind::ConstantPower) {
                l.p *= 1.0 + e.magnitude;
                l.q *= 1.0 + e.magnitude;
            }
        return;
    }
    if (!net.has_bus(e.target)) throw NetworkError("load event: unknown target bus '" + e.target + "'");
    const LoadTotals total = constant_power_totals(net);
    net.loads.push_back({e.target, LoadKind::ConstantPower, e.magnitude * total.p, e.magnitude * total.q});
}

}  // namespace tsclab::network
