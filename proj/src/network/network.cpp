#include "tsclab/network/network.hpp"

#include <cmath>
#include <queue>

namespace tsclab::network {

std::size_t Network::bus_index(const std::string& id) const {
    for (std::size_t i = 0; i < buses.size(); ++i)
        if (buses[i].id == id) return i;
    throw NetworkError("unknown bus '" + id + "'");
}

bool Network::has_bus(const std::string& id) const {
    for (const auto& b : buses)
        if (b.id == id) return true;
    return false;
}

ComplexMatrix build_ybus(const Network& net) {
    const std::size_t n = net.size();
    if (n == 0) throw NetworkError("build_ybus: network has no buses");
    ComplexMatrix y(n, n);
    std::vector<std::vector<std::size_t>> adjacency(n);
    for (const auto& br : net.branches) {
        if (br.r == 0.0 && br.x == 0.0) throw NetworkError("build_ybus: zero-impedance branch " + br.from + "-" + br.to);
        if (!(br.tap > 0.0)) throw NetworkError("build_ybus: non-positive tap on branch " + br.from + "-" + br.to);
        const std::size_t f = net.bus_index(br.from);
        const std::size_t t = net.bus_index(br.to);
        const Complex ys = 1.0 / Complex(br.r, br.x);
        const Complex ysh(0.0, br.b / 2.0);
        y(f, f) += (ys + ysh) / (br.tap * br.tap);
        y(t, t) += ys + ysh;
        y(f, t) -= ys / br.tap;
        y(t, f) -= ys / br.tap;
        adjacency[f].push_back(t);
        adjacency[t].push_back(f);
    }
    for (const auto& load : net.loads)
        if (load.kind == LoadKind::ConstantImpedance) y(net.bus_index(load.bus), net.bus_index(load.bus)) += load.admittance();

    std::vector<bool> seen(n, false);
    std::queue<std::size_t> frontier;
    frontier.push(0);
    seen[0] = true;
    std::size_t reached = 1;
    while (!frontier.empty()) {
        const std::size_t k = frontier.front();
        frontier.pop();
        for (std::size_t j : adjacency[k])
            if (!seen[j]) {
                seen[j] = true;
                ++reached;
                frontier.push(j);
            }
    }
    if (reached != n) throw NetworkError("build_ybus: network is disconnected");
    return y;
}

LoadCurrent load_current(const Load& load, Complex v) {
    if (load.kind == LoadKind::ConstantImpedance) return {load.admittance() * v, false};
    constexpr double v_floor = 0.01;
    const double mag = std::abs(v);
    if (mag < v_floor) {
        const Complex v_eval = mag > 0.0 ? v * (v_floor / mag) : Complex(v_floor, 0.0);
        return {std::conj(Complex(load.p, load.q) / v_eval), true};
    }
    return {std::conj(Complex(load.p, load.q) / v), false};
}

numerics::Vector network_residual(const ComplexMatrix& ybus, std::span<const Complex> v,
                                  std::span<const Complex> injections) {
    const std::size_t n = ybus.rows();
    if (v.size() != n || injections.size() != n) throw std::invalid_argument("network_residual: dimension mismatch");
    numerics::Vector out(2 * n);
    for (std::size_t i = 0; i < n; ++i) {
        Complex acc = injections[i];
        const auto row = ybus.row(i);
        for (std::size_t j = 0; j < n; ++j) acc -= row[j] * v[j];
        out[2 * i] = acc.real();
        out[2 * i + 1] = acc.imag();
    }
    return out;
}

Network wscc9() {
    Network net;
    net.buses = {
        {"1", BusType::Slack, 1.04, 0.0, 0.0, 0.0},  {"2", BusType::PV, 1.025, 0.0, 1.63, 0.0},
        {"3", BusType::PV, 1.025, 0.0, 0.85, 0.0},   {"4", BusType::PQ, 1.0, 0.0, 0.0, 0.0},
        {"5", BusType::PQ, 1.0, 0.0, 0.0, 0.0},      {"6", BusType::PQ, 1.0, 0.0, 0.0, 0.0},
        {"7", BusType::PQ, 1.0, 0.0, 0.0, 0.0},      {"8", BusType::PQ, 1.0, 0.0, 0.0, 0.0},
        {"9", BusType::PQ, 1.0, 0.0, 0.0, 0.0},
    };
    net.branches = {
        {"1", "4", 0.0, 0.0576, 0.0, 1.0},      {"4", "5", 0.010, 0.085, 0.176, 1.0},
        {"5", "7", 0.032, 0.161, 0.306, 1.0},   {"2", "7", 0.0, 0.0625, 0.0, 1.0},
        {"7", "8", 0.0085, 0.072, 0.149, 1.0},  {"8", "9", 0.0119, 0.1008, 0.209, 1.0},
        {"3", "9", 0.0, 0.0586, 0.0, 1.0},      {"9", "6", 0.039, 0.170, 0.358, 1.0},
        {"6", "4", 0.017, 0.092, 0.158, 1.0},
    };
    net.loads = {
        {"5", LoadKind::ConstantPower, 1.25, 0.50},
        {"6", LoadKind::ConstantPower, 0.90, 0.30},
        {"8", LoadKind::ConstantPower, 1.00, 0.35},
    };
    return net;
}

}  // namespace tsclab::network
