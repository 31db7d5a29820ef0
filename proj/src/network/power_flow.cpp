#include "tsclab/network/power_flow.hpp"

#include <cmath>

#include "tsclab/numerics/linalg.hpp"

namespace tsclab::network {

namespace {

struct Schedule {
    std::vector<double> p;  // scheduled net injection
    std::vector<double> q;
};

Schedule schedule(const Network& net) {
    Schedule s{std::vector<double>(net.size(), 0.0), std::vector<double>(net.size(), 0.0)};
    for (std::size_t i = 0; i < net.size(); ++i) {
        s.p[i] = net.buses[i].p_gen;
        s.q[i] = net.buses[i].q_gen;
    }
    for (const auto& load : net.loads) {
        if (load.kind != LoadKind::ConstantPower) continue;
        const std::size_t k = net.bus_index(load.bus);
        s.p[k] -= load.p;
        s.q[k] -= load.q;
    }
    return s;
}

std::vector<Complex> injections(const ComplexMatrix& y, std::span<const double> vm, std::span<const double> va) {
    const std::size_t n = vm.size();
    std::vector<Complex> v(n), s(n);
    for (std::size_t i = 0; i < n; ++i) v[i] = std::polar(vm[i], va[i]);
    for (std::size_t i = 0; i < n; ++i) {
        Complex cur{};
        for (std::size_t j = 0; j < n; ++j) cur += y(i, j) * v[j];
        s[i] = v[i] * std::conj(cur);
    }
    return s;
}

}  // namespace

double power_flow_mismatch(const Network& net, const ComplexMatrix& ybus, std::span<const double> vm,
                           std::span<const double> va) {
    const Schedule sched = schedule(net);
    const auto s = injections(ybus, vm, va);
    double worst = 0.0;
    for (std::size_t i = 0; i < net.size(); ++i) {
        const auto type = net.buses[i].type;
        if (type != BusType::Slack) worst = std::max(worst, std::abs(s[i].real() - sched.p[i]));
        if (type == BusType::PQ) worst = std::max(worst, std::abs(s[i].imag() - sched.q[i]));
    }
    return worst;
}

PowerFlowSolution solve_power_flow(const Network& net) {
    const std::size_t n = net.size();
    std::size_t slack_count = 0;
    for (const auto& b : net.buses) slack_count += b.type == BusType::Slack ? 1 : 0;
    if (slack_count != 1) throw NetworkError("solve_power_flow: exactly one slack bus required");

    const ComplexMatrix y = build_ybus(net);
    const Schedule sched = schedule(net);

    std::vector<double> vm(n, 1.0), va(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        const auto& b = net.buses[i];
        if (b.type != BusType::PQ) vm[i] = b.v_set;
        if (b.type == BusType::Slack) va[i] = b.angle_set;
    }

    // Unknowns: angles of non-slack buses, magnitudes of PQ buses.
    std::vector<std::size_t> angle_idx, mag_idx;
    for (std::size_t i = 0; i < n; ++i) {
        if (net.buses[i].type != BusType::Slack) angle_idx.push_back(i);
        if (net.buses[i].type == BusType::PQ) mag_idx.push_back(i);
    }
    const std::size_t nu = angle_idx.size() + mag_idx.size();

    auto unpack = [&](std::span<const double> u, std::vector<double>& m, std::vector<double>& a) {
        for (std::size_t k = 0; k < angle_idx.size(); ++k) a[angle_idx[k]] = u[k];
        for (std::size_t k = 0; k < mag_idx.size(); ++k) m[mag_idx[k]] = u[angle_idx.size() + k];
    };
    auto mismatch = [&](std::span<const double> u, std::span<double> out) {
        std::vector<double> m = vm, a = va;
        unpack(u, m, a);
        const auto s = injections(y, m, a);
        for (std::size_t k = 0; k < angle_idx.size(); ++k) out[k] = s[angle_idx[k]].real() - sched.p[angle_idx[k]];
        for (std::size_t k = 0; k < mag_idx.size(); ++k)
            out[angle_idx.size() + k] = s[mag_idx[k]].imag() - sched.q[mag_idx[k]];
    };

    numerics::Vector u(nu);
    for (std::size_t k = 0; k < angle_idx.size(); ++k) u[k] = va[angle_idx[k]];
    for (std::size_t k = 0; k < mag_idx.size(); ++k) u[angle_idx.size() + k] = vm[mag_idx[k]];

    PowerFlowSolution sol;
    if (nu > 0) {
        numerics::NewtonOptions opts;
        opts.tol = 1e-11;
        opts.max_iter = 50;
        try {
            const auto res = numerics::newton_solve(mismatch, u, opts);
            u = res.x;
            sol.iterations = res.iterations;
        } catch (const numerics::ConvergenceError& e) {
            throw NetworkError(std::string("solve_power_flow: diverged: ") + e.what());
        } catch (const numerics::SingularMatrixError& e) {
            throw NetworkError(std::string("solve_power_flow: singular Jacobian: ") + e.what());
        }
    }
    unpack(u, vm, va);

    const auto s = injections(y, vm, va);
    sol.vm = vm;
    sol.va = va;
    sol.p_gen.resize(n);
    sol.q_gen.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        sol.p_gen[i] = s[i].real() + (net.buses[i].p_gen - sched.p[i]);
        sol.q_gen[i] = s[i].imag() + (net.buses[i].q_gen - sched.q[i]);
    }
    sol.mismatch = power_flow_mismatch(net, y, vm, va);
    return sol;
}

}  // namespace tsclab::network
