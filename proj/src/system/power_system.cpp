#include "tsclab/system/power_system.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace tsclab::system {

using devices::InitializationError;

PowerSystem::PowerSystem(network::Network net) : net_(std::move(net)) {
    ybus_ = network::build_ybus(net_);
    relayout();
}

PowerSystem::PowerSystem(const PowerSystem& other)
    : net_(other.net_),
      ybus_(other.ybus_),
      n_states_(other.n_states_),
      n_dev_alg_(other.n_dev_alg_),
      n_alg_(other.n_alg_) {
    devices_.reserve(other.devices_.size());
    for (const auto& s : other.devices_)
        devices_.push_back({s.device->clone(), s.dispatch, s.bus, s.x_offset, s.y_offset});
}

PowerSystem& PowerSystem::operator=(const PowerSystem& other) {
    if (this != &other) *this = PowerSystem(other);
    return *this;
}

void PowerSystem::add_device(std::unique_ptr<devices::Device> device, std::optional<Complex> dispatch) {
    if (!device) throw std::invalid_argument("add_device: null device");
    if (!net_.has_bus(device->bus()))
        throw std::invalid_argument("device '" + device->name() + "': unknown bus '" + device->bus() + "'");
    if (find_device(device->name()))
        throw std::invalid_argument("duplicate device name '" + device->name() + "'");
    const std::size_t bus = net_.bus_index(device->bus());
    devices_.push_back({std::move(device), dispatch, bus, 0, 0});
    relayout();
}

void PowerSystem::relayout() {
    n_states_ = 0;
    n_dev_alg_ = 0;
    for (auto& s : devices_) {
        s.x_offset = n_states_;
        s.y_offset = n_dev_alg_;
        n_states_ += s.device->n_states();
        n_dev_alg_ += s.device->n_algebraic();
    }
    n_alg_ = n_dev_alg_ + 2 * net_.size();
}

std::optional<std::size_t> PowerSystem::find_device(const std::string& name) const {
    for (std::size_t k = 0; k < devices_.size(); ++k)
        if (devices_[k].device->name() == name) return k;
    return std::nullopt;
}

std::span<const double> PowerSystem::device_states(std::span<const double> x, std::size_t k) const {
    return x.subspan(devices_[k].x_offset, devices_[k].device->n_states());
}

std::span<const double> PowerSystem::device_algebraics(std::span<const double> y, std::size_t k) const {
    return y.subspan(devices_[k].y_offset, devices_[k].device->n_algebraic());
}

Complex PowerSystem::bus_voltage(std::span<const double> y, std::size_t bus) const {
    return {y[n_dev_alg_ + 2 * bus], y[n_dev_alg_ + 2 * bus + 1]};
}

std::vector<std::string> PowerSystem::state_labels() const {
    std::vector<std::string> out;
    out.reserve(n_states_);
    for (const auto& s : devices_)
        for (const auto& n : s.device->state_names()) out.push_back(s.device->name() + "." + n);
    return out;
}

std::vector<std::string> PowerSystem::algebraic_labels() const {
    std::vector<std::string> out;
    out.reserve(n_alg_);
    for (const auto& s : devices_)
        for (const auto& n : s.device->algebraic_names()) out.push_back(s.device->name() + "." + n);
    for (const auto& b : net_.buses) {
        out.push_back("bus" + b.id + ".v_re");
        out.push_back("bus" + b.id + ".v_im");
    }
    return out;
}

std::vector<std::size_t> PowerSystem::angle_states() const {
    std::vector<std::size_t> out;
    for (const auto& s : devices_)
        for (std::size_t a : s.device->angle_states()) out.push_back(s.x_offset + a);
    return out;
}

void PowerSystem::evaluate(std::span<const double> x, std::span<const double> y, std::span<double> f,
                           std::span<double> g) const {
    const std::size_t nb = net_.size();
    std::vector<Complex> v(nb), inj(nb);
    for (std::size_t i = 0; i < nb; ++i) v[i] = bus_voltage(y, i);
    for (const auto& s : devices_) {
        const auto& d = *s.device;
        inj[s.bus] += d.evaluate(x.subspan(s.x_offset, d.n_states()), y.subspan(s.y_offset, d.n_algebraic()),
                                 v[s.bus], f.subspan(s.x_offset, d.n_states()),
                                 g.subspan(s.y_offset, d.n_algebraic()));
    }
    for (const auto& load : net_.loads) {
        if (load.kind != network::LoadKind::ConstantPower) continue;
        const std::size_t k = net_.bus_index(load.bus);
        inj[k] -= network::load_current(load, v[k]).current;
    }
    for (std::size_t i = 0; i < nb; ++i) {
        Complex r = inj[i];
        for (std::size_t j = 0; j < nb; ++j) r -= ybus_(i, j) * v[j];
        g[n_dev_alg_ + 2 * i] = r.real();
        g[n_dev_alg_ + 2 * i + 1] = r.imag();
    }
}

numerics::DaeSystem PowerSystem::dae() const {
    numerics::DaeSystem sys;
    sys.n_states = n_states_;
    sys.n_algebraic = n_alg_;
    sys.rhs = [this](double, std::span<const double> x, std::span<const double> y, std::span<double> f) {
        Vector g(n_alg_);
        evaluate(x, y, f, g);
    };
    sys.constraints = [this](double, std::span<const double> x, std::span<const double> y, std::span<double> g) {
        Vector f(n_states_);
        evaluate(x, y, f, g);
    };
    return sys;
}

OperatingPoint PowerSystem::initialize(double tol) {
    const network::PowerFlowSolution pf = network::solve_power_flow(net_);
    OperatingPoint op;
    op.power_flow_mismatch = pf.mismatch;
    op.x.assign(n_states_, 0.0);
    op.y.assign(n_alg_, 0.0);

    for (std::size_t b = 0; b < net_.size(); ++b) {
        const Complex v = pf.voltage(b);
        op.y[n_dev_alg_ + 2 * b] = v.real();
        op.y[n_dev_alg_ + 2 * b + 1] = v.imag();

        Complex remainder{pf.p_gen[b], pf.q_gen[b]};
        Slot* free_slot = nullptr;
        for (auto& s : devices_) {
            if (s.bus != b) continue;
            if (s.dispatch) {
                remainder -= *s.dispatch;
            } else {
                if (free_slot)
                    throw InitializationError("bus '" + net_.buses[b].id +
                                              "': more than one device without a fixed dispatch");
                free_slot = &s;
            }
        }
        if (!free_slot && std::abs(remainder) > 1e-9)
            throw InitializationError("bus '" + net_.buses[b].id + "': generation of " +
                                      std::to_string(std::abs(remainder)) + " pu has no device to take it");
        for (auto& s : devices_) {
            if (s.bus != b) continue;
            const Complex share = s.dispatch ? *s.dispatch : remainder;
            auto& d = *s.device;
            d.initialize(v, share, std::span<double>(op.x).subspan(s.x_offset, d.n_states()),
                         std::span<double>(op.y).subspan(s.y_offset, d.n_algebraic()));
        }
    }

    Vector f(n_states_), g(n_alg_);
    evaluate(op.x, op.y, f, g);
    op.max_state_derivative = numerics::norm_inf(f);
    op.max_constraint = numerics::norm_inf(g);
    if (!(op.max_state_derivative <= tol) || !(op.max_constraint <= tol)) {
        std::size_t worst = 0;
        for (std::size_t i = 0; i < f.size(); ++i)
            if (std::abs(f[i]) > std::abs(f[worst])) worst = i;
        const auto labels = state_labels();
        throw InitializationError("initialization residual too large: max |x'| = " +
                                  std::to_string(op.max_state_derivative) + (labels.empty() ? "" : " at " + labels[worst]) +
                                  ", max |g| = " + std::to_string(op.max_constraint));
    }
    return op;
}

bool PowerSystem::load_frozen(std::span<const double> y) const {
    for (const auto& load : net_.loads) {
        if (load.kind != network::LoadKind::ConstantPower) continue;
        if (network::load_current(load, bus_voltage(y, net_.bus_index(load.bus))).frozen) return true;
    }
    return false;
}

std::optional<std::string> PowerSystem::invalid_device(std::span<const double> x) const {
    for (const auto& s : devices_)
        if (s.device->invalid(x.subspan(s.x_offset, s.device->n_states()))) return s.device->name();
    return std::nullopt;
}

void PowerSystem::apply_event(const network::Event& event) {
    network::validate_event(event);
    if (event.action == network::EventAction::ScaleLoadTotal) {
        network::apply_load_event(net_, event);
        ybus_ = network::build_ybus(net_);
        return;
    }
    const auto dot = event.target.find('.');
    const std::string dev = event.target.substr(0, dot);
    const std::string param = event.target.substr(dot + 1);
    const auto k = find_device(dev);
    if (!k) throw std::invalid_argument("event: unknown device '" + dev + "'");
    if (!devices_[*k].device->set_parameter(param, event.magnitude))
        throw std::invalid_argument("event: device '" + dev + "' has no parameter '" + param + "'");
}

}  // namespace tsclab::system
