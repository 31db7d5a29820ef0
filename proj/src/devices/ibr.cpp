#include "tsclab/devices/ibr.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace tsclab::devices {

namespace {

constexpr double kMinAntiWindupDenominator = 1e-3;

Complex rotate(Complex z, double angle) { return z * std::polar(1.0, angle); }

bool structural_change(const IbrConfig& c, const IbrParams& before, std::string_view name, double value) {
    if (c.scheme == ControlScheme::GridFollowing && name == "ki_avc_gfl")
        return (before.ki_avc_gfl == 0.0) != (value == 0.0);
    if (c.scheme == ControlScheme::VirtualSynchronousMachine && name == "m_vsm")
        return (before.m_vsm == 0.0) != (value == 0.0);
    return false;
}

}  // namespace

IbrConfig IbrConfig::for_case(int study_case) {
    IbrConfig c;
    switch (study_case) {
    case 1: break;
    case 2:
        c.slack_controller = true;
        c.shared_dvc_integrator = true;
        break;
    case 3:
        c.slack_controller = true;
        c.frequency_droop = true;
        c.slack_sign = -1.0;
        break;
    case 4: c.scheme = ControlScheme::GridForming; break;
    case 5:
        c.scheme = ControlScheme::GridForming;
        c.slack_controller = true;
        c.slack_sign = -1.0;
        break;
    case 6:
        c.scheme = ControlScheme::VirtualSynchronousMachine;
        c.slack_controller = true;
        c.slack_sign = -1.0;
        break;
    default: throw std::invalid_argument("study case must be 1..6, got " + std::to_string(study_case));
    }
    return c;
}

double current_limit_rho(double i_d, double i_q, double i_max) {
    if (!(i_max > 0.0)) throw std::invalid_argument("current_limit_rho: i_max must be > 0");
    const double mag = std::hypot(i_d, i_q);
    if (mag <= i_max) return 1.0;
    return i_max / mag;
}

PhysicalState physical_rhs(const IbrParams& p, const PhysicalState& s, const PhysicalInputs& in) {
    const auto [v_dc, i_d, i_q, v_d, v_q] = s;
    PhysicalState out{};
    const double p_conv = in.v_td * i_d + in.v_tq * i_q;
    out[0] = (in.i_dc - p_conv / v_dc) / p.c_dc;
    out[1] = (-p.r_f * i_d + in.omega * p.l_f * i_q + (in.v_td - v_d)) / p.l_f;
    out[2] = (-p.r_f * i_q - in.omega * p.l_f * i_d + (in.v_tq - v_q)) / p.l_f;
    out[3] = (in.omega * p.c_f * v_q + (i_d - in.i_gd)) / p.c_f;
    out[4] = (-in.omega * p.c_f * v_d + (i_q - in.i_gq)) / p.c_f;
    return out;
}

IbrDevice::IbrDevice(std::string name, std::string bus, IbrConfig config, IbrParams params)
    : Device(std::move(name), std::move(bus)), config_(config), params_(params) {
    params_.validate();
    if (!(params_.c_dc > 0.0)) throw std::invalid_argument("converter '" + this->name() + "': c_dc must be > 0");
    if (config_.scheme != ControlScheme::GridFollowing && config_.frequency_droop)
        throw std::invalid_argument("frequency droop applies to grid-following converters only");
    if (config_.scheme != ControlScheme::GridFollowing && config_.shared_dvc_integrator)
        throw std::invalid_argument("grid-forming converters have no DVC integrator to share");
    if (config_.shared_dvc_integrator && !config_.slack_controller)
        throw std::invalid_argument("shared DVC integrator requires the slack controller");
    if (config_.slack_sign != 1.0 && config_.slack_sign != -1.0)
        throw std::invalid_argument("slack_sign must be +1 or -1");
    build_layout();
}

std::string_view IbrDevice::model() const {
    switch (config_.scheme) {
    case ControlScheme::GridFollowing: return "gfl";
    case ControlScheme::GridForming: return "gfm";
    case ControlScheme::VirtualSynchronousMachine: return "vsm";
    }
    return "ibr";
}

void IbrDevice::build_layout() {
    lay_ = Layout{};
    int n = 5;
    if (config_.slack_controller) lay_.i_dc = n++;
    const bool gfl = config_.scheme == ControlScheme::GridFollowing;
    if (gfl || config_.slack_controller) lay_.gamma_dc = n++;
    if (gfl) {
        if (params_.ki_avc_gfl != 0.0) lay_.gamma_avc = n++;
        lay_.gamma_cd = n++;
        lay_.gamma_cq = n++;
        lay_.gamma_pll = n++;
        lay_.theta = n++;
        if (config_.frequency_droop) lay_.p_ref = n++;
    } else {
        lay_.delta = n++;
        if (config_.scheme == ControlScheme::GridForming) {
            lay_.gamma_p = n++;
            lay_.gamma_q = n++;
        } else if (params_.m_vsm > 0.0) {
            lay_.omega = n++;
        }
        lay_.gamma_vd = n++;
        lay_.gamma_vq = n++;
        lay_.gamma_cd = n++;
        lay_.gamma_cq = n++;
    }
    n_states_ = static_cast<std::size_t>(n);
    n_alg_ = 2;
    if (config_.scheme == ControlScheme::VirtualSynchronousMachine && params_.m_vsm == 0.0)
        lay_.y_omega = static_cast<int>(n_alg_++);
}

std::vector<std::string> IbrDevice::state_names() const {
    std::vector<std::string> out(n_states_);
    auto put = [&](int idx, const char* n) {
        if (idx >= 0) out[static_cast<std::size_t>(idx)] = n;
    };
    put(lay_.v_dc, "v_dc");
    put(lay_.i_d, "i_d");
    put(lay_.i_q, "i_q");
    put(lay_.v_d, "v_d");
    put(lay_.v_q, "v_q");
    put(lay_.i_dc, "i_dc_ref");
    put(lay_.gamma_dc, "gamma_dc");
    put(lay_.gamma_avc, "gamma_avc");
    put(lay_.gamma_cd, "gamma_cc_d");
    put(lay_.gamma_cq, "gamma_cc_q");
    put(lay_.gamma_pll, "gamma_pll");
    put(lay_.theta, "theta_e");
    put(lay_.p_ref, "p_ref");
    put(lay_.delta, "delta");
    put(lay_.gamma_p, "gamma_p");
    put(lay_.gamma_q, "gamma_q");
    put(lay_.omega, "omega");
    put(lay_.gamma_vd, "gamma_avc_d");
    put(lay_.gamma_vq, "gamma_avc_q");
    return out;
}

std::vector<std::string> IbrDevice::algebraic_names() const {
    std::vector<std::string> out{"i_gD", "i_gQ"};
    if (lay_.y_omega >= 0) out.emplace_back("omega");
    return out;
}

double IbrDevice::slack_integrator(std::span<const double> x) const {
    return lay_.gamma_dc >= 0 ? x[static_cast<std::size_t>(lay_.gamma_dc)] : 0.0;
}

IbrSignals IbrDevice::signals(std::span<const double> x, std::span<const double> y) const {
    const auto at = [&](int i) { return x[static_cast<std::size_t>(i)]; };
    const IbrParams& p = params_;
    IbrSignals s;
    s.storage = {at(lay_.v_dc), at(lay_.i_d), at(lay_.i_q), at(lay_.v_d), at(lay_.v_q)};
    const auto [v_dc, i_d, i_q, v_d, v_q] = s.storage;

    s.frame_angle = config_.scheme == ControlScheme::GridFollowing ? at(lay_.theta) : at(lay_.delta);
    const Complex i_g_bus{y[static_cast<std::size_t>(lay_.y_igd)], y[static_cast<std::size_t>(lay_.y_igq)]};
    s.i_grid_dq = rotate(i_g_bus, -s.frame_angle);
    s.inputs.i_gd = s.i_grid_dq.real();
    s.inputs.i_gq = s.i_grid_dq.imag();
    s.p = v_d * s.inputs.i_gd + v_q * s.inputs.i_gq;
    s.q = v_q * s.inputs.i_gd - v_d * s.inputs.i_gq;
    s.inputs.i_dc = config_.slack_controller ? at(lay_.i_dc) : i_dc_set_;

    if (config_.scheme == ControlScheme::GridFollowing) {
        s.omega = p.kp_pll * v_q + p.ki_pll * at(lay_.gamma_pll) + p.omega_s;
        const double v_ac = std::hypot(v_d, v_q);
        s.i_q_ref = p.kp_avc_gfl * (v_ac - v_ac_ref_);
        if (lay_.gamma_avc >= 0) s.i_q_ref += p.ki_avc_gfl * at(lay_.gamma_avc);
        if (config_.frequency_droop) {
            s.p_ref = at(lay_.p_ref);
            const double cross = config_.literal_power_reference ? v_d : v_q;
            s.i_d_ref = (s.p_ref - cross * i_q) / v_d;
        } else {
            s.i_d_ref = p.kp_dvc * (v_dc - v_dc_ref_) + p.ki_dvc * at(lay_.gamma_dc);
        }
        s.inputs.v_td = p.kp_cc_gfl * (s.i_d_ref - i_d) + p.ki_cc_gfl * at(lay_.gamma_cd) - s.omega * p.l_f * i_q + v_d;
        s.inputs.v_tq = p.kp_cc_gfl * (s.i_q_ref - i_q) + p.ki_cc_gfl * at(lay_.gamma_cq) + s.omega * p.l_f * i_d + v_q;
    } else {
        if (config_.scheme == ControlScheme::GridForming) {
            s.omega = p.omega_s + p.m_p * p.omega_c * at(lay_.gamma_p);
            s.e_ref = e_o_ + p.m_q * p.omega_c * at(lay_.gamma_q);
        } else {
            s.omega = lay_.omega >= 0 ? at(lay_.omega) : y[static_cast<std::size_t>(lay_.y_omega)];
            s.e_ref = e_o_;
        }
        s.p_ref = p_set_;
        s.rho = current_limit_rho(i_d, i_q, p.i_max);
        const double den = std::max(1.0 - p.kp_avc_gfm * p.k_w * (1.0 - s.rho), kMinAntiWindupDenominator);
        s.i_d_ref = (p.kp_avc_gfm * (s.e_ref - v_d) + p.ki_avc_gfm * at(lay_.gamma_vd)) / den;
        s.i_q_ref = (p.kp_avc_gfm * (0.0 - v_q) + p.ki_avc_gfm * at(lay_.gamma_vq)) / den;
        s.inputs.v_td =
            p.kp_cc_gfm * (s.rho * s.i_d_ref - i_d) + p.ki_cc_gfm * at(lay_.gamma_cd) + v_d - s.omega * p.l_f * i_q;
        s.inputs.v_tq =
            p.kp_cc_gfm * (s.rho * s.i_q_ref - i_q) + p.ki_cc_gfm * at(lay_.gamma_cq) + v_q + s.omega * p.l_f * i_d;
    }
    s.inputs.omega = s.omega;
    return s;
}

Complex IbrDevice::evaluate(std::span<const double> x, std::span<const double> y, Complex v_bus,
                            std::span<double> f, std::span<double> g) const {
    const IbrParams& p = params_;
    const IbrSignals s = signals(x, y);
    const auto [v_dc, i_d, i_q, v_d, v_q] = s.storage;
    const auto put = [&](int i, double v) { f[static_cast<std::size_t>(i)] = v; };

    const PhysicalState phys = physical_rhs(p, s.storage, s.inputs);
    for (int k = 0; k < 5; ++k) put(k, phys[static_cast<std::size_t>(k)]);

    const double dc_error = v_dc - v_dc_ref_;
    if (lay_.gamma_dc >= 0) put(lay_.gamma_dc, dc_error);
    if (config_.slack_controller) {
        const double cmd = config_.slack_sign * (p.kp_slack * dc_error + p.ki_slack * slack_integrator(x));
        put(lay_.i_dc, (cmd - s.inputs.i_dc) / p.t_slack);
    }

    if (config_.scheme == ControlScheme::GridFollowing) {
        if (lay_.gamma_avc >= 0) put(lay_.gamma_avc, std::hypot(v_d, v_q) - v_ac_ref_);
        put(lay_.gamma_cd, s.i_d_ref - i_d);
        put(lay_.gamma_cq, s.i_q_ref - i_q);
        put(lay_.gamma_pll, v_q);
        put(lay_.theta, p.omega_b * (s.omega - p.omega_s));
        if (lay_.p_ref >= 0) put(lay_.p_ref, (p.k_omega * (s.omega - p.omega_s) + s.p - s.p_ref) / p.t_omega);
    } else {
        const double windup = (1.0 - s.rho) * p.k_w;
        put(lay_.gamma_vd, s.e_ref - v_d - windup * s.i_d_ref);
        put(lay_.gamma_vq, 0.0 - v_q - windup * s.i_q_ref);
        put(lay_.gamma_cd, s.rho * s.i_d_ref - i_d);
        put(lay_.gamma_cq, s.rho * s.i_q_ref - i_q);
        if (config_.scheme == ControlScheme::GridForming) {
            const double gp = x[static_cast<std::size_t>(lay_.gamma_p)];
            const double gq = x[static_cast<std::size_t>(lay_.gamma_q)];
            put(lay_.delta, p.omega_b * p.m_p * p.omega_c * gp);
            put(lay_.gamma_p, (p_set_ - s.p) - p.omega_c * gp);
            put(lay_.gamma_q, (q_set_ - s.q) - p.omega_c * gq);
        } else {
            put(lay_.delta, p.omega_b * (s.omega - p.omega_s));
            const double swing = (p_set_ - s.p) - s.omega / p.m_p;
            if (lay_.omega >= 0)
                put(lay_.omega, swing / p.m_vsm);
            else
                g[static_cast<std::size_t>(lay_.y_omega)] = p.m_p * swing;
        }
    }

    const Complex v_cap = rotate(Complex{v_d, v_q}, s.frame_angle);
    g[0] = v_bus.real() - v_cap.real();
    g[1] = v_bus.imag() - v_cap.imag();

    const Complex i_g_bus{y[static_cast<std::size_t>(lay_.y_igd)], y[static_cast<std::size_t>(lay_.y_igq)]};
    return i_g_bus * base_ratio();
}

void IbrDevice::initialize(Complex v_bus, Complex s_inj, std::span<double> x, std::span<double> y) {
    const IbrParams& p = params_;
    if (x.size() != n_states_ || y.size() != n_alg_) throw std::invalid_argument("initialize: wrong buffer sizes");
    const double vm = std::abs(v_bus);
    if (!(vm > 0.0)) throw InitializationError("converter '" + name() + "': zero bus voltage");
    const double angle = std::arg(v_bus);
    const Complex s_dev = s_inj / base_ratio();
    const double w = p.omega_s;

    const double v_d = vm, v_q = 0.0;
    const double i_gd = s_dev.real() / v_d;
    const double i_gq = -s_dev.imag() / v_d;
    const double i_d = i_gd - w * p.c_f * v_q;
    const double i_q = i_gq + w * p.c_f * v_d;
    const double v_td = v_d + p.r_f * i_d - w * p.l_f * i_q;
    const double v_tq = v_q + p.r_f * i_q + w * p.l_f * i_d;
    const double p_conv = v_td * i_d + v_tq * i_q;

    std::fill(x.begin(), x.end(), 0.0);
    std::fill(y.begin(), y.end(), 0.0);
    const auto put = [&](int i, double v) { x[static_cast<std::size_t>(i)] = v; };

    double v_dc = 1.0;
    double gamma_dc = 0.0;
    double i_dc = 0.0;
    const bool gfl = config_.scheme == ControlScheme::GridFollowing;

    if (config_.shared_dvc_integrator) {
        // Both the DVC and the slack PI read one integrator, so equilibrium
        // pins the dc-link level instead of the reference choosing it.
        if (std::abs(i_d) < 1e-9) throw InitializationError("converter '" + name() + "': zero d-axis current");
        gamma_dc = i_d / p.ki_dvc;
        i_dc = config_.slack_sign * p.ki_slack * gamma_dc;
        v_dc = p_conv / i_dc;
        if (!(v_dc > 0.0))
            throw InitializationError("converter '" + name() + "': no positive dc-link equilibrium");
    } else {
        i_dc = p_conv / v_dc;
        if (config_.slack_controller)
            gamma_dc = config_.slack_sign * i_dc / p.ki_slack;
        else if (gfl)
            gamma_dc = i_d / p.ki_dvc;
    }
    v_dc_ref_ = v_dc;
    i_dc_set_ = i_dc;

    put(lay_.v_dc, v_dc);
    put(lay_.i_d, i_d);
    put(lay_.i_q, i_q);
    put(lay_.v_d, v_d);
    put(lay_.v_q, v_q);
    if (lay_.i_dc >= 0) put(lay_.i_dc, i_dc);
    if (lay_.gamma_dc >= 0) put(lay_.gamma_dc, gamma_dc);

    p_set_ = s_dev.real();
    q_set_ = s_dev.imag();
    e_o_ = vm;

    if (gfl) {
        put(lay_.gamma_cd, p.r_f * i_d / p.ki_cc_gfl);
        put(lay_.gamma_cq, p.r_f * i_q / p.ki_cc_gfl);
        put(lay_.theta, angle);
        if (lay_.gamma_avc >= 0) {
            v_ac_ref_ = vm;
            put(lay_.gamma_avc, i_q / p.ki_avc_gfl);
        } else {
            if (p.kp_avc_gfl == 0.0 && std::abs(i_q) > 1e-12)
                throw InitializationError("converter '" + name() + "': AVC without gain cannot hold i_q");
            v_ac_ref_ = p.kp_avc_gfl == 0.0 ? vm : vm - i_q / p.kp_avc_gfl;
        }
        if (lay_.p_ref >= 0) {
            const double cross = config_.literal_power_reference ? v_d : v_q;
            put(lay_.p_ref, v_d * i_d + cross * i_q);
        }
    } else {
        if (std::hypot(i_d, i_q) > p.i_max)
            throw InitializationError("converter '" + name() + "': current limit binds at the operating point");
        put(lay_.delta, angle);
        put(lay_.gamma_vd, i_d / p.ki_avc_gfm);
        put(lay_.gamma_vq, i_q / p.ki_avc_gfm);
        put(lay_.gamma_cd, p.r_f * i_d / p.ki_cc_gfm);
        put(lay_.gamma_cq, p.r_f * i_q / p.ki_cc_gfm);
        if (config_.scheme == ControlScheme::VirtualSynchronousMachine) {
            p_set_ += w / p.m_p;
            if (lay_.omega >= 0) put(lay_.omega, w);
            else y[static_cast<std::size_t>(lay_.y_omega)] = w;
        }
    }

    const Complex i_bus = rotate(Complex{i_gd, i_gq}, angle);
    y[static_cast<std::size_t>(lay_.y_igd)] = i_bus.real();
    y[static_cast<std::size_t>(lay_.y_igq)] = i_bus.imag();
}

std::vector<std::size_t> IbrDevice::angle_states() const {
    const int a = config_.scheme == ControlScheme::GridFollowing ? lay_.theta : lay_.delta;
    return {static_cast<std::size_t>(a)};
}

bool IbrDevice::set_parameter(std::string_view name, double value) {
    if (name == "v_dc_ref") return v_dc_ref_ = value, true;
    if (name == "v_ac_ref") return v_ac_ref_ = value, true;
    if (name == "i_dc_set") return i_dc_set_ = value, true;
    if (name == "p_set") return p_set_ = value, true;
    if (name == "q_set") return q_set_ = value, true;
    if (name == "e_o") return e_o_ = value, true;
    if (!params_.get(name)) return false;
    if (structural_change(config_, params_, name, value))
        throw std::invalid_argument("parameter '" + std::string(name) + "' changes the state layout of '" +
                                    this->name() + "'");
    IbrParams next = params_;
    next.set(name, value);
    next.validate();
    if (!(next.c_dc > 0.0)) throw std::invalid_argument("c_dc must be > 0");
    params_ = next;
    return true;
}

std::optional<double> IbrDevice::parameter(std::string_view name) const {
    if (name == "v_dc_ref") return v_dc_ref_;
    if (name == "v_ac_ref") return v_ac_ref_;
    if (name == "i_dc_set") return i_dc_set_;
    if (name == "p_set") return p_set_;
    if (name == "q_set") return q_set_;
    if (name == "e_o") return e_o_;
    return params_.get(name);
}

ph::PhDeclaration IbrDevice::ph_declaration() const {
    ph::PhDeclaration d;
    d.storage_form = numerics::DenseMatrix(5, 5);
    d.storage_form(0, 0) = params_.c_dc;
    d.storage_form(1, 1) = params_.l_f;
    d.storage_form(2, 2) = params_.l_f;
    d.storage_form(3, 3) = params_.c_f;
    d.storage_form(4, 4) = params_.c_f;
    d.storage_names = {"v_dc", "i_d", "i_q", "v_d", "v_q"};
    d.split = {1, 3, 2};
    d.source_port_present = true;
    d.source_dynamic = config_.slack_controller;
    return d;
}

std::optional<ph::PhEvaluation> IbrDevice::ph_evaluate(std::span<const double> x, std::span<const double> y,
                                                       Complex) const {
    const IbrParams& p = params_;
    const IbrSignals s = signals(x, y);
    const auto [v_dc, i_d, i_q, v_d, v_q] = s.storage;
    ph::PhEvaluation e;
    e.storage = numerics::Vector(s.storage.begin(), s.storage.end());
    e.energy = 0.5 * (p.c_dc * v_dc * v_dc + p.l_f * (i_d * i_d + i_q * i_q) + p.c_f * (v_d * v_d + v_q * v_q));
    e.gradient = {p.c_dc * v_dc, p.l_f * i_d, p.l_f * i_q, p.c_f * v_d, p.c_f * v_q};

    const double w = s.omega;
    const double a = s.inputs.v_td / (p.l_f * p.c_dc * v_dc);
    const double b = s.inputs.v_tq / (p.l_f * p.c_dc * v_dc);
    const double lc = 1.0 / (p.l_f * p.c_f);
    e.j = numerics::DenseMatrix(5, 5);
    e.j(0, 1) = -a;
    e.j(1, 0) = a;
    e.j(0, 2) = -b;
    e.j(2, 0) = b;
    e.j(1, 2) = w / p.l_f;
    e.j(2, 1) = -w / p.l_f;
    e.j(1, 3) = -lc;
    e.j(3, 1) = lc;
    e.j(2, 4) = -lc;
    e.j(4, 2) = lc;
    e.j(3, 4) = w / p.c_f;
    e.j(4, 3) = -w / p.c_f;

    e.r = numerics::DenseMatrix(5, 5);
    e.r(1, 1) = p.r_f / (p.l_f * p.l_f);
    e.r(2, 2) = p.r_f / (p.l_f * p.l_f);

    e.split = {1, 3, 2};
    e.g = numerics::DenseMatrix(5, 6);
    e.g(0, 0) = 1.0 / p.c_dc;
    e.g(3, 4) = -1.0 / p.c_f;
    e.g(4, 5) = -1.0 / p.c_f;
    e.u = {s.inputs.i_dc, s.inputs.v_td, s.inputs.v_tq, w, s.inputs.i_gd, s.inputs.i_gq};

    const PhysicalState phys = physical_rhs(p, s.storage, s.inputs);
    e.xdot = numerics::Vector(phys.begin(), phys.end());

    e.p_source = s.inputs.i_dc * v_dc;
    e.p_interconnection = s.p;
    e.p_dissipation = p.r_f * (i_d * i_d + i_q * i_q);
    e.limiter_rho = s.rho;
    return e;
}

std::vector<Probe> IbrDevice::probes(std::span<const double> x, std::span<const double> y, Complex v_bus) const {
    const IbrSignals s = signals(x, y);
    const Complex i_bus{y[static_cast<std::size_t>(lay_.y_igd)], y[static_cast<std::size_t>(lay_.y_igq)]};
    const auto [v_dc, i_d, i_q, v_d, v_q] = s.storage;
    return {
        {"v_dc", v_dc},
        {"i_dc_ref", s.inputs.i_dc},
        {"omega", s.omega},
        {"v_ac", std::abs(v_bus)},
        {"p", s.p},
        {"q", s.q},
        {"rho", s.rho},
        {"i_mag", std::hypot(i_d, i_q)},
        {"angle", s.frame_angle},
        {"v_D", v_bus.real()},
        {"v_Q", v_bus.imag()},
        {"i_D", i_bus.real()},
        {"i_Q", i_bus.imag()},
    };
}

std::vector<std::string> IbrDevice::active_bounds(std::span<const double> x, std::span<const double> y,
                                                  Complex) const {
    if (config_.scheme == ControlScheme::GridFollowing) return {};
    const IbrSignals s = signals(x, y);
    if (s.rho < 1.0) return {"i_max"};
    return {};
}

bool IbrDevice::invalid(std::span<const double> x) const {
    const double v_dc = x[static_cast<std::size_t>(lay_.v_dc)];
    return !(v_dc > 0.0) || !std::isfinite(v_dc);
}

}  // namespace tsclab::devices
