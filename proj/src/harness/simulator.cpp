#include "tsclab/harness/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

#include "tsclab/ph/ph.hpp"

namespace tsclab::harness {

namespace {

constexpr double kTimeEps = 1e-12;

}  // namespace

Simulator::Simulator(system::PowerSystem sys, std::vector<network::Event> events, SimulationOptions opts)
    : sys_(std::move(sys)), events_(std::move(events)), opts_(opts) {
    if (!(opts_.t_end > 0.0)) throw std::invalid_argument("simulation: t_end must be > 0");
    if (!(opts_.step > 0.0)) throw std::invalid_argument("simulation: step must be > 0");
    for (const auto& e : events_) network::validate_event(e);
    std::stable_sort(events_.begin(), events_.end(),
                     [](const network::Event& a, const network::Event& b) { return a.time < b.time; });
}

std::vector<std::string> Simulator::channel_names() const {
    std::vector<std::string> names;
    const auto& net = sys_.network();
    for (const auto& b : net.buses) names.push_back("bus" + b.id + ".v");
    numerics::Vector x(sys_.n_states(), 0.0), y(sys_.n_algebraic(), 0.0);
    for (std::size_t k = 0; k < sys_.device_count(); ++k) {
        const auto& d = sys_.device(k);
        // Probe names do not depend on the state; evaluate at a harmless point.
        numerics::Vector xd(d.n_states(), 1.0), yd(d.n_algebraic(), 0.0);
        for (const auto& p : d.probes(xd, yd, {1.0, 0.0})) names.push_back(d.name() + "." + p.name);
        if (d.ph_declaration().storage_form.rows() > 0) {
            names.push_back(d.name() + ".H");
            names.push_back(d.name() + ".Hdot");
        }
    }
    return names;
}

std::optional<std::string> Simulator::collapse_check(std::span<const double> x, std::span<const double> y) const {
    if (!numerics::all_finite(x) || !numerics::all_finite(y)) return "non-finite state";
    for (std::size_t b = 0; b < sys_.network().size(); ++b) {
        const double vm = std::abs(sys_.bus_voltage(y, b));
        if (vm < opts_.v_min || vm > opts_.v_max)
            return "bus " + sys_.network().buses[b].id + " voltage " + std::to_string(vm) + " pu out of range";
    }
    if (auto dev = sys_.invalid_device(x)) return "device " + *dev + " dc-link voltage non-positive";
    if (sys_.load_frozen(y)) return "load voltage below floor";
    return std::nullopt;
}

void Simulator::record(double t, std::span<const double> x, std::span<const double> y, SimulationResult& out) {
    std::vector<double> row;
    row.reserve(out.series.names().size());
    for (std::size_t b = 0; b < sys_.network().size(); ++b) row.push_back(std::abs(sys_.bus_voltage(y, b)));

    AuditRecord rec;
    rec.t = t;
    AuditSummary& sum = out.audit_summary;
    const double dt = have_last_ ? t - last_t_ : 0.0;
    for (std::size_t k = 0; k < sys_.device_count(); ++k) {
        const auto& d = sys_.device(k);
        const auto xs = sys_.device_states(x, k);
        const auto ys = sys_.device_algebraics(y, k);
        const numerics::Complex v = sys_.bus_voltage(y, sys_.device_bus(k));
        for (const auto& p : d.probes(xs, ys, v)) row.push_back(p.value);
        const auto e = d.ph_evaluate(xs, ys, v);
        if (!e) continue;
        const ph::PortBalance bal = ph::port_power_balance(*e);
        row.push_back(e->energy);
        row.push_back(bal.hdot_gradient);
        if (!opts_.audit) continue;

        rec.h += e->energy;
        rec.hdot_grad += bal.hdot_gradient;
        rec.hdot_ports += bal.hdot_ports;
        rec.p_source += bal.p_source;
        rec.p_interconn += bal.p_interconnection;
        rec.p_diss += e->p_dissipation;
        rec.rho_limiter = std::min(rec.rho_limiter, e->limiter_rho);

        sum.max_balance_residual = std::max(sum.max_balance_residual, std::abs(bal.residual));
        sum.max_skew_residual = std::max(sum.max_skew_residual, ph::skew_residual(e->j));
        sum.min_dissipation = std::min(sum.min_dissipation, bal.dissipation);
        sum.min_r_eigenvalue = std::min(sum.min_r_eigenvalue, ph::min_symmetric_eigenvalue(e->r));
        const numerics::Vector s = ph::structure_rhs(*e);
        for (std::size_t i = 0; i < s.size(); ++i)
            sum.max_structure_error = std::max(sum.max_structure_error, std::abs(s[i] - e->xdot[i]));

        // Passivity over any interval: the margin ∫u^T y - ΔH (trapezoidal
        // quadrature) may never fall below an earlier value.
        const double rate = e->p_source - e->p_interconnection;
        if (have_last_) {
            margin_[k] += 0.5 * dt * (rate + last_rate_[k]) - (e->energy - last_energy_[k]);
            sum.device_passivity_violation[k] =
                std::max(sum.device_passivity_violation[k], best_margin_[k] - margin_[k]);
            best_margin_[k] = std::max(best_margin_[k], margin_[k]);
        }
        last_rate_[k] = rate;
        last_energy_[k] = e->energy;
        sum.max_passivity_violation = std::max(sum.max_passivity_violation, sum.device_passivity_violation[k]);
    }
    out.series.append(t, row);
    if (opts_.audit) {
        rec.residual = rec.hdot_grad - rec.hdot_ports;
        out.audit.push_back(rec);
        ++sum.records;
    }
    last_t_ = t;
    have_last_ = true;
}

void Simulator::rebase_ports(std::span<const double> x, std::span<const double> y) {
    if (!opts_.audit || !have_last_) return;
    for (std::size_t k = 0; k < sys_.device_count(); ++k) {
        const auto& d = sys_.device(k);
        const auto e = d.ph_evaluate(sys_.device_states(x, k), sys_.device_algebraics(y, k),
                                     sys_.bus_voltage(y, sys_.device_bus(k)));
        if (!e) continue;
        // The storage is continuous across the event; only the port rate jumps.
        last_rate_[k] = e->p_source - e->p_interconnection;
        last_energy_[k] = e->energy;
    }
}

SimulationResult Simulator::run(std::optional<system::OperatingPoint> start) {
    SimulationResult out;
    out.series = TimeSeries(channel_names());
    const std::size_t nd = sys_.device_count();
    last_rate_.assign(nd, 0.0);
    margin_.assign(nd, 0.0);
    best_margin_.assign(nd, 0.0);
    last_energy_.assign(nd, 0.0);
    out.audit_summary.device_passivity_violation.assign(nd, 0.0);
    have_last_ = false;

    system::OperatingPoint op = start ? *start : sys_.initialize();
    numerics::Vector x = op.x, y = op.y;
    numerics::TrapezoidalIntegrator integrator(opts_.newton);
    numerics::DaeSystem dae = sys_.dae();

    std::size_t next_event = 0;
    double refine_until = -1.0;
    auto apply_due_events = [&](double t) -> bool {
        bool applied = false;
        while (next_event < events_.size() && events_[next_event].time <= t + kTimeEps) {
            sys_.apply_event(events_[next_event]);
            ++next_event;
            applied = true;
        }
        if (!applied) return true;
        integrator.invalidate();
        try {
            y = integrator.solve_algebraic(dae, t, x, y);
        } catch (const std::exception& e) {
            out.status = RunStatus::Collapsed;
            out.collapse_reason = std::string("algebraic re-solve after event failed: ") + e.what();
            return false;
        }
        rebase_ports(x, y);
        refine_until = t + opts_.event_window;
        return true;
    };

    double t = 0.0;
    record(t, x, y, out);
    if (!apply_due_events(t)) {
        out.end_time = t;
        out.x = x;
        out.y = y;
        return out;
    }
    const double h = opts_.step;
    long grid = 0;
    bool collapsed = false;

    // Advances from t0 to t1, halving on failure. Returns false on collapse.
    std::function<bool(double, double, int)> advance = [&](double t0, double t1, int depth) -> bool {
        const double dt = t1 - t0;
        numerics::StepOutcome step;
        bool ok = true;
        try {
            step = integrator.step(dae, t0, dt, x, y);
        } catch (const numerics::StepRejected&) {
            ok = false;
        } catch (const numerics::SingularMatrixError&) {
            ok = false;
            integrator.invalidate();
        } catch (const std::domain_error&) {
            ok = false;
            integrator.invalidate();
        }
        if (!ok) {
            ++out.rejected_steps;
            if (depth >= opts_.max_halvings) {
                out.collapse_reason = "step rejected after " + std::to_string(opts_.max_halvings) + " halvings at t=" +
                                      std::to_string(t0);
                return false;
            }
            const double mid = t0 + 0.5 * dt;
            return advance(t0, mid, depth + 1) && advance(mid, t1, depth + 1);
        }
        x = std::move(step.x);
        y = std::move(step.y);
        ++out.steps;
        if (auto why = collapse_check(x, y)) {
            out.collapse_reason = *why + " at t=" + std::to_string(t1);
            t = t1;
            return false;
        }
        record(t1, x, y, out);
        t = t1;
        return true;
    };

    const int refine = std::max(1, opts_.event_refinement);
    while (t < opts_.t_end - kTimeEps) {
        const double coarse = static_cast<double>(grid + 1) * h;
        double t_next = coarse;
        if (refine > 1 && t < refine_until - kTimeEps) {
            // Fine points are fractions of the coarse grid so both stay exact.
            const double base = static_cast<double>(grid) * h, hf = h / refine;
            const double j = std::floor((t - base) / hf + 1e-9) + 1.0;
            if (j < refine) t_next = base + j * hf;
        }
        t_next = std::min(opts_.t_end, t_next);
        if (next_event < events_.size() && events_[next_event].time > t + kTimeEps &&
            events_[next_event].time < t_next - kTimeEps)
            t_next = events_[next_event].time;
        if (!advance(t, t_next, 0)) {
            collapsed = true;
            break;
        }
        t = t_next;
        if (std::abs(t - coarse) <= kTimeEps * std::max(1.0, t)) ++grid;
        if (!apply_due_events(t)) {
            collapsed = true;
            break;
        }
    }
    if (collapsed) out.status = RunStatus::Collapsed;
    out.end_time = t;
    out.x = std::move(x);
    out.y = std::move(y);
    return out;
}

}  // namespace tsclab::harness
