#include "tsclab/ph/ph.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "tsclab/numerics/eigen.hpp"

namespace tsclab::ph {

namespace {

PhEvaluation require_ph(const devices::Device& dev, std::span<const double> x, std::span<const double> y,
                        numerics::Complex v) {
    auto e = dev.ph_evaluate(x, y, v);
    if (!e) throw std::invalid_argument("device '" + dev.name() + "' declares no energy structure");
    return *e;
}

double dot(std::span<const double> a, std::span<const double> b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

// First-derivative weights at x0 from the given abscissae (Fornberg).
std::array<double, 5> derivative_weights(std::span<const double> xs, double x0) {
    constexpr int n = 5;
    double c[n][2] = {};
    c[0][0] = 1.0;
    double c1 = 1.0;
    double c4 = xs[0] - x0;
    for (int i = 1; i < n; ++i) {
        const int mn = std::min(i, 1);
        double c2 = 1.0;
        const double c5 = c4;
        c4 = xs[static_cast<std::size_t>(i)] - x0;
        for (int j = 0; j < i; ++j) {
            const double c3 = xs[static_cast<std::size_t>(i)] - xs[static_cast<std::size_t>(j)];
            c2 *= c3;
            if (j == i - 1) {
                for (int k = mn; k >= 1; --k) c[i][k] = c1 * (k * c[i - 1][k - 1] - c5 * c[i - 1][k]) / c2;
                c[i][0] = -c1 * c5 * c[i - 1][0] / c2;
            }
            for (int k = mn; k >= 1; --k) c[j][k] = (c4 * c[j][k] - k * c[j][k - 1]) / c3;
            c[j][0] = c4 * c[j][0] / c3;
        }
        c1 = c2;
    }
    std::array<double, 5> w{};
    for (int i = 0; i < n; ++i) w[static_cast<std::size_t>(i)] = c[i][1];
    return w;
}

std::string fmt(double v) {
    std::ostringstream os;
    os.precision(3);
    os << std::scientific << v;
    return os.str();
}

}  // namespace

double storage_energy(const devices::Device& dev, std::span<const double> x, std::span<const double> y,
                      numerics::Complex v) {
    return require_ph(dev, x, y, v).energy;
}

Vector storage_gradient(const devices::Device& dev, std::span<const double> x, std::span<const double> y,
                        numerics::Complex v) {
    return require_ph(dev, x, y, v).gradient;
}

double skew_residual(const DenseMatrix& j) {
    double worst = 0.0;
    for (std::size_t r = 0; r < j.rows(); ++r)
        for (std::size_t c = 0; c < j.cols(); ++c) worst = std::max(worst, std::abs(j(r, c) + j(c, r)));
    return worst;
}

double min_symmetric_eigenvalue(const DenseMatrix& r) {
    const std::size_t n = r.rows();
    if (n == 0) return 0.0;
    DenseMatrix s(n, n);
    bool diagonal = true;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t k = 0; k < n; ++k) {
            s(i, k) = 0.5 * (r(i, k) + r(k, i));
            if (i != k && s(i, k) != 0.0) diagonal = false;
        }
    double lo = std::numeric_limits<double>::infinity();
    if (diagonal) {
        for (std::size_t i = 0; i < n; ++i) lo = std::min(lo, s(i, i));
        return lo;
    }
    for (const auto& l : numerics::eigenvalues(s).eigenvalues) lo = std::min(lo, l.real());
    return lo;
}

Vector structure_rhs(const PhEvaluation& e) {
    const std::size_t n = e.gradient.size();
    Vector out(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        double s = 0.0;
        for (std::size_t k = 0; k < n; ++k) s += (e.j(i, k) - e.r(i, k)) * e.gradient[k];
        for (std::size_t k = 0; k < e.u.size(); ++k) s += e.g(i, k) * e.u[k];
        out[i] = s;
    }
    return out;
}

PortBalance port_power_balance(const PhEvaluation& e) {
    PortBalance b;
    b.hdot_gradient = dot(e.gradient, e.xdot);
    b.p_source = e.p_source;
    b.p_interconnection = e.p_interconnection;
    b.hdot_ports = e.p_source - e.p_interconnection - e.p_dissipation;
    b.residual = b.hdot_gradient - b.hdot_ports;

    const std::size_t n = e.gradient.size();
    Vector rg(n, 0.0);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t k = 0; k < n; ++k) rg[i] += e.r(i, k) * e.gradient[k];
    b.dissipation = dot(e.gradient, rg);

    // y = G^T ∇H split into the three port blocks.
    for (std::size_t c = 0; c < e.u.size(); ++c) {
        double yc = 0.0;
        for (std::size_t i = 0; i < n; ++i) yc += e.g(i, c) * e.gradient[i];
        b.supply_rate += e.u[c] * yc;
        if (c >= e.split.source && c < e.split.source + e.split.control) b.p_control += e.u[c] * yc;
    }
    return b;
}

ComplexFrequency complex_frequency(std::span<const double> t, std::span<const double> d, std::span<const double> q,
                                   double frame_frequency, double omega_b) {
    const std::size_t n = t.size();
    if (d.size() != n || q.size() != n) throw std::invalid_argument("complex_frequency: length mismatch");
    if (n < 5) throw std::invalid_argument("complex_frequency: need at least 5 samples");
    std::vector<double> lnmag(n), angle(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double m = std::hypot(d[i], q[i]);
        if (!(m >= 1e-6)) throw std::domain_error("complex_frequency: phasor magnitude below 1e-6");
        lnmag[i] = std::log(m);
        angle[i] = std::atan2(q[i], d[i]);
        if (i > 0) {
            // unwrap
            while (angle[i] - angle[i - 1] > std::numbers::pi) angle[i] -= 2.0 * std::numbers::pi;
            while (angle[i] - angle[i - 1] < -std::numbers::pi) angle[i] += 2.0 * std::numbers::pi;
        }
    }
    ComplexFrequency out{std::vector<double>(n), std::vector<double>(n)};
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t lo = std::min(i < 2 ? 0 : i - 2, n - 5);
        const auto w = derivative_weights(t.subspan(lo, 5), t[i]);
        double dr = 0.0, da = 0.0;
        for (std::size_t k = 0; k < 5; ++k) {
            dr += w[k] * lnmag[lo + k];
            da += w[k] * angle[lo + k];
        }
        out.rho[i] = dr;
        out.omega[i] = frame_frequency + da / omega_b;
    }
    return out;
}

std::string_view to_string(Verdict v) {
    switch (v) {
    case Verdict::Pass: return "pass";
    case Verdict::Fail: return "fail";
    case Verdict::NotEvaluated: return "not-evaluated";
    }
    return "not-evaluated";
}

ConditionResult tsc_condition1(const PhDeclaration& decl, double passivity_violation) {
    const DenseMatrix& q = decl.storage_form;
    if (q.rows() == 0) return {Verdict::Fail, "no storage states"};
    const double lo = min_symmetric_eigenvalue(q);
    if (lo < -1e-12) return {Verdict::Fail, "storage form is indefinite (min eigenvalue " + fmt(lo) + ")"};
    std::vector<std::size_t> support;
    for (std::size_t i = 0; i < q.rows(); ++i)
        if (q(i, i) != 0.0) support.push_back(i);
    if (support.empty()) return {Verdict::Fail, "storage form is zero"};
    DenseMatrix restricted(support.size(), support.size());
    for (std::size_t a = 0; a < support.size(); ++a)
        for (std::size_t b = 0; b < support.size(); ++b) restricted(a, b) = q(support[a], support[b]);
    const double lo_r = min_symmetric_eigenvalue(restricted);
    if (!(lo_r > 0.0)) return {Verdict::Fail, "storage form not positive definite on its storage states"};
    if (passivity_violation > 1e-6)
        return {Verdict::Fail, "stored energy exceeded supplied energy by " + fmt(passivity_violation)};
    return {Verdict::Pass, "quadratic storage, positive definite on " + std::to_string(support.size()) + " states"};
}

ConditionResult tsc_condition2(const PhDeclaration& decl) {
    if (decl.split.source == 0 || !decl.source_port_present) return {Verdict::Fail, "no controlled source port"};
    if (!decl.source_dynamic) return {Verdict::Fail, "source input held constant"};
    return {Verdict::Pass, "source input has its own dynamics"};
}

ConditionResult tsc_condition3(const harness::TimeSeries& series, const std::string& device, bool collapsed,
                               double last_event_time, double omega_settled, const Condition3Options& opts) {
    if (collapsed) return {Verdict::Fail, "COLLAPSE"};
    if (series.size() < 5) return {Verdict::NotEvaluated, "trajectory too short"};
    const double t_end = series.time().back();
    if (t_end - last_event_time < opts.window)
        return {Verdict::NotEvaluated, "trajectory ends less than one window after the last event"};
    for (const char* ch : {".Hdot", ".v_D", ".v_Q", ".i_D", ".i_Q"})
        if (!series.has(device + ch)) return {Verdict::NotEvaluated, "missing channel " + device + ch};

    const std::size_t i0 = series.lower_index(t_end - opts.window);
    const std::size_t n = series.size() - i0;
    if (n < 5) return {Verdict::NotEvaluated, "window holds fewer than 5 samples"};
    const auto tail = [&](const std::string& ch) {
        const auto& c = series.column(device + ch);
        return std::span<const double>(c).subspan(i0, n);
    };
    const std::span<const double> t = std::span<const double>(series.time()).subspan(i0, n);

    ComplexFrequency fv, fi;
    try {
        fv = complex_frequency(t, tail(".v_D"), tail(".v_Q"), opts.frame_frequency, opts.omega_b);
        fi = complex_frequency(t, tail(".i_D"), tail(".i_Q"), opts.frame_frequency, opts.omega_b);
    } catch (const std::domain_error& e) {
        return {Verdict::Fail, e.what()};
    }
    const double w_ref = std::isnan(omega_settled) ? opts.frame_frequency : omega_settled;

    double hdot = 0.0, dv = 0.0, di = 0.0, dvi = 0.0, rv = 0.0, ri = 0.0;
    const auto hd = tail(".Hdot");
    for (std::size_t k = 0; k < n; ++k) {
        hdot = std::max(hdot, std::abs(hd[k]));
        dv = std::max(dv, std::abs(fv.omega[k] - w_ref));
        di = std::max(di, std::abs(fi.omega[k] - w_ref));
        dvi = std::max(dvi, std::abs(fv.omega[k] - fi.omega[k]));
        rv = std::max(rv, std::abs(fv.rho[k]));
        ri = std::max(ri, std::abs(fi.rho[k]));
    }
    bool pinned = false;
    if (series.has(device + ".rho")) {
        for (double r : tail(".rho")) pinned = pinned || r < 1.0;
    }

    std::ostringstream diag;
    diag << "max|Hdot|=" << fmt(hdot) << " max|w_v-w_s|=" << fmt(dv) << " max|w_i-w_s|=" << fmt(di)
         << " max|w_v-w_i|=" << fmt(dvi) << " max|rho_v|=" << fmt(rv) << " max|rho_i|=" << fmt(ri)
         << " w_s=" << fmt(w_ref);
    if (pinned) diag << " current limit active";
    const bool ok = hdot < opts.tol_h && dv < opts.tol_omega && di < opts.tol_omega && dvi < opts.tol_omega &&
                    rv < opts.tol_rho && ri < opts.tol_rho && !pinned;
    return {ok ? Verdict::Pass : Verdict::Fail, diag.str()};
}

PhDeclaration passive_load_declaration(network::LoadKind kind, double inductance, double capacitance) {
    PhDeclaration d;
    if (kind == network::LoadKind::ConstantImpedance && (inductance > 0.0 || capacitance > 0.0)) {
        std::vector<std::string> names;
        std::vector<double> diag;
        if (inductance > 0.0) {
            names.insert(names.end(), {"i_d", "i_q"});
            diag.insert(diag.end(), {inductance, inductance});
        }
        if (capacitance > 0.0) {
            names.insert(names.end(), {"v_d", "v_q"});
            diag.insert(diag.end(), {capacitance, capacitance});
        }
        d.storage_form = DenseMatrix(diag.size(), diag.size());
        for (std::size_t i = 0; i < diag.size(); ++i) d.storage_form(i, i) = diag[i];
        d.storage_names = names;
    }
    d.split = {0, 0, 2};
    return d;
}

}  // namespace tsclab::ph
