#include "tsclab/analysis/sweep.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <sstream>
#include <thread>

namespace tsclab::analysis {

std::string_view to_string(ModalVerdict v) {
    switch (v) {
    case ModalVerdict::Unstable: return "unstable";
    case ModalVerdict::Oscillatory: return "oscillatory";
    case ModalVerdict::Damped: return "damped";
    }
    return "unstable";
}

std::vector<double> log_grid(double a, double b, std::size_t n) {
    if (!(a > 0.0) || !(b > 0.0)) throw std::invalid_argument("log_grid: bounds must be positive");
    if (n == 0) return {};
    if (n == 1) return {a};
    std::vector<double> g(n);
    const double la = std::log10(a), lb = std::log10(b);
    for (std::size_t i = 0; i < n; ++i)
        g[i] = std::pow(10.0, la + (lb - la) * static_cast<double>(i) / static_cast<double>(n - 1));
    g.front() = a;
    g.back() = b;
    return g;
}

unsigned thread_limit() {
    if (const char* env = std::getenv("TSCLAB_THREADS")) {
        char* end = nullptr;
        const long v = std::strtol(env, &end, 10);
        if (end != env && *end == '\0' && v > 0) return static_cast<unsigned>(v);
    }
    return std::max(1u, std::thread::hardware_concurrency());
}

namespace {

bool is_converter_model(const std::string& m) { return m == "gfl" || m == "gfm" || m == "vsm"; }

std::vector<std::string> tracked_devices(const harness::Scenario& s, const std::string& device) {
    std::vector<std::string> out;
    for (const auto& d : s.devices)
        if (device == "*" ? is_converter_model(d.model) : d.name == device) out.push_back(d.name);
    return out;
}

}  // namespace

SweepPoint analyze_point(const harness::Scenario& s, const std::string& device) {
    SweepPoint pt;
    const auto names = tracked_devices(s, device);
    for (const auto& n : names) pt.critical.push_back({n, std::nullopt});
    try {
        system::PowerSystem sys = harness::build_system(s);
        const system::OperatingPoint op = sys.initialize();
        const LinearizedSystem lin = linearize(sys, op);
        const ModalSummary ms = modal_summary(lin);
        pt.rightmost = ms.rightmost;
        pt.stable = ms.stable;
        std::optional<Complex> worst;
        for (auto& tm : pt.critical) {
            tm.lambda = critical_eigenvalue(lin, ms, tm.device + ".");
            if (tm.lambda && (!worst || tm.lambda->real() > worst->real())) worst = tm.lambda;
        }
        if (!pt.stable) {
            pt.verdict = ModalVerdict::Unstable;
        } else {
            const Complex l = worst.value_or(ms.rightmost);
            const bool oscillatory = std::abs(l.imag()) > 1e-9 && -l.real() / std::abs(l) < kOscillatoryDamping;
            pt.verdict = oscillatory ? ModalVerdict::Oscillatory : ModalVerdict::Damped;
        }
        pt.ok = true;
    } catch (const std::exception& e) {
        pt.ok = false;
        pt.stable = false;
        pt.error = e.what();
    }
    return pt;
}

SweepResult eigen_sweep(const harness::Scenario& base, const std::string& parameter, std::vector<double> grid,
                        const std::string& device, unsigned threads) {
    SweepResult r;
    r.parameter = harness::sweep_parameter_name(parameter);
    r.device = device;
    std::sort(grid.begin(), grid.end());
    for (std::size_t i = 1; i < grid.size(); ++i)
        if (!(grid[i] > grid[i - 1])) throw std::invalid_argument("eigen_sweep: grid values must be distinct");
    r.grid = grid;
    r.points.resize(grid.size());

    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next++; i < grid.size(); i = next++) {
            harness::Scenario s = base;
            char buf[64];
            std::snprintf(buf, sizeof buf, "%.17g", grid[i]);
            SweepPoint pt;
            try {
                harness::apply_override(s, device + "." + r.parameter + "=" + buf);
                pt = analyze_point(s, device);
            } catch (const std::exception& e) {
                pt.error = e.what();
            }
            pt.value = grid[i];
            r.points[i] = std::move(pt);
        }
    };
    const unsigned n = std::max(1u, std::min<unsigned>(threads ? threads : thread_limit(),
                                                       static_cast<unsigned>(std::max<std::size_t>(1, grid.size()))));
    if (n == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (unsigned k = 0; k < n; ++k) pool.emplace_back(worker);
        for (auto& t : pool) t.join();
    }
    for (std::size_t i = 1; i < r.points.size(); ++i)
        if (r.points[i].stable != r.points[i - 1].stable) r.boundaries.emplace_back(grid[i - 1], grid[i]);
    return r;
}

std::string sweep_csv(const SweepResult& r) {
    std::size_t k = 0;
    for (const auto& p : r.points) k = std::max(k, p.critical.size());
    std::ostringstream out;
    out << "parameter_value";
    for (std::size_t i = 1; i <= k; ++i) out << ",re_lambda_" << i;
    for (std::size_t i = 1; i <= k; ++i) out << ",im_lambda_" << i;
    out << ",stable\n";
    char buf[64];
    auto num = [&](double v) {
        std::snprintf(buf, sizeof buf, "%.17g", v);
        return std::string(buf);
    };
    for (const auto& p : r.points) {
        out << num(p.value);
        for (int part = 0; part < 2; ++part)
            for (std::size_t i = 0; i < k; ++i) {
                out << ',';
                if (i < p.critical.size() && p.critical[i].lambda)
                    out << num(part == 0 ? p.critical[i].lambda->real() : p.critical[i].lambda->imag());
                else out << "nan";
            }
        out << ',' << (p.stable ? 1 : 0) << '\n';
    }
    return out.str();
}

}  // namespace tsclab::analysis
