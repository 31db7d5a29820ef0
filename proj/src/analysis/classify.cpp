#include "tsclab/analysis/classify.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace tsclab::analysis {

std::string_view to_string(TrajectoryClass c) {
    switch (c) {
    case TrajectoryClass::Settled: return "SETTLED";
    case TrajectoryClass::Oscillatory: return "OSCILLATORY";
    case TrajectoryClass::Collapsed: return "COLLAPSED";
    }
    return "COLLAPSED";
}

bool frame_invariant_channel(const std::string& name) {
    static const char* kFrame[] = {".angle", ".v_D", ".v_Q", ".i_D", ".i_Q", ".delta", ".theta"};
    for (const char* suffix : kFrame) {
        const std::string s(suffix);
        if (name.size() >= s.size() && name.compare(name.size() - s.size(), s.size(), s) == 0) return false;
    }
    return true;
}

std::pair<double, std::string> trailing_spread(const harness::TimeSeries& series, double window,
                                               const std::vector<std::string>& channels) {
    std::pair<double, std::string> worst{0.0, ""};
    if (series.empty()) return worst;
    const std::size_t i0 = series.lower_index(series.time().back() - window);
    auto consider = [&](const std::string& name) {
        const auto& c = series.column(name);
        double lo = std::numeric_limits<double>::infinity(), hi = -lo;
        for (std::size_t i = i0; i < c.size(); ++i) {
            lo = std::min(lo, c[i]);
            hi = std::max(hi, c[i]);
        }
        const double spread = std::isfinite(hi - lo) ? hi - lo : std::numeric_limits<double>::infinity();
        if (spread > worst.first || worst.second.empty()) worst = {spread, name};
    };
    if (channels.empty()) {
        for (const auto& n : series.names())
            if (frame_invariant_channel(n)) consider(n);
    } else {
        for (const auto& n : channels) consider(n);
    }
    return worst;
}

TrajectoryClass classify_trajectory(const harness::TimeSeries& series, bool collapsed, double tol, double window,
                                    const std::vector<std::string>& channels) {
    if (collapsed) return TrajectoryClass::Collapsed;
    if (series.size() < 2) return TrajectoryClass::Oscillatory;
    return trailing_spread(series, window, channels).first < tol ? TrajectoryClass::Settled
                                                                 : TrajectoryClass::Oscillatory;
}

double settling_time(const harness::TimeSeries& series, const std::string& channel, double band, double t_from) {
    if (series.empty()) return std::numeric_limits<double>::quiet_NaN();
    const auto& c = series.column(channel);
    const auto& t = series.time();
    const double final_value = c.back();
    double settled = t_from;
    for (std::size_t i = series.lower_index(t_from); i < c.size(); ++i)
        if (!(std::abs(c[i] - final_value) <= band)) settled = t[i];
    return settled;
}

int count_swings(const harness::TimeSeries& series, const std::string& channel, double t_from, double fraction) {
    if (series.size() < 3) return 0;
    const auto& c = series.column(channel);
    const double final_value = c.back();
    const std::size_t i0 = std::max<std::size_t>(1, series.lower_index(t_from));
    double peak = 0.0;
    for (std::size_t i = i0; i < c.size(); ++i) peak = std::max(peak, std::abs(c[i] - final_value));
    if (peak == 0.0) return 0;
    int n = 0;
    for (std::size_t i = i0; i + 1 < c.size(); ++i) {
        const bool extremum = (c[i] > c[i - 1] && c[i] >= c[i + 1]) || (c[i] < c[i - 1] && c[i] <= c[i + 1]);
        if (extremum && std::abs(c[i] - final_value) > fraction * peak) ++n;
    }
    return n;
}

}  // namespace tsclab::analysis
