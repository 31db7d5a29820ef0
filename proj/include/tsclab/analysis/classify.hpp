#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "tsclab/harness/timeseries.hpp"

namespace tsclab::analysis {

enum class TrajectoryClass { Settled, Oscillatory, Collapsed };
std::string_view to_string(TrajectoryClass c);

/// True for channels that do not depend on the rotating reference frame
/// (absolute angles and frame components are excluded).
bool frame_invariant_channel(const std::string& name);

/// COLLAPSED when the run was aborted; SETTLED when every channel's
/// peak-to-peak over the trailing `window` seconds is below `tol`;
/// OSCILLATORY otherwise. An empty channel list selects every
/// frame-invariant channel.
TrajectoryClass classify_trajectory(const harness::TimeSeries& series, bool collapsed, double tol = 1e-3,
                                    double window = 2.0, const std::vector<std::string>& channels = {});

/// Largest trailing-window peak-to-peak among the channels, and its channel.
std::pair<double, std::string> trailing_spread(const harness::TimeSeries& series, double window,
                                               const std::vector<std::string>& channels = {});

/// Time after `t_from` from which the channel stays within `band` of its
/// final value; `t_from` if it never leaves, NaN for an empty series.
double settling_time(const harness::TimeSeries& series, const std::string& channel, double band, double t_from);

/// Local extrema after `t_from` whose deviation from the final value
/// exceeds `fraction` of the largest deviation.
int count_swings(const harness::TimeSeries& series, const std::string& channel, double t_from, double fraction = 0.1);

}  // namespace tsclab::analysis
