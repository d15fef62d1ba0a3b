#pragma once

#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "json.hpp"
#include "selection/diagnostics.hpp"
#include "selection/model.hpp"
#include "selection/state.hpp"

namespace selection {

inline constexpr const char* kTrajectoryHeader =
    "t,rho,V,D,W,max_log_u,x_mode,mass_near_xbar,tail_mass,undershoot_clamps";
inline constexpr const char* kSnapshotHeader = "x,u,log_u";

/// %.17g; round-trips every double.
std::string format_number(double v);

void write_trajectory_csv(std::ostream& os, const Trajectory& trajectory);
void write_snapshot_csv(std::ostream& os, const Snapshot& snapshot, const Grid& grid);
std::string snapshot_file_name(double t);

nlohmann::ordered_json prediction_json(const EquilibriumPrediction& pred);
nlohmann::ordered_json record_json(const DiagnosticsRecord& record);

struct SummaryExtras {
  std::optional<BlowUpReport> blow_up;
  std::optional<std::string> error;
};

nlohmann::ordered_json summary_json(const Scenario& scenario, const Trajectory& trajectory,
                                    const SummaryExtras& extras);

/// gnuplot script reading trajectory.csv and the snapshot files.
std::string plot_script(const Trajectory& trajectory, const std::vector<std::string>& snapshot_files);

}  // namespace selection
