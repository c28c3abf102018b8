#pragma once

#include "sda/dataset.hpp"
#include "sda/trajectory.hpp"

#include <iosfwd>
#include <optional>
#include <string>

namespace sda {

// Files use 1-based track and label indices; the in-memory API is 0-based.

struct DatasetFile {
    Dataset data;
    std::optional<Assignment> labels;
};

/// Reads `t,y1..yd[,label]`. Schema violations throw DataError naming the line.
DatasetFile read_dataset_csv(std::istream& in);
DatasetFile read_dataset_csv(const std::string& path);

void write_dataset_csv(std::ostream& out, const Dataset& data, const Assignment* labels = nullptr);

/// Writes `t,track,y1..yd`, one row per (grid node, track).
void write_trajectory_csv(std::ostream& out, const TrajectorySet& set);

/// Inverse of write_trajectory_csv; order and delta are not stored in the file.
TrajectorySet read_trajectory_csv(std::istream& in, int order, double delta);

/// Shortest decimal text that reads back to the same double.
std::string format_double(double v);

}  // namespace sda
