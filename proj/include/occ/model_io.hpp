#pragma once

#include <iosfwd>
#include <string>

#include "occ/subspace.hpp"

namespace occ {

/// Line-oriented key/value container. Reals are written as hexadecimal
/// floating point so a save/load cycle reproduces every bit. The first two
/// lines are always "occ-model" and "version <n>".
void save_model(std::ostream& out, const TrainedModel& model);
TrainedModel load_model(std::istream& in);

void save_model_file(const std::string& path, const TrainedModel& model);
TrainedModel load_model_file(const std::string& path);

std::string serialize_model(const TrainedModel& model);

}  // namespace occ
