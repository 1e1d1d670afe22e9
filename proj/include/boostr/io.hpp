#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "boostr/core.hpp"

namespace boostr {

// CSV schemas:
//   events:  id,time,kind        one kind=event row per event, exactly one
//                                kind=censor row per id
//   static:  id,x1,...,xp
//   dynamic: id,feature,time,value   feature is a 1-based index
//   curves:  id,t,value,masked       masked=1 on the observed prefix
//
// Parse failures throw std::runtime_error naming the file and line.

Dataset load_dataset(const std::string& events_path, const std::string& static_path,
                     const std::optional<std::string>& dynamic_path = std::nullopt, int grid_m = 100);

void save_dataset(const Dataset& data, const std::string& events_path, const std::string& static_path,
                  const std::optional<std::string>& dynamic_path = std::nullopt);

void save_curves(const std::vector<std::pair<std::string, Curve>>& curves, const std::string& path);

// Shortest representation that round-trips the exact double.
std::string format_double(double v);

}  // namespace boostr
