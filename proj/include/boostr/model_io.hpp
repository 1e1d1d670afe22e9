#pragma once

#include <string>

#include "boostr/boost_dynamic.hpp"
#include "boostr/boost_static.hpp"

namespace boostr {

// Model documents carry a version string ("boostr-static-v1" /
// "boostr-dynamic-v1") that is checked on load. The runtime thread count
// is not part of the document, so runs differing only in parallelism
// serialize identically.

std::string model_to_json(const EnsembleStatic& ensemble);
std::string model_to_json(const EnsembleDynamic& ensemble);

void save_model(const EnsembleStatic& ensemble, const std::string& path);
void save_model(const EnsembleDynamic& ensemble, const std::string& path);

std::string model_version(const std::string& path);

EnsembleStatic load_static_model(const std::string& path);
EnsembleDynamic load_dynamic_model(const std::string& path);

}  // namespace boostr
