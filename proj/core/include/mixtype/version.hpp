#pragma once

#include <string>
#include <utility>
#include <vector>

namespace mixtype {

std::string version();

/// (name, version) of the libraries compiled into the core.
std::vector<std::pair<std::string, std::string>> dependency_versions();

}  // namespace mixtype
