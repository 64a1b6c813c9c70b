#pragma once

#include <string>

#include "tmc/mesh.hpp"

namespace tmc {

/// Plain-text mesh interchange (see docs/mesh_format.md). The only supported
/// format name is "text".
Mesh load_mesh(const std::string& path, const std::string& format = "text");
void save_mesh(const Mesh& mesh, const std::string& path, const std::string& format = "text");

}  // namespace tmc
