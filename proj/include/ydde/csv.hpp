#pragma once

#include <iosfwd>
#include <string>

#include "ydde/path.hpp"

namespace ydde {

/// Header `t,x_1,...,x_d`, one row per node in ascending time, 17 significant digits.
void write_path_csv(std::ostream& os, const Path& path);
void write_path_csv(const std::string& file, const Path& path);

/// Reads a path written by write_path_csv; the grid is recovered from the time
/// column, which must be uniform with time 0 on a node.
Path read_path_csv(std::istream& is);
Path read_path_csv(const std::string& file);

}  // namespace ydde
