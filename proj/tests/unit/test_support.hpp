#pragma once

#include <filesystem>
#include <functional>
#include <string>

namespace testsup {

/// 4th-order central difference; error O(h^4 f^(5)).
inline double fd4(const std::function<double(double)>& f, double x,
                  double h = 1e-3) {
  return (-f(x + 2 * h) + 8 * f(x + h) - 8 * f(x - h) + f(x - 2 * h)) /
         (12 * h);
}

/// Scratch directory for test artifacts, unique per tag, cleaned on entry.
inline std::filesystem::path scratch_dir(const std::string& tag) {
  auto dir = std::filesystem::temp_directory_path() / ("gmf_test_" + tag);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

}  // namespace testsup
