#pragma once

#include <stdexcept>
#include <string>

namespace metamat {

/// Raised for every contract violation in the toolkit. Messages carry a
/// locator (row, voxel/frequency index, cube index) whenever one exists.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace metamat
