#pragma once

#include <string>
#include <string_view>

namespace spcc {

// Lowercase hex SHA-256 digest.
std::string sha256_hex(std::string_view data);

// Compares two byte strings in time independent of where they differ.
bool constant_time_equal(std::string_view a, std::string_view b);

}  // namespace spcc
