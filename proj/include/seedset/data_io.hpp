#pragma once

#include <string>
#include <string_view>

#include "seedset/numerics.hpp"

namespace seedset {

/// Comma-separated numeric table with a mandatory header row. By default rows
/// are samples and the header holds variable labels; with `transpose` rows
/// are variables, the first column holds their labels and the header names
/// the samples. Parsing ignores the process locale.
DataMatrix parse_data_csv(std::string_view text, bool transpose = false);
DataMatrix read_data_csv(const std::string& path, bool transpose = false);

/// Shortest round-trip formatting of every value.
std::string to_data_csv(const DataMatrix& x);

}  // namespace seedset
