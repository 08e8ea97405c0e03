#pragma once

#include <string>

namespace searchnet {

/// Shortest decimal text that reads back to exactly `x`. Used for every
/// floating value written to CSV so reruns compare byte-for-byte.
std::string format_double(double x);

}  // namespace searchnet
