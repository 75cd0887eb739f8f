#pragma once

#include <string_view>
#include <vector>

namespace resonance {

// Comma-separated items, each a number or an inclusive range start:stop:step.
std::vector<double> parse_grid(std::string_view text);

}  // namespace resonance
