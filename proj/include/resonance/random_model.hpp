#pragma once

#include "resonance/lattice_model.hpp"

#include <random>

namespace resonance {

// Dot of n_sites (1..6 drawn when 0): eps in [-1, 1], a connected chain plus random extra
// hoppings, 1-3 leads; every hopping and coupling in [0.2, 0.9].
OpenLatticeModel random_model(std::mt19937_64& rng, std::size_t n_sites = 0);

}  // namespace resonance
