#include "resonance/random_model.hpp"

#include <string>

namespace resonance {

OpenLatticeModel random_model(std::mt19937_64& rng, std::size_t n_sites)
{
    std::uniform_real_distribution<double> energy(-1.0, 1.0);
    std::uniform_real_distribution<double> coupling(0.2, 0.9);
    std::uniform_real_distribution<double> coin(0.0, 1.0);
    if (n_sites == 0)
        n_sites = std::uniform_int_distribution<std::size_t>(1, 6)(rng);

    ModelConfig config;
    config.n_sites = n_sites;
    for (std::size_t i = 0; i < n_sites; ++i)
        config.epsilon.push_back(energy(rng));
    for (std::size_t i = 0; i + 1 < n_sites; ++i)
        config.hoppings.push_back({i, i + 1, coupling(rng)});
    for (std::size_t i = 0; i < n_sites; ++i)
        for (std::size_t j = i + 2; j < n_sites; ++j)
            if (coin(rng) < 0.3)
                config.hoppings.push_back({i, j, coupling(rng)});

    const auto n_leads = std::uniform_int_distribution<int>(1, 3)(rng);
    std::uniform_int_distribution<std::size_t> site(0, n_sites - 1);
    const char* labels[] = {"L", "R", "C"};
    for (int a = 0; a < n_leads; ++a)
        config.leads.push_back({site(rng), coupling(rng), labels[a]});
    return build_model(config);
}

}  // namespace resonance
