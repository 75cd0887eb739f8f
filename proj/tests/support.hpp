#pragma once

#include "resonance/lattice_model.hpp"

#include <Eigen/Dense>

#include <complex>

namespace testing {

using resonance::Complex;

// Two sites, eps = (-0.85, 0), t12 = 1, leads L and R both on site 2 with unit coupling.
inline resonance::OpenLatticeModel t_model()
{
    resonance::ModelConfig c;
    c.n_sites = 2;
    c.epsilon = {-0.85, 0.0};
    c.hoppings = {{0, 1, 1.0}};
    c.leads = {{1, 1.0, "L"}, {1, 1.0, "R"}};
    return resonance::build_model(c);
}

// Single site at zero energy, one lead with coupling 0.5.
inline resonance::OpenLatticeModel m1()
{
    resonance::ModelConfig c;
    c.n_sites = 1;
    c.epsilon = {0.0};
    c.leads = {{0, 0.5, "L"}};
    return resonance::build_model(c);
}

// Theta = 1: Z(lambda) = 1, every eigenvalue at infinity.
inline resonance::OpenLatticeModel theta_one()
{
    resonance::ModelConfig c;
    c.n_sites = 1;
    c.epsilon = {0.0};
    c.leads = {{0, 1.0, "L"}};
    return resonance::build_model(c);
}

inline double max_abs(const Eigen::MatrixXcd& m)
{
    return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff();
}

}  // namespace testing
