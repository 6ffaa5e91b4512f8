#pragma once

#include <cbp/common.hpp>

namespace cbp {

/// Parameters of the contact potential. Per-primitive localization radii
/// start at eps_trg and are shrunk by the rest-pair adaptation.
struct PotentialParams
{
    double eps_trg = 0.1; // maximal barrier extent (dhat)
    double alpha = 0.5;   // local-minimum filter width, (0, 1]
    double beta = 0.1;    // exterior-direction filter width, (0, 1]
    double c = 0.01;      // closest-point mollifier width
    int p = 1;            // barrier exponent, default n-1
    double kappa = 1e4;   // barrier stiffness

    void validate() const
    {
        check(eps_trg > 0.0, "params: eps_trg must be positive");
        check(alpha > 0.0 && alpha <= 1.0, "params: alpha must be in (0, 1]");
        check(beta > 0.0 && beta <= 1.0, "params: beta must be in (0, 1]");
        check(c > 0.0, "params: c must be positive");
        check(p >= 1, "params: p must be a positive integer");
        check(kappa > 0.0, "params: kappa must be positive");
    }
};

} // namespace cbp
