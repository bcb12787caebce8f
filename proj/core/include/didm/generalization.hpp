#pragma once

namespace didm {

/// Closed-form constants for the class of models whose update/readout
/// Lipschitz constants are bounded by A1 and formal biases by A2:
///   B^0 = r A1 + A2,  B^t = 2 A1 B^{t-1} + A2,  B1 = B^L
///   C^0 = A1,         C^t = 2 A1 (B^{t-1} + C^{t-1}),  C1 = C^L
///   C_Theta = A1 (B1 + C1),  B_Theta = A1 B1 + A2
///   C = C_loss max(C_Theta, 1),  B = C_loss (B_Theta + 1) + |loss_at_zero|
struct GeneralizationConstants {
    double B1 = 0.0;
    double C1 = 0.0;
    double C_Theta = 0.0;
    double B_Theta = 0.0;
    double C = 0.0;
    double B = 0.0;
};

GeneralizationConstants generalization_constants(double A1, double A2, int L, double r,
                                                 double C_loss, double loss_at_zero);

/// Parameters of the covering-number bound kappa(eps) = 2^(k^2) with
/// k = ceil(2^(9c/(4 eps^2))), c > 1. The attribute radius r of the covered
/// space is recorded alongside; the covering formula itself depends on c
/// only.
struct CoveringParams {
    double c = 1.5;
    double r = 1.0;
};

/// ln xi(eps) with xi(eps) = kappa(eps)^2 log(kappa(eps)) / eps^2, evaluated
/// on log kappa so tiny eps never overflows (clamped to a huge sentinel once
/// even log kappa leaves double range). Strictly decreasing in eps.
double log_xi(double eps, const CoveringParams& params);

/// Generalized inverse inf{eps : xi(eps) <= N}, by bisection on log_xi.
/// Nonincreasing in N; flat across the value ranges the integer covering
/// number makes xi skip.
double xi_inverse(double n_samples, const CoveringParams& params);

/// ln of the generalization gap bound
///   xi^{-1}(N) * (2C + B (1 + sqrt(log(2/p))) / sqrt(2)).
/// Numerically vacuous at desk scale (the covering number is astronomical);
/// meaningful here as a monotone quantity: nonincreasing in N, increasing as
/// p shrinks.
double generalization_bound_log(double n_samples, double p, double C, double B,
                                const CoveringParams& params);

}  // namespace didm
