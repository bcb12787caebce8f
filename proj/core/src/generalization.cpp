#include "didm/generalization.hpp"

#include <cmath>
#include <limits>

#include "didm/errors.hpp"

namespace didm {

GeneralizationConstants generalization_constants(double A1, double A2, int L, double r,
                                                 double C_loss, double loss_at_zero) {
    if (A1 < 0.0 || A2 < 0.0 || r < 0.0 || C_loss < 0.0) {
        throw contract_error("generalization constants need nonnegative A1, A2, r, C_loss");
    }
    if (L < 0) throw contract_error("L must be nonnegative");
    GeneralizationConstants out;
    double bound = r * A1 + A2;
    double lip = A1;
    for (int t = 1; t <= L; ++t) {
        const double new_lip = 2.0 * A1 * (bound + lip);
        bound = 2.0 * A1 * bound + A2;
        lip = new_lip;
    }
    out.B1 = bound;
    out.C1 = lip;
    out.C_Theta = A1 * (out.B1 + out.C1);
    out.B_Theta = A1 * out.B1 + A2;
    out.C = C_loss * std::max(out.C_Theta, 1.0);
    out.B = C_loss * (out.B_Theta + 1.0) + std::abs(loss_at_zero);
    return out;
}

namespace {
constexpr double kHuge = 1e306;  // comparison sentinel once log kappa overflows
constexpr double kLn2 = 0.6931471805599453;
}  // namespace

double log_xi(double eps, const CoveringParams& params) {
    if (!(eps > 0.0)) throw contract_error("eps must be positive");
    if (!(params.c > 0.0)) throw contract_error("covering parameter c must be positive");
    // k = ceil(2^e) with e = 9c / (4 eps^2); kappa = 2^(k^2)
    const double e = 9.0 * params.c / (4.0 * eps * eps);
    double ln_kappa;
    if (e <= 50.0) {
        const double k = std::ceil(std::exp2(e));
        ln_kappa = k * k * kLn2;
    } else if (e <= 500.0) {
        // ceil is a relative perturbation below 2^-50 here; drop it
        ln_kappa = std::exp2(2.0 * e) * kLn2;
    } else {
        return kHuge;  // ln xi beyond double range; only its ordering matters
    }
    // ln xi = 2 ln kappa + ln(ln kappa) - 2 ln eps
    return 2.0 * ln_kappa + std::log(ln_kappa) - 2.0 * std::log(eps);
}

double xi_inverse(double n_samples, const CoveringParams& params) {
    if (!(n_samples >= 1.0)) throw contract_error("sample count must be >= 1");
    const double target = std::log(n_samples);
    double lo = 1e-6;  // log_xi(lo) is astronomically above any representable target
    double hi = 1.0;
    while (log_xi(hi, params) > target) {
        hi *= 2.0;
        if (hi > 1e12) break;  // xi(hi) ~ kappa_min^2 log kappa_min / hi^2 -> 0
    }
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (log_xi(mid, params) > target) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

double generalization_bound_log(double n_samples, double p, double C, double B,
                                const CoveringParams& params) {
    if (!(p > 0.0 && p < 1.0)) throw contract_error("confidence p must lie in (0,1)");
    if (C < 0.0 || B < 0.0) throw contract_error("C and B must be nonnegative");
    const double eps = xi_inverse(n_samples, params);
    const double factor = 2.0 * C + (B / std::sqrt(2.0)) * (1.0 + std::sqrt(std::log(2.0 / p)));
    if (factor <= 0.0) return -std::numeric_limits<double>::infinity();
    return std::log(eps) + std::log(factor);
}

}  // namespace didm
