// model.hpp — physical parameters and the two-wall cavity Hamiltonian
//
// Units: hbar = c = k_B = 1, frequencies and temperatures normalized to the
// bare cavity frequency. Defaults are the reference engine parameters.

#pragma once

#include "qfe/operator_algebra.hpp"

#include <string>
#include <vector>

namespace qfe {

struct ModelParams {
    double omega_1{2.0};  // wall-1 frequency
    double omega_2{2.6};  // wall-2 frequency
    double omega_c{1.0};  // cavity frequency
    double g_1{0.05};
    double g_2{0.05};

    /// Each violated invariant as "<prefix>.<field>: reason".
    std::vector<std::string> violations(const std::string& prefix = "model") const;
    void validate() const;
};

struct BathParams {
    double gamma_1{0.01};  // wall-1 damping (cold bath)
    double gamma_2{0.01};  // wall-2 damping (hot bath)
    double kappa{1e-6};    // cavity damping
    double T_c{0.15};
    double T_h{0.40};
    double T_0{1e-7};      // cavity bath temperature

    std::vector<std::string> violations(const std::string& prefix = "baths") const;
    void validate() const;
};

/// Lowering operators and position sums of the three modes on the full space.
struct ModeOperators {
    Operator a, b1, b2;
    Operator x_a, x_1, x_2;  // a + a^dagger etc.

    static ModeOperators build(const TruncationSpec& spec);
};

/// omega_c a^dag a + omega_1 b1^dag b1 + omega_2 b2^dag b2 (diagonal).
Operator build_H0(const ModelParams& params, const TruncationSpec& spec);

/// (g_1/2)(a+a^dag)^2 (b1+b1^dag) + (g_2/2)(a+a^dag)^2 (b2+b2^dag), no RWA.
Operator build_HI(const ModelParams& params, const TruncationSpec& spec);

Operator build_Hs(const ModelParams& params, const TruncationSpec& spec);

/// Total bare excitation number a^dag a + b1^dag b1 + b2^dag b2.
Operator bare_number(const TruncationSpec& spec);

} // namespace qfe
