// model.cpp — Hamiltonian assembly for the cavity and its two movable walls

#include "qfe/model.hpp"

#include "qfe/errors.hpp"

#include <cmath>

namespace qfe {

namespace {

bool finite_positive(double x) { return std::isfinite(x) && x > 0.0; }

} // namespace

std::vector<std::string> ModelParams::violations(const std::string& prefix) const {
    std::vector<std::string> out;
    const auto field = [&](const char* name) { return prefix + "." + name; };
    if (!finite_positive(omega_1)) out.push_back(field("omega_1") + ": must be > 0");
    if (!finite_positive(omega_2)) out.push_back(field("omega_2") + ": must be > 0");
    if (!finite_positive(omega_c)) out.push_back(field("omega_c") + ": must be > 0");
    if (finite_positive(omega_1) && finite_positive(omega_2) && !(omega_1 < omega_2)) {
        out.push_back(field("omega_1") +
                      ": must be below omega_2 (ordering convention omega_1 < omega_2)");
    }
    for (auto [name, g] : {std::pair{"g_1", g_1}, std::pair{"g_2", g_2}}) {
        if (!std::isfinite(g) || g < 0.0) {
            out.push_back(field(name) + ": must be >= 0");
        } else if (finite_positive(omega_1) && g > 0.5 * omega_1) {
            out.push_back(field(name) + ": must be <= 0.5*omega_1 (weak-coupling regime)");
        }
    }
    return out;
}

void ModelParams::validate() const {
    if (auto v = violations(); !v.empty()) throw InvalidParameter(std::move(v));
}

std::vector<std::string> BathParams::violations(const std::string& prefix) const {
    std::vector<std::string> out;
    const auto field = [&](const char* name) { return prefix + "." + name; };
    for (auto [name, r] : {std::pair{"gamma_1", gamma_1}, std::pair{"gamma_2", gamma_2},
                           std::pair{"kappa", kappa}}) {
        if (!std::isfinite(r) || r < 0.0) out.push_back(field(name) + ": must be >= 0");
    }
    for (auto [name, T] : {std::pair{"T_c", T_c}, std::pair{"T_h", T_h}, std::pair{"T_0", T_0}}) {
        if (!finite_positive(T)) out.push_back(field(name) + ": must be > 0");
    }
    if (finite_positive(T_c) && finite_positive(T_h) && T_c > T_h) {
        out.push_back(field("T_c") + ": must not exceed T_h");
    }
    return out;
}

void BathParams::validate() const {
    if (auto v = violations(); !v.empty()) throw InvalidParameter(std::move(v));
}

ModeOperators ModeOperators::build(const TruncationSpec& spec) {
    spec.validate();
    ModeOperators ops;
    ops.a = embed(destroy(spec.d_c), Slot::cavity, spec);
    ops.b1 = embed(destroy(spec.d_1), Slot::wall1, spec);
    ops.b2 = embed(destroy(spec.d_2), Slot::wall2, spec);
    ops.x_a = position_sum(ops.a);
    ops.x_1 = position_sum(ops.b1);
    ops.x_2 = position_sum(ops.b2);
    return ops;
}

Operator build_H0(const ModelParams& params, const TruncationSpec& spec) {
    params.validate();
    spec.validate();
    CMatrix h = CMatrix::Zero(spec.total(), spec.total());
    for (Eigen::Index k = 0; k < spec.total(); ++k) {
        const FockState s = fock_state(k, spec);
        h(k, k) = params.omega_c * s.l + params.omega_1 * s.m + params.omega_2 * s.n;
    }
    return Operator(std::move(h), true);
}

Operator build_HI(const ModelParams& params, const TruncationSpec& spec) {
    params.validate();
    const ModeOperators ops = ModeOperators::build(spec);
    // One squared quadrature shared by both wall couplings.
    const CMatrix xa2 = ops.x_a.matrix() * ops.x_a.matrix();
    CMatrix h = (0.5 * params.g_1) * (xa2 * ops.x_1.matrix());
    h.noalias() += (0.5 * params.g_2) * (xa2 * ops.x_2.matrix());
    return Operator(std::move(h), true);
}

Operator build_Hs(const ModelParams& params, const TruncationSpec& spec) {
    return build_H0(params, spec) + build_HI(params, spec);
}

Operator bare_number(const TruncationSpec& spec) {
    const ModeOperators ops = ModeOperators::build(spec);
    const auto number = [](const Operator& b) { return b.adjoint() * b; };
    return Operator((number(ops.a) + number(ops.b1) + number(ops.b2)).matrix(), true);
}

} // namespace qfe
