// dressed_lindblad.hpp — dressed-picture master equation for the three baths
//
// All matrices here are expressed in the dressed (energy-ordered eigen-)
// basis of H_s unless a function says otherwise. In that basis the
// secular dissipator only moves populations between levels and damps
// coherences, so the generator is cheap to apply.

#pragma once

#include "qfe/model.hpp"
#include "qfe/operator_algebra.hpp"
#include "qfe/spectral.hpp"

#include <Eigen/Dense>

#include <array>
#include <vector>

namespace qfe {

/// Bose-Einstein occupation 1/(exp(delta_E/T) - 1). Throws InvalidGap for
/// delta_E <= 0 and InvalidParameter for T <= 0.
double n_thermal(double delta_E, double T);

enum class Channel { cavity = 0, wall1 = 1, wall2 = 2 };

const char* to_string(Channel ch) noexcept;

struct BathSpec {
    double rate{0.0};
    double temperature{1.0};
    Channel channel{Channel::cavity};
};

/// cavity <-> (kappa, T_0), wall1 <-> (gamma_1, T_c), wall2 <-> (gamma_2, T_h).
std::array<BathSpec, 3> bath_specs(const BathParams& baths);

/// Pairs closer than this in energy are left out of the dressed operators
/// and the dissipator.
inline constexpr double kDegeneratePair = 1e-9;
/// Channels with |x_ij|^2 below this are dropped from the dissipator.
inline constexpr double kAmplitudeCutoff = 1e-12;

/// Dressed lowering operators and the amplitude tables they come from.
/// A(i, j) = c(i, j) = <i|x_a|j> for E_i < E_j (strictly upper triangular in
/// the energy-ordered basis), likewise B1 from u and B2 from v.
struct DressedSet {
    Operator A, B1, B2;  // dressed basis
    CMatrix c, u, v;     // full <i|X|j> tables
    Eigen::VectorXd energies;
    CMatrix basis;             // eigenvectors as columns (lab <- dressed)
    std::vector<int> sector;   // sparsity sector of each eigenvector

    Eigen::Index dim() const noexcept { return energies.size(); }
    const Operator& lowering(Channel ch) const noexcept;
    const CMatrix& table(Channel ch) const noexcept;
    /// V rho V^dagger
    CMatrix to_lab(const CMatrix& rho_dressed) const;
    /// V^dagger rho V
    CMatrix to_dressed(const CMatrix& rho_lab) const;
};

/// position_ops = {a + a^dag, b1 + b1^dag, b2 + b2^dag} on the full space.
DressedSet build_dressed_operators(const EigenSystem& es, const std::array<Operator, 3>& position_ops);

/// P rho P^dag - (P^dag P rho + rho P^dag P) / 2.
CMatrix dissipator(const Operator& P, const CMatrix& rho);

/// Reference generator: -i[H, rho] plus, per bath and per retained pair
/// (i lower, j upper), rate |x_ij|^2 ((1+n) D[|i><j|] + n D[|j><i|]) rho.
/// Jump terms are applied one by one through their rank-one structure.
/// H and rho are in the dressed basis.
CMatrix apply_liouvillian(const Operator& H, const std::array<BathSpec, 3>& baths,
                          const DressedSet& ds, const CMatrix& rho);

/// Production generator for H_tot(f) = diag(E) + f * delta_omega * A^dag A.
///
/// The dissipator is folded into a Pauli rate matrix R (R(a, b) = rate of
/// b -> a) and elementwise coherence factors, leaving the drive commutator
/// as the only matrix product; for real H_s it runs as real GEMMs.
///
/// The generator never creates coherences between different sparsity
/// sectors of H_s when A^dag A is sector-diagonal. States without such
/// coherences (see `packable`) can therefore be stored packed: for every
/// sector the real and imaginary parts of its diagonal block, column-major,
/// one after the other. The packed routines are what long runs use.
class DressedLiouvillian {
public:
    DressedLiouvillian(const DressedSet& ds, const std::array<BathSpec, 3>& baths, double delta_omega);

    Eigen::Index dim() const noexcept { return energies_.size(); }
    double delta_omega() const noexcept { return delta_omega_; }

    /// out = d rho / dt at drive value f. `out` must not alias `rho`.
    void apply(const CMatrix& rho, double f, CMatrix& out) const;
    CMatrix apply(const CMatrix& rho, double f) const;

    /// Tr[H_tot(f) X] for a Hermitian X (state or its time derivative).
    double energy(const CMatrix& x, double f) const;
    /// Tr[A^dag A rho]
    double drive_expectation(const CMatrix& rho) const;
    /// Tr[L^dag L rho] for the dressed lowering operator of the channel.
    double number(const CMatrix& rho, Channel ch) const;

    // --- packed, sector-blocked states ---------------------------------

    /// Number of sectors used for packing (1 when the drive mixes sectors).
    std::size_t sector_count() const noexcept { return sectors_.size(); }
    const std::vector<std::vector<Eigen::Index>>& sectors() const noexcept { return sectors_; }
    /// True when H_s is real and rho has no coherences between sectors.
    bool packable(const CMatrix& rho) const;
    Eigen::Index packed_size() const noexcept { return packed_size_; }
    Eigen::VectorXd pack(const CMatrix& rho) const;
    CMatrix unpack(const Eigen::VectorXd& y) const;
    void apply_packed(const Eigen::VectorXd& y, double f, Eigen::VectorXd& out) const;
    double energy_packed(const Eigen::VectorXd& y, double f) const;
    double drive_expectation_packed(const Eigen::VectorXd& y) const;
    double number_packed(const Eigen::VectorXd& y, Channel ch) const;
    double trace_packed(const Eigen::VectorXd& y) const;
    /// max |rho - rho^dag| over the stored blocks.
    double hermiticity_residual_packed(const Eigen::VectorXd& y) const;
    /// Hermitian diagonal block of sector s.
    CMatrix block(const Eigen::VectorXd& y, std::size_t s) const;

    const Eigen::MatrixXd& rates() const noexcept { return rates_; }
    /// Total decay rate out of each level (column sums of rates()).
    const Eigen::VectorXd& escape_rates() const noexcept { return escape_; }
    /// H_tot(f) in the dressed basis.
    Operator hamiltonian(double f) const;

private:
    struct Sector {
        Eigen::Index offset{0};   // start of the real block in a packed vector
        Eigen::Index size{0};
        Eigen::MatrixXd decay;    // -(Gamma_k + Gamma_l) / 2
        Eigen::MatrixXd phase;    // -(E_k - E_l)
        Eigen::MatrixXd drive;    // A^dag A block
        std::array<Eigen::MatrixXd, 3> numbers;
    };

    Eigen::VectorXd energies_;
    Eigen::MatrixXd rates_;
    Eigen::VectorXd escape_;
    CMatrix coherence_;  // -i(E_k - E_l) - (Gamma_k + Gamma_l)/2
    CMatrix drive_;      // A^dag A
    Eigen::MatrixXd drive_real_;
    bool real_{false};
    std::array<CMatrix, 3> numbers_;
    double delta_omega_{0.0};

    std::vector<std::vector<Eigen::Index>> sectors_;
    std::vector<int> sector_of_;
    std::vector<Sector> packed_;
    Eigen::Index packed_size_{0};
};

} // namespace qfe
