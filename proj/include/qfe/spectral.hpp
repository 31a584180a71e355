// spectral.hpp — diagonalization, spectrum scans and avoided-crossing location

#pragma once

#include "qfe/model.hpp"
#include "qfe/operator_algebra.hpp"

#include <Eigen/Dense>

#include <iosfwd>
#include <span>
#include <utility>
#include <vector>

namespace qfe {

/// Ascending energies and the eigenvectors as columns of `states`.
/// `sector[i]` labels the block of the Hamiltonian's exact sparsity pattern
/// that eigenvector i lives in; eigenvectors never mix sectors.
struct EigenSystem {
    Eigen::VectorXd energies;
    CMatrix states;
    std::vector<int> sector;

    Eigen::Index dim() const noexcept { return energies.size(); }
    int sector_count() const noexcept;
    /// max |H V - V diag(E)| over entries.
    double reconstruction_residual(const Operator& H) const;
    /// max |V^dag V - 1| over entries.
    double orthonormality_residual() const;
};

/// Hermitian eigendecomposition. The matrix is split into the connected
/// components of its nonzero pattern and each block is solved separately
/// (real arithmetic when the block is real). Eigenvector signs are fixed so
/// that the largest-magnitude component is real and positive.
/// Throws ContractViolation for non-Hermitian input.
EigenSystem eig_hermitian(const Operator& H);

/// Ascending eigenvalues only; same block handling as eig_hermitian.
Eigen::VectorXd eigenvalues_hermitian(const Operator& H);

struct SpectrumScan {
    std::vector<double> omega;            // cavity frequency grid
    std::vector<Eigen::VectorXd> levels;  // lowest n_levels energies per grid point
    std::vector<std::vector<int>> sectors;  // sparsity sector of each stored level (may be empty)
    int n_levels{0};
};

/// Lowest `n_levels` eigenvalues of H_s for each omega_c in `omega_grid`.
/// Grid points are independent and are spread over `threads` workers.
SpectrumScan scan_spectrum(const ModelParams& base, std::span<const double> omega_grid,
                           const TruncationSpec& spec, int n_levels, int threads = 1);

std::vector<double> linspace(double lo, double hi, int points);

struct CrossingReport {
    double omega_eff{0.0};
    double gap{0.0};
    std::pair<int, int> level_pair{0, 1};
    std::pair<double, double> scan_range{0.0, 0.0};
};

/// Gaps below this are treated as genuine (unavoided) crossings.
inline constexpr double kDegenerateGap = 1e-9;

/// Minimum of E_j - E_i over the scan, refined by a three-point parabola.
/// Throws NoCrossing when the minimum sits on the grid boundary or the gap
/// closes (degenerate crossing). A gap closes when it falls below
/// kDegenerateGap or when, at the minimum, the two levels lie in different
/// sparsity sectors: nothing couples them, so their crossing is exact even
/// if the grid never samples it.
CrossingReport find_avoided_crossing(const SpectrumScan& scan, std::pair<int, int> level_pair);

/// Scans all adjacent pairs among the stored levels and returns the avoided
/// crossing whose location is nearest `target_omega` (omega_j / 2 for
/// wall j). Throws NoCrossing (degenerate when only closed gaps were found).
CrossingReport locate_resonance(const SpectrumScan& scan, double target_omega);

/// Dressed resonances of both walls.
struct Resonances {
    CrossingReport wall1;
    CrossingReport wall2;
};

Resonances locate_resonances(const SpectrumScan& scan, const ModelParams& params);

/// t(i, j) = <i|X|j> over eigenstates.
CMatrix transition_amplitudes(const EigenSystem& es, const Operator& X);

/// Columns omega_c, E_0 ... E_{n-1}; full double precision.
void write_scan_csv(std::ostream& os, const SpectrumScan& scan);

} // namespace qfe
