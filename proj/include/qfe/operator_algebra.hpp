// operator_algebra.hpp — truncated bosonic operators on cavity ⊗ wall1 ⊗ wall2
//
// Every system operator lives on the tensor product with the fixed ordering
// cavity ⊗ wall1 ⊗ wall2. The Fock product state |l,m,n> (l photons, m and n
// phonons) sits at flat index (l*d_1 + m)*d_2 + n.

#pragma once

#include <Eigen/Dense>

#include <complex>
#include <cstddef>

namespace qfe {

using cplx = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;

enum class Slot { cavity, wall1, wall2 };

const char* to_string(Slot slot) noexcept;

/// Fock-space cutoffs per mode.
struct TruncationSpec {
    int d_c{8};
    int d_1{5};
    int d_2{5};

    Eigen::Index total() const noexcept {
        return static_cast<Eigen::Index>(d_c) * d_1 * d_2;
    }
    int slot_dim(Slot slot) const noexcept;
    /// Throws InvalidDimension unless every cutoff is >= 2 and total() >= 8.
    void validate() const;

    friend bool operator==(const TruncationSpec&, const TruncationSpec&) = default;
};

struct FockState {
    int l{0};  // photons
    int m{0};  // wall-1 phonons
    int n{0};  // wall-2 phonons

    friend bool operator==(const FockState&, const FockState&) = default;
};

Eigen::Index basis_index(const FockState& s, const TruncationSpec& spec);
FockState fock_state(Eigen::Index index, const TruncationSpec& spec);

/// Dense complex square matrix. The Hermitian flag is a checked promise:
/// constructing with `hermitian = true` verifies the matrix against its
/// adjoint.
class Operator {
public:
    Operator() = default;
    explicit Operator(CMatrix entries, bool hermitian = false);

    static Operator zero(Eigen::Index dim);
    static Operator identity(Eigen::Index dim);

    Eigen::Index dim() const noexcept { return m_.rows(); }
    const CMatrix& matrix() const noexcept { return m_; }
    bool hermitian() const noexcept { return hermitian_; }

    cplx operator()(Eigen::Index r, Eigen::Index c) const { return m_(r, c); }

    Operator adjoint() const;
    /// max_ij |M_ij - conj(M_ji)|
    double hermiticity_residual() const;
    /// max_ij |M_ij|
    double max_abs() const;

    friend Operator operator+(const Operator& a, const Operator& b);
    friend Operator operator-(const Operator& a, const Operator& b);
    friend Operator operator*(const Operator& a, const Operator& b);
    friend Operator operator*(double s, const Operator& a);
    friend Operator operator*(cplx s, const Operator& a);

private:
    CMatrix m_;
    bool hermitian_{false};
};

/// Absolute tolerance behind the Hermitian flag.
inline constexpr double kHermitianTolerance = 1e-12;

/// Lowering operator on a d-level Fock space: sqrt(n+1) on the superdiagonal.
Operator destroy(int d);
Operator identity(int d);

/// Lifts a single-mode operator into its slot, identities elsewhere.
Operator embed(const Operator& op, Slot slot, const TruncationSpec& spec);

/// op + op^dagger, flagged Hermitian.
Operator position_sum(const Operator& op);

Operator commutator(const Operator& a, const Operator& b);

} // namespace qfe
