// operator_algebra.cpp — Fock-space operator construction and tensor lifting

#include "qfe/operator_algebra.hpp"

#include "qfe/errors.hpp"

#include <cmath>
#include <string>
#include <utility>

namespace qfe {

namespace {

bool check_hermitian(const CMatrix& m) {
    if (m.rows() != m.cols()) return false;
    const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
    return (m - m.adjoint()).cwiseAbs().maxCoeff() <= kHermitianTolerance * scale;
}

CMatrix kron(const CMatrix& a, const CMatrix& b) {
    CMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i) {
        for (Eigen::Index j = 0; j < a.cols(); ++j) {
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
        }
    }
    return out;
}

void require_same_dim(const Operator& a, const Operator& b, const char* what) {
    if (a.dim() != b.dim()) {
        throw InvalidDimension(std::string(what) + ": dimension mismatch (" +
                               std::to_string(a.dim()) + " vs " + std::to_string(b.dim()) + ")");
    }
}

} // namespace

const char* to_string(Slot slot) noexcept {
    switch (slot) {
    case Slot::cavity: return "cavity";
    case Slot::wall1: return "wall1";
    case Slot::wall2: return "wall2";
    }
    return "?";
}

int TruncationSpec::slot_dim(Slot slot) const noexcept {
    switch (slot) {
    case Slot::cavity: return d_c;
    case Slot::wall1: return d_1;
    case Slot::wall2: return d_2;
    }
    return 0;
}

void TruncationSpec::validate() const {
    if (d_c < 2 || d_1 < 2 || d_2 < 2) {
        throw InvalidDimension("truncation: every mode needs at least 2 Fock levels (got " +
                               std::to_string(d_c) + "," + std::to_string(d_1) + "," +
                               std::to_string(d_2) + ")");
    }
    if (total() < 8) {
        throw InvalidDimension("truncation: total dimension must be >= 8");
    }
}

Eigen::Index basis_index(const FockState& s, const TruncationSpec& spec) {
    if (s.l < 0 || s.l >= spec.d_c || s.m < 0 || s.m >= spec.d_1 || s.n < 0 || s.n >= spec.d_2) {
        throw InvalidDimension("basis_index: Fock state outside truncation");
    }
    return (static_cast<Eigen::Index>(s.l) * spec.d_1 + s.m) * spec.d_2 + s.n;
}

FockState fock_state(Eigen::Index index, const TruncationSpec& spec) {
    if (index < 0 || index >= spec.total()) {
        throw InvalidDimension("fock_state: index outside truncation");
    }
    const auto n = static_cast<int>(index % spec.d_2);
    const auto rest = index / spec.d_2;
    const auto m = static_cast<int>(rest % spec.d_1);
    const auto l = static_cast<int>(rest / spec.d_1);
    return {l, m, n};
}

Operator::Operator(CMatrix entries, bool hermitian) : m_(std::move(entries)), hermitian_(hermitian) {
    if (m_.rows() != m_.cols()) {
        throw InvalidDimension("Operator: matrix must be square");
    }
    if (hermitian_ && !check_hermitian(m_)) {
        throw ContractViolation("Operator: Hermitian flag set on a non-Hermitian matrix");
    }
}

Operator Operator::zero(Eigen::Index dim) {
    return Operator(CMatrix::Zero(dim, dim), true);
}

Operator Operator::identity(Eigen::Index dim) {
    return Operator(CMatrix::Identity(dim, dim), true);
}

Operator Operator::adjoint() const {
    Operator out;
    out.m_ = m_.adjoint();
    out.hermitian_ = hermitian_;
    return out;
}

double Operator::hermiticity_residual() const {
    if (m_.size() == 0) return 0.0;
    return (m_ - m_.adjoint()).cwiseAbs().maxCoeff();
}

double Operator::max_abs() const {
    if (m_.size() == 0) return 0.0;
    return m_.cwiseAbs().maxCoeff();
}

Operator operator+(const Operator& a, const Operator& b) {
    require_same_dim(a, b, "operator+");
    Operator out;
    out.m_ = a.m_ + b.m_;
    out.hermitian_ = a.hermitian_ && b.hermitian_;
    return out;
}

Operator operator-(const Operator& a, const Operator& b) {
    require_same_dim(a, b, "operator-");
    Operator out;
    out.m_ = a.m_ - b.m_;
    out.hermitian_ = a.hermitian_ && b.hermitian_;
    return out;
}

Operator operator*(const Operator& a, const Operator& b) {
    require_same_dim(a, b, "operator*");
    Operator out;
    out.m_.noalias() = a.m_ * b.m_;
    return out;
}

Operator operator*(double s, const Operator& a) {
    Operator out;
    out.m_ = s * a.m_;
    out.hermitian_ = a.hermitian_;
    return out;
}

Operator operator*(cplx s, const Operator& a) {
    Operator out;
    out.m_ = s * a.m_;
    out.hermitian_ = a.hermitian_ && s.imag() == 0.0;
    return out;
}

Operator destroy(int d) {
    if (d < 2) {
        throw InvalidDimension("destroy: need d >= 2, got " + std::to_string(d));
    }
    CMatrix m = CMatrix::Zero(d, d);
    for (int n = 0; n + 1 < d; ++n) {
        m(n, n + 1) = std::sqrt(static_cast<double>(n + 1));
    }
    return Operator(std::move(m));
}

Operator identity(int d) {
    if (d < 1) {
        throw InvalidDimension("identity: need d >= 1");
    }
    return Operator::identity(d);
}

Operator embed(const Operator& op, Slot slot, const TruncationSpec& spec) {
    const int d = spec.slot_dim(slot);
    if (op.dim() != d) {
        throw InvalidDimension(std::string("embed: operator of dim ") + std::to_string(op.dim()) +
                               " does not fit slot " + to_string(slot) + " of dim " +
                               std::to_string(d));
    }
    const CMatrix ic = CMatrix::Identity(spec.d_c, spec.d_c);
    const CMatrix i1 = CMatrix::Identity(spec.d_1, spec.d_1);
    const CMatrix i2 = CMatrix::Identity(spec.d_2, spec.d_2);
    CMatrix full;
    switch (slot) {
    case Slot::cavity: full = kron(kron(op.matrix(), i1), i2); break;
    case Slot::wall1: full = kron(kron(ic, op.matrix()), i2); break;
    case Slot::wall2: full = kron(kron(ic, i1), op.matrix()); break;
    }
    return Operator(std::move(full), op.hermitian());
}

Operator position_sum(const Operator& op) {
    return Operator(op.matrix() + op.matrix().adjoint(), true);
}

Operator commutator(const Operator& a, const Operator& b) {
    return a * b - b * a;
}

} // namespace qfe
