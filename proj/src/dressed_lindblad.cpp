// dressed_lindblad.cpp — dressed operators, Lindblad dissipators and the fast generator

#include "qfe/dressed_lindblad.hpp"

#include "qfe/errors.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace qfe {

double n_thermal(double delta_E, double T) {
    if (!(delta_E > 0.0)) {
        throw InvalidGap("n_thermal: gap must be > 0 (got " + std::to_string(delta_E) + ")");
    }
    if (!(T > 0.0)) throw InvalidParameter({"n_thermal: temperature must be > 0"});
    return 1.0 / std::expm1(delta_E / T);
}

const char* to_string(Channel ch) noexcept {
    switch (ch) {
    case Channel::cavity: return "cavity";
    case Channel::wall1: return "wall1";
    case Channel::wall2: return "wall2";
    }
    return "?";
}

std::array<BathSpec, 3> bath_specs(const BathParams& baths) {
    baths.validate();
    return {BathSpec{baths.kappa, baths.T_0, Channel::cavity},
            BathSpec{baths.gamma_1, baths.T_c, Channel::wall1},
            BathSpec{baths.gamma_2, baths.T_h, Channel::wall2}};
}

const Operator& DressedSet::lowering(Channel ch) const noexcept {
    switch (ch) {
    case Channel::wall1: return B1;
    case Channel::wall2: return B2;
    default: return A;
    }
}

const CMatrix& DressedSet::table(Channel ch) const noexcept {
    switch (ch) {
    case Channel::wall1: return u;
    case Channel::wall2: return v;
    default: return c;
    }
}

CMatrix DressedSet::to_lab(const CMatrix& rho_dressed) const {
    return basis * rho_dressed * basis.adjoint();
}

CMatrix DressedSet::to_dressed(const CMatrix& rho_lab) const {
    return basis.adjoint() * rho_lab * basis;
}

namespace {

Operator lowering_from_table(const CMatrix& table, const Eigen::VectorXd& E) {
    const Eigen::Index n = E.size();
    CMatrix L = CMatrix::Zero(n, n);
    for (Eigen::Index j = 0; j < n; ++j) {
        for (Eigen::Index i = 0; i < j; ++i) {
            if (E(j) - E(i) > kDegeneratePair) L(i, j) = table(i, j);
        }
    }
    return Operator(std::move(L));
}

// Visits every retained (lower i, upper j) pair of a bath with its emission
// and absorption weights.
template <class Fn>
void for_each_jump(const BathSpec& bath, const DressedSet& ds, Fn&& fn) {
    if (bath.rate < 0.0 || !(bath.temperature > 0.0)) {
        throw InvalidParameter({std::string("bath ") + to_string(bath.channel) +
                                ": rate must be >= 0 and temperature > 0"});
    }
    if (bath.rate == 0.0) return;
    const CMatrix& x = ds.table(bath.channel);
    const Eigen::VectorXd& E = ds.energies;
    for (Eigen::Index j = 0; j < E.size(); ++j) {
        for (Eigen::Index i = 0; i < j; ++i) {
            const double gap = E(j) - E(i);
            const double amp = std::norm(x(i, j));
            if (gap < kDegeneratePair || amp < kAmplitudeCutoff) continue;
            const double n = n_thermal(gap, bath.temperature);
            fn(i, j, bath.rate * amp * (1.0 + n), bath.rate * amp * n);
        }
    }
}

} // namespace

DressedSet build_dressed_operators(const EigenSystem& es, const std::array<Operator, 3>& position_ops) {
    DressedSet ds;
    ds.energies = es.energies;
    ds.basis = es.states;
    ds.sector = es.sector;
    ds.c = transition_amplitudes(es, position_ops[0]);
    ds.u = transition_amplitudes(es, position_ops[1]);
    ds.v = transition_amplitudes(es, position_ops[2]);
    ds.A = lowering_from_table(ds.c, ds.energies);
    ds.B1 = lowering_from_table(ds.u, ds.energies);
    ds.B2 = lowering_from_table(ds.v, ds.energies);
    return ds;
}

CMatrix dissipator(const Operator& P, const CMatrix& rho) {
    if (P.dim() != rho.rows() || rho.rows() != rho.cols()) {
        throw InvalidDimension("dissipator: dimension mismatch");
    }
    const CMatrix& p = P.matrix();
    const CMatrix pdp = p.adjoint() * p;
    return p * rho * p.adjoint() - 0.5 * (pdp * rho + rho * pdp);
}

CMatrix apply_liouvillian(const Operator& H, const std::array<BathSpec, 3>& baths,
                          const DressedSet& ds, const CMatrix& rho) {
    if (H.dim() != ds.dim() || rho.rows() != ds.dim() || rho.cols() != ds.dim()) {
        throw InvalidDimension("apply_liouvillian: dimension mismatch");
    }
    const cplx minus_i(0.0, -1.0);
    CMatrix out = minus_i * (H.matrix() * rho - rho * H.matrix());
    // D[|p><q|] rho = rho_qq |p><p| - (|q><q| rho + rho |q><q|) / 2
    const auto jump = [&](Eigen::Index p, Eigen::Index q, double w) {
        out(p, p) += w * rho(q, q);
        out.row(q) -= (0.5 * w) * rho.row(q);
        out.col(q) -= (0.5 * w) * rho.col(q);
    };
    for (const BathSpec& bath : baths) {
        for_each_jump(bath, ds, [&](Eigen::Index i, Eigen::Index j, double emit, double absorb) {
            jump(i, j, emit);    // |j> -> |i>, lowers the energy
            if (absorb > 0.0) jump(j, i, absorb);
        });
    }
    return out;
}

DressedLiouvillian::DressedLiouvillian(const DressedSet& ds, const std::array<BathSpec, 3>& baths,
                                       double delta_omega)
    : energies_(ds.energies), delta_omega_(delta_omega) {
    const Eigen::Index n = ds.dim();
    if (n == 0) throw InvalidDimension("DressedLiouvillian: empty dressed set");
    if (!std::isfinite(delta_omega)) throw InvalidParameter({"drive.delta_omega: must be finite"});

    rates_ = Eigen::MatrixXd::Zero(n, n);
    for (const BathSpec& bath : baths) {
        for_each_jump(bath, ds, [&](Eigen::Index i, Eigen::Index j, double emit, double absorb) {
            rates_(i, j) += emit;
            rates_(j, i) += absorb;
        });
    }
    escape_ = rates_.colwise().sum().transpose();
    coherence_.resize(n, n);
    for (Eigen::Index l = 0; l < n; ++l) {
        for (Eigen::Index k = 0; k < n; ++k) {
            coherence_(k, l) = cplx(-0.5 * (escape_(k) + escape_(l)), -(energies_(k) - energies_(l)));
        }
    }

    drive_ = ds.A.matrix().adjoint() * ds.A.matrix();
    numbers_[0] = drive_;
    numbers_[1] = ds.B1.matrix().adjoint() * ds.B1.matrix();
    numbers_[2] = ds.B2.matrix().adjoint() * ds.B2.matrix();
    real_ = drive_.imag().cwiseAbs().maxCoeff() == 0.0;
    if (real_) drive_real_ = drive_.real();

    // Sectors for packing; collapse to one if the drive couples sectors.
    const int n_sectors =
        ds.sector.size() == static_cast<std::size_t>(n) ? *std::max_element(ds.sector.begin(), ds.sector.end()) + 1 : 1;
    sector_of_.assign(static_cast<std::size_t>(n), 0);
    if (n_sectors > 1) {
        for (Eigen::Index k = 0; k < n; ++k) sector_of_[k] = ds.sector[static_cast<std::size_t>(k)];
        for (Eigen::Index l = 0; l < n; ++l) {
            for (Eigen::Index k = 0; k < n; ++k) {
                if (sector_of_[k] != sector_of_[l] && drive_(k, l) != cplx(0.0, 0.0)) {
                    std::fill(sector_of_.begin(), sector_of_.end(), 0);
                    l = n;
                    break;
                }
            }
        }
    }
    sectors_.assign(static_cast<std::size_t>(*std::max_element(sector_of_.begin(), sector_of_.end()) + 1), {});
    for (Eigen::Index k = 0; k < n; ++k) sectors_[sector_of_[k]].push_back(k);

    if (!real_) return;  // packing needs a real H_s
    Eigen::Index offset = 0;
    for (const auto& idx : sectors_) {
        Sector sec;
        sec.offset = offset;
        sec.size = static_cast<Eigen::Index>(idx.size());
        sec.decay = coherence_(idx, idx).real();
        sec.phase = coherence_(idx, idx).imag();
        sec.drive = drive_real_(idx, idx);
        for (std::size_t c = 0; c < 3; ++c) sec.numbers[c] = numbers_[c](idx, idx).real();
        offset += 2 * sec.size * sec.size;
        packed_.push_back(std::move(sec));
    }
    packed_size_ = offset;
}

void DressedLiouvillian::apply(const CMatrix& rho, double f, CMatrix& out) const {
    if (rho.rows() != dim() || rho.cols() != dim()) {
        throw InvalidDimension("DressedLiouvillian::apply: dimension mismatch");
    }
    out.noalias() = coherence_.cwiseProduct(rho);
    out.diagonal().real().noalias() += rates_ * rho.diagonal().real();
    const double s = f * delta_omega_;
    if (s == 0.0) return;
    // -i s [M, rho] with K = M rho and rho M = K^dag (rho Hermitian):
    // for real M, K = M X + i M Y and -i s (K - K^dag) splits into
    // real part s (MY + (MY)^T) and imaginary part -s (MX - (MX)^T).
    if (real_) {
        const Eigen::MatrixXd KX = drive_real_ * rho.real();
        const Eigen::MatrixXd KY = drive_real_ * rho.imag();
        out.real() += s * (KY + KY.transpose());
        out.imag() -= s * (KX - KX.transpose());
    } else {
        const CMatrix K = drive_ * rho;
        out += cplx(0.0, -s) * (K - K.adjoint());
    }
}

CMatrix DressedLiouvillian::apply(const CMatrix& rho, double f) const {
    CMatrix out(dim(), dim());
    apply(rho, f, out);
    return out;
}

double DressedLiouvillian::drive_expectation(const CMatrix& x) const {
    if (real_) return drive_real_.cwiseProduct(x.real()).sum();
    return drive_.cwiseProduct(x.transpose()).sum().real();
}

double DressedLiouvillian::energy(const CMatrix& x, double f) const {
    double e = energies_.dot(x.diagonal().real());
    if (f != 0.0) e += f * delta_omega_ * drive_expectation(x);
    return e;
}

double DressedLiouvillian::number(const CMatrix& rho, Channel ch) const {
    const CMatrix& N = numbers_[static_cast<std::size_t>(ch)];
    return N.cwiseProduct(rho.transpose()).sum().real();
}

bool DressedLiouvillian::packable(const CMatrix& rho) const {
    if (!real_ || rho.rows() != dim() || rho.cols() != dim()) return false;
    for (Eigen::Index l = 0; l < rho.cols(); ++l) {
        for (Eigen::Index k = 0; k < rho.rows(); ++k) {
            if (sector_of_[k] != sector_of_[l] && rho(k, l) != cplx(0.0, 0.0)) return false;
        }
    }
    return true;
}

Eigen::VectorXd DressedLiouvillian::pack(const CMatrix& rho) const {
    if (!packable(rho)) throw ContractViolation("DressedLiouvillian::pack: state has cross-sector coherences");
    Eigen::VectorXd y(packed_size_);
    for (std::size_t s = 0; s < packed_.size(); ++s) {
        const Sector& sec = packed_[s];
        const Eigen::Index m = sec.size;
        const CMatrix b = rho(sectors_[s], sectors_[s]);
        Eigen::Map<Eigen::MatrixXd>(y.data() + sec.offset, m, m) = b.real();
        Eigen::Map<Eigen::MatrixXd>(y.data() + sec.offset + m * m, m, m) = b.imag();
    }
    return y;
}

CMatrix DressedLiouvillian::block(const Eigen::VectorXd& y, std::size_t s) const {
    const Sector& sec = packed_.at(s);
    const Eigen::Index m = sec.size;
    CMatrix b(m, m);
    b.real() = Eigen::Map<const Eigen::MatrixXd>(y.data() + sec.offset, m, m);
    b.imag() = Eigen::Map<const Eigen::MatrixXd>(y.data() + sec.offset + m * m, m, m);
    return b;
}

CMatrix DressedLiouvillian::unpack(const Eigen::VectorXd& y) const {
    if (y.size() != packed_size_) throw InvalidDimension("DressedLiouvillian::unpack: size mismatch");
    CMatrix rho = CMatrix::Zero(dim(), dim());
    for (std::size_t s = 0; s < packed_.size(); ++s) rho(sectors_[s], sectors_[s]) = block(y, s);
    return rho;
}

void DressedLiouvillian::apply_packed(const Eigen::VectorXd& y, double f, Eigen::VectorXd& out) const {
    if (y.size() != packed_size_ || packed_size_ == 0) {
        throw InvalidDimension("DressedLiouvillian::apply_packed: size mismatch");
    }
    out.resize(packed_size_);
    // Populations feed the Pauli gain across all sectors.
    Eigen::VectorXd pop(dim());
    for (std::size_t s = 0; s < packed_.size(); ++s) {
        const Sector& sec = packed_[s];
        for (Eigen::Index k = 0; k < sec.size; ++k) pop(sectors_[s][k]) = y(sec.offset + k * (sec.size + 1));
    }
    const Eigen::VectorXd gain = rates_ * pop;

    const double drive = f * delta_omega_;
    for (std::size_t s = 0; s < packed_.size(); ++s) {
        const Sector& sec = packed_[s];
        const Eigen::Index m = sec.size;
        const Eigen::Map<const Eigen::MatrixXd> X(y.data() + sec.offset, m, m);
        const Eigen::Map<const Eigen::MatrixXd> Y(y.data() + sec.offset + m * m, m, m);
        Eigen::Map<Eigen::MatrixXd> OX(out.data() + sec.offset, m, m);
        Eigen::Map<Eigen::MatrixXd> OY(out.data() + sec.offset + m * m, m, m);
        // (decay + i phase) * (X + i Y)
        OX.array() = sec.decay.array() * X.array() - sec.phase.array() * Y.array();
        OY.array() = sec.decay.array() * Y.array() + sec.phase.array() * X.array();
        for (Eigen::Index k = 0; k < m; ++k) OX(k, k) += gain(sectors_[s][k]);
        if (drive != 0.0) {
            // X and Y are adjacent, so [M X, M Y] is a single product.
            const Eigen::Map<const Eigen::MatrixXd> XY(y.data() + sec.offset, m, 2 * m);
            const Eigen::MatrixXd K = sec.drive * XY;
            const auto KX = K.leftCols(m);
            const auto KY = K.rightCols(m);
            OX.noalias() += drive * (KY + KY.transpose());
            OY.noalias() -= drive * (KX - KX.transpose());
        }
    }
}

double DressedLiouvillian::trace_packed(const Eigen::VectorXd& y) const {
    double tr = 0.0;
    for (const Sector& sec : packed_) {
        tr += Eigen::Map<const Eigen::MatrixXd>(y.data() + sec.offset, sec.size, sec.size).trace();
    }
    return tr;
}

double DressedLiouvillian::drive_expectation_packed(const Eigen::VectorXd& y) const {
    double e = 0.0;
    for (const Sector& sec : packed_) {
        e += sec.drive.cwiseProduct(Eigen::Map<const Eigen::MatrixXd>(y.data() + sec.offset, sec.size, sec.size))
                 .sum();
    }
    return e;
}

double DressedLiouvillian::energy_packed(const Eigen::VectorXd& y, double f) const {
    double e = 0.0;
    for (std::size_t s = 0; s < packed_.size(); ++s) {
        const Sector& sec = packed_[s];
        for (Eigen::Index k = 0; k < sec.size; ++k) {
            e += energies_(sectors_[s][k]) * y(sec.offset + k * (sec.size + 1));
        }
    }
    if (f != 0.0) e += f * delta_omega_ * drive_expectation_packed(y);
    return e;
}

double DressedLiouvillian::number_packed(const Eigen::VectorXd& y, Channel ch) const {
    // Tr[N rho] with N real symmetric: the imaginary (antisymmetric) part drops out.
    double n = 0.0;
    for (const Sector& sec : packed_) {
        n += sec.numbers[static_cast<std::size_t>(ch)]
                 .cwiseProduct(Eigen::Map<const Eigen::MatrixXd>(y.data() + sec.offset, sec.size, sec.size))
                 .sum();
    }
    return n;
}

double DressedLiouvillian::hermiticity_residual_packed(const Eigen::VectorXd& y) const {
    double r = 0.0;
    for (const Sector& sec : packed_) {
        const Eigen::Index m = sec.size;
        const Eigen::Map<const Eigen::MatrixXd> X(y.data() + sec.offset, m, m);
        const Eigen::Map<const Eigen::MatrixXd> Y(y.data() + sec.offset + m * m, m, m);
        r = std::max(r, (X - X.transpose()).cwiseAbs().maxCoeff());
        r = std::max(r, (Y + Y.transpose()).cwiseAbs().maxCoeff());
    }
    return r;
}

Operator DressedLiouvillian::hamiltonian(double f) const {
    CMatrix h = (f * delta_omega_) * drive_;
    h.diagonal().real() += energies_;
    return Operator(std::move(h), true);
}

} // namespace qfe
