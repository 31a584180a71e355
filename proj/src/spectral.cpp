// spectral.cpp — block-aware Hermitian eigensolver and level-crossing analysis

#include "qfe/spectral.hpp"

#include "qfe/errors.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numeric>
#include <ostream>
#include <string>
#include <thread>
#include <tuple>

namespace qfe {

namespace {

struct UnionFind {
    std::vector<Eigen::Index> parent;
    explicit UnionFind(Eigen::Index n) : parent(static_cast<std::size_t>(n)) {
        std::iota(parent.begin(), parent.end(), Eigen::Index{0});
    }
    Eigen::Index find(Eigen::Index x) {
        while (parent[x] != x) {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        return x;
    }
    void unite(Eigen::Index a, Eigen::Index b) {
        a = find(a);
        b = find(b);
        if (a != b) parent[std::max(a, b)] = std::min(a, b);
    }
};

// Index lists of the connected components of the nonzero pattern, ordered by
// their smallest member.
std::vector<std::vector<Eigen::Index>> pattern_blocks(const CMatrix& m) {
    const Eigen::Index n = m.rows();
    UnionFind uf(n);
    for (Eigen::Index c = 0; c < n; ++c) {
        for (Eigen::Index r = c + 1; r < n; ++r) {
            if (m(r, c) != cplx(0.0, 0.0) || m(c, r) != cplx(0.0, 0.0)) uf.unite(r, c);
        }
    }
    std::vector<std::vector<Eigen::Index>> blocks;
    std::vector<Eigen::Index> block_of(static_cast<std::size_t>(n), -1);
    for (Eigen::Index k = 0; k < n; ++k) {
        const Eigen::Index root = uf.find(k);
        if (block_of[root] < 0) {
            block_of[root] = static_cast<Eigen::Index>(blocks.size());
            blocks.emplace_back();
        }
        blocks[block_of[root]].push_back(k);
    }
    return blocks;
}

void require_hermitian(const Operator& H, const char* who) {
    if (H.dim() == 0) throw InvalidDimension(std::string(who) + ": empty operator");
    const double scale = std::max(1.0, H.max_abs());
    if (H.hermiticity_residual() > 1e-10 * scale) {
        throw ContractViolation(std::string(who) + ": operator is not Hermitian");
    }
}

struct BlockSolution {
    Eigen::VectorXd values;
    CMatrix vectors;  // columns, block-local rows
};

BlockSolution solve_block(const CMatrix& sub, bool want_vectors) {
    const auto options = want_vectors ? Eigen::ComputeEigenvectors : Eigen::EigenvaluesOnly;
    BlockSolution out;
    if (sub.imag().cwiseAbs().maxCoeff() == 0.0) {
        const Eigen::MatrixXd re = sub.real();
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(re, options);
        if (solver.info() != Eigen::Success) throw std::runtime_error("eigensolver failed");
        out.values = solver.eigenvalues();
        if (want_vectors) out.vectors = solver.eigenvectors().cast<cplx>();
    } else {
        Eigen::SelfAdjointEigenSolver<CMatrix> solver(sub, options);
        if (solver.info() != Eigen::Success) throw std::runtime_error("eigensolver failed");
        out.values = solver.eigenvalues();
        if (want_vectors) out.vectors = solver.eigenvectors();
    }
    return out;
}

void fix_phase(Eigen::Ref<CVector> v) {
    Eigen::Index at = 0;
    v.cwiseAbs().maxCoeff(&at);
    const double mag = std::abs(v(at));
    if (mag == 0.0) return;
    v *= std::conj(v(at)) / mag;
    v(at) = cplx(v(at).real(), 0.0);
}

std::string fmt17(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

} // namespace

int EigenSystem::sector_count() const noexcept {
    if (sector.empty()) return 0;
    return *std::max_element(sector.begin(), sector.end()) + 1;
}

double EigenSystem::reconstruction_residual(const Operator& H) const {
    const CMatrix r = H.matrix() * states - states * energies.cast<cplx>().asDiagonal();
    return r.cwiseAbs().maxCoeff();
}

double EigenSystem::orthonormality_residual() const {
    const CMatrix r = states.adjoint() * states - CMatrix::Identity(dim(), dim());
    return r.cwiseAbs().maxCoeff();
}

EigenSystem eig_hermitian(const Operator& H) {
    require_hermitian(H, "eig_hermitian");
    const CMatrix& m = H.matrix();
    const Eigen::Index n = m.rows();
    const auto blocks = pattern_blocks(m);

    struct Entry {
        double energy;
        int block;
        Eigen::Index local;
    };
    std::vector<Entry> entries;
    entries.reserve(static_cast<std::size_t>(n));
    std::vector<BlockSolution> solutions;
    solutions.reserve(blocks.size());
    for (std::size_t b = 0; b < blocks.size(); ++b) {
        const auto& idx = blocks[b];
        solutions.push_back(solve_block(m(idx, idx), true));
        for (Eigen::Index k = 0; k < solutions.back().values.size(); ++k) {
            entries.push_back({solutions.back().values(k), static_cast<int>(b), k});
        }
    }
    std::stable_sort(entries.begin(), entries.end(), [](const Entry& a, const Entry& b) {
        return std::tie(a.energy, a.block, a.local) < std::tie(b.energy, b.block, b.local);
    });

    EigenSystem es;
    es.energies.resize(n);
    es.states = CMatrix::Zero(n, n);
    es.sector.resize(static_cast<std::size_t>(n));
    for (Eigen::Index col = 0; col < n; ++col) {
        const Entry& e = entries[static_cast<std::size_t>(col)];
        es.energies(col) = e.energy;
        es.sector[static_cast<std::size_t>(col)] = e.block;
        const auto& idx = blocks[static_cast<std::size_t>(e.block)];
        const CVector local = solutions[static_cast<std::size_t>(e.block)].vectors.col(e.local);
        for (std::size_t r = 0; r < idx.size(); ++r) {
            es.states(idx[r], col) = local(static_cast<Eigen::Index>(r));
        }
        fix_phase(es.states.col(col));
    }
    return es;
}

namespace {

// Ascending eigenvalues with the sector of each.
std::pair<Eigen::VectorXd, std::vector<int>> sorted_levels(const Operator& H) {
    const CMatrix& m = H.matrix();
    std::vector<std::pair<double, int>> all;
    all.reserve(static_cast<std::size_t>(m.rows()));
    const auto blocks = pattern_blocks(m);
    for (std::size_t b = 0; b < blocks.size(); ++b) {
        const BlockSolution s = solve_block(m(blocks[b], blocks[b]), false);
        for (Eigen::Index k = 0; k < s.values.size(); ++k) all.emplace_back(s.values(k), static_cast<int>(b));
    }
    std::sort(all.begin(), all.end());
    std::pair<Eigen::VectorXd, std::vector<int>> out;
    out.first.resize(static_cast<Eigen::Index>(all.size()));
    for (std::size_t k = 0; k < all.size(); ++k) {
        out.first(static_cast<Eigen::Index>(k)) = all[k].first;
        out.second.push_back(all[k].second);
    }
    return out;
}

} // namespace

Eigen::VectorXd eigenvalues_hermitian(const Operator& H) {
    require_hermitian(H, "eigenvalues_hermitian");
    return sorted_levels(H).first;
}

std::vector<double> linspace(double lo, double hi, int points) {
    if (points < 1) throw std::invalid_argument("linspace: need at least one point");
    std::vector<double> out(static_cast<std::size_t>(points));
    if (points == 1) {
        out[0] = lo;
        return out;
    }
    const double step = (hi - lo) / (points - 1);
    for (int k = 0; k < points; ++k) out[static_cast<std::size_t>(k)] = lo + step * k;
    out.back() = hi;
    return out;
}

SpectrumScan scan_spectrum(const ModelParams& base, std::span<const double> omega_grid,
                           const TruncationSpec& spec, int n_levels, int threads) {
    if (omega_grid.empty()) throw std::invalid_argument("scan_spectrum: empty frequency grid");
    for (std::size_t k = 0; k < omega_grid.size(); ++k) {
        if (!(omega_grid[k] > 0.0) || (k > 0 && !(omega_grid[k] > omega_grid[k - 1]))) {
            throw std::invalid_argument("scan_spectrum: grid must be positive and strictly increasing");
        }
    }
    spec.validate();
    if (n_levels < 1 || n_levels > spec.total()) {
        throw std::invalid_argument("scan_spectrum: n_levels outside [1, D]");
    }
    base.validate();

    SpectrumScan scan;
    scan.n_levels = n_levels;
    scan.omega.assign(omega_grid.begin(), omega_grid.end());
    scan.levels.resize(omega_grid.size());
    scan.sectors.resize(omega_grid.size());

    // H_s = H0(omega_c) + H_I, and H_I does not depend on omega_c.
    const Operator hi = build_HI(base, spec);
    const auto solve = [&](std::size_t k) {
        ModelParams p = base;
        p.omega_c = omega_grid[k];
        const Operator h = build_H0(p, spec) + hi;
        auto [values, sectors] = sorted_levels(h);
        scan.levels[k] = values.head(n_levels);
        sectors.resize(static_cast<std::size_t>(n_levels));
        scan.sectors[k] = std::move(sectors);
    };

    const std::size_t workers =
        std::clamp<std::size_t>(static_cast<std::size_t>(std::max(threads, 1)), 1, omega_grid.size());
    if (workers == 1) {
        for (std::size_t k = 0; k < omega_grid.size(); ++k) solve(k);
        return scan;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    std::exception_ptr failure;
    std::atomic<bool> failed{false};
    for (std::size_t w = 0; w < workers; ++w) {
        pool.emplace_back([&] {
            for (std::size_t k = next++; k < omega_grid.size() && !failed; k = next++) {
                try {
                    solve(k);
                } catch (...) {
                    if (!failed.exchange(true)) failure = std::current_exception();
                }
            }
        });
    }
    for (auto& t : pool) t.join();
    if (failure) std::rethrow_exception(failure);
    return scan;
}

CrossingReport find_avoided_crossing(const SpectrumScan& scan, std::pair<int, int> level_pair) {
    const auto [i, j] = level_pair;
    if (scan.omega.size() < 3) throw std::invalid_argument("find_avoided_crossing: need >= 3 grid points");
    if (i < 0 || j != i + 1 || j >= scan.n_levels) {
        throw std::invalid_argument("find_avoided_crossing: level pair must be (i, i+1) within the scan");
    }
    const std::size_t n = scan.omega.size();
    std::vector<double> gap(n);
    for (std::size_t k = 0; k < n; ++k) gap[k] = scan.levels[k](j) - scan.levels[k](i);
    const auto kmin = static_cast<std::size_t>(std::min_element(gap.begin(), gap.end()) - gap.begin());
    const std::pair range{scan.omega.front(), scan.omega.back()};
    if (kmin == 0 || kmin + 1 == n) {
        throw NoCrossing("no interior gap minimum for levels (" + std::to_string(i) + "," +
                             std::to_string(j) + ") in [" + fmt17(range.first) + ", " +
                             fmt17(range.second) + "]",
                         false, scan.omega[kmin]);
    }

    const double x0 = scan.omega[kmin - 1], x1 = scan.omega[kmin], x2 = scan.omega[kmin + 1];
    const double y0 = gap[kmin - 1], y1 = gap[kmin], y2 = gap[kmin + 1];
    double x = x1;
    double y = y1;
    // Vertex of the parabola through the three samples (non-uniform grid safe).
    const double d01 = (y1 - y0) / (x1 - x0);
    const double d12 = (y2 - y1) / (x2 - x1);
    const double curv = (d12 - d01) / (x2 - x0);
    if (curv > 0.0) {
        const double xv = 0.5 * (x0 + x1) - d01 / (2.0 * curv);
        if (xv > x0 && xv < x2) {
            x = xv;
            y = y0 + d01 * (x - x0) + curv * (x - x0) * (x - x1);  // Newton form
        }
    }
    const bool unconnected = kmin < scan.sectors.size() && !scan.sectors[kmin].empty() &&
                             scan.sectors[kmin][i] != scan.sectors[kmin][j];
    if (unconnected || y1 < kDegenerateGap || y < kDegenerateGap) {
        throw NoCrossing("levels (" + std::to_string(i) + "," + std::to_string(j) +
                             ") close at omega_c = " + fmt17(x) + " (degenerate crossing)",
                         true, x);
    }
    return CrossingReport{x, y, level_pair, range};
}

CrossingReport locate_resonance(const SpectrumScan& scan, double target_omega) {
    const CrossingReport* best = nullptr;
    std::vector<CrossingReport> found;
    found.reserve(static_cast<std::size_t>(scan.n_levels));
    bool saw_degenerate = false;
    double degenerate_at = std::numeric_limits<double>::quiet_NaN();
    for (int i = 0; i + 1 < scan.n_levels; ++i) {
        try {
            found.push_back(find_avoided_crossing(scan, {i, i + 1}));
        } catch (const NoCrossing& e) {
            if (e.degenerate() &&
                (!saw_degenerate || std::abs(e.omega() - target_omega) < std::abs(degenerate_at - target_omega))) {
                saw_degenerate = true;
                degenerate_at = e.omega();
            }
        }
    }
    for (const auto& c : found) {
        if (!best || std::abs(c.omega_eff - target_omega) < std::abs(best->omega_eff - target_omega)) {
            best = &c;
        }
    }
    if (!best) {
        if (saw_degenerate) {
            throw NoCrossing("only degenerate crossings near omega_c = " + fmt17(target_omega), true,
                             degenerate_at);
        }
        throw NoCrossing("no avoided crossing in [" + fmt17(scan.omega.front()) + ", " +
                             fmt17(scan.omega.back()) + "]",
                         false, target_omega);
    }
    return *best;
}

Resonances locate_resonances(const SpectrumScan& scan, const ModelParams& params) {
    return Resonances{locate_resonance(scan, 0.5 * params.omega_1),
                      locate_resonance(scan, 0.5 * params.omega_2)};
}

CMatrix transition_amplitudes(const EigenSystem& es, const Operator& X) {
    if (X.dim() != es.dim()) throw InvalidDimension("transition_amplitudes: dimension mismatch");
    return es.states.adjoint() * X.matrix() * es.states;
}

void write_scan_csv(std::ostream& os, const SpectrumScan& scan) {
    os << "omega_c";
    for (int k = 0; k < scan.n_levels; ++k) os << ",E_" << k;
    os << '\n';
    for (std::size_t p = 0; p < scan.omega.size(); ++p) {
        os << fmt17(scan.omega[p]);
        for (int k = 0; k < scan.n_levels; ++k) os << ',' << fmt17(scan.levels[p](k));
        os << '\n';
    }
}

} // namespace qfe
