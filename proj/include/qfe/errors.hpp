// errors.hpp — exception types shared by the simulator modules

#pragma once

#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace qfe {

/// Operator or truncation dimensions that do not fit together.
class InvalidDimension : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// A physical parameter set violating its invariants. Each entry of
/// `violations()` is prefixed with the offending field path.
class InvalidParameter : public std::invalid_argument {
public:
    explicit InvalidParameter(std::vector<std::string> violations)
        : std::invalid_argument(join(violations)), violations_(std::move(violations)) {}
    const std::vector<std::string>& violations() const noexcept { return violations_; }

private:
    static std::string join(const std::vector<std::string>& v) {
        std::string out;
        for (const auto& s : v) {
            if (!out.empty()) out += "; ";
            out += s;
        }
        return out;
    }
    std::vector<std::string> violations_;
};

/// Precondition of a numerical routine not met (e.g. non-Hermitian input).
class ContractViolation : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

/// No interior minimum of a level gap in the scanned range, or the minimum
/// is a genuine (degenerate) crossing rather than an avoided one.
class NoCrossing : public std::runtime_error {
public:
    NoCrossing(const std::string& what, bool degenerate, double omega)
        : std::runtime_error(what), degenerate_(degenerate), omega_(omega) {}
    bool degenerate() const noexcept { return degenerate_; }
    double omega() const noexcept { return omega_; }

private:
    bool degenerate_;
    double omega_;
};

/// Non-finite density matrix during time integration.
class Divergence : public std::runtime_error {
public:
    Divergence(const std::string& what, double t) : std::runtime_error(what), t_(t) {}
    double time() const noexcept { return t_; }

private:
    double t_;
};

/// Efficiency requested for a cycle that absorbed no heat.
class NoHeatInput : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// Thermal occupation requested for a non-positive gap.
class InvalidGap : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

} // namespace qfe
