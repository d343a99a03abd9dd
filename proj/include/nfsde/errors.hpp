#ifndef NFSDE_ERRORS_HPP
#define NFSDE_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace nfsde {

// Structural problems in a spec or config (bad field values, dimension
// mismatches, grid misalignment). Carries a human-readable field path.
class validation_error : public std::runtime_error {
public:
    explicit validation_error(const std::string& msg) : std::runtime_error(msg) {}
};

// Config file could not be parsed or contains unknown keys.
class config_error : public std::runtime_error {
public:
    explicit config_error(const std::string& msg) : std::runtime_error(msg) {}
};

// Numerical failure inside the solver (neutral fixed point did not
// converge within the iteration budget).
class solver_error : public std::runtime_error {
public:
    explicit solver_error(const std::string& msg) : std::runtime_error(msg) {}
};

// The bounded-Lipschitz LP was asked to handle more support points than
// the configured cap.
class lp_cap_error : public std::runtime_error {
public:
    explicit lp_cap_error(const std::string& msg) : std::runtime_error(msg) {}
};

// Internal evaluation failure (e.g. the two Mittag-Leffler regimes
// disagree near the switch after a precision retry).
class eval_error : public std::runtime_error {
public:
    explicit eval_error(const std::string& msg) : std::runtime_error(msg) {}
};

} // namespace nfsde

#endif
