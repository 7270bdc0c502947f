#pragma once

#include <complex>
#include <stdexcept>
#include <string>

namespace besovtk {

using cplx = std::complex<double>;

// Error taxonomy. Quadrature non-convergence is deliberately NOT an
// exception (it is a value-level flag on IntegralValue); everything here
// represents a contract violation or an unsupported request.

struct malformed_curve_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct window_insufficient_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct injectivity_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct inversion_failure : std::runtime_error {
    cplx last_iterate;
    inversion_failure(const std::string& msg, cplx last)
        : std::runtime_error(msg), last_iterate(last) {}
};

struct unsupported_domain_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct singularity_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct truncation_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct divergence_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct monotonicity_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct domain_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace besovtk
