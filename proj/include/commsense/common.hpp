#pragma once

#include <complex>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace commsense {

using cdouble = std::complex<double>;
using Eigen::MatrixXcd;
using Eigen::MatrixXd;
using Eigen::VectorXcd;
using Eigen::VectorXd;

// Every stage failure maps onto one of these so the CLI can tag the stage
// that raised it and exit nonzero.
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct ShapeError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct RangeError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct SingularSystemError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct PriorError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct InsufficientDataError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct EmptyInputError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct LabelError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct UndefinedMetricError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct ParseError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct LengthError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

} // namespace commsense
