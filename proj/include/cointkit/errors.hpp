// errors.hpp
// Exception taxonomy shared by all cointkit modules.

#pragma once

#include <stdexcept>
#include <string>

namespace cointkit {

class error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Input values outside the mathematical domain of an operation
/// (nonpositive prices passed to a log transform, negative quantiles, ...).
class domain_error : public error {
public:
    using error::error;
};

/// Too few observations for the requested operation.
class insufficient_data_error : public error {
public:
    using error::error;
};

/// Design matrix numerically rank deficient.
class collinearity_error : public error {
public:
    using error::error;
};

/// Zero-variance series, perfect fits, and other degenerate inputs.
class degenerate_error : public error {
public:
    using error::error;
};

/// Invalid caller-supplied configuration (unknown markets, bad trims, ...).
class configuration_error : public error {
public:
    using error::error;
};

/// Singular or unidentified restriction systems.
class restriction_error : public error {
public:
    using error::error;
};

/// Cointegration rank outside the admissible range.
class rank_error : public error {
public:
    using error::error;
};

/// File ingestion / emission failures.
class io_error : public error {
public:
    using error::error;
};

/// Monte Carlo harness failure budget exceeded.
class harness_error : public error {
public:
    using error::error;
};

} // namespace cointkit
