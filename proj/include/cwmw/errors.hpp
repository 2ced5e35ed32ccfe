#pragma once

#include <stdexcept>
#include <string>

namespace cwmw {

// Base class for all library errors.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

// Malformed input: bad CSV rows, bad config files, invalid arguments.
class InputError : public Error {
public:
    explicit InputError(const std::string& what) : Error(what) {}
};

// The estimand is undefined: no cluster pair contributes a cross-group
// comparison (the expected comparison count is zero).
class NoComparisonsError : public Error {
public:
    explicit NoComparisonsError(const std::string& what) : Error(what) {}
};

// A variance estimate is exactly zero, or a resampling scheme could not
// produce a usable draw, so no test statistic can be formed.
class DegenerateVarianceError : public Error {
public:
    explicit DegenerateVarianceError(const std::string& what) : Error(what) {}
};

// A Monte Carlo variance estimate came out nonpositive. The difference
// construction behind the Hoffman-type estimators allows this to happen;
// such a value must never be turned into a test statistic.
class NegativeVarianceError : public Error {
public:
    explicit NegativeVarianceError(const std::string& what) : Error(what) {}
};

// A covariance matrix failed its positive-definiteness check.
class NotPositiveDefiniteError : public InputError {
public:
    explicit NotPositiveDefiniteError(const std::string& what) : InputError(what) {}
};

} // namespace cwmw
