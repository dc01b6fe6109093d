#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace abcfs {

class Error : public std::runtime_error
{
public:
    using std::runtime_error::runtime_error;
    virtual const char* kind() const noexcept { return "error"; }
};

// Malformed input data: unreadable files, ragged rows, bad labels.
class DataError : public Error
{
public:
    using Error::Error;
    const char* kind() const noexcept override { return "data"; }
};

// A metric whose denominator is zero.
class MetricError : public Error
{
public:
    using Error::Error;
    const char* kind() const noexcept override { return "metric"; }
};

// Invalid configuration. Carries every violation found, not just the first.
class ConfigError : public Error
{
public:
    explicit ConfigError(std::vector<std::string> violations);
    const std::vector<std::string>& violations() const noexcept { return violations_; }
    const char* kind() const noexcept override { return "config"; }

private:
    std::vector<std::string> violations_;
};

// Broken invariant inside the library. Always a defect.
class InternalError : public Error
{
public:
    using Error::Error;
    const char* kind() const noexcept override { return "internal"; }
};

class IoError : public Error
{
public:
    using Error::Error;
    const char* kind() const noexcept override { return "io"; }
};

}  // namespace abcfs
