// errors.hpp: exception types shared by the dho library

#pragma once

#include <stdexcept>
#include <string>

namespace dho {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Argument outside the domain of a function (n(0), unphysical covariance, ...).
struct DomainError : Error {
    using Error::Error;
};

// Potential is not confining: omega^2 <= 0 after renormalisation.
struct UnconfinedError : DomainError {
    using DomainError::DomainError;
};

struct QuadratureError : Error {
    QuadratureError(const std::string& what, double estimate)
        : Error(what + " (error estimate " + std::to_string(estimate) + ")"), error_estimate(estimate) {}
    double error_estimate;
};

struct UnstableError : Error {
    using Error::Error;
};

struct DegenerateRootsError : Error {
    using Error::Error;
};

struct IntegrationError : Error {
    IntegrationError(const std::string& what, double t)
        : Error(what + " (last good time " + std::to_string(t) + ")"), last_good_time(t) {}
    double last_good_time;
};

struct ConfigError : Error {
    ConfigError(const std::string& what, int line_no = 0, std::string key_name = {})
        : Error(format(what, line_no, key_name)), line(line_no), key(std::move(key_name)) {}
    int line;
    std::string key;

private:
    static std::string format(const std::string& what, int line_no, const std::string& key_name) {
        std::string msg;
        if (line_no > 0) msg += "line " + std::to_string(line_no) + ": ";
        if (!key_name.empty()) msg += "key '" + key_name + "': ";
        return msg + what;
    }
};

} // namespace dho
