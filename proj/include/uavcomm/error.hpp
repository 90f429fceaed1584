#ifndef UAVCOMM_ERROR_HPP
#define UAVCOMM_ERROR_HPP

#include <stdexcept>
#include <string>

namespace uavcomm {

/// Argument outside the mathematical domain of an operation
/// (non-positive distance, frequency, speed, ...).
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// Malformed or inconsistent configuration.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// The requested mission cannot be flown under the given speed limit.
class InfeasibleError : public std::runtime_error {
public:
    InfeasibleError(const std::string& what, double minimum_speed)
        : std::runtime_error(what), minimum_speed_(minimum_speed)
    {
    }

    double minimum_speed() const noexcept { return minimum_speed_; }

private:
    double minimum_speed_;
};

inline void require_positive(double value, const char* name)
{
    if (!(value > 0.0)) {
        throw DomainError(std::string(name) + " must be positive, got " + std::to_string(value));
    }
}

inline void require_non_negative(double value, const char* name)
{
    if (!(value >= 0.0)) {
        throw DomainError(std::string(name) + " must be non-negative, got " + std::to_string(value));
    }
}

} // namespace uavcomm

#endif
