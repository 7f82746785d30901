#pragma once

#include <stdexcept>
#include <string>

namespace ale {

/// Input outside the mathematical domain of an operation.
struct domain_error : std::domain_error {
    explicit domain_error(const std::string& what) : std::domain_error(what) {}
};

/// Evaluation requested exactly at (or numerically indistinguishable from) a pole.
struct pole_error : std::domain_error {
    explicit pole_error(const std::string& what) : std::domain_error(what) {}
};

/// Offset-regime operation called with an offset too large for the regime.
struct out_of_regime_error : std::domain_error {
    explicit out_of_regime_error(const std::string& what) : std::domain_error(what) {}
};

/// Loewner ODE trajectory was absorbed into the unit circle.
struct swallowed_error : std::runtime_error {
    explicit swallowed_error(const std::string& what) : std::runtime_error(what) {}
};

/// Invalid simulation configuration.
struct config_error : std::runtime_error {
    explicit config_error(const std::string& what) : std::runtime_error(what) {}
};

/// Not enough data for a statistical operation.
struct statistics_error : std::runtime_error {
    explicit statistics_error(const std::string& what) : std::runtime_error(what) {}
};

} // namespace ale
