#pragma once

#include <stdexcept>
#include <string>

namespace thzloc {

/// A configuration field failed validation or could not be parsed.
class ConfigError : public std::runtime_error {
public:
    ConfigError(std::string field, const std::string& message)
        : std::runtime_error(field.empty() ? message : field + ": " + message), field_(std::move(field)) {}

    const std::string& field() const noexcept { return field_; }

private:
    std::string field_;
};

/// Anchor geometry cannot determine a position (too few ranges, parallel rays).
class GeometryError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace thzloc
