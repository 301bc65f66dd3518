#pragma once

#include <stdexcept>
#include <string>

namespace garmanet {

// Error taxonomy mirrored by the CLI exit codes: config errors exit 1,
// data errors exit 2, numerical failures exit 3.
class config_error : public std::runtime_error {
public:
    explicit config_error(const std::string& msg) : std::runtime_error(msg) {}
};

class data_error : public std::runtime_error {
public:
    explicit data_error(const std::string& msg) : std::runtime_error(msg) {}
};

class numeric_error : public std::runtime_error {
public:
    explicit numeric_error(const std::string& msg) : std::runtime_error(msg) {}
};

} // namespace garmanet
