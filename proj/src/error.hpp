#pragma once

#include <stdexcept>
#include <string>

namespace sqd {

enum class Errc {
    invalid_argument = 1,
    validation = 2,
    unsupported = 3,
    numeric = 4,
    internal = 5,
};

class Error : public std::runtime_error {
public:
    Error(Errc code, const std::string& what) : std::runtime_error(what), code_(code) {}
    Errc code() const { return code_; }

private:
    Errc code_;
};

}  // namespace sqd
