#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace mobhoro {

// Values double as process exit codes for the command-line front end.
enum class Errc : int {
    validation = 2,
    capacity = 3,
    precision = 4,
    domain = 5,
    horizon = 6,
    range = 7,
    io = 8,
    unsupported = 9,
    quadrature = 10,
};

std::string_view errc_name(Errc code) noexcept;

class Error : public std::runtime_error {
public:
    Error(Errc code, const std::string& what) : std::runtime_error(what), code_(code) {}
    Errc code() const noexcept { return code_; }

private:
    Errc code_;
};

[[noreturn]] inline void fail(Errc code, const std::string& what) { throw Error(code, what); }

inline void require(bool ok, Errc code, const std::string& what)
{
    if (!ok) fail(code, what);
}

}  // namespace mobhoro
