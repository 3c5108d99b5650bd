#pragma once

#include <stdexcept>
#include <string>

namespace sfbf {

/// Error categories carried by sfbf::error and mirrored by the C API status codes.
enum class errc : int {
    ok = 0,
    invalid_argument = 1,
    dimension_mismatch = 2,
    domain_violation = 3,  // parameter outside the model domain, non-finite objective
    singular = 4,          // pole of b(c,e0), singular information matrix
    nonconvergence = 5,
    numeric = 6,           // tolerance not reached, non-PSD covariance
    io = 7,
};

class error : public std::runtime_error {
public:
    error(errc code, const std::string& what) : std::runtime_error(what), code_(code) {}
    errc code() const noexcept { return code_; }

private:
    errc code_;
};

[[noreturn]] inline void raise(errc code, const std::string& what) { throw error(code, what); }

inline void require(bool cond, errc code, const std::string& what) {
    if (!cond) raise(code, what);
}

}  // namespace sfbf
