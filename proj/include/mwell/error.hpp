#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace mwell {

/// Failure categories shared by every module. The CLI maps them onto its
/// machine-readable error record.
enum class ErrorKind {
    domain,         // argument outside the documented domain
    grid_mismatch,  // operands live on different grids
    overflow,       // result not representable in double precision
    construction,   // a model could not be built (nodes, positivity, ...)
    normalization,  // a normalization integral failed its tolerance
    convergence,    // an iterative method ran out of iterations
    norm_drift,     // propagation lost unitarity
    unresolved,     // spectral level not isolated
    io,
    config,
};

inline std::string_view to_string(ErrorKind kind)
{
    switch (kind) {
    case ErrorKind::domain: return "domain";
    case ErrorKind::grid_mismatch: return "grid_mismatch";
    case ErrorKind::overflow: return "overflow";
    case ErrorKind::construction: return "construction";
    case ErrorKind::normalization: return "normalization";
    case ErrorKind::convergence: return "convergence";
    case ErrorKind::norm_drift: return "norm_drift";
    case ErrorKind::unresolved: return "unresolved";
    case ErrorKind::io: return "io";
    case ErrorKind::config: return "config";
    }
    return "unknown";
}

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, std::string module, const std::string& what)
        : std::runtime_error(what), kind_(kind), module_(std::move(module))
    {
    }

    ErrorKind kind() const noexcept { return kind_; }
    const std::string& module() const noexcept { return module_; }

private:
    ErrorKind kind_;
    std::string module_;
};

namespace detail {

[[noreturn]] inline void fail(ErrorKind kind, const char* module, const std::string& what)
{
    throw Error(kind, module, what);
}

inline void require(bool ok, ErrorKind kind, const char* module, const std::string& what)
{
    if (!ok)
        fail(kind, module, what);
}

} // namespace detail
} // namespace mwell
