#pragma once

#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace fracmix {

enum class ErrorCode {
    InvalidOrder,
    UnsupportedRegion,
    RegionTooSmall,
    NonPositiveR,
    SingularPotential,
    NonPositivePotential,
    ResolutionTooLow,
    GridMismatch,
    IllPosedMode,
    NotIllPosed,
    InvalidArgument,
    InputError,
};

std::string_view to_string(ErrorCode code);

/// Base exception for every module. `code()` names the violated precondition.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& what)
        : std::runtime_error(what), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

/// Raised by reconstruction when some |Delta_k| falls below the abort floor.
/// Carries the offending 1-based mode indices.
class IllPosedModeError : public Error {
public:
    IllPosedModeError(std::vector<int> modes, const std::string& what)
        : Error(ErrorCode::IllPosedMode, what), modes_(std::move(modes)) {}

    const std::vector<int>& modes() const noexcept { return modes_; }

private:
    std::vector<int> modes_;
};

[[noreturn]] void fail(ErrorCode code, const std::string& what);

inline void require(bool cond, ErrorCode code, const std::string& what) {
    if (!cond) fail(code, what);
}

}  // namespace fracmix
