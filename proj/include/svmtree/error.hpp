#pragma once

#include <stdexcept>
#include <string>

namespace svmtree {

enum class ErrorCode {
    invalid_argument,
    io,
    parse,
    dimension_mismatch,
    build_failure,
    unknown_strategy,
    format,
};

// Every failure raised by the library carries a code so the C boundary can
// map it to a status without string matching.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& what) : std::runtime_error(what), code_(code) {}
    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& what) { throw Error(code, what); }

inline void require(bool ok, const std::string& what) {
    if (!ok) fail(ErrorCode::invalid_argument, what);
}

}  // namespace svmtree
