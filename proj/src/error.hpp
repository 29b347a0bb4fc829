#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace pogest {

// Error taxonomy mirrored by the C API status codes and the CLI exit codes:
// validation -> 2, io/runtime -> 3.
enum class ErrorKind { validation, io, runtime };

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, std::string msg)
        : std::runtime_error(std::move(msg)), kind_(kind) {}

    ErrorKind kind() const noexcept { return kind_; }

    [[noreturn]] static void validation(std::string msg) { throw Error(ErrorKind::validation, std::move(msg)); }
    [[noreturn]] static void io(std::string msg) { throw Error(ErrorKind::io, std::move(msg)); }
    [[noreturn]] static void runtime(std::string msg) { throw Error(ErrorKind::runtime, std::move(msg)); }

private:
    ErrorKind kind_;
};

inline void require(bool cond, ErrorKind kind, const std::string& msg) {
    if (!cond) throw Error(kind, msg);
}

inline void require_valid(bool cond, const std::string& msg) { require(cond, ErrorKind::validation, msg); }

} // namespace pogest
