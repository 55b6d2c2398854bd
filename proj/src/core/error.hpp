#pragma once

#include <stdexcept>
#include <string>

namespace sdgf {

enum class ErrKind {
    config,       // bad configuration key/value
    io,           // file missing, unreadable, malformed
    invalid_arg,  // contract violation on an in-memory input
    compute,      // a stage failed mid-pipeline
};

class Error : public std::runtime_error {
public:
    Error(ErrKind kind, const std::string& msg) : std::runtime_error(msg), kind_(kind) {}
    ErrKind kind() const { return kind_; }

private:
    ErrKind kind_;
};

[[noreturn]] void fail_config(const std::string& msg);
[[noreturn]] void fail_io(const std::string& msg);
[[noreturn]] void fail_invalid(const std::string& msg);
[[noreturn]] void fail_compute(const std::string& msg);

}  // namespace sdgf
