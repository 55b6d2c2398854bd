#include "core/error.hpp"

namespace sdgf {

void fail_config(const std::string& msg) { throw Error(ErrKind::config, msg); }
void fail_io(const std::string& msg) { throw Error(ErrKind::io, msg); }
void fail_invalid(const std::string& msg) { throw Error(ErrKind::invalid_arg, msg); }
void fail_compute(const std::string& msg) { throw Error(ErrKind::compute, msg); }

}  // namespace sdgf
