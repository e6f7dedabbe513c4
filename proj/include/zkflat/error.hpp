#pragma once

#include <stdexcept>
#include <string>

namespace zkflat {

/// Thrown on precondition violations and unrecoverable numerical failures.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

inline void require(bool cond, const std::string& msg) {
    if (!cond) throw Error(msg);
}

} // namespace zkflat
