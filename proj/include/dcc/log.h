#pragma once

#include <cstdio>
#include <string>

namespace dcc {

inline void log_warn(const std::string& msg) {
    std::fprintf(stderr, "warning: %s\n", msg.c_str());
}

inline void log_info(const std::string& msg) {
    std::fprintf(stdout, "%s\n", msg.c_str());
    std::fflush(stdout);
}

} // namespace dcc
