#pragma once

#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>

namespace xbn::testing {

inline std::string golden_path(const std::string& name) {
    return std::string(XBN_SOURCE_DIR) + "/tests/golden/" + name + ".json";
}

/// Contents of a golden file. With XBN_UPDATE_GOLDEN=1 the file is first
/// rewritten from `actual`.
inline std::string golden(const std::string& name, const std::string& actual) {
    if (const char* u = std::getenv("XBN_UPDATE_GOLDEN"); u && std::string(u) == "1")
        std::ofstream(golden_path(name), std::ios::binary) << actual;
    std::ifstream in(golden_path(name), std::ios::binary);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

}  // namespace xbn::testing
