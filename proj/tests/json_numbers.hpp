#pragma once

#include <regex>
#include <set>
#include <string>

#include "xbn/json_io.hpp"

namespace xbn::testing {

/// format4 of every floating-point number in `j`, plus "inf" for infinite scores.
inline void collect_display_numbers(const json& j, std::set<std::string>& out) {
    if (j.is_number_float()) {
        out.insert(format4(j.get<double>()));
    } else if (j.is_string() && j.get<std::string>() == "inf") {
        out.insert("inf");
    } else if (j.is_structured()) {
        for (const auto& x : j) collect_display_numbers(x, out);
    }
}

/// Every four-decimal number appearing in `text`.
inline std::set<std::string> displayed_numbers(const std::string& text) {
    static const std::regex number(R"(-?\b\d+\.\d{4}\b)");
    std::set<std::string> out;
    for (auto it = std::sregex_iterator(text.begin(), text.end(), number); it != std::sregex_iterator(); ++it)
        out.insert(it->str());
    return out;
}

}  // namespace xbn::testing
