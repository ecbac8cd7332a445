#pragma once

#include <cstdio>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

namespace txnn {

// key=value provenance lines echoed as comments at the top of every CSV, so
// a result file carries the exact command that produced it.
using Provenance = std::vector<std::pair<std::string, std::string>>;

// Shortest round-trippable decimal form.
inline std::string fmt_double(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    double back = 0.0;
    std::sscanf(buf, "%lg", &back);
    if (back == v) {
        // try to shorten
        for (int prec = 1; prec < 17; ++prec) {
            char shorter[32];
            std::snprintf(shorter, sizeof shorter, "%.*g", prec, v);
            std::sscanf(shorter, "%lg", &back);
            if (back == v) return shorter;
        }
    }
    return buf;
}

inline void write_csv_provenance(std::ostream& out, const Provenance& prov) {
    for (const auto& [key, value] : prov) out << "# " << key << "=" << value << "\n";
}

}  // namespace txnn
