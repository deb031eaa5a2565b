#pragma once

#include <sstream>
#include <string>
#include <vector>

namespace scanverif {

struct SourceLoc {
    int line = 0;    // 1-based, 0 = unknown
    int column = 0;  // 1-based

    bool known() const { return line > 0; }
};

struct Diagnostic {
    std::string message;
    SourceLoc loc;
    std::string file;

    std::string str() const {
        std::ostringstream os;
        if (!file.empty())
            os << file << ":";
        if (loc.known())
            os << loc.line << ":" << loc.column << ": ";
        else if (!file.empty())
            os << " ";
        os << message;
        return os.str();
    }
};

using Diagnostics = std::vector<Diagnostic>;

inline void add_diag(Diagnostics& ds, SourceLoc loc, std::string msg) {
    ds.push_back(Diagnostic{std::move(msg), loc, {}});
}

inline std::string join_diags(const Diagnostics& ds) {
    std::string out;
    for (const auto& d : ds) {
        out += d.str();
        out += '\n';
    }
    return out;
}

}  // namespace scanverif
