#include "run_config.hpp"

#include "replaylab/errors.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <fstream>

namespace replaylab::cli {

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

}  // namespace

std::vector<std::string> config_file_arguments(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ParameterError(fmt::format("cannot open config file {}", path.string()));
    std::vector<std::string> out;
    int lineno = 0;
    for (std::string line; std::getline(in, line);) {
        ++lineno;
        if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ParameterError(fmt::format("{}:{}: expected key=value", path.string(), lineno));
        std::string key = trim(line.substr(0, eq));
        std::replace(key.begin(), key.end(), '_', '-');
        if (key.empty()) throw ParameterError(fmt::format("{}:{}: empty key", path.string(), lineno));
        out.push_back(fmt::format("--{}={}", key, trim(line.substr(eq + 1))));
    }
    return out;
}

std::vector<std::string> expand_config(std::vector<std::string> args) {
    std::optional<std::string> file;
    for (std::size_t k = 0; k < args.size();) {
        if (args[k] == "--config") {
            if (k + 1 >= args.size()) throw ParameterError("--config needs a file name");
            file = args[k + 1];
            args.erase(args.begin() + static_cast<std::ptrdiff_t>(k), args.begin() + static_cast<std::ptrdiff_t>(k + 2));
        } else if (args[k].rfind("--config=", 0) == 0) {
            file = args[k].substr(9);
            args.erase(args.begin() + static_cast<std::ptrdiff_t>(k));
        } else {
            ++k;
        }
    }
    if (!file) return args;
    const auto extra = config_file_arguments(*file);
    auto sub = std::find_if(args.begin(), args.end(), [](const std::string& a) { return !a.empty() && a[0] != '-'; });
    const auto at = sub == args.end() ? args.end() : sub + 1;
    args.insert(at, extra.begin(), extra.end());
    return args;
}

std::string format_number(double value) { return fmt::format("{}", value); }

}  // namespace replaylab::cli
