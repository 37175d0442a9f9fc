#pragma once

// Runs the built CLI binary and captures exit code + stdout.

#include <array>
#include <cstdio>
#include <cstdlib>
#include <string>
#include <vector>

#include <json.hpp>

namespace obsdet::testing {

struct CliResult {
    int exit_code = -1;
    std::string out;

    nlohmann::json json_out() const { return nlohmann::json::parse(out); }
};

inline std::string shell_quote(const std::string& s) {
    std::string quoted = "'";
    for (char c : s) {
        if (c == '\'') {
            quoted += "'\\''";
        } else {
            quoted += c;
        }
    }
    return quoted + "'";
}

inline CliResult run_cli(const std::vector<std::string>& args) {
    std::string cmd = OBSDET_CLI_PATH;
    for (const std::string& a : args) cmd += " " + shell_quote(a);
    cmd += " 2>/dev/null";

    CliResult result;
    FILE* pipe = popen(cmd.c_str(), "r");
    if (!pipe) return result;
    std::array<char, 4096> buf;
    std::size_t n;
    while ((n = fread(buf.data(), 1, buf.size(), pipe)) > 0) {
        result.out.append(buf.data(), n);
    }
    int status = pclose(pipe);
    result.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return result;
}

}  // namespace obsdet::testing
