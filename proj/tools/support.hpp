#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace qtdi_cli {

// Thrown by the tool layer; `code` feeds both the process exit code and the
// machine-readable error JSON.
struct CliError : std::runtime_error {
    CliError(int code, const std::string& message) : std::runtime_error(message), code(code) {}
    int code;
};

std::string format_double(double value);
std::uint64_t fnv1a(const std::string& data);
std::string hex64(std::uint64_t value);

std::string read_file(const std::string& path);
void write_file(const std::string& path, const std::string& content);

std::vector<std::string> split(const std::string& text, char sep);
std::string trim(const std::string& text);

} // namespace qtdi_cli
