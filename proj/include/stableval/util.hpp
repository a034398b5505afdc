#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace stableval {

// Fixed-point decimal formatting with ties rounded away from zero, decided on
// the exact binary value of x. The scaled product 10^d * x is formed in long
// double, which holds it exactly for d <= 3, so a value like
// 23.749999999999996 never gets nudged over the .5 boundary and a value that
// IS exactly 23.75 always rounds up.
std::string format_fixed(double x, int decimals);

inline std::string format1(double x) { return format_fixed(x, 1); }

uint64_t fnv1a64(std::string_view bytes);
uint64_t fnv1a64(uint64_t seed, std::string_view bytes);
std::string to_hex(uint64_t v);

std::string trim(std::string_view s);

// minimal CSV: comma separated, double quotes escape fields containing commas
std::vector<std::string> split_csv_line(const std::string& line);
std::string csv_escape(const std::string& field);

std::string read_file(const std::filesystem::path& path);
void write_file_atomic(const std::filesystem::path& path, const std::string& content);

int64_t now_ms();

}  // namespace stableval
