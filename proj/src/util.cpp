#include "stableval/util.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>

#include "stableval/errors.hpp"

namespace stableval {

static_assert(std::numeric_limits<long double>::digits >= 60,
              "format_fixed needs an extended-precision long double so that "
              "10^d * x is exact for a 53-bit double and d <= 3");

std::string format_fixed(double x, int decimals) {
  if (decimals < 0 || decimals > 9) {
    throw validation_error("format_fixed supports 0 to 9 decimals");
  }
  if (!std::isfinite(x)) {
    throw validation_error("format_fixed requires a finite value");
  }
  long double scale = 1.0L;
  for (int i = 0; i < decimals; ++i) scale *= 10.0L;
  const bool negative = x < 0.0;
  long double t = scale * static_cast<long double>(negative ? -x : x);
  long double fl = std::floor(t);
  long double frac = t - fl;
  long long units = static_cast<long long>(fl);
  if (frac >= 0.5L) ++units;
  long long div = 1;
  for (int i = 0; i < decimals; ++i) div *= 10;
  const long long ipart = units / div;
  const long long fpart = units % div;
  std::string out;
  if (negative && (ipart != 0 || fpart != 0)) out += '-';
  out += std::to_string(ipart);
  if (decimals > 0) {
    std::string digits = std::to_string(fpart);
    out += '.';
    out += std::string(static_cast<size_t>(decimals) - digits.size(), '0');
    out += digits;
  }
  return out;
}

uint64_t fnv1a64(uint64_t seed, std::string_view bytes) {
  uint64_t h = seed;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

uint64_t fnv1a64(std::string_view bytes) {
  return fnv1a64(0xcbf29ce484222325ULL, bytes);
}

std::string to_hex(uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(v));
  return std::string(buf);
}

std::string trim(std::string_view s) {
  size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return std::string(s.substr(b, e - b));
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string cur;
  bool quoted = false;
  for (size_t i = 0; i < line.size(); ++i) {
    char c = line[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          cur += '"';
          ++i;
        } else {
          quoted = false;
        }
      } else {
        cur += c;
      }
    } else if (c == '"' && cur.empty()) {
      quoted = true;
    } else if (c == ',') {
      fields.push_back(cur);
      cur.clear();
    } else if (c == '\r') {
      // tolerate CRLF files
    } else {
      cur += c;
    }
  }
  fields.push_back(cur);
  return fields;
}

std::string csv_escape(const std::string& field) {
  if (field.find_first_of(",\"\n") == std::string::npos) return field;
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out += "\"\"";
    else out += c;
  }
  out += '"';
  return out;
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw io_error("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file_atomic(const std::filesystem::path& path, const std::string& content) {
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw io_error("cannot write " + tmp.string());
    out << content;
    out.flush();
    if (!out) throw io_error("short write to " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

int64_t now_ms() {
  return std::chrono::duration_cast<std::chrono::milliseconds>(
             std::chrono::system_clock::now().time_since_epoch())
      .count();
}

}  // namespace stableval
