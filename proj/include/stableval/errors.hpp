#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace stableval {

class error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// bad inputs or parameters caught before any work is done
class validation_error : public error {
 public:
  using error::error;
};

// a dataset record does not match the field mapping
class schema_error : public error {
 public:
  using error::error;
};

// unreadable or syntactically broken input
class parse_error : public error {
 public:
  using error::error;
};

// duplicate keys, fingerprint mismatches, conflicting records
class integrity_error : public error {
 public:
  using error::error;
};

class not_found_error : public error {
 public:
  using error::error;
};

class conflict_error : public error {
 public:
  using error::error;
};

// endpoint or config problems that retrying cannot fix
class config_error : public error {
 public:
  using error::error;
};

// endpoint unreachable after the retry budget
class transport_error : public error {
 public:
  using error::error;
};

class insufficient_data_error : public error {
 public:
  using error::error;
};

class io_error : public error {
 public:
  using error::error;
};

// group comparison aborted because some groups have too few runs
class incomplete_groups_error : public error {
 public:
  incomplete_groups_error(const std::string& what, std::vector<std::string> missing)
      : error(what), missing_groups(std::move(missing)) {}
  std::vector<std::string> missing_groups;
};

}  // namespace stableval
