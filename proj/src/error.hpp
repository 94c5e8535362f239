#pragma once

#include <stdexcept>
#include <string>

namespace simx {

enum class Status {
  ok = 0,
  invalid_argument,
  io,
  decode,
  format,
  corrupt,
  version_mismatch,
  empty_corpus,
  geometry,
  lookup,
  internal,
};

const char* status_name(Status s);

class Error : public std::runtime_error {
 public:
  Error(Status status, std::string message)
      : std::runtime_error(std::move(message)), status_(status) {}

  Status status() const { return status_; }

 private:
  Status status_;
};

}  // namespace simx
