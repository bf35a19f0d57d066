#ifndef ARBOR_ERRORS_HPP
#define ARBOR_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace arbor {

// Error categories shared with the C API status codes.
enum class ErrorCode {
  Io = 1,        // file cannot be opened / read / written
  Malformed,     // malformed CoNLL-U text, rule table, or model container
  Config,        // unknown configuration key, wrong value type
  Data,          // invalid tree, vocabulary mismatch, alignment failure
  Limit,         // size limit exceeded
  InvalidArg,    // argument violates a precondition
};

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& msg)
      : std::runtime_error(msg), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& msg) {
  throw Error(code, msg);
}

}  // namespace arbor

#endif
