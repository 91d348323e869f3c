#pragma once

#include <set>
#include <stdexcept>
#include <string>
#include <vector>

namespace symkawa {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed input.  offset is a byte offset into the offending text when known.
class InputError : public Error {
 public:
  explicit InputError(const std::string& what, long offset = -1)
      : Error(what), offset_(offset) {}
  long offset() const { return offset_; }

 private:
  long offset_;
};

class DomainError : public Error {
 public:
  using Error::Error;
};

// Sign and domain facts: "t>0", "u>0", "n!=0", "rho>0", "k=0".
class Assumptions {
 public:
  Assumptions() = default;
  static Assumptions parse(const std::vector<std::string>& facts);

  void assume_positive(const std::string& name);
  void assume_nonzero(const std::string& name);
  void assume_zero(const std::string& name);
  void merge(const Assumptions& o);

  bool positive(const std::string& name) const { return positive_.count(name) != 0; }
  bool nonzero(const std::string& name) const {
    return positive(name) || nonzero_.count(name) != 0;
  }
  std::vector<std::string> facts() const;

 private:
  void check(const std::string& name) const;
  std::set<std::string> positive_, nonzero_, zero_;
};

}  // namespace symkawa
