#pragma once

#include <stdexcept>
#include <string>

namespace disorder {

// Invalid model parameters or an argument outside its admissible domain.
class domain_error : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

// A numeric routine failed to reach its accuracy target; carries the best
// estimate achieved before giving up.
class numeric_error : public std::runtime_error {
public:
  numeric_error(const std::string& what, double achieved)
      : std::runtime_error(what), achieved_(achieved) {}
  double achieved() const noexcept { return achieved_; }

private:
  double achieved_;
};

// An input violated a structural assumption (concavity, bounds, bracket
// sign conditions) beyond tolerance.
class inconsistency_error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

// A bracketed search exhausted its domain without finding a solution.
class search_error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

// The request needs more iterates than were computed.
class request_more_error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

}  // namespace disorder
