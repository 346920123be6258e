#pragma once

#include <stdexcept>
#include <string>

namespace ionchain {

// Invalid input, configuration, or precondition.  The CLI maps this to exit code 2.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class UnknownSpeciesError : public ConfigError {
 public:
  explicit UnknownSpeciesError(const std::string& label)
      : ConfigError("unknown ion species \"" + label + "\""), label_(label) {}
  const std::string& label() const noexcept { return label_; }

 private:
  std::string label_;
};

// Numerical failure (non-convergence, truncation overflow).  The CLI maps this to exit code 3.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Population reached the top of the Fock-space truncation during propagation.
class LeakageError : public NumericalError {
 public:
  LeakageError(int n_max, int suggested, double leaked)
      : NumericalError("motional population leaked into the top two Fock levels (" +
                       std::to_string(leaked) + " at n_max=" + std::to_string(n_max) +
                       "); rerun with n_max >= " + std::to_string(suggested)),
        n_max_(n_max),
        suggested_(suggested) {}
  int n_max() const noexcept { return n_max_; }
  int suggested_n_max() const noexcept { return suggested_; }

 private:
  int n_max_;
  int suggested_;
};

}  // namespace ionchain
