#pragma once

#include <stdexcept>

namespace ssf {

/// A spectral margin was violated: a shift constant does not clear the
/// spectrum, or a resolvent point lies inside it.
class margin_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Reading a config or writing an artifact failed.
class io_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace ssf
