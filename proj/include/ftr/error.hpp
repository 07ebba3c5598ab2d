#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace ftr {

/// Argument outside the domain of an operation.
class domain_error : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// A series or quadrature failed to reach its tolerance.
class convergence_error : public std::runtime_error {
 public:
  convergence_error(const std::string& what, std::size_t terms_used)
      : std::runtime_error(what + " (terms used: " + std::to_string(terms_used) + ")"),
        terms_used_(terms_used) {}

  std::size_t terms_used() const noexcept { return terms_used_; }

 private:
  std::size_t terms_used_;
};

/// The requested quantity has no supported evaluation at this limit.
class unsupported_error : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

}  // namespace ftr
