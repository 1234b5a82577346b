#pragma once

#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "form.hpp"

namespace jetvar {

/// A mathematical refusal: the input violates a precondition that can only
/// be decided by computation (e.g. a Lagrangian that is not variationally
/// trivial). Carries the witness forms that prove it.
class Refusal : public std::runtime_error {
 public:
  Refusal(const std::string& what, std::vector<std::pair<std::string, GradedForm>> witnesses)
      : std::runtime_error(what), witnesses_(std::move(witnesses)) {}
  Refusal(const std::string& what, GradedForm witness)
      : Refusal(what, std::vector<std::pair<std::string, GradedForm>>{{"witness", std::move(witness)}}) {}

  const std::vector<std::pair<std::string, GradedForm>>& witnesses() const { return witnesses_; }

 private:
  std::vector<std::pair<std::string, GradedForm>> witnesses_;
};

}  // namespace jetvar
