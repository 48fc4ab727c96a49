#include "cycdr/solver.hpp"

namespace cycdr {

std::string to_string(Method method) {
  switch (method) {
    case Method::cyclic: return "cyclic";
    case Method::full_cycle: return "full-cycle";
    case Method::short_cycle: return "short-cycle";
    case Method::product_space: return "product-space";
    case Method::random_product: return "random-product";
  }
  throw std::logic_error("to_string(Method): unreachable");
}

Method method_from_string(const std::string& name) {
  if (name == "cyclic") return Method::cyclic;
  if (name == "full-cycle") return Method::full_cycle;
  if (name == "short-cycle") return Method::short_cycle;
  if (name == "product-space") return Method::product_space;
  if (name == "random-product") return Method::random_product;
  throw std::invalid_argument(
      "unknown method '" + name +
      "' (expected cyclic|full-cycle|short-cycle|product-space|random-product)");
}

std::string to_string(Termination termination) {
  switch (termination) {
    case Termination::converged: return "converged";
    case Termination::max_iterations: return "max-iterations";
    case Termination::numerical_failure: return "numerical-failure";
  }
  throw std::logic_error("to_string(Termination): unreachable");
}

}  // namespace cycdr
