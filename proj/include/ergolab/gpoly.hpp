#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "ergolab/fixed.hpp"
#include "ergolab/poly.hpp"

namespace ergolab {

/// Integer-valued expression built from integer polynomials with sums,
/// products and floors of real linear combinations, e.g. [√2·n]·n.
class GeneralizedPolynomial {
 public:
  // Integer polynomial Σ c_i n^i.
  static GeneralizedPolynomial leaf(std::vector<std::int64_t> coefficients);
  static GeneralizedPolynomial sum(std::vector<GeneralizedPolynomial> terms);
  static GeneralizedPolynomial product(std::vector<GeneralizedPolynomial> factors);
  // [Σ w_i · g_i]
  static GeneralizedPolynomial floor_of(std::vector<std::pair<FixedReal, GeneralizedPolynomial>> terms);
  // [p(n)] for a real polynomial, expressed through monomial leaves.
  static GeneralizedPolynomial floor_of(const RealPolynomial& p);

  // Exact value; throws HeadroomError if it leaves the 256-bit range.
  Int256 eval_wide(std::int64_t n) const;
  std::string to_string() const;

  struct Node;

 private:
  explicit GeneralizedPolynomial(std::shared_ptr<const Node> node) : node_(std::move(node)) {}
  std::shared_ptr<const Node> node_;
};

// Value at n ≥ 1 as a 64-bit integer.
std::int64_t gp_eval(const GeneralizedPolynomial& g, std::int64_t n);

}  // namespace ergolab
