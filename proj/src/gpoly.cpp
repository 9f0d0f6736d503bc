#include "ergolab/gpoly.hpp"

#include <sstream>
#include <variant>

#include "ergolab/errors.hpp"

namespace ergolab {

namespace {

Int256 floor_div(const Int256& a, const Int256& b) {
  Int256 q = a / b;
  if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
  return q;
}

Int256 wide(int128 v) {
  const bool neg = v < 0;
  const uint128 mag = neg ? static_cast<uint128>(-(v + 1)) + 1 : static_cast<uint128>(v);
  Int256 r = Int256(static_cast<std::uint64_t>(mag >> 64));
  r <<= 64;
  r += static_cast<std::uint64_t>(mag);
  return neg ? Int256(-r) : r;
}

}  // namespace

struct GeneralizedPolynomial::Node {
  struct Leaf {
    std::vector<std::int64_t> coefficients;
  };
  struct Sum {
    std::vector<GeneralizedPolynomial> terms;
  };
  struct Product {
    std::vector<GeneralizedPolynomial> factors;
  };
  struct Floor {
    std::vector<std::pair<FixedReal, GeneralizedPolynomial>> terms;
  };
  std::variant<Leaf, Sum, Product, Floor> kind;
};

GeneralizedPolynomial GeneralizedPolynomial::leaf(std::vector<std::int64_t> coefficients) {
  return GeneralizedPolynomial(std::make_shared<const Node>(Node{Node::Leaf{std::move(coefficients)}}));
}

GeneralizedPolynomial GeneralizedPolynomial::sum(std::vector<GeneralizedPolynomial> terms) {
  return GeneralizedPolynomial(std::make_shared<const Node>(Node{Node::Sum{std::move(terms)}}));
}

GeneralizedPolynomial GeneralizedPolynomial::product(std::vector<GeneralizedPolynomial> factors) {
  return GeneralizedPolynomial(std::make_shared<const Node>(Node{Node::Product{std::move(factors)}}));
}

GeneralizedPolynomial GeneralizedPolynomial::floor_of(std::vector<std::pair<FixedReal, GeneralizedPolynomial>> terms) {
  return GeneralizedPolynomial(std::make_shared<const Node>(Node{Node::Floor{std::move(terms)}}));
}

GeneralizedPolynomial GeneralizedPolynomial::floor_of(const RealPolynomial& p) {
  std::vector<std::pair<FixedReal, GeneralizedPolynomial>> terms;
  for (int i = 0; i <= p.degree(); ++i) {
    const Coefficient c = p.coefficient(i);
    if (c.is_zero()) continue;
    std::vector<std::int64_t> mono(static_cast<std::size_t>(i) + 1, 0);
    mono.back() = 1;
    terms.emplace_back(c.value, leaf(std::move(mono)));
  }
  return floor_of(std::move(terms));
}

Int256 GeneralizedPolynomial::eval_wide(std::int64_t n) const {
  try {
    return std::visit(
        [n](const auto& k) -> Int256 {
          using K = std::decay_t<decltype(k)>;
          if constexpr (std::is_same_v<K, Node::Leaf>) {
            Int256 acc = 0;
            for (auto it = k.coefficients.rbegin(); it != k.coefficients.rend(); ++it) acc = acc * n + *it;
            return acc;
          } else if constexpr (std::is_same_v<K, Node::Sum>) {
            Int256 acc = 0;
            for (const auto& t : k.terms) acc += t.eval_wide(n);
            return acc;
          } else if constexpr (std::is_same_v<K, Node::Product>) {
            Int256 acc = 1;
            for (const auto& f : k.factors) acc *= f.eval_wide(n);
            return acc;
          } else {
            // Σ w_i g_i in units of 2^-64, then floor.
            Int256 acc = 0;
            for (const auto& [w, g] : k.terms) acc += wide(w.raw()) * g.eval_wide(n);
            return floor_div(acc, Int256(1) << FixedReal::kFracBits);
          }
        },
        node_->kind);
  } catch (const std::overflow_error&) {
    throw HeadroomError("generalized polynomial overflows 256 bits at n = " + std::to_string(n));
  }
}

std::string GeneralizedPolynomial::to_string() const {
  return std::visit(
      [](const auto& k) -> std::string {
        using K = std::decay_t<decltype(k)>;
        std::ostringstream os;
        if constexpr (std::is_same_v<K, Node::Leaf>) {
          os << "poly(";
          for (std::size_t i = 0; i < k.coefficients.size(); ++i) os << (i ? "," : "") << k.coefficients[i];
          os << ')';
        } else if constexpr (std::is_same_v<K, Node::Sum>) {
          os << '(';
          for (std::size_t i = 0; i < k.terms.size(); ++i) os << (i ? " + " : "") << k.terms[i].to_string();
          os << ')';
        } else if constexpr (std::is_same_v<K, Node::Product>) {
          for (std::size_t i = 0; i < k.factors.size(); ++i) os << (i ? "*" : "") << k.factors[i].to_string();
        } else {
          os << '[';
          for (std::size_t i = 0; i < k.terms.size(); ++i) {
            os << (i ? " + " : "") << k.terms[i].first.to_string(6) << '*' << k.terms[i].second.to_string();
          }
          os << ']';
        }
        return os.str();
      },
      node_->kind);
}

std::int64_t gp_eval(const GeneralizedPolynomial& g, std::int64_t n) {
  if (n < 1) throw InvalidInput("generalized polynomials are evaluated at n >= 1");
  const Int256 v = g.eval_wide(n);
  if (v > Int256(std::numeric_limits<std::int64_t>::max()) || v < Int256(std::numeric_limits<std::int64_t>::min())) {
    throw HeadroomError("generalized polynomial value exceeds 64 bits at n = " + std::to_string(n));
  }
  return static_cast<std::int64_t>(v);
}

}  // namespace ergolab
