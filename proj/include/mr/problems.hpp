#pragma once

#include <Eigen/Dense>
#include <functional>
#include <optional>
#include <string>
#include <variant>

#include <json.hpp>

namespace mr {

// ---------------------------------------------------------------------------
// Nonsmooth part g of F = f + g.

struct ZeroG {};
struct L1G {
  double weight;  // gamma >= 0
};
struct SquaredL2G {
  double weight;  // g(x) = weight/2 * |x|^2
};
struct BoxIndicatorG {
  Eigen::VectorXd lo, hi;
};
struct CustomG {
  std::function<Eigen::VectorXd(const Eigen::VectorXd&, double)> prox;  // (y, s) -> z
  std::function<double(const Eigen::VectorXd&)> value;
};

using NonsmoothSpec = std::variant<ZeroG, L1G, SquaredL2G, BoxIndicatorG, CustomG>;

double nonsmooth_value(const NonsmoothSpec& g, const Eigen::VectorXd& x);
bool is_zero_g(const NonsmoothSpec& g);

// ---------------------------------------------------------------------------
// Quadratic structure, kept alongside problems built from quadratics so the
// continuous-time module and direct reference solves can use it.

struct DiagonalQuadratic {
  Eigen::VectorXd lambdas;
};
struct GeneralQuadratic {
  Eigen::MatrixXd A;
  Eigen::VectorXd b;
};
using QuadraticSpec = std::variant<DiagonalQuadratic, GeneralQuadratic>;

// ---------------------------------------------------------------------------

struct Reference {
  Eigen::VectorXd x_star;
  double F_star;
};

/// Composite problem F = f + g with smooth oracle pair (value, gradient),
/// strong convexity modulus mu and gradient Lipschitz constant L.
/// Instances are immutable after construction and safe to share between
/// concurrently running solvers; the oracles must be pure.
struct CompositeProblem {
  int n = 0;
  std::function<double(const Eigen::VectorXd&)> smooth_value;
  std::function<Eigen::VectorXd(const Eigen::VectorXd&)> smooth_grad;
  NonsmoothSpec nonsmooth = ZeroG{};
  double mu = 0.0;
  double lipschitz = 0.0;
  std::optional<Reference> reference;
  std::optional<QuadraticSpec> quadratic;
  nlohmann::json spec_json;  // serializable description, {"kind": "custom"} otherwise

  double F(const Eigen::VectorXd& x) const {
    return smooth_value(x) + nonsmooth_value(nonsmooth, x);
  }
};

// Generators. All returned problems satisfy mu <= lipschitz and carry a
// reference minimizer.
CompositeProblem make_diagonal_quadratic(const Eigen::VectorXd& lambdas);
CompositeProblem make_general_quadratic(const Eigen::MatrixXd& A, const Eigen::VectorXd& b);
CompositeProblem make_lasso(const Eigen::MatrixXd& M, const Eigen::VectorXd& c, double gamma);

/// Proximal-gradient reference solve with s = 0.9/L; for plain quadratics the
/// linear system is solved directly. Stores the result on the problem and
/// returns it.
Reference reference_minimizer(CompositeProblem& problem, double tol,
                              long max_iter = 1000000);

// JSON round trip for the serializable kinds (diag_quadratic,
// general_quadratic, lasso). Matrices are row-major nested arrays.
nlohmann::json problem_to_json(const CompositeProblem& problem);
CompositeProblem problem_from_json(const nlohmann::json& j);

}  // namespace mr
