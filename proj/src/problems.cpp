#include "mr/problems.hpp"

#include <cmath>
#include <limits>

#include "mr/errors.hpp"
#include "mr/linalg.hpp"
#include "mr/prox.hpp"

namespace mr {

namespace {

nlohmann::json matrix_to_json(const Eigen::MatrixXd& A) {
  nlohmann::json rows = nlohmann::json::array();
  for (Eigen::Index i = 0; i < A.rows(); ++i) {
    nlohmann::json row = nlohmann::json::array();
    for (Eigen::Index j = 0; j < A.cols(); ++j) row.push_back(A(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

Eigen::MatrixXd matrix_from_json(const nlohmann::json& j) {
  const auto m = static_cast<Eigen::Index>(j.size());
  const auto n = m ? static_cast<Eigen::Index>(j.at(0).size()) : 0;
  Eigen::MatrixXd A(m, n);
  for (Eigen::Index i = 0; i < m; ++i)
    for (Eigen::Index k = 0; k < n; ++k) A(i, k) = j.at(i).at(k).get<double>();
  return A;
}

Eigen::VectorXd vector_from_json(const nlohmann::json& j) {
  Eigen::VectorXd v(static_cast<Eigen::Index>(j.size()));
  for (Eigen::Index i = 0; i < v.size(); ++i) v[i] = j.at(i).get<double>();
  return v;
}

nlohmann::json vector_to_json(const Eigen::VectorXd& v) {
  nlohmann::json a = nlohmann::json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v[i]);
  return a;
}

}  // namespace

double nonsmooth_value(const NonsmoothSpec& g, const Eigen::VectorXd& x) {
  return std::visit(
      [&](const auto& spec) -> double {
        using T = std::decay_t<decltype(spec)>;
        if constexpr (std::is_same_v<T, ZeroG>) {
          return 0.0;
        } else if constexpr (std::is_same_v<T, L1G>) {
          return spec.weight * x.lpNorm<1>();
        } else if constexpr (std::is_same_v<T, SquaredL2G>) {
          return 0.5 * spec.weight * x.squaredNorm();
        } else if constexpr (std::is_same_v<T, BoxIndicatorG>) {
          for (Eigen::Index i = 0; i < x.size(); ++i)
            if (x[i] < spec.lo[i] || x[i] > spec.hi[i])
              return std::numeric_limits<double>::infinity();
          return 0.0;
        } else {
          return spec.value(x);
        }
      },
      g);
}

bool is_zero_g(const NonsmoothSpec& g) { return std::holds_alternative<ZeroG>(g); }

CompositeProblem make_diagonal_quadratic(const Eigen::VectorXd& lambdas) {
  if (lambdas.size() == 0 || lambdas.minCoeff() <= 0.0)
    throw NonPositiveEigenvalue("diagonal quadratic requires all lambda_i > 0");
  CompositeProblem p;
  p.n = static_cast<int>(lambdas.size());
  Eigen::VectorXd l = lambdas;
  p.smooth_value = [l](const Eigen::VectorXd& x) { return 0.5 * x.dot(l.cwiseProduct(x)); };
  p.smooth_grad = [l](const Eigen::VectorXd& x) { return Eigen::VectorXd(l.cwiseProduct(x)); };
  p.nonsmooth = ZeroG{};
  p.mu = lambdas.minCoeff();
  p.lipschitz = lambdas.maxCoeff();
  p.reference = Reference{Eigen::VectorXd::Zero(p.n), 0.0};
  p.quadratic = DiagonalQuadratic{lambdas};
  p.spec_json = {{"kind", "diag_quadratic"}, {"lambdas", vector_to_json(lambdas)}};
  return p;
}

CompositeProblem make_general_quadratic(const Eigen::MatrixXd& A, const Eigen::VectorXd& b) {
  const auto eig = jacobi_eigendecomposition(A);  // throws NotSymmetric
  const double wmax = eig.eigenvalues.cwiseAbs().maxCoeff();
  if (eig.eigenvalues.minCoeff() < -1e-10 * std::max(1.0, wmax))
    throw NonPositiveEigenvalue("matrix has a negative eigenvalue");

  // smallest positive eigenvalue (restricted to the range when singular)
  double mu = 0.0;
  for (Eigen::Index i = 0; i < eig.eigenvalues.size(); ++i) {
    const double w = eig.eigenvalues[i];
    if (w > 1e-12 * wmax) {
      mu = w;
      break;
    }
  }
  if (mu <= 0.0) throw NonPositiveEigenvalue("matrix has no positive eigenvalue");

  const Eigen::VectorXd x_star = spectral_least_squares(eig, -b);
  const double residual = (A * x_star + b).norm();
  if (residual > 1e-10 * (1.0 + b.norm()))
    throw RangeViolation("b is not in Range(A): least-squares residual " +
                         std::to_string(residual));

  CompositeProblem p;
  p.n = static_cast<int>(A.rows());
  Eigen::MatrixXd Ac = A;
  Eigen::VectorXd bc = b;
  p.smooth_value = [Ac, bc](const Eigen::VectorXd& x) {
    return 0.5 * x.dot(Ac * x) + bc.dot(x);
  };
  p.smooth_grad = [Ac, bc](const Eigen::VectorXd& x) { return Eigen::VectorXd(Ac * x + bc); };
  p.nonsmooth = ZeroG{};
  p.mu = mu;
  p.lipschitz = eig.eigenvalues.maxCoeff();
  p.reference = Reference{x_star, 0.5 * x_star.dot(A * x_star) + b.dot(x_star)};
  p.quadratic = GeneralQuadratic{A, b};
  p.spec_json = {{"kind", "general_quadratic"}, {"A", matrix_to_json(A)}, {"b", vector_to_json(b)}};
  return p;
}

CompositeProblem make_lasso(const Eigen::MatrixXd& M, const Eigen::VectorXd& c, double gamma) {
  if (gamma <= 0.0) throw Error("lasso weight gamma must be positive");
  const Eigen::MatrixXd H = M.transpose() * M;
  const auto eig = jacobi_eigendecomposition(H);
  const double wmax = eig.eigenvalues.maxCoeff();
  const double wmin = eig.eigenvalues.minCoeff();
  if (wmin <= 1e-12 * wmax)
    throw RankDeficient("M^T M is numerically singular: lambda_min/lambda_max = " +
                        std::to_string(wmin / wmax));

  CompositeProblem p;
  p.n = static_cast<int>(M.cols());
  Eigen::MatrixXd Mc = M;
  Eigen::VectorXd cc = c;
  p.smooth_value = [Mc, cc](const Eigen::VectorXd& x) { return 0.5 * (Mc * x - cc).squaredNorm(); };
  p.smooth_grad = [Mc, cc](const Eigen::VectorXd& x) {
    return Eigen::VectorXd(Mc.transpose() * (Mc * x - cc));
  };
  p.nonsmooth = L1G{gamma};
  p.mu = wmin;
  p.lipschitz = wmax;
  p.spec_json = {{"kind", "lasso"},
                 {"M", matrix_to_json(M)},
                 {"c", vector_to_json(c)},
                 {"gamma", gamma}};
  reference_minimizer(p, 1e-12);
  return p;
}

Reference reference_minimizer(CompositeProblem& problem, double tol, long max_iter) {
  // Direct solve when the smooth part is a quadratic and g is vacuous.
  if (problem.quadratic && is_zero_g(problem.nonsmooth)) {
    if (const auto* d = std::get_if<DiagonalQuadratic>(&*problem.quadratic)) {
      (void)d;
      problem.reference = Reference{Eigen::VectorXd::Zero(problem.n), 0.0};
      return *problem.reference;
    }
    const auto& gq = std::get<GeneralQuadratic>(*problem.quadratic);
    const auto eig = jacobi_eigendecomposition(gq.A);
    Eigen::VectorXd x_star = spectral_least_squares(eig, -gq.b);
    problem.reference = Reference{x_star, problem.smooth_value(x_star)};
    return *problem.reference;
  }

  const double s = 0.9 / problem.lipschitz;
  Eigen::VectorXd x = Eigen::VectorXd::Zero(problem.n);
  const double threshold = tol * std::min(1.0, x.norm() + 1.0);
  for (long k = 0; k < max_iter; ++k) {
    const Eigen::VectorXd x_next = prox(problem.nonsmooth, s, x - s * problem.smooth_grad(x));
    const double res = (x - x_next).norm() / s;
    x = x_next;
    if (res <= threshold) {
      problem.reference = Reference{x, problem.F(x)};
      return *problem.reference;
    }
  }
  throw NoConvergence("reference minimizer did not reach tolerance within iteration cap");
}

nlohmann::json problem_to_json(const CompositeProblem& problem) {
  if (problem.spec_json.is_null()) return {{"kind", "custom"}};
  return problem.spec_json;
}

CompositeProblem problem_from_json(const nlohmann::json& j) {
  const std::string kind = j.at("kind").get<std::string>();
  if (kind == "diag_quadratic") return make_diagonal_quadratic(vector_from_json(j.at("lambdas")));
  if (kind == "general_quadratic")
    return make_general_quadratic(matrix_from_json(j.at("A")), vector_from_json(j.at("b")));
  if (kind == "lasso")
    return make_lasso(matrix_from_json(j.at("M")), vector_from_json(j.at("c")),
                      j.at("gamma").get<double>());
  throw Error("unknown problem kind: " + kind);
}

}  // namespace mr
