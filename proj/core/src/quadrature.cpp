#include "biphoton/quadrature.hpp"

#include <cmath>
#include <sstream>

#include <Eigen/Eigenvalues>
#include <boost/math/quadrature/gauss.hpp>

#include "biphoton/errors.hpp"

namespace biphoton {

namespace {

constexpr int kOrder = 20;

struct AxisRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

AxisRule composite_rule(double lo, double hi, int panels) {
  using Rule = boost::math::quadrature::gauss<double, kOrder>;
  const auto& x = Rule::abscissa();
  const auto& w = Rule::weights();
  AxisRule rule;
  rule.nodes.reserve(static_cast<std::size_t>(panels) * kOrder);
  rule.weights.reserve(rule.nodes.capacity());
  const double h = (hi - lo) / panels;
  for (int p = 0; p < panels; ++p) {
    const double mid = lo + (p + 0.5) * h;
    const double half = 0.5 * h;
    for (std::size_t i = 0; i < x.size(); ++i) {
      // Boost stores the non-negative half of a symmetric even-order rule.
      rule.nodes.push_back(mid - half * x[i]);
      rule.weights.push_back(half * w[i]);
      rule.nodes.push_back(mid + half * x[i]);
      rule.weights.push_back(half * w[i]);
    }
  }
  return rule;
}

// exp(-t^T M t + beta^T t) in scaled eigen-coordinates, Re(M) = I.
class ScaledIntegrand {
 public:
  ScaledIntegrand(Eigen::MatrixXcd m, Eigen::VectorXcd beta, Eigen::VectorXd center, double half_width)
      : m_(std::move(m)), beta_(std::move(beta)), center_(std::move(center)), half_width_(half_width) {}

  Eigen::Index dim() const { return m_.rows(); }

  cdouble integrate(const std::vector<int>& panels, long long& evaluations) const {
    const auto n = static_cast<std::size_t>(dim());
    std::vector<AxisRule> rules;
    rules.reserve(n);
    for (std::size_t j = 0; j < n; ++j) {
      const double c = center_(static_cast<Eigen::Index>(j));
      rules.push_back(composite_rule(c - half_width_, c + half_width_, panels[j]));
    }
    // lin[level][k]: linear coefficient of t_k once t_0..t_{level-1} are fixed.
    std::vector<Eigen::VectorXcd> lin(n + 1, Eigen::VectorXcd::Zero(dim()));
    lin[0] = beta_;
    return recurse(rules, lin, 0, cdouble{0.0, 0.0}, evaluations);
  }

 private:
  cdouble recurse(const std::vector<AxisRule>& rules, std::vector<Eigen::VectorXcd>& lin, std::size_t level,
                  cdouble constant, long long& evaluations) const {
    const auto d = static_cast<Eigen::Index>(level);
    const AxisRule& rule = rules[level];
    const cdouble mdd = m_(d, d);
    const cdouble ld = lin[level](d);
    cdouble sum{0.0, 0.0};
    if (level + 1 == rules.size()) {
      for (std::size_t q = 0; q < rule.nodes.size(); ++q) {
        const double t = rule.nodes[q];
        sum += rule.weights[q] * std::exp(constant + t * (ld - mdd * t));
      }
      evaluations += static_cast<long long>(rule.nodes.size());
      return sum;
    }
    for (std::size_t q = 0; q < rule.nodes.size(); ++q) {
      const double t = rule.nodes[q];
      const cdouble next_constant = constant + t * (ld - mdd * t);
      auto& next = lin[level + 1];
      for (Eigen::Index k = d + 1; k < dim(); ++k) next(k) = lin[level](k) - 2.0 * m_(k, d) * t;
      sum += rule.weights[q] * recurse(rules, lin, level + 1, next_constant, evaluations);
    }
    return sum;
  }

  Eigen::MatrixXcd m_;
  Eigen::VectorXcd beta_;
  Eigen::VectorXd center_;
  double half_width_;
};

}  // namespace

QuadratureResult integrate_quadratic_form(const ComplexQuadraticForm& form, const QuadratureOptions& options) {
  const Eigen::Index n = form.dim();
  const Eigen::MatrixXd re = form.matrix.real();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(0.5 * (re + re.transpose()));
  if (!(eig.eigenvalues().minCoeff() > 0.0)) {
    throw DegenerateIntegrandError("quadrature box undefined: Re(A) is not positive definite");
  }

  // rho = Q S t with S = diag(lambda^-1/2): Re part of the quadratic becomes |t|^2.
  const Eigen::VectorXd scale = eig.eigenvalues().cwiseSqrt().cwiseInverse();
  const Eigen::MatrixXcd qs = (eig.eigenvectors() * scale.asDiagonal()).cast<cdouble>();
  Eigen::MatrixXcd m = qs.transpose() * form.matrix * qs;
  m = 0.5 * (m + m.transpose()).eval();
  const Eigen::VectorXcd beta = qs.transpose() * form.vector;
  const Eigen::VectorXd center = 0.5 * beta.real();
  const double jacobian = scale.prod();

  ScaledIntegrand integrand(m, beta, center, options.box_half_width);

  QuadratureResult result;
  result.panels.assign(static_cast<std::size_t>(n), options.initial_panels);
  cdouble estimate = integrand.integrate(result.panels, result.evaluations);

  bool refined = true;
  double last_change = 0.0;
  while (refined) {
    refined = false;
    last_change = 0.0;
    for (std::size_t j = 0; j < static_cast<std::size_t>(n); ++j) {
      std::vector<int> trial = result.panels;
      trial[j] *= 2;
      const cdouble candidate = integrand.integrate(trial, result.evaluations);
      const double change = std::abs(candidate - estimate) / std::max(std::abs(candidate), 1e-300);
      last_change = std::max(last_change, change);
      if (change >= options.rel_tol) {
        if (trial[j] > options.max_panels) {
          std::ostringstream msg;
          msg << "quadrature did not converge on axis " << j << " within " << options.max_panels
              << " panels (relative change " << change << ")";
          throw OracleFailure(msg.str(), (std::exp(form.scalar) * jacobian * candidate).real(), change);
        }
        result.panels = std::move(trial);
        estimate = candidate;
        refined = true;
      }
    }
  }

  result.value = std::exp(form.scalar) * jacobian * estimate;
  result.error_estimate = last_change;
  return result;
}

}  // namespace biphoton
