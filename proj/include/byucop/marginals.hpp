#ifndef BYUCOP_MARGINALS_HPP_
#define BYUCOP_MARGINALS_HPP_

#include <Eigen/Dense>
#include <functional>
#include <string>
#include <vector>

#include "byucop/bernstein.hpp"
#include "byucop/math.hpp"

namespace byucop {

// Parametric families needed by the four-dimensional simulation setup, plus
// frozen empirical CDFs.
enum class Family { Gaussian, LogNormal, Gamma, Beta, GaussMix2 };

Family family_from_string(const std::string& name);
std::string family_name(Family f);
int family_param_count(Family f);

double family_logpdf(Family f, const Eigen::VectorXd& theta, double x);
double family_cdf(Family f, const Eigen::VectorXd& theta, double x);
bool family_in_support(Family f, const Eigen::VectorXd& theta);

struct MarginalModel {
  enum class Kind { Parametric, Empirical };
  Kind kind = Kind::Empirical;
  Family family = Family::Gaussian;
  Eigen::VectorXd theta;          // Parametric
  std::vector<double> sorted;     // Empirical: sorted sample values

  static MarginalModel parametric(Family f, Eigen::VectorXd theta0);
  static MarginalModel empirical(const Eigen::VectorXd& column);

  double cdf(double x) const;
  double logpdf(double x) const;  // Empirical kind has no density; error
  bool in_support() const;
  int param_count() const { return kind == Kind::Parametric ? family_param_count(family) : 0; }
};

// u_ij = F_j(x_ij); empirical kind uses rank_i / (n + 1) with average ranks
// for ties. Parametric CDF values are clamped into [1e-12, 1 - 1e-12].
Eigen::MatrixXd pseudo_observations(const Eigen::MatrixXd& data,
                                    const std::vector<MarginalModel>& models);

// Negative log posterior of the stacked marginal parameters given the
// current copula: marginal likelihood + copula factor at the implied
// pseudo-observations + flat priors on the declared supports.
double marginal_energy(const Eigen::VectorXd& stacked_theta, const Eigen::MatrixXd& data,
                       const std::vector<MarginalModel>& models, const BernsteinCopula& bc);

// Self-adjusting two-point sampler for exp(-E). Defaults follow the
// standard reference implementation (traverse/walk/blow/hop).
struct TwalkOptions {
  double aw = 1.5;   // walk scale
  double at = 6.0;   // traverse scale
  int n1 = 4;        // expected coordinates moved per step
  double prob_traverse = 0.4918;
  double prob_walk = 0.4918;
  double prob_blow = 0.0082;  // remainder is hop
};

class Twalk {
 public:
  using EnergyFn = std::function<double(const Eigen::VectorXd&)>;
  using SupportFn = std::function<bool(const Eigen::VectorXd&)>;

  Twalk(EnergyFn energy, SupportFn support, Eigen::VectorXd x0, Eigen::VectorXd x1,
        TwalkOptions opts = {});

  // One transition of the coupled pair; returns whether the moved point
  // accepted its proposal.
  bool step(Rng& rng);

  // Recompute both cached energies; required whenever the energy function's
  // captured state (the current copula) has changed.
  void refresh_energy();

  const Eigen::VectorXd& x() const { return x_; }
  const Eigen::VectorXd& xp() const { return xp_; }
  double energy_x() const { return ex_; }

 private:
  EnergyFn energy_;
  SupportFn support_;
  Eigen::VectorXd x_, xp_;
  double ex_, exp_;
  TwalkOptions opts_;
};

}  // namespace byucop

#endif  // BYUCOP_MARGINALS_HPP_
