#ifndef BYUCOP_MCMC_HPP_
#define BYUCOP_MCMC_HPP_

#include <Eigen/Dense>
#include <cstdint>
#include <iosfwd>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "byucop/bernstein.hpp"
#include "byucop/marginals.hpp"
#include "byucop/prior.hpp"
#include "byucop/proposals.hpp"

namespace byucop {

struct RunConfig {
  std::int64_t iterations = 10000;
  std::int64_t burnin = 0;
  std::int64_t thin = 1;
  std::uint64_t seed = 1;
  ProposalKind proposal = ProposalKind::ire(5);
  PriorSpec prior;
  double r_hr = 0.5;      // hit-and-run proposal scale
  int g_subsweeps = 1;    // G-updates per sweep
  bool sample_marginals = false;  // t-walk on parametric marginal parameters
  TwalkOptions twalk;
  ProjectionOptions projection;

  void check() const;
};

struct ChainState {
  YettCopula g;
  std::optional<CorrelationMatrix> r;  // present iff centering is Gaussian
  Eigen::VectorXd theta;               // stacked parametric marginal parameters
  double loglik = 0.0;                 // cached; matches recomputation to 1e-9
  double distance = 0.0;               // cached D(g, projected centering)
};

struct RunResult {
  std::int64_t saved = 0;
  std::int64_t g_proposed = 0, g_accepted = 0;
  std::int64_t r_proposed = 0, r_accepted = 0;
  std::int64_t theta_proposed = 0, theta_accepted = 0;
  std::int64_t r_rejected_nonpsd = 0;
  double seconds = 0.0;
  ChainState final_state;

  double accept_g() const { return g_proposed ? double(g_accepted) / g_proposed : 0.0; }
  double accept_r() const { return r_proposed ? double(r_accepted) / r_proposed : 0.0; }
  double accept_theta() const {
    return theta_proposed ? double(theta_accepted) / theta_proposed : 0.0;
  }
};

// One Metropolis-within-Gibbs worker: owns the state, the projected
// centering, the likelihood kernel cache, and the adjacency. Blocks run in
// the fixed order G -> R -> marginals.
class Sampler {
 public:
  // data: raw observations (n x d), possibly 0 rows for a flat likelihood.
  // marginals must have one entry per column when n > 0.
  Sampler(const Eigen::MatrixXd& data, std::vector<MarginalModel> marginals,
          const Degree& degree, const RunConfig& cfg);

  bool update_g(Rng& rng);
  bool update_r(Rng& rng);
  // R-update with injected direction draws (worked-example / test entry).
  bool update_r_given(double delta, const Eigen::VectorXd& z, Rng& rng);
  bool update_theta(Rng& rng);

  const ChainState& state() const { return state_; }
  const YettCopula& centering_projection() const { return g0_; }
  const std::vector<MarginalModel>& marginals() const { return marginals_; }
  bool has_r() const { return state_.r.has_value(); }
  bool has_theta() const { return twalk_ != nullptr; }
  std::int64_t nonpsd_rejections() const { return nonpsd_; }

  // Full recomputation of the cached log-likelihood and prior distance.
  void refresh_caches();
  double loglik_recomputed() const;
  double distance_recomputed() const;
  double log_prior_value() const { return -0.5 * cfg_.prior.alpha * state_.distance; }

 private:
  void rebuild_likelihood();
  double marginal_energy_at(const Eigen::VectorXd& theta) const;

  RunConfig cfg_;
  Eigen::MatrixXd data_;
  std::vector<MarginalModel> marginals_;
  ChainState state_;
  YettCopula g0_;            // projected centering on the current grid
  Adjacency adj_;
  Eigen::MatrixXd pseudo_;   // current pseudo-observations
  std::unique_ptr<CopulaLikelihood> lik_;  // null when n = 0
  std::unique_ptr<Twalk> twalk_;           // null when marginals frozen
  std::int64_t accepts_since_refresh_ = 0;
  std::int64_t nonpsd_ = 0;
};

// Runs the configured chain, appending thinned post-burnin records to
// chain_out (ignored when null).
RunResult run(const Eigen::MatrixXd& data, std::vector<MarginalModel> marginals,
              const Degree& degree, const RunConfig& cfg, std::ostream* chain_out,
              const std::vector<std::pair<std::string, std::string>>& config_echo = {});

// Chain persistence. Header: format tag, dimensions, config echo; then one
// record per line (W, upper triangle of R if present, theta if present,
// log-lik, log-prior), 17 significant digits, append-only.
inline constexpr const char* kChainFormat = "byucop-chain-1";

void write_chain_header(std::ostream& os, const Degree& degree, bool has_r, int n_theta,
                        const std::vector<std::pair<std::string, std::string>>& config_echo);
void write_chain_record(std::ostream& os, const ChainState& s, double log_prior);

struct ChainFile {
  Degree degree;
  bool has_r = false;
  int n_theta = 0;
  std::vector<std::pair<std::string, std::string>> config_echo;
  std::vector<Eigen::VectorXd> w;
  std::vector<Eigen::VectorXd> r_upper;  // row-major upper triangle, i < j
  std::vector<Eigen::VectorXd> theta;
  std::vector<double> loglik, logprior;
  bool truncated = false;  // trailing partial record dropped

  std::size_t size() const { return w.size(); }
};

// Best-effort read: a trailing partial record sets `truncated` instead of
// failing. A malformed header throws.
ChainFile read_chain(std::istream& is);

}  // namespace byucop

#endif  // BYUCOP_MCMC_HPP_
