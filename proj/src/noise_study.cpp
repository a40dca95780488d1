#include "cfoed/noise_study.hpp"

#include <cmath>
#include <limits>

#include "cfoed/errors.hpp"
#include "cfoed/inverse.hpp"
#include "cfoed/rng.hpp"

namespace cfoed {

void NoiseModel::validate() const {
  if (!(sigma >= 0.0)) throw domain_error("noise sigma must be >= 0");
}

NoiseStudyResult run_noise_study(const AffineParameterizedSystem& system,
                                 const ModelProblemSpec& truth,
                                 const std::vector<LabeledDesign>& designs,
                                 const NoiseStudyConfig& config,
                                 const ExecPolicy& policy) {
  config.noise.validate();
  if (config.trials < 1) throw domain_error("noise study needs trials >= 1");
  truth.validate();
  if (system.parameter_count() != 1)
    throw contract_error("the noise study estimates a scalar parameter");

  NoiseStudyResult out;
  for (std::size_t d = 0; d < designs.size(); ++d) {
    const LabeledDesign& ld = designs[d];
    std::vector<TrialRecord> records(static_cast<std::size_t>(config.trials));

    parallel_for(config.trials, policy, [&](int trial) {
      // stream id fixed by (design, trial): draws are identical at any
      // thread count
      rng::Stream stream(config.seed,
                         d * static_cast<std::size_t>(config.trials) +
                             static_cast<std::size_t>(trial));
      DataVector data;
      data.values.resize(ld.design.count());
      for (int i = 0; i < ld.design.count(); ++i) {
        const double x = ld.design.positions[static_cast<std::size_t>(i)];
        const double clean = -(truth.b / (2.0 * truth.k)) * x * x +
                             ((truth.p + truth.b) / truth.k) * x;
        data.values[i] = clean + config.noise.sigma * stream.next_normal();
      }
      TrialRecord rec;
      rec.design_label = ld.label;
      rec.trial = trial;
      try {
        const InverseResult inv = standard_inverse(
            system, ld.design, data,
            Eigen::VectorXd::Constant(1, config.eps0), {config.support});
        rec.eps_hat = inv.eps[0];
      } catch (const error&) {
        rec.failed = true;
        rec.eps_hat = std::numeric_limits<double>::quiet_NaN();
      }
      records[static_cast<std::size_t>(trial)] = std::move(rec);
    });

    DesignSummary summary;
    summary.label = ld.label;
    std::vector<double> estimates;
    estimates.reserve(records.size());
    for (TrialRecord& rec : records) {
      if (rec.failed)
        ++summary.failures;
      else
        estimates.push_back(rec.eps_hat);
      out.trials.push_back(std::move(rec));
    }
    const int n = static_cast<int>(estimates.size());
    if (n > 0) {
      double mean = 0.0;
      for (double e : estimates) mean += e;
      mean /= n;
      summary.mean = mean;
      if (n > 1) {
        double ss = 0.0;
        for (double e : estimates) ss += (e - mean) * (e - mean);
        summary.stddev = std::sqrt(ss / (n - 1));
        summary.stddev_available = true;
      }
    }
    out.summary.push_back(std::move(summary));
  }
  return out;
}

}  // namespace cfoed
