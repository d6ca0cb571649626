#include "pome/metrics.hpp"

#include <cstdio>

#include "pome/error.hpp"

namespace pome {

const char* const kMetricsHeader =
    "iteration,total_steps,mean_return,median_return,surrogate_loss,value_loss,"
    "reward_model_loss,transition_model_loss,mean_epsilon,epsilon_bar_mean,approx_kl,"
    "clip_fraction,alpha,lr";

std::string metrics_row(const IterationReport& rep) {
  char buf[512];
  std::snprintf(buf, sizeof buf,
                "%d,%lld,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g",
                rep.iteration, static_cast<long long>(rep.total_steps), rep.mean_return,
                rep.median_return, rep.surrogate, rep.value_loss, rep.reward_model_loss,
                rep.transition_model_loss, rep.mean_epsilon, rep.eps_bar_mean, rep.approx_kl,
                rep.clip_fraction, rep.alpha, rep.lr);
  return buf;
}

MetricsWriter::MetricsWriter(const std::string& path) : os_(path) {
  if (!os_) throw ContractError("cannot open metrics file for writing: " + path);
  os_ << kMetricsHeader << "\n";
  os_.flush();
}

void MetricsWriter::append(const IterationReport& rep) {
  os_ << metrics_row(rep) << "\n";
  os_.flush();
}

}  // namespace pome
