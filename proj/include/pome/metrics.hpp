#ifndef POME_METRICS_HPP_
#define POME_METRICS_HPP_

#include <fstream>
#include <string>

#include "pome/algorithm.hpp"

namespace pome {

// Comma-delimited training metrics, one row per iteration. The file contains
// only run-deterministic quantities, so re-running a manifest reproduces it
// byte for byte; wall-clock timing goes to stdout and the manifest instead.
extern const char* const kMetricsHeader;

std::string metrics_row(const IterationReport& rep);

// Appends rows as they arrive and flushes after each one, so an aborted run
// leaves a parseable prefix.
class MetricsWriter {
 public:
  explicit MetricsWriter(const std::string& path);
  void append(const IterationReport& rep);

 private:
  std::ofstream os_;
};

}  // namespace pome

#endif  // POME_METRICS_HPP_
