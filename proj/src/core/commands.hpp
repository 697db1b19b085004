#pragma once

// Batch commands behind the command-line tool. Each one renders a complete
// CSV or JSON document that embeds the configuration it was run with.

#include <functional>
#include <string>

#include "config.hpp"

namespace hrcorr {

struct CommandOutput {
  std::string document;
  std::string summary;  // short human-readable result line(s)
  bool validation_passed = true;
};

using ProgressFn = std::function<void(const std::string&)>;

CommandOutput cmd_curve(const RunConfig& cfg);
CommandOutput cmd_heatmap(const RunConfig& cfg);
CommandOutput cmd_validate(const RunConfig& cfg, const ProgressFn& progress = {});
CommandOutput cmd_loss_variance(const RunConfig& cfg);
CommandOutput cmd_cov(const RunConfig& cfg);

}  // namespace hrcorr
