#ifndef NERSYNTH_PIPELINE_HPP
#define NERSYNTH_PIPELINE_HPP

#include <string>

#include "nersynth/config.hpp"

namespace nersynth {

struct PipelineOutcome {
  // false: stopped at the export-for-translation step, awaiting the
  // externally produced translation file.
  bool completed = false;
  std::string export_path;
};

// infill -> split -> exclude -> drop -> export -> [external translation]
// -> align -> filter -> project -> stats. Stage failures are reported with
// the stage name prefixed.
PipelineOutcome run_pipeline(const PipelineConfig& config);

}  // namespace nersynth

#endif
