#pragma once

#include <iosfwd>

#include "specproj/config.hpp"
#include "specproj/experiments.hpp"

namespace specproj {

// Materializes a config model description.
CovarianceModel build_model(const ModelSpec& spec);

// Resolves a named direction ("theta", "noise", "e<j>", "file:<path>") for
// target cluster r of the model.
VectorH resolve_direction(const std::string& spec, const CovarianceModel& model, int r);

// Runs one configured command end to end: executes the experiment, writes
// report.json and cells.csv under cfg.out, prints the human summary to
// `human` and progress notes to `progress`. Returns the process exit code:
// 0 when all verdicts pass, 1 when any fails, 2 on usage or I/O errors.
int run_command(const RunConfig& cfg, std::ostream& human, std::ostream& progress,
                bool quiet = false);

}  // namespace specproj
