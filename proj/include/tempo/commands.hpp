#pragma once

#include <iosfwd>

#include "tempo/config.hpp"

namespace tempo {

// CLI entry points. Each throws ConfigError / DataError / SolverError on
// failure; the binary maps those to exit codes 2 / 3 / 4.
void cmd_ingest(const RunConfig& config, std::ostream& out);
void cmd_split(const RunConfig& config, std::ostream& out);
void cmd_synth(const RunConfig& config, std::ostream& out);
void cmd_train(const RunConfig& config, std::ostream& out);
void cmd_evaluate(const RunConfig& config, std::ostream& out);
void cmd_sweep(const RunConfig& config, std::ostream& out);
void cmd_export_curves(const RunConfig& config, std::ostream& out);

}  // namespace tempo
