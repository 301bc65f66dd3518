#pragma once

namespace garmanet {

// Entry point for the garmanet command-line tool. Dispatches the subcommands
// decompose, diagnose, fit-garma, fit-ggarch, train, forecast, backtest and
// simulate, writes each run's artifacts plus a manifest.json into the chosen
// output directory, and maps failures onto distinct exit codes:
//   0 success, 1 configuration error, 2 data error, 3 numerical failure.
int cli_main(int argc, char** argv);

} // namespace garmanet
