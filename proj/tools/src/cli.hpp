// Command-line frontend: `run` executes a configured experiment and writes
// its report; `matrix`, `radar`, and `summary` turn saved reports (plus
// optional literature profiles and published-count fixtures) into the
// comparative artifacts. Exit codes: 0 success, 2 configuration/input error,
// 3 SUT failure. Every error path prints one line "error: ..." to stderr.
#pragma once

namespace agentsec::cli {

int run_cli(int argc, char** argv);

}  // namespace agentsec::cli
