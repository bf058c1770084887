#pragma once

namespace privgraphon {

/// Entry point of the command-line tool. Exit codes: 0 success, 1 usage
/// error, 2 validation error or exceeded limit, 3 runtime failure.
int cli_main(int argc, char** argv);

}  // namespace privgraphon
