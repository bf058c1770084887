#include "privgraphon/cli.hpp"

int main(int argc, char** argv) { return privgraphon::cli_main(argc, argv); }
