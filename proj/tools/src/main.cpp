#include "oarc_cli/cli.hpp"

int main(int argc, char** argv) { return oarc::cli::dispatch(argc, argv); }
