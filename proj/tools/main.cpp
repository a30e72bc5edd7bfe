#include "cli/commands.hpp"

int main(int argc, char** argv) { return sheet_extremes::cli::run(argc, argv); }
