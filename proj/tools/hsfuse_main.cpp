#include "cli/cli.hpp"

int main(int argc, char** argv) { return hsfuse::cli::run(std::vector<std::string>(argv, argv + argc)); }
