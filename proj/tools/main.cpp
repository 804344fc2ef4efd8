#include "cli.hpp"

int main(int argc, char** argv) { return landuse::cli::run(argc, argv); }
