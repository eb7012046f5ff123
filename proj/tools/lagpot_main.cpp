#include "lagpot/cli.hpp"

int main(int argc, char** argv) { return lagpot::cli::run(argc, argv); }
