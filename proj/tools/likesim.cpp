#include "likesim/cli.hpp"

int main(int argc, char** argv) { return likesim::cli::run(argc, argv); }
