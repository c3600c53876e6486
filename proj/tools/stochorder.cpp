#include "stochorder/cli.hpp"

int main(int argc, char** argv) { return stochorder::cli::run(argc, argv); }
