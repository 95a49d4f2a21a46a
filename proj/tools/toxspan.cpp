#include "toxspan/cli.hpp"

int main(int argc, char** argv) { return toxspan::cli::run(argc, argv); }
