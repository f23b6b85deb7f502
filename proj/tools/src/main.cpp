#include "cli.hpp"

int main(int argc, char** argv) { return coopeq::cli::run(argc, argv); }
