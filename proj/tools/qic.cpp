#include "qic/cli.hpp"

int main(int argc, char** argv) { return qic::cli::run(argc, argv); }
